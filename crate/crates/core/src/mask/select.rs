use crate::error::{Error, Result};
use crate::image::Mask;
use crate::mask::CriterionField;
use crate::noise::{budget_count, sample_indices};

pub(crate) fn check_budget(c: f64, n: usize) -> Result<()> {
    if !(c > 0.0 && c <= 1.0) {
        return Err(Error::InvalidParameter(format!("budget c must lie in (0, 1], got {c}")));
    }
    if budget_count(c, n) == 0 {
        return Err(Error::InvalidParameter(format!(
            "budget c = {c} selects no pixel out of {n}"
        )));
    }
    Ok(())
}

/// Keeps the `ceil(c N)` largest criterion values among the eligible pixels.
///
/// Eligible pixels are those in `include_only` (when given) that are not in
/// `exclude` (when given). Ties go to the smaller row-major index. When fewer
/// pixels are eligible than the budget asks for, all of them are selected.
pub fn threshold_mask(
    crit: &CriterionField,
    c: f64,
    exclude: Option<&Mask>,
    include_only: Option<&Mask>,
) -> Result<Mask> {
    let (w, h) = crit.shape();
    let n = w * h;
    check_budget(c, n)?;
    for m in exclude.iter().chain(include_only.iter()) {
        m.ensure_same_shape((w, h))?;
    }
    let k = budget_count(c, n);
    let values = crit.values().data();
    let mut eligible: Vec<usize> = (0..n)
        .filter(|&i| include_only.is_none_or(|m| m.contains(i)))
        .filter(|&i| !exclude.is_some_and(|m| m.contains(i)))
        .collect();
    let cmp = |a: &usize, b: &usize| values[*b].total_cmp(&values[*a]).then(a.cmp(b));
    if eligible.len() > k {
        eligible.select_nth_unstable_by(k - 1, cmp);
        eligible.truncate(k);
    }
    Ok(Mask::from_indices(w, h, eligible))
}

/// `ceil(c N)` distinct pixels drawn uniformly from a seeded stream.
pub fn random_mask(width: usize, height: usize, c: f64, seed: u64) -> Result<Mask> {
    let n = width * height;
    check_budget(c, n)?;
    Ok(Mask::from_indices(width, height, sample_indices(n, budget_count(c, n), seed)))
}
