//! Mask strategies, including the time-dependent selection loops.
//!
//! The time-dependent encoders run `N` rounds. Round `n` picks a mask `K_n`
//! from the criterion `(f - dt alpha Lap f - u_n)^2` at the current state and
//! then advances the state by one implicit step with Dirichlet data on `K_n`.
//! The returned mask is the last one, `K_{N-1}`.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::image::{ImageGrid, Mask};
use crate::mask::{
    criterion_stationary, criterion_timedep, h1_criterion, halftone_mask, presmooth, random_mask,
    threshold_mask, CriterionField, DensityMode,
};
use crate::noise::budget_count;
use crate::solver::{solve_denoise_step, solve_parabolic_step, SolveSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MaskKind {
    /// Hard threshold of the stationary topological gradient.
    OptThreshold,
    /// Halftoned density of the stationary topological gradient.
    OptHalftone,
    /// Hard threshold of `(Lap f)^2`.
    H1Threshold,
    /// Halftoned density of `(Lap f)^2`.
    H1Halftone,
    Random,
    /// One stationary halftone mask reused at every step.
    L2Sta,
    /// Nested, shrinking masks.
    L2Dec,
    /// Nested, growing masks.
    L2Inc,
    /// A fresh halftone mask at every step.
    L2Insta,
}

impl MaskKind {
    pub const ALL: [MaskKind; 9] = [
        MaskKind::OptThreshold,
        MaskKind::OptHalftone,
        MaskKind::H1Threshold,
        MaskKind::H1Halftone,
        MaskKind::Random,
        MaskKind::L2Sta,
        MaskKind::L2Dec,
        MaskKind::L2Inc,
        MaskKind::L2Insta,
    ];

    pub fn name(self) -> &'static str {
        match self {
            MaskKind::OptThreshold => "opt-threshold",
            MaskKind::OptHalftone => "opt-halftone",
            MaskKind::H1Threshold => "h1-threshold",
            MaskKind::H1Halftone => "h1-halftone",
            MaskKind::Random => "random",
            MaskKind::L2Sta => "l2sta",
            MaskKind::L2Dec => "l2dec",
            MaskKind::L2Inc => "l2inc",
            MaskKind::L2Insta => "l2insta",
        }
    }

    /// Whether the mask selection itself runs the implicit time stepping.
    pub fn is_time_dependent(self) -> bool {
        matches!(self, MaskKind::L2Dec | MaskKind::L2Inc | MaskKind::L2Insta)
    }
}

impl fmt::Display for MaskKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for MaskKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let squash = |v: &str| v.to_ascii_lowercase().replace(['_', '-'], "");
        let key = squash(s);
        MaskKind::ALL
            .into_iter()
            .find(|k| squash(k.name()) == key)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown mask method '{s}'")))
    }
}

/// Initial state `u_0` of the time-dependent encoders.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum InitialState {
    #[default]
    Zero,
    Source,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MaskStrategy {
    pub kind: MaskKind,
    /// Fraction of pixels to store.
    pub c: f64,
    pub alpha: f64,
    pub dt: f64,
    /// Number of selection rounds of the time-dependent kinds.
    pub n_steps: usize,
    /// Gaussian presmoothing of the image before the criterion; 0 disables it.
    pub presmooth_sigma: f64,
    pub density_mode: DensityMode,
    pub initial: InitialState,
    /// Seed of the random mask.
    pub seed: u64,
    /// Relative residual of the inner solves.
    pub tol: f64,
}

impl Default for MaskStrategy {
    fn default() -> Self {
        Self {
            kind: MaskKind::OptHalftone,
            c: 0.1,
            alpha: 3.0,
            dt: 0.1,
            n_steps: 10,
            presmooth_sigma: 0.0,
            density_mode: DensityMode::default(),
            initial: InitialState::default(),
            seed: 0,
            tol: 1e-8,
        }
    }
}

impl MaskStrategy {
    pub fn new(kind: MaskKind, c: f64, alpha: f64) -> Self {
        Self {
            kind,
            c,
            alpha,
            ..Self::default()
        }
    }

    pub fn with_steps(mut self, n_steps: usize) -> Self {
        self.n_steps = n_steps;
        self
    }

    pub fn with_presmooth(mut self, sigma: f64) -> Self {
        self.presmooth_sigma = sigma;
        self
    }

    pub fn solve_spec(&self) -> SolveSpec {
        SolveSpec {
            alpha: self.alpha,
            dt: self.dt,
            tol: self.tol,
            max_iter: None,
        }
    }

    pub fn validate(&self, pixels: usize) -> Result<()> {
        if !(self.c > 0.0 && self.c <= 1.0) {
            return Err(Error::InvalidParameter(format!("budget c must lie in (0, 1], got {}", self.c)));
        }
        if budget_count(self.c, pixels) == 0 {
            return Err(Error::InvalidParameter(format!(
                "budget c = {} selects no pixel out of {pixels}",
                self.c
            )));
        }
        if !(self.presmooth_sigma >= 0.0 && self.presmooth_sigma.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "presmoothing sigma must be >= 0, got {}",
                self.presmooth_sigma
            )));
        }
        if self.kind.is_time_dependent() && self.n_steps == 0 {
            return Err(Error::InvalidParameter(format!("{} needs at least one step", self.kind)));
        }
        self.solve_spec().validate()
    }
}

#[derive(Debug, Clone)]
pub struct EncodeResult {
    pub mask: Mask,
    /// Masks of every round, in order; empty for the stationary kinds.
    pub iterates: Vec<Mask>,
    /// Criterion that produced the last mask.
    pub criterion_final: CriterionField,
    /// Final state `u_N` of the time stepping, when there was one.
    pub state: Option<ImageGrid>,
}

/// How the state advances between selection rounds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Evolution {
    /// Dirichlet data from the source image.
    Inpaint,
    /// Dirichlet data from the previous state.
    Denoise,
}

fn stationary_criterion(f: &ImageGrid, s: &MaskStrategy) -> CriterionField {
    match s.kind {
        MaskKind::H1Threshold | MaskKind::H1Halftone => h1_criterion(f, s.presmooth_sigma),
        _ => criterion_stationary(f, s.alpha, s.presmooth_sigma),
    }
}

fn stationary_mask(f: &ImageGrid, s: &MaskStrategy) -> Result<(Mask, CriterionField)> {
    let crit = stationary_criterion(f, s);
    let mask = match s.kind {
        MaskKind::OptThreshold | MaskKind::H1Threshold => threshold_mask(&crit, s.c, None, None)?,
        MaskKind::Random => random_mask(f.width(), f.height(), s.c, s.seed)?,
        _ => halftone_mask(&crit, s.c, s.density_mode)?,
    };
    Ok((mask, crit))
}

fn evolve(f: &ImageGrid, s: &MaskStrategy, evolution: Evolution) -> Result<EncodeResult> {
    s.validate(f.len())?;
    let spec = s.solve_spec();
    let steps = s.n_steps;
    let fs = presmooth(f, s.presmooth_sigma);
    let mut u = match (evolution, s.initial) {
        (Evolution::Denoise, _) | (_, InitialState::Source) => f.clone(),
        (Evolution::Inpaint, InitialState::Zero) => ImageGrid::zeros(f.width(), f.height())?,
    };
    let fixed = if s.kind.is_time_dependent() {
        None
    } else {
        Some(stationary_mask(f, s)?)
    };

    let dc_dec = (1.0 - s.c) / steps as f64;
    let dc_inc = s.c / steps as f64;
    let mut iterates: Vec<Mask> = Vec::with_capacity(steps);
    let mut last_crit = None;
    for round in 0..steps {
        let (mask, crit) = match &fixed {
            Some((mask, crit)) => (mask.clone(), crit.clone()),
            None => {
                let crit = criterion_timedep(&fs, &u, s.alpha, s.dt, 0.0)?;
                let prev = iterates.last();
                let mask = match s.kind {
                    MaskKind::L2Dec => {
                        let budget = if round + 1 == steps {
                            s.c
                        } else {
                            1.0 - (round + 1) as f64 * dc_dec
                        };
                        threshold_mask(&crit, budget, None, prev)?
                    }
                    MaskKind::L2Inc => {
                        let added = threshold_mask(&crit, dc_inc, prev, None)?;
                        match prev {
                            Some(p) => added.union(p)?,
                            None => added,
                        }
                    }
                    _ => halftone_mask(&crit, s.c, s.density_mode)?,
                };
                (mask, crit)
            }
        };
        u = match evolution {
            Evolution::Inpaint => solve_parabolic_step(&u, f, &mask, &spec)?,
            Evolution::Denoise => solve_denoise_step(&u, &mask, &spec)?,
        };
        iterates.push(mask);
        last_crit = Some(crit);
    }
    Ok(EncodeResult {
        mask: iterates.last().cloned().expect("at least one round"),
        iterates,
        criterion_final: last_crit.expect("at least one round"),
        state: Some(u),
    })
}

/// Runs the strategy's mask selection on `f`.
pub fn encode_mask(f: &ImageGrid, strategy: &MaskStrategy) -> Result<EncodeResult> {
    if strategy.kind.is_time_dependent() {
        return evolve(f, strategy, Evolution::Inpaint);
    }
    strategy.validate(f.len())?;
    let (mask, crit) = stationary_mask(f, strategy)?;
    Ok(EncodeResult {
        mask,
        iterates: Vec::new(),
        criterion_final: crit,
        state: None,
    })
}

fn with_kind(strategy: &MaskStrategy, kind: MaskKind) -> MaskStrategy {
    MaskStrategy { kind, ..*strategy }
}

/// Shrinking nested masks: round `n` keeps a fraction `1 - (n + 1)(1 - c)/N`
/// of the pixels, chosen inside the previous mask.
pub fn encode_l2dec(f: &ImageGrid, strategy: &MaskStrategy) -> Result<EncodeResult> {
    evolve(f, &with_kind(strategy, MaskKind::L2Dec), Evolution::Inpaint)
}

/// Growing nested masks: every round adds `ceil(c N_pixels / N)` new pixels.
pub fn encode_l2inc(f: &ImageGrid, strategy: &MaskStrategy) -> Result<EncodeResult> {
    evolve(f, &with_kind(strategy, MaskKind::L2Inc), Evolution::Inpaint)
}

/// A new halftone mask of budget `c` every round.
pub fn encode_l2insta(f: &ImageGrid, strategy: &MaskStrategy) -> Result<EncodeResult> {
    evolve(f, &with_kind(strategy, MaskKind::L2Insta), Evolution::Inpaint)
}

/// The stationary halftone mask.
pub fn encode_l2sta(f: &ImageGrid, strategy: &MaskStrategy) -> Result<EncodeResult> {
    encode_mask(f, &with_kind(strategy, MaskKind::L2Sta))
}

/// Selection loop of denoising by inpainting.
///
/// Starts from `u_0 = f_noisy`; each implicit step takes its Dirichlet data
/// from the previous state, so the stored values are smoothed along the way.
/// Stationary kinds keep one fixed mask for all `n_steps` steps. The final
/// state is returned in [`EncodeResult::state`].
pub fn evolve_denoise(f_noisy: &ImageGrid, strategy: &MaskStrategy) -> Result<EncodeResult> {
    evolve(f_noisy, strategy, Evolution::Denoise)
}
