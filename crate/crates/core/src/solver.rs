//! Finite-difference solvers for the masked diffusion problems.
//!
//! Every problem here has the form
//!
//! ```text
//! reaction * u - coeff * Lap(u) = rhs    off the mask
//!                             u = data   on the mask
//! ```
//!
//! with the mirrored (Neumann) Laplacian of [`crate::image::laplacian`].
//! Mask pixels are eliminated and folded into the right-hand side, so the
//! remaining system is symmetric positive definite whenever `reaction > 0`
//! (or every free component touches the mask) and is solved matrix-free by
//! Jacobi-preconditioned conjugate gradients.

use crate::error::{Error, Result};
use crate::image::{gradient, ImageGrid, Mask};

/// Parameters shared by the stationary and time-implicit solves.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveSpec {
    /// Diffusivity weight of `-alpha Lap u + u`.
    pub alpha: f64,
    /// Time step of the implicit parabolic scheme.
    pub dt: f64,
    /// Relative residual `|r| / |b|` at which CG stops.
    pub tol: f64,
    /// Iteration cap; `None` selects `10 sqrt(unknowns) + 1000`.
    pub max_iter: Option<usize>,
}

impl Default for SolveSpec {
    fn default() -> Self {
        Self {
            alpha: 1.0,
            dt: 0.1,
            tol: 1e-8,
            max_iter: None,
        }
    }
}

impl SolveSpec {
    pub fn with_alpha(alpha: f64) -> Self {
        Self {
            alpha,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha.is_finite()) {
            return Err(Error::InvalidParameter(format!("alpha must be > 0, got {}", self.alpha)));
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::InvalidParameter(format!("dt must be > 0, got {}", self.dt)));
        }
        if !(self.tol > 0.0 && self.tol < 1.0) {
            return Err(Error::InvalidParameter(format!("tol must lie in (0, 1), got {}", self.tol)));
        }
        if self.max_iter == Some(0) {
            return Err(Error::InvalidParameter("max_iter must be >= 1".into()));
        }
        Ok(())
    }
}

/// A masked reaction-diffusion system.
#[derive(Debug, Clone, Copy)]
pub struct LinearOperatorSpec<'a> {
    /// Weight of the identity term: 1 for the L2 problems, 0 for pure diffusion.
    pub reaction: f64,
    /// Multiplier of the Laplacian (`alpha`, or `dt * alpha` for one implicit step).
    pub coeff: f64,
    pub dirichlet: &'a Mask,
    pub rhs: &'a ImageGrid,
    pub dirichlet_values: &'a ImageGrid,
    /// Optional CG starting point; only its off-mask values are used.
    pub initial: Option<&'a ImageGrid>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveReport {
    pub iterations: usize,
    /// Achieved relative residual.
    pub residual: f64,
}

struct Stencil<'a> {
    width: usize,
    height: usize,
    free: &'a [bool],
    reaction: f64,
    coeff: f64,
}

impl Stencil<'_> {
    fn degree(&self, x: usize, y: usize) -> f64 {
        let mut d = 0.0;
        if x > 0 {
            d += 1.0;
        }
        if x + 1 < self.width {
            d += 1.0;
        }
        if y > 0 {
            d += 1.0;
        }
        if y + 1 < self.height {
            d += 1.0;
        }
        d
    }

    /// `out = A v` on free pixels; `v` must vanish on the mask.
    fn apply(&self, v: &[f64], out: &mut [f64]) {
        let w = self.width;
        for y in 0..self.height {
            for x in 0..w {
                let i = y * w + x;
                if !self.free[i] {
                    out[i] = 0.0;
                    continue;
                }
                let c = v[i];
                let mut lap = 0.0;
                if x > 0 {
                    lap += v[i - 1] - c;
                }
                if x + 1 < w {
                    lap += v[i + 1] - c;
                }
                if y > 0 {
                    lap += v[i - w] - c;
                }
                if y + 1 < self.height {
                    lap += v[i + w] - c;
                }
                out[i] = self.reaction * c - self.coeff * lap;
            }
        }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Solves a masked system with Jacobi-preconditioned CG.
pub fn solve_linear(
    op: &LinearOperatorSpec<'_>,
    tol: f64,
    max_iter: Option<usize>,
) -> Result<(ImageGrid, SolveReport)> {
    let (w, h) = op.rhs.shape();
    op.dirichlet.ensure_same_shape((w, h))?;
    op.dirichlet_values.ensure_same_shape((w, h))?;
    if let Some(init) = op.initial {
        init.ensure_same_shape((w, h))?;
    }
    if !(op.reaction >= 0.0 && op.coeff >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "operator needs reaction >= 0 and coeff >= 0, got {} and {}",
            op.reaction, op.coeff
        )));
    }

    let n = w * h;
    let free: Vec<bool> = op.dirichlet.bits().iter().map(|&b| !b).collect();
    let unknowns = free.iter().filter(|&&f| f).count();
    let data = op.dirichlet_values.data();

    let mut out = vec![0.0; n];
    for i in op.dirichlet.indices() {
        out[i] = data[i];
    }
    if unknowns == 0 {
        let report = SolveReport {
            iterations: 0,
            residual: 0.0,
        };
        return Ok((ImageGrid::new(w, h, out)?, report));
    }

    let stencil = Stencil {
        width: w,
        height: h,
        free: &free,
        reaction: op.reaction,
        coeff: op.coeff,
    };

    // b = rhs + coeff * (sum of Dirichlet neighbours) on free pixels.
    let rhs = op.rhs.data();
    let mut b = vec![0.0; n];
    let mut inv_diag = vec![0.0; n];
    for y in 0..h {
        for x in 0..w {
            let i = y * w + x;
            if !free[i] {
                continue;
            }
            let mut acc = rhs[i];
            let mut add = |j: usize| {
                if !free[j] {
                    acc += op.coeff * data[j];
                }
            };
            if x > 0 {
                add(i - 1);
            }
            if x + 1 < w {
                add(i + 1);
            }
            if y > 0 {
                add(i - w);
            }
            if y + 1 < h {
                add(i + w);
            }
            b[i] = acc;
            let diag = op.reaction + op.coeff * stencil.degree(x, y);
            inv_diag[i] = if diag > 0.0 { 1.0 / diag } else { 0.0 };
        }
    }

    let b_norm = dot(&b, &b).sqrt();
    if b_norm == 0.0 {
        let report = SolveReport {
            iterations: 0,
            residual: 0.0,
        };
        return Ok((ImageGrid::new(w, h, out)?, report));
    }

    let mut x = vec![0.0; n];
    if let Some(init) = op.initial {
        for (i, v) in init.data().iter().enumerate() {
            if free[i] {
                x[i] = *v;
            }
        }
    }
    let mut r = vec![0.0; n];
    stencil.apply(&x, &mut r);
    for i in 0..n {
        r[i] = b[i] - r[i];
    }
    let mut z: Vec<f64> = r.iter().zip(&inv_diag).map(|(a, d)| a * d).collect();
    let mut p = z.clone();
    let mut ap = vec![0.0; n];
    let mut rz = dot(&r, &z);
    let mut residual = dot(&r, &r).sqrt() / b_norm;
    let cap = max_iter.unwrap_or_else(|| 10 * (unknowns as f64).sqrt().ceil() as usize + 1000);

    let mut iterations = 0;
    while residual > tol {
        if iterations >= cap {
            return Err(Error::NotConverged {
                iterations,
                residual,
            });
        }
        stencil.apply(&p, &mut ap);
        let pap = dot(&p, &ap);
        if pap <= 0.0 {
            // Singular direction: the free set has a component without Dirichlet data.
            return Err(Error::NotConverged {
                iterations,
                residual,
            });
        }
        let step = rz / pap;
        for i in 0..n {
            x[i] += step * p[i];
            r[i] -= step * ap[i];
        }
        for i in 0..n {
            z[i] = r[i] * inv_diag[i];
        }
        let rz_next = dot(&r, &z);
        let beta = rz_next / rz;
        rz = rz_next;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
        residual = dot(&r, &r).sqrt() / b_norm;
        iterations += 1;
    }

    for i in 0..n {
        if free[i] {
            out[i] = x[i];
        }
    }
    Ok((
        ImageGrid::new(w, h, out)?,
        SolveReport {
            iterations,
            residual,
        },
    ))
}

/// Stationary inpainting `-alpha Lap u + u = 0` off `mask`, `u = f` on it.
pub fn solve_stationary(f: &ImageGrid, mask: &Mask, spec: &SolveSpec) -> Result<ImageGrid> {
    spec.validate()?;
    f.ensure_same_shape(mask.shape())?;
    if mask.is_empty() {
        log::warn!("stationary solve with an empty mask: the solution is identically zero");
    }
    let zero = ImageGrid::zeros(f.width(), f.height())?;
    let op = LinearOperatorSpec {
        reaction: 1.0,
        coeff: spec.alpha,
        dirichlet: mask,
        rhs: &zero,
        dirichlet_values: f,
        initial: None,
    };
    Ok(solve_linear(&op, spec.tol, spec.max_iter)?.0)
}

/// Homogeneous diffusion inpainting `Lap u = 0` off `mask`, `u = f` on it.
///
/// This is the `alpha -> infinity` limit of the stationary problem and the
/// steady state of the parabolic decoder.
pub fn solve_homogeneous(f: &ImageGrid, mask: &Mask, spec: &SolveSpec) -> Result<ImageGrid> {
    spec.validate()?;
    f.ensure_same_shape(mask.shape())?;
    if mask.is_empty() {
        return Err(Error::InvalidParameter(
            "homogeneous diffusion needs at least one stored pixel".into(),
        ));
    }
    let zero = ImageGrid::zeros(f.width(), f.height())?;
    // Start from the mask mean: much closer to the harmonic interpolant than zero.
    let mean = mask.indices().map(|i| f.data()[i]).sum::<f64>() / mask.count() as f64;
    let init = ImageGrid::filled(f.width(), f.height(), mean)?;
    let op = LinearOperatorSpec {
        reaction: 0.0,
        coeff: 1.0,
        dirichlet: mask,
        rhs: &zero,
        dirichlet_values: f,
        initial: Some(&init),
    };
    Ok(solve_linear(&op, spec.tol, spec.max_iter)?.0)
}

/// One implicit step `u - dt alpha Lap u = u_prev` off `mask`, `u = f` on it.
pub fn solve_parabolic_step(
    u_prev: &ImageGrid,
    f: &ImageGrid,
    mask: &Mask,
    spec: &SolveSpec,
) -> Result<ImageGrid> {
    spec.validate()?;
    u_prev.ensure_same_shape(f.shape())?;
    f.ensure_same_shape(mask.shape())?;
    let op = LinearOperatorSpec {
        reaction: 1.0,
        coeff: spec.dt * spec.alpha,
        dirichlet: mask,
        rhs: u_prev,
        dirichlet_values: f,
        initial: Some(u_prev),
    };
    Ok(solve_linear(&op, spec.tol, spec.max_iter)?.0)
}

/// Implicit step whose Dirichlet data is the previous iterate itself.
pub fn solve_denoise_step(u_prev: &ImageGrid, mask: &Mask, spec: &SolveSpec) -> Result<ImageGrid> {
    solve_parabolic_step(u_prev, u_prev, mask, spec)
}

/// Mask sequence driving [`run_parabolic`].
#[derive(Debug, Clone, Copy)]
pub enum MaskSchedule<'a> {
    /// The same mask at every step.
    Fixed(&'a Mask),
    /// One mask per step; its length must equal the step count.
    PerStep(&'a [Mask]),
}

/// Iterates [`solve_parabolic_step`] and returns `u^1, ..., u^N`.
pub fn run_parabolic(
    u0: &ImageGrid,
    f: &ImageGrid,
    masks: MaskSchedule<'_>,
    spec: &SolveSpec,
    steps: usize,
) -> Result<Vec<ImageGrid>> {
    if steps == 0 {
        return Err(Error::InvalidParameter("need at least one time step".into()));
    }
    if let MaskSchedule::PerStep(list) = masks {
        if list.len() != steps {
            return Err(Error::InvalidParameter(format!(
                "{} masks supplied for {steps} steps",
                list.len()
            )));
        }
    }
    let mut iterates = Vec::with_capacity(steps);
    let mut u = u0.clone();
    for n in 0..steps {
        let mask = match masks {
            MaskSchedule::Fixed(m) => m,
            MaskSchedule::PerStep(list) => &list[n],
        };
        u = solve_parabolic_step(&u, f, mask, spec)?;
        iterates.push(u.clone());
    }
    Ok(iterates)
}

/// Energy minimized by one implicit step:
/// `1/2 sum u^2 + dt alpha / 2 sum |grad u|^2 - sum u_prev u`.
pub fn step_energy(u_next: &ImageGrid, u_prev: &ImageGrid, spec: &SolveSpec) -> Result<f64> {
    u_next.ensure_same_shape(u_prev.shape())?;
    let g = gradient(u_next);
    let grad2: f64 = g
        .dx
        .data()
        .iter()
        .zip(g.dy.data())
        .map(|(a, b)| a * a + b * b)
        .sum();
    let mass: f64 = u_next.data().iter().map(|v| v * v).sum();
    let cross: f64 = u_next.data().iter().zip(u_prev.data()).map(|(a, b)| a * b).sum();
    Ok(0.5 * mass + 0.5 * spec.dt * spec.alpha * grad2 - cross)
}
