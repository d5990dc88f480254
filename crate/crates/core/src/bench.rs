//! Benchmark drivers reproducing the mask and method comparisons.
//!
//! Every driver adds noise with a fixed seed, builds a mask on the noisy
//! image, reconstructs from the (unquantized) noisy values on that mask and
//! records the error against both the clean and the noisy image. Rows are
//! computed in parallel and returned method-major, then by noise level.

use std::fmt;
use std::io::Write;
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use crate::codec::{reconstruct, CodecConfig, DecodeMode, DEFAULT_DECODE_STEPS};
use crate::error::{Error, Result};
use crate::image::ImageGrid;
use crate::mask::{encode_mask, DensityMode, MaskKind, MaskStrategy};
use crate::noise::{apply_noise, l2_error, NoiseKind, NoiseSpec};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchRecord {
    pub image: String,
    pub method: String,
    /// `none`, `gaussian`, `salt`, `pepper` or `salt_pepper`.
    pub noise: String,
    /// Gaussian standard deviation, or the impulse fraction.
    pub sigma: f64,
    pub alpha: f64,
    pub dt: f64,
    pub c: f64,
    pub n_steps: usize,
    pub mask_count: usize,
    /// `|u - f|` against the clean image.
    pub l2_error: f64,
    /// `|u - f_n|` against the noisy input.
    pub l2_error_noisy: f64,
    /// Zero unless timing is enabled.
    pub wall_ms: f64,
}

impl BenchRecord {
    pub const HEADER: [&'static str; 12] = [
        "image",
        "method",
        "noise",
        "sigma",
        "alpha",
        "dt",
        "c",
        "n_steps",
        "mask_count",
        "l2_error",
        "l2_error_noisy",
        "wall_ms",
    ];
}

/// Writes records as CSV with a header row, also when there are none.
pub fn write_records<W: Write>(records: &[BenchRecord], out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    w.write_record(BenchRecord::HEADER)?;
    for r in records {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

/// Writes any serializable rows as CSV, header taken from the field names.
pub fn write_rows<T: Serialize, W: Write>(rows: &[T], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BenchOptions {
    pub dt: f64,
    pub decode_steps: usize,
    /// Presmoothing applied to the criterion whenever the input is noisy.
    pub noisy_presmooth: f64,
    pub density_mode: DensityMode,
    /// Measure wall-clock time; off keeps the CSV reproducible byte for byte.
    pub timing: bool,
}

impl Default for BenchOptions {
    fn default() -> Self {
        Self {
            dt: 0.1,
            decode_steps: DEFAULT_DECODE_STEPS,
            noisy_presmooth: 1.0,
            density_mode: DensityMode::default(),
            timing: false,
        }
    }
}

/// Masks of the mask comparison; all are decoded with the stationary problem.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MaskMethod {
    Optimized,
    HalftonedOptimized,
    H1,
    HalftonedH1,
    Random,
}

impl MaskMethod {
    pub const ALL: [MaskMethod; 5] = [
        MaskMethod::Optimized,
        MaskMethod::HalftonedOptimized,
        MaskMethod::H1,
        MaskMethod::HalftonedH1,
        MaskMethod::Random,
    ];

    pub fn name(self) -> &'static str {
        match self {
            MaskMethod::Optimized => "optimized",
            MaskMethod::HalftonedOptimized => "halftoned-optimized",
            MaskMethod::H1 => "h1",
            MaskMethod::HalftonedH1 => "halftoned-h1",
            MaskMethod::Random => "random",
        }
    }

    pub fn kind(self) -> MaskKind {
        match self {
            MaskMethod::Optimized => MaskKind::OptThreshold,
            MaskMethod::HalftonedOptimized => MaskKind::OptHalftone,
            MaskMethod::H1 => MaskKind::H1Threshold,
            MaskMethod::HalftonedH1 => MaskKind::H1Halftone,
            MaskMethod::Random => MaskKind::Random,
        }
    }
}

impl FromStr for MaskMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        MaskMethod::ALL
            .into_iter()
            .find(|m| m.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::InvalidParameter(format!("unknown mask-comparison method '{s}'")))
    }
}

/// Complete compression pipelines of the method comparison.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    /// Halftoned `(Lap f)^2` density, homogeneous diffusion decoding.
    H1,
    /// Halftoned stationary criterion, stationary decoding.
    L2,
    /// Halftoned stationary criterion, parabolic decoding.
    L2Sta,
    L2Dec,
    L2Inc,
    L2Insta,
}

impl Method {
    pub const ALL: [Method; 6] = [Method::H1, Method::L2, Method::L2Sta, Method::L2Dec, Method::L2Inc, Method::L2Insta];

    pub fn name(self) -> &'static str {
        match self {
            Method::H1 => "H1",
            Method::L2 => "L2",
            Method::L2Sta => "L2Sta",
            Method::L2Dec => "L2Dec",
            Method::L2Inc => "L2Inc",
            Method::L2Insta => "L2Insta",
        }
    }

    fn kind(self) -> MaskKind {
        match self {
            Method::H1 => MaskKind::H1Halftone,
            Method::L2 => MaskKind::OptHalftone,
            Method::L2Sta => MaskKind::L2Sta,
            Method::L2Dec => MaskKind::L2Dec,
            Method::L2Inc => MaskKind::L2Inc,
            Method::L2Insta => MaskKind::L2Insta,
        }
    }

    fn decode_mode(self) -> DecodeMode {
        match self {
            Method::H1 => DecodeMode::Homogeneous,
            Method::L2 => DecodeMode::Stationary,
            _ => DecodeMode::Parabolic,
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::InvalidParameter(format!("unknown method '{s}'")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MethodParams {
    pub method: Method,
    pub alpha: f64,
    pub n_steps: usize,
}

impl MethodParams {
    pub fn new(method: Method, alpha: f64, n_steps: usize) -> Self {
        Self { method, alpha, n_steps }
    }

    /// Reference settings: L2 alpha 3.61, L2Sta 10, L2Dec 30 with 35 steps,
    /// L2Inc 8 with 40 steps, L2Insta 10 with 10 steps.
    pub fn reference_defaults() -> Vec<MethodParams> {
        vec![
            MethodParams::new(Method::H1, 1.0, 1),
            MethodParams::new(Method::L2, 3.61, 1),
            MethodParams::new(Method::L2Sta, 10.0, 1),
            MethodParams::new(Method::L2Dec, 30.0, 35),
            MethodParams::new(Method::L2Inc, 8.0, 40),
            MethodParams::new(Method::L2Insta, 10.0, 10),
        ]
    }

    pub fn defaults_for(method: Method) -> Self {
        Self::reference_defaults()
            .into_iter()
            .find(|p| p.method == method)
            .expect("every method has defaults")
    }
}

struct Job {
    method: String,
    strategy: MaskStrategy,
    decode: DecodeMode,
    noise: Option<NoiseSpec>,
}

fn noise_label(spec: &Option<NoiseSpec>) -> (&'static str, f64) {
    match spec {
        None => ("none", 0.0),
        Some(s) => match s.kind {
            NoiseKind::Gaussian => ("gaussian", s.sigma),
            NoiseKind::Salt => ("salt", s.fraction),
            NoiseKind::Pepper => ("pepper", s.fraction),
            NoiseKind::SaltPepper => ("salt_pepper", s.fraction),
        },
    }
}

fn gaussian(sigma: f64, seed: u64) -> Option<NoiseSpec> {
    (sigma > 0.0).then(|| NoiseSpec::gaussian(sigma, seed))
}

fn run_jobs(image_id: &str, clean: &ImageGrid, jobs: Vec<Job>, opts: &BenchOptions) -> Result<Vec<BenchRecord>> {
    jobs.into_par_iter()
        .map(|job| {
            let start = Instant::now();
            let noisy = match &job.noise {
                Some(spec) => apply_noise(clean, spec)?,
                None => clean.clone(),
            };
            let mut strategy = job.strategy;
            if job.noise.is_some() {
                strategy.presmooth_sigma = opts.noisy_presmooth;
            }
            let mask = encode_mask(&noisy, &strategy)?.mask;
            let cfg = CodecConfig::new(strategy)
                .with_decode(job.decode)
                .with_decode_steps(opts.decode_steps);
            let u = reconstruct(&mask, &noisy, &cfg)?;
            let (noise, sigma) = noise_label(&job.noise);
            Ok(BenchRecord {
                image: image_id.to_string(),
                method: job.method,
                noise: noise.to_string(),
                sigma,
                alpha: strategy.alpha,
                dt: strategy.dt,
                c: strategy.c,
                n_steps: if strategy.kind.is_time_dependent() { strategy.n_steps } else { 0 },
                mask_count: mask.count(),
                l2_error: l2_error(&u, clean)?,
                l2_error_noisy: l2_error(&u, &noisy)?,
                wall_ms: if opts.timing { start.elapsed().as_secs_f64() * 1e3 } else { 0.0 },
            })
        })
        .collect()
}

fn base_strategy(kind: MaskKind, c: f64, alpha: f64, n_steps: usize, seed: u64, opts: &BenchOptions) -> MaskStrategy {
    MaskStrategy {
        dt: opts.dt,
        seed,
        density_mode: opts.density_mode,
        ..MaskStrategy::new(kind, c, alpha).with_steps(n_steps.max(1))
    }
}

/// Gaussian noise at each `sigma`, then every mask method with stationary decoding.
#[allow(clippy::too_many_arguments)]
pub fn run_mask_comparison(
    image_id: &str,
    image: &ImageGrid,
    sigmas: &[f64],
    methods: &[MaskMethod],
    c: f64,
    alpha: f64,
    seed: u64,
    opts: &BenchOptions,
) -> Result<Vec<BenchRecord>> {
    let mut jobs = Vec::new();
    for &m in methods {
        for &sigma in sigmas {
            jobs.push(Job {
                method: m.name().to_string(),
                strategy: base_strategy(m.kind(), c, alpha, 1, seed, opts),
                decode: DecodeMode::Stationary,
                noise: gaussian(sigma, seed),
            });
        }
    }
    run_jobs(image_id, image, jobs, opts)
}

/// Gaussian noise at each `sigma`, then every configured pipeline.
pub fn run_method_comparison(
    image_id: &str,
    image: &ImageGrid,
    sigmas: &[f64],
    c: f64,
    methods: &[MethodParams],
    seed: u64,
    opts: &BenchOptions,
) -> Result<Vec<BenchRecord>> {
    let mut jobs = Vec::new();
    for p in methods {
        for &sigma in sigmas {
            jobs.push(Job {
                method: p.method.name().to_string(),
                strategy: base_strategy(p.method.kind(), c, p.alpha, p.n_steps, seed, opts),
                decode: p.method.decode_mode(),
                noise: gaussian(sigma, seed),
            });
        }
    }
    run_jobs(image_id, image, jobs, opts)
}

/// Impulse noise of the given kind, then every configured pipeline.
#[allow(clippy::too_many_arguments)]
pub fn run_saltpepper(
    image_id: &str,
    image: &ImageGrid,
    kind: NoiseKind,
    fraction: f64,
    c: f64,
    methods: &[MethodParams],
    seed: u64,
    opts: &BenchOptions,
) -> Result<Vec<BenchRecord>> {
    if kind == NoiseKind::Gaussian {
        return Err(Error::InvalidParameter("impulse benchmark needs salt, pepper or salt_pepper".into()));
    }
    let noise = (fraction > 0.0).then(|| NoiseSpec::impulse(kind, fraction, seed));
    let jobs = methods
        .iter()
        .map(|p| Job {
            method: p.method.name().to_string(),
            strategy: base_strategy(p.method.kind(), c, p.alpha, p.n_steps, seed, opts),
            decode: p.method.decode_mode(),
            noise,
        })
        .collect();
    run_jobs(image_id, image, jobs, opts)
}
