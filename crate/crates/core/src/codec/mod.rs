//! Encode, decode and denoise pipelines.
//!
//! An encoded image is a mask plus the 8-bit quantized pixel values on it.
//! Decoding fills in the rest by solving a diffusion problem with those
//! values as Dirichlet data.

mod container;

use rayon::prelude::*;

pub use container::{Container, ContainerLayout};

use crate::error::{Error, Result};
use crate::image::{gaussian_blur, ImageGrid, Mask};
use crate::mask::{encode_mask, evolve_denoise, MaskKind, MaskStrategy};
use crate::noise::l2_error;
use crate::solver::{run_parabolic, solve_homogeneous, solve_stationary, MaskSchedule, SolveSpec};

/// Three equally sized color planes.
#[derive(Debug, Clone, PartialEq)]
pub struct ColorImage {
    channels: [ImageGrid; 3],
}

impl ColorImage {
    pub fn new(r: ImageGrid, g: ImageGrid, b: ImageGrid) -> Result<Self> {
        r.ensure_same_shape(g.shape())?;
        r.ensure_same_shape(b.shape())?;
        Ok(Self { channels: [r, g, b] })
    }

    pub fn from_gray(gray: &ImageGrid) -> Self {
        Self {
            channels: [gray.clone(), gray.clone(), gray.clone()],
        }
    }

    pub fn shape(&self) -> (usize, usize) {
        self.channels[0].shape()
    }

    pub fn channels(&self) -> &[ImageGrid; 3] {
        &self.channels
    }

    pub fn into_channels(self) -> [ImageGrid; 3] {
        self.channels
    }

    /// ITU-R BT.601 luma, `0.299 r + 0.587 g + 0.114 b`.
    pub fn luminance(&self) -> ImageGrid {
        let [r, g, b] = &self.channels;
        let data = r
            .data()
            .iter()
            .zip(g.data())
            .zip(b.data())
            .map(|((r, g), b)| 0.299 * r + 0.587 * g + 0.114 * b)
            .collect();
        ImageGrid::new(r.width(), r.height(), data).expect("shape checked at construction")
    }

    /// Root of the summed squared error over the three channels.
    pub fn l2_error(&self, other: &ColorImage) -> Result<f64> {
        let mut acc = 0.0;
        for (a, b) in self.channels.iter().zip(&other.channels) {
            acc += l2_error(a, b)?.powi(2);
        }
        Ok(acc.sqrt())
    }
}

/// Which diffusion problem fills in the missing pixels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DecodeMode {
    /// `-alpha Lap u + u = 0` off the mask.
    Stationary,
    /// `decode_steps` implicit steps of `u - dt alpha Lap u = u_prev` from `u = 0`.
    #[default]
    Parabolic,
    /// `Lap u = 0` off the mask.
    Homogeneous,
}

impl DecodeMode {
    pub fn id(self) -> u8 {
        match self {
            DecodeMode::Stationary => 0,
            DecodeMode::Parabolic => 1,
            DecodeMode::Homogeneous => 2,
        }
    }

    pub fn from_id(id: u8) -> Result<Self> {
        match id {
            0 => Ok(DecodeMode::Stationary),
            1 => Ok(DecodeMode::Parabolic),
            2 => Ok(DecodeMode::Homogeneous),
            _ => Err(Error::Container(format!("unknown decode mode {id}"))),
        }
    }
}

impl std::str::FromStr for DecodeMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "stationary" => Ok(DecodeMode::Stationary),
            "parabolic" => Ok(DecodeMode::Parabolic),
            "homogeneous" => Ok(DecodeMode::Homogeneous),
            _ => Err(Error::InvalidParameter(format!("unknown decode mode '{s}'"))),
        }
    }
}

pub const DEFAULT_DECODE_STEPS: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CodecConfig {
    pub strategy: MaskStrategy,
    pub solve: SolveSpec,
    pub decode_steps: usize,
    pub decode_mode: DecodeMode,
}

impl CodecConfig {
    /// Solver parameters taken from the strategy; time-dependent strategies
    /// decode parabolically, the others with the stationary problem.
    pub fn new(strategy: MaskStrategy) -> Self {
        let decode_mode = match strategy.kind {
            MaskKind::L2Sta | MaskKind::L2Dec | MaskKind::L2Inc | MaskKind::L2Insta => DecodeMode::Parabolic,
            _ => DecodeMode::Stationary,
        };
        Self {
            strategy,
            solve: strategy.solve_spec(),
            decode_steps: DEFAULT_DECODE_STEPS,
            decode_mode,
        }
    }

    pub fn with_decode(mut self, mode: DecodeMode) -> Self {
        self.decode_mode = mode;
        self
    }

    pub fn with_decode_steps(mut self, steps: usize) -> Self {
        self.decode_steps = steps;
        self
    }

    pub fn validate(&self) -> Result<()> {
        self.solve.validate()?;
        if self.decode_mode == DecodeMode::Parabolic && self.decode_steps == 0 {
            return Err(Error::InvalidParameter("parabolic decoding needs at least one step".into()));
        }
        Ok(())
    }
}

/// A mask and the quantized values stored on it, in row-major mask order.
#[derive(Debug, Clone, PartialEq)]
pub struct Encoded {
    pub mask: Mask,
    pub values: Vec<u8>,
}

impl Encoded {
    /// Bytes of the packed mask bitmap (rows padded to whole bytes).
    pub fn bitmap_bytes(&self) -> usize {
        self.mask.width().div_ceil(8) * self.mask.height()
    }

    pub fn payload_bytes(&self) -> usize {
        self.values.len()
    }
}

pub fn quantize(v: f64) -> u8 {
    (v.clamp(0.0, 1.0) * 255.0).round() as u8
}

pub fn dequantize(q: u8) -> f64 {
    q as f64 / 255.0
}

/// Values of `img` on `mask`, quantized to 8 bits.
pub fn sample(img: &ImageGrid, mask: &Mask) -> Result<Vec<u8>> {
    img.ensure_same_shape(mask.shape())?;
    Ok(mask.indices().map(|i| quantize(img.data()[i])).collect())
}

/// Runs the configured mask strategy and stores `f` on the mask.
pub fn encode(f: &ImageGrid, cfg: &CodecConfig) -> Result<Encoded> {
    cfg.validate()?;
    let mask = encode_mask(f, &cfg.strategy)?.mask;
    let values = sample(f, &mask)?;
    Ok(Encoded { mask, values })
}

/// Fills in the image from the values of `data` on `mask`; the result is clamped to `[0, 1]`.
pub fn reconstruct(mask: &Mask, data: &ImageGrid, cfg: &CodecConfig) -> Result<ImageGrid> {
    cfg.validate()?;
    data.ensure_same_shape(mask.shape())?;
    let u = match cfg.decode_mode {
        DecodeMode::Stationary => solve_stationary(data, mask, &cfg.solve)?,
        DecodeMode::Homogeneous => solve_homogeneous(data, mask, &cfg.solve)?,
        DecodeMode::Parabolic => {
            let u0 = ImageGrid::zeros(data.width(), data.height())?;
            let mut iterates = run_parabolic(&u0, data, MaskSchedule::Fixed(mask), &cfg.solve, cfg.decode_steps)?;
            iterates.pop().expect("at least one step")
        }
    };
    Ok(u.clamp01())
}

/// Inverse of [`encode`] up to the reconstruction error.
pub fn decode(mask: &Mask, values: &[u8], cfg: &CodecConfig) -> Result<ImageGrid> {
    if values.len() != mask.count() {
        return Err(Error::InvalidParameter(format!(
            "{} stored values for a mask of {} pixels",
            values.len(),
            mask.count()
        )));
    }
    let mut data = ImageGrid::zeros(mask.width(), mask.height())?;
    for (i, &q) in mask.indices().zip(values) {
        data.data_mut()[i] = dequantize(q);
    }
    reconstruct(mask, &data, cfg)
}

/// Where the Dirichlet data of the denoising time steps comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DenoiseScheme {
    /// `u^{n+1} = u^n` on `K_n` starting from `u^0 = f_noisy`; the stored
    /// values are smoothed along the way and decoding uses `u_N`.
    #[default]
    Evolving,
    /// The ordinary codec on the noisy image: `u^{n+1} = f_noisy` on `K_n`.
    Source,
}

impl std::str::FromStr for DenoiseScheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "evolving" => Ok(DenoiseScheme::Evolving),
            "source" => Ok(DenoiseScheme::Source),
            _ => Err(Error::InvalidParameter(format!("unknown denoise scheme '{s}'"))),
        }
    }
}

/// Denoising by inpainting: the strategy's selection loop on the noisy
/// image, then a reconstruction from the final mask.
pub fn denoise(f_noisy: &ImageGrid, cfg: &CodecConfig, scheme: DenoiseScheme) -> Result<ImageGrid> {
    cfg.validate()?;
    match scheme {
        DenoiseScheme::Evolving => {
            let result = evolve_denoise(f_noisy, &cfg.strategy)?;
            let state = result.state.expect("denoising always evolves a state");
            reconstruct(&result.mask, &state, cfg)
        }
        DenoiseScheme::Source => {
            let mask = encode_mask(f_noisy, &cfg.strategy)?.mask;
            reconstruct(&mask, f_noisy, cfg)
        }
    }
}

/// [`denoise`] with evolving Dirichlet data.
pub fn denoise_by_inpainting(f_noisy: &ImageGrid, cfg: &CodecConfig) -> Result<ImageGrid> {
    denoise(f_noisy, cfg, DenoiseScheme::Evolving)
}

/// Linear diffusion filter: Gaussian smoothing, i.e. the heat flow at time `sigma^2 / 2`.
pub fn linear_diffusion(f: &ImageGrid, sigma: f64) -> Result<ImageGrid> {
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(Error::InvalidParameter(format!("filter sigma must be > 0, got {sigma}")));
    }
    Ok(gaussian_blur(f, sigma))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ColorStrategy {
    /// An independent mask for each channel.
    PerChannel,
    /// One mask from the luminance, shared by the three channels.
    SharedLuminance,
}

impl ColorStrategy {
    pub fn id(self) -> u8 {
        match self {
            ColorStrategy::PerChannel => 1,
            ColorStrategy::SharedLuminance => 2,
        }
    }
}

/// Color encoding: one mask per channel, or a shared mask (`masks` has length 1).
#[derive(Debug, Clone, PartialEq)]
pub struct ColorEncoded {
    pub strategy: ColorStrategy,
    pub masks: Vec<Mask>,
    pub payloads: [Vec<u8>; 3],
}

impl ColorEncoded {
    pub fn mask_for(&self, channel: usize) -> &Mask {
        &self.masks[if self.masks.len() == 1 { 0 } else { channel }]
    }
}

pub fn encode_color(img: &ColorImage, cfg: &CodecConfig, strategy: ColorStrategy) -> Result<ColorEncoded> {
    cfg.validate()?;
    let channels = img.channels();
    match strategy {
        ColorStrategy::PerChannel => {
            let encoded: Vec<Encoded> = channels
                .par_iter()
                .map(|ch| encode(ch, cfg))
                .collect::<Result<_>>()?;
            let mut masks = Vec::with_capacity(3);
            let mut payloads: [Vec<u8>; 3] = Default::default();
            for (k, e) in encoded.into_iter().enumerate() {
                masks.push(e.mask);
                payloads[k] = e.values;
            }
            Ok(ColorEncoded { strategy, masks, payloads })
        }
        ColorStrategy::SharedLuminance => {
            let mask = encode_mask(&img.luminance(), &cfg.strategy)?.mask;
            let payloads = [
                sample(&channels[0], &mask)?,
                sample(&channels[1], &mask)?,
                sample(&channels[2], &mask)?,
            ];
            Ok(ColorEncoded {
                strategy,
                masks: vec![mask],
                payloads,
            })
        }
    }
}

pub fn decode_color(encoded: &ColorEncoded, cfg: &CodecConfig) -> Result<ColorImage> {
    let planes: Vec<ImageGrid> = (0..3)
        .into_par_iter()
        .map(|k| decode(encoded.mask_for(k), &encoded.payloads[k], cfg))
        .collect::<Result<_>>()?;
    let [r, g, b]: [ImageGrid; 3] = planes.try_into().expect("three planes");
    ColorImage::new(r, g, b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mask::MaskStrategy;
    use crate::noise::{apply_noise, NoiseSpec};

    fn smooth(w: usize, h: usize) -> ImageGrid {
        ImageGrid::from_fn(w, h, |x, y| {
            let (x, y) = (x as f64 / w as f64, y as f64 / h as f64);
            0.2 + 0.5 * x * y + 0.2 * (3.0 * x).sin() * (2.0 * y).cos()
        })
        .unwrap()
    }

    #[test]
    fn full_budget_is_lossless_up_to_quantization() {
        let f = smooth(20, 16);
        for kind in [MaskKind::OptThreshold, MaskKind::L2Inc] {
            let cfg = CodecConfig::new(MaskStrategy::new(kind, 1.0, 3.0).with_steps(2));
            let e = encode(&f, &cfg).unwrap();
            assert_eq!(e.mask.count(), 320);
            let u = decode(&e.mask, &e.values, &cfg).unwrap();
            for (a, b) in u.data().iter().zip(f.data()) {
                assert!((a - b).abs() <= 1.0 / 510.0 + 1e-12);
            }
        }
    }

    #[test]
    fn l2inc_payload_size() {
        let f = smooth(32, 32);
        let cfg = CodecConfig::new(MaskStrategy {
            alpha: 1.0,
            ..MaskStrategy::new(MaskKind::L2Inc, 0.1, 1.0).with_steps(5)
        });
        let e = encode(&f, &cfg).unwrap();
        assert_eq!(e.payload_bytes(), 105);
        assert_eq!(e.bitmap_bytes(), 128);
    }

    #[test]
    fn decode_rejects_missing_values() {
        let cfg = CodecConfig::new(MaskStrategy::default());
        let mask = Mask::from_indices(4, 4, [5]);
        assert!(decode(&mask, &[], &cfg).is_err());
        let bad = cfg.with_decode(DecodeMode::Parabolic).with_decode_steps(0);
        assert!(decode(&mask, &[3], &bad).is_err());
    }

    #[test]
    fn center_pixel_decode_matches_solver() {
        let mask = Mask::from_indices(3, 3, [4]);
        let cfg = CodecConfig::new(MaskStrategy::new(MaskKind::OptThreshold, 0.1, 1.0)).with_decode(DecodeMode::Stationary);
        let u = decode(&mask, &[255], &cfg).unwrap();
        let mut f = ImageGrid::zeros(3, 3).unwrap();
        f.set(1, 1, 1.0);
        let direct = solve_stationary(&f, &mask, &cfg.solve).unwrap();
        assert_eq!(u, direct);
        assert_eq!(u.get(1, 1), 1.0);
        assert!(u.get(0, 0) > 0.0 && u.get(0, 0) < 1.0);
    }

    #[test]
    fn denoise_full_mask_without_noise_is_identity() {
        let f = smooth(10, 10);
        let cfg = CodecConfig::new(MaskStrategy::new(MaskKind::OptThreshold, 1.0, 3.0).with_steps(3));
        let u = denoise_by_inpainting(&f, &cfg).unwrap();
        for (a, b) in u.data().iter().zip(f.data()) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn denoise_beats_noise_on_smooth_image() {
        let clean = smooth(32, 32);
        let noisy = apply_noise(&clean, &NoiseSpec::gaussian(0.05, 9)).unwrap();
        let strategy = MaskStrategy {
            presmooth_sigma: 1.0,
            ..MaskStrategy::new(MaskKind::L2Inc, 0.22, 18.0).with_steps(10)
        };
        let u = denoise_by_inpainting(&noisy, &CodecConfig::new(strategy)).unwrap();
        let before = l2_error(&noisy, &clean).unwrap();
        let after = l2_error(&u, &clean).unwrap();
        assert!(after < before, "{after} >= {before}");
    }

    #[test]
    fn linear_diffusion_basics() {
        let c = ImageGrid::filled(9, 9, 0.4).unwrap();
        let out = linear_diffusion(&c, 2.0).unwrap();
        assert!(out.data().iter().all(|v| (v - 0.4).abs() < 1e-12));
        let f = smooth(16, 16);
        let near = linear_diffusion(&f, 0.1).unwrap();
        assert!(l2_error(&near, &f).unwrap() < 1e-3);
        assert!(linear_diffusion(&f, 0.0).is_err());
    }

    #[test]
    fn gray_color_strategies_agree() {
        let g = smooth(24, 24);
        let img = ColorImage::from_gray(&g);
        let cfg = CodecConfig::new(MaskStrategy::new(MaskKind::OptThreshold, 0.1, 3.0));
        let one = encode_color(&img, &cfg, ColorStrategy::PerChannel).unwrap();
        let two = encode_color(&img, &cfg, ColorStrategy::SharedLuminance).unwrap();
        assert_eq!(one.masks.len(), 3);
        assert_eq!(two.masks.len(), 1);
        for m in &one.masks {
            assert_eq!(m.count(), 58);
            assert!(m.hamming(&two.masks[0]) <= 2);
        }
        let back = decode_color(&two, &cfg).unwrap();
        assert_eq!(back.shape(), (24, 24));
    }
}
