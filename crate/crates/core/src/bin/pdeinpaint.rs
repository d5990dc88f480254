use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use pdeinpaint::bench::{
    run_mask_comparison, run_method_comparison, run_saltpepper, write_records, BenchOptions, MaskMethod, Method,
    MethodParams,
};
use pdeinpaint::codec::{
    decode, decode_color, denoise, encode, encode_color, CodecConfig, ColorImage, ColorStrategy, Container,
    ContainerLayout, DecodeMode, DenoiseScheme, DEFAULT_DECODE_STEPS,
};
use pdeinpaint::mask::{encode_mask, DensityMode, MaskKind, MaskStrategy};
use pdeinpaint::noise::{apply_noise, l2_error, NoiseKind, NoiseSpec};
use pdeinpaint::pnm::{self, Pnm};
use pdeinpaint::validate::{self, Suite, ValidateOptions};
use pdeinpaint::{Error, ImageGrid};

const EXIT_USAGE: u8 = 1;
const EXIT_IO: u8 = 2;
const EXIT_SOLVER: u8 = 3;
const EXIT_VALIDATION: u8 = 4;

/// PDE-based image compression and denoising with optimized inpainting masks.
#[derive(Debug, Parser)]
#[command(name = "pdeinpaint", version)]
struct Cli {
    /// Seed for noise and random masks.
    #[arg(long, global = true, env = "PIC_SEED", default_value_t = 0)]
    seed: u64,
    /// Worker threads for bench, validate and color coding [default: all cores].
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Add seeded noise to an image.
    Noise(NoiseArgs),
    /// Compute an inpainting mask and write it as PBM.
    Mask(MaskArgs),
    /// Compress an image into a PIC1 container.
    Encode(EncodeArgs),
    /// Reconstruct an image from a PIC1 container.
    Decode(DecodeArgs),
    /// Denoise an image by inpainting.
    Denoise(DenoiseArgs),
    /// Run a comparison benchmark and write CSV.
    Bench(BenchArgs),
    /// Run the numerical validation suites.
    Validate(ValidateArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum NoiseArg {
    Gaussian,
    Salt,
    Pepper,
    SaltPepper,
}

impl From<NoiseArg> for NoiseKind {
    fn from(n: NoiseArg) -> Self {
        match n {
            NoiseArg::Gaussian => NoiseKind::Gaussian,
            NoiseArg::Salt => NoiseKind::Salt,
            NoiseArg::Pepper => NoiseKind::Pepper,
            NoiseArg::SaltPepper => NoiseKind::SaltPepper,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum DensityArg {
    Direct,
    Soft,
}

impl From<DensityArg> for DensityMode {
    fn from(d: DensityArg) -> Self {
        match d {
            DensityArg::Direct => DensityMode::Direct,
            DensityArg::Soft => DensityMode::SoftThreshold,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum DecodeArg {
    Stationary,
    Parabolic,
    Homogeneous,
}

impl From<DecodeArg> for DecodeMode {
    fn from(d: DecodeArg) -> Self {
        match d {
            DecodeArg::Stationary => DecodeMode::Stationary,
            DecodeArg::Parabolic => DecodeMode::Parabolic,
            DecodeArg::Homogeneous => DecodeMode::Homogeneous,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ColorArg {
    /// One mask per channel.
    PerChannel,
    /// One mask from the luminance for all channels.
    Shared,
}

impl From<ColorArg> for ColorStrategy {
    fn from(c: ColorArg) -> Self {
        match c {
            ColorArg::PerChannel => ColorStrategy::PerChannel,
            ColorArg::Shared => ColorStrategy::SharedLuminance,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum SchemeArg {
    /// Dirichlet data from the previous state, starting at the noisy image.
    Evolving,
    /// Dirichlet data from the noisy image.
    Source,
}

impl From<SchemeArg> for DenoiseScheme {
    fn from(s: SchemeArg) -> Self {
        match s {
            SchemeArg::Evolving => DenoiseScheme::Evolving,
            SchemeArg::Source => DenoiseScheme::Source,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum SuiteArg {
    Topograd,
    Bessel,
    Disc,
    Theta,
    All,
}

impl From<SuiteArg> for Suite {
    fn from(s: SuiteArg) -> Self {
        match s {
            SuiteArg::Topograd => Suite::Topograd,
            SuiteArg::Bessel => Suite::Bessel,
            SuiteArg::Disc => Suite::Disc,
            SuiteArg::Theta => Suite::Theta,
            SuiteArg::All => Suite::All,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum BenchSuite {
    /// Mask comparison with stationary decoding.
    Masks,
    /// Method comparison at the reference parameters.
    Methods,
    /// Impulse noise with the method pipelines.
    Saltpepper,
}

#[derive(Debug, Args)]
struct NoiseArgs {
    #[arg(long, value_enum, default_value = "gaussian")]
    kind: NoiseArg,
    /// Gaussian standard deviation.
    #[arg(long, default_value_t = 0.05)]
    sigma: f64,
    /// Fraction of pixels hit by impulse noise.
    #[arg(long, default_value_t = 0.01)]
    fraction: f64,
    /// Input PGM or PPM.
    input: PathBuf,
    /// Output file.
    output: PathBuf,
}

#[derive(Debug, Args)]
struct StrategyArgs {
    /// opt-threshold, opt-halftone, h1-threshold, h1-halftone, random, l2sta, l2dec, l2inc or l2insta.
    #[arg(long, default_value = "opt-halftone", value_parser = parse_kind)]
    method: MaskKind,
    /// Fraction of pixels kept in the mask.
    #[arg(long, default_value_t = 0.1)]
    c: f64,
    /// Diffusion weight in `u - alpha Lap u`.
    #[arg(long, default_value_t = 3.0)]
    alpha: f64,
    /// Time step of the parabolic problems.
    #[arg(long, default_value_t = 0.1)]
    dt: f64,
    /// Selection rounds of the time-dependent methods.
    #[arg(long, default_value_t = 10)]
    n_steps: usize,
    /// Declared noise level of the input; presmoothing defaults to 1.0 when it is positive.
    #[arg(long, default_value_t = 0.0)]
    sigma: f64,
    /// Gaussian presmoothing of the criterion [default: 0, or 1.0 when --sigma > 0].
    #[arg(long)]
    presmooth: Option<f64>,
    /// Density rule of the halftoned masks.
    #[arg(long, value_enum, default_value = "soft")]
    density: DensityArg,
}

impl StrategyArgs {
    fn strategy(&self, seed: u64) -> MaskStrategy {
        let presmooth = self.presmooth.unwrap_or(if self.sigma > 0.0 { 1.0 } else { 0.0 });
        MaskStrategy {
            dt: self.dt,
            n_steps: self.n_steps,
            presmooth_sigma: presmooth,
            density_mode: self.density.into(),
            seed,
            ..MaskStrategy::new(self.method, self.c, self.alpha)
        }
    }
}

#[derive(Debug, Args)]
struct DecodeOpts {
    /// Reconstruction problem [default: parabolic for l2sta/l2dec/l2inc/l2insta, stationary otherwise].
    #[arg(long, value_enum)]
    decode_mode: Option<DecodeArg>,
    /// Implicit steps of parabolic decoding.
    #[arg(long, default_value_t = DEFAULT_DECODE_STEPS)]
    decode_steps: usize,
}

impl DecodeOpts {
    fn config(&self, strategy: MaskStrategy) -> CodecConfig {
        let cfg = CodecConfig::new(strategy).with_decode_steps(self.decode_steps);
        match self.decode_mode {
            Some(m) => cfg.with_decode(m.into()),
            None => cfg,
        }
    }
}

#[derive(Debug, Args)]
struct MaskArgs {
    #[command(flatten)]
    strategy: StrategyArgs,
    /// Also write the mask of every selection round into this directory.
    #[arg(long)]
    dump_steps: Option<PathBuf>,
    /// Input PGM or PPM.
    input: PathBuf,
    /// Output file.
    output: PathBuf,
}

#[derive(Debug, Args)]
struct EncodeArgs {
    #[command(flatten)]
    strategy: StrategyArgs,
    #[command(flatten)]
    decode: DecodeOpts,
    /// Mask layout for color input.
    #[arg(long, value_enum, default_value = "per-channel")]
    color: ColorArg,
    /// Input PGM or PPM.
    input: PathBuf,
    /// Output file.
    output: PathBuf,
}

#[derive(Debug, Args)]
struct DecodeArgs {
    /// Compare the reconstruction with this image and print the L2 error.
    #[arg(long)]
    reference: Option<PathBuf>,
    /// PIC1 container.
    input: PathBuf,
    /// Output PGM or PPM.
    output: PathBuf,
}

#[derive(Debug, Args)]
struct DenoiseArgs {
    /// opt-threshold, opt-halftone, h1-threshold, h1-halftone, random, l2sta, l2dec, l2inc or l2insta.
    #[arg(long, default_value = "l2inc", value_parser = parse_kind)]
    method: MaskKind,
    #[arg(long, default_value_t = 0.22)]
    c: f64,
    /// Diffusion weight in `u - dt alpha Lap u`.
    #[arg(long, default_value_t = 18.0)]
    alpha: f64,
    #[arg(long, default_value_t = 0.1)]
    dt: f64,
    #[arg(long, default_value_t = 40)]
    n_steps: usize,
    /// Gaussian presmoothing of the criterion.
    #[arg(long, default_value_t = 1.0)]
    presmooth: f64,
    /// Density rule of the halftoned masks.
    #[arg(long, value_enum, default_value = "soft")]
    density: DensityArg,
    #[arg(long, value_enum, default_value = "evolving")]
    scheme: SchemeArg,
    #[command(flatten)]
    decode: DecodeOpts,
    /// Clean image; prints the errors of the input and of the result.
    #[arg(long)]
    reference: Option<PathBuf>,
    /// Input PGM or PPM.
    input: PathBuf,
    /// Output file.
    output: PathBuf,
}

#[derive(Debug, Args)]
struct BenchArgs {
    #[arg(long, value_enum, default_value = "masks")]
    suite: BenchSuite,
    /// Gaussian noise levels (masks and methods suites).
    #[arg(long, value_delimiter = ',', default_value = "0,0.1")]
    sigmas: Vec<f64>,
    #[arg(long, default_value_t = 0.1)]
    c: f64,
    /// Alpha of the masks suite; the methods use their reference values.
    #[arg(long, default_value_t = 3.0)]
    alpha: f64,
    /// Masks suite methods: optimized, halftoned-optimized, h1, halftoned-h1, random [default: all].
    #[arg(long, value_delimiter = ',', value_parser = parse_mask_method)]
    masks: Vec<MaskMethod>,
    /// Methods suite methods: H1, L2, L2Sta, L2Dec, L2Inc, L2Insta [default: all].
    #[arg(long, value_delimiter = ',', value_parser = parse_method)]
    methods: Vec<Method>,
    /// Impulse noise of the saltpepper suite.
    #[arg(long, value_enum, default_value = "salt")]
    noise: NoiseArg,
    #[arg(long, default_value_t = 0.01)]
    fraction: f64,
    #[arg(long, default_value_t = 0.1)]
    dt: f64,
    #[arg(long, default_value_t = DEFAULT_DECODE_STEPS)]
    decode_steps: usize,
    /// Criterion presmoothing on noisy inputs.
    #[arg(long, default_value_t = 1.0)]
    presmooth: f64,
    /// Density rule of the halftoned masks.
    #[arg(long, value_enum, default_value = "soft")]
    density: DensityArg,
    /// Record wall-clock times (makes the CSV non-reproducible).
    #[arg(long)]
    timing: bool,
    /// Image name in the CSV [default: input file stem].
    #[arg(long)]
    image_id: Option<String>,
    /// CSV destination [default: stdout].
    #[arg(long)]
    out: Option<PathBuf>,
    input: PathBuf,
}

#[derive(Debug, Args)]
struct ValidateArgs {
    #[arg(long, value_enum, default_value = "all")]
    suite: SuiteArg,
    /// Grid resolution of the theta experiment.
    #[arg(long, default_value_t = 512)]
    resolution: usize,
    /// Alpha of the theta experiment.
    #[arg(long, default_value_t = 10.0)]
    theta_alpha: f64,
    /// Directory for the CSV reports.
    #[arg(long)]
    out_dir: Option<PathBuf>,
}

fn parse_kind(s: &str) -> std::result::Result<MaskKind, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_mask_method(s: &str) -> std::result::Result<MaskMethod, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_method(s: &str) -> std::result::Result<Method, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

enum Image {
    Gray(ImageGrid),
    Color(ColorImage),
}

fn read_image(path: &Path) -> Result<Image> {
    let bytes = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    match pnm::decode_pnm(&bytes).with_context(|| format!("parsing {}", path.display()))? {
        Pnm::Gray(g) => Ok(Image::Gray(g)),
        Pnm::Color(c) => Ok(Image::Color(c)),
        Pnm::Bitmap(_) => Err(Error::Pnm(format!("{} is a bitmap, expected an image", path.display())).into()),
    }
}

fn read_gray(path: &Path) -> Result<ImageGrid> {
    Ok(match read_image(path)? {
        Image::Gray(g) => g,
        Image::Color(c) => c.luminance(),
    })
}

fn write_image(img: &Image, path: &Path) -> Result<()> {
    let bytes = match img {
        Image::Gray(g) => pnm::encode_pgm(g, 255)?,
        Image::Color(c) => pnm::encode_ppm(c, 255)?,
    };
    fs::write(path, bytes).with_context(|| format!("writing {}", path.display()))
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    fs::write(path, bytes).with_context(|| format!("writing {}", path.display()))
}

fn cmd_noise(args: &NoiseArgs, seed: u64) -> Result<()> {
    let spec = |seed| NoiseSpec {
        kind: args.kind.into(),
        sigma: args.sigma,
        fraction: args.fraction,
        seed,
    };
    let out = match read_image(&args.input)? {
        Image::Gray(g) => {
            let n = apply_noise(&g, &spec(seed))?;
            println!("l2_error {:.6}", l2_error(&n, &g)?);
            Image::Gray(n)
        }
        Image::Color(c) => {
            let [r, g, b] = c.channels();
            let noisy = ColorImage::new(
                apply_noise(r, &spec(seed))?,
                apply_noise(g, &spec(seed.wrapping_add(1)))?,
                apply_noise(b, &spec(seed.wrapping_add(2)))?,
            )?;
            println!("l2_error {:.6}", noisy.l2_error(&c)?);
            Image::Color(noisy)
        }
    };
    write_image(&out, &args.output)
}

fn cmd_mask(args: &MaskArgs, seed: u64) -> Result<()> {
    let f = read_gray(&args.input)?;
    let result = encode_mask(&f, &args.strategy.strategy(seed))?;
    write_file(&args.output, &pnm::encode_pbm(&result.mask))?;
    if let Some(dir) = &args.dump_steps {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        for (n, m) in result.iterates.iter().enumerate() {
            write_file(&dir.join(format!("step_{n:03}.pbm")), &pnm::encode_pbm(m))?;
        }
    }
    println!("mask_count {}", result.mask.count());
    Ok(())
}

fn cmd_encode(args: &EncodeArgs, seed: u64) -> Result<()> {
    let cfg = args.decode.config(args.strategy.strategy(seed));
    let container = match read_image(&args.input)? {
        Image::Gray(g) => Container::gray(&encode(&g, &cfg)?, &cfg),
        Image::Color(c) => Container::color(&encode_color(&c, &cfg, args.color.into())?, &cfg),
    };
    let bytes = container.to_bytes()?;
    write_file(&args.output, &bytes)?;
    println!("bytes {}", bytes.len());
    Ok(())
}

fn cmd_decode(args: &DecodeArgs) -> Result<()> {
    let bytes = fs::read(&args.input).with_context(|| format!("reading {}", args.input.display()))?;
    let container = Container::from_bytes(&bytes)?;
    let base = CodecConfig::new(MaskStrategy::default());
    let cfg = container.codec_config(&base);
    let img = match container.layout {
        ContainerLayout::Gray => {
            let e = container.gray_encoded()?;
            Image::Gray(decode(&e.mask, &e.values, &cfg)?)
        }
        _ => Image::Color(decode_color(&container.color_encoded()?, &cfg)?),
    };
    if let Some(reference) = &args.reference {
        let err = match (&img, read_image(reference)?) {
            (Image::Gray(u), Image::Gray(f)) => l2_error(u, &f)?,
            (Image::Color(u), Image::Color(f)) => u.l2_error(&f)?,
            _ => return Err(Error::InvalidParameter("reference and container differ in channels".into()).into()),
        };
        println!("l2_error {err:.6}");
    }
    write_image(&img, &args.output)
}

fn cmd_denoise(args: &DenoiseArgs, seed: u64) -> Result<()> {
    let f_noisy = read_gray(&args.input)?;
    let strategy = MaskStrategy {
        dt: args.dt,
        n_steps: args.n_steps,
        presmooth_sigma: args.presmooth,
        density_mode: args.density.into(),
        seed,
        ..MaskStrategy::new(args.method, args.c, args.alpha)
    };
    let u = denoise(&f_noisy, &args.decode.config(strategy), args.scheme.into())?;
    if let Some(reference) = &args.reference {
        let f = read_gray(reference)?;
        println!("input_l2_error {:.6}", l2_error(&f_noisy, &f)?);
        println!("l2_error {:.6}", l2_error(&u, &f)?);
    }
    write_image(&Image::Gray(u), &args.output)
}

fn cmd_bench(args: &BenchArgs, seed: u64) -> Result<()> {
    let img = read_gray(&args.input)?;
    let id = args.image_id.clone().unwrap_or_else(|| {
        args.input
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default()
    });
    let opts = BenchOptions {
        dt: args.dt,
        decode_steps: args.decode_steps,
        noisy_presmooth: args.presmooth,
        density_mode: args.density.into(),
        timing: args.timing,
    };
    let methods: Vec<MethodParams> = if args.methods.is_empty() {
        MethodParams::reference_defaults()
    } else {
        args.methods.iter().map(|&m| MethodParams::defaults_for(m)).collect()
    };
    let records = match args.suite {
        BenchSuite::Masks => {
            let masks = if args.masks.is_empty() {
                MaskMethod::ALL.to_vec()
            } else {
                args.masks.clone()
            };
            run_mask_comparison(&id, &img, &args.sigmas, &masks, args.c, args.alpha, seed, &opts)?
        }
        BenchSuite::Methods => run_method_comparison(&id, &img, &args.sigmas, args.c, &methods, seed, &opts)?,
        BenchSuite::Saltpepper => {
            run_saltpepper(&id, &img, args.noise.into(), args.fraction, args.c, &methods, seed, &opts)?
        }
    };
    let mut buf = Vec::new();
    write_records(&records, &mut buf)?;
    match &args.out {
        Some(path) => write_file(path, &buf),
        None => {
            print!("{}", String::from_utf8_lossy(&buf));
            Ok(())
        }
    }
}

fn cmd_validate(args: &ValidateArgs) -> Result<bool> {
    let opts = ValidateOptions {
        theta_resolution: args.resolution,
        theta_alpha: args.theta_alpha,
    };
    let report = validate::run(args.suite.into(), &opts)?;
    for c in &report.checks {
        println!("{c}");
    }
    if let Some(dir) = &args.out_dir {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        write_file(&dir.join("checks.csv"), &report.checks_csv()?)?;
        for (name, bytes) in &report.tables {
            write_file(&dir.join(name), bytes)?;
        }
    }
    Ok(report.passed())
}

fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if let Some(e) = cause.downcast_ref::<Error>() {
            return match e {
                Error::Io(_) | Error::Pnm(_) | Error::Container(_) | Error::Csv(_) => EXIT_IO,
                Error::NotConverged { .. } => EXIT_SOLVER,
                _ => EXIT_USAGE,
            };
        }
        if cause.downcast_ref::<std::io::Error>().is_some() {
            return EXIT_IO;
        }
    }
    EXIT_USAGE
}

fn run(cli: Cli) -> Result<bool> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .context("configuring the thread pool")?;
    }
    let seed = cli.seed;
    match &cli.command {
        Command::Noise(a) => cmd_noise(a, seed)?,
        Command::Mask(a) => cmd_mask(a, seed)?,
        Command::Encode(a) => cmd_encode(a, seed)?,
        Command::Decode(a) => cmd_decode(a)?,
        Command::Denoise(a) => cmd_denoise(a, seed)?,
        Command::Bench(a) => cmd_bench(a, seed)?,
        Command::Validate(a) => return cmd_validate(a),
    }
    Ok(true)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_USAGE)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(EXIT_VALIDATION),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
