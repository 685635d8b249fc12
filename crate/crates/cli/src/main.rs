//! `inpaint`: corrupt images, reconstruct them, score the result and run
//! benchmark suites.
//!
//! Exit codes: 0 on success, 1 on usage or input errors, 2 when a
//! reconstruction or benchmark case failed.

use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use inpaint_core::harness::load_images;
use inpaint_core::{
    apply_corruption, gen_mask, inpaint_image, read_csv, read_mask, read_raster, run_suite, score,
    write_csv, write_markdown, write_mask, write_raster, CorruptionKind, CorruptionSpec,
    InpaintError, KernelKind, Method, MethodOptions, SuiteConfig, SuiteOptions, TilingRegime,
    VariogramFamily,
};

#[derive(Parser, Debug)]
#[command(name = "inpaint", version, about = "Interpolation-based image inpainting")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Damage an image and write the damaged image plus its mask.
    Corrupt {
        input: PathBuf,
        /// curve, sparse_text, dense_text, scratches, frame, salt_pepper, or
        /// a preset (mask1..mask5, noise1..noise5).
        #[arg(long)]
        kind: String,
        /// Salt-and-pepper density in [0, 1].
        #[arg(long)]
        density: Option<f64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        frame_size: Option<usize>,
        #[arg(long)]
        stroke_width: Option<usize>,
        #[arg(long)]
        out_img: PathBuf,
        #[arg(long)]
        out_mask: PathBuf,
    },
    /// Reconstruct the pixels flagged in a mask image (non-zero = unknown).
    Inpaint {
        input: PathBuf,
        #[arg(long)]
        mask: PathBuf,
        #[arg(long, value_enum)]
        method: MethodArg,
        /// Square tile size; implies the fixed tiling regime.
        #[arg(long)]
        tile_size: Option<usize>,
        #[arg(long)]
        min_known: Option<usize>,
        #[arg(long)]
        regime: Option<String>,
        #[arg(long)]
        crop_size: Option<usize>,
        /// RBF kernel: thin_plate, gaussian or multiquadric.
        #[arg(long)]
        kernel: Option<String>,
        /// RBF shape parameter.
        #[arg(long)]
        epsilon: Option<f64>,
        /// Variogram family: spherical, exponential or gaussian.
        #[arg(long)]
        family: Option<String>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Print psnr,ssim,mse between a reference and a test image.
    Score { reference: PathBuf, test: PathBuf },
    /// Run a configured suite; writes results.csv and report.md.
    Bench {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out_dir: PathBuf,
    },
    /// Render a results CSV.
    Report {
        csv: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Markdown)]
        format: Format,
        /// Write here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum MethodArg {
    Cubic,
    Kriging,
    Rbf,
    Hdmr,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Method {
        match m {
            MethodArg::Cubic => Method::Cubic,
            MethodArg::Kriging => Method::Kriging,
            MethodArg::Rbf => Method::Rbf,
            MethodArg::Hdmr => Method::Hdmr,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Markdown,
    Csv,
}

enum Failure {
    Usage(String),
    Cases(String),
}

impl From<InpaintError> for Failure {
    fn from(e: InpaintError) -> Self {
        Failure::Usage(e.to_string())
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Cases(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn run(command: Command) -> Result<(), Failure> {
    match command {
        Command::Corrupt { input, kind, density, seed, frame_size, stroke_width, out_img, out_mask } => {
            let mut spec = match CorruptionSpec::preset(&kind) {
                Some(p) => p,
                None => CorruptionSpec::new(kind.parse::<CorruptionKind>()?),
            };
            if let Some(d) = density {
                spec.density = d;
            }
            if let Some(f) = frame_size {
                spec.frame_size = f;
            }
            if let Some(w) = stroke_width {
                spec.stroke_width = w;
            }
            let spec = spec.with_seed(seed);
            let img = read_raster(&input)?;
            let mask = gen_mask(&spec, img.width(), img.height())?;
            write_raster(&apply_corruption(&img, &mask, &spec)?, &out_img)?;
            write_mask(&mask, &out_mask)?;
            eprintln!("{}: {} of {} pixels unknown", spec.label(), mask.count_unknown(), mask.width() * mask.height());
        }
        Command::Inpaint { input, mask, method, tile_size, min_known, regime, crop_size, kernel, epsilon, family, out } => {
            let method = Method::from(method);
            let mut options = MethodOptions::default();
            let mut policy = options.policy_for(method, None);
            if let Some(t) = tile_size {
                policy.tile_w = t;
                policy.tile_h = t;
                policy.regime = TilingRegime::Fixed;
            }
            if let Some(r) = regime {
                policy.regime = r.parse()?;
            }
            if let Some(k) = min_known {
                policy.min_known = k;
            }
            if let Some(c) = crop_size {
                policy.crop_size = c;
            }
            if let Some(k) = kernel {
                options.rbf.kind = k.parse::<KernelKind>()?;
            }
            if let Some(e) = epsilon {
                if !(e > 0.0 && e.is_finite()) {
                    return Err(Failure::Usage(format!("epsilon must be positive, got {e}")));
                }
                options.rbf.epsilon = Some(e);
            }
            if let Some(f) = family {
                options.family = f.parse::<VariogramFamily>()?;
            }
            let img = read_raster(&input)?;
            let mask = read_mask(&mask)?;
            let repaired = inpaint_image(&img, &mask, method, &policy, &options)
                .map_err(|e| Failure::Cases(format!("{method}: {e}")))?;
            write_raster(&repaired, &out)?;
        }
        Command::Score { reference, test } => {
            let s = score(&read_raster(&reference)?, &read_raster(&test)?)?;
            println!("psnr,ssim,mse");
            println!("{},{},{}", s.psnr, s.ssim, s.mse);
        }
        Command::Bench { config, out_dir } => {
            let cfg = SuiteConfig::load(&config)?;
            let images = load_images(&cfg)?;
            let options = SuiteOptions {
                seed: cfg.seed,
                methods: cfg.options,
                timing: cfg.timing,
            };
            let report = run_suite(&images, &cfg.corruptions, &cfg.methods, &options)?;
            std::fs::create_dir_all(&out_dir)?;
            write_csv(&report, create(&out_dir.join("results.csv"))?)?;
            write_markdown(&report, create(&out_dir.join("report.md"))?)?;
            let failures = report.failures();
            eprintln!("{} cases, {failures} failed; results in {}", report.rows.len(), out_dir.display());
            if failures > 0 {
                return Err(Failure::Cases(format!("{failures} case(s) failed")));
            }
        }
        Command::Report { csv, format, out } => {
            let report = read_csv(BufReader::new(File::open(&csv)?))?;
            let sink: Box<dyn Write> = match &out {
                Some(p) => Box::new(create(p)?),
                None => Box::new(io::stdout().lock()),
            };
            match format {
                Format::Markdown => write_markdown(&report, sink)?,
                Format::Csv => write_csv(&report, sink)?,
            }
        }
    }
    Ok(())
}

fn create(path: &Path) -> io::Result<BufWriter<File>> {
    File::create(path).map(BufWriter::new)
}
