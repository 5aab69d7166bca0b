//! `deformlab` command-line front end.
//!
//! Exit codes: 0 on success, 1 for usage, configuration and I/O problems,
//! 2 when the computation itself fails (fold, solver failure, incompatible
//! inputs). Diagnostics go to standard error; results go to files or
//! standard output.

pub mod config;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use deformlab::{
    adversarial_loss, content_loss_cv, feature_maps, features::deform_image, io, mean_ssim,
    mos_aggregate, perceptual_loss, psnr, render_feature_image, ssim_global, DiscriminatorProbs,
    Error, GrayImage, RatingsTable,
};

use config::{Overrides, RunConfig, CONFIG_ENV};

#[derive(Debug, Parser)]
#[command(
    name = "deformlab",
    version,
    about = "Prescribed-Jacobian deformation toolkit"
)]
struct Cli {
    /// Key = value configuration file (default: $DEFORMLAB_CONFIG).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args, Default)]
struct PipelineArgs {
    /// Monitor contrast: f = 1 + alpha * I / 255.
    #[arg(long)]
    alpha: Option<f64>,
    /// RK4 time steps.
    #[arg(long)]
    steps: Option<usize>,
    /// Poisson residual tolerance (max-norm).
    #[arg(long)]
    tol: Option<f64>,
    /// Poisson refinement budget.
    #[arg(long = "max-iter")]
    max_iter: Option<usize>,
}

impl PipelineArgs {
    fn overrides(&self) -> Overrides {
        Overrides {
            alpha: self.alpha,
            steps: self.steps,
            solver_tol: self.tol,
            solver_max_iter: self.max_iter,
            ssim_window: None,
        }
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Deform the unit square by an image-derived monitor; write the grid.
    Deform {
        /// Input image (PNG, PGM, or anything the decoder recognises).
        #[arg(long)]
        image: PathBuf,
        /// Output grid CSV: `nx,ny` header, then one `x,y` row per node.
        #[arg(long)]
        grid: PathBuf,
        #[command(flatten)]
        pipeline: PipelineArgs,
    },
    /// Render the JD and CV feature images of an input image.
    Features {
        /// Input image.
        #[arg(long)]
        image: PathBuf,
        /// Output JD image (`.pgm` writes PGM, anything else PNG).
        #[arg(long)]
        jd: PathBuf,
        /// Output CV image.
        #[arg(long)]
        cv: PathBuf,
        /// Also write the raw JD field as CSV.
        #[arg(long = "jd-csv")]
        jd_csv: Option<PathBuf>,
        /// Also write the raw CV field as CSV.
        #[arg(long = "cv-csv")]
        cv_csv: Option<PathBuf>,
        #[command(flatten)]
        pipeline: PipelineArgs,
    },
    /// PSNR, SSIM and mean-SSIM of a test image against a reference.
    Metrics {
        /// Reference image.
        #[arg(long = "ref")]
        reference: PathBuf,
        /// Image under test; must match the reference dimensions.
        #[arg(long)]
        test: PathBuf,
        /// Tile side for mean-SSIM.
        #[arg(long = "ssim-window")]
        ssim_window: Option<usize>,
    },
    /// CV content loss, adversarial loss and their weighted sum.
    Loss {
        /// High-resolution reference image.
        #[arg(long)]
        hr: PathBuf,
        /// Super-resolved image.
        #[arg(long)]
        sr: PathBuf,
        /// One discriminator probability per line.
        #[arg(long)]
        probs: Option<PathBuf>,
        #[command(flatten)]
        pipeline: PipelineArgs,
    },
    /// Mean opinion score per method from a ratings CSV.
    Mos {
        /// CSV with header `image_id,method_id,rater_id,score`.
        #[arg(long)]
        ratings: PathBuf,
    },
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Compute(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_computation() {
            Failure::Compute(e)
        } else {
            Failure::Usage(e.to_string())
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

fn load_image(path: &PathBuf) -> Result<GrayImage, Failure> {
    GrayImage::load(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn resolve_config(path: Option<&PathBuf>, overrides: &Overrides) -> Result<RunConfig, Failure> {
    let path = path
        .cloned()
        .or_else(|| std::env::var_os(CONFIG_ENV).map(PathBuf::from));
    let text = match &path {
        Some(p) => Some(
            std::fs::read_to_string(p)
                .map_err(|e| Failure::Usage(format!("{}: {e}", p.display())))?,
        ),
        None => None,
    };
    RunConfig::resolve(text.as_deref(), overrides).map_err(Failure::Usage)
}

fn execute(cli: Cli, out: &mut dyn Write) -> Result<(), Failure> {
    let config = cli.config.as_ref();
    match cli.command {
        Command::Deform {
            image,
            grid,
            pipeline,
        } => {
            let cfg = resolve_config(config, &pipeline.overrides())?;
            let img = load_image(&image)?;
            let g = deform_image(&img, &cfg.pipeline())?;
            io::write_grid(&grid, &g)?;
        }
        Command::Features {
            image,
            jd,
            cv,
            jd_csv,
            cv_csv,
            pipeline,
        } => {
            let cfg = resolve_config(config, &pipeline.overrides())?;
            let img = load_image(&image)?;
            let maps = feature_maps(&img, &cfg.pipeline())?;
            render_feature_image(&maps.jd)?.save(&jd)?;
            render_feature_image(&maps.cv)?.save(&cv)?;
            if let Some(p) = jd_csv {
                io::write_field(p, &maps.jd)?;
            }
            if let Some(p) = cv_csv {
                io::write_field(p, &maps.cv)?;
            }
        }
        Command::Metrics {
            reference,
            test,
            ssim_window,
        } => {
            let overrides = Overrides {
                ssim_window,
                ..Default::default()
            };
            let cfg = resolve_config(config, &overrides)?;
            let a = load_image(&reference)?;
            let b = load_image(&test)?;
            let p = psnr(&a, &b, 255.0)?;
            let s = ssim_global(&a, &b, &cfg.ssim)?;
            let m = mean_ssim(&a, &b, &cfg.ssim)?;
            writeln!(out, "psnr_db,ssim,mean_ssim")?;
            writeln!(out, "{p:.6},{s:.6},{m:.6}")?;
        }
        Command::Loss {
            hr,
            sr,
            probs,
            pipeline,
        } => {
            let cfg = resolve_config(config, &pipeline.overrides())?;
            let a = load_image(&hr)?;
            let b = load_image(&sr)?;
            let content = content_loss_cv(&a, &b, &cfg.pipeline())?;
            let adversarial = match probs {
                Some(p) => Some(adversarial_loss(&DiscriminatorProbs::load(p)?)),
                None => None,
            };
            let total = perceptual_loss(content, adversarial.unwrap_or(0.0))?;
            writeln!(out, "term,value")?;
            writeln!(out, "content,{content}")?;
            if let Some(adv) = adversarial {
                writeln!(out, "adversarial,{adv}")?;
            }
            writeln!(out, "total,{total}")?;
        }
        Command::Mos { ratings } => {
            let table = RatingsTable::load(&ratings)?;
            writeln!(out, "method_id,mean_score")?;
            for (method, mean) in mos_aggregate(&table)? {
                writeln!(out, "{method},{mean:.2}")?;
            }
        }
    }
    Ok(())
}

/// Parses `argv` (including the program name), runs the subcommand and
/// returns the process exit code.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let rendered = e.render().to_string();
            if code == 0 {
                let _ = write!(out, "{rendered}");
            } else {
                let _ = write!(err, "{rendered}");
            }
            return code;
        }
    };
    match execute(cli, out) {
        Ok(()) => 0,
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            1
        }
        Err(Failure::Compute(e)) => {
            let _ = writeln!(err, "error: {e}");
            if matches!(e, Error::FoldDetected { .. }) {
                let _ = writeln!(err, "hint: increase --steps or reduce --alpha");
            }
            2
        }
    }
}
