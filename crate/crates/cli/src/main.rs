//! `evenparity`: tabulates detector distributions, heralded cat states,
//! heralding-rate scaling and Wigner functions as CSV / JSON files.

mod commands;
mod output;
mod spec;

use clap::{Args, Parser, Subcommand};
use spec::{ControlSpec, StateSpec};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

// Aliases keep clap from treating list-valued parsers as repeated flags.
type Floats = Vec<f64>;
type Counts = Vec<usize>;

/// Default output directory when `--out` is not given.
pub const OUT_DIR_ENV: &str = "EVENPARITY_OUT_DIR";

#[derive(Parser, Debug)]
#[command(name = "evenparity", version, about, propagate_version = true)]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// Fock truncation: photon numbers 0..=TRUNC are kept.
    #[arg(long, global = true)]
    pub trunc: Option<usize>,
    /// Output directory [default: $EVENPARITY_OUT_DIR, else the current directory].
    #[arg(long, global = true, env = OUT_DIR_ENV)]
    pub out: Option<PathBuf>,
    /// Worker threads (results do not depend on this).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Only errors on stderr, nothing on stdout.
    #[arg(long, short, global = true)]
    pub quiet: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Photon-number distribution pr(j) = <j|Pi|j> of the detector.
    DetectorDist(DetectorDistArgs),
    /// Heralded two-component cat: state, fidelity, rate, negativity.
    Cat(CatArgs),
    /// Two-stage four-component cat with per-stage Wigner grids.
    FourCat(FourCatArgs),
    /// Optimal heralding rate against cat size, with a power-law fit.
    Scaling(ScalingArgs),
    /// Overlap of the lossy POVM element with the ideal projector.
    PovmFidelity(PovmFidelityArgs),
    /// Wigner function of a single-mode state on a grid.
    Wigner(WignerArgs),
}

#[derive(Args, Debug, Clone)]
#[group(required = true, multiple = false)]
pub struct Amplitude {
    /// Cat amplitude beta, e.g. `2`, `1+1i` or `1.5,-0.5`.
    #[arg(long, value_parser = spec::parse_complex, allow_hyphen_values = true)]
    pub beta: Option<evenparity::C64>,
    /// Cat size |beta|^2 (real, positive beta).
    #[arg(long)]
    pub size: Option<f64>,
}

#[derive(Args, Debug, Clone)]
#[group(multiple = false)]
pub struct Squeezing {
    /// Two-mode squeezing parameter lambda = tanh r; 1 means the limit 1 - 1e-6.
    #[arg(long)]
    pub lambda: Option<f64>,
    /// Squeezing in dB.
    #[arg(long)]
    pub db: Option<f64>,
}

#[derive(Args, Debug, Clone)]
pub struct GridArgs {
    /// Samples per axis.
    #[arg(long, default_value_t = evenparity::metrics::DEFAULT_GRID_POINTS)]
    pub grid_points: usize,
    /// Half-width of the square (x, p) window.
    #[arg(long, conflicts_with = "bounds")]
    pub half_width: Option<f64>,
    /// Explicit window `x_min,x_max,p_min,p_max`.
    #[arg(long, allow_hyphen_values = true)]
    pub bounds: Option<String>,
}

#[derive(Args, Debug, Clone)]
pub struct DetectorDistArgs {
    /// Outcome (n, n).
    #[arg(long)]
    pub n: usize,
    /// Detector efficiencies: list and/or a:b:step ranges.
    #[arg(long, default_value = "1", value_parser = spec::parse_f64_list)]
    pub eta: Floats,
    /// coherent:AMP, flat, fock:M or file:PATH.
    #[arg(long, default_value = "flat")]
    pub control: ControlSpec,
    /// Largest per-arm photon number in the loss sums.
    #[arg(long)]
    pub cutoff: Option<usize>,
}

#[derive(Args, Debug, Clone)]
pub struct CatArgs {
    #[command(flatten)]
    pub amplitude: Amplitude,
    #[command(flatten)]
    pub squeezing: Squeezing,
    /// Outcome (n, n) [default: nearest integer to |beta|^2].
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long, default_value_t = 1.0, conflicts_with = "sweep_eta")]
    pub eta: f64,
    /// Sweep the efficiency over a:b:step instead of a single run.
    #[arg(long)]
    pub sweep_eta: Option<String>,
    #[arg(long)]
    pub cutoff: Option<usize>,
    #[command(flatten)]
    pub grid: GridArgs,
}

#[derive(Args, Debug, Clone)]
pub struct FourCatArgs {
    #[command(flatten)]
    pub amplitude: Amplitude,
    #[command(flatten)]
    pub squeezing: Squeezing,
    #[arg(long, default_value_t = 1.0)]
    pub eta: f64,
    /// Efficiency of the second detector [default: --eta].
    #[arg(long)]
    pub eta2: Option<f64>,
    /// Search outcomes, control amplitude and displacement for the best fidelity.
    #[arg(long, conflicts_with_all = ["n1", "n2", "control_scale", "displacement"])]
    pub optimize: bool,
    /// Stage-1 outcome.
    #[arg(long)]
    pub n1: Option<usize>,
    /// Stage-2 outcome.
    #[arg(long)]
    pub n2: Option<usize>,
    /// Stage-1 cat amplitude as a multiple of beta.
    #[arg(long)]
    pub control_scale: Option<f64>,
    /// Displacement between the stages.
    #[arg(long, value_parser = spec::parse_complex, allow_hyphen_values = true)]
    pub displacement: Option<evenparity::C64>,
    #[arg(long)]
    pub cutoff: Option<usize>,
    #[command(flatten)]
    pub grid: GridArgs,
}

#[derive(Args, Debug, Clone)]
pub struct ScalingArgs {
    /// Cat sizes |beta|^2.
    #[arg(long, default_value = "5:40:5", value_parser = spec::parse_f64_list)]
    pub sizes: Floats,
}

#[derive(Args, Debug, Clone)]
pub struct PovmFidelityArgs {
    #[arg(long, default_value = "5,10,20,40", value_parser = spec::parse_usize_list)]
    pub n: Counts,
    #[arg(long, default_value = "1,0.99,0.95,0.9,0.85,0.8", value_parser = spec::parse_f64_list)]
    pub eta: Floats,
    #[arg(long)]
    pub cutoff: Option<usize>,
}

#[derive(Args, Debug, Clone)]
pub struct WignerArgs {
    /// Any control spec, or cat:BETA / cat4:BETA.
    #[arg(long)]
    pub state: StateSpec,
    #[command(flatten)]
    pub grid: GridArgs,
}

fn init_logging(quiet: bool) {
    let level = if quiet { "error" } else { "warn" };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level))
        .format_timestamp(None)
        .init();
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    init_logging(cli.common.quiet);
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}

fn run(cli: Cli) -> Result<(), commands::CliError> {
    let common = cli.common;
    if let Some(t) = common.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .map_err(|e| commands::CliError::Usage(format!("--threads: {e}")))?;
    }
    let dir = common.out.clone().unwrap_or_else(|| PathBuf::from("."));
    let mut ctx = commands::Ctx::new(&dir)?;
    let start = Instant::now();
    let (name, outcome) = match cli.command {
        Command::DetectorDist(a) => (
            "detector-dist",
            commands::detector_dist(&a, &common, &mut ctx)?,
        ),
        Command::Cat(a) => ("cat", commands::cat(&a, &common, &mut ctx)?),
        Command::FourCat(a) => ("four-cat", commands::four_cat(&a, &common, &mut ctx)?),
        Command::Scaling(a) => ("scaling", commands::scaling(&a, &common, &mut ctx)?),
        Command::PovmFidelity(a) => (
            "povm-fidelity",
            commands::povm_fidelity(&a, &common, &mut ctx)?,
        ),
        Command::Wigner(a) => ("wigner", commands::wigner(&a, &common, &mut ctx)?),
    };
    let manifest = ctx.finish(name, outcome, start.elapsed().as_secs_f64())?;
    if !common.quiet {
        println!("{}", manifest.display());
    }
    Ok(())
}
