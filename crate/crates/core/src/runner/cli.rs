//! Command-line parsing.
//!
//! ```text
//! spacs [run] [FLAGS]                       run one experiment
//! spacs campaign [FLAGS] --vary name=v,...  cartesian-product campaign
//! spacs reanalyze DIR                       redo tomography from a run directory
//! ```
//!
//! `--config FILE` is loaded first; every other flag then overrides it.

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use std::path::PathBuf;

use super::campaign::ParameterRange;
use super::config::ExperimentConfig;
use crate::error::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_RUNTIME: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "spacs", version, about = "Heralded classical-light homodyne tomography")]
#[command(args_conflicts_with_subcommands = true)]
struct Cli {
    #[command(subcommand)]
    command: Option<Sub>,
    #[command(flatten)]
    run: RunArgs,
}

#[derive(Debug, Subcommand)]
enum Sub {
    /// Run one experiment (the default).
    Run(RunArgs),
    /// Run a cartesian-product parameter campaign.
    Campaign {
        #[command(flatten)]
        run: RunArgs,
        /// Parameter range `name=v1,v2,...` (alpha-re, alpha-im, sigma, r, gamma). Repeatable.
        #[arg(long = "vary", required = true)]
        vary: Vec<String>,
    },
    /// Recompute tomography and Wigner stages from a run directory.
    Reanalyze { dir: PathBuf },
}

#[derive(Debug, Default, Args)]
struct RunArgs {
    /// Flat key = value config file, applied before all other flags.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, allow_negative_numbers = true)]
    alpha_re: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    alpha_im: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    sigma: Option<f64>,
    /// Squeezing parameter.
    #[arg(long, allow_negative_numbers = true)]
    r: Option<f64>,
    /// Herald threshold on |b_i|.
    #[arg(long, allow_negative_numbers = true)]
    gamma: Option<f64>,
    /// Heralded samples to collect.
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    max_trials: Option<u64>,
    #[arg(long, allow_negative_numbers = true)]
    theta_step_deg: Option<f64>,
    #[arg(long)]
    bins: Option<usize>,
    /// Histogram range `MIN,MAX`.
    #[arg(long, allow_hyphen_values = true)]
    q_range: Option<String>,
    /// Fock-space truncation.
    #[arg(long)]
    nmax: Option<usize>,
    /// Wigner grid `POINTS` or `POINTS,HALF_WIDTH`.
    #[arg(long)]
    grid: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Report printed to stdout: `text` or `json`.
    #[arg(long)]
    format: Option<String>,
}

#[derive(Debug)]
pub enum Command {
    Run(ExperimentConfig),
    Campaign(ExperimentConfig, Vec<ParameterRange>),
    Reanalyze(PathBuf),
}

#[derive(Debug)]
pub enum CliError {
    /// Help or version text; print and exit successfully.
    Display(String),
    Usage(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Display(_) => EXIT_OK,
            CliError::Usage(_) => EXIT_USAGE,
        }
    }
}

fn flag_for(name: &str) -> String {
    let flag = match name {
        "alpha" => "alpha-re/--alpha-im",
        "target_conditioned" => "samples",
        "theta_step_deg" | "theta_sweep" => "theta-step-deg",
        "q_range" | "q_min" | "q_max" => "q-range",
        "grid" | "grid_points" | "grid_half_width" => "grid",
        other => return format!("--{}", other.replace('_', "-")),
    };
    format!("--{flag}")
}

fn usage_from(err: Error) -> CliError {
    match err {
        Error::InvalidParameter { name, reason } => CliError::Usage(format!("{}: {reason}", flag_for(name))),
        other => CliError::Usage(other.to_string()),
    }
}

fn build_config(args: RunArgs) -> Result<ExperimentConfig, CliError> {
    let mut cfg = match &args.config {
        Some(path) => ExperimentConfig::load(path).map_err(|e| CliError::Usage(format!("--config: {e}")))?,
        None => ExperimentConfig::default(),
    };
    let p = &mut cfg.params;
    if let Some(v) = args.alpha_re {
        p.alpha = Complex64::new(v, p.alpha.im);
    }
    if let Some(v) = args.alpha_im {
        p.alpha = Complex64::new(p.alpha.re, v);
    }
    if let Some(v) = args.sigma {
        p.sigma = v;
    }
    if let Some(v) = args.r {
        p.r = v;
    }
    if let Some(v) = args.gamma {
        p.gamma = v;
    }
    if let Some(v) = args.samples {
        p.target_conditioned = v;
    }
    if let Some(v) = args.seed {
        p.seed = v;
    }
    if let Some(v) = args.max_trials {
        cfg.max_trials = v;
    }
    if let Some(v) = args.theta_step_deg {
        cfg.sweep.step_deg = v;
    }
    if let Some(v) = args.bins {
        cfg.histogram.bins = v;
    }
    if let Some(range) = &args.q_range {
        let (lo, hi) = range
            .split_once(',')
            .ok_or_else(|| CliError::Usage(format!("--q-range: expected MIN,MAX, got `{range}`")))?;
        let parse = |s: &str| {
            s.trim().parse::<f64>().map_err(|e| CliError::Usage(format!("--q-range: `{s}`: {e}")))
        };
        cfg.histogram.q_min = parse(lo)?;
        cfg.histogram.q_max = parse(hi)?;
    }
    if let Some(v) = args.nmax {
        cfg.n_max = v;
    }
    if let Some(grid) = &args.grid {
        let (points, half) = match grid.split_once(',') {
            Some((p, h)) => (p, Some(h)),
            None => (grid.as_str(), None),
        };
        let points: usize = points
            .trim()
            .parse()
            .map_err(|e| CliError::Usage(format!("--grid: `{points}`: {e}")))?;
        let half = match half {
            Some(h) => h.trim().parse::<f64>().map_err(|e| CliError::Usage(format!("--grid: `{h}`: {e}")))?,
            None => cfg.wigner.re_max,
        };
        cfg.wigner = crate::wigner::WignerGridSpec::square(half, points);
    }
    if let Some(v) = args.out {
        cfg.output_dir = v;
    }
    if let Some(v) = &args.format {
        cfg.format = v.parse().map_err(usage_from)?;
    }
    cfg.validate().map_err(usage_from)?;
    Ok(cfg)
}

/// Parse a full argument vector (program name first).
pub fn cli_parse<I, T>(argv: I) -> Result<Command, CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = Cli::try_parse_from(argv).map_err(|e| {
        use clap::error::ErrorKind;
        match e.kind() {
            ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => CliError::Display(e.to_string()),
            _ => CliError::Usage(e.to_string()),
        }
    })?;
    match cli.command {
        None => Ok(Command::Run(build_config(cli.run)?)),
        Some(Sub::Run(args)) => Ok(Command::Run(build_config(args)?)),
        Some(Sub::Campaign { run, vary }) => {
            let cfg = build_config(run)?;
            let ranges = vary
                .iter()
                .map(|v| v.parse::<ParameterRange>().map_err(usage_from))
                .collect::<Result<Vec<_>, _>>()?;
            if let Some(r) = ranges.iter().find(|r| r.values.is_empty()) {
                return Err(CliError::Usage(format!("--vary: range for `{}` is empty", r.parameter.name())));
            }
            Ok(Command::Campaign(cfg, ranges))
        }
        Some(Sub::Reanalyze { dir }) => Ok(Command::Reanalyze(dir)),
    }
}
