//! Command-line front end for the `msdim` library.
//!
//! Every subcommand resolves an [`ExperimentConfig`] (flags over config file
//! over defaults), runs inside a dedicated thread pool and produces a byte
//! buffer. With `--out` the buffer goes to that file and the resolved
//! configuration to `<out>.config.json`.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use thiserror::Error;

pub mod commands;
pub mod config;
pub mod format;

pub use config::{ExperimentConfig, Format};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Budget(String),
    #[error("{0}")]
    Verification(String),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 2,
            CliError::Budget(_) => 3,
            CliError::Verification(_) => 4,
            CliError::Io(_) => 5,
        }
    }
}

impl From<msdim::Error> for CliError {
    fn from(e: msdim::Error) -> Self {
        match e {
            msdim::Error::BudgetExceeded { .. } => CliError::Budget(e.to_string()),
            other => CliError::Input(other.to_string()),
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "msdim",
    version,
    about = "Multiset resolving sets on random and explicit graphs"
)]
pub struct Cli {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// Master seed
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output file; the resolved configuration goes next to it
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Worker threads (default: all cores)
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Print exponents as exact fractions
    #[arg(long, global = true)]
    pub rational: bool,
    /// JSON parameter file
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Args, Default)]
pub struct GraphArgs {
    /// Edge-list file
    #[arg(long)]
    pub graph: Option<PathBuf>,
    /// Vertex count of a generated G(n, p)
    #[arg(long)]
    pub n: Option<usize>,
    /// Density exponent, p = n^x / (n - 1); decimal or p/q
    #[arg(long)]
    pub x: Option<String>,
    /// Edge probability
    #[arg(long)]
    pub p: Option<f64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sample G(n, p) and write its edge list
    Gen {
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        x: Option<String>,
        #[arg(long)]
        p: Option<f64>,
    },
    /// Exact metric, outer multiset and multiset dimensions of a small graph
    Exact {
        #[command(flatten)]
        graph: GraphArgs,
        #[arg(long)]
        budget: Option<usize>,
    },
    /// Level curves f_x(y) = level
    Curves {
        #[arg(long, value_delimiter = ',')]
        levels: Option<Vec<u32>>,
        #[arg(long)]
        points: Option<usize>,
        /// Right end of the x range, decimal or p/q
        #[arg(long)]
        upper: Option<String>,
        #[arg(long)]
        max_k: Option<u32>,
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Randomized construction with its round log
    Randomized {
        #[command(flatten)]
        graph: GraphArgs,
        /// Initial expected sensor count
        #[arg(long)]
        r: Option<f64>,
        #[arg(long)]
        growth: Option<f64>,
        #[arg(long)]
        max_rounds: Option<u32>,
        /// Write the resolving set found as a JSON array
        #[arg(long)]
        sensors_out: Option<PathBuf>,
    },
    /// Source localization transcripts as JSON lines
    Localize {
        #[command(flatten)]
        graph: GraphArgs,
        /// Sensor list, `@file` or `auto`
        #[arg(long)]
        sensors: Option<String>,
        /// Source vertex or `sweep`
        #[arg(long)]
        source: Option<String>,
    },
    /// Audit sphere growth around sampled vertices and pairs
    Expansion {
        #[command(flatten)]
        graph: GraphArgs,
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long)]
        multiplier: Option<f64>,
    },
    /// Typicality census of a sensor set
    Census {
        #[command(flatten)]
        graph: GraphArgs,
        /// Sensor list, `@file`, `sqrt` or `random:<size>`
        #[arg(long)]
        sensors: Option<String>,
        /// Top level
        #[arg(long)]
        k: Option<u32>,
    },
    /// Seeded trials of one experiment, one CSV row per trial
    Campaign {
        /// randomized, failure_rate, census or expansion
        #[arg(long)]
        experiment: Option<String>,
        #[arg(long)]
        trials: Option<u64>,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        x: Option<String>,
        #[arg(long)]
        r: Option<f64>,
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long)]
        multiplier: Option<f64>,
        #[arg(long)]
        max_rounds: Option<u32>,
        /// Add a wall_ms column (breaks byte-for-byte reproducibility)
        #[arg(long)]
        timings: bool,
    },
    /// Check whether a sensor set is resolving
    Verify {
        #[command(flatten)]
        graph: GraphArgs,
        #[arg(long)]
        sensors: Option<String>,
        /// metric, multiset or outer-multiset
        #[arg(long)]
        kind: Option<String>,
    },
    /// Dump multiset signatures as CSV
    Signatures {
        #[command(flatten)]
        graph: GraphArgs,
        #[arg(long)]
        sensors: Option<String>,
    },
}

fn graph_config(g: GraphArgs) -> ExperimentConfig {
    ExperimentConfig {
        graph: g.graph,
        n: g.n,
        x: g.x,
        p: g.p,
        ..Default::default()
    }
}

impl CommonArgs {
    fn to_config(&self) -> ExperimentConfig {
        ExperimentConfig {
            seed: self.seed,
            out: self.out.clone(),
            format: self.format,
            threads: self.threads,
            rational: self.rational.then_some(true),
            ..Default::default()
        }
    }
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Gen { .. } => "gen",
            Command::Exact { .. } => "exact",
            Command::Curves { .. } => "curves",
            Command::Randomized { .. } => "randomized",
            Command::Localize { .. } => "localize",
            Command::Expansion { .. } => "expansion",
            Command::Census { .. } => "census",
            Command::Campaign { .. } => "campaign",
            Command::Verify { .. } => "verify",
            Command::Signatures { .. } => "signatures",
        }
    }

    fn into_config(self) -> ExperimentConfig {
        let command = Some(self.name().to_string());
        let mut cfg = match self {
            Command::Gen { n, x, p } => ExperimentConfig {
                n,
                x,
                p,
                ..Default::default()
            },
            Command::Exact { graph, budget } => ExperimentConfig {
                budget,
                ..graph_config(graph)
            },
            Command::Curves {
                levels,
                points,
                upper,
                max_k,
                tol,
            } => ExperimentConfig {
                levels,
                points,
                upper,
                max_k,
                tol,
                ..Default::default()
            },
            Command::Randomized {
                graph,
                r,
                growth,
                max_rounds,
                sensors_out,
            } => ExperimentConfig {
                r,
                growth,
                max_rounds,
                sensors_out,
                ..graph_config(graph)
            },
            Command::Localize {
                graph,
                sensors,
                source,
            } => ExperimentConfig {
                sensors,
                source,
                ..graph_config(graph)
            },
            Command::Expansion {
                graph,
                samples,
                multiplier,
            } => ExperimentConfig {
                samples,
                multiplier,
                ..graph_config(graph)
            },
            Command::Census { graph, sensors, k } => ExperimentConfig {
                sensors,
                k,
                ..graph_config(graph)
            },
            Command::Campaign {
                experiment,
                trials,
                n,
                x,
                r,
                samples,
                multiplier,
                max_rounds,
                timings,
            } => ExperimentConfig {
                experiment,
                trials,
                n,
                x,
                r,
                samples,
                multiplier,
                max_rounds,
                timings: timings.then_some(true),
                ..Default::default()
            },
            Command::Verify {
                graph,
                sensors,
                kind,
            } => ExperimentConfig {
                sensors,
                kind,
                ..graph_config(graph)
            },
            Command::Signatures { graph, sensors } => ExperimentConfig {
                sensors,
                ..graph_config(graph)
            },
        };
        cfg.command = command;
        cfg
    }
}

/// Result of one command. A failed verification still carries its report.
#[derive(Debug)]
pub struct Output {
    pub body: Vec<u8>,
    pub config: ExperimentConfig,
    /// whether `body` was written to `--out`
    pub written: bool,
    pub failure: Option<CliError>,
}

impl Output {
    pub fn into_result(self) -> Result<Vec<u8>, CliError> {
        match self.failure {
            Some(e) => Err(e),
            None => Ok(self.body),
        }
    }
}

/// Sibling file holding the resolved configuration of `out`.
pub fn config_path(out: &Path) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".config.json");
    PathBuf::from(s)
}

pub(crate) fn write_file(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    std::fs::write(path, bytes).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

/// Runs a parsed command line.
pub fn run(cli: Cli) -> Result<Output, CliError> {
    let mut cfg = match &cli.common.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default(),
    };
    cfg.overlay(cli.common.to_config());
    cfg.overlay(cli.command.into_config());
    run_config(cfg)
}

/// Runs a fully merged configuration; `command` must be set.
pub fn run_config(mut cfg: ExperimentConfig) -> Result<Output, CliError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.threads.unwrap_or(0))
        .build()
        .map_err(|e| CliError::Input(format!("thread pool: {e}")))?;
    let (body, failure) = pool.install(|| commands::dispatch(&mut cfg))?;
    let written = match cfg.out.clone() {
        Some(out) => {
            write_file(&out, &body)?;
            write_file(&config_path(&out), cfg.to_json().as_bytes())?;
            true
        }
        None => false,
    };
    Ok(Output {
        body,
        config: cfg,
        written,
        failure,
    })
}

/// Parses `args` (program name first) and runs them.
pub fn run_args<I, T>(args: I) -> Result<Output, CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = Cli::try_parse_from(args).map_err(|e| CliError::Input(e.to_string()))?;
    run(cli)
}
