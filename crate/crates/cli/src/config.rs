//! The parameter bag shared by every subcommand.
//!
//! Values come from defaults, then a JSON config file, then flags. Commands
//! write back the defaults they used, so the bag stored next to an output
//! fully determines it.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub command: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub format: Option<Format>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rational: Option<bool>,
    /// worker count; never serialized since it cannot change any output
    #[serde(skip_serializing, default)]
    pub threads: Option<usize>,
    /// output locations are left out of the stored bag as well
    #[serde(skip_serializing, default)]
    pub out: Option<PathBuf>,

    #[serde(skip_serializing_if = "Option::is_none")]
    pub graph: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    /// density exponent, decimal or `p/q`
    #[serde(skip_serializing_if = "Option::is_none")]
    pub x: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,

    #[serde(skip_serializing_if = "Option::is_none")]
    pub budget: Option<usize>,

    #[serde(skip_serializing_if = "Option::is_none")]
    pub levels: Option<Vec<u32>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub points: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub upper: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_k: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,

    #[serde(skip_serializing_if = "Option::is_none")]
    pub r: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub growth: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_rounds: Option<u32>,
    #[serde(skip_serializing, default)]
    pub sensors_out: Option<PathBuf>,

    /// sensor list `0,4,9`, `auto`, `sqrt` or `random:<size>`
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sensors: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kind: Option<String>,
    /// source vertex or `sweep`
    #[serde(skip_serializing_if = "Option::is_none")]
    pub source: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<u32>,

    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub multiplier: Option<f64>,

    #[serde(skip_serializing_if = "Option::is_none")]
    pub experiment: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trials: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timings: Option<bool>,
}

macro_rules! overlay {
    ($dst:ident, $src:ident; $($field:ident),* $(,)?) => {
        $( if $src.$field.is_some() { $dst.$field = $src.$field; } )*
    };
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::Input(format!("config {}: {e}", path.display())))
    }

    /// Fields set in `top` replace those in `self`.
    pub fn overlay(&mut self, top: ExperimentConfig) {
        // a density flag replaces the other density from the file
        if top.x.is_some() || top.p.is_some() {
            self.x = None;
            self.p = None;
        }
        overlay!(self, top;
            command, seed, format, rational, threads, out, graph, n, x, p, budget,
            levels, points, upper, max_k, tol, r, growth, max_rounds, sensors_out,
            sensors, kind, source, k, samples, multiplier, experiment, trials, timings,
        );
    }

    pub fn seed(&mut self) -> u64 {
        *self.seed.get_or_insert(0)
    }

    pub fn format_or(&mut self, default: Format) -> Format {
        *self.format.get_or_insert(default)
    }

    pub fn rational(&mut self) -> bool {
        *self.rational.get_or_insert(false)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("config serializes");
        s.push('\n');
        s
    }
}
