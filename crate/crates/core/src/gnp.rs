//! Binomial random graphs `G(n, p)` by geometric skip sampling.

use rand::Rng;
use rand_distr::Geometric;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::graph::Graph;
use crate::seed::{substream, Domain};

/// Edge density, either directly or as the exponent `x` of `d = n^x`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Density {
    Probability(f64),
    /// `p = n^x / (n - 1)`, so the expected degree is `n^x`.
    Exponent(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RandomGraphSpec {
    pub n: usize,
    pub density: Density,
    pub seed: u64,
}

impl RandomGraphSpec {
    pub fn with_p(n: usize, p: f64, seed: u64) -> Self {
        Self {
            n,
            density: Density::Probability(p),
            seed,
        }
    }

    pub fn with_exponent(n: usize, x: f64, seed: u64) -> Self {
        Self {
            n,
            density: Density::Exponent(x),
            seed,
        }
    }

    /// The edge probability, validated.
    pub fn probability(&self) -> Result<f64> {
        let p = match self.density {
            Density::Probability(p) => p,
            Density::Exponent(x) => {
                if !(x > 0.0 && x < 1.0) {
                    return Err(invalid(format!("exponent x = {x} outside (0, 1)")));
                }
                if self.n < 2 {
                    return Err(invalid("exponent density needs n >= 2"));
                }
                (self.n as f64).powf(x) / (self.n - 1) as f64
            }
        };
        if !(0.0..=1.0).contains(&p) {
            return Err(invalid(format!("edge probability {p} outside [0, 1]")));
        }
        Ok(p)
    }
}

/// Samples `G(n, p)`.
///
/// Row `u` covers the pairs `(u, v)` with `v > u` and draws its gaps from
/// its own substream `(seed, GraphRow, u)`, so the edge set depends only on
/// the spec and not on how rows are scheduled.
pub fn generate_gnp(spec: &RandomGraphSpec) -> Result<Graph> {
    let p = spec.probability()?;
    let n = spec.n;
    if p == 0.0 || n < 2 {
        return Ok(Graph::empty(n));
    }
    if p == 1.0 {
        return Ok(Graph::complete(n));
    }
    let gaps = Geometric::new(p).map_err(|e| invalid(e.to_string()))?;
    let rows: Vec<Vec<(usize, usize)>> = (0..n - 1)
        .into_par_iter()
        .map(|u| {
            let mut rng = substream(spec.seed, Domain::GraphRow, u as u64);
            let mut row = Vec::new();
            // candidates are v = u + 1 + offset, offset in 0..(n - u - 1)
            let span = (n - u - 1) as u64;
            let mut offset = 0u64;
            loop {
                offset = offset.saturating_add(rng.sample(gaps));
                if offset >= span {
                    break;
                }
                row.push((u, u + 1 + offset as usize));
                offset += 1;
            }
            row
        })
        .collect();
    let edges: Vec<_> = rows.into_iter().flatten().collect();
    Ok(Graph::from_sorted_unique(n, &edges))
}
