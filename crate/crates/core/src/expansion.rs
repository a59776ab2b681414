//! Empirical audit of sphere growth around sampled vertices and vertex pairs.
//!
//! For levels `i <= i*` the audited ratio is `|S_i(V')| / (|V'| d^i)`, which
//! should be `1 + O(gamma)`. At level `i* + 1` it is `|S_{i*+1}(V')| / n`,
//! compared with `1 - exp(-|V'| c) - |V'| d^{i*} / n`. No constants are known
//! for the error terms, so each level is flagged against `multiplier * gamma`
//! (plus `ln n / sqrt n` at the last level) and the raw deviations are kept.

use rand::seq::index;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::asymptotics::RegimeParams;
use crate::error::{invalid, Error, Result};
use crate::graph::{bfs_spheres, Graph};
use crate::seed::{substream, Domain};

pub const DEFAULT_MULTIPLIER: f64 = 3.0;
/// Allowed relative gap between the measured average degree and `params.d`.
pub const DEGREE_SLACK: f64 = 0.10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelStats {
    pub level: u32,
    pub set_size: usize,
    pub predicted: f64,
    pub tolerance: f64,
    pub ratios: Vec<f64>,
    pub mean_ratio: f64,
    pub min_ratio: f64,
    pub max_ratio: f64,
    pub max_abs_deviation: f64,
    pub within: usize,
    pub within_fraction: f64,
    /// some sampled set has eccentricity below this level
    pub partial: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExpansionReport {
    pub n: usize,
    pub d: f64,
    pub measured_degree: f64,
    pub i_star: u32,
    pub gamma: f64,
    pub multiplier: f64,
    pub levels: Vec<LevelStats>,
    pub partial: bool,
}

impl ExpansionReport {
    pub fn level(&self, level: u32, set_size: usize) -> Option<&LevelStats> {
        self.levels
            .iter()
            .find(|s| s.level == level && s.set_size == set_size)
    }
}

/// Audit with the default tolerance multiplier.
pub fn audit_expansion(
    g: &Graph,
    params: &RegimeParams,
    sample_size: usize,
    seed: u64,
) -> Result<ExpansionReport> {
    audit_expansion_with(g, params, sample_size, seed, DEFAULT_MULTIPLIER)
}

pub fn audit_expansion_with(
    g: &Graph,
    params: &RegimeParams,
    sample_size: usize,
    seed: u64,
    multiplier: f64,
) -> Result<ExpansionReport> {
    let n = g.vertex_count();
    if n < 2 {
        return Err(invalid("expansion audit needs at least two vertices"));
    }
    if params.n != n {
        return Err(invalid(format!(
            "regime is for n = {}, graph has {n} vertices",
            params.n
        )));
    }
    if !g.is_connected() {
        return Err(Error::Disconnected);
    }
    let measured = g.average_degree();
    if (measured - params.d).abs() > DEGREE_SLACK * params.d {
        return Err(invalid(format!(
            "measured average degree {measured:.3} is not within 10% of d = {:.3}",
            params.d
        )));
    }
    if multiplier.is_nan() || multiplier <= 0.0 {
        return Err(invalid("tolerance multiplier must be positive"));
    }

    let singles: Vec<Vec<usize>> = {
        let mut rng = substream(seed, Domain::ExpansionSample, 0);
        if sample_size <= n {
            index::sample(&mut rng, n, sample_size)
                .into_iter()
                .map(|v| vec![v])
                .collect()
        } else {
            (0..sample_size)
                .map(|_| vec![rng.random_range(0..n)])
                .collect()
        }
    };
    let pairs: Vec<Vec<usize>> = {
        let mut rng = substream(seed, Domain::ExpansionSample, 1);
        (0..sample_size)
            .map(|_| {
                let pick = index::sample(&mut rng, n, 2);
                vec![pick.index(0), pick.index(1)]
            })
            .collect()
    };

    let top = params.i_star + 1;
    let mut levels = Vec::new();
    for (size, sets) in [(1usize, &singles), (2usize, &pairs)] {
        let profiles: Vec<(Vec<usize>, u32)> = sets
            .par_iter()
            .map(|s| {
                let t = bfs_spheres(g, s).expect("sampled vertices are valid");
                ((0..=top).map(|i| t.sphere_size(i)).collect(), t.max_layer())
            })
            .collect();
        for level in 0..=top {
            levels.push(level_stats(params, multiplier, level, size, &profiles));
        }
    }
    let partial = levels.iter().any(|l| l.partial);
    if partial {
        log::warn!("expansion audit is partial: level {top} exceeds some sampled eccentricity");
    }
    Ok(ExpansionReport {
        n,
        d: params.d,
        measured_degree: measured,
        i_star: params.i_star,
        gamma: params.gamma,
        multiplier,
        levels,
        partial,
    })
}

fn level_stats(
    params: &RegimeParams,
    multiplier: f64,
    level: u32,
    size: usize,
    profiles: &[(Vec<usize>, u32)],
) -> LevelStats {
    let nf = params.n as f64;
    let sz = size as f64;
    let last = level == params.i_star + 1;
    let (predicted, scale, tolerance) = if last {
        let predicted =
            1.0 - (-sz * params.c).exp() - sz * params.d.powi(params.i_star as i32) / nf;
        let tol = multiplier * (params.gamma + nf.ln() / nf.sqrt());
        (predicted, nf, tol)
    } else {
        (
            1.0,
            sz * params.d.powi(level as i32),
            multiplier * params.gamma,
        )
    };
    let ratios: Vec<f64> = profiles
        .iter()
        .map(|(sizes, _)| sizes[level as usize] as f64 / scale)
        .collect();
    let count = ratios.len().max(1) as f64;
    let within = ratios
        .iter()
        .filter(|r| (*r - predicted).abs() <= tolerance)
        .count();
    LevelStats {
        level,
        set_size: size,
        predicted,
        tolerance,
        mean_ratio: ratios.iter().sum::<f64>() / count,
        min_ratio: ratios.iter().copied().fold(f64::INFINITY, f64::min),
        max_ratio: ratios.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        max_abs_deviation: ratios
            .iter()
            .map(|r| (r - predicted).abs())
            .fold(0.0, f64::max),
        within,
        within_fraction: within as f64 / count,
        partial: profiles.iter().any(|(_, ecc)| *ecc < level),
        ratios,
    }
}
