//! Typicality census for a sensor set.
//!
//! With `r = |R|` and top level `k`, a vertex `v` is `i`-atypical when
//! `|N_i^R(v)| >= max{2(k+1)|N_i(v)| r / n, 1}`, where `N_i^R(v)` is the set
//! of sensors within distance `i` of `v`. Vertices atypical at no level are
//! typical. A typical vertex can take at most `max{ceil(T), 1}` values in
//! coordinate `i`, so the product of these counts bounds the number of
//! distinct truncated signatures among typical vertices.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::distance::SensorDistances;
use crate::error::{invalid, Error, Result};
use crate::graph::{Graph, UNREACHABLE};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CensusLevel {
    pub level: u32,
    pub atypical: usize,
    /// `max{ceil(T_i(v)), 1}` maximized over typical `v`
    pub allowed_coords: u64,
    /// `sum over atypical v of |N_i^R(v)|`
    pub pairs_from_atypical: u64,
    /// `sum over sensors s of |N_i(s) ∩ A_i|`
    pub pairs_from_sensors: u64,
    /// `sum over sensors s of |N_i(s)|`
    pub sensor_ball_total: u64,
    /// `n / (2(k+1)) * max_{s in R} |N_i(s)| / min_{w in A_i} |N_i(w)|`
    pub count_bound: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TypicalityReport {
    pub n: usize,
    pub sensors: usize,
    pub k: u32,
    pub diameter: u32,
    pub levels: Vec<CensusLevel>,
    pub typical: usize,
    /// product of `allowed_coords`, saturating
    pub signature_bound: u64,
    /// `signature_bound < typical`
    pub bound_exceeded: bool,
    /// bound exceeded and levels `0..=k` determine the full signature
    pub collision_forced: bool,
}

impl TypicalityReport {
    pub fn atypical_fraction(&self, level: u32) -> f64 {
        self.levels[level as usize].atypical as f64 / self.n as f64
    }

    /// Both sides of the pair count agree, are bounded by the sensor balls,
    /// and each atypical count respects its count bound.
    pub fn double_count_holds(&self) -> bool {
        self.levels.iter().all(|l| {
            l.pairs_from_atypical == l.pairs_from_sensors
                && l.pairs_from_atypical <= l.sensor_ball_total
                && l.atypical as f64 <= l.count_bound * (1.0 + 1e-12)
        })
    }
}

/// Ball sizes `|N_i(v)|` for `i = 0..=k` and the eccentricity of `v`.
fn ball_profile(
    g: &Graph,
    v: usize,
    k: u32,
    dist: &mut [u32],
    queue: &mut Vec<u32>,
) -> (Vec<u64>, u32) {
    dist.fill(UNREACHABLE);
    queue.clear();
    dist[v] = 0;
    queue.push(v as u32);
    let mut sizes = vec![0u64; k as usize + 1];
    let mut head = 0;
    let mut ecc = 0;
    while head < queue.len() {
        let u = queue[head] as usize;
        head += 1;
        let du = dist[u];
        ecc = ecc.max(du);
        if du <= k {
            sizes[du as usize] += 1;
        }
        for &w in g.neighbors(u) {
            if dist[w as usize] == UNREACHABLE {
                dist[w as usize] = du + 1;
                queue.push(w);
            }
        }
    }
    for i in 1..sizes.len() {
        sizes[i] += sizes[i - 1];
    }
    (sizes, ecc)
}

/// Flat table, `levels * v + i` holding `|N_i^R(v)|` for `i <= k`.
fn sensor_ball_table(sd: &SensorDistances<'_>, k: u32) -> Vec<u64> {
    let n = sd.vertex_count();
    let levels_len = k as usize + 1;
    let mut table = vec![0u64; n * levels_len];
    for s in 0..sd.sensors().len() {
        for (v, &d) in sd.row(s).iter().enumerate() {
            if d <= k {
                table[v * levels_len + d as usize] += 1;
            }
        }
    }
    for row in table.chunks_mut(levels_len) {
        for i in 1..levels_len {
            row[i] += row[i - 1];
        }
    }
    table
}

/// `|N_i^R(v)|` for every vertex `v` and `i = 0..=k`.
pub fn sensor_ball_counts(g: &Graph, sensors: &[usize], k: u32) -> Result<Vec<Vec<u64>>> {
    let sd = SensorDistances::from_bfs(g, sensors)?;
    let levels_len = k as usize + 1;
    Ok(sensor_ball_table(&sd, k)
        .chunks(levels_len)
        .map(<[u64]>::to_vec)
        .collect())
}

/// Census of `R` at levels `0..=k`. Requires a connected graph and
/// `k <= diam(G)`.
pub fn typicality_census(g: &Graph, sensors: &[usize], k: u32) -> Result<TypicalityReport> {
    let n = g.vertex_count();
    let sd = SensorDistances::from_bfs(g, sensors)?;
    if !g.is_connected() {
        return Err(Error::Disconnected);
    }
    if n == 0 {
        return Err(invalid("census needs a non-empty graph"));
    }

    let profiles: Vec<(Vec<u64>, u32)> = (0..n)
        .into_par_iter()
        .map_init(
            || (vec![UNREACHABLE; n], Vec::with_capacity(n)),
            |(dist, queue), v| ball_profile(g, v, k, dist, queue),
        )
        .collect();
    let diameter = profiles.iter().map(|p| p.1).max().unwrap_or(0);
    if k > diameter {
        return Err(Error::LevelExceedsDiameter { k, diameter });
    }

    let levels_len = k as usize + 1;
    let sensor_balls = sensor_ball_table(&sd, k);

    let r = sensors.len() as f64;
    let scale = 2.0 * f64::from(k + 1) * r / n as f64;
    let threshold = |v: usize, i: usize| (scale * profiles[v].0[i] as f64).max(1.0);
    let atypical_at =
        |v: usize, i: usize| sensor_balls[v * levels_len + i] as f64 >= threshold(v, i);

    let typical: Vec<usize> = (0..n)
        .filter(|&v| (0..levels_len).all(|i| !atypical_at(v, i)))
        .collect();

    let mut levels = Vec::with_capacity(levels_len);
    for i in 0..levels_len {
        let atypical: Vec<bool> = (0..n).map(|v| atypical_at(v, i)).collect();
        let count = atypical.iter().filter(|&&a| a).count();
        let pairs_from_atypical: u64 = (0..n)
            .filter(|&v| atypical[v])
            .map(|v| sensor_balls[v * levels_len + i])
            .sum();
        let pairs_from_sensors: u64 = (0..sensors.len())
            .map(|s| {
                sd.row(s)
                    .iter()
                    .enumerate()
                    .filter(|&(v, &d)| d as usize <= i && atypical[v])
                    .count() as u64
            })
            .sum();
        let sensor_ball_total: u64 = sensors.iter().map(|&s| profiles[s].0[i]).sum();
        let max_sensor_ball = sensors.iter().map(|&s| profiles[s].0[i]).max().unwrap_or(0);
        let min_atypical_ball = (0..n)
            .filter(|&v| atypical[v])
            .map(|v| profiles[v].0[i])
            .min();
        let count_bound = match min_atypical_ball {
            Some(m) => n as f64 / (2.0 * f64::from(k + 1)) * max_sensor_ball as f64 / m as f64,
            None => 0.0,
        };
        let allowed_coords = typical
            .iter()
            .map(|&v| threshold(v, i).ceil() as u64)
            .max()
            .unwrap_or(1)
            .max(1);
        levels.push(CensusLevel {
            level: i as u32,
            atypical: count,
            allowed_coords,
            pairs_from_atypical,
            pairs_from_sensors,
            sensor_ball_total,
            count_bound,
        });
    }

    let signature_bound = levels
        .iter()
        .fold(1u64, |acc, l| acc.saturating_mul(l.allowed_coords));
    let bound_exceeded = signature_bound < typical.len() as u64;
    Ok(TypicalityReport {
        n,
        sensors: sensors.len(),
        k,
        diameter,
        typical: typical.len(),
        signature_bound,
        bound_exceeded,
        // |N_diam^R| = |R| always, so levels up to diam - 1 fix the signature
        collision_forced: bound_exceeded && k + 1 >= diameter,
        levels,
    })
}
