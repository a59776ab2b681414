//! Metric and multiset signatures, and resolving-set verification.
//!
//! A multiset signature is stored as a fixed-length count vector
//! `(|S_0^R(v)|, ..., |S_L^R(v)|)`, with one extra trailing coordinate
//! counting sensors in other components when the graph is disconnected.
//! Verification hashes these vectors and re-derives any colliding pair
//! directly from the distance rows before reporting it.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::distance::{check_sensor_set, SensorDistances};
use crate::error::Result;
use crate::graph::{max_finite_distance, Graph, UNREACHABLE};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ResolvingKind {
    Metric,
    Multiset,
    OuterMultiset,
}

impl fmt::Display for ResolvingKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ResolvingKind::Metric => "metric",
            ResolvingKind::Multiset => "multiset",
            ResolvingKind::OuterMultiset => "outer-multiset",
        })
    }
}

impl std::str::FromStr for ResolvingKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "metric" => Ok(Self::Metric),
            "multiset" => Ok(Self::Multiset),
            "outer-multiset" | "outer" => Ok(Self::OuterMultiset),
            other => Err(format!("unknown resolving kind `{other}`")),
        }
    }
}

/// `m_R(v)`: how many sensors sit at each distance from `v`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MultisetSignature {
    /// `counts[k] = |S_k^R(v)|`
    pub counts: Vec<u32>,
    /// Sensors in a different component; `Some` only for disconnected graphs.
    pub unreachable: Option<u32>,
}

impl MultisetSignature {
    pub fn total(&self) -> u32 {
        self.counts.iter().sum::<u32>() + self.unreachable.unwrap_or(0)
    }

    /// `|N_i^R(v)|`
    pub fn ball_count(&self, i: usize) -> u32 {
        self.counts.iter().take(i + 1).sum()
    }

    /// Coordinates as written in dumps: finite part then the infinity slot.
    pub fn coordinates(&self) -> Vec<u32> {
        let mut out = self.counts.clone();
        out.extend(self.unreachable);
        out
    }
}

/// `s_R(v)`: distances to the sensors in the order given; `None` = infinite.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MetricSignature {
    pub dists: Vec<Option<u32>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum SignatureValue {
    Metric(MetricSignature),
    Multiset(MultisetSignature),
}

/// A pair `v < w` whose signatures coincide.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Collision {
    pub v: usize,
    pub w: usize,
    pub signature: SignatureValue,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResolvingVerdict {
    pub kind: ResolvingKind,
    pub resolving: bool,
    pub witness: Option<Collision>,
}

impl ResolvingVerdict {
    fn resolved(kind: ResolvingKind) -> Self {
        Self {
            kind,
            resolving: true,
            witness: None,
        }
    }

    fn collided(kind: ResolvingKind, c: Collision) -> Self {
        Self {
            kind,
            resolving: false,
            witness: Some(c),
        }
    }
}

/// Flat table of multiset signatures for every vertex.
#[derive(Debug, Clone)]
pub struct SignatureTable {
    n: usize,
    finite_len: usize,
    with_infinity: bool,
    counts: Vec<u32>,
}

impl SignatureTable {
    /// Builds `m_R(v)` for all `v` with `finite_len` finite coordinates.
    /// `finite_len` must exceed every finite sensor distance.
    pub fn build(sensors: &SensorDistances<'_>, finite_len: usize, with_infinity: bool) -> Self {
        let n = sensors.vertex_count();
        let width = finite_len + usize::from(with_infinity);
        let mut counts = vec![0u32; n * width];
        for i in 0..sensors.sensors().len() {
            for (v, &d) in sensors.row(i).iter().enumerate() {
                let slot = if d == UNREACHABLE {
                    finite_len
                } else {
                    d as usize
                };
                counts[v * width + slot] += 1;
            }
        }
        Self {
            n,
            finite_len,
            with_infinity,
            counts,
        }
    }

    /// Width from the sensors' own extent; enough for comparisons.
    pub fn compact(sensors: &SensorDistances<'_>) -> Self {
        let (max, unreachable) = sensors.extent();
        Self::build(sensors, max as usize + 1, unreachable)
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    fn width(&self) -> usize {
        self.finite_len + usize::from(self.with_infinity)
    }

    #[inline]
    pub fn raw(&self, v: usize) -> &[u32] {
        let w = self.width();
        &self.counts[v * w..(v + 1) * w]
    }

    pub fn signature(&self, v: usize) -> MultisetSignature {
        let raw = self.raw(v);
        MultisetSignature {
            counts: raw[..self.finite_len].to_vec(),
            unreachable: self.with_infinity.then(|| raw[self.finite_len]),
        }
    }
}

fn direct_multiset(
    sensors: &SensorDistances<'_>,
    v: usize,
    finite_len: usize,
    inf: bool,
) -> MultisetSignature {
    let mut counts = vec![0u32; finite_len];
    let mut unreachable = 0;
    for i in 0..sensors.sensors().len() {
        match sensors.row(i)[v] {
            UNREACHABLE => unreachable += 1,
            d => counts[d as usize] += 1,
        }
    }
    MultisetSignature {
        counts,
        unreachable: inf.then_some(unreachable),
    }
}

fn direct_metric(sensors: &SensorDistances<'_>, v: usize) -> MetricSignature {
    MetricSignature {
        dists: (0..sensors.sensors().len())
            .map(|i| match sensors.row(i)[v] {
                UNREACHABLE => None,
                d => Some(d),
            })
            .collect(),
    }
}

/// `m_R(v)` with the full `diam(G) + 1` coordinates (plus the infinity slot
/// when `g` is disconnected).
pub fn multiset_signature(g: &Graph, sensors: &[usize], v: usize) -> Result<MultisetSignature> {
    g.check_vertex(v)?;
    let dists = SensorDistances::from_bfs(g, sensors)?;
    let len = max_finite_distance(g) as usize + 1;
    Ok(direct_multiset(&dists, v, len, !g.is_connected()))
}

/// `m_R(v)` for every vertex, `diam(G) + 1` coordinates each.
pub fn multiset_signatures(g: &Graph, sensors: &[usize]) -> Result<Vec<MultisetSignature>> {
    let dists = SensorDistances::from_bfs(g, sensors)?;
    let table = SignatureTable::build(
        &dists,
        max_finite_distance(g) as usize + 1,
        !g.is_connected(),
    );
    Ok((0..g.vertex_count()).map(|v| table.signature(v)).collect())
}

/// `s_R(v)` in the order of `sensors`.
pub fn metric_signature(g: &Graph, sensors: &[usize], v: usize) -> Result<MetricSignature> {
    g.check_vertex(v)?;
    let dists = SensorDistances::from_bfs(g, sensors)?;
    Ok(direct_metric(&dists, v))
}

/// Checks whether `sensors` is resolving of the given kind, using one BFS
/// per sensor.
pub fn verify_resolving(
    g: &Graph,
    sensors: &[usize],
    kind: ResolvingKind,
) -> Result<ResolvingVerdict> {
    let dists = SensorDistances::from_bfs(g, sensors)?;
    Ok(verify_with(&dists, kind))
}

/// Verification over precomputed sensor distances.
pub fn verify_with(sensors: &SensorDistances<'_>, kind: ResolvingKind) -> ResolvingVerdict {
    let n = sensors.vertex_count();
    match kind {
        ResolvingKind::Metric => {
            let mut seen: HashMap<Vec<u32>, usize> = HashMap::with_capacity(n);
            for v in 0..n {
                let key: Vec<u32> = (0..sensors.sensors().len())
                    .map(|i| sensors.row(i)[v])
                    .collect();
                if let Some(&u) = seen.get(&key) {
                    let (a, b) = (direct_metric(sensors, u), direct_metric(sensors, v));
                    assert_eq!(a, b, "hashed metric collision failed direct re-check");
                    return ResolvingVerdict::collided(
                        kind,
                        Collision {
                            v: u,
                            w: v,
                            signature: SignatureValue::Metric(a),
                        },
                    );
                }
                seen.insert(key, v);
            }
            ResolvingVerdict::resolved(kind)
        }
        ResolvingKind::Multiset | ResolvingKind::OuterMultiset => {
            let table = SignatureTable::compact(sensors);
            let is_sensor = {
                let mut mask = vec![false; n];
                for &r in sensors.sensors() {
                    mask[r] = true;
                }
                mask
            };
            let mut seen: HashMap<&[u32], usize> = HashMap::with_capacity(n);
            for v in 0..n {
                if kind == ResolvingKind::OuterMultiset && is_sensor[v] {
                    continue;
                }
                let key = table.raw(v);
                if let Some(&u) = seen.get(key) {
                    let len = table.finite_len;
                    let a = direct_multiset(sensors, u, len, table.with_infinity);
                    let b = direct_multiset(sensors, v, len, table.with_infinity);
                    assert_eq!(a, b, "hashed multiset collision failed direct re-check");
                    return ResolvingVerdict::collided(
                        kind,
                        Collision {
                            v: u,
                            w: v,
                            signature: SignatureValue::Multiset(a),
                        },
                    );
                }
                seen.insert(key, v);
            }
            ResolvingVerdict::resolved(kind)
        }
    }
}

/// All-pairs reference check. Multisets are compared as sorted distance
/// lists rather than count vectors. Quadratic; meant for small graphs and
/// tests. Returns the lexicographically first colliding pair, if any.
pub fn verify_resolving_naive(
    g: &Graph,
    sensors: &[usize],
    kind: ResolvingKind,
) -> Result<Option<(usize, usize)>> {
    check_sensor_set(g.vertex_count(), sensors)?;
    let n = g.vertex_count();
    let rows: Vec<Vec<Option<u32>>> = sensors
        .iter()
        .map(|&r| {
            let t = crate::graph::bfs_spheres(g, &[r]).expect("validated sensor");
            (0..n).map(|v| t.distance(v)).collect()
        })
        .collect();
    let sig = |v: usize| -> Vec<Option<u32>> {
        let mut s: Vec<_> = rows.iter().map(|row| row[v]).collect();
        if kind != ResolvingKind::Metric {
            s.sort();
        }
        s
    };
    let skip = |v: usize| kind == ResolvingKind::OuterMultiset && sensors.contains(&v);
    for v in 0..n {
        if skip(v) {
            continue;
        }
        for w in v + 1..n {
            if !skip(w) && sig(v) == sig(w) {
                return Ok(Some((v, w)));
            }
        }
    }
    Ok(None)
}
