//! Exhaustive computation of the metric, outer multiset and multiset
//! dimensions on small graphs.
//!
//! Subsets are scanned by size, lexicographically within a size. Multiset
//! resolvability is not closed under supersets, so nothing is pruned: the
//! multiset dimension is reported infinite only after every non-empty subset
//! has failed. Each size class is checked in parallel and reduced to its
//! lexicographically first success, so witnesses and the examined-subset
//! counter do not depend on the number of worker threads.

use std::fmt;

use itertools::Itertools;
use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::distance::DistanceMatrix;
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::signature::{verify_resolving, ResolvingKind};

pub const DEFAULT_BUDGET: usize = 16;
/// Budgets above this are clamped; subsets are packed into `u32` masks and
/// signatures into `u128` keys.
pub const HARD_CAP: usize = 22;

const BITS: u32 = 5;
const INF_CODE: u128 = 31;

/// Finite size or "no such set".
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum MsValue {
    Finite(usize),
    Infinite,
}

impl MsValue {
    pub fn finite(self) -> Option<usize> {
        match self {
            MsValue::Finite(k) => Some(k),
            MsValue::Infinite => None,
        }
    }
}

impl fmt::Display for MsValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MsValue::Finite(k) => write!(f, "{k}"),
            MsValue::Infinite => f.write_str("inf"),
        }
    }
}

impl Serialize for MsValue {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            MsValue::Finite(k) => s.serialize_u64(*k as u64),
            MsValue::Infinite => s.serialize_str("inf"),
        }
    }
}

/// A minimum set for one kind, with the number of subsets a sequential scan
/// would have examined to find it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Optimum {
    pub size: usize,
    pub witness: Vec<usize>,
    pub subsets_examined: u64,
}

/// Outcome of the multiset search.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MsSearch {
    Found(Optimum),
    /// Every non-empty subset fails.
    Infinite {
        subsets_examined: u64,
    },
    /// Sizes below `at_least` were exhausted without success.
    AtLeast {
        at_least: usize,
        subsets_examined: u64,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Witnesses {
    pub beta: Vec<usize>,
    pub beta_ms_out: Vec<usize>,
    pub beta_ms: Option<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DimensionResult {
    pub beta: usize,
    pub beta_ms_out: usize,
    pub beta_ms: MsValue,
    pub witnesses: Witnesses,
    pub subsets_examined: u64,
}

/// Precomputed distances for repeated subset checks.
pub struct ExactSolver {
    n: usize,
    /// row-major, `INF_CODE` for other components
    dist: Vec<u8>,
    buckets: usize,
}

impl ExactSolver {
    /// Refuses graphs with more than `min(budget, HARD_CAP)` vertices.
    pub fn new(g: &Graph, budget: usize) -> Result<Self> {
        let n = g.vertex_count();
        let effective = budget.min(HARD_CAP);
        if budget > HARD_CAP {
            log::warn!("exhaustive budget {budget} clamped to the hard cap {HARD_CAP}");
        }
        if n > effective {
            return Err(Error::BudgetExceeded {
                n,
                budget: effective,
            });
        }
        if n > DEFAULT_BUDGET {
            log::warn!("exhaustive search on {n} vertices; this may take a while");
        }
        let matrix = DistanceMatrix::new(g)?;
        let mut dist = Vec::with_capacity(n * n);
        for u in 0..n {
            for v in 0..n {
                dist.push(matrix.get(u, v).map_or(INF_CODE as u8, |d| d as u8));
            }
        }
        // finite distances 0..=max, plus one slot for infinity
        let buckets = matrix.max_finite() as usize + 2;
        Ok(Self { n, dist, buckets })
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    #[inline]
    fn d(&self, u: usize, v: usize) -> u8 {
        self.dist[u * self.n + v]
    }

    fn key(&self, mask: u32, v: usize, kind: ResolvingKind) -> u128 {
        let mut key = 0u128;
        match kind {
            ResolvingKind::Metric => {
                let mut m = mask;
                while m != 0 {
                    let r = m.trailing_zeros() as usize;
                    key = (key << BITS) | u128::from(self.d(r, v));
                    m &= m - 1;
                }
            }
            _ => {
                let mut m = mask;
                while m != 0 {
                    let r = m.trailing_zeros() as usize;
                    let d = self.d(r, v);
                    let slot = if u128::from(d) == INF_CODE {
                        self.buckets - 1
                    } else {
                        d as usize
                    };
                    key += 1u128 << (BITS as usize * slot);
                    m &= m - 1;
                }
            }
        }
        key
    }

    /// Whether the vertex set encoded by `mask` is resolving of `kind`.
    pub fn is_resolving(&self, mask: u32, kind: ResolvingKind) -> bool {
        let mut keys = [0u128; HARD_CAP];
        let mut len = 0;
        for v in 0..self.n {
            if kind == ResolvingKind::OuterMultiset && mask & (1 << v) != 0 {
                continue;
            }
            keys[len] = self.key(mask, v, kind);
            len += 1;
        }
        let keys = &mut keys[..len];
        keys.sort_unstable();
        keys.windows(2).all(|w| w[0] != w[1])
    }

    /// Smallest resolving set of `kind` with size in `sizes`, and the number
    /// of subsets examined in sequential order.
    fn scan(
        &self,
        kind: ResolvingKind,
        sizes: std::ops::RangeInclusive<usize>,
    ) -> (Option<Vec<usize>>, u64) {
        let mut examined = 0u64;
        for k in sizes {
            let masks: Vec<u32> = (0..self.n)
                .combinations(k)
                .map(|c| c.iter().fold(0u32, |m, &v| m | (1 << v)))
                .collect();
            match masks
                .par_iter()
                .position_first(|&m| self.is_resolving(m, kind))
            {
                Some(i) => {
                    examined += i as u64 + 1;
                    return (Some(mask_to_vec(masks[i])), examined);
                }
                None => examined += masks.len() as u64,
            }
        }
        (None, examined)
    }
}

fn mask_to_vec(mut m: u32) -> Vec<usize> {
    let mut out = Vec::with_capacity(m.count_ones() as usize);
    while m != 0 {
        out.push(m.trailing_zeros() as usize);
        m &= m - 1;
    }
    out
}

fn trivial(n: usize) -> Option<Optimum> {
    (n <= 1).then(|| Optimum {
        size: 0,
        witness: Vec::new(),
        subsets_examined: 0,
    })
}

/// Metric dimension `beta(G)`.
pub fn beta_exact(g: &Graph, budget: usize) -> Result<Optimum> {
    let solver = ExactSolver::new(g, budget)?;
    Ok(metric_on(&solver))
}

fn metric_on(s: &ExactSolver) -> Optimum {
    if let Some(t) = trivial(s.n) {
        return t;
    }
    let (w, examined) = s.scan(ResolvingKind::Metric, 1..=s.n);
    let witness = w.expect("V minus one vertex is always metric resolving");
    Optimum {
        size: witness.len(),
        witness,
        subsets_examined: examined,
    }
}

/// Outer multiset dimension; always at most `n - 1`.
pub fn beta_ms_out_exact(g: &Graph, budget: usize) -> Result<Optimum> {
    let solver = ExactSolver::new(g, budget)?;
    Ok(outer_on(&solver))
}

fn outer_on(s: &ExactSolver) -> Optimum {
    if let Some(t) = trivial(s.n) {
        return t;
    }
    let (w, examined) = s.scan(ResolvingKind::OuterMultiset, 1..=s.n - 1);
    let witness = w.expect("any n - 1 vertices are outer multiset resolving");
    Optimum {
        size: witness.len(),
        witness,
        subsets_examined: examined,
    }
}

/// Multiset dimension, searching sizes up to `max_size` (all sizes when
/// `None`). Only a full search can report [`MsSearch::Infinite`].
pub fn beta_ms_search(g: &Graph, budget: usize, max_size: Option<usize>) -> Result<MsSearch> {
    let solver = ExactSolver::new(g, budget)?;
    Ok(multiset_on(&solver, max_size))
}

fn multiset_on(s: &ExactSolver, max_size: Option<usize>) -> MsSearch {
    if let Some(t) = trivial(s.n) {
        return MsSearch::Found(t);
    }
    let top = max_size.unwrap_or(s.n).min(s.n);
    let (w, examined) = s.scan(ResolvingKind::Multiset, 1..=top);
    match w {
        Some(witness) => MsSearch::Found(Optimum {
            size: witness.len(),
            witness,
            subsets_examined: examined,
        }),
        None if top == s.n => MsSearch::Infinite {
            subsets_examined: examined,
        },
        None => MsSearch::AtLeast {
            at_least: top + 1,
            subsets_examined: examined,
        },
    }
}

/// Multiset dimension `beta_ms(G)` with its witness; `Infinite` only after
/// all `2^n - 1` subsets fail.
pub fn beta_ms_exact(g: &Graph, budget: usize) -> Result<(MsValue, Option<Optimum>)> {
    match beta_ms_search(g, budget, None)? {
        MsSearch::Found(o) => Ok((MsValue::Finite(o.size), Some(o))),
        MsSearch::Infinite { .. } => Ok((MsValue::Infinite, None)),
        MsSearch::AtLeast { .. } => unreachable!("full search never stops early"),
    }
}

/// All three dimensions, with witnesses re-verified through the signature
/// engine and the chain `beta_ms >= beta_ms_out >= beta` checked.
pub fn dimension_report(g: &Graph, budget: usize) -> Result<DimensionResult> {
    let solver = ExactSolver::new(g, budget)?;
    let beta = metric_on(&solver);
    let outer = outer_on(&solver);
    let ms = multiset_on(&solver, None);
    let (ms_value, ms_opt, ms_examined) = match ms {
        MsSearch::Found(o) => (
            MsValue::Finite(o.size),
            Some(o.witness.clone()),
            o.subsets_examined,
        ),
        MsSearch::Infinite { subsets_examined } => (MsValue::Infinite, None, subsets_examined),
        MsSearch::AtLeast { .. } => unreachable!(),
    };

    if g.vertex_count() >= 2 {
        for (set, kind) in [
            (Some(&beta.witness), ResolvingKind::Metric),
            (Some(&outer.witness), ResolvingKind::OuterMultiset),
            (ms_opt.as_ref(), ResolvingKind::Multiset),
        ] {
            if let Some(set) = set {
                let verdict = verify_resolving(g, set, kind)?;
                assert!(
                    verdict.resolving,
                    "{kind} witness {set:?} failed re-verification"
                );
            }
        }
    }
    assert!(
        outer.size >= beta.size,
        "chain violated: beta_ms_out < beta"
    );
    if let MsValue::Finite(k) = ms_value {
        assert!(k >= outer.size, "chain violated: beta_ms < beta_ms_out");
    }

    Ok(DimensionResult {
        beta: beta.size,
        beta_ms_out: outer.size,
        beta_ms: ms_value,
        witnesses: Witnesses {
            beta: beta.witness,
            beta_ms_out: outer.witness,
            beta_ms: ms_opt,
        },
        subsets_examined: beta.subsets_examined + outer.subsets_examined + ms_examined,
    })
}

/// A multiset resolving set `R` and a vertex `u` such that `R + u` is not
/// multiset resolving, searching `R` in the solver's order.
pub fn nonmonotone_witness(g: &Graph, budget: usize) -> Result<Option<(Vec<usize>, usize)>> {
    let s = ExactSolver::new(g, budget)?;
    let n = s.n;
    for k in 1..n {
        for combo in (0..n).combinations(k) {
            let mask = combo.iter().fold(0u32, |m, &v| m | (1 << v));
            if !s.is_resolving(mask, ResolvingKind::Multiset) {
                continue;
            }
            if let Some(u) = (0..n)
                .filter(|&u| mask & (1 << u) == 0)
                .find(|&u| !s.is_resolving(mask | (1 << u), ResolvingKind::Multiset))
            {
                return Ok(Some((combo, u)));
            }
        }
    }
    Ok(None)
}
