//! Randomized construction of multiset resolving sets.
//!
//! Each vertex joins the candidate independently with probability `r / n`.
//! A candidate that fails verification is discarded and `r` is multiplied by
//! the growth factor for the next round. Every returned set is re-verified on
//! a separate distance backend before it is reported.

use rand::distr::{Bernoulli, Distribution};
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::asymptotics::y4;
use crate::distance::{DistanceMatrix, SensorDistances, MATRIX_LIMIT};
use crate::error::{invalid, Error, Result};
use crate::graph::Graph;
use crate::seed::{substream, Domain};
use crate::signature::{verify_resolving, verify_with, ResolvingKind};

pub const DEFAULT_GROWTH: f64 = 2.0;
pub const DEFAULT_MAX_ROUNDS: u32 = 12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CandidateSpec {
    /// expected candidate size
    pub r: f64,
    pub growth: f64,
    pub max_rounds: u32,
    pub seed: u64,
}

impl CandidateSpec {
    pub fn new(r: f64, seed: u64) -> Self {
        Self {
            r,
            growth: DEFAULT_GROWTH,
            max_rounds: DEFAULT_MAX_ROUNDS,
            seed,
        }
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        if !(self.r > 0.0 && self.r <= n as f64) {
            return Err(invalid(format!("r = {} outside (0, {n}]", self.r)));
        }
        if !self.growth.is_finite() || self.growth <= 1.0 {
            return Err(invalid(format!("growth = {} must exceed 1", self.growth)));
        }
        if self.max_rounds == 0 {
            return Err(invalid("max_rounds must be at least 1"));
        }
        Ok(())
    }
}

/// Starting size: `n^{y4(x)}` for `x <= 1/8`, `sqrt(n)` otherwise or when
/// `x` is unknown.
pub fn default_initial_r(n: usize, x: Option<f64>) -> f64 {
    let nf = n as f64;
    match x.map(y4) {
        Some(Ok(y)) => nf.powf(y).min(nf),
        _ => nf.sqrt(),
    }
}

fn bernoulli_subset<R: Rng>(n: usize, r: f64, rng: &mut R) -> Vec<usize> {
    let p = (r / n as f64).clamp(0.0, 1.0);
    let coin = Bernoulli::new(p).expect("probability clamped to [0, 1]");
    (0..n).filter(|_| coin.sample(rng)).collect()
}

/// One Bernoulli(`r / n`) subset drawn from the spec's first candidate
/// stream. May be empty.
pub fn sample_candidate(g: &Graph, spec: &CandidateSpec) -> Result<Vec<usize>> {
    let n = g.vertex_count();
    spec.validate(n)?;
    let mut rng = substream(spec.seed, Domain::Candidate, 0);
    Ok(bernoulli_subset(n, spec.r, &mut rng))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoundRecord {
    pub round: u32,
    pub r: f64,
    pub sample_size: usize,
    pub verdict: bool,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub witness: Option<(usize, usize)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstructionReport {
    /// verified multiset resolving set, if any round succeeded
    pub resolving_set: Option<Vec<usize>>,
    pub rounds_used: u32,
    pub rounds: Vec<RoundRecord>,
    /// collision from the last failed round
    pub last_witness: Option<(usize, usize)>,
}

impl ConstructionReport {
    pub fn succeeded(&self) -> bool {
        self.resolving_set.is_some()
    }
}

enum Backend {
    Matrix(DistanceMatrix),
    Bfs,
}

impl Backend {
    fn for_graph(g: &Graph) -> Result<Self> {
        if g.vertex_count() <= MATRIX_LIMIT {
            Ok(Backend::Matrix(DistanceMatrix::new(g)?))
        } else {
            Ok(Backend::Bfs)
        }
    }

    /// `Ok(None)` when resolving, else the first colliding pair; empty sets
    /// fail without a witness.
    fn check(
        &self,
        g: &Graph,
        set: &[usize],
    ) -> Result<std::result::Result<(), Option<(usize, usize)>>> {
        if set.is_empty() {
            return Ok(Err(None));
        }
        let verdict = match self {
            Backend::Matrix(m) => verify_with(
                &SensorDistances::from_matrix(m, set)?,
                ResolvingKind::Multiset,
            ),
            Backend::Bfs => {
                verify_with(&SensorDistances::from_bfs(g, set)?, ResolvingKind::Multiset)
            }
        };
        if verdict.resolving {
            Ok(Ok(()))
        } else {
            Ok(Err(verdict.witness.map(|c| (c.v, c.w))))
        }
    }
}

/// Sample, verify, grow `r` on failure, for at most `max_rounds` rounds.
pub fn construct_resolving(g: &Graph, spec: &CandidateSpec) -> Result<ConstructionReport> {
    let n = g.vertex_count();
    spec.validate(n)?;
    if !g.is_connected() {
        return Err(Error::Disconnected);
    }
    let backend = Backend::for_graph(g)?;
    let mut r = spec.r;
    let mut rounds = Vec::new();
    let mut last_witness = None;
    for round in 0..spec.max_rounds {
        let mut rng = substream(spec.seed, Domain::Candidate, u64::from(round));
        let set = bernoulli_subset(n, r, &mut rng);
        let outcome = backend.check(g, &set)?;
        let witness = outcome.err().flatten();
        rounds.push(RoundRecord {
            round: round + 1,
            r,
            sample_size: set.len(),
            verdict: outcome.is_ok(),
            witness,
        });
        log::debug!(
            "round {} r = {r:.3} |R| = {} ok = {}",
            round + 1,
            set.len(),
            outcome.is_ok()
        );
        if outcome.is_ok() {
            let recheck = verify_resolving(g, &set, ResolvingKind::Multiset)?;
            assert!(recheck.resolving, "constructed set failed re-verification");
            return Ok(ConstructionReport {
                resolving_set: Some(set),
                rounds_used: round + 1,
                rounds,
                last_witness: None,
            });
        }
        last_witness = witness.or(last_witness);
        r = (r * spec.growth).min(n as f64);
    }
    Ok(ConstructionReport {
        resolving_set: None,
        rounds_used: spec.max_rounds,
        rounds,
        last_witness,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FailureEstimate {
    pub trials: u64,
    pub failures: u64,
    pub rate: f64,
}

/// Fraction of independent Bernoulli(`r / n`) samples that are not multiset
/// resolving. Empty samples count as failures.
pub fn estimate_failure_rate(g: &Graph, r: f64, trials: u64, seed: u64) -> Result<FailureEstimate> {
    let n = g.vertex_count();
    if trials == 0 {
        return Err(invalid("trials must be at least 1"));
    }
    if !(r > 0.0 && r <= n as f64) {
        return Err(invalid(format!("r = {r} outside (0, {n}]")));
    }
    let backend = Backend::for_graph(g)?;
    let failures = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = substream(seed, Domain::FailureTrial, t);
            let set = bernoulli_subset(n, r, &mut rng);
            backend.check(g, &set).map(|o| u64::from(o.is_err()))
        })
        .try_reduce(|| 0, |a, b| Ok(a + b))?;
    Ok(FailureEstimate {
        trials,
        failures,
        rate: failures as f64 / trials as f64,
    })
}
