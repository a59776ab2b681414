//! Splittable seed derivation.
//!
//! Every random stream is a ChaCha8 generator keyed by
//! `(master seed, domain tag)` and selected by a 64-bit stream index (the
//! row of the adjacency triangle, the trial number, ...). Streams depend only
//! on these three values, so work can be split across any number of threads
//! without changing the output.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Purpose of a derived stream. Keeps e.g. graph rows and trial `i`
/// of a campaign from sharing bits.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Domain {
    GraphRow = 1,
    Candidate = 2,
    FailureTrial = 3,
    ExpansionSample = 4,
    CensusSensors = 5,
    Campaign = 6,
    Localize = 7,
}

pub fn substream(master: u64, domain: Domain, index: u64) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&master.to_le_bytes());
    key[8..16].copy_from_slice(&(domain as u64).to_le_bytes());
    let mut rng = ChaCha8Rng::from_seed(key);
    rng.set_stream(index);
    rng
}

/// A child master seed, for nesting a seeded operation inside a trial.
pub fn child_seed(master: u64, domain: Domain, index: u64) -> u64 {
    use rand::RngCore;
    substream(master, domain, index).next_u64()
}
