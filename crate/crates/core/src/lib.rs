//! Multiset resolving sets and the multiset metric dimension.
//!
//! A set `R` of vertices is *multiset resolving* when every vertex is
//! uniquely identified by the histogram of its distances to `R`. This crate
//! computes those histograms, verifies resolving sets of the metric,
//! multiset and outer-multiset kinds, solves the three dimensions exactly on
//! small graphs, builds resolving sets for binomial random graphs by
//! Bernoulli sampling, and evaluates the exponent function whose level sets
//! give the growth rates of the dimension on `G(n, p)`.

pub mod asymptotics;
pub mod census;
pub mod construction;
pub mod distance;
pub mod embedding;
pub mod error;
pub mod exact;
pub mod expansion;
pub mod gnp;
pub mod graph;
pub mod localization;
pub mod seed;
pub mod signature;

pub use distance::{DistanceMatrix, SensorDistances};
pub use error::{Error, Result};
pub use gnp::{generate_gnp, Density, RandomGraphSpec};
pub use graph::{bfs_spheres, diameter, predicted_diameter, Diameter, Graph, SphereTable};
pub use signature::{
    multiset_signature, verify_resolving, MultisetSignature, ResolvingKind, ResolvingVerdict,
};
