//! Vertex embeddings induced by signatures.

use serde::{Deserialize, Serialize};

use crate::distance::{DistanceMatrix, SensorDistances};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::signature::SignatureTable;

/// How far Euclidean distances between rows stray from graph distances,
/// over all unordered vertex pairs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Distortion {
    pub pairs: usize,
    pub mean_abs: f64,
    pub max_abs: f64,
    pub rms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Embedding {
    pub dim: usize,
    pub rows: Vec<Vec<f64>>,
    pub distortion: Distortion,
}

fn distortion(rows: &[Vec<f64>], matrix: &DistanceMatrix) -> Distortion {
    let n = rows.len();
    let (mut sum, mut sq, mut max, mut pairs) = (0.0, 0.0, 0.0f64, 0usize);
    for v in 0..n {
        for w in v + 1..n {
            let euclid = rows[v]
                .iter()
                .zip(&rows[w])
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt();
            let d = f64::from(matrix.get(v, w).expect("connected"));
            let err = (euclid - d).abs();
            sum += err;
            sq += err * err;
            max = max.max(err);
            pairs += 1;
        }
    }
    let denom = pairs.max(1) as f64;
    Distortion {
        pairs,
        mean_abs: sum / denom,
        max_abs: max,
        rms: (sq / denom).sqrt(),
    }
}

fn prepare(g: &Graph) -> Result<DistanceMatrix> {
    let matrix = DistanceMatrix::new(g)?;
    if !matrix.is_connected() {
        return Err(Error::Disconnected);
    }
    Ok(matrix)
}

/// Rows `m_R(v)` in `R^{diam + 1}`.
pub fn embed_multiset(g: &Graph, sensors: &[usize]) -> Result<Embedding> {
    let matrix = prepare(g)?;
    let dists = SensorDistances::from_matrix(&matrix, sensors)?;
    let dim = matrix.max_finite() as usize + 1;
    let table = SignatureTable::build(&dists, dim, false);
    let rows: Vec<Vec<f64>> = (0..g.vertex_count())
        .map(|v| table.raw(v).iter().map(|&c| f64::from(c)).collect())
        .collect();
    let distortion = distortion(&rows, &matrix);
    Ok(Embedding {
        dim,
        rows,
        distortion,
    })
}

/// Rows `s_R(v)` in `R^{|R|}`.
pub fn embed_metric(g: &Graph, sensors: &[usize]) -> Result<Embedding> {
    let matrix = prepare(g)?;
    let dists = SensorDistances::from_matrix(&matrix, sensors)?;
    let rows: Vec<Vec<f64>> = (0..g.vertex_count())
        .map(|v| {
            dists
                .sensors()
                .iter()
                .map(|&r| f64::from(matrix.get(r, v).expect("connected")))
                .collect()
        })
        .collect();
    let distortion = distortion(&rows, &matrix);
    Ok(Embedding {
        dim: sensors.len(),
        rows,
        distortion,
    })
}
