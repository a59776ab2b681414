//! Distance backends: a dense all-pairs matrix for small graphs and
//! per-sensor BFS rows for everything else.

use std::borrow::Cow;

use rayon::prelude::*;

use crate::error::{invalid, Error, Result};
use crate::graph::{bfs_distances, Diameter, Graph, UNREACHABLE};

/// Largest graph for which a dense `n x n` matrix is built.
pub const MATRIX_LIMIT: usize = 4096;

/// All-pairs BFS distances, row-major.
#[derive(Debug, Clone)]
pub struct DistanceMatrix {
    n: usize,
    data: Vec<u32>,
}

impl DistanceMatrix {
    pub fn new(g: &Graph) -> Result<Self> {
        let n = g.vertex_count();
        if n > MATRIX_LIMIT {
            return Err(Error::MatrixTooLarge {
                n,
                limit: MATRIX_LIMIT,
            });
        }
        let rows: Vec<Vec<u32>> = (0..n)
            .into_par_iter()
            .map(|v| bfs_distances(g, &[v]))
            .collect();
        Ok(Self {
            n,
            data: rows.concat(),
        })
    }

    #[inline]
    pub fn vertex_count(&self) -> usize {
        self.n
    }

    #[inline]
    pub(crate) fn row(&self, u: usize) -> &[u32] {
        &self.data[u * self.n..(u + 1) * self.n]
    }

    pub fn get(&self, u: usize, v: usize) -> Option<u32> {
        match self.data[u * self.n + v] {
            UNREACHABLE => None,
            d => Some(d),
        }
    }

    pub fn is_connected(&self) -> bool {
        !self.data.contains(&UNREACHABLE)
    }

    /// Largest finite entry.
    pub fn max_finite(&self) -> u32 {
        self.data
            .iter()
            .copied()
            .filter(|&d| d != UNREACHABLE)
            .max()
            .unwrap_or(0)
    }

    pub fn diameter(&self) -> Diameter {
        if self.is_connected() {
            Diameter::Finite(self.max_finite())
        } else {
            Diameter::Infinite
        }
    }
}

/// Distances from each member of an ordered sensor set `R` to every vertex.
#[derive(Debug, Clone)]
pub struct SensorDistances<'a> {
    n: usize,
    sensors: Vec<usize>,
    rows: Vec<Cow<'a, [u32]>>,
}

pub(crate) fn check_sensor_set(n: usize, sensors: &[usize]) -> Result<()> {
    if sensors.is_empty() {
        return Err(invalid("sensor set R is empty"));
    }
    let mut seen = vec![false; n];
    for &r in sensors {
        if r >= n {
            return Err(Error::VertexOutOfRange { vertex: r, n });
        }
        if std::mem::replace(&mut seen[r], true) {
            return Err(invalid(format!("vertex {r} listed twice in R")));
        }
    }
    Ok(())
}

impl SensorDistances<'static> {
    /// One BFS per sensor, `O(|R| (n + m))`.
    pub fn from_bfs(g: &Graph, sensors: &[usize]) -> Result<Self> {
        check_sensor_set(g.vertex_count(), sensors)?;
        let rows = sensors
            .par_iter()
            .map(|&r| Cow::Owned(bfs_distances(g, &[r])))
            .collect();
        Ok(Self {
            n: g.vertex_count(),
            sensors: sensors.to_vec(),
            rows,
        })
    }
}

impl<'a> SensorDistances<'a> {
    /// Borrows rows of a precomputed matrix.
    pub fn from_matrix(matrix: &'a DistanceMatrix, sensors: &[usize]) -> Result<Self> {
        check_sensor_set(matrix.vertex_count(), sensors)?;
        Ok(Self {
            n: matrix.vertex_count(),
            sensors: sensors.to_vec(),
            rows: sensors
                .iter()
                .map(|&r| Cow::Borrowed(matrix.row(r)))
                .collect(),
        })
    }

    #[inline]
    pub fn vertex_count(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn sensors(&self) -> &[usize] {
        &self.sensors
    }

    /// Raw row for the `i`-th sensor; [`UNREACHABLE`] marks other components.
    #[inline]
    pub(crate) fn row(&self, i: usize) -> &[u32] {
        &self.rows[i]
    }

    /// Largest finite distance from any sensor, and whether some vertex is
    /// unreachable from some sensor.
    pub(crate) fn extent(&self) -> (u32, bool) {
        let mut max = 0;
        let mut unreachable = false;
        for row in &self.rows {
            for &d in row.iter() {
                if d == UNREACHABLE {
                    unreachable = true;
                } else if d > max {
                    max = d;
                }
            }
        }
        (max, unreachable)
    }
}
