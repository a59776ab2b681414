//! Locating the source of a deterministic spread from sensor counts.
//!
//! Infection starts at `v0` and reaches every neighbour of an infected vertex
//! one step later, so the infection time of `w` is `d(v0, w)`. Each sensor
//! fires once, when it is infected, and the observer only sees how many
//! sensors fire at each time step.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::distance::{check_sensor_set, SensorDistances};
use crate::error::{Error, Result};
use crate::graph::{bfs_spheres, max_finite_distance, Graph};
use crate::signature::SignatureTable;

/// `counts[t]` sensors fired at time `t`, for `t = 0..=diam`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Observation {
    pub counts: Vec<u32>,
}

impl Observation {
    pub fn total(&self) -> u64 {
        self.counts.iter().map(|&c| u64::from(c)).sum()
    }
}

fn require_connected(g: &Graph) -> Result<()> {
    if g.is_connected() {
        Ok(())
    } else {
        Err(Error::Disconnected)
    }
}

/// Infection time of every vertex.
pub fn spread(g: &Graph, v0: usize) -> Result<Vec<u32>> {
    g.check_vertex(v0)?;
    require_connected(g)?;
    let t = bfs_spheres(g, &[v0])?;
    Ok((0..g.vertex_count())
        .map(|w| t.distance(w).expect("connected"))
        .collect())
}

/// Precomputed observations for every candidate source.
pub struct Localizer {
    sensors: Vec<usize>,
    table: SignatureTable,
    index: HashMap<Vec<u32>, Vec<usize>>,
}

impl Localizer {
    pub fn new(g: &Graph, sensors: &[usize]) -> Result<Self> {
        require_connected(g)?;
        let sd = SensorDistances::from_bfs(g, sensors)?;
        let diam = max_finite_distance(g) as usize;
        let table = SignatureTable::build(&sd, diam + 1, false);
        let mut index: HashMap<Vec<u32>, Vec<usize>> = HashMap::new();
        for v in 0..g.vertex_count() {
            index.entry(table.raw(v).to_vec()).or_default().push(v);
        }
        Ok(Self {
            sensors: sd.sensors().to_vec(),
            table,
            index,
        })
    }

    pub fn sensors(&self) -> &[usize] {
        &self.sensors
    }

    /// Length of every observation, `diam + 1`.
    pub fn horizon(&self) -> usize {
        self.table.raw(0).len()
    }

    pub fn observe(&self, v0: usize) -> Result<Observation> {
        if v0 >= self.table.vertex_count() {
            return Err(Error::VertexOutOfRange {
                vertex: v0,
                n: self.table.vertex_count(),
            });
        }
        Ok(Observation {
            counts: self.table.raw(v0).to_vec(),
        })
    }

    /// Every vertex whose spread would produce `obs`, ascending. Empty when
    /// the observation is inconsistent with the sensor set.
    pub fn identify(&self, obs: &Observation) -> Vec<usize> {
        if obs.counts.len() != self.horizon() || obs.total() != self.sensors.len() as u64 {
            return Vec::new();
        }
        self.index.get(&obs.counts).cloned().unwrap_or_default()
    }
}

/// Sensor firing counts for a spread from `v0`.
pub fn observe(g: &Graph, sensors: &[usize], v0: usize) -> Result<Observation> {
    check_sensor_set(g.vertex_count(), sensors)?;
    let times = spread(g, v0)?;
    let mut counts = vec![0u32; max_finite_distance(g) as usize + 1];
    for &s in sensors {
        counts[times[s] as usize] += 1;
    }
    Ok(Observation { counts })
}

/// Candidate sources for `obs` by a full scan.
pub fn identify(g: &Graph, sensors: &[usize], obs: &Observation) -> Result<Vec<usize>> {
    Ok(Localizer::new(g, sensors)?.identify(obs))
}
