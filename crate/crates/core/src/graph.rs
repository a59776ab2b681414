//! Undirected simple graphs, BFS layering and diameter.
//!
//! Vertices are labeled `0..n`. Distances are `u32` internally with
//! [`UNREACHABLE`] marking vertices in another component; the public
//! accessors surface that as `None` or [`Diameter::Infinite`].

use std::collections::VecDeque;
use std::fmt;
use std::io::{BufRead, Write};

use rayon::prelude::*;

use crate::error::{invalid, Error, Result};

/// Internal sentinel for "no path". Never interpreted as a length.
pub const UNREACHABLE: u32 = u32::MAX;

/// Immutable undirected simple graph stored as compressed adjacency rows.
#[derive(Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    offsets: Vec<usize>,
    neighbors: Vec<u32>,
}

impl fmt::Debug for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Graph")
            .field("n", &self.n)
            .field("m", &self.edge_count())
            .finish()
    }
}

impl Graph {
    /// Builds a graph from unordered pairs. Self-loops, duplicate pairs and
    /// out-of-range labels are rejected.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut normalized = Vec::with_capacity(edges.len());
        for &(u, v) in edges {
            for w in [u, v] {
                if w >= n {
                    return Err(Error::VertexOutOfRange { vertex: w, n });
                }
            }
            if u == v {
                return Err(invalid(format!("self-loop at vertex {u}")));
            }
            normalized.push((u.min(v), u.max(v)));
        }
        normalized.sort_unstable();
        if let Some(w) = normalized.windows(2).find(|w| w[0] == w[1]) {
            return Err(invalid(format!("duplicate edge {} {}", w[0].0, w[0].1)));
        }
        Ok(Self::from_sorted_unique(n, &normalized))
    }

    /// `edges` must be sorted, deduplicated, with `u < v < n`.
    pub(crate) fn from_sorted_unique(n: usize, edges: &[(usize, usize)]) -> Self {
        let mut degree = vec![0usize; n];
        for &(u, v) in edges {
            degree[u] += 1;
            degree[v] += 1;
        }
        let mut offsets = Vec::with_capacity(n + 1);
        offsets.push(0);
        for d in &degree {
            offsets.push(offsets.last().unwrap() + d);
        }
        let mut cursor = offsets[..n].to_vec();
        let mut neighbors = vec![0u32; offsets[n]];
        for &(u, v) in edges {
            neighbors[cursor[u]] = v as u32;
            cursor[u] += 1;
            neighbors[cursor[v]] = u as u32;
            cursor[v] += 1;
        }
        for u in 0..n {
            neighbors[offsets[u]..offsets[u + 1]].sort_unstable();
        }
        Self {
            n,
            offsets,
            neighbors,
        }
    }

    pub fn empty(n: usize) -> Self {
        Self::from_sorted_unique(n, &[])
    }

    pub fn path(n: usize) -> Self {
        let edges: Vec<_> = (1..n).map(|v| (v - 1, v)).collect();
        Self::from_sorted_unique(n, &edges)
    }

    pub fn cycle(n: usize) -> Self {
        assert!(n >= 3, "cycle needs at least 3 vertices");
        let mut edges: Vec<_> = (1..n).map(|v| (v - 1, v)).collect();
        edges.push((0, n - 1));
        edges.sort_unstable();
        Self::from_sorted_unique(n, &edges)
    }

    pub fn complete(n: usize) -> Self {
        let mut edges = Vec::with_capacity(n * n.saturating_sub(1) / 2);
        for u in 0..n {
            for v in u + 1..n {
                edges.push((u, v));
            }
        }
        Self::from_sorted_unique(n, &edges)
    }

    /// Star with center 0 and `leaves` leaves.
    pub fn star(leaves: usize) -> Self {
        let edges: Vec<_> = (1..=leaves).map(|v| (0, v)).collect();
        Self::from_sorted_unique(leaves + 1, &edges)
    }

    pub fn petersen() -> Self {
        let mut edges = Vec::new();
        for i in 0..5 {
            edges.push((i, (i + 1) % 5));
            edges.push((i, i + 5));
            edges.push((5 + i, 5 + (i + 2) % 5));
        }
        Self::from_edges(10, &edges).expect("petersen edges are valid")
    }

    #[inline]
    pub fn vertex_count(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn edge_count(&self) -> usize {
        self.neighbors.len() / 2
    }

    #[inline]
    pub fn neighbors(&self, v: usize) -> &[u32] {
        &self.neighbors[self.offsets[v]..self.offsets[v + 1]]
    }

    #[inline]
    pub fn degree(&self, v: usize) -> usize {
        self.offsets[v + 1] - self.offsets[v]
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.n && v < self.n && self.neighbors(u).binary_search(&(v as u32)).is_ok()
    }

    /// Average degree `2|E| / n`.
    pub fn average_degree(&self) -> f64 {
        if self.n == 0 {
            0.0
        } else {
            self.neighbors.len() as f64 / self.n as f64
        }
    }

    /// Edges as `(u, v)` with `u < v`, lexicographically sorted.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n).flat_map(move |u| {
            self.neighbors(u)
                .iter()
                .map(|&v| v as usize)
                .filter(move |&v| v > u)
                .map(move |v| (u, v))
        })
    }

    pub fn check_vertex(&self, v: usize) -> Result<()> {
        if v < self.n {
            Ok(())
        } else {
            Err(Error::VertexOutOfRange {
                vertex: v,
                n: self.n,
            })
        }
    }

    pub fn is_connected(&self) -> bool {
        if self.n <= 1 {
            return true;
        }
        bfs_distances(self, &[0]).iter().all(|&d| d != UNREACHABLE)
    }

    /// Writes the edge-list text format: header `n m`, then one `u v` per
    /// line with `u < v` in lexicographic order.
    pub fn write_edge_list<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "{} {}", self.n, self.edge_count())?;
        for (u, v) in self.edges() {
            writeln!(out, "{u} {v}")?;
        }
        Ok(())
    }

    pub fn to_edge_list_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_edge_list(&mut buf)
            .expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("edge list is ASCII")
    }

    /// Parses the edge-list text format. The header edge count must match
    /// the number of edge lines.
    pub fn read_edge_list<R: BufRead>(input: R) -> Result<Self> {
        let mut lines = input
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l))
            .filter(|(_, l)| l.as_ref().map_or(true, |s| !s.trim().is_empty()));
        let parse_err = |line, msg: &str| Error::Parse {
            line,
            msg: msg.to_string(),
        };
        let (hline, header) = lines.next().ok_or_else(|| parse_err(1, "missing header"))?;
        let header = header.map_err(|e| parse_err(hline, &e.to_string()))?;
        let (n, m) = parse_pair(&header).ok_or_else(|| parse_err(hline, "expected `n m`"))?;
        let mut edges = Vec::with_capacity(m);
        for (line, text) in lines {
            let text = text.map_err(|e| parse_err(line, &e.to_string()))?;
            let (u, v) = parse_pair(&text).ok_or_else(|| parse_err(line, "expected `u v`"))?;
            edges.push((u, v));
        }
        if edges.len() != m {
            return Err(parse_err(
                hline,
                &format!("header declares {m} edges, found {}", edges.len()),
            ));
        }
        Self::from_edges(n, &edges)
    }
}

fn parse_pair(line: &str) -> Option<(usize, usize)> {
    let mut it = line.split_whitespace();
    let a = it.next()?.parse().ok()?;
    let b = it.next()?.parse().ok()?;
    if it.next().is_some() {
        return None;
    }
    Some((a, b))
}

/// Multi-source BFS. Entry `w` is `min_{s in sources} d(s, w)` or
/// [`UNREACHABLE`]. Sources are assumed valid.
pub(crate) fn bfs_distances(g: &Graph, sources: &[usize]) -> Vec<u32> {
    let mut dist = vec![UNREACHABLE; g.vertex_count()];
    let mut queue = VecDeque::with_capacity(g.vertex_count());
    for &s in sources {
        if dist[s] == UNREACHABLE {
            dist[s] = 0;
            queue.push_back(s as u32);
        }
    }
    while let Some(u) = queue.pop_front() {
        let next = dist[u as usize] + 1;
        for &w in g.neighbors(u as usize) {
            if dist[w as usize] == UNREACHABLE {
                dist[w as usize] = next;
                queue.push_back(w);
            }
        }
    }
    dist
}

/// Graph diameter; `Infinite` for disconnected graphs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum Diameter {
    Finite(u32),
    Infinite,
}

impl Diameter {
    pub fn finite(self) -> Option<u32> {
        match self {
            Diameter::Finite(d) => Some(d),
            Diameter::Infinite => None,
        }
    }
}

impl fmt::Display for Diameter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Diameter::Finite(d) => write!(f, "{d}"),
            Diameter::Infinite => f.write_str("inf"),
        }
    }
}

/// BFS layering from a set of sources: `S_k(V')` and `N_k(V')`.
#[derive(Debug, Clone)]
pub struct SphereTable {
    sources: Vec<usize>,
    dist: Vec<u32>,
    /// `sizes[k] = |S_k(V')|`
    sizes: Vec<usize>,
    unreachable: usize,
}

impl SphereTable {
    pub fn sources(&self) -> &[usize] {
        &self.sources
    }

    /// `d(V', w)`, `None` if `w` is not reachable from the sources.
    pub fn distance(&self, w: usize) -> Option<u32> {
        match self.dist[w] {
            UNREACHABLE => None,
            d => Some(d),
        }
    }

    /// Largest finite layer index (eccentricity of the source set).
    pub fn max_layer(&self) -> u32 {
        (self.sizes.len() - 1) as u32
    }

    /// `|S_k(V')|` for every `k` up to [`Self::max_layer`].
    pub fn sphere_sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn sphere_size(&self, k: u32) -> usize {
        self.sizes.get(k as usize).copied().unwrap_or(0)
    }

    pub fn ball_size(&self, k: u32) -> usize {
        self.sizes.iter().take(k as usize + 1).sum()
    }

    pub fn sphere(&self, k: u32) -> Vec<usize> {
        (0..self.dist.len())
            .filter(|&w| self.dist[w] == k)
            .collect()
    }

    pub fn ball(&self, k: u32) -> Vec<usize> {
        (0..self.dist.len())
            .filter(|&w| self.dist[w] <= k)
            .collect()
    }

    pub fn unreachable_count(&self) -> usize {
        self.unreachable
    }
}

/// BFS from the source set `V'`.
pub fn bfs_spheres(g: &Graph, sources: &[usize]) -> Result<SphereTable> {
    if sources.is_empty() {
        return Err(invalid("source list is empty"));
    }
    for &s in sources {
        g.check_vertex(s)?;
    }
    let dist = bfs_distances(g, sources);
    let mut sizes = vec![0usize; 1];
    let mut unreachable = 0;
    for &d in &dist {
        if d == UNREACHABLE {
            unreachable += 1;
        } else {
            let d = d as usize;
            if d >= sizes.len() {
                sizes.resize(d + 1, 0);
            }
            sizes[d] += 1;
        }
    }
    let mut sources = sources.to_vec();
    sources.sort_unstable();
    sources.dedup();
    Ok(SphereTable {
        sources,
        dist,
        sizes,
        unreachable,
    })
}

/// Exact diameter by BFS from every vertex, in parallel.
pub fn diameter(g: &Graph) -> Diameter {
    let n = g.vertex_count();
    if n == 0 {
        return Diameter::Finite(0);
    }
    if !g.is_connected() {
        return Diameter::Infinite;
    }
    let ecc = (0..n)
        .into_par_iter()
        .map(|v| bfs_distances(g, &[v]).into_iter().max().unwrap_or(0))
        .max()
        .unwrap_or(0);
    Diameter::Finite(ecc)
}

/// Largest finite distance between any two vertices, i.e. the largest
/// component diameter.
pub fn max_finite_distance(g: &Graph) -> u32 {
    (0..g.vertex_count())
        .into_par_iter()
        .map(|v| {
            bfs_distances(g, &[v])
                .into_iter()
                .filter(|&d| d != UNREACHABLE)
                .max()
                .unwrap_or(0)
        })
        .max()
        .unwrap_or(0)
}

/// Smallest `i >= 1` with `d^i >= n (2 ln n + slack)`, a finite-n stand-in
/// for the w.h.p. diameter of `G(n, p)` with average degree `d`. Equality
/// counts as reached.
pub fn predicted_diameter(n: usize, d: f64, slack: f64) -> Result<u32> {
    if d.is_nan() || d <= 1.0 {
        return Err(invalid(format!("average degree must exceed 1, got {d}")));
    }
    if n < 2 {
        return Err(invalid("need at least 2 vertices"));
    }
    if slack.is_nan() || slack < 0.0 {
        return Err(invalid("slack must be non-negative"));
    }
    let n = n as f64;
    let threshold = n * (2.0 * n.ln() + slack);
    let mut power = d;
    let mut i = 1;
    while power < threshold {
        power *= d;
        i += 1;
    }
    Ok(i)
}
