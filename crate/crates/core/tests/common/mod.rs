#![allow(dead_code)]

use msdim::Graph;
use proptest::prelude::*;

/// Random simple graph on `lo..=hi` vertices, each pair present with
/// probability about one half.
pub fn graphs(lo: usize, hi: usize) -> impl Strategy<Value = Graph> {
    (lo..=hi).prop_flat_map(|n| {
        let pairs = n * n.saturating_sub(1) / 2;
        (Just(n), proptest::collection::vec(any::<bool>(), pairs)).prop_map(|(n, keep)| {
            let mut edges = Vec::new();
            let mut idx = 0;
            for u in 0..n {
                for v in u + 1..n {
                    if keep[idx] {
                        edges.push((u, v));
                    }
                    idx += 1;
                }
            }
            Graph::from_edges(n, &edges).unwrap()
        })
    })
}

/// Connected graph: a random spanning tree plus random extra edges.
pub fn connected_graphs(lo: usize, hi: usize) -> impl Strategy<Value = Graph> {
    (lo..=hi).prop_flat_map(|n| {
        let pairs = n * (n - 1) / 2;
        (
            Just(n),
            proptest::collection::vec(any::<prop::sample::Index>(), n - 1),
            proptest::collection::vec(prop::bool::weighted(0.15), pairs),
        )
            .prop_map(|(n, parents, extra)| {
                let mut edges = std::collections::BTreeSet::new();
                for v in 1..n {
                    let p = parents[v - 1].index(v);
                    edges.insert((p, v));
                }
                let mut idx = 0;
                for u in 0..n {
                    for v in u + 1..n {
                        if extra[idx] {
                            edges.insert((u, v));
                        }
                        idx += 1;
                    }
                }
                let edges: Vec<_> = edges.into_iter().collect();
                Graph::from_edges(n, &edges).unwrap()
            })
    })
}

/// Non-empty subset of `0..n` given as a bit mask drawn by proptest.
pub fn subset(n: usize, mask: u64) -> Vec<usize> {
    let set: Vec<usize> = (0..n).filter(|&v| mask >> v & 1 == 1).collect();
    if set.is_empty() {
        vec![(mask as usize) % n]
    } else {
        set
    }
}

/// All-pairs distances by Floyd-Warshall, `None` for unreachable.
pub fn floyd_warshall(g: &Graph) -> Vec<Vec<Option<u32>>> {
    let n = g.vertex_count();
    let inf = u32::MAX / 4;
    let mut d = vec![vec![inf; n]; n];
    for u in 0..n {
        d[u][u] = 0;
        for &w in g.neighbors(u) {
            d[u][w as usize] = 1;
        }
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let via = d[i][k] + d[k][j];
                if via < d[i][j] {
                    d[i][j] = via;
                }
            }
        }
    }
    d.into_iter()
        .map(|row| row.into_iter().map(|x| (x < inf).then_some(x)).collect())
        .collect()
}
