//! Named graph families and seeded random graphs used by tests, the CLI and benches.

use rand::Rng;

use crate::graph::WeightedGraph;

/// Path `0 - 1 - ... - (n-1)`.
pub fn path(n: usize) -> WeightedGraph {
    WeightedGraph::unweighted(n, (1..n).map(|i| (i - 1, i))).expect("path graphs are valid for n >= 2")
}

pub fn cycle(n: usize) -> WeightedGraph {
    assert!(n >= 3, "cycle needs at least 3 nodes");
    WeightedGraph::unweighted(n, (0..n).map(|i| (i, (i + 1) % n))).expect("valid cycle")
}

pub fn complete(n: usize) -> WeightedGraph {
    WeightedGraph::unweighted(n, (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))))
        .expect("complete graphs are valid for n >= 2")
}

/// Star with centre 0.
pub fn star(n: usize) -> WeightedGraph {
    WeightedGraph::unweighted(n, (1..n).map(|i| (0, i))).expect("valid star")
}

/// Random connected graph on `n` nodes with weights drawn from `[0.1, 5)`.
///
/// A random spanning tree guarantees connectivity; each remaining pair is added
/// with probability `density`.
pub fn random_weighted<R: Rng + ?Sized>(rng: &mut R, n: usize, density: f64) -> WeightedGraph {
    assert!(n >= 2);
    let mut order: Vec<usize> = (0..n).collect();
    for k in (1..n).rev() {
        order.swap(k, rng.gen_range(0..=k));
    }
    let mut present = vec![vec![false; n]; n];
    let mut edges = Vec::new();
    for k in 1..n {
        let a = order[k];
        let b = order[rng.gen_range(0..k)];
        present[a][b] = true;
        present[b][a] = true;
        edges.push((a, b, rng.gen_range(0.1..5.0)));
    }
    for i in 0..n {
        for j in i + 1..n {
            if !present[i][j] && rng.gen_bool(density) {
                edges.push((i, j, rng.gen_range(0.1..5.0)));
            }
        }
    }
    WeightedGraph::new(n, edges).expect("spanning tree keeps the graph connected")
}

/// Small hand-picked graphs with their conventional names.
pub fn named_graphs() -> Vec<(&'static str, WeightedGraph)> {
    vec![
        ("K2", complete(2)),
        ("K3", complete(3)),
        ("P3", path(3)),
        ("P4", path(4)),
        ("C4", cycle(4)),
        ("K4", complete(4)),
        ("S5", star(5)),
        ("C5", cycle(5)),
        ("K5", complete(5)),
        ("P6", path(6)),
        ("C7", cycle(7)),
        ("K8", complete(8)),
    ]
}
