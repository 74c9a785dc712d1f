//! Weighted undirected graphs, the Laplacian, and combinatorial cut quantities.
//!
//! Node ids are dense and 0-based. Every [`WeightedGraph`] is simple, positively
//! weighted and connected; these are checked once at construction so the rest
//! of the crate can rely on the Laplacian having rank `N - 1`.

use std::collections::HashSet;
use std::fmt;

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};

/// One undirected edge, stored with `i < j`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Edge {
    pub i: usize,
    pub j: usize,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WeightedGraph {
    node_count: usize,
    edges: Vec<Edge>,
}

impl WeightedGraph {
    /// Builds and validates a graph.
    ///
    /// Rejects self-loops, duplicate unordered pairs, non-positive or
    /// non-finite weights, out-of-range endpoints and disconnected node sets.
    pub fn new<I>(node_count: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, f64)>,
    {
        if node_count < 2 {
            return Err(Error::Validation(format!(
                "need at least 2 nodes, got {node_count}"
            )));
        }
        let mut seen = HashSet::new();
        let mut out = Vec::new();
        for (a, b, w) in edges {
            if a >= node_count || b >= node_count {
                return Err(Error::Validation(format!(
                    "edge ({a}, {b}) references a node outside 0..{node_count}"
                )));
            }
            if a == b {
                return Err(Error::Validation(format!("self-loop at node {a}")));
            }
            if !(w.is_finite() && w > 0.0) {
                return Err(Error::Validation(format!(
                    "edge ({a}, {b}) has non-positive weight {w}"
                )));
            }
            let (i, j) = if a < b { (a, b) } else { (b, a) };
            if !seen.insert((i, j)) {
                return Err(Error::Validation(format!("duplicate edge ({i}, {j})")));
            }
            out.push(Edge { i, j, weight: w });
        }
        let components = count_components(node_count, out.iter().map(|e| (e.i, e.j)));
        if components != 1 {
            return Err(Error::Disconnected { components });
        }
        Ok(Self {
            node_count,
            edges: out,
        })
    }

    /// Unit-weight convenience constructor.
    pub fn unweighted<I>(node_count: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        Self::new(node_count, edges.into_iter().map(|(i, j)| (i, j, 1.0)))
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// Weight of the edge `{i, j}`, or 0 when absent.
    pub fn weight(&self, i: usize, j: usize) -> f64 {
        let (a, b) = if i < j { (i, j) } else { (j, i) };
        self.edges
            .iter()
            .find(|e| e.i == a && e.j == b)
            .map_or(0.0, |e| e.weight)
    }

    pub fn total_weight(&self) -> f64 {
        self.edges.iter().map(|e| e.weight).sum()
    }

    /// True when every edge has weight exactly 1.
    pub fn is_unweighted(&self) -> bool {
        self.edges.iter().all(|e| e.weight == 1.0)
    }

    /// Returns the graph with node `k` renamed to `perm[k]`.
    pub fn relabel(&self, perm: &[usize]) -> Result<Self> {
        let n = self.node_count;
        let mut hit = vec![false; n];
        if perm.len() != n || perm.iter().any(|&p| p >= n || std::mem::replace(&mut hit[p], true)) {
            return Err(Error::Validation("relabeling is not a permutation".into()));
        }
        Self::new(
            n,
            self.edges.iter().map(|e| (perm[e.i], perm[e.j], e.weight)),
        )
    }

    fn check_index(&self, i: usize) -> Result<()> {
        if i < self.node_count {
            Ok(())
        } else {
            Err(Error::Index {
                index: i,
                node_count: self.node_count,
            })
        }
    }

    fn check_subset(&self, v: &VertexSubset) -> Result<()> {
        if v.universe() == self.node_count {
            Ok(())
        } else {
            Err(Error::SubsetOutOfRange {
                expected: self.node_count,
                message: format!("subset is defined over {} nodes", v.universe()),
            })
        }
    }
}

fn count_components(n: usize, edges: impl Iterator<Item = (usize, usize)>) -> usize {
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    let mut parent: Vec<usize> = (0..n).collect();
    let mut components = n;
    for (a, b) in edges {
        let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
        if ra != rb {
            parent[ra] = rb;
            components -= 1;
        }
    }
    components
}

/// Parses the edge-list text format.
///
/// Each non-blank line is `i j [w]` with 0-based integer ids and an optional
/// weight (default 1.0). Everything after `#` is ignored. The node count is one
/// more than the largest id mentioned.
pub fn parse_edge_list(text: &str) -> Result<WeightedGraph> {
    let mut edges = Vec::new();
    let mut max_id = None::<usize>;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if !(2..=3).contains(&fields.len()) {
            return Err(Error::Parse {
                line: line_no,
                message: format!("expected `i j [w]`, found {} fields", fields.len()),
            });
        }
        let node = |s: &str| {
            s.parse::<usize>().map_err(|_| Error::Parse {
                line: line_no,
                message: format!("`{s}` is not a non-negative integer node id"),
            })
        };
        let i = node(fields[0])?;
        let j = node(fields[1])?;
        let w = match fields.get(2) {
            Some(s) => s.parse::<f64>().map_err(|_| Error::Parse {
                line: line_no,
                message: format!("`{s}` is not a number"),
            })?,
            None => 1.0,
        };
        max_id = Some(max_id.map_or(i.max(j), |m| m.max(i).max(j)));
        edges.push((i, j, w));
    }
    let Some(max_id) = max_id else {
        return Err(Error::Parse {
            line: 0,
            message: "no edges found".into(),
        });
    };
    WeightedGraph::new(max_id + 1, edges)
}

/// Serializes a graph back to the edge-list format.
pub fn to_edge_list(g: &WeightedGraph) -> String {
    let mut out = String::new();
    for e in g.edges() {
        if e.weight == 1.0 {
            out.push_str(&format!("{} {}\n", e.i, e.j));
        } else {
            out.push_str(&format!("{} {} {}\n", e.i, e.j, e.weight));
        }
    }
    out
}

/// Graph Laplacian `Q = D - A`.
#[derive(Debug, Clone, PartialEq)]
pub struct LaplacianMatrix(DMatrix<f64>);

impl LaplacianMatrix {
    /// Wraps an explicit matrix after checking the Laplacian sign pattern:
    /// square, exactly symmetric, nonpositive off-diagonal, zero row sums.
    ///
    /// Connectivity is not checked here; [`crate::eigendecompose`] rejects
    /// matrices with more than one zero mode.
    pub fn from_matrix(m: DMatrix<f64>) -> Result<Self> {
        let n = m.nrows();
        if m.ncols() != n {
            return Err(Error::Validation("Laplacian must be square".into()));
        }
        for i in 0..n {
            let mut row = 0.0;
            let mut scale = 0.0f64;
            for j in 0..n {
                if m[(i, j)] != m[(j, i)] {
                    return Err(Error::Validation(format!("not symmetric at ({i}, {j})")));
                }
                if i != j && m[(i, j)] > 0.0 {
                    return Err(Error::Validation(format!("positive off-diagonal at ({i}, {j})")));
                }
                row += m[(i, j)];
                scale = scale.max(m[(i, j)].abs());
            }
            if row.abs() > 1e-12 * scale.max(1.0) {
                return Err(Error::Validation(format!("row {i} sums to {row}")));
            }
        }
        Ok(Self(m))
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn node_count(&self) -> usize {
        self.0.nrows()
    }

    /// `x^T Q x`.
    pub fn quadratic_form(&self, x: &DVector<f64>) -> f64 {
        x.dot(&(&self.0 * x))
    }

    pub fn into_inner(self) -> DMatrix<f64> {
        self.0
    }
}

pub fn laplacian(g: &WeightedGraph) -> LaplacianMatrix {
    let n = g.node_count();
    let mut q = DMatrix::zeros(n, n);
    for e in g.edges() {
        q[(e.i, e.j)] -= e.weight;
        q[(e.j, e.i)] -= e.weight;
        q[(e.i, e.i)] += e.weight;
        q[(e.j, e.j)] += e.weight;
    }
    LaplacianMatrix(q)
}

pub fn degree_vector(g: &WeightedGraph) -> Vec<f64> {
    let mut d = vec![0.0; g.node_count()];
    for e in g.edges() {
        d[e.i] += e.weight;
        d[e.j] += e.weight;
    }
    d
}

/// A nonempty proper subset of the node set `0..N`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct VertexSubset {
    indicator: Vec<bool>,
    size: usize,
}

impl VertexSubset {
    pub fn new(universe: usize, members: &[usize]) -> Result<Self> {
        let mut indicator = vec![false; universe];
        for &m in members {
            if m >= universe {
                return Err(Error::SubsetOutOfRange {
                    expected: universe,
                    message: format!("member {m} is not a node"),
                });
            }
            indicator[m] = true;
        }
        Self::from_indicator(indicator)
    }

    pub fn from_indicator(indicator: Vec<bool>) -> Result<Self> {
        let universe = indicator.len();
        let size = indicator.iter().filter(|&&b| b).count();
        if size == 0 || size == universe {
            return Err(Error::SubsetOutOfRange {
                expected: universe,
                message: format!("subset of size {size} is not nonempty and proper"),
            });
        }
        Ok(Self { indicator, size })
    }

    /// Subset whose members are the set bits of `mask` (bit `i` is node `i`).
    pub fn from_mask(universe: usize, mask: u64) -> Result<Self> {
        if universe > 64 || (universe < 64 && mask >> universe != 0) {
            return Err(Error::SubsetOutOfRange {
                expected: universe,
                message: format!("mask {mask:#x} has bits outside the node range"),
            });
        }
        Self::from_indicator((0..universe).map(|i| mask >> i & 1 == 1).collect())
    }

    pub fn singleton(universe: usize, node: usize) -> Result<Self> {
        Self::new(universe, &[node])
    }

    /// Number of nodes in the ambient graph.
    pub fn universe(&self) -> usize {
        self.indicator.len()
    }

    pub fn len(&self) -> usize {
        self.size
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, node: usize) -> bool {
        self.indicator.get(node).copied().unwrap_or(false)
    }

    pub fn members(&self) -> impl Iterator<Item = usize> + '_ {
        self.indicator
            .iter()
            .enumerate()
            .filter_map(|(i, &b)| b.then_some(i))
    }

    pub fn complement(&self) -> Self {
        Self {
            indicator: self.indicator.iter().map(|b| !b).collect(),
            size: self.universe() - self.size,
        }
    }

    /// 0/1 indicator vector `u_V`.
    pub fn indicator(&self) -> DVector<f64> {
        DVector::from_iterator(
            self.universe(),
            self.indicator.iter().map(|&b| if b { 1.0 } else { 0.0 }),
        )
    }

    pub fn mask(&self) -> Option<u64> {
        (self.universe() <= 64).then(|| {
            self.members().fold(0u64, |m, i| m | 1 << i)
        })
    }

    pub fn is_disjoint(&self, other: &Self) -> bool {
        self.first_overlap(other).is_none()
    }

    fn first_overlap(&self, other: &Self) -> Option<usize> {
        self.members().find(|&i| other.contains(i))
    }
}

impl fmt::Debug for VertexSubset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.members()).finish()
    }
}

impl Serialize for VertexSubset {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_seq(self.members())
    }
}

/// Total weight of the edges crossing the cut `(V, V̄)`, by edge enumeration.
pub fn cut_size(g: &WeightedGraph, v: &VertexSubset) -> Result<f64> {
    g.check_subset(v)?;
    Ok(g.edges()
        .iter()
        .filter(|e| v.contains(e.i) != v.contains(e.j))
        .map(|e| e.weight)
        .sum())
}

/// Cut size as the Laplacian quadratic form `u_V^T Q u_V`.
pub fn cut_size_quadratic(q: &LaplacianMatrix, v: &VertexSubset) -> Result<f64> {
    if v.universe() != q.node_count() {
        return Err(Error::SubsetOutOfRange {
            expected: q.node_count(),
            message: format!("subset is defined over {} nodes", v.universe()),
        });
    }
    Ok(q.quadratic_form(&v.indicator()))
}

/// Total weight of edges with one endpoint in `v1` and the other in `v2`.
pub fn cut_intersection_size(
    g: &WeightedGraph,
    v1: &VertexSubset,
    v2: &VertexSubset,
) -> Result<f64> {
    g.check_subset(v1)?;
    g.check_subset(v2)?;
    if let Some(node) = v1.first_overlap(v2) {
        return Err(Error::Overlap { node });
    }
    Ok(g.edges()
        .iter()
        .filter(|e| {
            (v1.contains(e.i) && v2.contains(e.j)) || (v1.contains(e.j) && v2.contains(e.i))
        })
        .map(|e| e.weight)
        .sum())
}

pub(crate) fn check_node(g: &WeightedGraph, i: usize) -> Result<()> {
    g.check_index(i)
}
