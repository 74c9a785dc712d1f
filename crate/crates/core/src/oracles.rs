//! Exhaustive ground truth for small graphs.
//!
//! Nothing here touches an eigensolver: cuts are enumerated, spanning trees are
//! counted by deletion–contraction, resistances come from contracted tree
//! counts, and graphs are enumerated by edge bitmask. Every search is
//! exponential and guarded by a hard size limit.

use std::collections::HashMap;
use std::ops::{Add, Mul};

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{VertexSubset, WeightedGraph};
use crate::simplex::{SimplexEmbedding, SimplexKind};

pub const MAX_CUT_SEARCH_NODES: usize = 24;
pub const MAX_TREE_ORACLE_NODES: usize = 10;
pub const MAX_ENUMERATION_NODES: usize = 8;

fn guard(what: &'static str, n: usize, max: usize) -> Result<()> {
    if n > max {
        Err(Error::SizeGuard { what, n, max })
    } else {
        Ok(())
    }
}

/// Relative tolerance under which two objective values count as tied.
pub const TIE_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, Serialize)]
pub struct CutSearchResult {
    pub best_subset: VertexSubset,
    pub best_value: f64,
    pub evaluated_count: u64,
}

/// Running optimum with tie-breaking on the smallest subset bitmask.
struct Incumbent {
    value: f64,
    mask: u64,
    maximize: bool,
}

impl Incumbent {
    fn new(maximize: bool) -> Self {
        Self {
            value: if maximize { f64::NEG_INFINITY } else { f64::INFINITY },
            mask: u64::MAX,
            maximize,
        }
    }

    fn offer(&mut self, value: f64, mask: u64) {
        if self.mask == u64::MAX {
            self.value = value;
            self.mask = mask;
            return;
        }
        let tol = TIE_TOLERANCE * value.abs().max(self.value.abs()).max(f64::MIN_POSITIVE);
        let improves = if self.maximize {
            value > self.value + tol
        } else {
            value < self.value - tol
        };
        if improves || ((value - self.value).abs() <= tol && mask < self.mask) {
            self.value = value;
            self.mask = mask;
        }
    }
}

/// Visits every subset containing node 0 except the full set, in Gray-code
/// order, calling `visit(mask, flipped_node, now_inside)` after each flip.
/// The initial subset `{0}` is reported with `flipped_node = 0`.
fn gray_walk(n: usize, mut visit: impl FnMut(u64, usize, bool)) -> u64 {
    let full = (1u64 << n) - 1;
    let mut mask = 1u64;
    let mut evaluated = 0;
    visit(mask, 0, true);
    evaluated += 1;
    for step in 1u64..(1u64 << (n - 1)) {
        let node = step.trailing_zeros() as usize + 1;
        mask ^= 1 << node;
        let inside = mask >> node & 1 == 1;
        visit(mask, node, inside);
        if mask != full {
            evaluated += 1;
        }
    }
    evaluated
}

fn dense_weights(g: &WeightedGraph) -> Vec<Vec<f64>> {
    let n = g.node_count();
    let mut w = vec![vec![0.0; n]; n];
    for e in g.edges() {
        w[e.i][e.j] = e.weight;
        w[e.j][e.i] = e.weight;
    }
    w
}

/// Exhaustive Max-Cut. Each complementary pair is visited once (node 0 is
/// always inside); ties go to the smallest indicator bitmask.
pub fn max_cut_bruteforce(g: &WeightedGraph) -> Result<CutSearchResult> {
    let n = g.node_count();
    guard("max_cut_bruteforce", n, MAX_CUT_SEARCH_NODES)?;
    let w = dense_weights(g);
    let full = (1u64 << n) - 1;
    let mut cut: f64 = w[0].iter().sum();
    let mut best = Incumbent::new(true);
    let evaluated = gray_walk(n, |mask, node, inside| {
        if node != 0 {
            // edges from `node` to its old side start crossing, to its new side stop
            let mut delta = 0.0;
            for (j, &wj) in w[node].iter().enumerate() {
                if wj != 0.0 && j != node {
                    let same_now = (mask >> j & 1 == 1) == inside;
                    delta += if same_now { -wj } else { wj };
                }
            }
            cut += delta;
        }
        if mask != full {
            best.offer(cut, mask);
        }
    });
    let best_subset = VertexSubset::from_mask(n, best.mask)?;
    Ok(CutSearchResult {
        best_value: crate::graph::cut_size(g, &best_subset)?,
        best_subset,
        evaluated_count: evaluated,
    })
}

/// Recovers the original vertex matrix from the inverse one:
/// `S = (S⁺ S⁺ᵀ)⁻¹ S⁺` in vertex-matrix layout.
pub fn dual_vertices_from_inverse(inv: &SimplexEmbedding) -> Result<DMatrix<f64>> {
    let p = inv.vertices();
    let gram = p * p.transpose();
    let chol = gram
        .cholesky()
        .ok_or_else(|| Error::Spectral("inverse vertex matrix is rank deficient".into()))?;
    Ok(chol.solve(p))
}

/// Subset minimizing the inverse-simplex altitude `‖a⁺_V‖`, using only the
/// inverse simplex. Same enumeration and tie-breaking as
/// [`max_cut_bruteforce`]; `best_value` is the altitude length.
pub fn min_altitude_cut(inv: &SimplexEmbedding) -> Result<CutSearchResult> {
    if inv.kind() != SimplexKind::Inverse {
        return Err(Error::WrongKind {
            expected: "inverse",
            actual: "original",
        });
    }
    let n = inv.node_count();
    guard("min_altitude_cut", n, MAX_CUT_SEARCH_NODES)?;
    let normals = dual_vertices_from_inverse(inv)?;
    let full = (1u64 << n) - 1;
    // running Σ_{i∈V} n_i; the complementary sum is its negative
    let mut inside_sum = normals.column(0).into_owned();
    let mut size = 1usize;
    let mut best = Incumbent::new(false);
    let altitude_length = |sum: &nalgebra::DVector<f64>, size: usize| {
        let outside = (n - size) as f64;
        let c_bar = -sum / outside;
        (c_bar * (outside / sum.norm_squared())).norm()
    };
    let evaluated = gray_walk(n, |mask, node, inside| {
        if node != 0 {
            if inside {
                inside_sum += normals.column(node);
                size += 1;
            } else {
                inside_sum -= normals.column(node);
                size -= 1;
            }
        }
        if mask != full {
            best.offer(altitude_length(&inside_sum, size), mask);
        }
    });
    let best_subset = VertexSubset::from_mask(n, best.mask)?;
    let mut sum = nalgebra::DVector::zeros(n - 1);
    for i in best_subset.members() {
        sum += normals.column(i);
    }
    Ok(CutSearchResult {
        best_value: altitude_length(&sum, best_subset.len()),
        best_subset,
        evaluated_count: evaluated,
    })
}

trait TreeWeight: Copy + PartialEq + Add<Output = Self> + Mul<Output = Self> {
    const ZERO: Self;
    const ONE: Self;
}

impl TreeWeight for f64 {
    const ZERO: Self = 0.0;
    const ONE: Self = 1.0;
}

impl TreeWeight for u64 {
    const ZERO: Self = 0;
    const ONE: Self = 1;
}

const CAP: usize = MAX_TREE_ORACLE_NODES;

/// Dense multigraph; parallel edges are merged by adding weights.
#[derive(Clone, Copy)]
struct Multigraph<W> {
    n: usize,
    w: [[W; CAP]; CAP],
}

impl<W: TreeWeight> Multigraph<W> {
    fn from_edges(n: usize, edges: impl Iterator<Item = (usize, usize, W)>) -> Self {
        let mut w = [[W::ZERO; CAP]; CAP];
        for (i, j, x) in edges {
            w[i][j] = w[i][j] + x;
            w[j][i] = w[j][i] + x;
        }
        Self { n, w }
    }

    /// Removes vertex `v` by moving the last vertex into its slot.
    fn remove(&mut self, v: usize) {
        let last = self.n - 1;
        if v != last {
            for k in 0..self.n {
                self.w[v][k] = self.w[last][k];
                self.w[k][v] = self.w[k][last];
            }
            self.w[v][v] = W::ZERO;
        }
        for k in 0..self.n {
            self.w[last][k] = W::ZERO;
            self.w[k][last] = W::ZERO;
        }
        self.n -= 1;
    }

    /// Identifies `v` with `u`, summing parallel edges and dropping the loop.
    fn contract(&mut self, v: usize, u: usize) {
        for k in 0..self.n {
            if k != u && k != v {
                let x = self.w[u][k] + self.w[v][k];
                self.w[u][k] = x;
                self.w[k][u] = x;
            }
        }
        self.w[u][v] = W::ZERO;
        self.w[v][u] = W::ZERO;
        self.remove(v);
    }

    /// Sum over spanning trees of the product of edge weights.
    fn tree_sum(mut self) -> W {
        match self.n {
            0 | 1 => return W::ONE,
            2 => return self.w[0][1],
            3 => {
                let (a, b, c) = (self.w[0][1], self.w[0][2], self.w[1][2]);
                return a * b + a * c + b * c;
            }
            _ => {}
        }
        let mut pick = (0, usize::MAX, 0);
        for v in 0..self.n {
            let mut deg = 0;
            let mut nb = 0;
            for k in 0..self.n {
                if self.w[v][k] != W::ZERO {
                    deg += 1;
                    nb = k;
                }
            }
            if deg < pick.1 {
                pick = (v, deg, nb);
            }
        }
        let (v, deg, u) = pick;
        if deg == 0 {
            return W::ZERO;
        }
        let weight = self.w[v][u];
        if deg == 1 {
            self.remove(v);
            return weight * self.tree_sum();
        }
        let mut contracted = self;
        contracted.contract(v, u);
        self.w[v][u] = W::ZERO;
        self.w[u][v] = W::ZERO;
        self.tree_sum() + weight * contracted.tree_sum()
    }
}

/// Weighted spanning-tree sum by deletion–contraction. Each tree contributes
/// the product of its edge weights.
pub fn spanning_tree_oracle(g: &WeightedGraph) -> Result<f64> {
    guard("spanning_tree_oracle", g.node_count(), MAX_TREE_ORACLE_NODES)?;
    Ok(Multigraph::from_edges(g.node_count(), g.edges().iter().map(|e| (e.i, e.j, e.weight))).tree_sum())
}

/// Exact spanning-tree count of an unweighted graph, in integer arithmetic.
pub fn spanning_tree_count_exact(g: &WeightedGraph) -> Result<u64> {
    guard("spanning_tree_count_exact", g.node_count(), MAX_TREE_ORACLE_NODES)?;
    if !g.is_unweighted() {
        return Err(Error::Validation("exact tree counts need an unweighted graph".into()));
    }
    Ok(Multigraph::from_edges(g.node_count(), g.edges().iter().map(|e| (e.i, e.j, 1u64))).tree_sum())
}

/// Effective resistance as `ξ(G / {i = j}) / ξ(G)`.
pub fn resistance_oracle(g: &WeightedGraph, i: usize, j: usize) -> Result<f64> {
    let n = g.node_count();
    guard("resistance_oracle", n, MAX_TREE_ORACLE_NODES)?;
    for k in [i, j] {
        if k >= n {
            return Err(Error::Index { index: k, node_count: n });
        }
    }
    if i == j {
        return Err(Error::Index { index: j, node_count: n });
    }
    let whole = Multigraph::from_edges(n, g.edges().iter().map(|e| (e.i, e.j, e.weight)));
    let mut merged = whole;
    merged.contract(j, i);
    Ok(merged.tree_sum() / whole.tree_sum())
}

/// Node pairs `(i, j)`, `i < j`, in the order used for edge bitmasks.
pub fn edge_slots(n: usize) -> Vec<(usize, usize)> {
    (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect()
}

fn mask_is_connected(n: usize, slots: &[(usize, usize)], mask: u64) -> bool {
    let mut adj = [0u16; 16];
    for (k, &(i, j)) in slots.iter().enumerate() {
        if mask >> k & 1 == 1 {
            adj[i] |= 1 << j;
            adj[j] |= 1 << i;
        }
    }
    let all = (1u16 << n) - 1;
    let mut seen = 1u16;
    let mut frontier = 1u16;
    while frontier != 0 {
        let mut next = 0;
        let mut f = frontier;
        while f != 0 {
            let v = f.trailing_zeros() as usize;
            f &= f - 1;
            next |= adj[v];
        }
        frontier = next & !seen;
        seen |= next;
    }
    seen == all
}

/// Edge bitmasks of all connected simple graphs on `n` labeled nodes, ascending.
/// Bit `k` selects `edge_slots(n)[k]`.
pub fn connected_edge_masks(n: usize) -> Result<impl Iterator<Item = u64>> {
    guard("enumerate_connected_graphs", n, MAX_ENUMERATION_NODES)?;
    if n < 2 {
        return Err(Error::Validation(format!("need at least 2 nodes, got {n}")));
    }
    let slots = edge_slots(n);
    let limit = 1u64 << slots.len();
    Ok((0..limit).filter(move |&m| mask_is_connected(n, &slots, m)))
}

pub fn graph_from_edge_mask(n: usize, mask: u64) -> Result<WeightedGraph> {
    let slots = edge_slots(n);
    WeightedGraph::unweighted(
        n,
        slots
            .iter()
            .enumerate()
            .filter(|(k, _)| mask >> k & 1 == 1)
            .map(|(_, &p)| p),
    )
}

/// Every connected simple unweighted graph on `n` labeled nodes, once each,
/// in ascending edge-bitmask order.
pub fn enumerate_connected_graphs(n: usize) -> Result<impl Iterator<Item = WeightedGraph>> {
    Ok(connected_edge_masks(n)?.map(move |m| graph_from_edge_mask(n, m).expect("mask is connected")))
}

/// Brute-force isomorphism test with exact weight matching.
pub fn are_isomorphic(g1: &WeightedGraph, g2: &WeightedGraph) -> Result<bool> {
    let n = g1.node_count();
    if n != g2.node_count() {
        return Ok(false);
    }
    guard("are_isomorphic", n, MAX_TREE_ORACLE_NODES)?;
    if g1.edge_count() != g2.edge_count() {
        return Ok(false);
    }
    let (w1, w2) = (dense_weights(g1), dense_weights(g2));
    let profile = |w: &Vec<Vec<f64>>, i: usize| {
        let mut row: Vec<u64> = w[i].iter().map(|x| x.to_bits()).collect();
        row.sort_unstable();
        row
    };
    let p1: Vec<_> = (0..n).map(|i| profile(&w1, i)).collect();
    let p2: Vec<_> = (0..n).map(|i| profile(&w2, i)).collect();
    let mut s1 = p1.clone();
    let mut s2 = p2.clone();
    s1.sort();
    s2.sort();
    if s1 != s2 {
        return Ok(false);
    }

    fn extend(
        k: usize,
        map: &mut Vec<usize>,
        used: &mut [bool],
        w1: &[Vec<f64>],
        w2: &[Vec<f64>],
        p1: &[Vec<u64>],
        p2: &[Vec<u64>],
    ) -> bool {
        let n = w1.len();
        if k == n {
            return true;
        }
        for t in 0..n {
            if used[t] || p1[k] != p2[t] {
                continue;
            }
            if (0..k).all(|a| w1[k][a] == w2[t][map[a]]) {
                used[t] = true;
                map.push(t);
                if extend(k + 1, map, used, w1, w2, p1, p2) {
                    return true;
                }
                map.pop();
                used[t] = false;
            }
        }
        false
    }
    Ok(extend(0, &mut Vec::with_capacity(n), &mut vec![false; n], &w1, &w2, &p1, &p2))
}

/// Characteristic polynomial coefficients of an integer matrix
/// (Faddeev–LeVerrier, exact).
fn integer_charpoly(a: &[Vec<i128>]) -> Vec<i128> {
    let n = a.len();
    let mut coeffs = vec![0i128; n + 1];
    coeffs[n] = 1;
    let mut m = vec![vec![0i128; n]; n];
    for k in 1..=n {
        let mut next = vec![vec![0i128; n]; n];
        for i in 0..n {
            for j in 0..n {
                next[i][j] = (0..n).map(|l| a[i][l] * m[l][j]).sum::<i128>();
            }
            next[i][i] += coeffs[n - k + 1];
        }
        m = next;
        let trace: i128 = (0..n).map(|i| (0..n).map(|l| a[i][l] * m[l][i]).sum::<i128>()).sum();
        coeffs[n - k] = -trace / k as i128;
    }
    coeffs
}

fn laplacian_charpoly(g: &WeightedGraph) -> Vec<i128> {
    let n = g.node_count();
    let mut a = vec![vec![0i128; n]; n];
    for e in g.edges() {
        a[e.i][e.j] -= 1;
        a[e.j][e.i] -= 1;
        a[e.i][e.i] += 1;
        a[e.j][e.j] += 1;
    }
    integer_charpoly(&a)
}

/// A pair of non-isomorphic graphs with the same Laplacian spectrum.
#[derive(Debug, Clone)]
pub struct CospectralPair {
    pub node_count: usize,
    pub left_mask: u64,
    pub right_mask: u64,
    pub left: WeightedGraph,
    pub right: WeightedGraph,
}

/// Finds the first Laplacian-cospectral, non-isomorphic pair of connected
/// unweighted graphs, scanning `n = 2..=max_n` and edge masks in ascending
/// order. Candidates are bucketed by their exact integer characteristic
/// polynomial.
pub fn find_cospectral_pair(max_n: usize) -> Result<Option<CospectralPair>> {
    guard("find_cospectral_pair", max_n, MAX_ENUMERATION_NODES)?;
    for n in 2..=max_n {
        let mut buckets: HashMap<Vec<i128>, Vec<(u64, WeightedGraph)>> = HashMap::new();
        for mask in connected_edge_masks(n)? {
            let g = graph_from_edge_mask(n, mask)?;
            let reps = buckets.entry(laplacian_charpoly(&g)).or_default();
            let mut seen = false;
            for (_, r) in reps.iter() {
                if are_isomorphic(r, &g)? {
                    seen = true;
                    break;
                }
            }
            if seen {
                continue;
            }
            if let Some((left_mask, left)) = reps.first() {
                return Ok(Some(CospectralPair {
                    node_count: n,
                    left_mask: *left_mask,
                    right_mask: mask,
                    left: left.clone(),
                    right: g,
                }));
            }
            reps.push((mask, g));
        }
    }
    Ok(None)
}
