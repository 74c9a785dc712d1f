//! Steiner circumscribed ellipsoid, simplex volumes and spanning-tree counts.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{laplacian, WeightedGraph};
use crate::simplex::{check_pair, SimplexEmbedding, SimplexKind};
use crate::spectral::{eigendecompose, SourceId, SpectralDecomposition};

/// `Γ(k/2)` for a positive integer `k`, by exact recursion from
/// `Γ(1) = 1` and `Γ(1/2) = √π`.
pub fn gamma_half(k: u32) -> f64 {
    assert!(k > 0, "gamma is undefined at 0");
    let (mut x, mut acc) = if k % 2 == 0 { (1.0, 1.0) } else { (0.5, PI.sqrt()) };
    let target = f64::from(k) / 2.0;
    while x < target {
        acc *= x;
        x += 1.0;
    }
    acc
}

/// `Γ(n) = (n − 1)!`.
pub fn gamma_int(n: u32) -> f64 {
    gamma_half(2 * n)
}

#[derive(Debug, Clone)]
pub struct SteinerEllipsoid {
    semi_axes: Vec<DVector<f64>>,
    source: SourceId,
}

impl SteinerEllipsoid {
    /// Semi-axis vectors, in the eigenvalue order of the decomposition.
    pub fn semi_axes(&self) -> &[DVector<f64>] {
        &self.semi_axes
    }

    pub fn lengths(&self) -> Vec<f64> {
        self.semi_axes.iter().map(|a| a.norm()).collect()
    }

    pub fn squared_lengths(&self) -> Vec<f64> {
        self.semi_axes.iter().map(|a| a.norm_squared()).collect()
    }

    pub fn source(&self) -> SourceId {
        self.source
    }

    /// Volume from the semi-axis lengths: `π^{D/2} / Γ(D/2 + 1) · ∏ αₖ`.
    pub fn volume(&self) -> f64 {
        let dim = self.semi_axes.len() as u32;
        PI.powf(f64::from(dim) / 2.0) / gamma_half(dim + 2) * self.lengths().iter().product::<f64>()
    }

    /// Largest `|ε_kᵀ ε_m| / (‖ε_k‖ ‖ε_m‖)` over `k ≠ m`.
    pub fn max_axis_cosine(&self) -> f64 {
        let mut worst = 0.0f64;
        for (k, a) in self.semi_axes.iter().enumerate() {
            for b in &self.semi_axes[k + 1..] {
                worst = worst.max((a.dot(b) / (a.norm() * b.norm())).abs());
            }
        }
        worst
    }
}

/// Semi-axes `ε_k = S z_k √((N−1)/N)`.
pub fn steiner_ellipsoid(d: &SpectralDecomposition, orig: &SimplexEmbedding) -> Result<SteinerEllipsoid> {
    if orig.kind() != SimplexKind::Original {
        return Err(Error::WrongKind {
            expected: "original",
            actual: "inverse",
        });
    }
    if orig.source() != d.source() {
        return Err(Error::MismatchedSource);
    }
    let n = d.node_count() as f64;
    let scale = ((n - 1.0) / n).sqrt();
    let semi_axes = d
        .eigenvectors()
        .column_iter()
        .map(|z| orig.vertices() * z * scale)
        .collect();
    Ok(SteinerEllipsoid {
        semi_axes,
        source: d.source(),
    })
}

/// The quadric `A = S† S†ᵀ` (in vertex-matrix layout, `Σᵢ s⁺ᵢ s⁺ᵢᵀ`) whose level
/// set `pᵀ A p = (N−1)/N` is the Steiner ellipsoid.
pub fn ellipsoid_form(inv: &SimplexEmbedding) -> DMatrix<f64> {
    inv.vertices() * inv.vertices().transpose()
}

/// `|pᵀ A p − (N−1)/N|`.
pub fn membership_residual(inv: &SimplexEmbedding, p: &DVector<f64>) -> f64 {
    let n = inv.node_count() as f64;
    let a = ellipsoid_form(inv);
    (p.dot(&(&a * p)) - (n - 1.0) / n).abs()
}

/// Sine of the angle between the quadric's gradient at vertex `s_i` and the
/// inverse vertex `s⁺_i`. Zero when the tangent plane at `s_i` is parallel to
/// the opposite facet.
pub fn tangency_sine(orig: &SimplexEmbedding, inv: &SimplexEmbedding, i: usize) -> Result<f64> {
    check_pair(orig, inv)?;
    orig.check_node(i)?;
    let grad = ellipsoid_form(inv) * orig.vertex(i) * 2.0;
    let normal = inv.vertex(i);
    let (g, n) = (&grad / grad.norm(), &normal / normal.norm());
    // ‖g − (g·n) n‖ is the sine for unit vectors
    Ok((&g - &n * g.dot(&n)).norm())
}

/// Weighted spanning-tree count `ξ = (1/N) ∏ μ_k`.
pub fn spanning_tree_count(d: &SpectralDecomposition) -> f64 {
    d.eigenvalues().iter().product::<f64>() / d.node_count() as f64
}

/// Rounds `ξ` to an integer when within `1e−6` relative of one.
pub fn rounded_tree_count(xi: f64) -> Option<u64> {
    let r = xi.round();
    ((xi - r).abs() <= 1e-6 * r.max(1.0) && r >= 1.0).then_some(r as u64)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VolumeReport {
    pub tree_count: f64,
    pub simplex_volume: f64,
    pub inverse_simplex_volume: f64,
    pub ellipsoid_volume: f64,
}

impl VolumeReport {
    /// `|E_S| / |S|`; depends only on `N`.
    pub fn ellipsoid_to_simplex_ratio(&self) -> f64 {
        self.ellipsoid_volume / self.simplex_volume
    }
}

/// Closed-form volumes from the node count and tree count:
/// `|S| = N√ξ / Γ(N)`, `|S⁺| = 1 / (Γ(N)√ξ)`, and
/// `|E_S| = ((N−1)π/N)^{(N−1)/2} √(Nξ) / Γ((N+1)/2)`.
pub fn volumes(node_count: usize, tree_count: f64) -> VolumeReport {
    let n = node_count as f64;
    let gamma_n = gamma_int(node_count as u32);
    let root = tree_count.sqrt();
    VolumeReport {
        tree_count,
        simplex_volume: n * root / gamma_n,
        inverse_simplex_volume: 1.0 / (gamma_n * root),
        ellipsoid_volume: ((n - 1.0) * PI / n).powf((n - 1.0) / 2.0) * (n * tree_count).sqrt()
            / gamma_half(node_count as u32 + 1),
    }
}

/// `|E_S| / |S|` as the quotient of the closed-form ellipsoid and simplex volumes:
/// `((N−1)π)^{(N−1)/2} Γ(N) / (N^{N/2} Γ((N+1)/2))`.
pub fn ellipsoid_to_simplex_ratio(node_count: usize) -> f64 {
    let n = node_count as f64;
    ((n - 1.0) * PI).powf((n - 1.0) / 2.0) * gamma_int(node_count as u32)
        / (n.powf(n / 2.0) * gamma_half(node_count as u32 + 1))
}

/// A closed form for the same ratio that circulates in the literature,
/// `((N−1)π)^{(N−1)/2} Γ(N) / (N^{(N+1)/2} Γ((N+1)/2))`.
///
/// It is smaller than [`ellipsoid_to_simplex_ratio`] by exactly `√N`; at
/// `N = 2`, where the ellipsoid and simplex are the same segment and the true
/// ratio is 1, it gives `1/√2`. Kept only so the discrepancy can be reported.
pub fn ellipsoid_to_simplex_ratio_alternate(node_count: usize) -> f64 {
    ellipsoid_to_simplex_ratio(node_count) / (node_count as f64).sqrt()
}

/// `|det[s₂−s₁, …, s_N−s₁]| / (N−1)!`.
pub fn simplex_volume_by_determinant(e: &SimplexEmbedding) -> f64 {
    let n = e.node_count();
    let base = e.vertices().column(0).into_owned();
    let edges = DMatrix::from_fn(n - 1, n - 1, |r, c| e.vertices()[(r, c + 1)] - base[r]);
    edges.determinant().abs() / gamma_int(n as u32)
}

/// Outcome of comparing two graphs' spectra and Steiner semi-axes.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CospectralReport {
    pub node_count: usize,
    pub spectrum_left: Vec<f64>,
    pub spectrum_right: Vec<f64>,
    pub cospectral: bool,
    pub co_steiner: bool,
}

/// Tolerance for comparing sorted eigenvalues and semi-axis lengths.
pub const COSPECTRAL_TOLERANCE: f64 = 1e-9;

/// Compares Laplacian spectra and sorted Steiner semi-axis lengths of two
/// graphs on the same number of nodes.
///
/// Returns a verification error if the graphs are cospectral but their
/// ellipsoids differ, which would contradict the semi-axis formula.
pub fn cospectral_co_steiner_check(g1: &WeightedGraph, g2: &WeightedGraph) -> Result<CospectralReport> {
    if g1.node_count() != g2.node_count() {
        return Err(Error::SizeMismatch {
            left: g1.node_count(),
            right: g2.node_count(),
        });
    }
    let axes = |g: &WeightedGraph| -> Result<(Vec<f64>, Vec<f64>)> {
        let d = eigendecompose(&laplacian(g))?;
        let orig = crate::simplex::embed(&d, SimplexKind::Original);
        let mut lengths = steiner_ellipsoid(&d, &orig)?.lengths();
        lengths.sort_by(f64::total_cmp);
        let mut mu = d.eigenvalues().to_vec();
        mu.sort_by(f64::total_cmp);
        Ok((mu, lengths))
    };
    let (mu1, ax1) = axes(g1)?;
    let (mu2, ax2) = axes(g2)?;
    let close = |a: &[f64], b: &[f64]| {
        a.iter()
            .zip(b)
            .all(|(x, y)| (x - y).abs() <= COSPECTRAL_TOLERANCE * x.abs().max(1.0))
    };
    let cospectral = close(&mu1, &mu2);
    let co_steiner = close(&ax1, &ax2);
    if cospectral && !co_steiner {
        return Err(Error::Verification(
            "cospectral graphs produced different Steiner ellipsoids".into(),
        ));
    }
    Ok(CospectralReport {
        node_count: g1.node_count(),
        spectrum_left: mu1,
        spectrum_right: mu2,
        cospectral,
        co_steiner,
    })
}
