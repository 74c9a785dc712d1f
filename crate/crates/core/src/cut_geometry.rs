//! Identities that tie cut quantities of a graph to lengths, inner products and
//! angles in its two simplices.
//!
//! Every report computes the combinatorial side from the edge list and the
//! geometric side from the embeddings, so the two halves of each identity go
//! through separate code paths.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{self, cut_intersection_size, cut_size, laplacian, LaplacianMatrix, VertexSubset, WeightedGraph};
use crate::simplex::{altitude, check_pair, face_centroid, SimplexEmbedding, SimplexKind};
use crate::spectral::PseudoinverseLaplacian;

/// Relative residual `|a − b| / max(1, |b|)`.
pub fn relative_residual(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1.0)
}

/// Cut size and its geometric counterparts for one subset.
#[derive(Debug, Clone, Serialize)]
pub struct CutReport {
    pub subset: VertexSubset,
    /// `|∂V|`, summed over crossing edges.
    pub cut_size: f64,
    /// `|∂⁺V| = u_Vᵀ Q† u_V`.
    pub dual_quadratic: f64,
    pub centroid_sqnorm: f64,
    pub inverse_centroid_sqnorm: f64,
    pub altitude_sqlen_inverse: f64,
    pub altitude_sqlen_original: f64,
}

/// Residuals of the three per-subset identities.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CutResiduals {
    /// `‖c_V‖² V²` vs `|∂V|`.
    pub centroid: f64,
    /// `‖a⁺_V‖² |∂V|` vs 1.
    pub altitude: f64,
    /// `‖c⁺_V‖² V²` vs `|∂⁺V|`.
    pub inverse_centroid: f64,
}

impl CutReport {
    pub fn subset_size(&self) -> usize {
        self.subset.len()
    }

    pub fn residuals(&self) -> CutResiduals {
        let v2 = (self.subset.len() * self.subset.len()) as f64;
        CutResiduals {
            centroid: relative_residual(self.centroid_sqnorm * v2, self.cut_size),
            altitude: relative_residual(self.altitude_sqlen_inverse * self.cut_size, 1.0),
            inverse_centroid: relative_residual(self.inverse_centroid_sqnorm * v2, self.dual_quadratic),
        }
    }

    pub fn max_residual(&self) -> f64 {
        let r = self.residuals();
        r.centroid.max(r.altitude).max(r.inverse_centroid)
    }
}

/// Builds a [`CutReport`] for `v`.
///
/// The pseudoinverse supplies `|∂⁺V|` as a plain quadratic form; the
/// embeddings supply centroids and altitudes.
pub fn cut_report(
    g: &WeightedGraph,
    qdag: &PseudoinverseLaplacian,
    orig: &SimplexEmbedding,
    inv: &SimplexEmbedding,
    v: &VertexSubset,
) -> Result<CutReport> {
    check_pair(orig, inv)?;
    let cut = cut_size(g, v)?;
    if qdag.matrix().nrows() != g.node_count() || orig.node_count() != g.node_count() {
        return Err(Error::Dimension {
            expected: g.node_count(),
            actual: orig.node_count(),
        });
    }
    let dual_quadratic = qdag.quadratic_form(&v.indicator());
    Ok(CutReport {
        subset: v.clone(),
        cut_size: cut,
        dual_quadratic,
        centroid_sqnorm: face_centroid(orig, v)?.norm_squared(),
        inverse_centroid_sqnorm: face_centroid(inv, v)?.norm_squared(),
        altitude_sqlen_inverse: altitude(orig, inv, v, SimplexKind::Inverse)?.norm_squared(),
        altitude_sqlen_original: altitude(orig, inv, v, SimplexKind::Original)?.norm_squared(),
    })
}

/// `c_{V₁}ᵀ c_{V₂}` for disjoint subsets. Equals `−|∂V₁ ∩ ∂V₂| / (V₁ V₂)`.
pub fn centroid_inner_product(orig: &SimplexEmbedding, v1: &VertexSubset, v2: &VertexSubset) -> Result<f64> {
    if let Some(node) = v1.members().find(|&i| v2.contains(i)) {
        return Err(Error::Overlap { node });
    }
    Ok(face_centroid(orig, v1)?.dot(&face_centroid(orig, v2)?))
}

/// Combinatorial right-hand side `−|∂V₁ ∩ ∂V₂| / (V₁ V₂)`.
pub fn centroid_inner_product_expected(g: &WeightedGraph, v1: &VertexSubset, v2: &VertexSubset) -> Result<f64> {
    let shared = cut_intersection_size(g, v1, v2)?;
    Ok(-shared / (v1.len() * v2.len()) as f64)
}

/// `a⁺_{V₁}ᵀ a⁺_{V₂}` for disjoint subsets. Equals `−|∂V₁ ∩ ∂V₂| / (|∂V₁| |∂V₂|)`.
pub fn altitude_inner_product(
    orig: &SimplexEmbedding,
    inv: &SimplexEmbedding,
    v1: &VertexSubset,
    v2: &VertexSubset,
) -> Result<f64> {
    if let Some(node) = v1.members().find(|&i| v2.contains(i)) {
        return Err(Error::Overlap { node });
    }
    let a1 = altitude(orig, inv, v1, SimplexKind::Inverse)?;
    let a2 = altitude(orig, inv, v2, SimplexKind::Inverse)?;
    Ok(a1.dot(&a2))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Theorem1Outcome {
    /// `yᵀ Q y`.
    pub lhs: f64,
    /// `‖y/2‖₁² / |∂⁺V_y|`.
    pub rhs: f64,
    pub holds: bool,
}

/// Slack used by the inequality checks.
pub const INEQUALITY_SLACK: f64 = 1e-9;

/// Quadratic-form lower bound for vectors orthogonal to the all-one vector:
/// `yᵀQy ≥ ‖y/2‖₁² / |∂⁺V_y|` with `V_y = {i : y_i ≥ 0}`.
///
/// `V_y` includes zero entries. Inputs with `|uᵀy| > 1e−10 · max(1, ‖y‖₁)`
/// are rejected, as is the zero vector.
pub fn theorem1_bound(q: &LaplacianMatrix, qdag: &PseudoinverseLaplacian, y: &DVector<f64>) -> Result<Theorem1Outcome> {
    let n = q.node_count();
    if y.len() != n {
        return Err(Error::Dimension { expected: n, actual: y.len() });
    }
    let l1: f64 = y.iter().map(|x| x.abs()).sum();
    let dot = y.sum();
    if l1 == 0.0 || dot.abs() > 1e-10 * l1.max(1.0) {
        return Err(Error::NonOrthogonal { dot });
    }
    let nonneg = DVector::from_iterator(n, y.iter().map(|&x| if x >= 0.0 { 1.0 } else { 0.0 }));
    let lhs = q.quadratic_form(y);
    let half = 0.5 * l1;
    let rhs = half * half / qdag.quadratic_form(&nonneg);
    Ok(Theorem1Outcome {
        lhs,
        rhs,
        holds: lhs >= rhs - INEQUALITY_SLACK * rhs.max(1.0),
    })
}

/// The vector `u_V/V − u_V̄/(N−V)` for which the quadratic bound reduces to
/// the cut duality inequality.
pub fn centroid_difference_vector(v: &VertexSubset) -> DVector<f64> {
    let n = v.universe();
    let inside = 1.0 / v.len() as f64;
    let outside = 1.0 / (n - v.len()) as f64;
    DVector::from_iterator(n, (0..n).map(|i| if v.contains(i) { inside } else { -outside }))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DualityOutcome {
    /// `|∂V| · |∂⁺V|`.
    pub product: f64,
    /// `(V (N−V) / N)²`.
    pub bound: f64,
    pub holds: bool,
}

/// `|∂V| · |∂⁺V| ≥ (V(N−V)/N)²`.
pub fn duality_inequality(g: &WeightedGraph, qdag: &PseudoinverseLaplacian, v: &VertexSubset) -> Result<DualityOutcome> {
    let cut = cut_size(g, v)?;
    let product = cut * qdag.quadratic_form(&v.indicator());
    let n = v.universe() as f64;
    let size = v.len() as f64;
    let bound = (size * (n - size) / n).powi(2);
    Ok(DualityOutcome {
        product,
        bound,
        holds: product >= bound - INEQUALITY_SLACK * bound.max(1.0),
    })
}

/// Effective resistance `ω_ij = ‖s⁺_i − s⁺_j‖²`.
pub fn effective_resistance(inv: &SimplexEmbedding, i: usize, j: usize) -> Result<f64> {
    if inv.kind() != SimplexKind::Inverse {
        return Err(Error::WrongKind {
            expected: "inverse",
            actual: "original",
        });
    }
    inv.check_node(i)?;
    inv.check_node(j)?;
    if i == j {
        return Err(Error::Index {
            index: j,
            node_count: inv.node_count(),
        });
    }
    Ok((inv.vertices().column(i) - inv.vertices().column(j)).norm_squared())
}

/// `(Q†)ᵢᵢ + (Q†)ⱼⱼ − 2(Q†)ᵢⱼ`.
pub fn resistance_from_pseudoinverse(qdag: &PseudoinverseLaplacian, i: usize, j: usize) -> f64 {
    let m = qdag.matrix();
    m[(i, i)] + m[(j, j)] - 2.0 * m[(i, j)]
}

/// Symmetric matrix of effective resistances with zero diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct EffectiveResistanceMatrix(DMatrix<f64>);

impl EffectiveResistanceMatrix {
    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.0[(i, j)]
    }

    /// Largest violation `ω_ik − ω_ij − ω_jk` over all triples (≤ 0 for a metric).
    pub fn worst_triangle_violation(&self) -> f64 {
        let n = self.0.nrows();
        let mut worst = f64::NEG_INFINITY;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    worst = worst.max(self.0[(i, k)] - self.0[(i, j)] - self.0[(j, k)]);
                }
            }
        }
        worst
    }
}

pub fn resistance_matrix(inv: &SimplexEmbedding) -> Result<EffectiveResistanceMatrix> {
    let n = inv.node_count();
    let mut m = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in i + 1..n {
            let w = effective_resistance(inv, i, j)?;
            m[(i, j)] = w;
            m[(j, i)] = w;
        }
    }
    Ok(EffectiveResistanceMatrix(m))
}

/// Angle `φ⁺_ij` between the facets opposite vertices `i` and `j` of the
/// inverse simplex: `cos φ⁺_ij = −Q_ij / √(d_i d_j)`.
///
/// For `N = 2` the facets are points; the formula is still evaluated and
/// gives 0.
pub fn facet_angle(g: &WeightedGraph, i: usize, j: usize) -> Result<f64> {
    graph::check_node(g, i)?;
    graph::check_node(g, j)?;
    if i == j {
        return Err(Error::Index {
            index: j,
            node_count: g.node_count(),
        });
    }
    let q = laplacian(g);
    let m = q.matrix();
    let cos = -m[(i, j)] / (m[(i, i)] * m[(j, j)]).sqrt();
    Ok(cos.clamp(-1.0, 1.0).acos())
}

/// The same angle from the facet normals of the inverse simplex, which are
/// the original vertices: `π − ∠(s_i, s_j)`.
pub fn facet_angle_from_normals(orig: &SimplexEmbedding, i: usize, j: usize) -> Result<f64> {
    orig.check_node(i)?;
    orig.check_node(j)?;
    let a = orig.vertices().column(i);
    let b = orig.vertices().column(j);
    let (a, b) = (a / a.norm(), b / b.norm());
    // 2·atan2(‖a−b‖, ‖a+b‖) stays accurate near 0 and π, unlike acos
    let between = 2.0 * (&a - &b).norm().atan2((&a + &b).norm());
    Ok(PI - between)
}
