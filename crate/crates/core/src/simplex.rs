//! The original simplex `S` and inverse simplex `S⁺` of a graph.
//!
//! Both are stored as `(N−1) × N` vertex matrices whose column `i` is the
//! vertex for node `i`. The original simplex has Gram matrix `Q`, the inverse
//! has Gram matrix `Q†`, and both have their centroid at the origin.
//!
//! A simplex embedding is unique only up to an orthogonal transformation, so
//! compare embeddings through Gram matrices, norms and pairings rather than
//! raw coordinates.

use std::fmt;

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::VertexSubset;
use crate::spectral::{SourceId, SpectralDecomposition};

/// Slack allowed on halfspace tests so that boundary points test as inside.
pub const MEMBERSHIP_TOLERANCE: f64 = 1e-9;

/// Allowed deviation of barycentric weights from summing to one.
pub const BARYCENTRIC_SUM_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SimplexKind {
    Original,
    Inverse,
}

impl SimplexKind {
    pub fn dual(self) -> Self {
        match self {
            Self::Original => Self::Inverse,
            Self::Inverse => Self::Original,
        }
    }

    fn name(self) -> &'static str {
        match self {
            Self::Original => "original",
            Self::Inverse => "inverse",
        }
    }
}

impl fmt::Display for SimplexKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone)]
pub struct SimplexEmbedding {
    kind: SimplexKind,
    vertices: DMatrix<f64>,
    source: SourceId,
}

impl SimplexEmbedding {
    pub fn kind(&self) -> SimplexKind {
        self.kind
    }

    /// The `(N−1) × N` vertex matrix.
    pub fn vertices(&self) -> &DMatrix<f64> {
        &self.vertices
    }

    pub fn vertex(&self, i: usize) -> DVector<f64> {
        self.vertices.column(i).into_owned()
    }

    pub fn node_count(&self) -> usize {
        self.vertices.ncols()
    }

    /// Ambient dimension `N − 1`.
    pub fn dimension(&self) -> usize {
        self.vertices.nrows()
    }

    pub fn source(&self) -> SourceId {
        self.source
    }

    fn expect_kind(&self, kind: SimplexKind) -> Result<()> {
        if self.kind == kind {
            Ok(())
        } else {
            Err(Error::WrongKind {
                expected: kind.name(),
                actual: self.kind.name(),
            })
        }
    }

    fn check_subset(&self, v: &VertexSubset) -> Result<()> {
        if v.universe() == self.node_count() {
            Ok(())
        } else {
            Err(Error::SubsetOutOfRange {
                expected: self.node_count(),
                message: format!("subset is defined over {} nodes", v.universe()),
            })
        }
    }

    pub(crate) fn check_node(&self, i: usize) -> Result<()> {
        if i < self.node_count() {
            Ok(())
        } else {
            Err(Error::Index {
                index: i,
                node_count: self.node_count(),
            })
        }
    }

    /// `Σ_{i∈V} s_i`, i.e. the vertex matrix applied to `u_V`.
    pub(crate) fn indicator_sum(&self, v: &VertexSubset) -> DVector<f64> {
        let mut acc = DVector::zeros(self.dimension());
        for i in v.members() {
            acc += self.vertices.column(i);
        }
        acc
    }
}

/// Checks that `orig` and `inv` are an original/inverse pair from one decomposition.
pub(crate) fn check_pair(orig: &SimplexEmbedding, inv: &SimplexEmbedding) -> Result<()> {
    orig.expect_kind(SimplexKind::Original)?;
    inv.expect_kind(SimplexKind::Inverse)?;
    if orig.source != inv.source {
        return Err(Error::MismatchedSource);
    }
    Ok(())
}

/// Vertex coordinates `(s_i)_k = (z_k)_i √μ_k`, or `(z_k)_i / √μ_k` for the inverse.
pub fn embed(d: &SpectralDecomposition, kind: SimplexKind) -> SimplexEmbedding {
    let z = d.eigenvectors();
    let mu = d.eigenvalues();
    let vertices = DMatrix::from_fn(z.ncols(), z.nrows(), |k, i| match kind {
        SimplexKind::Original => z[(i, k)] * mu[k].sqrt(),
        SimplexKind::Inverse => z[(i, k)] / mu[k].sqrt(),
    });
    SimplexEmbedding {
        kind,
        vertices,
        source: d.source(),
    }
}

/// Gram matrix of the vertex vectors.
pub fn gram(e: &SimplexEmbedding) -> DMatrix<f64> {
    e.vertices.transpose() * &e.vertices
}

/// Matrix of pairings `s_iᵀ s⁺_j`, which should equal `I − uuᵀ/N`.
pub fn dual_pairing(orig: &SimplexEmbedding, inv: &SimplexEmbedding) -> Result<DMatrix<f64>> {
    check_pair(orig, inv)?;
    Ok(orig.vertices.transpose() * &inv.vertices)
}

/// Nonnegative weights summing to one.
#[derive(Debug, Clone, PartialEq)]
pub struct BarycentricCoordinate(Vec<f64>);

impl BarycentricCoordinate {
    /// Validates `weights`. Weights that do not sum to one are rejected, never
    /// renormalized.
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::Barycentric("no weights".into()));
        }
        if let Some((i, w)) = weights.iter().enumerate().find(|(_, w)| !(**w >= 0.0)) {
            return Err(Error::Barycentric(format!("weight {i} is {w}")));
        }
        let sum: f64 = weights.iter().sum();
        if (sum - 1.0).abs() > BARYCENTRIC_SUM_TOLERANCE {
            return Err(Error::Barycentric(format!("weights sum to {sum}")));
        }
        Ok(Self(weights))
    }

    pub fn uniform(n: usize) -> Self {
        Self(vec![1.0 / n as f64; n])
    }

    /// Uniform weights over the members of `v` (the face centroid).
    pub fn face_uniform(v: &VertexSubset) -> Self {
        let w = 1.0 / v.len() as f64;
        Self((0..v.universe()).map(|i| if v.contains(i) { w } else { 0.0 }).collect())
    }

    pub fn vertex(n: usize, i: usize) -> Self {
        let mut w = vec![0.0; n];
        w[i] = 1.0;
        Self(w)
    }

    pub fn weights(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// The point `S x`.
pub fn point_from_barycentric(e: &SimplexEmbedding, x: &BarycentricCoordinate) -> Result<DVector<f64>> {
    if x.len() != e.node_count() {
        return Err(Error::Dimension {
            expected: e.node_count(),
            actual: x.len(),
        });
    }
    Ok(&e.vertices * DVector::from_column_slice(x.weights()))
}

/// Halfspace slacks `pᵀn_i + 1/N`, one per facet, where the normals `n_i` are
/// the vertices of the dual simplex. All slacks are nonnegative exactly when
/// `p` lies in the simplex.
pub fn halfspace_slacks(dual: &SimplexEmbedding, p: &DVector<f64>) -> Result<Vec<f64>> {
    if p.len() != dual.dimension() {
        return Err(Error::Dimension {
            expected: dual.dimension(),
            actual: p.len(),
        });
    }
    let offset = 1.0 / dual.node_count() as f64;
    Ok(dual
        .vertices
        .column_iter()
        .map(|n| p.dot(&n) + offset)
        .collect())
}

/// Halfspace membership test for `simplex`, using the vertices of `dual` as
/// inner facet normals.
///
/// `simplex` and `dual` must be the two embeddings of one decomposition (in
/// either order).
pub fn contains(simplex: &SimplexEmbedding, dual: &SimplexEmbedding, p: &DVector<f64>) -> Result<bool> {
    if simplex.kind == dual.kind {
        return Err(Error::WrongKind {
            expected: simplex.kind.dual().name(),
            actual: dual.kind.name(),
        });
    }
    if simplex.source != dual.source {
        return Err(Error::MismatchedSource);
    }
    Ok(halfspace_slacks(dual, p)?
        .into_iter()
        .all(|s| s >= -MEMBERSHIP_TOLERANCE))
}

/// A face `F_V`, the convex hull of the vertices selected by `V`.
#[derive(Debug, Clone, PartialEq)]
pub struct Face {
    selector: VertexSubset,
}

impl Face {
    pub fn new(selector: VertexSubset) -> Self {
        Self { selector }
    }

    pub fn selector(&self) -> &VertexSubset {
        &self.selector
    }

    /// `|V| − 1`.
    pub fn dimension(&self) -> usize {
        self.selector.len() - 1
    }

    pub fn complementary(&self) -> Self {
        Self::new(self.selector.complement())
    }

    /// Point of the face with barycentric weights `local` over its members
    /// (in increasing node order).
    pub fn point(&self, e: &SimplexEmbedding, local: &[f64]) -> Result<DVector<f64>> {
        if local.len() != self.selector.len() {
            return Err(Error::Dimension {
                expected: self.selector.len(),
                actual: local.len(),
            });
        }
        let mut full = vec![0.0; self.selector.universe()];
        for (m, &w) in self.selector.members().zip(local) {
            full[m] = w;
        }
        point_from_barycentric(e, &BarycentricCoordinate::new(full)?)
    }
}

/// Centroid `c_V = S u_V / V` of the face selected by `v`.
pub fn face_centroid(e: &SimplexEmbedding, v: &VertexSubset) -> Result<DVector<f64>> {
    e.check_subset(v)?;
    Ok(e.indicator_sum(v) / v.len() as f64)
}

/// Altitude between the faces `F_V` and `F_V̄` of the `target` simplex, pointing
/// from `F_V` to `F_V̄`.
///
/// Uses the closed form: the altitude of one simplex is the complementary
/// centroid of the other simplex, scaled by `(N−V)` over that simplex's
/// quadratic `‖D u_V‖²`. For the inverse target this is
/// `a⁺_V = (N−V)/|∂V| · c_V̄`; for the original it is
/// `a_V = (N−V)/|∂⁺V| · c⁺_V̄`.
pub fn altitude(
    orig: &SimplexEmbedding,
    inv: &SimplexEmbedding,
    v: &VertexSubset,
    target: SimplexKind,
) -> Result<DVector<f64>> {
    check_pair(orig, inv)?;
    orig.check_subset(v)?;
    let dual = match target {
        SimplexKind::Original => inv,
        SimplexKind::Inverse => orig,
    };
    let quadratic = dual.indicator_sum(v).norm_squared();
    let complement = v.complement();
    let c_bar = dual.indicator_sum(&complement) / complement.len() as f64;
    Ok(c_bar * (complement.len() as f64 / quadratic))
}

/// Shortest vector from the affine hull of `F_V` to that of `F_V̄` within a
/// single embedding, found by least squares on the face directions.
///
/// This uses no dual-simplex information and serves as an independent route
/// to the closed-form [`altitude`].
pub fn altitude_by_least_squares(e: &SimplexEmbedding, v: &VertexSubset) -> Result<DVector<f64>> {
    e.check_subset(v)?;
    let complement = v.complement();
    let c = face_centroid(e, v)?;
    let c_bar = face_centroid(e, &complement)?;
    let gap = &c_bar - &c;

    let mut directions = Vec::new();
    for face in [v, &complement] {
        let mut members = face.members();
        let first = e.vertex(members.next().expect("faces are nonempty"));
        directions.extend(members.map(|m| e.vertex(m) - &first));
    }
    if directions.is_empty() {
        return Ok(gap);
    }
    // face directions of a simplex are linearly independent, so a thin QR
    // gives an orthonormal basis of their span; remove that component
    let basis = DMatrix::from_columns(&directions).qr().q();
    let along = &basis * (basis.transpose() * &gap);
    Ok(gap - along)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use crate::graph::{laplacian, WeightedGraph};
    use crate::spectral::{centering_projector, eigendecompose, pseudoinverse};
    use approx::assert_abs_diff_eq;

    fn pair(g: &WeightedGraph) -> (SpectralDecomposition, SimplexEmbedding, SimplexEmbedding) {
        let d = eigendecompose(&laplacian(g)).unwrap();
        let o = embed(&d, SimplexKind::Original);
        let i = embed(&d, SimplexKind::Inverse);
        (d, o, i)
    }

    fn sub(n: usize, m: &[usize]) -> VertexSubset {
        VertexSubset::new(n, m).unwrap()
    }

    #[test]
    fn path4_original_gram_is_laplacian() {
        let g = corpus::path(4);
        let (_, o, _) = pair(&g);
        let gr = gram(&o);
        assert!((&gr - laplacian(&g).matrix()).amax() < 1e-12);
        let norms: Vec<f64> = (0..4).map(|i| o.vertex(i).norm_squared()).collect();
        for (a, b) in norms.iter().zip([1.0, 2.0, 2.0, 1.0]) {
            assert_abs_diff_eq!(*a, b, epsilon = 1e-12);
        }
    }

    #[test]
    fn k2_coordinates() {
        let (_, o, i) = pair(&corpus::complete(2));
        assert_eq!(o.dimension(), 1);
        assert_abs_diff_eq!(o.vertices()[(0, 0)].abs(), 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(o.vertices()[(0, 0)], -o.vertices()[(0, 1)], epsilon = 1e-14);
        assert_abs_diff_eq!(i.vertices()[(0, 0)].abs(), 0.5, epsilon = 1e-14);
        let gi = gram(&i);
        let want = DMatrix::from_row_slice(2, 2, &[0.25, -0.25, -0.25, 0.25]);
        assert!((gi - want).amax() < 1e-14);
    }

    #[test]
    fn inverse_gram_is_pseudoinverse() {
        for (_, g) in corpus::named_graphs() {
            let (d, _, i) = pair(&g);
            assert!((gram(&i) - pseudoinverse(&d).matrix()).amax() < 1e-9);
        }
    }

    #[test]
    fn pairing_examples() {
        let (_, o, i) = pair(&corpus::path(4));
        let p = dual_pairing(&o, &i).unwrap();
        assert!((&p - centering_projector(4)).amax() < 1e-12);
        assert_abs_diff_eq!(p[(0, 0)], 0.75, epsilon = 1e-12);
        assert_abs_diff_eq!(p[(1, 2)], -0.25, epsilon = 1e-12);

        let (_, o2, i2) = pair(&corpus::complete(2));
        let p2 = dual_pairing(&o2, &i2).unwrap();
        assert!((p2 - DMatrix::from_row_slice(2, 2, &[0.5, -0.5, -0.5, 0.5])).amax() < 1e-14);
        for r in 0..4 {
            assert!(p.row(r).sum().abs() < 1e-12);
        }
    }

    #[test]
    fn pairing_rejects_mixed_sources_and_kinds() {
        let (_, o, _) = pair(&corpus::path(4));
        let (_, _, other_inv) = pair(&corpus::path(4));
        assert_eq!(dual_pairing(&o, &other_inv), Err(Error::MismatchedSource));
        assert!(matches!(dual_pairing(&o, &o), Err(Error::WrongKind { .. })));
    }

    #[test]
    fn barycentric_points() {
        let (_, o, _) = pair(&corpus::path(4));
        let centre = point_from_barycentric(&o, &BarycentricCoordinate::uniform(4)).unwrap();
        assert!(centre.amax() < 1e-14);
        let v2 = point_from_barycentric(&o, &BarycentricCoordinate::vertex(4, 2)).unwrap();
        assert!((v2 - o.vertex(2)).amax() < 1e-15);
        let mid = point_from_barycentric(
            &o,
            &BarycentricCoordinate::new(vec![0.5, 0.5, 0.0, 0.0]).unwrap(),
        )
        .unwrap();
        assert_abs_diff_eq!(mid.norm_squared(), 0.25, epsilon = 1e-12);
    }

    #[test]
    fn barycentric_validation() {
        assert!(BarycentricCoordinate::new(vec![0.5, 0.6]).is_err());
        assert!(BarycentricCoordinate::new(vec![1.5, -0.5]).is_err());
        assert!(BarycentricCoordinate::new(vec![f64::NAN, 1.0]).is_err());
        assert!(BarycentricCoordinate::new(vec![]).is_err());
        assert!(BarycentricCoordinate::new(vec![0.25; 4]).is_ok());
    }

    #[test]
    fn membership_examples() {
        for (_, g) in corpus::named_graphs() {
            let (_, o, i) = pair(&g);
            let n = g.node_count();
            assert!(contains(&o, &i, &DVector::zeros(n - 1)).unwrap());
            for k in 0..n {
                assert!(contains(&o, &i, &o.vertex(k)).unwrap());
                assert!(contains(&i, &o, &i.vertex(k)).unwrap());
                assert!(!contains(&o, &i, &(o.vertex(k) * 2.0)).unwrap());
            }
        }
        let (_, o, i) = pair(&corpus::complete(2));
        let p = o.vertex(0) * 2.0;
        let slacks = halfspace_slacks(&i, &p).unwrap();
        // p·s⁺₁ = 2·(−0.5) = −1 < −1/2
        assert_abs_diff_eq!(slacks[1], -0.5, epsilon = 1e-14);
    }

    #[test]
    fn centroid_examples() {
        let (_, o, _) = pair(&corpus::path(4));
        let c = face_centroid(&o, &sub(4, &[2])).unwrap();
        assert!((c - o.vertex(2)).amax() < 1e-15);
        let c01 = face_centroid(&o, &sub(4, &[0, 1])).unwrap();
        assert_abs_diff_eq!(c01.norm_squared(), 0.25, epsilon = 1e-12);
        let v = sub(4, &[0, 3, 2]);
        let lhs = face_centroid(&o, &v).unwrap() * 3.0 + face_centroid(&o, &v.complement()).unwrap();
        assert!(lhs.amax() < 1e-12);
        assert!(face_centroid(&o, &sub(5, &[1])).is_err());
    }

    #[test]
    fn altitude_examples() {
        let (_, o, i) = pair(&corpus::path(4));
        let a = altitude(&o, &i, &sub(4, &[0, 1]), SimplexKind::Inverse).unwrap();
        assert_abs_diff_eq!(a.norm_squared(), 1.0, epsilon = 1e-12);

        let g = corpus::star(5);
        let (_, o, i) = pair(&g);
        for k in 0..5 {
            let a = altitude(&o, &i, &sub(5, &[k]), SimplexKind::Inverse).unwrap();
            let d = crate::graph::degree_vector(&g)[k];
            assert_abs_diff_eq!(a.norm_squared(), 1.0 / d, epsilon = 1e-12);
        }

        let (_, o, i) = pair(&corpus::complete(2));
        let a = altitude(&o, &i, &sub(2, &[0]), SimplexKind::Original).unwrap();
        assert_abs_diff_eq!(a.norm(), 2.0, epsilon = 1e-12);
        // points from s₀ towards s₁
        assert!((&a - (o.vertex(1) - o.vertex(0))).amax() < 1e-12);
    }

    #[test]
    fn closed_form_altitude_matches_least_squares() {
        for (_, g) in corpus::named_graphs() {
            let (_, o, i) = pair(&g);
            let n = g.node_count();
            for mask in (1..(1u64 << n) - 1).step_by(3) {
                let v = VertexSubset::from_mask(n, mask).unwrap();
                for (target, emb) in [(SimplexKind::Original, &o), (SimplexKind::Inverse, &i)] {
                    let closed = altitude(&o, &i, &v, target).unwrap();
                    let ls = altitude_by_least_squares(emb, &v).unwrap();
                    let scale = closed.norm().max(1.0);
                    assert!((&closed - &ls).amax() < 1e-9 * scale, "{v:?} {target}");
                }
            }
        }
    }

    #[test]
    fn face_points() {
        let (_, o, _) = pair(&corpus::cycle(5));
        let f = Face::new(sub(5, &[1, 3]));
        assert_eq!(f.dimension(), 1);
        assert_eq!(f.complementary().dimension(), 2);
        let p = f.point(&o, &[0.5, 0.5]).unwrap();
        let c = face_centroid(&o, f.selector()).unwrap();
        assert!((p - c).amax() < 1e-15);
        assert!(f.point(&o, &[1.0]).is_err());
    }
}
