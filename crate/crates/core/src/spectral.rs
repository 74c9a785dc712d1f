//! Laplacian eigendecomposition with the zero mode removed, and the spectral
//! pseudoinverse `Q† = Z M⁻¹ Zᵀ`.

use std::sync::atomic::{AtomicU64, Ordering};

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::graph::LaplacianMatrix;

static NEXT_SOURCE: AtomicU64 = AtomicU64::new(1);

/// Identifies the decomposition an embedding was built from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SourceId(u64);

/// Nonzero Laplacian eigenpairs, eigenvalues sorted descending.
///
/// Column `k` of [`eigenvectors`](Self::eigenvectors) is the unit eigenvector
/// for `eigenvalues()[k]`. Its largest-magnitude entry is positive, ties going
/// to the lowest index. Within a degenerate eigenvalue cluster the basis is
/// whatever the solver returned, so only gauge-invariant quantities (Gram
/// matrices, norms, volumes) should be compared across runs.
#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    eigenvalues: Vec<f64>,
    eigenvectors: DMatrix<f64>,
    zero_threshold: f64,
    source: SourceId,
}

impl SpectralDecomposition {
    pub fn node_count(&self) -> usize {
        self.eigenvectors.nrows()
    }

    /// `μ₁ ≥ μ₂ ≥ … ≥ μ_{N−1} > 0`.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// The `N × (N−1)` matrix `Z`.
    pub fn eigenvectors(&self) -> &DMatrix<f64> {
        &self.eigenvectors
    }

    pub fn eigenvector(&self, k: usize) -> DVector<f64> {
        self.eigenvectors.column(k).into_owned()
    }

    pub fn largest(&self) -> f64 {
        self.eigenvalues[0]
    }

    /// Eigenvalues below this were classified as the zero mode.
    pub fn zero_threshold(&self) -> f64 {
        self.zero_threshold
    }

    pub fn source(&self) -> SourceId {
        self.source
    }

    /// `Z M Zᵀ`.
    pub fn reconstruct(&self) -> DMatrix<f64> {
        self.weighted_outer(|mu| mu)
    }

    fn weighted_outer(&self, f: impl Fn(f64) -> f64) -> DMatrix<f64> {
        let z = &self.eigenvectors;
        let scaled = DMatrix::from_fn(z.nrows(), z.ncols(), |i, k| z[(i, k)] * f(self.eigenvalues[k]));
        let m = &scaled * z.transpose();
        (&m + m.transpose()) * 0.5
    }
}

/// Scale-aware zero classification: `μ < N · μ_max · 2⁻⁴⁵`.
pub fn zero_threshold(node_count: usize, max_eigenvalue: f64) -> f64 {
    node_count as f64 * max_eigenvalue.abs() * 2f64.powi(-45)
}

/// Eigendecomposes a Laplacian and drops its single zero mode.
///
/// Fails when the number of eigenvalues classified as zero is not exactly one,
/// or when an eigenvalue is clearly negative.
pub fn eigendecompose(q: &LaplacianMatrix) -> Result<SpectralDecomposition> {
    let n = q.node_count();
    if n < 2 {
        return Err(Error::Spectral(format!("need N >= 2, got {n}")));
    }
    let eig = symmetric_eigen(q.matrix())?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));

    let mu_max = eig.eigenvalues[order[0]];
    let threshold = zero_threshold(n, mu_max);
    if let Some(&k) = order.iter().find(|&&k| eig.eigenvalues[k] < -threshold) {
        return Err(Error::Spectral(format!(
            "negative eigenvalue {:e}; input is not positive semidefinite",
            eig.eigenvalues[k]
        )));
    }
    let zeros = order
        .iter()
        .filter(|&&k| eig.eigenvalues[k] < threshold)
        .count();
    if zeros != 1 {
        return Err(Error::Spectral(format!(
            "expected exactly one zero eigenvalue, found {zeros} (threshold {threshold:e})"
        )));
    }

    let kept = &order[..n - 1];
    let eigenvalues: Vec<f64> = kept.iter().map(|&k| eig.eigenvalues[k]).collect();
    let mut eigenvectors = DMatrix::zeros(n, n - 1);
    for (col, &k) in kept.iter().enumerate() {
        let mut v = eig.eigenvectors.column(k).into_owned();
        canonicalize_sign(&mut v);
        eigenvectors.set_column(col, &v);
    }
    Ok(SpectralDecomposition {
        eigenvalues,
        eigenvectors,
        zero_threshold: threshold,
        source: SourceId(NEXT_SOURCE.fetch_add(1, Ordering::Relaxed)),
    })
}

struct Eigen {
    eigenvalues: Vec<f64>,
    eigenvectors: DMatrix<f64>,
}

// nalgebra's SymmetricEigen returns wrong eigenvectors for some matrices with
// repeated eigenvalues, so the dense solve goes through faer.
fn symmetric_eigen(m: &DMatrix<f64>) -> Result<Eigen> {
    let n = m.nrows();
    let a = faer::Mat::<f64>::from_fn(n, n, |i, j| m[(i, j)]);
    let e = a
        .self_adjoint_eigen(faer::Side::Lower)
        .map_err(|err| Error::Spectral(format!("eigensolver did not converge: {err:?}")))?;
    let (s, u) = (e.S(), e.U());
    Ok(Eigen {
        eigenvalues: (0..n).map(|k| s[k]).collect(),
        eigenvectors: DMatrix::from_fn(n, n, |i, k| u[(i, k)]),
    })
}

/// Flips `v` so its largest-magnitude entry is positive.
fn canonicalize_sign(v: &mut DVector<f64>) {
    let mut best = 0;
    for i in 1..v.len() {
        // entries within 1e-12 of the running maximum count as ties
        if v[i].abs() > v[best].abs() + 1e-12 {
            best = i;
        }
    }
    if v[best] < 0.0 {
        v.neg_mut();
    }
}

/// Moore–Penrose inverse of a connected-graph Laplacian.
#[derive(Debug, Clone, PartialEq)]
pub struct PseudoinverseLaplacian(DMatrix<f64>);

impl PseudoinverseLaplacian {
    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    /// `d⁺ᵢ = (Q†)ᵢᵢ`.
    pub fn diagonal(&self) -> Vec<f64> {
        self.0.diagonal().iter().copied().collect()
    }

    pub fn quadratic_form(&self, x: &DVector<f64>) -> f64 {
        x.dot(&(&self.0 * x))
    }
}

pub fn pseudoinverse(d: &SpectralDecomposition) -> PseudoinverseLaplacian {
    PseudoinverseLaplacian(d.weighted_outer(|mu| 1.0 / mu))
}

/// `I − uuᵀ/N`.
pub fn centering_projector(n: usize) -> DMatrix<f64> {
    let off = 1.0 / n as f64;
    DMatrix::from_fn(n, n, |i, j| if i == j { 1.0 - off } else { -off })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use crate::graph::{laplacian, parse_edge_list};
    use approx::assert_abs_diff_eq;

    fn decompose(g: &crate::WeightedGraph) -> SpectralDecomposition {
        eigendecompose(&laplacian(g)).unwrap()
    }

    #[test]
    fn path4_spectrum_matches_rounded_values() {
        let d = decompose(&corpus::path(4));
        for (got, want) in d.eigenvalues().iter().zip([3.414, 2.0, 0.586]) {
            assert!((got - want).abs() < 5e-4, "{got} vs {want}");
        }
    }

    #[test]
    fn k2_decomposition() {
        let d = decompose(&corpus::complete(2));
        assert_abs_diff_eq!(d.eigenvalues()[0], 2.0, epsilon = 1e-14);
        let z = d.eigenvector(0);
        let r = std::f64::consts::FRAC_1_SQRT_2;
        assert_abs_diff_eq!(z[0].abs(), r, epsilon = 1e-14);
        assert_abs_diff_eq!(z[0], -z[1], epsilon = 1e-14);
        // tie between |z0| and |z1| goes to index 0
        assert!(z[0] > 0.0);
    }

    #[test]
    fn k4_has_triple_eigenvalue() {
        let d = decompose(&corpus::complete(4));
        for &mu in d.eigenvalues() {
            assert_abs_diff_eq!(mu, 4.0, epsilon = 1e-12);
        }
        let q = laplacian(&corpus::complete(4));
        assert!((d.reconstruct() - q.matrix()).amax() < 1e-12);
    }

    #[test]
    fn columns_are_orthonormal_and_centered() {
        for (_, g) in corpus::named_graphs() {
            let d = decompose(&g);
            let z = d.eigenvectors();
            let n = g.node_count();
            assert!((z.transpose() * z - DMatrix::identity(n - 1, n - 1)).amax() < 1e-12);
            let u = DVector::from_element(n, 1.0);
            assert!((z.transpose() * u).amax() < 1e-12);
        }
    }

    #[test]
    fn pseudoinverse_examples() {
        let k2 = pseudoinverse(&decompose(&corpus::complete(2)));
        let want = DMatrix::from_row_slice(2, 2, &[0.25, -0.25, -0.25, 0.25]);
        assert!((k2.matrix() - want).amax() < 1e-15);

        let g = corpus::path(4);
        let qd = pseudoinverse(&decompose(&g));
        let u = DVector::from_element(4, 1.0);
        assert!((qd.matrix() * &u).amax() < 1e-14);
        let mut e = DVector::zeros(4);
        e[0] = 1.0;
        e[3] = -1.0;
        assert_abs_diff_eq!(qd.quadratic_form(&e), 3.0, epsilon = 1e-12);

        let q = laplacian(&g);
        let prod = q.matrix() * qd.matrix();
        assert!((prod - centering_projector(4)).amax() < 1e-12);
    }

    #[test]
    fn weighted_reconstruction() {
        let g = parse_edge_list("0 1 0.5\n1 2 3\n2 0 1e3\n2 3 2").unwrap();
        let d = decompose(&g);
        let q = laplacian(&g);
        assert!((d.reconstruct() - q.matrix()).amax() <= 1e-9 * d.largest().max(1.0));
        assert!(d.eigenvalues().windows(2).all(|w| w[0] >= w[1]));
        assert!(*d.eigenvalues().last().unwrap() > d.zero_threshold());
    }

    #[test]
    fn rejects_matrices_with_two_zero_modes() {
        // Laplacian of two disjoint edges, built by hand since graphs reject it.
        let m = DMatrix::from_row_slice(
            4,
            4,
            &[1., -1., 0., 0., -1., 1., 0., 0., 0., 0., 1., -1., 0., 0., -1., 1.],
        );
        let q = LaplacianMatrix::from_matrix(m).unwrap();
        assert!(matches!(eigendecompose(&q), Err(Error::Spectral(_))));
    }
}
