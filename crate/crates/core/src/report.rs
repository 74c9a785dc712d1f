//! Full analysis of one graph: the identity suite with residuals, and the
//! deterministic JSON document built from it.

use nalgebra::{DMatrix, DVector};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::cut_geometry::{
    centroid_difference_vector, centroid_inner_product, centroid_inner_product_expected, cut_report,
    duality_inequality, facet_angle, facet_angle_from_normals, relative_residual, resistance_from_pseudoinverse,
    resistance_matrix, theorem1_bound, CutReport,
};
use crate::error::{Error, Result};
use crate::graph::{degree_vector, laplacian, LaplacianMatrix, VertexSubset, WeightedGraph};
use crate::oracles::{resistance_oracle, spanning_tree_oracle, MAX_TREE_ORACLE_NODES};
use crate::simplex::{altitude, altitude_by_least_squares, dual_pairing, embed, face_centroid, gram, SimplexEmbedding, SimplexKind};
use crate::spectral::{centering_projector, eigendecompose, pseudoinverse, PseudoinverseLaplacian, SpectralDecomposition};
use crate::steiner::{
    ellipsoid_to_simplex_ratio, ellipsoid_to_simplex_ratio_alternate, membership_residual, rounded_tree_count,
    simplex_volume_by_determinant, spanning_tree_count, steiner_ellipsoid, tangency_sine, volumes, SteinerEllipsoid,
    VolumeReport,
};

pub const DEFAULT_TOLERANCE: f64 = 1e-9;
/// Largest N for which `--exhaustive-cuts` is accepted.
pub const MAX_EXHAUSTIVE_CUT_NODES: usize = 20;
/// Verification sweeps every subset up to this size, singletons beyond it.
pub const VERIFY_EXHAUSTIVE_NODES: usize = 12;
/// Random vectors tried per graph by the quadratic-bound check.
pub const VERIFY_RANDOM_VECTORS: usize = 200;
pub const SIGNIFICANT_DIGITS: usize = 12;

/// Every derived object for one graph, built once.
#[derive(Debug, Clone)]
pub struct Analysis {
    pub graph: WeightedGraph,
    pub laplacian: LaplacianMatrix,
    pub decomposition: SpectralDecomposition,
    pub pseudoinverse: PseudoinverseLaplacian,
    pub original: SimplexEmbedding,
    pub inverse: SimplexEmbedding,
    pub ellipsoid: SteinerEllipsoid,
}

impl Analysis {
    pub fn new(graph: &WeightedGraph) -> Result<Self> {
        let q = laplacian(graph);
        let d = eigendecompose(&q)?;
        let original = embed(&d, SimplexKind::Original);
        let inverse = embed(&d, SimplexKind::Inverse);
        let ellipsoid = steiner_ellipsoid(&d, &original)?;
        Ok(Self {
            graph: graph.clone(),
            laplacian: q,
            pseudoinverse: pseudoinverse(&d),
            decomposition: d,
            original,
            inverse,
            ellipsoid,
        })
    }

    pub fn node_count(&self) -> usize {
        self.graph.node_count()
    }

    pub fn tree_count(&self) -> f64 {
        spanning_tree_count(&self.decomposition)
    }

    pub fn volumes(&self) -> VolumeReport {
        volumes(self.node_count(), self.tree_count())
    }

    pub fn cut_report(&self, v: &VertexSubset) -> Result<CutReport> {
        cut_report(&self.graph, &self.pseudoinverse, &self.original, &self.inverse, v)
    }

    /// Subsets containing node 0, proper, in ascending mask order.
    pub fn half_subsets(&self) -> Result<Vec<VertexSubset>> {
        let n = self.node_count();
        if n > MAX_EXHAUSTIVE_CUT_NODES {
            return Err(Error::SizeGuard {
                what: "exhaustive cut sweep",
                n,
                max: MAX_EXHAUSTIVE_CUT_NODES,
            });
        }
        (1..(1u64 << n) - 1)
            .step_by(2)
            .map(|m| VertexSubset::from_mask(n, m))
            .collect()
    }

    pub fn singletons(&self) -> Vec<VertexSubset> {
        let n = self.node_count();
        (0..n).map(|i| VertexSubset::singleton(n, i).expect("node in range")).collect()
    }
}

/// Outcome of one named identity over everything it was evaluated on.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IdentityCheck {
    pub name: &'static str,
    pub max_residual: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Verification {
    pub tolerance: f64,
    pub checks: Vec<IdentityCheck>,
}

impl Verification {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn first_failure(&self) -> Option<&IdentityCheck> {
        self.checks.iter().find(|c| !c.passed)
    }

    /// Folds another graph's results in, keeping the worst residual per name.
    pub fn merge(&mut self, other: &Verification) {
        for c in &other.checks {
            match self.checks.iter_mut().find(|x| x.name == c.name) {
                Some(x) => {
                    x.max_residual = x.max_residual.max(c.max_residual);
                    x.passed &= c.passed;
                }
                None => self.checks.push(c.clone()),
            }
        }
    }
}

struct Collector {
    tolerance: f64,
    checks: Vec<IdentityCheck>,
}

impl Collector {
    fn record(&mut self, name: &'static str, residuals: impl IntoIterator<Item = f64>) {
        let mut worst = 0.0f64;
        let mut nan = false;
        for r in residuals {
            nan |= r.is_nan();
            worst = worst.max(r);
        }
        if nan {
            worst = f64::NAN;
        }
        self.checks.push(IdentityCheck {
            name,
            max_residual: worst,
            passed: worst <= self.tolerance,
        });
    }
}

fn max_abs_diff(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    (a - b).amax()
}

/// Runs every identity check on `a`. A residual passes when it is at most
/// `tolerance`; inequalities report their violation, clipped at zero.
pub fn verify(a: &Analysis, tolerance: f64) -> Result<Verification> {
    let n = a.node_count();
    let nf = n as f64;
    let mu_scale = a.decomposition.largest().max(1.0);
    let q = a.laplacian.matrix();
    let qdag = a.pseudoinverse.matrix();
    let center = centering_projector(n);
    let mut c = Collector {
        tolerance,
        checks: Vec::new(),
    };

    c.record("laplacian_reconstruction", [max_abs_diff(&a.decomposition.reconstruct(), q) / mu_scale]);
    c.record("pseudoinverse_product", [max_abs_diff(&(q * qdag), &center)]);
    c.record("gram_original", [max_abs_diff(&gram(&a.original), q) / mu_scale]);
    c.record("gram_inverse", [max_abs_diff(&gram(&a.inverse), qdag)]);
    c.record("dual_pairing", [max_abs_diff(&dual_pairing(&a.original, &a.inverse)?, &center)]);
    let degrees = degree_vector(&a.graph);
    c.record(
        "vertex_norm_degree",
        (0..n).map(|i| relative_residual(a.original.vertex(i).norm_squared(), degrees[i])),
    );

    let subsets = if n <= VERIFY_EXHAUSTIVE_NODES {
        a.half_subsets()?
    } else {
        a.singletons()
    };
    let mut reports = Vec::with_capacity(subsets.len());
    for v in &subsets {
        reports.push(a.cut_report(v)?);
    }
    c.record("centroid_cut", reports.iter().map(|r| r.residuals().centroid));
    c.record("altitude_cut", reports.iter().map(|r| r.residuals().altitude));
    c.record("inverse_centroid_dual_cut", reports.iter().map(|r| r.residuals().inverse_centroid));
    let mut balance = Vec::with_capacity(subsets.len());
    let mut least_squares = Vec::with_capacity(subsets.len());
    for v in &subsets {
        let w = v.complement();
        for e in [&a.original, &a.inverse] {
            let sum = face_centroid(e, v)? * v.len() as f64 + face_centroid(e, &w)? * w.len() as f64;
            balance.push(sum.amax());
        }
        let closed = altitude(&a.original, &a.inverse, v, SimplexKind::Inverse)?;
        let fitted = altitude_by_least_squares(&a.inverse, v)?;
        least_squares.push((&closed - &fitted).amax() / fitted.amax().max(1.0));
    }
    c.record("centroid_balance", balance);
    c.record("altitude_least_squares", least_squares);

    let mut cross = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let v1 = VertexSubset::singleton(n, i)?;
            let mut partners = vec![VertexSubset::singleton(n, j)?];
            if n > 2 {
                partners.push(VertexSubset::new(n, &[i, j])?.complement());
            }
            for v2 in &partners {
                cross.push(relative_residual(
                    centroid_inner_product(&a.original, &v1, v2)?,
                    centroid_inner_product_expected(&a.graph, &v1, v2)?,
                ));
            }
        }
    }
    c.record("centroid_cross_cut", cross);

    let mut duality = Vec::with_capacity(subsets.len());
    let mut bound = Vec::new();
    for v in &subsets {
        let d = duality_inequality(&a.graph, &a.pseudoinverse, v)?;
        duality.push(((d.bound - d.product) / d.bound.max(1.0)).max(0.0));
        let t = theorem1_bound(&a.laplacian, &a.pseudoinverse, &centroid_difference_vector(v))?;
        bound.push(((t.rhs - t.lhs) / t.rhs.max(1.0)).max(0.0));
    }
    let mut rng = StdRng::seed_from_u64(n as u64);
    for _ in 0..VERIFY_RANDOM_VECTORS {
        let raw = DVector::from_fn(n, |_, _| rng.gen_range(-1.0..1.0));
        let y = &raw - DVector::from_element(n, raw.mean());
        if y.amax() == 0.0 {
            continue;
        }
        let t = theorem1_bound(&a.laplacian, &a.pseudoinverse, &y)?;
        bound.push(((t.rhs - t.lhs) / t.rhs.max(1.0)).max(0.0));
    }
    c.record("cut_duality", duality);
    c.record("quadratic_lower_bound", bound);

    let omega = resistance_matrix(&a.inverse)?;
    let mut resistance = Vec::new();
    let mut angles = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let reference = if n <= MAX_TREE_ORACLE_NODES {
                resistance_oracle(&a.graph, i, j)?
            } else {
                resistance_from_pseudoinverse(&a.pseudoinverse, i, j)
            };
            resistance.push(relative_residual(omega.get(i, j), reference));
            angles.push((facet_angle(&a.graph, i, j)? - facet_angle_from_normals(&a.original, i, j)?).abs());
        }
    }
    c.record("resistance_contraction", resistance);
    c.record("resistance_triangle", [omega.worst_triangle_violation().max(0.0)]);
    c.record("facet_angle_normals", angles);

    c.record(
        "steiner_membership",
        (0..n).map(|i| membership_residual(&a.inverse, &a.original.vertex(i))),
    );
    c.record(
        "steiner_semi_axes",
        a.ellipsoid
            .squared_lengths()
            .iter()
            .zip(a.decomposition.eigenvalues())
            .map(|(&got, &mu)| relative_residual(got, mu * (nf - 1.0) / nf)),
    );
    c.record("steiner_axes_orthogonal", [a.ellipsoid.max_axis_cosine()]);
    let mut tangency = Vec::with_capacity(n);
    for i in 0..n {
        tangency.push(tangency_sine(&a.original, &a.inverse, i)?);
    }
    c.record("steiner_tangency", tangency);

    let vol = a.volumes();
    let xi = vol.tree_count;
    let rel = |x: f64, y: f64| (x - y).abs() / y.abs().max(f64::MIN_POSITIVE);
    if n <= MAX_TREE_ORACLE_NODES {
        c.record("tree_count_oracle", [rel(xi, spanning_tree_oracle(&a.graph)?)]);
    }
    c.record("simplex_volume_determinant", [rel(vol.simplex_volume, simplex_volume_by_determinant(&a.original))]);
    c.record(
        "inverse_volume_determinant",
        [rel(vol.inverse_simplex_volume, simplex_volume_by_determinant(&a.inverse))],
    );
    c.record("ellipsoid_volume_axes", [rel(vol.ellipsoid_volume, a.ellipsoid.volume())]);
    c.record(
        "ellipsoid_simplex_ratio",
        [rel(vol.ellipsoid_to_simplex_ratio(), ellipsoid_to_simplex_ratio(n))],
    );

    Ok(Verification {
        tolerance,
        checks: c.checks,
    })
}

/// Verifies every connected graph on `n` labeled nodes. Returns the number
/// of graphs checked and the worst residual per identity across them.
pub fn verify_corpus(n: usize, tolerance: f64) -> Result<(usize, Verification)> {
    let mut total = Verification {
        tolerance,
        checks: Vec::new(),
    };
    let mut count = 0;
    for g in crate::oracles::enumerate_connected_graphs(n)? {
        total.merge(&verify(&Analysis::new(&g)?, tolerance)?);
        count += 1;
    }
    Ok((count, total))
}

/// Rounds to 12 significant digits; `-0` becomes `0`.
pub fn round_significant(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return if x == 0.0 { 0.0 } else { x };
    }
    let r: f64 = format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x).parse().expect("formatted float parses");
    if r == 0.0 {
        0.0
    } else {
        r
    }
}

fn num(x: f64) -> Value {
    if x.is_finite() {
        json!(round_significant(x))
    } else {
        // JSON has no infinities; keep them visible as strings
        Value::String(format!("{x}"))
    }
}

fn vector(xs: impl IntoIterator<Item = f64>) -> Value {
    Value::Array(xs.into_iter().map(num).collect())
}

fn matrix(m: &DMatrix<f64>) -> Value {
    Value::Array(m.row_iter().map(|r| vector(r.iter().copied())).collect())
}

fn object(entries: Vec<(&str, Value)>) -> Value {
    Value::Object(entries.into_iter().map(|(k, v)| (k.to_string(), v)).collect::<Map<_, _>>())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReportOptions {
    pub exhaustive_cuts: bool,
    pub tolerance: f64,
}

impl Default for ReportOptions {
    fn default() -> Self {
        Self {
            exhaustive_cuts: false,
            tolerance: DEFAULT_TOLERANCE,
        }
    }
}

/// The report plus the verification it embeds.
#[derive(Debug, Clone)]
pub struct ReportDocument {
    pub value: Value,
    pub verification: Verification,
}

impl ReportDocument {
    /// Pretty JSON with sorted keys and a trailing newline.
    pub fn render(&self) -> String {
        render_json(&self.value)
    }
}

pub fn render_json(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values always serialize");
    s.push('\n');
    s
}

fn verification_value(v: &Verification) -> Value {
    object(vec![
        ("tolerance", num(v.tolerance)),
        ("passed", json!(v.passed())),
        (
            "identities",
            Value::Array(
                v.checks
                    .iter()
                    .map(|c| {
                        object(vec![
                            ("name", json!(c.name)),
                            ("max_residual", num(c.max_residual)),
                            ("passed", json!(c.passed)),
                        ])
                    })
                    .collect(),
            ),
        ),
    ])
}

pub fn verification_document(v: &Verification) -> String {
    render_json(&verification_value(v))
}

/// Builds the report for `g`.
pub fn build_report(g: &WeightedGraph, options: ReportOptions) -> Result<ReportDocument> {
    let a = Analysis::new(g)?;
    let n = a.node_count();
    let subsets = if options.exhaustive_cuts {
        a.half_subsets()?
    } else {
        a.singletons()
    };
    let verification = verify(&a, options.tolerance)?;

    let mut cuts = Vec::with_capacity(subsets.len());
    for v in &subsets {
        let r = a.cut_report(v)?;
        cuts.push(object(vec![
            ("subset", json!(v.members().collect::<Vec<_>>())),
            ("cut_size", num(r.cut_size)),
            ("dual_cut_size", num(r.dual_quadratic)),
            ("centroid_sqnorm", num(r.centroid_sqnorm)),
            ("inverse_centroid_sqnorm", num(r.inverse_centroid_sqnorm)),
            ("altitude_sqlen_inverse", num(r.altitude_sqlen_inverse)),
            ("altitude_sqlen_original", num(r.altitude_sqlen_original)),
            ("max_residual", num(r.max_residual())),
        ]));
    }

    let mut angles = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            if i != j {
                angles[(i, j)] = facet_angle(g, i, j)?;
            }
        }
    }

    let vol = a.volumes();
    let rounded = if g.is_unweighted() {
        rounded_tree_count(vol.tree_count)
    } else {
        None
    };
    let mut volume_entries = vec![
        (
            "tree_count",
            rounded.map_or_else(|| num(vol.tree_count), |t| json!(t)),
        ),
        ("simplex", num(vol.simplex_volume)),
        ("inverse_simplex", num(vol.inverse_simplex_volume)),
        ("ellipsoid", num(vol.ellipsoid_volume)),
        ("ellipsoid_to_simplex_ratio", num(vol.ellipsoid_to_simplex_ratio())),
        ("ellipsoid_to_simplex_ratio_alternate", num(ellipsoid_to_simplex_ratio_alternate(n))),
    ];
    if g.is_unweighted() && rounded.is_none() {
        volume_entries.push(("warning", json!("tree count is not within 1e-6 of an integer")));
    }

    let value = object(vec![
        (
            "graph",
            object(vec![
                ("node_count", json!(n)),
                ("edge_count", json!(g.edge_count())),
                ("degrees", vector(degree_vector(g))),
                ("total_weight", num(g.total_weight())),
                ("unweighted", json!(g.is_unweighted())),
            ]),
        ),
        (
            "spectrum",
            object(vec![
                ("eigenvalues", vector(a.decomposition.eigenvalues().iter().copied())),
                ("zero_threshold", num(a.decomposition.zero_threshold())),
            ]),
        ),
        (
            "grams",
            object(vec![
                ("original", matrix(&gram(&a.original))),
                ("inverse", matrix(&gram(&a.inverse))),
            ]),
        ),
        (
            "cuts",
            object(vec![
                ("exhaustive", json!(options.exhaustive_cuts)),
                ("reports", Value::Array(cuts)),
            ]),
        ),
        ("resistance", matrix(resistance_matrix(&a.inverse)?.matrix())),
        ("facet_angles", matrix(&angles)),
        (
            "steiner",
            object(vec![("semi_axis_lengths", vector(a.ellipsoid.lengths()))]),
        ),
        ("volumes", object(volume_entries)),
        ("verification", verification_value(&verification)),
    ]);
    Ok(ReportDocument { value, verification })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use crate::graph::parse_edge_list;

    #[test]
    fn rounding_to_twelve_digits() {
        assert_eq!(round_significant(2.0 / 3.0), 0.666666666667);
        assert_eq!(round_significant(-0.0).to_bits(), 0f64.to_bits());
        assert_eq!(round_significant(-1e-300 * 1e-300), 0.0);
        assert_eq!(round_significant(123456789012345.0), 123456789012000.0);
    }

    #[test]
    fn p4_report_blocks() {
        let doc = build_report(&corpus::path(4), ReportOptions::default()).unwrap();
        let v = &doc.value;
        let mu: Vec<f64> = v["spectrum"]["eigenvalues"]
            .as_array()
            .unwrap()
            .iter()
            .map(|x| x.as_f64().unwrap())
            .collect();
        for (got, want) in mu.iter().zip([3.414, 2.0, 0.586]) {
            assert!((got - want).abs() < 5e-4);
        }
        assert_eq!(v["volumes"]["tree_count"], json!(1));
        assert_eq!(v["volumes"]["simplex"], json!(0.666666666667));
        assert!(doc.render().contains("0.666666666667"));
        assert!(doc.verification.passed(), "{:?}", doc.verification.first_failure());
    }

    #[test]
    fn k2_resistance_block() {
        let doc = build_report(&corpus::complete(2), ReportOptions::default()).unwrap();
        assert_eq!(doc.value["resistance"], json!([[0.0, 1.0], [1.0, 0.0]]));
    }

    #[test]
    fn report_is_byte_deterministic() {
        let g = parse_edge_list("0 1 0.3\n1 2 1.7\n2 3 2\n3 0 0.9\n0 2 1.1").unwrap();
        let opts = ReportOptions {
            exhaustive_cuts: true,
            tolerance: DEFAULT_TOLERANCE,
        };
        let a = build_report(&g, opts).unwrap().render();
        let b = build_report(&g, opts).unwrap().render();
        assert_eq!(a, b);
        assert_eq!(build_report(&g, opts).unwrap().value["cuts"]["reports"].as_array().unwrap().len(), 7);
    }

    #[test]
    fn exhaustive_cuts_are_guarded() {
        let opts = ReportOptions {
            exhaustive_cuts: true,
            tolerance: DEFAULT_TOLERANCE,
        };
        assert!(matches!(
            build_report(&corpus::path(21), opts),
            Err(Error::SizeGuard { .. })
        ));
    }

    #[test]
    fn named_graphs_verify() {
        for (name, g) in corpus::named_graphs() {
            let v = verify(&Analysis::new(&g).unwrap(), DEFAULT_TOLERANCE).unwrap();
            assert!(v.passed(), "{name}: {:?}", v.first_failure());
        }
    }

    #[test]
    fn corpus_of_four_nodes_verifies() {
        let (count, v) = verify_corpus(4, DEFAULT_TOLERANCE).unwrap();
        assert_eq!(count, 38);
        assert!(v.passed(), "{:?}", v.first_failure());
    }

    #[test]
    fn overtight_tolerance_fails_cleanly() {
        let v = verify(&Analysis::new(&corpus::cycle(5)).unwrap(), 1e-18).unwrap();
        assert!(!v.passed());
        assert!(v.first_failure().is_some());
    }
}
