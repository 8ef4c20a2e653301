//! Concrete Hilbert-scale model on `C^n`.
//!
//! Each weight `A` defines the graph norm `‖ξ‖_A = ‖G_A ξ‖` with
//! `G_A = (I + A*A)^{1/2}`. An operator `X` is represented at `A` in
//! transported coordinates by `X̃_A = G_A^{-1} X G_A^{-1}`, whose operator
//! norm is the sesquilinear norm `‖X‖^A`. Weights are ordered by
//! `A ⪯ B ⟺ A*A ⪯ B*B`.

use std::collections::BTreeMap;
use std::sync::Arc;

use nalgebra::DVector;
use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::directed::{DirectedSystem, Embedding, IndexPoset};
use crate::elements::CoherentElement;
use crate::error::{Error, Result};
use crate::numerics::{self, ComplexMatrix, MatrixJson, Tolerance};
use crate::order::{find_pre_unit, p_value, P_MATCH_TOLERANCE};
use crate::report::{Entry, Report, SlackTracker, Status};
use crate::sampling::{gaussian_matrix, seeded};

#[derive(Debug, Clone)]
pub struct RiggedModel {
    n: usize,
    weights: Vec<ComplexMatrix>,
    metric: Vec<ComplexMatrix>,
    metric_inv: Vec<ComplexMatrix>,
    /// `A*A` per weight.
    gram: Vec<ComplexMatrix>,
    eps_psd: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct ModelJson {
    n: usize,
    weights: Vec<MatrixJson>,
}

impl RiggedModel {
    /// Puts `A = 0` first, drops weights with the same `A*A` as an earlier
    /// one, and appends the join `C` with `C*C = Σ A*A` when no weight
    /// dominates all others.
    pub fn new(n: usize, weights: Vec<ComplexMatrix>, tol: Tolerance) -> Result<Self> {
        if n == 0 {
            return Err(Error::BadShape("dimension must be positive".into()));
        }
        let mut kept: Vec<(ComplexMatrix, ComplexMatrix)> = vec![(numerics::zeros(n), numerics::zeros(n))];
        for a in weights {
            if a.shape() != (n, n) {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: a.nrows(),
                });
            }
            if !numerics::is_finite(&a) {
                return Err(Error::NonFinite);
            }
            let g = a.adjoint() * &a;
            let scale = numerics::max_abs(&g).max(1.0);
            if kept
                .iter()
                .all(|(_, k)| numerics::max_abs_diff(k, &g) > tol.eps_eq * scale)
            {
                kept.push((a, g));
            }
        }
        let dominated = |g: &ComplexMatrix, kept: &[(ComplexMatrix, ComplexMatrix)]| {
            kept.iter()
                .all(|(_, k)| numerics::min_eigenvalue(&(g - k)) >= -tol.eps_psd * numerics::max_abs(g).max(1.0))
        };
        if !kept.iter().any(|(_, g)| dominated(g, &kept)) {
            let sum = kept.iter().fold(numerics::zeros(n), |s, (_, g)| s + g);
            let c = numerics::matrix_sqrt(&numerics::hermitian_part(&sum), tol)?;
            let g = c.adjoint() * &c;
            kept.push((c, g));
        }
        let mut metric = Vec::with_capacity(kept.len());
        let mut metric_inv = Vec::with_capacity(kept.len());
        for (_, g) in &kept {
            let g2 = numerics::hermitian_part(&(numerics::identity(n) + g));
            metric.push(numerics::matrix_sqrt(&g2, tol)?);
            metric_inv.push(numerics::matrix_sqrt_inv(&g2, tol)?);
        }
        let (weights, gram) = kept.into_iter().unzip();
        Ok(Self {
            n,
            weights,
            metric,
            metric_inv,
            gram,
            eps_psd: tol.eps_psd,
        })
    }

    /// `A = 0` plus `count − 1` seeded Gaussian weights, closed under the join.
    pub fn random(n: usize, count: usize, seed: u64, tol: Tolerance) -> Result<Self> {
        let mut rng = seeded(seed);
        let weights = (1..count).map(|_| gaussian_matrix(n, n, &mut rng)).collect();
        Self::new(n, weights, tol)
    }

    /// Totally ordered weights `0 ⪯ c_1 M ⪯ c_2 M ⪯ …` with `c_k = k`.
    pub fn chain(n: usize, len: usize, seed: u64, tol: Tolerance) -> Result<Self> {
        let m = gaussian_matrix(n, n, &mut seeded(seed));
        let weights = (1..len).map(|k| &m * Complex64::from(k as f64)).collect();
        Self::new(n, weights, tol)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn weight(&self, k: usize) -> Result<&ComplexMatrix> {
        self.weights.get(k).ok_or(Error::UnknownWeight(k))
    }

    /// `G_A`.
    pub fn metric(&self, k: usize) -> Result<&ComplexMatrix> {
        self.metric.get(k).ok_or(Error::UnknownWeight(k))
    }

    /// `A ⪯ B`: `B*B − A*A ⪰ 0` up to `eps_psd`.
    pub fn leq(&self, a: usize, b: usize) -> Result<bool> {
        let (ga, gb) = (
            self.gram.get(a).ok_or(Error::UnknownWeight(a))?,
            self.gram.get(b).ok_or(Error::UnknownWeight(b))?,
        );
        if a == b {
            return Ok(true);
        }
        let scale = numerics::max_abs(ga).max(numerics::max_abs(gb)).max(1.0);
        Ok(numerics::min_eigenvalue(&numerics::hermitian_part(&(gb - ga))) >= -self.eps_psd * scale)
    }

    fn comparable(&self, a: usize, b: usize) -> Result<()> {
        if self.leq(a, b)? {
            Ok(())
        } else {
            Err(Error::NotComparable(a, b))
        }
    }

    pub fn label(&self, k: usize) -> String {
        let width = self.len().saturating_sub(1).to_string().len().max(2);
        format!("w{k:0width$}")
    }

    pub fn to_value(&self) -> serde_json::Value {
        serde_json::to_value(ModelJson {
            n: self.n,
            weights: self.weights.iter().map(MatrixJson::from).collect(),
        })
        .expect("model serializes")
    }

    pub fn from_value(v: serde_json::Value, tol: Tolerance) -> Result<Self> {
        let j: ModelJson = serde_json::from_value(v)?;
        let weights = j
            .weights
            .into_iter()
            .map(ComplexMatrix::try_from)
            .collect::<Result<Vec<_>>>()?;
        Self::new(j.n, weights, tol)
    }
}

/// `X̃_A` and `‖X‖^A`.
#[derive(Debug, Clone)]
pub struct Representative {
    pub matrix: ComplexMatrix,
    pub norm: f64,
}

pub fn representative(model: &RiggedModel, x: &ComplexMatrix, k: usize) -> Result<Representative> {
    let gi = model.metric_inv.get(k).ok_or(Error::UnknownWeight(k))?;
    if x.shape() != (model.n, model.n) {
        return Err(Error::DimensionMismatch {
            expected: model.n,
            found: x.nrows(),
        });
    }
    let matrix = gi * x * gi;
    let norm = numerics::operator_norm(&matrix);
    Ok(Representative { matrix, norm })
}

/// `|⟨Xξ, η⟩ − ⟨X_A ξ, η⟩_A|` with `X_A = G_A^{-2} X` and
/// `⟨ξ, η⟩_A = ⟨G_A² ξ, η⟩`.
pub fn pairing_residual(
    model: &RiggedModel,
    x: &ComplexMatrix,
    k: usize,
    xi: &DVector<Complex64>,
    eta: &DVector<Complex64>,
) -> Result<f64> {
    let g = model.metric(k)?;
    let gi = &model.metric_inv[k];
    let xa = gi * gi * x;
    let g2 = g * g;
    let direct = eta.dotc(&(x * xi));
    let weighted = eta.dotc(&(&g2 * (&xa * xi)));
    Ok((direct - weighted).norm())
}

/// `U_{BA} = G_B^{-1} G_A`, a contraction on `C^n` when `A ⪯ B`.
pub fn contraction(model: &RiggedModel, a: usize, b: usize) -> Result<ComplexMatrix> {
    model.comparable(a, b)?;
    Ok(&model.metric_inv[b] * &model.metric[a])
}

/// Compression witness `W = G_A G_B^{-1}` of the transport `J_{BA}`, which
/// acts on transported coordinates as `X̃ ↦ W* X̃ W`.
pub fn transport_map(model: &RiggedModel, a: usize, b: usize) -> Result<Embedding> {
    model.comparable(a, b)?;
    Ok(Embedding::compression(&model.metric[a] * &model.metric_inv[b]))
}

/// `max_A ‖X‖^A` over the model's weights.
pub fn bounded_norm_model(model: &RiggedModel, x: &ComplexMatrix) -> Result<f64> {
    (0..model.len())
        .map(|k| representative(model, x, k).map(|r| r.norm))
        .try_fold(0.0_f64, |m, r| r.map(|v| m.max(v)))
}

/// Weights as indices `w00, w01, …` ordered by `⪯`, constant dimension `n`,
/// and the transport witnesses on covering pairs.
pub fn export_directed_system(model: &RiggedModel) -> Result<DirectedSystem> {
    let labels: Vec<String> = (0..model.len()).map(|k| model.label(k)).collect();
    let mut pairs = Vec::new();
    for a in 0..model.len() {
        for b in 0..model.len() {
            if a != b && model.leq(a, b)? {
                pairs.push((labels[a].clone(), labels[b].clone()));
            }
        }
    }
    let poset = IndexPoset::new(&labels, &pairs)?;
    let index: BTreeMap<&str, usize> = labels.iter().enumerate().map(|(k, l)| (l.as_str(), k)).collect();
    let mut edges = BTreeMap::new();
    for &(a, b) in poset.covers() {
        let (ka, kb) = (index[poset.label(a)], index[poset.label(b)]);
        edges.insert((a, b), transport_map(model, ka, kb)?);
    }
    let dims = vec![model.n; model.len()];
    DirectedSystem::new(poset, dims, edges)
}

/// Characterizations of bounded operators in the scale.
///
/// `(i)` holds for every matrix and is recorded as automatic. With
/// `λ* = max(λ_Re, λ_Im)` the smallest order bounds of the real and
/// imaginary parts, asserts `λ* ≤ ‖X‖_b ≤ λ_Re + λ_Im` and equality for
/// Hermitian `X`; that the norm is attained at `A = 0`; positivity
/// transport; the pairing identity on `trials` sampled vector pairs;
/// contractivity and composition of the transports; and isometry of the
/// block-diagonal embedding.
pub fn equivalence_suite<R: Rng + ?Sized>(
    model: &RiggedModel,
    x: &ComplexMatrix,
    trials: usize,
    tol: Tolerance,
    rng: &mut R,
) -> Result<Report> {
    let n = model.n;
    let mut report = Report::new("equivalence", "rigged", trials);
    let reps: Vec<Representative> = (0..model.len())
        .map(|k| representative(model, x, k))
        .collect::<Result<_>>()?;
    let bnorm = reps.iter().map(|r| r.norm).fold(0.0, f64::max);
    let id = numerics::identity(n);
    let re = numerics::hermitian_part(x);
    let im = numerics::imaginary_part(x);
    let l_re = numerics::pencil_min_lambda(&re, &id, tol).expect("identity has full range");
    let l_im = numerics::pencil_min_lambda(&im, &id, tol).expect("identity has full range");
    let lambda = l_re.max(l_im);
    report.metric("bnorm", bnorm);
    report.metric("lambda", lambda);

    report.push(
        Entry::with_status(
            "closable-bounded",
            "bounded-iff-closable-bounded",
            Status::Automatic,
            0.0,
        )
        .witness(json!({"reason": "every operator on a finite-dimensional space is bounded"})),
    );
    let scale = bnorm.max(1.0);
    report.push(Entry::check(
        "lambda-below-norm",
        "bounded-iff-order-bounded-scale",
        bnorm + tol.eps_eq * scale - lambda,
    ));
    report.push(Entry::check(
        "norm-below-lambda-sum",
        "bounded-iff-order-bounded-scale",
        l_re + l_im + tol.eps_eq * scale - bnorm,
    ));
    let hermitian = numerics::is_hermitian(x, tol);
    if hermitian {
        report.push(
            Entry::check(
                "hermitian-equality",
                "bounded-iff-order-bounded-scale",
                P_MATCH_TOLERANCE * scale - (lambda - bnorm).abs(),
            )
            .witness(json!({"lambda": lambda, "bnorm": bnorm})),
        );
    }

    let at_zero = reps[0].norm;
    let mut attained = SlackTracker::new();
    for (k, r) in reps.iter().enumerate() {
        attained.observe(
            at_zero + tol.eps_eq * scale - r.norm,
            || json!({"weight": k, "norm": r.norm, "at_zero": at_zero}),
        );
    }
    attained.observe(
        tol.eps_eq * scale - (at_zero - numerics::operator_norm(x)).abs(),
        || json!({"at_zero": at_zero}),
    );
    report.push(attained.entry("norm-at-zero-weight", "bounded-norm-at-zero-weight"));

    if hermitian {
        let psd = numerics::is_psd(x, tol);
        let worst = reps
            .iter()
            .map(|r| numerics::min_eigenvalue(&numerics::hermitian_part(&r.matrix)))
            .fold(f64::INFINITY, f64::min);
        let slack = if psd { worst + tol.eps_psd } else { -worst - tol.eps_psd };
        report.push(
            Entry::check("positivity-transport", "positivity-transport", slack)
                .witness(json!({"psd": psd, "min_eigenvalue": worst})),
        );
    } else {
        report.push(
            Entry::with_status("positivity-transport", "positivity-transport", Status::Skipped, 0.0)
                .witness(json!({"reason": "operator is not hermitian"})),
        );
    }

    let mut pairing = SlackTracker::new();
    for k in 0..model.len() {
        for t in 0..trials {
            let xi = random_vector(n, rng);
            let eta = random_vector(n, rng);
            let r = pairing_residual(model, x, k, &xi, &eta)?;
            pairing.observe(
                tol.eps_eq * scale - r,
                || json!({"weight": k, "trial": t, "residual": r}),
            );
        }
    }
    report.push(pairing.entry("pairing", "graph-norm-pairing"));

    let mut contract = SlackTracker::new();
    let mut transport = SlackTracker::new();
    for a in 0..model.len() {
        for b in 0..model.len() {
            if !model.leq(a, b)? {
                continue;
            }
            let u = contraction(model, a, b)?;
            let norm = numerics::operator_norm(&u);
            contract.observe(1.0 + tol.eps_eq - norm, || json!({"a": a, "b": b, "norm": norm}));
            let j = transport_map(model, a, b)?;
            let moved = j.apply(&reps[a].matrix);
            let r = numerics::max_abs_diff(&moved, &reps[b].matrix);
            transport.observe(tol.eps_eq * scale - r, || json!({"a": a, "b": b, "residual": r}));
            let shrink = numerics::operator_norm(&moved) - reps[a].norm;
            transport.observe(
                tol.eps_eq * scale - shrink,
                || json!({"a": a, "b": b, "norm_increase": shrink}),
            );
            if a != 0 && model.leq(0, a)? {
                let via = transport_map(model, 0, a)?.then(&j);
                let direct = transport_map(model, 0, b)?;
                let r = numerics::max_abs_diff(&via.apply(x), &direct.apply(x));
                transport.observe(tol.eps_eq * scale - r, || json!({"path": [0, a, b], "residual": r}));
            }
        }
    }
    report.push(contract.entry("scale-contraction", "scale-contraction"));
    report.push(transport.entry("transport", "transport-identity"));

    let blocks: Vec<&ComplexMatrix> = reps.iter().map(|r| &r.matrix).collect();
    let tau = numerics::operator_norm(&numerics::block_diagonal(&blocks));
    report.push(Entry::check(
        "direct-sum-isometry",
        "direct-sum-isometry",
        tol.eps_eq * scale - (tau - bnorm).abs(),
    ));
    Ok(report)
}

fn random_vector<R: Rng + ?Sized>(n: usize, rng: &mut R) -> DVector<Complex64> {
    let g = gaussian_matrix(n, 1, rng);
    DVector::from_column_slice(g.as_slice())
}

/// Runs the order structure on the exported system and compares with the
/// direct computation: bounded norm, pre-unit origin at `A = 0`, and
/// `p(x) = ‖X‖` for Hermitian `X`.
pub fn cross_model_check(model: &RiggedModel, x: &ComplexMatrix, tol: Tolerance) -> Result<Report> {
    let sys = Arc::new(export_directed_system(model)?);
    let mut report = Report::new("cross-model", sys.id(), 1);
    let direct = bounded_norm_model(model, x)?;
    let origin = sys.index(&model.label(0))?;
    let elem = CoherentElement::push_forward(&sys, origin, x.clone())?;
    let exported = elem.bounded_norm(tol).ok_or(Error::NotBounded)?.bnorm();
    let scale = direct.max(1.0);
    report.push(
        Entry::check(
            "bounded-norm",
            "cross-model-consistency",
            tol.eps_eq * scale - (exported - direct).abs(),
        )
        .witness(json!({"direct": direct, "exported": exported})),
    );
    let pre_unit = find_pre_unit(&sys, tol);
    let origin_ok = pre_unit.as_ref().is_some_and(|u| u.is_strict() && u.origin() == origin);
    report.push(
        Entry::check(
            "pre-unit-origin",
            "cross-model-consistency",
            if origin_ok { 0.0 } else { -1.0 },
        )
        .witness(json!({"origin": pre_unit.as_ref().map(|u| sys.label(u.origin()).to_string())})),
    );
    if numerics::is_hermitian(x, tol) {
        match pre_unit {
            Some(u) => {
                let p = p_value(&elem, &u, tol)?;
                report.push(
                    Entry::check(
                        "p-equals-norm",
                        "cross-model-consistency",
                        P_MATCH_TOLERANCE * scale - (p - direct).abs(),
                    )
                    .witness(json!({"p": p, "direct": direct})),
                );
            }
            None => report.push(Entry::check("p-equals-norm", "cross-model-consistency", -1.0)),
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::directed::{check_r1, check_r2, verify_axioms};
    use crate::numerics::{diag, identity};
    use crate::order::bounded_iff_order_bounded_suite;
    use crate::sampling::{random_hermitian, unit_matrix};

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    #[test]
    fn zero_weight_is_identity() {
        let m = RiggedModel::random(3, 4, 1, tol()).unwrap();
        let x = unit_matrix(3, &mut seeded(1));
        let r = representative(&m, &x, 0).unwrap();
        assert_eq!(r.matrix, x);
        assert_eq!(r.norm, numerics::operator_norm(&x));
        assert!(matches!(representative(&m, &x, 99), Err(Error::UnknownWeight(99))));
    }

    #[test]
    fn scalar_weight_quarters_the_norm() {
        let a = ComplexMatrix::from_element(1, 1, Complex64::from(3f64.sqrt()));
        let m = RiggedModel::new(1, vec![a], tol()).unwrap();
        let x = ComplexMatrix::from_element(1, 1, Complex64::from(2.0));
        assert!((representative(&m, &x, 1).unwrap().norm - 0.5).abs() < 1e-15);
    }

    #[test]
    fn pairing_identity_holds() {
        let m = RiggedModel::random(4, 5, 2, tol()).unwrap();
        let mut rng = seeded(2);
        let x = unit_matrix(4, &mut rng);
        for k in 0..m.len() {
            for _ in 0..100 {
                let (xi, eta) = (random_vector(4, &mut rng), random_vector(4, &mut rng));
                assert!(pairing_residual(&m, &x, k, &xi, &eta).unwrap() <= 1e-9);
            }
        }
    }

    #[test]
    fn contraction_cases() {
        let m = RiggedModel::random(3, 5, 3, tol()).unwrap();
        assert!(numerics::max_abs_diff(&contraction(&m, 2, 2).unwrap(), &identity(3)) < 1e-12);
        for b in 0..m.len() {
            let u = contraction(&m, 0, b).unwrap();
            assert!(numerics::max_abs_diff(&u, &m.metric_inv[b]) == 0.0);
            assert!(numerics::operator_norm(&u) <= 1.0 + 1e-12);
        }
        let incomparable = (1..m.len())
            .flat_map(|a| (1..m.len()).map(move |b| (a, b)))
            .find(|&(a, b)| !m.leq(a, b).unwrap());
        let (a, b) = incomparable.expect("random weights are rarely comparable");
        assert!(matches!(contraction(&m, a, b), Err(Error::NotComparable(_, _))));
        // B*B = A*A + C*C
        let mut rng = seeded(3);
        let a = gaussian_matrix(3, 3, &mut rng);
        let c = gaussian_matrix(3, 3, &mut rng);
        let b =
            numerics::matrix_sqrt(&numerics::hermitian_part(&(a.adjoint() * &a + c.adjoint() * &c)), tol()).unwrap();
        let m = RiggedModel::new(3, vec![a, b], tol()).unwrap();
        let u = contraction(&m, 1, 2).unwrap();
        let w = &m.metric[1] * &m.metric_inv[2];
        assert!((numerics::operator_norm(&u) - numerics::operator_norm(&w)).abs() < 1e-12);
        assert!(numerics::operator_norm(&u) < 1.0);
    }

    #[test]
    fn transport_composes_on_chain() {
        let m = RiggedModel::chain(3, 3, 4, tol()).unwrap();
        let x = unit_matrix(3, &mut seeded(4));
        assert!(numerics::max_abs_diff(&transport_map(&m, 1, 1).unwrap().apply(&x), &x) < 1e-12);
        let via = transport_map(&m, 0, 1).unwrap().then(&transport_map(&m, 1, 2).unwrap());
        let direct = transport_map(&m, 0, 2).unwrap();
        assert!(numerics::max_abs_diff(&via.apply(&x), &direct.apply(&x)) <= 1e-9);
        let xb = representative(&m, &x, 2).unwrap().matrix;
        assert!(numerics::max_abs_diff(&direct.apply(&x), &xb) <= 1e-12);
    }

    #[test]
    fn bounded_norm_cases() {
        let m = RiggedModel::random(3, 10, 5, tol()).unwrap();
        assert!((bounded_norm_model(&m, &identity(3)).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(bounded_norm_model(&m, &numerics::zeros(3)).unwrap(), 0.0);
        let x = unit_matrix(3, &mut seeded(5));
        let b = bounded_norm_model(&m, &x).unwrap();
        assert!((b - numerics::operator_norm(&x)).abs() <= 1e-9);
        for k in 0..m.len() {
            assert!(representative(&m, &x, k).unwrap().norm <= b + 1e-12);
        }
    }

    #[test]
    fn join_is_added_and_dominates() {
        let m = RiggedModel::random(3, 4, 6, tol()).unwrap();
        assert_eq!(m.len(), 5);
        let top = m.len() - 1;
        assert!((0..m.len()).all(|k| m.leq(k, top).unwrap()));
        let c = RiggedModel::chain(3, 4, 6, tol()).unwrap();
        assert_eq!(c.len(), 4);
    }

    #[test]
    fn equivalence_suite_cases() {
        let m = RiggedModel::random(3, 5, 7, tol()).unwrap();
        let mut rng = seeded(7);
        let r = equivalence_suite(&m, &identity(3), 5, tol(), &mut rng).unwrap();
        assert!(r.all_passed(), "{}", r.summary());
        assert_eq!(r.to_value()["metrics"]["lambda"].as_f64().unwrap(), 1.0);
        let r = equivalence_suite(&m, &diag(&[2.0, -5.0, 0.0]), 5, tol(), &mut rng).unwrap();
        assert!(r.all_passed());
        assert!((r.to_value()["metrics"]["lambda"].as_f64().unwrap() - 5.0).abs() < 1e-12);
        for _ in 0..20 {
            let x = random_hermitian(3, &mut rng);
            assert!(equivalence_suite(&m, &x, 2, tol(), &mut rng).unwrap().all_passed());
            let g = unit_matrix(3, &mut rng);
            let rep = equivalence_suite(&m, &g, 2, tol(), &mut rng).unwrap();
            assert!(rep.all_passed(), "{}", rep.summary());
        }
    }

    #[test]
    fn export_trivial_and_single_edge() {
        let m = RiggedModel::new(2, vec![], tol()).unwrap();
        let sys = export_directed_system(&m).unwrap();
        assert_eq!(sys.poset().len(), 1);
        let a = gaussian_matrix(2, 2, &mut seeded(8));
        let m = RiggedModel::new(2, vec![a], tol()).unwrap();
        let sys = export_directed_system(&m).unwrap();
        let (lo, hi) = (sys.index("w00").unwrap(), sys.index("w01").unwrap());
        let w = sys.edge(lo, hi).unwrap().witness().unwrap();
        assert!(numerics::max_abs_diff(w, &m.metric_inv[1]) < 1e-12);
    }

    #[test]
    fn exported_chain_passes_the_axioms_and_order_suite() {
        let m = RiggedModel::chain(3, 4, 9, tol()).unwrap();
        let sys = Arc::new(export_directed_system(&m).unwrap());
        let mut rng = seeded(9);
        assert!(verify_axioms(&sys, 10, tol(), &mut rng).all_passed());
        assert!(check_r1(&sys, 10, tol(), &mut rng).holds);
        assert!(check_r2(&sys, tol()).iter().all(|e| e.holds));
        let r = bounded_iff_order_bounded_suite(&sys, 10, tol(), &mut rng).unwrap();
        assert!(r.all_passed(), "{}", r.summary());
        let x = random_hermitian(3, &mut rng);
        let c = cross_model_check(&m, &x, tol()).unwrap();
        assert!(c.all_passed(), "{}", c.summary());
    }

    #[test]
    fn exported_random_model_is_consistent() {
        let m = RiggedModel::random(3, 6, 10, tol()).unwrap();
        let x = random_hermitian(3, &mut seeded(10));
        assert!(cross_model_check(&m, &x, tol()).unwrap().all_passed());
    }

    #[test]
    fn json_round_trip() {
        let m = RiggedModel::random(2, 4, 11, tol()).unwrap();
        let back = RiggedModel::from_value(m.to_value(), tol()).unwrap();
        assert_eq!(back.to_value(), m.to_value());
    }
}
