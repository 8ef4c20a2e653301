use rand::Rng;
use serde_json::{json, Value};

use super::{DirectedSystem, Embedding, RANK_THRESHOLD};
use crate::numerics::{self, ComplexMatrix, Tolerance};
use crate::report::{Entry, Report, SlackTracker, Status};
use crate::sampling::{random_indefinite, random_psd, unit_matrix};

fn edge_label(sys: &DirectedSystem, a: super::IndexId, b: super::IndexId) -> String {
    format!("{}->{}", sys.label(a), sys.label(b))
}

/// Checks every axiom of a directed system of matrix algebras.
///
/// Structural facts (directedness, monotone dimensions) are enforced when
/// the system is built and appear as automatic entries. The remaining
/// checks sample `trials` unit-norm matrices per edge; the composition law
/// is checked on every composable triple.
pub fn verify_axioms<R: Rng + ?Sized>(sys: &DirectedSystem, trials: usize, tol: Tolerance, rng: &mut R) -> Report {
    let trials = trials.max(1);
    let mut report = Report::new("axioms", sys.id(), trials);
    let p = sys.poset();
    report.push(
        Entry::with_status("directed", "directed-index-set", Status::Automatic, 0.0)
            .witness(json!({"top": sys.label(p.top())})),
    );
    report.push(Entry::with_status(
        "dims-monotone",
        "dims-monotone",
        Status::Automatic,
        0.0,
    ));

    let mut identity = SlackTracker::new();
    for a in p.ids() {
        let x = unit_matrix(sys.dim(a), rng);
        let r = numerics::max_abs_diff(&sys.push(a, a, &x), &x);
        identity.observe(tol.eps_eq - r, || json!({"index": sys.label(a), "residual": r}));
    }
    report.push(identity.entry("identity", "identity-embedding"));

    let mut composition = SlackTracker::new();
    for (a, b, c) in p.composable_triples() {
        for _ in 0..trials {
            let x = unit_matrix(sys.dim(a), rng);
            let two_step = sys.push(b, c, &sys.push(a, b, &x));
            let r = numerics::max_abs_diff(&two_step, &sys.push(a, c, &x));
            composition.observe(
                tol.eps_eq - r,
                || json!({"triple": [sys.label(a), sys.label(b), sys.label(c)], "residual": r}),
            );
        }
    }
    report.push(composition.entry("composition", "composition-law"));

    let mut injective = SlackTracker::new();
    let mut involution = SlackTracker::new();
    let mut order = SlackTracker::new();
    let mut schwarz = SlackTracker::new();
    let mut contractive = SlackTracker::new();
    for ((a, b), e) in sys.edges() {
        let label = edge_label(sys, a, b);
        let margin = e.injectivity_margin();
        injective.observe(
            margin - RANK_THRESHOLD,
            || json!({"edge": label, "min_singular_value": margin}),
        );
        let n = sys.dim(a);
        let id = numerics::identity(n);
        let r = numerics::operator_norm(&e.apply(&id));
        contractive.observe(
            1.0 + tol.eps_eq - r,
            || json!({"edge": label, "input": "identity", "image_norm": r}),
        );
        for t in 0..trials {
            let x = unit_matrix(n, rng);
            let jx = e.apply(&x);
            let r = numerics::max_abs_diff(&e.apply(&x.adjoint()), &jx.adjoint());
            involution.observe(tol.eps_eq - r, || json!({"edge": label, "trial": t, "residual": r}));

            let pos = random_psd(n, rng);
            let m = numerics::min_eigenvalue(&e.apply(&pos));
            order.observe(
                m + tol.eps_psd,
                || json!({"edge": label, "trial": t, "min_eigenvalue": m}),
            );

            let gap = e.apply(&(x.adjoint() * &x)) - jx.adjoint() * &jx;
            let m = numerics::min_eigenvalue(&gap);
            schwarz.observe(
                m + tol.eps_psd,
                || json!({"edge": label, "trial": t, "min_eigenvalue": m}),
            );

            let (nx, njx) = (numerics::operator_norm(&x), numerics::operator_norm(&jx));
            contractive.observe(
                nx + tol.eps_eq - njx,
                || json!({"edge": label, "trial": t, "input_norm": nx, "image_norm": njx}),
            );
        }
    }
    report.push(injective.entry("injective", "injective-embedding"));
    report.push(involution.entry("involution", "involution-preserving"));
    report.push(order.entry("order-preserving", "order-preserving"));
    report.push(schwarz.entry("schwarz", "schwarz-inequality"));
    report.push(contractive.entry("contractive", "contractive-embedding"));
    report
}

/// Outcome of the positivity-reflection check.
#[derive(Debug, Clone, PartialEq)]
pub struct R1Verdict {
    pub holds: bool,
    /// `Some(true)` when every edge is a compression with full row rank,
    /// which proves reflection; `None` when some edge has no witness.
    pub structural: Option<bool>,
    pub witness: Option<Value>,
}

/// Nonzero Hermitian matrix in the kernel of the map, if any.
fn hermitian_kernel_element(e: &Embedding) -> Option<ComplexMatrix> {
    let s = e.superoperator_matrix();
    let n = e.source_dim();
    let svd = s.svd(false, true);
    let v_t = svd.v_t.as_ref()?;
    let rows = v_t.nrows();
    let sv = |k: usize| svd.singular_values.get(k).copied().unwrap_or(0.0);
    for k in 0..rows {
        if sv(k) > RANK_THRESHOLD {
            continue;
        }
        let v = v_t.row(k).adjoint();
        let m = numerics::unvectorize(&v, n);
        // the kernel of a Hermitian-preserving map is closed under adjoint
        for cand in [numerics::hermitian_part(&m), numerics::imaginary_part(&m)] {
            if numerics::max_abs(&cand) > 1e-6 && numerics::max_abs(&e.apply(&cand)) <= 1e-9 {
                return Some(cand);
            }
        }
    }
    None
}

/// Does every edge reflect positivity (`j(x) ⪰ 0 ⟹ x ⪰ 0`)?
///
/// Searches kernel directions first (a nonzero Hermitian kernel element or
/// the projector onto `ker W*` both give explicit counterexamples), then
/// samples `trials` indefinite Hermitian inputs per edge.
pub fn check_r1<R: Rng + ?Sized>(sys: &DirectedSystem, trials: usize, tol: Tolerance, rng: &mut R) -> R1Verdict {
    let mut structural = Some(true);
    let mut witness = None;
    for ((a, b), e) in sys.edges() {
        let label = edge_label(sys, a, b);
        match e.witness() {
            Some(w) => {
                let sv = numerics::singular_values(&w.adjoint());
                let full_row_rank = w.nrows() <= w.ncols() && sv.iter().all(|&s| s > RANK_THRESHOLD);
                if !full_row_rank {
                    structural = structural.map(|_| false);
                    if witness.is_none() {
                        // v ⟂ range(W): W*(−vv*)W = 0 ⪰ 0 while −vv* is not PSD
                        let (_, vecs) = numerics::hermitian_eigen(&(w * w.adjoint()));
                        let v = vecs.column(0).into_owned();
                        let x = -(&v * v.adjoint());
                        witness = Some(json!({
                            "edge": label,
                            "kind": "range-complement",
                            "x": numerics::MatrixJson::from(&x),
                        }));
                    }
                }
            }
            None => {
                structural = None;
                if witness.is_none() {
                    if let Some(k) = hermitian_kernel_element(e) {
                        let x = if numerics::is_psd(&k, tol) { -k } else { k };
                        witness = Some(json!({
                            "edge": label,
                            "kind": "kernel",
                            "x": numerics::MatrixJson::from(&x),
                        }));
                    }
                }
            }
        }
        for t in 0..trials {
            if witness.is_some() {
                break;
            }
            let x = random_indefinite(sys.dim(a), rng);
            if numerics::is_psd(&e.apply(&x), tol) {
                witness = Some(json!({
                    "edge": label,
                    "kind": "sample",
                    "trial": t,
                    "x": numerics::MatrixJson::from(&x),
                }));
            }
        }
    }
    R1Verdict {
        holds: witness.is_none(),
        structural,
        witness,
    }
}

/// Unit-in-range result for one edge.
#[derive(Debug, Clone, PartialEq)]
pub struct R2Edge {
    pub src: String,
    pub dst: String,
    pub holds: bool,
    pub residual: f64,
}

/// Solves `j(x) = I` by least squares on every edge; holds when the
/// residual is at most `eps_eq · dim(target)`.
pub fn check_r2(sys: &DirectedSystem, tol: Tolerance) -> Vec<R2Edge> {
    sys.edges()
        .map(|((a, b), e)| {
            let (_, residual) = e.preimage(&numerics::identity(sys.dim(b)));
            R2Edge {
                src: sys.label(a).to_string(),
                dst: sys.label(b).to_string(),
                holds: residual <= tol.eps_eq * sys.dim(b) as f64,
                residual,
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::directed::{generate_compression_system, IndexPoset, SystemShape};
    use crate::sampling::{random_contraction, seeded};

    fn chain2(w: ComplexMatrix) -> DirectedSystem {
        let (m, n) = w.shape();
        DirectedSystem::from_compressions(
            IndexPoset::chain(&["a", "b"]).unwrap(),
            vec![m, n],
            vec![(("a", "b"), w)],
        )
        .unwrap()
    }

    #[test]
    fn identity_chain_passes_everything() {
        let sys = DirectedSystem::identity_chain(3, 2);
        let mut rng = seeded(1);
        let r = verify_axioms(&sys, 10, Tolerance::default(), &mut rng);
        assert!(r.all_passed(), "{}", r.summary());
        assert!(check_r1(&sys, 10, Tolerance::default(), &mut rng).holds);
        assert!(check_r2(&sys, Tolerance::default()).iter().all(|e| e.holds));
    }

    #[test]
    fn generated_chain_passes() {
        let sys = generate_compression_system(&SystemShape::chain(&[1, 2, 4]), 7).unwrap();
        let r = verify_axioms(&sys, 20, Tolerance::default(), &mut seeded(2));
        assert!(r.all_passed(), "{}", r.summary());
    }

    #[test]
    fn vee_and_diamond_pass() {
        for shape in [SystemShape::vee(2, 3, 3), SystemShape::diamond(1, 2, 3, 4)] {
            let sys = generate_compression_system(&shape, 3).unwrap();
            let r = verify_axioms(&sys, 10, Tolerance::default(), &mut seeded(3));
            assert!(r.all_passed(), "{}", r.summary());
        }
    }

    #[test]
    fn scaled_witness_breaks_contractivity() {
        let mut rng = seeded(4);
        let w = random_contraction(2, 2, &mut rng);
        let sys = chain2(w.scale(1.5));
        let r = verify_axioms(&sys, 5, Tolerance::default(), &mut rng);
        let e = r.entry("contractive").unwrap();
        assert_eq!(e.status, Status::Fail);
        // direct: ‖W*IW‖ = ‖W‖² · 2.25 > 1 for x = I
        let direct = numerics::operator_norm(&(w.adjoint() * &w)) * 2.25;
        assert!(direct > 1.0 || e.worst_slack < 0.0);
    }

    #[test]
    fn schwarz_gap_matches_algebra() {
        // j(x*x) − j(x)*j(x) = W*x*(I − WW*)xW
        let mut rng = seeded(5);
        let w = random_contraction(2, 3, &mut rng);
        let x = unit_matrix(2, &mut rng);
        let e = Embedding::compression(w.clone());
        let gap = e.apply(&(x.adjoint() * &x)) - e.apply(&x).adjoint() * e.apply(&x);
        let direct = w.adjoint() * x.adjoint() * (numerics::identity(2) - &w * w.adjoint()) * &x * &w;
        assert!(numerics::max_abs_diff(&gap, &direct) < 1e-12);
    }

    #[test]
    fn rank_deficient_witness_fails_r1() {
        let mut w = numerics::zeros(2).resize(2, 3, numerics::ZERO);
        w[(0, 0)] = numerics::ONE;
        let sys = chain2(w);
        let v = check_r1(&sys, 5, Tolerance::default(), &mut seeded(6));
        assert!(!v.holds);
        assert_eq!(v.structural, Some(false));
    }

    #[test]
    fn padded_superoperator_fails_r1() {
        // x ↦ (W*xW) ⊕ 0 with rank-one W
        let mut w = numerics::zeros(2);
        w[(0, 0)] = numerics::ONE;
        let e = Embedding::from_linear_map(2, 3, |x| {
            let c = w.adjoint() * x * &w;
            numerics::block_diagonal(&[&c, &numerics::zeros(1)])
        });
        let poset = IndexPoset::chain(&["a", "b"]).unwrap();
        let (a, b) = (poset.id("a").unwrap(), poset.id("b").unwrap());
        let sys = DirectedSystem::new(poset, vec![2, 3], [((a, b), e)].into_iter().collect()).unwrap();
        let v = check_r1(&sys, 5, Tolerance::default(), &mut seeded(7));
        assert!(!v.holds);
        assert_eq!(v.structural, None);
        let x: ComplexMatrix = serde_json::from_value::<numerics::MatrixJson>(v.witness.unwrap()["x"].clone())
            .unwrap()
            .try_into()
            .unwrap();
        assert!(!numerics::is_psd(&x, Tolerance::default()));
        assert!(numerics::is_psd(&sys.push(a, b, &x), Tolerance::default()));
    }

    #[test]
    fn r2_on_square_and_strict_edges() {
        let mut rng = seeded(8);
        let w = random_contraction(3, 3, &mut rng);
        let sys = chain2(w.clone());
        assert!(check_r2(&sys, Tolerance::default())[0].holds);
        let e = Embedding::compression(w.clone());
        let expected = (&w * w.adjoint()).try_inverse().unwrap();
        let (x, _) = e.preimage(&numerics::identity(3));
        assert!(numerics::max_abs_diff(&x, &expected) < 1e-8);

        let strict = generate_compression_system(&SystemShape::chain(&[2, 3]), 9).unwrap();
        assert!(!check_r2(&strict, Tolerance::default())[0].holds);
    }
}
