//! Partial multiplication `x·y = φ_β(x_β w_β y_β)` defined by a coherent
//! positive weight family `w`.
//!
//! The indexwise products `x_β w_β y_β` need not be coherent because the
//! embeddings are not multiplicative. A product is defined when they are
//! coherent on every comparable pair of the operands' common domain; the
//! top alone would make every product defined, so it is never the only
//! index inspected when the domain is larger.

use std::sync::Arc;

use rand::Rng;
use serde::Serialize;
use serde_json::json;

use crate::directed::{DirectedSystem, IndexId};
use crate::elements::CoherentElement;
use crate::error::{Error, Result};
use crate::numerics::{self, ComplexMatrix, Tolerance};
use crate::report::{Entry, Report, SlackTracker, Status};
use crate::sampling::gaussian_matrix;

/// Largest accepted `|‖x*·x‖_b − ‖x‖_b²|`.
pub const C_STAR_TOLERANCE: f64 = 1e-8;

/// Coherent family of PSD weights with a representative at every index.
#[derive(Debug, Clone)]
pub struct WeightFamily {
    element: CoherentElement,
}

fn coherence_bound(tol: Tolerance, m: &ComplexMatrix) -> f64 {
    tol.eps_eq * numerics::max_abs(m).max(1.0)
}

impl WeightFamily {
    pub fn new(element: CoherentElement, tol: Tolerance) -> Result<Self> {
        if !element.is_full() {
            return Err(Error::BadShape("weights need a representative at every index".into()));
        }
        for w in element.reps().values() {
            let m = numerics::min_eigenvalue(w);
            if numerics::hermitian_deviation(w) > tol.eps_eq || m < -tol.eps_psd {
                return Err(Error::NotPositiveDefinite { min_eigenvalue: m });
            }
        }
        let scale = element.sup_norm().max(1.0);
        if element.coherence_residual() > tol.eps_eq * scale {
            return Err(Error::BadShape("weights are not coherent".into()));
        }
        Ok(Self { element })
    }

    /// Push `w_γ` forward from `γ` and pull it back to every other index.
    pub fn from_origin(sys: &Arc<DirectedSystem>, gamma: IndexId, w: ComplexMatrix, tol: Tolerance) -> Result<Self> {
        let e = CoherentElement::push_forward(sys, gamma, w)?
            .extend_to_all(tol)
            .ok_or(Error::NotBounded)?;
        Self::new(e, tol)
    }

    /// `w_α = I` everywhere; coherent only when every map is unital.
    pub fn identity(sys: &Arc<DirectedSystem>, tol: Tolerance) -> Result<Self> {
        let reps = sys.poset().ids().map(|a| (a, numerics::identity(sys.dim(a)))).collect();
        Self::new(CoherentElement::from_reps(sys, reps)?, tol)
    }

    pub fn element(&self) -> &CoherentElement {
        &self.element
    }

    pub fn rep(&self, a: IndexId) -> &ComplexMatrix {
        self.element.rep(a).expect("weights are defined everywhere")
    }

    /// `max_α ‖w_α‖`, the constant of the Banach inequality.
    pub fn constant(&self) -> f64 {
        self.element.sup_norm()
    }

    /// `w_α = I_α` for every α (within `eps_eq`).
    pub fn is_identity(&self, tol: Tolerance) -> bool {
        self.element
            .reps()
            .values()
            .all(|w| numerics::approx_eq(w, &numerics::identity(w.nrows()), tol))
    }

    pub fn scale(&self, c: f64) -> Self {
        Self {
            element: self.element.scale_real(c),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairResidual {
    pub lower: String,
    pub upper: String,
    pub residual: f64,
}

#[derive(Debug, Clone)]
pub struct PartialProduct {
    /// First minimal index of the common domain.
    pub witness: IndexId,
    pub value: Option<CoherentElement>,
    pub residuals: Vec<PairResidual>,
}

impl PartialProduct {
    pub fn is_defined(&self) -> bool {
        self.value.is_some()
    }

    pub fn worst_residual(&self) -> f64 {
        self.residuals.iter().map(|r| r.residual).fold(0.0, f64::max)
    }
}

/// `x·y` on the common domain of `x` and `y`, defined when the indexwise
/// products are coherent on every comparable pair there.
pub fn multiply(x: &CoherentElement, y: &CoherentElement, w: &WeightFamily, tol: Tolerance) -> Result<PartialProduct> {
    if !x.same_system(y) || !x.same_system(&w.element) {
        return Err(Error::SystemMismatch);
    }
    let sys = x.system();
    let p = sys.poset();
    let domain: Vec<IndexId> = x.domain().into_iter().filter(|a| y.rep(*a).is_some()).collect();
    let reps = domain
        .iter()
        .map(|&b| (b, x.rep(b).unwrap() * w.rep(b) * y.rep(b).unwrap()))
        .collect();
    let z = CoherentElement::from_reps(sys, reps)?;
    let mut residuals = Vec::new();
    let mut defined = true;
    for &a in &domain {
        for &b in &domain {
            if p.lt(a, b) {
                let zb = z.rep(b).unwrap();
                let r = numerics::max_abs_diff(&sys.push(a, b, z.rep(a).unwrap()), zb);
                defined &= r <= coherence_bound(tol, zb);
                residuals.push(PairResidual {
                    lower: sys.label(a).to_string(),
                    upper: sys.label(b).to_string(),
                    residual: r,
                });
            }
        }
    }
    let witness = z.minimal_indices()[0];
    Ok(PartialProduct {
        witness,
        value: defined.then_some(z),
        residuals,
    })
}

/// Defined product or [`Error::UndefinedProduct`].
pub fn product(x: &CoherentElement, y: &CoherentElement, w: &WeightFamily, tol: Tolerance) -> Result<CoherentElement> {
    let pp = multiply(x, y, w, tol)?;
    let worst = pp.worst_residual();
    pp.value
        .ok_or_else(|| Error::UndefinedProduct(format!("coherence residual {worst:e}")))
}

/// A unit `e` of the partial multiplication, `e_α = w_α⁻¹`.
#[derive(Debug, Clone)]
pub struct Unit(CoherentElement);

impl Unit {
    pub fn element(&self) -> &CoherentElement {
        &self.0
    }
}

/// The unit exists iff every `w_α` is invertible and the inverses are
/// coherent. The returned unit is audited by `e·e = e` and `e·w = w`.
pub fn find_unit(w: &WeightFamily, tol: Tolerance) -> Option<Unit> {
    let sys = w.element.system();
    let mut reps = std::collections::BTreeMap::new();
    for a in sys.poset().ids() {
        reps.insert(a, numerics::hermitian_inverse(w.rep(a), tol).ok()?);
    }
    let e = CoherentElement::from_reps(sys, reps).ok()?;
    let p = sys.poset();
    for a in p.ids() {
        for b in p.ids().filter(|&b| p.lt(a, b)) {
            let eb = e.rep(b).unwrap();
            if numerics::max_abs_diff(&sys.push(a, b, e.rep(a).unwrap()), eb) > coherence_bound(tol, eb) {
                return None;
            }
        }
    }
    let ee = product(&e, &e, w, tol).ok()?;
    let ew = product(&e, &w.element, w, tol).ok()?;
    let close = |u: &CoherentElement, v: &CoherentElement| {
        u.reps()
            .iter()
            .all(|(a, m)| numerics::max_abs_diff(m, v.rep(*a).unwrap()) <= coherence_bound(tol, m))
    };
    (close(&ee, &e) && close(&ew, &w.element)).then_some(Unit(e))
}

/// `‖e‖_b = 1`.
pub fn is_bounded_unit(e: &Unit, tol: Tolerance) -> bool {
    e.0.bounded_norm(tol)
        .is_some_and(|b| (b.bnorm() - 1.0).abs() <= tol.eps_eq)
}

/// Universal-multiplier status of `a` relative to a finite generator list.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct MultiplierFlags {
    /// `a·x` defined for every generator.
    pub left: bool,
    /// `x·a` defined for every generator.
    pub right: bool,
}

pub fn universal_multiplier_check(
    a: &CoherentElement,
    w: &WeightFamily,
    generators: &[CoherentElement],
    tol: Tolerance,
) -> Result<MultiplierFlags> {
    let mut flags = MultiplierFlags {
        left: true,
        right: true,
    };
    for x in generators {
        flags.left &= multiply(a, x, w, tol)?.is_defined();
        flags.right &= multiply(x, a, w, tol)?.is_defined();
    }
    Ok(flags)
}

/// Random element with a representative at every index, or `None` when the
/// first minimal index does not reach everything.
pub fn random_full_element<R: Rng + ?Sized>(
    sys: &Arc<DirectedSystem>,
    tol: Tolerance,
    rng: &mut R,
) -> Option<CoherentElement> {
    let g = sys.poset().minimal()[0];
    let n = sys.dim(g);
    let m = gaussian_matrix(n, n, rng);
    let m = m.unscale(numerics::operator_norm(&m)).scale(rng.random_range(0.2..2.0));
    CoherentElement::push_forward(sys, g, m).ok()?.extend_to_all(tol)
}

/// Counts defined and undefined products of random full-domain pairs.
/// Reports the first undefined pair as the witness.
pub fn partiality_probe<R: Rng + ?Sized>(
    sys: &Arc<DirectedSystem>,
    w: &WeightFamily,
    trials: usize,
    tol: Tolerance,
    rng: &mut R,
) -> Result<Entry> {
    let mut undefined = 0usize;
    let mut witness = None;
    for t in 0..trials {
        let (Some(x), Some(y)) = (random_full_element(sys, tol, rng), random_full_element(sys, tol, rng)) else {
            continue;
        };
        let pp = multiply(&x, &y, w, tol)?;
        if !pp.is_defined() {
            undefined += 1;
            witness.get_or_insert_with(
                || json!({"trial": t, "worst_residual": pp.worst_residual(), "x": x.to_value(), "y": y.to_value()}),
            );
        }
    }
    let e = Entry::check(
        "undefined-product",
        "partiality",
        if undefined > 0 { 0.0 } else { -1.0 },
    );
    Ok(match witness {
        Some(wj) => e.witness(json!({"undefined": undefined, "first": wj})),
        None => e,
    })
}

/// Banach inequality `‖x·y‖_b ≤ C ‖x‖_b ‖y‖_b` with `C = max ‖w_α‖` over
/// random full-domain pairs, plus the C*-identity when `w = I`.
///
/// Needs a unit; whether it is bounded is reported.
pub fn banach_inequality_suite<R: Rng + ?Sized>(
    sys: &Arc<DirectedSystem>,
    w: &WeightFamily,
    trials: usize,
    tol: Tolerance,
    rng: &mut R,
) -> Result<Report> {
    let unit = find_unit(w, tol).ok_or_else(|| Error::PreconditionsUnmet("weights admit no unit".into()))?;
    let mut report = Report::new("mult", sys.id(), trials);
    let c = w.constant();
    report.metric("constant", c);
    let bounded_unit = is_bounded_unit(&unit, tol);
    report.push(
        Entry::with_status("unit", "unit-criterion", Status::Pass, 0.0).witness(json!({"bounded_unit": bounded_unit})),
    );
    let identity_weights = w.is_identity(tol);
    let mut banach = SlackTracker::new();
    let mut cstar = SlackTracker::new();
    let mut defined = 0usize;
    let mut worst_ratio = 0.0_f64;
    for t in 0..trials {
        let (Some(x), Some(y)) = (random_full_element(sys, tol, rng), random_full_element(sys, tol, rng)) else {
            continue;
        };
        let pp = multiply(&x, &y, w, tol)?;
        let Some(z) = pp.value else { continue };
        defined += 1;
        let (bx, by, bz) = (x.sup_norm(), y.sup_norm(), z.sup_norm());
        let rhs = c * bx * by;
        if rhs > 0.0 {
            worst_ratio = worst_ratio.max(bz / (bx * by));
        }
        banach.observe(rhs + tol.eps_eq - bz, || json!({"trial": t, "lhs": bz, "rhs": rhs}));
        if identity_weights {
            if let Some(xx) = multiply(&x.involution(), &x, w, tol)?.value {
                let d = (xx.sup_norm() - bx * bx).abs();
                cstar.observe(
                    C_STAR_TOLERANCE - d,
                    || json!({"trial": t, "lhs": xx.sup_norm(), "rhs": bx * bx}),
                );
            }
        }
    }
    report.push(banach.entry("banach", "banach-inequality"));
    if identity_weights {
        report.push(cstar.entry("c-star", "c-star-property"));
    } else {
        report.push(
            Entry::with_status("c-star", "c-star-property", Status::Skipped, 0.0)
                .witness(json!({"reason": "weights differ from the identity"})),
        );
    }
    report.metric("defined_products", defined as f64);
    report.metric("empirical_ratio", worst_ratio);
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::directed::{generate_compression_system, generate_unitary_system, SystemShape};
    use crate::numerics::{identity, max_abs_diff, operator_norm};
    use crate::order::find_pre_unit;
    use crate::sampling::{random_psd, seeded};

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    fn strict_chain(seed: u64) -> (Arc<DirectedSystem>, WeightFamily) {
        let sys = Arc::new(generate_compression_system(&SystemShape::chain(&[2, 3, 4]), seed).unwrap());
        let u = find_pre_unit(&sys, tol()).unwrap();
        let w = WeightFamily::new(u.element().clone(), tol()).unwrap();
        (sys, w)
    }

    #[test]
    fn zero_product_is_defined() {
        let (sys, w) = strict_chain(1);
        let z = CoherentElement::zero(&sys);
        let pp = multiply(&z, &z, &w, tol()).unwrap();
        assert!(pp.value.unwrap().sup_norm() == 0.0);
    }

    #[test]
    fn identity_chain_products_are_pointwise() {
        let sys = Arc::new(DirectedSystem::identity_chain(3, 2));
        let w = WeightFamily::identity(&sys, tol()).unwrap();
        let mut rng = seeded(2);
        for _ in 0..5 {
            let x = random_full_element(&sys, tol(), &mut rng).unwrap();
            let y = random_full_element(&sys, tol(), &mut rng).unwrap();
            let z = product(&x, &y, &w, tol()).unwrap();
            let a = sys.index("i0").unwrap();
            assert!(max_abs_diff(z.rep(a).unwrap(), &(x.rep(a).unwrap() * y.rep(a).unwrap())) < 1e-14);
        }
    }

    #[test]
    fn strict_compression_products_are_partial() {
        let (sys, w) = strict_chain(3);
        let mut rng = seeded(3);
        let x = random_full_element(&sys, tol(), &mut rng).unwrap();
        let y = random_full_element(&sys, tol(), &mut rng).unwrap();
        let pp = multiply(&x, &y, &w, tol()).unwrap();
        assert!(!pp.is_defined());
        // residual computed directly on the first edge
        let (a, b) = (sys.index("i0").unwrap(), sys.index("i1").unwrap());
        let e = sys.edge(a, b).unwrap();
        let direct = max_abs_diff(
            &e.apply(&(x.rep(a).unwrap() * w.rep(a) * y.rep(a).unwrap())),
            &(e.apply(x.rep(a).unwrap()) * e.apply(w.rep(a)) * e.apply(y.rep(a).unwrap())),
        );
        let reported = pp
            .residuals
            .iter()
            .find(|r| r.lower == "i0" && r.upper == "i1")
            .unwrap()
            .residual;
        assert!((direct - reported).abs() < 1e-12);
        assert!(matches!(product(&x, &y, &w, tol()), Err(Error::UndefinedProduct(_))));
    }

    #[test]
    fn unit_detection() {
        let sys = Arc::new(DirectedSystem::identity_chain(3, 2));
        let w = WeightFamily::identity(&sys, tol()).unwrap();
        let e = find_unit(&w, tol()).unwrap();
        assert!(is_bounded_unit(&e, tol()));
        let ee = product(e.element(), e.element(), &w, tol()).unwrap();
        assert!(ee.approx_eq(e.element(), tol()));

        let mut singular = identity(2);
        singular[(1, 1)] = numerics::ZERO;
        let ws = WeightFamily::from_origin(&sys, sys.index("i0").unwrap(), singular, tol()).unwrap();
        assert!(find_unit(&ws, tol()).is_none());

        let half = w.scale(0.5);
        let e2 = find_unit(&half, tol()).unwrap();
        assert!((e2.element().sup_norm() - 2.0).abs() < 1e-12);
        assert!(!is_bounded_unit(&e2, tol()));

        // unitary maps keep inverses coherent for any positive definite origin weight
        let usys = Arc::new(generate_unitary_system(&SystemShape::chain(&[3, 3, 3]), 4).unwrap());
        let mut wg = random_psd(3, &mut seeded(4)) + identity(3);
        wg = wg.unscale(numerics::min_eigenvalue(&wg));
        let wf = WeightFamily::from_origin(&usys, usys.index("i0").unwrap(), wg, tol()).unwrap();
        let e = find_unit(&wf, tol()).unwrap();
        let inv_norm = wf
            .element()
            .reps()
            .values()
            .map(|m| operator_norm(&numerics::hermitian_inverse(m, tol()).unwrap()))
            .fold(0.0, f64::max);
        assert!((inv_norm - 1.0).abs() < 1e-9);
        assert!(is_bounded_unit(&e, tol()));

        let (_, wstrict) = strict_chain(5);
        assert!(find_unit(&wstrict, tol()).is_none());
    }

    #[test]
    fn banach_suite_cases() {
        let mut rng = seeded(6);
        let sys = Arc::new(DirectedSystem::identity_chain(3, 2));
        let w = WeightFamily::identity(&sys, tol()).unwrap();
        let r = banach_inequality_suite(&sys, &w, 30, tol(), &mut rng).unwrap();
        assert!(r.all_passed(), "{}", r.summary());
        assert_eq!(r.entry("c-star").unwrap().status, Status::Pass);
        let e = find_unit(&w, tol()).unwrap();
        let ee = product(e.element(), e.element(), &w, tol()).unwrap();
        assert!(ee.sup_norm() <= 1.0 + 1e-12);

        let half = w.scale(0.5);
        let r = banach_inequality_suite(&sys, &half, 30, tol(), &mut rng).unwrap();
        assert!(r.all_passed());
        assert!((r.metrics["constant"] - 0.5).abs() < 1e-12);
        assert!(r.entry("banach").unwrap().worst_slack > 0.0);

        let (csys, cw) = strict_chain(7);
        assert!(matches!(
            banach_inequality_suite(&csys, &cw, 5, tol(), &mut rng),
            Err(Error::PreconditionsUnmet(_))
        ));
    }

    #[test]
    fn universal_multipliers() {
        let (sys, w) = strict_chain(8);
        let mut rng = seeded(8);
        let gens: Vec<_> = (0..3)
            .map(|_| random_full_element(&sys, tol(), &mut rng).unwrap())
            .collect();
        let z = CoherentElement::zero(&sys);
        assert_eq!(
            universal_multiplier_check(&z, &w, &gens, tol()).unwrap(),
            MultiplierFlags {
                left: true,
                right: true
            }
        );
        let top_only = CoherentElement::push_forward(&sys, sys.top(), gaussian_matrix(4, 4, &mut rng)).unwrap();
        let f = universal_multiplier_check(&top_only, &w, &gens, tol()).unwrap();
        assert!(f.left && f.right);
        let generic = random_full_element(&sys, tol(), &mut rng).unwrap();
        let f = universal_multiplier_check(&generic, &w, &gens, tol()).unwrap();
        assert!(!f.left && !f.right);

        let isys = Arc::new(DirectedSystem::identity_chain(2, 2));
        let iw = WeightFamily::identity(&isys, tol()).unwrap();
        let igens: Vec<_> = (0..3)
            .map(|_| random_full_element(&isys, tol(), &mut rng).unwrap())
            .collect();
        let a = random_full_element(&isys, tol(), &mut rng).unwrap();
        let f = universal_multiplier_check(&a, &iw, &igens, tol()).unwrap();
        assert!(f.left && f.right);
    }

    #[test]
    fn partiality_probe_finds_undefined() {
        let (sys, w) = strict_chain(9);
        let e = partiality_probe(&sys, &w, 5, tol(), &mut seeded(9)).unwrap();
        assert_eq!(e.status, Status::Pass);
    }
}
