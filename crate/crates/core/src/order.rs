//! Pre-units, order bounds and the quantity `p(x)`.
//!
//! A pre-unit is the push-forward `u = φ_γ(I_γ)` of a unit, Hermitian and
//! with every representative of norm at most one. An element is order
//! bounded when `−λu ≤ Re x, Im x ≤ λu` for some `λ`; the least such `λ`
//! for a Hermitian element is `p(x)`, computed in closed form from the
//! range-restricted pencil at a single index and then audited upward.

use std::sync::Arc;

use rand::Rng;
use serde_json::json;

use crate::directed::{check_r1, DirectedSystem, IndexId};
use crate::elements::{sample_bounded, CoherentElement};
use crate::error::{Error, Result};
use crate::numerics::{self, Tolerance};
use crate::report::{Entry, Report, SlackTracker, Status};
use crate::sampling::random_hermitian;

/// Largest accepted `|p(x) − ‖x‖_b|` in the suite.
pub const P_MATCH_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PreUnitReading {
    /// Defined at every index with norm at most one everywhere.
    Strict,
    /// Norm bound holds where a representative exists, but some index has
    /// none.
    DefinedIndicesOnly,
}

#[derive(Debug, Clone)]
pub struct PreUnit {
    element: CoherentElement,
    origin: IndexId,
    reading: PreUnitReading,
}

impl PreUnit {
    pub fn element(&self) -> &CoherentElement {
        &self.element
    }

    pub fn origin(&self) -> IndexId {
        self.origin
    }

    pub fn reading(&self) -> PreUnitReading {
        self.reading
    }

    pub fn is_strict(&self) -> bool {
        self.reading == PreUnitReading::Strict
    }
}

/// Every origin whose pushed identity, extended down as far as possible,
/// keeps all representatives in the unit ball. Bottom-up order.
pub fn pre_unit_candidates(sys: &Arc<DirectedSystem>, tol: Tolerance) -> Vec<PreUnit> {
    let mut out = Vec::new();
    let mut top_down = sys.poset().bottom_up();
    top_down.reverse();
    for g in sys.poset().bottom_up() {
        let mut u = CoherentElement::push_forward(sys, g, numerics::identity(sys.dim(g)))
            .expect("identity has the index dimension");
        for &a in &top_down {
            if u.rep(a).is_none() {
                if let Some(ext) = u.with_extension(a, tol) {
                    u = ext;
                }
            }
        }
        if u.sup_norm() > 1.0 + tol.eps_eq {
            continue;
        }
        let reading = if u.is_full() {
            PreUnitReading::Strict
        } else {
            PreUnitReading::DefinedIndicesOnly
        };
        out.push(PreUnit {
            element: u,
            origin: g,
            reading,
        });
    }
    out
}

/// First strict candidate, else the first candidate of any reading.
pub fn find_pre_unit(sys: &Arc<DirectedSystem>, tol: Tolerance) -> Option<PreUnit> {
    let cands = pre_unit_candidates(sys, tol);
    cands.iter().find(|u| u.is_strict()).or_else(|| cands.first()).cloned()
}

/// Agreement on the up-set of the first minimal upper bound of the origins.
pub fn pre_unit_agreement(u: &PreUnit, v: &PreUnit, tol: Tolerance) -> bool {
    if !u.element.same_system(&v.element) {
        return false;
    }
    let sys = u.element.system();
    let p = sys.poset();
    let Some(&delta) = p.minimal_upper_bounds(u.origin, v.origin).first() else {
        return false;
    };
    p.up_set(delta)
        .into_iter()
        .all(|b| match (u.element.rep(b), v.element.rep(b)) {
            (Some(x), Some(y)) => numerics::approx_eq(x, y, tol),
            _ => false,
        })
}

/// Least `λ` for the real and imaginary parts and the index it was read at.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrderBound {
    pub re: f64,
    pub im: f64,
    pub index: IndexId,
}

fn audit(x: &CoherentElement, u: &CoherentElement, lambda: f64, above: &[IndexId], tol: Tolerance) -> bool {
    let slack = tol.eps_psd * lambda.max(1.0);
    above.iter().all(|&b| {
        let (h, ub) = (x.rep(b).expect("common domain"), u.rep(b).expect("common domain"));
        let lu = ub.scale(lambda);
        numerics::min_eigenvalue(&(&lu - h)) >= -slack && numerics::min_eigenvalue(&(&lu + h)) >= -slack
    })
}

/// `λ_re`, `λ_im` with `−λu ≤ Re x, Im x ≤ λu`, or `None` when no
/// candidate index gives a feasible pencil that survives the upward audit.
///
/// Candidates are the indices of the common domain by rank, then label;
/// the top counts only when the common domain is the top alone.
pub fn order_bound(x: &CoherentElement, u: &PreUnit, tol: Tolerance) -> Result<Option<OrderBound>> {
    if !x.same_system(&u.element) {
        return Err(Error::SystemMismatch);
    }
    let sys = x.system();
    let p = sys.poset();
    let (re, im) = (x.real_part(), x.imaginary_part());
    let mut common: Vec<IndexId> = x.domain().into_iter().filter(|a| u.element.rep(*a).is_some()).collect();
    common.sort_by_key(|&a| (p.rank(a), a));
    let candidates: Vec<IndexId> = if common.len() == 1 {
        common.clone()
    } else {
        common.iter().copied().filter(|&a| a != p.top()).collect()
    };
    for delta in candidates {
        let ud = u.element.rep(delta).expect("common domain");
        let (Some(lre), Some(lim)) = (
            numerics::pencil_min_lambda(re.rep(delta).expect("common domain"), ud, tol),
            numerics::pencil_min_lambda(im.rep(delta).expect("common domain"), ud, tol),
        ) else {
            continue;
        };
        let above: Vec<IndexId> = common.iter().copied().filter(|&b| p.leq(delta, b)).collect();
        if audit(&re, &u.element, lre, &above, tol) && audit(&im, &u.element, lim, &above, tol) {
            return Ok(Some(OrderBound {
                re: lre,
                im: lim,
                index: delta,
            }));
        }
    }
    Ok(None)
}

/// `p(x) = inf{λ : −λu ≤ x ≤ λu}` for Hermitian `x`.
pub fn p_value(x: &CoherentElement, u: &PreUnit, tol: Tolerance) -> Result<f64> {
    let dev = x.hermitian_deviation();
    if dev > tol.eps_eq {
        return Err(Error::NotHermitian { deviation: dev });
    }
    order_bound(x, u, tol)?.map(|b| b.re).ok_or(Error::NotOrderBounded)
}

/// Indices `β` with a covering predecessor of smaller dimension: a full-rank
/// matrix placed there cannot be pulled back.
pub fn rank_obstructed_indices(sys: &DirectedSystem) -> Vec<IndexId> {
    let mut out: Vec<IndexId> = sys
        .poset()
        .covers()
        .iter()
        .filter(|&&(a, b)| sys.dim(a) < sys.dim(b))
        .map(|&(_, b)| b)
        .collect();
    out.sort();
    out.dedup();
    out
}

/// Bounded ⟺ order bounded, `p = ‖·‖_b`, and exclusion of elements that
/// lack a representative somewhere.
///
/// Needs positivity reflection on every edge and a strict pre-unit.
pub fn bounded_iff_order_bounded_suite<R: Rng + ?Sized>(
    sys: &Arc<DirectedSystem>,
    trials: usize,
    tol: Tolerance,
    rng: &mut R,
) -> Result<Report> {
    let r1 = check_r1(sys, trials.min(20), tol, rng);
    if !r1.holds {
        return Err(Error::PreconditionsUnmet("embeddings do not reflect positivity".into()));
    }
    let cands = pre_unit_candidates(sys, tol);
    let Some(u) = cands.iter().find(|u| u.is_strict()).cloned() else {
        return Err(Error::PreconditionsUnmet("no pre-unit defined at every index".into()));
    };
    let mut report = Report::new("order", sys.id(), trials);
    report.push(
        Entry::with_status("pre-unit", "pre-unit", Status::Pass, 0.0).witness(json!({"origin": sys.label(u.origin)})),
    );
    let strict: Vec<&PreUnit> = cands.iter().filter(|c| c.is_strict()).collect();
    let disagree = strict
        .iter()
        .flat_map(|a| strict.iter().map(move |b| (a, b)))
        .find(|(a, b)| !pre_unit_agreement(a, b, tol));
    let mut uniq = Entry::check(
        "pre-unit-uniqueness",
        "pre-unit-uniqueness",
        if disagree.is_some() { -1.0 } else { 0.0 },
    );
    if let Some((a, b)) = disagree {
        uniq = uniq.witness(json!({"origins": [sys.label(a.origin), sys.label(b.origin)]}));
    }
    report.push(uniq);
    report.metric("strict_pre_units", strict.len() as f64);
    report.metric("loose_pre_units", (cands.len() - strict.len()) as f64);

    let mut equivalence = SlackTracker::new();
    let mut p_match = SlackTracker::new();
    let mut re_im = SlackTracker::new();
    let mut skipped = 0usize;
    for t in 0..trials {
        for hermitian in [true, false] {
            let Some(x) = sample_bounded(sys, hermitian, tol, rng) else {
                skipped += 1;
                continue;
            };
            let bounded = x.bounded_norm(tol);
            let ob = order_bound(&x, &u, tol)?;
            let agree = bounded.is_some() == ob.is_some();
            equivalence.observe(if agree { 0.0 } else { -1.0 }, || {
                json!({"trial": t, "bounded": bounded.is_some(), "order_bounded": ob.is_some(), "element": x.to_value()})
            });
            let (Some(b), Some(ob)) = (bounded, ob) else { continue };
            if hermitian {
                let d = (ob.re - b.bnorm()).abs();
                p_match.observe(
                    P_MATCH_TOLERANCE - d,
                    || json!({"trial": t, "p": ob.re, "bnorm": b.bnorm(), "element": x.to_value()}),
                );
            } else {
                let lo = ob.re.max(ob.im) - b.bnorm();
                let hi = b.bnorm() - (ob.re + ob.im);
                re_im.observe(
                    P_MATCH_TOLERANCE - lo.max(hi),
                    || json!({"trial": t, "re": ob.re, "im": ob.im, "bnorm": b.bnorm()}),
                );
            }
        }
    }
    report.push(equivalence.entry("bounded-iff-order-bounded", "bounded-iff-order-bounded"));
    report.push(p_match.entry("p-equals-bnorm", "p-equals-bounded-norm"));
    report.push(re_im.entry("real-imaginary-bounds", "real-imaginary-bounds"));
    report.metric("skipped_samples", skipped as f64);

    let obstructed = rank_obstructed_indices(sys);
    if obstructed.is_empty() {
        report.push(
            Entry::with_status("missing-representative", "missing-representative", Status::Skipped, 0.0)
                .witness(json!({"reason": "no edge raises the dimension"})),
        );
    } else {
        let mut missing = SlackTracker::new();
        let mut rejected = 0usize;
        for t in 0..trials {
            let b = obstructed[t % obstructed.len()];
            let x = random_hermitian(sys.dim(b), rng);
            let e = CoherentElement::push_forward(sys, b, x).expect("sized to the index");
            let excluded = e.bounded_norm(tol).is_none();
            rejected += usize::from(excluded);
            missing.observe(
                if excluded { 0.0 } else { -1.0 },
                || json!({"trial": t, "index": sys.label(b), "element": e.to_value()}),
            );
        }
        report.metric("missing_rejected_fraction", rejected as f64 / trials.max(1) as f64);
        report.push(missing.entry("missing-representative", "missing-representative"));
    }
    Ok(report)
}
