//! Linear functionals as coherent families of densities.
//!
//! Every coherent family on a finite poset with a top is determined by its
//! top component, so a [`Functional`] is built from a density `ρ` at the top
//! and pulled back along the dual maps: `ω_α(x) = tr(ρ_α x)` with
//! `tr(ρ_α x) = tr(ρ j_{top,α}(x))`.

use std::collections::BTreeMap;
use std::sync::Arc;

use nalgebra::DVector;
use num_complex::Complex64;
use rand::Rng;
use serde_json::{json, Value};

use crate::directed::{DirectedSystem, IndexId};
use crate::elements::CoherentElement;
use crate::error::{Error, Result};
use crate::mult::{multiply, product, WeightFamily};
use crate::numerics::{self, ComplexMatrix, MatrixJson, Tolerance};
use crate::order::{order_bound, PreUnit};
use crate::report::{Entry, Report, SlackTracker, Status};
use crate::sampling::{random_psd, unit_matrix};

#[derive(Debug, Clone)]
pub struct Functional {
    system: Arc<DirectedSystem>,
    densities: BTreeMap<IndexId, ComplexMatrix>,
}

impl Functional {
    /// `ω_α(x) = tr(ρ j_{top,α}(x))` for a Hermitian top density `ρ`.
    pub fn from_top_density(system: &Arc<DirectedSystem>, rho: ComplexMatrix, tol: Tolerance) -> Result<Self> {
        let top = system.top();
        let n = system.dim(top);
        if rho.shape() != (n, n) {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: rho.nrows(),
            });
        }
        let dev = numerics::hermitian_deviation(&rho);
        if dev > tol.eps_eq {
            return Err(Error::NotHermitian { deviation: dev });
        }
        let densities = system
            .poset()
            .ids()
            .map(|a| (a, system.map(a, top).expect("top is above every index").dual(&rho)))
            .collect();
        Ok(Self {
            system: Arc::clone(system),
            densities,
        })
    }

    /// `tr(ρ x)/n` style normalized trace at the top.
    pub fn trace_state(system: &Arc<DirectedSystem>) -> Self {
        let n = system.dim(system.top());
        Self::from_top_density(system, numerics::identity(n).unscale(n as f64), Tolerance::default())
            .expect("identity is Hermitian")
    }

    /// Vector state `⟨· ξ, ξ⟩` at the top.
    pub fn vector_state(system: &Arc<DirectedSystem>, xi: &DVector<Complex64>) -> Result<Self> {
        let rho = xi * xi.adjoint();
        Self::from_top_density(system, rho, Tolerance::default())
    }

    pub fn system(&self) -> &Arc<DirectedSystem> {
        &self.system
    }

    pub fn density(&self, a: IndexId) -> &ComplexMatrix {
        &self.densities[&a]
    }

    pub fn top_density(&self) -> &ComplexMatrix {
        self.density(self.system.top())
    }

    /// `ω_α(x) = tr(ρ_α x)`.
    pub fn eval_at(&self, a: IndexId, x: &ComplexMatrix) -> Complex64 {
        numerics::trace_product(self.density(a), x)
    }

    /// `ω(x)` read off the top representative.
    pub fn eval(&self, x: &CoherentElement) -> Complex64 {
        self.eval_at(self.system.top(), x.top_rep())
    }

    /// Largest `|ω_α(x) − ω_β(j_{βα}(x))|` over edges and sampled `x`.
    pub fn coherence_residual<R: Rng + ?Sized>(&self, trials: usize, rng: &mut R) -> f64 {
        let mut worst = 0.0_f64;
        for ((a, b), e) in self.system.edges() {
            for _ in 0..trials {
                let x = unit_matrix(self.system.dim(a), rng);
                worst = worst.max((self.eval_at(a, &x) - self.eval_at(b, &e.apply(&x))).norm());
            }
        }
        worst
    }

    pub fn to_value(&self) -> Value {
        json!({
            "system_id": self.system.id(),
            "density": MatrixJson::from(self.top_density()),
        })
    }

    pub fn from_value(system: &Arc<DirectedSystem>, v: &Value, tol: Tolerance) -> Result<Self> {
        if v["system_id"].as_str() != Some(system.id()) {
            return Err(Error::SystemMismatch);
        }
        let m: MatrixJson = serde_json::from_value(v["density"].clone())?;
        Self::from_top_density(system, ComplexMatrix::try_from(m)?, tol)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PositivityVerdict {
    pub holds: bool,
    /// Index and PSD input with negative value, when one was found.
    pub witness: Option<(String, ComplexMatrix)>,
}

/// Nonnegative on PSD inputs at every index: spectral certificate on each
/// pulled-back density plus `trials` sampled PSD matrices per index.
pub fn is_positive_functional<R: Rng + ?Sized>(
    omega: &Functional,
    trials: usize,
    tol: Tolerance,
    rng: &mut R,
) -> PositivityVerdict {
    let sys = &omega.system;
    for a in sys.poset().ids() {
        let rho = omega.density(a);
        let (vals, vecs) = numerics::hermitian_eigen(rho);
        if vals[0] < -tol.eps_psd {
            let v = vecs.column(0).into_owned();
            return PositivityVerdict {
                holds: false,
                witness: Some((sys.label(a).to_string(), &v * v.adjoint())),
            };
        }
        for _ in 0..trials {
            let x = random_psd(sys.dim(a), rng);
            if omega.eval_at(a, &x).re < -tol.eps_psd {
                return PositivityVerdict {
                    holds: false,
                    witness: Some((sys.label(a).to_string(), x)),
                };
            }
        }
    }
    PositivityVerdict {
        holds: true,
        witness: None,
    }
}

/// Gram matrix `G[k,l] = f(E_k, E_l)` over matrix units in column-major order.
fn gram(n: usize, f: impl Fn(&ComplexMatrix, &ComplexMatrix) -> Complex64) -> ComplexMatrix {
    let units: Vec<ComplexMatrix> = (0..n * n)
        .map(|k| {
            let mut e = numerics::zeros(n);
            e[(k % n, k / n)] = numerics::ONE;
            e
        })
        .collect();
    ComplexMatrix::from_fn(n * n, n * n, |k, l| f(&units[k], &units[l]))
}

#[derive(Debug, Clone, PartialEq)]
pub struct R3Verdict {
    pub holds: bool,
    pub witness: Option<Value>,
}

/// Kernel reflection: `ω_β(j(x)*j(x)) = 0` must force `ω_α(x*x) = 0`.
///
/// Both sides are quadratic forms in `vec(x)`. The kernel of the first form
/// is searched for directions where the second is larger than `√eps_eq`;
/// `trials` random inputs are sampled as a second check.
pub fn check_r3<R: Rng + ?Sized>(omega: &Functional, trials: usize, tol: Tolerance, rng: &mut R) -> R3Verdict {
    let sys = &omega.system;
    let p = sys.poset();
    let bound = tol.eps_eq.sqrt();
    for a in p.ids() {
        let n = sys.dim(a);
        let lower = gram(n, |ek, el| omega.eval_at(a, &(ek.adjoint() * el)));
        for b in p.ids().filter(|&b| p.lt(a, b)) {
            let map = sys.map(a, b).expect("a < b");
            let images: Vec<ComplexMatrix> = (0..n * n)
                .map(|k| {
                    let mut e = numerics::zeros(n);
                    e[(k % n, k / n)] = numerics::ONE;
                    map.apply(&e)
                })
                .collect();
            let upper = ComplexMatrix::from_fn(n * n, n * n, |k, l| {
                omega.eval_at(b, &(images[k].adjoint() * &images[l]))
            });
            let (vals, vecs) = numerics::hermitian_eigen(&upper);
            let scale = vals.iter().map(|v| v.abs()).fold(1.0, f64::max);
            let kernel: Vec<usize> = (0..vals.len()).filter(|&i| vals[i] <= tol.eps_eq * scale).collect();
            if !kernel.is_empty() {
                let k = ComplexMatrix::from_fn(n * n, kernel.len(), |r, c| vecs[(r, kernel[c])]);
                let restricted = k.adjoint() * &lower * &k;
                let (rv, rvecs) = numerics::hermitian_eigen(&restricted);
                let last = rv.len() - 1;
                if rv[last] > bound {
                    let c = &k * rvecs.column(last);
                    let x = numerics::unvectorize(&c, n);
                    return R3Verdict {
                        holds: false,
                        witness: Some(json!({
                            "lower": sys.label(a),
                            "upper": sys.label(b),
                            "kind": "kernel",
                            "lower_form": rv[last],
                            "x": MatrixJson::from(&x),
                        })),
                    };
                }
            }
            for t in 0..trials {
                let x = unit_matrix(n, rng);
                let jx = map.apply(&x);
                let q_up = omega.eval_at(b, &(jx.adjoint() * &jx)).re;
                let q_low = omega.eval_at(a, &(x.adjoint() * &x)).re;
                if q_up <= tol.eps_eq && q_low > bound {
                    return R3Verdict {
                        holds: false,
                        witness: Some(json!({
                            "lower": sys.label(a),
                            "upper": sys.label(b),
                            "kind": "sample",
                            "trial": t,
                            "x": MatrixJson::from(&x),
                        })),
                    };
                }
            }
        }
    }
    R3Verdict {
        holds: true,
        witness: None,
    }
}

/// Coherence, positivity and kernel reflection of each functional.
/// Kernel reflection is only checked for positive functionals.
pub fn functional_checks<R: Rng + ?Sized>(
    sys: &Arc<DirectedSystem>,
    functionals: &[Functional],
    trials: usize,
    tol: Tolerance,
    rng: &mut R,
) -> Report {
    let mut report = Report::new("functional-checks", sys.id(), trials);
    let mut coherence = SlackTracker::new();
    let mut positivity = SlackTracker::new();
    let mut r3 = SlackTracker::new();
    for (k, omega) in functionals.iter().enumerate() {
        let scale = numerics::max_abs(omega.top_density()).max(1.0);
        let r = omega.coherence_residual(trials, rng);
        coherence.observe(tol.eps_eq * scale - r, || json!({"functional": k, "residual": r}));
        let expected = numerics::is_psd(omega.top_density(), tol);
        let v = is_positive_functional(omega, trials, tol, rng);
        positivity.observe(
            if v.holds == expected { 0.0 } else { -1.0 },
            || json!({"functional": k, "top_psd": expected, "positive": v.holds}),
        );
        if v.holds {
            let v = check_r3(omega, trials, tol, rng);
            r3.observe(
                if v.holds { 0.0 } else { -1.0 },
                || json!({"functional": k, "witness": v.witness}),
            );
        }
    }
    report.push(coherence.entry("coherence", "functional-coherence"));
    report.push(positivity.entry("positivity", "functional-positivity"));
    report.push(r3.entry("kernel-reflecting", "kernel-reflecting"));
    report
}

/// `ω(b*·x·a)`, grouped as `(b*·x)·a`.
pub fn sesquilinear(
    omega: &Functional,
    x: &CoherentElement,
    a: &CoherentElement,
    b: &CoherentElement,
    w: &WeightFamily,
    tol: Tolerance,
) -> Result<Complex64> {
    let bx = product(&b.involution(), x, w, tol)?;
    Ok(omega.eval(&product(&bx, a, w, tol)?))
}

/// Functional bounds for an order-bounded `x`.
///
/// With `γ = p(Re x) + p(Im x)`: `|ω(a*·x·a)| ≤ γ ω(a*·u·a)` and
/// `|ω(b*·x·a)|² ≤ γ² ω(a*·u·a) ω(b*·u·b)` for every functional and pair of
/// multipliers. Both are hard assertions for Hermitian `x` and reported for
/// general `x`. The converse direction depends on a condition that no
/// finite sample can verify, so it is only reported.
pub fn functional_bound_suite(
    x: &CoherentElement,
    u: &PreUnit,
    w: &WeightFamily,
    functionals: &[Functional],
    multipliers: &[CoherentElement],
    tol: Tolerance,
) -> Result<Report> {
    let sys = x.system();
    let mut report = Report::new("functionals", sys.id(), functionals.len() * multipliers.len().pow(2));
    let Some(ob) = order_bound(x, u, tol)? else {
        report.push(
            Entry::with_status("order-bounded", "order-bound-to-functional-bound", Status::Skipped, 0.0)
                .witness(json!({"reason": "element is not order bounded"})),
        );
        return Ok(report);
    };
    let gamma = ob.re + ob.im;
    let hermitian = x.is_hermitian(tol);
    report.metric("gamma", gamma);
    let u = u.element();
    let mut single = SlackTracker::new();
    let mut squared = SlackTracker::new();
    let mut converse = 0.0_f64;
    for (k, omega) in functionals.iter().enumerate() {
        for (i, a) in multipliers.iter().enumerate() {
            let na = sesquilinear(omega, u, a, a, w, tol)?.re;
            let xa = sesquilinear(omega, x, a, a, w, tol)?.norm();
            let rhs = gamma * na;
            single.observe(
                rhs - xa + tol.eps_eq * rhs.abs().max(1.0),
                || json!({"functional": k, "a": i, "lhs": xa, "rhs": rhs}),
            );
            if na > tol.eps_eq {
                converse = converse.max(xa / na);
            }
            for (j, b) in multipliers.iter().enumerate() {
                let nb = sesquilinear(omega, u, b, b, w, tol)?.re;
                let lhs = sesquilinear(omega, x, a, b, w, tol)?.norm_sqr();
                let rhs = gamma * gamma * na * nb;
                squared.observe(
                    rhs - lhs + tol.eps_eq * rhs.abs().max(1.0),
                    || json!({"functional": k, "a": i, "b": j, "lhs": lhs, "rhs": rhs}),
                );
            }
        }
    }
    let status_of = |e: Entry| {
        if hermitian {
            e
        } else {
            let slack = e.worst_slack;
            let mut r = Entry::with_status(e.id.clone(), &e.anchor, Status::Reported, slack);
            r.witness = e.witness;
            r
        }
    };
    report.push(status_of(
        single.entry("single-multiplier", "order-bound-to-functional-bound"),
    ));
    report.push(status_of(
        squared.entry("two-multiplier", "order-bound-to-squared-bound"),
    ));
    report.metric("sampled_functional_ratio", converse);
    report.push(
        Entry::with_status(
            "conditional-converse",
            "functional-bound-to-order-bound",
            Status::Reported,
            0.0,
        )
        .witness(json!({"conditional": true, "sampled_ratio": converse, "order_bound": gamma})),
    );
    Ok(report)
}

/// `sup |ω(b*·x·a)|` over supplied functionals and multipliers normalized by
/// `ω(a*·u·a) = ω(b*·u·b) = 1`, with the gap to `p(x)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PUpperBound {
    pub bound: f64,
    pub p: f64,
    pub gap: f64,
}

pub fn p_upper_bound(
    x: &CoherentElement,
    u: &PreUnit,
    w: &WeightFamily,
    functionals: &[Functional],
    multipliers: &[CoherentElement],
    tol: Tolerance,
) -> Result<PUpperBound> {
    let p = crate::order::p_value(x, u, tol)?;
    let mut bound = 0.0_f64;
    for omega in functionals {
        let norms: Vec<f64> = multipliers
            .iter()
            .map(|a| sesquilinear(omega, u.element(), a, a, w, tol).map(|z| z.re))
            .collect::<Result<_>>()?;
        for (a, &na) in multipliers.iter().zip(&norms) {
            if na <= tol.eps_eq {
                continue;
            }
            for (b, &nb) in multipliers.iter().zip(&norms) {
                if nb <= tol.eps_eq {
                    continue;
                }
                let v = sesquilinear(omega, x, a, b, w, tol)?.norm() / (na * nb).sqrt();
                bound = bound.max(v);
            }
        }
    }
    Ok(PUpperBound {
        bound,
        p,
        gap: bound - p,
    })
}

/// Vector state and top-only multiplier attaining `p(x)` at the top:
/// `ω(a*·x·a) = ±p(x_top)` with `ω(a*·u·a) = 1`.
///
/// Needs the extremal generalized eigenvector in the range of `w_top`.
pub fn extremal_pair(
    x: &CoherentElement,
    u: &PreUnit,
    w: &WeightFamily,
    tol: Tolerance,
) -> Option<(Functional, CoherentElement)> {
    let sys = x.system();
    let top = sys.top();
    let n = sys.dim(top);
    let h = numerics::hermitian_part(x.top_rep());
    let (uvals, uvecs) = numerics::hermitian_eigen(u.element().rep(top)?);
    let range: Vec<usize> = (0..n).filter(|&i| uvals[i] > tol.eps_psd).collect();
    if range.is_empty() {
        return None;
    }
    let scaled = ComplexMatrix::from_fn(n, range.len(), |r, c| uvecs[(r, range[c])] / uvals[range[c]].sqrt());
    let block = scaled.adjoint() * &h * &scaled;
    let (vals, vecs) = numerics::hermitian_eigen(&block);
    let k = (0..vals.len())
        .max_by(|&i, &j| vals[i].abs().total_cmp(&vals[j].abs()))
        .expect("range is nonempty");
    let v = &scaled * vecs.column(k);
    let wt = w.rep(top);
    let wpinv = wt.clone().pseudo_inverse(tol.eps_psd).ok()?;
    let pre = &wpinv * &v;
    if numerics::max_abs(
        &(ComplexMatrix::from_column_slice(n, 1, (wt * &pre).as_slice())
            - ComplexMatrix::from_column_slice(n, 1, v.as_slice())),
    ) > 1e-8
    {
        return None;
    }
    let mut xi = DVector::zeros(n);
    xi[0] = numerics::ONE;
    let omega = Functional::vector_state(sys, &xi).ok()?;
    let a = &pre * xi.adjoint();
    let a = CoherentElement::push_forward(sys, top, a).ok()?;
    Some((omega, a))
}

/// `ω_a(x) = ω(a*·x·a)` evaluated on `x`, `None` when a product is undefined.
pub fn compressed_value(
    omega: &Functional,
    a: &CoherentElement,
    x: &CoherentElement,
    w: &WeightFamily,
    tol: Tolerance,
) -> Result<Option<Complex64>> {
    let ax = multiply(&a.involution(), x, w, tol)?;
    let Some(ax) = ax.value else { return Ok(None) };
    Ok(multiply(&ax, a, w, tol)?.value.map(|z| omega.eval(&z)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::directed::{generate_compression_system, Embedding, IndexPoset, SystemShape};
    use crate::mult::{find_unit, random_full_element};
    use crate::numerics::{diag, identity};
    use crate::order::{find_pre_unit, p_value};
    use crate::sampling::{gaussian_matrix, random_hermitian, seeded};

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    #[test]
    fn constructor_cases() {
        let sys = Arc::new(DirectedSystem::identity_chain(3, 2));
        let z = Functional::from_top_density(&sys, numerics::zeros(2), tol()).unwrap();
        assert!(z.densities.values().all(|m| numerics::max_abs(m) == 0.0));
        let tr = Functional::trace_state(&sys);
        for a in sys.poset().ids() {
            assert!(numerics::max_abs_diff(tr.density(a), &identity(2).unscale(2.0)) < 1e-15);
        }
        let csys = Arc::new(generate_compression_system(&SystemShape::chain(&[2, 3, 4]), 1).unwrap());
        let rho = random_psd(4, &mut seeded(1));
        let f = Functional::from_top_density(&csys, rho, tol()).unwrap();
        assert!(f.coherence_residual(10, &mut seeded(2)) <= 1e-9);
        assert!(matches!(
            Functional::from_top_density(&csys, identity(2), tol()),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn positivity_cases() {
        let sys = Arc::new(DirectedSystem::identity_chain(2, 2));
        let mut rng = seeded(3);
        assert!(is_positive_functional(&Functional::trace_state(&sys), 10, tol(), &mut rng).holds);
        let f = Functional::from_top_density(&sys, diag(&[1.0, -1.0]), tol()).unwrap();
        let v = is_positive_functional(&f, 10, tol(), &mut rng);
        assert!(!v.holds);
        let (_, x) = v.witness.unwrap();
        assert!(numerics::max_abs_diff(&x, &diag(&[0.0, 1.0])) < 1e-12);
        let csys = Arc::new(generate_compression_system(&SystemShape::vee(2, 3, 3), 4).unwrap());
        let f = Functional::from_top_density(&csys, random_psd(3, &mut rng), tol()).unwrap();
        assert!(is_positive_functional(&f, 10, tol(), &mut rng).holds);
    }

    #[test]
    fn r3_cases() {
        let mut rng = seeded(5);
        let sys = Arc::new(DirectedSystem::identity_chain(3, 2));
        assert!(check_r3(&Functional::trace_state(&sys), 10, tol(), &mut rng).holds);
        let csys = Arc::new(generate_compression_system(&SystemShape::chain(&[2, 3, 4]), 5).unwrap());
        let f = Functional::from_top_density(&csys, random_psd(4, &mut rng), tol()).unwrap();
        assert!(check_r3(&f, 10, tol(), &mut rng).holds);
        // even a rank-one density cannot break a full-row-rank compression
        let mut xi = DVector::zeros(4);
        xi[3] = numerics::ONE;
        let f = Functional::vector_state(&csys, &xi).unwrap();
        assert!(check_r3(&f, 10, tol(), &mut rng).holds);
    }

    fn averaging_system() -> Arc<DirectedSystem> {
        // x ↦ (x + UxU*)/2 with U = diag(1, i)
        let u = ComplexMatrix::from_diagonal(&DVector::from_vec(vec![numerics::ONE, numerics::I]));
        let e = Embedding::from_linear_map(2, 2, |x| (x + &u * x * u.adjoint()).unscale(2.0));
        let poset = IndexPoset::chain(&["a", "b"]).unwrap();
        let (a, b) = (poset.id("a").unwrap(), poset.id("b").unwrap());
        Arc::new(DirectedSystem::new(poset, vec![2, 2], [((a, b), e)].into_iter().collect()).unwrap())
    }

    #[test]
    fn r3_violation_by_averaging_map() {
        let sys = averaging_system();
        let xi = DVector::from_vec(vec![numerics::ONE, numerics::ONE]).unscale(2f64.sqrt());
        let f = Functional::vector_state(&sys, &xi).unwrap();
        let v = check_r3(&f, 10, tol(), &mut seeded(6));
        assert!(!v.holds);
        let w = v.witness.unwrap();
        let x: ComplexMatrix = serde_json::from_value::<MatrixJson>(w["x"].clone())
            .unwrap()
            .try_into()
            .unwrap();
        let (a, b) = (sys.index("a").unwrap(), sys.index("b").unwrap());
        let jx = sys.push(a, b, &x);
        assert!(f.eval_at(b, &(jx.adjoint() * &jx)).re.abs() < 1e-9);
        assert!(f.eval_at(a, &(x.adjoint() * &x)).re > 1e-3);
    }

    #[test]
    fn bound_suite_zero_and_unit_cases() {
        let sys = Arc::new(DirectedSystem::identity_chain(2, 2));
        let u = find_pre_unit(&sys, tol()).unwrap();
        let w = WeightFamily::identity(&sys, tol()).unwrap();
        let e = find_unit(&w, tol()).unwrap();
        let fs = vec![Functional::trace_state(&sys)];
        let ms = vec![e.element().clone()];
        let r = functional_bound_suite(&CoherentElement::zero(&sys), &u, &w, &fs, &ms, tol()).unwrap();
        assert!(r.all_passed(), "{}", r.summary());
        let r = functional_bound_suite(u.element(), &u, &w, &fs, &ms, tol()).unwrap();
        assert!(r.all_passed());
        assert!(r.entry("two-multiplier").unwrap().worst_slack.abs() <= 1e-9 + 1e-12);
    }

    #[test]
    fn bound_suite_random_identity_chain() {
        let sys = Arc::new(DirectedSystem::identity_chain(3, 3));
        let mut rng = seeded(7);
        let u = find_pre_unit(&sys, tol()).unwrap();
        let w = WeightFamily::identity(&sys, tol()).unwrap();
        let x = CoherentElement::push_forward(&sys, sys.index("i0").unwrap(), random_hermitian(3, &mut rng)).unwrap();
        let fs: Vec<_> = (0..10)
            .map(|_| Functional::from_top_density(&sys, random_psd(3, &mut rng), tol()).unwrap())
            .collect();
        let ms: Vec<_> = (0..5)
            .map(|_| random_full_element(&sys, tol(), &mut rng).unwrap())
            .collect();
        let r = functional_bound_suite(&x, &u, &w, &fs, &ms, tol()).unwrap();
        assert!(r.all_passed(), "{}", r.summary());
        let g = CoherentElement::push_forward(&sys, sys.index("i0").unwrap(), gaussian_matrix(3, 3, &mut rng)).unwrap();
        let r = functional_bound_suite(&g, &u, &w, &fs, &ms, tol()).unwrap();
        assert_eq!(r.entry("single-multiplier").unwrap().status, Status::Reported);
    }

    #[test]
    fn p_upper_bound_cases() {
        let sys = Arc::new(DirectedSystem::identity_chain(2, 2));
        let u = find_pre_unit(&sys, tol()).unwrap();
        let w = WeightFamily::identity(&sys, tol()).unwrap();
        let fs = vec![Functional::trace_state(&sys)];
        let ms = vec![find_unit(&w, tol()).unwrap().element().clone()];
        let b = p_upper_bound(u.element(), &u, &w, &fs, &ms, tol()).unwrap();
        assert!(b.bound >= 1.0 - 1e-12 && b.p == 1.0);
        let b = p_upper_bound(&CoherentElement::zero(&sys), &u, &w, &fs, &ms, tol()).unwrap();
        assert_eq!(b.bound, 0.0);
    }

    #[test]
    fn extremal_pair_attains_p_on_compression_chain() {
        let sys = Arc::new(generate_compression_system(&SystemShape::chain(&[2, 3, 4]), 8).unwrap());
        let mut rng = seeded(8);
        let u = find_pre_unit(&sys, tol()).unwrap();
        let w = WeightFamily::new(u.element().clone(), tol()).unwrap();
        let x = CoherentElement::push_forward(&sys, sys.index("i0").unwrap(), random_hermitian(2, &mut rng)).unwrap();
        let (omega, a) = extremal_pair(&x, &u, &w, tol()).unwrap();
        let b = p_upper_bound(&x, &u, &w, &[omega], &[a], tol()).unwrap();
        assert!(b.gap >= -1e-8, "{b:?}");
        assert!((b.p - p_value(&x, &u, tol()).unwrap()).abs() == 0.0);
    }

    #[test]
    fn compressed_functional_is_positive() {
        let sys = Arc::new(DirectedSystem::identity_chain(2, 2));
        let mut rng = seeded(9);
        let w = WeightFamily::identity(&sys, tol()).unwrap();
        let omega = Functional::from_top_density(&sys, random_psd(2, &mut rng), tol()).unwrap();
        let a = random_full_element(&sys, tol(), &mut rng).unwrap();
        let x = CoherentElement::push_forward(&sys, sys.index("i0").unwrap(), random_psd(2, &mut rng)).unwrap();
        let v = compressed_value(&omega, &a, &x, &w, tol()).unwrap().unwrap();
        assert!(v.re >= -1e-12 && v.im.abs() < 1e-12);
    }
}
