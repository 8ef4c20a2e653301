//! Directed contractive systems of Hilbert spaces and *-representations.
//!
//! A [`Representation`] pairs a directed system with a
//! [`ContractiveHilbertSystem`] over the same poset and one map
//! `π_α : M_{d_α} → M_{h_α}` per index. It is coherent when
//! `π_β(j_{βα}(x)) = U_{βα} π_α(x) U_{βα}*` on every edge.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_complex::Complex64;
use rand::Rng;
use serde_json::{json, Value};

use crate::directed::{DirectedSystem, Embedding, IndexId, IndexPoset, RANK_THRESHOLD};
use crate::elements::CoherentElement;
use crate::error::{Error, Result};
use crate::numerics::{self, ComplexMatrix, MatrixJson, Tolerance};
use crate::report::{Entry, Report, SlackTracker, Status};
use crate::sampling::{random_psd, random_unitary, seeded, unit_matrix};

#[derive(Debug, Clone)]
pub struct ContractiveHilbertSystem {
    poset: IndexPoset,
    hdims: Vec<usize>,
    covers: BTreeMap<(IndexId, IndexId), ComplexMatrix>,
    composites: BTreeMap<(IndexId, IndexId), ComplexMatrix>,
}

impl ContractiveHilbertSystem {
    /// One `h_β × h_α` matrix per covering pair `α ⋖ β`.
    pub fn new(
        poset: IndexPoset,
        hdims: Vec<usize>,
        covers: BTreeMap<(IndexId, IndexId), ComplexMatrix>,
    ) -> Result<Self> {
        if hdims.len() != poset.len() || hdims.contains(&0) {
            return Err(Error::BadShape(
                "one positive Hilbert dimension per index required".into(),
            ));
        }
        if covers.len() != poset.covers().len() {
            return Err(Error::BadShape("one U per covering pair required".into()));
        }
        for &(a, b) in poset.covers() {
            let u = covers
                .get(&(a, b))
                .ok_or_else(|| Error::BadShape(format!("missing U {} -> {}", poset.label(a), poset.label(b))))?;
            if u.shape() != (hdims[b.0], hdims[a.0]) {
                return Err(Error::BadShape(format!(
                    "U {} -> {} has shape {:?}, expected ({}, {})",
                    poset.label(a),
                    poset.label(b),
                    u.shape(),
                    hdims[b.0],
                    hdims[a.0]
                )));
            }
        }
        let mut composites = BTreeMap::new();
        let mut order = poset.bottom_up();
        order.reverse();
        for &a in &order {
            composites.insert((a, a), numerics::identity(hdims[a.0]));
            for b in poset.ids().filter(|&b| poset.lt(a, b)) {
                let s = poset
                    .covering_successors(a)
                    .find(|&s| poset.leq(s, b))
                    .expect("a < b implies a covering successor below b");
                let u = &composites[&(s, b)] * &covers[&(a, s)];
                composites.insert((a, b), u);
            }
        }
        Ok(Self {
            poset,
            hdims,
            covers,
            composites,
        })
    }

    pub fn poset(&self) -> &IndexPoset {
        &self.poset
    }

    pub fn hdim(&self, a: IndexId) -> usize {
        self.hdims[a.0]
    }

    pub fn cover(&self, a: IndexId, b: IndexId) -> Option<&ComplexMatrix> {
        self.covers.get(&(a, b))
    }

    /// `U_{βα}` for `α ≤ β`.
    pub fn u(&self, a: IndexId, b: IndexId) -> Option<&ComplexMatrix> {
        self.composites.get(&(a, b))
    }

    /// Largest disagreement between `U_{βα}` and `U_{βγ}U_{γα}` over every
    /// cover `α ⋖ γ ≤ β`. Agreement for every first step gives agreement
    /// along every path by induction on length.
    pub fn cocycle_residual(&self) -> f64 {
        let p = &self.poset;
        let mut worst = 0.0_f64;
        for &(a, s) in p.covers() {
            for b in p.ids().filter(|&b| p.leq(s, b)) {
                let via = &self.composites[&(s, b)] * &self.covers[&(a, s)];
                worst = worst.max(numerics::max_abs_diff(&via, &self.composites[&(a, b)]));
            }
        }
        worst
    }
}

/// One component `π_α`.
#[derive(Debug, Clone, PartialEq)]
pub enum StarMap {
    Identity(usize),
    /// `x ↦ V x V*` with `V` of shape `h × d`.
    Conjugation(ComplexMatrix),
    /// Column-major superoperator of shape `h² × d²`.
    Superoperator {
        source_dim: usize,
        target_dim: usize,
        matrix: ComplexMatrix,
    },
}

impl StarMap {
    pub fn source_dim(&self) -> usize {
        match self {
            StarMap::Identity(n) => *n,
            StarMap::Conjugation(v) => v.ncols(),
            StarMap::Superoperator { source_dim, .. } => *source_dim,
        }
    }

    pub fn target_dim(&self) -> usize {
        match self {
            StarMap::Identity(n) => *n,
            StarMap::Conjugation(v) => v.nrows(),
            StarMap::Superoperator { target_dim, .. } => *target_dim,
        }
    }

    pub fn apply(&self, x: &ComplexMatrix) -> ComplexMatrix {
        match self {
            StarMap::Identity(_) => x.clone(),
            StarMap::Conjugation(v) => v * x * v.adjoint(),
            StarMap::Superoperator { target_dim, matrix, .. } => {
                numerics::unvectorize(&(matrix * numerics::vectorize(x)), *target_dim)
            }
        }
    }

    pub fn superoperator_matrix(&self) -> ComplexMatrix {
        match self {
            StarMap::Identity(n) => numerics::identity(n * n),
            StarMap::Conjugation(v) => v.conjugate().kronecker(v),
            StarMap::Superoperator { matrix, .. } => matrix.clone(),
        }
    }

    /// Injective as a linear map.
    pub fn is_injective(&self) -> bool {
        match self {
            StarMap::Identity(_) => true,
            StarMap::Conjugation(v) => v.nrows() >= v.ncols() && numerics::min_singular_value(v) > RANK_THRESHOLD,
            StarMap::Superoperator { matrix, .. } => {
                matrix.nrows() >= matrix.ncols() && numerics::min_singular_value(matrix) > RANK_THRESHOLD
            }
        }
    }

    /// Known to be an isometric *-homomorphism by its form: the identity or
    /// conjugation by an isometry.
    pub fn is_isometric_star_map(&self) -> bool {
        match self {
            StarMap::Identity(_) => true,
            StarMap::Conjugation(v) => {
                numerics::max_abs_diff(&(v.adjoint() * v), &numerics::identity(v.ncols())) <= 1e-12
            }
            StarMap::Superoperator { .. } => false,
        }
    }

    /// Nonzero PSD matrices in the kernel, found from the structure of the
    /// map: null vectors of `V`, or positive parts of kernel elements.
    fn kernel_candidates(&self) -> Vec<ComplexMatrix> {
        let n = self.source_dim();
        match self {
            StarMap::Identity(_) => Vec::new(),
            StarMap::Conjugation(v) => {
                let (vals, vecs) = numerics::hermitian_eigen(&(v.adjoint() * v));
                let scale = vals.iter().copied().fold(1.0, f64::max);
                (0..n)
                    .filter(|&i| vals[i] <= RANK_THRESHOLD * scale)
                    .map(|i| {
                        let c = vecs.column(i);
                        c * c.adjoint()
                    })
                    .collect()
            }
            StarMap::Superoperator { matrix, .. } => {
                let gram = matrix.adjoint() * matrix;
                let (vals, vecs) = numerics::hermitian_eigen(&gram);
                let scale = vals.iter().copied().fold(1.0, f64::max);
                let mut out = Vec::new();
                for i in (0..vals.len()).filter(|&i| vals[i] <= RANK_THRESHOLD * scale) {
                    let k = numerics::unvectorize(&vecs.column(i).into_owned(), n);
                    for h in [numerics::hermitian_part(&k), numerics::imaginary_part(&k)] {
                        let (vals_h, vecs_h) = numerics::hermitian_eigen(&h);
                        let pos = positive_part(&vals_h, &vecs_h, 1.0);
                        let neg = positive_part(&vals_h, &vecs_h, -1.0);
                        out.extend([pos, neg]);
                    }
                }
                out
            }
        }
    }
}

fn positive_part(vals: &nalgebra::DVector<f64>, vecs: &ComplexMatrix, sign: f64) -> ComplexMatrix {
    let d = ComplexMatrix::from_diagonal(&vals.map(|v| Complex64::from((sign * v).max(0.0))));
    vecs * d * vecs.adjoint()
}

#[derive(Debug, Clone)]
pub struct Representation {
    system: Arc<DirectedSystem>,
    hilbert: ContractiveHilbertSystem,
    pi: Vec<StarMap>,
}

impl Representation {
    pub fn new(system: &Arc<DirectedSystem>, hilbert: ContractiveHilbertSystem, pi: Vec<StarMap>) -> Result<Self> {
        if hilbert.poset().labels() != system.poset().labels() || pi.len() != system.poset().len() {
            return Err(Error::SystemMismatch);
        }
        for a in system.poset().ids() {
            let m = &pi[a.0];
            if m.source_dim() != system.dim(a) || m.target_dim() != hilbert.hdim(a) {
                return Err(Error::BadShape(format!(
                    "π at {} maps M_{} to M_{}, expected M_{} to M_{}",
                    system.label(a),
                    m.source_dim(),
                    m.target_dim(),
                    system.dim(a),
                    hilbert.hdim(a)
                )));
            }
        }
        Ok(Self {
            system: Arc::clone(system),
            hilbert,
            pi,
        })
    }

    pub fn system(&self) -> &Arc<DirectedSystem> {
        &self.system
    }

    pub fn hilbert(&self) -> &ContractiveHilbertSystem {
        &self.hilbert
    }

    pub fn pi(&self, a: IndexId) -> &StarMap {
        &self.pi[a.0]
    }

    /// `π_α(x)`.
    pub fn apply(&self, a: IndexId, x: &ComplexMatrix) -> ComplexMatrix {
        self.pi[a.0].apply(x)
    }

    /// `π(x)` as the family `{π_α(x_α)}` over the domain of `x`.
    pub fn image(&self, x: &CoherentElement) -> BTreeMap<IndexId, ComplexMatrix> {
        x.reps().iter().map(|(&a, m)| (a, self.apply(a, m))).collect()
    }

    /// Largest `‖π_β(j(x)) − U π_α(x) U*‖` over edges and sampled `x`.
    pub fn coherence_residual<R: Rng + ?Sized>(&self, trials: usize, rng: &mut R) -> f64 {
        let mut worst = 0.0_f64;
        for ((a, b), e) in self.system.edges() {
            let u = self.hilbert.cover(a, b).expect("same covers");
            for _ in 0..trials {
                let x = unit_matrix(self.system.dim(a), rng);
                let lhs = self.apply(b, &e.apply(&x));
                let rhs = u * self.apply(a, &x) * u.adjoint();
                worst = worst.max(numerics::max_abs_diff(&lhs, &rhs));
            }
        }
        worst
    }

    /// Every `π_α` injective.
    pub fn structurally_faithful(&self) -> bool {
        self.pi.iter().all(StarMap::is_injective)
    }

    pub fn to_value(&self) -> Value {
        let p = self.system.poset();
        json!({
            "system": self.system.to_value(),
            "hdims": p.ids().map(|a| (p.label(a).to_string(), json!(self.hilbert.hdim(a)))).collect::<serde_json::Map<_, _>>(),
            "U": p.covers().iter().map(|&(a, b)| json!({
                "src": p.label(a),
                "dst": p.label(b),
                "U": MatrixJson::from(self.hilbert.cover(a, b).expect("cover")),
            })).collect::<Vec<_>>(),
            "pi": p.ids().map(|a| {
                let (kind, m) = match &self.pi[a.0] {
                    StarMap::Identity(n) => ("identity", json!(n)),
                    StarMap::Conjugation(v) => ("conjugation", json!(MatrixJson::from(v))),
                    StarMap::Superoperator { matrix, .. } => ("superop", json!(MatrixJson::from(matrix))),
                };
                json!({"index": p.label(a), "kind": kind, "matrix": m})
            }).collect::<Vec<_>>(),
        })
    }

    pub fn from_value(v: &Value) -> Result<Self> {
        let system = Arc::new(DirectedSystem::from_value(v["system"].clone())?);
        let p = system.poset();
        let hd = v["hdims"]
            .as_object()
            .ok_or_else(|| Error::BadShape("missing hdims".into()))?;
        let hdims = p
            .labels()
            .iter()
            .map(|l| {
                hd.get(l)
                    .and_then(Value::as_u64)
                    .map(|h| h as usize)
                    .ok_or_else(|| Error::UnknownIndex(l.clone()))
            })
            .collect::<Result<Vec<_>>>()?;
        let mut covers = BTreeMap::new();
        for e in v["U"].as_array().ok_or_else(|| Error::BadShape("missing U".into()))? {
            let a = system.index(e["src"].as_str().unwrap_or_default())?;
            let b = system.index(e["dst"].as_str().unwrap_or_default())?;
            let m: MatrixJson = serde_json::from_value(e["U"].clone())?;
            covers.insert((a, b), ComplexMatrix::try_from(m)?);
        }
        let mut pi: Vec<Option<StarMap>> = vec![None; p.len()];
        for e in v["pi"].as_array().ok_or_else(|| Error::BadShape("missing pi".into()))? {
            let a = system.index(e["index"].as_str().unwrap_or_default())?;
            let map = match e["kind"].as_str() {
                Some("identity") => StarMap::Identity(system.dim(a)),
                Some("conjugation") => {
                    let m: MatrixJson = serde_json::from_value(e["matrix"].clone())?;
                    StarMap::Conjugation(ComplexMatrix::try_from(m)?)
                }
                Some("superop") => {
                    let m: MatrixJson = serde_json::from_value(e["matrix"].clone())?;
                    StarMap::Superoperator {
                        source_dim: system.dim(a),
                        target_dim: hdims[a.0],
                        matrix: ComplexMatrix::try_from(m)?,
                    }
                }
                other => return Err(Error::BadShape(format!("unknown π kind {other:?}"))),
            };
            pi[a.0] = Some(map);
        }
        let pi = pi
            .into_iter()
            .enumerate()
            .map(|(i, m)| m.ok_or_else(|| Error::UnknownIndex(p.labels()[i].clone())))
            .collect::<Result<Vec<_>>>()?;
        let hilbert = ContractiveHilbertSystem::new(p.clone(), hdims, covers)?;
        Self::new(&system, hilbert, pi)
    }
}

fn witnesses(sys: &DirectedSystem) -> Result<BTreeMap<(IndexId, IndexId), ComplexMatrix>> {
    sys.edges()
        .map(|((a, b), e)| match e {
            Embedding::Compression { witness } => Ok(((a, b), witness.clone())),
            Embedding::Superoperator { .. } => Err(Error::NoCompressionWitness {
                src: sys.label(a).to_string(),
                dst: sys.label(b).to_string(),
            }),
        })
        .collect()
}

/// `π_α = id`, `U_{βα} = W*` for the compression witness `W` of each edge.
pub fn identity_representation(sys: &Arc<DirectedSystem>) -> Result<Representation> {
    let covers = witnesses(sys)?.into_iter().map(|(k, w)| (k, w.adjoint())).collect();
    let hilbert = ContractiveHilbertSystem::new(sys.poset().clone(), sys.dims().to_vec(), covers)?;
    let pi = sys.poset().ids().map(|a| StarMap::Identity(sys.dim(a))).collect();
    Representation::new(sys, hilbert, pi)
}

/// `π_α(x) = V_α x V_α*` with seeded random unitaries and
/// `U_{βα} = V_β W* V_α*`.
pub fn unitary_conjugation_representation(sys: &Arc<DirectedSystem>, seed: u64) -> Result<Representation> {
    let mut rng = seeded(seed);
    let vs: Vec<ComplexMatrix> = sys
        .poset()
        .ids()
        .map(|a| random_unitary(sys.dim(a), &mut rng))
        .collect();
    let covers = witnesses(sys)?
        .into_iter()
        .map(|((a, b), w)| ((a, b), &vs[b.0] * w.adjoint() * vs[a.0].adjoint()))
        .collect();
    let hilbert = ContractiveHilbertSystem::new(sys.poset().clone(), sys.dims().to_vec(), covers)?;
    let pi = vs.into_iter().map(StarMap::Conjugation).collect();
    Representation::new(sys, hilbert, pi)
}

/// `π_α = 0` on the Hilbert system of the identity representation.
pub fn zero_representation(sys: &Arc<DirectedSystem>) -> Result<Representation> {
    let id = identity_representation(sys)?;
    let pi = sys
        .poset()
        .ids()
        .map(|a| StarMap::Conjugation(numerics::zeros(sys.dim(a))))
        .collect();
    Representation::new(sys, id.hilbert, pi)
}

/// `π_α(x) = P x P` with `P` dropping the last basis vector. Not
/// multiplicative; coherent when the witnesses commute with `P`, e.g. on
/// identity chains.
pub fn corner_killing_representation(sys: &Arc<DirectedSystem>) -> Result<Representation> {
    let id = identity_representation(sys)?;
    let pi = sys
        .poset()
        .ids()
        .map(|a| {
            let n = sys.dim(a);
            let mut p = numerics::identity(n);
            p[(n - 1, n - 1)] = numerics::ZERO;
            StarMap::Conjugation(p)
        })
        .collect();
    Representation::new(sys, id.hilbert, pi)
}

/// Axioms of the Hilbert system, the *-homomorphism property of each
/// component, and the coherence equality, on `trials` samples each.
pub fn verify_representation<R: Rng + ?Sized>(
    rep: &Representation,
    trials: usize,
    tol: Tolerance,
    rng: &mut R,
) -> Report {
    let sys = &rep.system;
    let h = &rep.hilbert;
    let mut report = Report::new("representation", sys.id(), trials);
    let mut injective = SlackTracker::new();
    let mut contractive = SlackTracker::new();
    for &(a, b) in sys.poset().covers() {
        let u = h.cover(a, b).expect("cover");
        let margin = if u.nrows() < u.ncols() {
            0.0
        } else {
            numerics::min_singular_value(u)
        };
        injective.observe(
            margin - RANK_THRESHOLD,
            || json!({"src": sys.label(a), "dst": sys.label(b), "margin": margin}),
        );
        let norm = numerics::operator_norm(u);
        contractive.observe(
            1.0 + tol.eps_eq - norm,
            || json!({"src": sys.label(a), "dst": sys.label(b), "norm": norm}),
        );
    }
    report.push(injective.entry("hilbert-injective", "hilbert-injective"));
    report.push(contractive.entry("hilbert-contractive", "hilbert-contractive"));
    report.push(Entry::with_status(
        "hilbert-identity",
        "hilbert-identity",
        Status::Automatic,
        0.0,
    ));
    let cocycle = h.cocycle_residual();
    report.push(Entry::check("hilbert-cocycle", "hilbert-cocycle", tol.eps_eq - cocycle));

    let mut hom = SlackTracker::new();
    for a in sys.poset().ids() {
        let n = sys.dim(a);
        for t in 0..trials {
            let x = unit_matrix(n, rng);
            let y = unit_matrix(n, rng);
            let (px, py) = (rep.apply(a, &x), rep.apply(a, &y));
            let mult = numerics::max_abs_diff(&rep.apply(a, &(&x * &y)), &(&px * &py));
            let inv = numerics::max_abs_diff(&rep.apply(a, &x.adjoint()), &px.adjoint());
            let scale = numerics::max_abs(&px).max(numerics::max_abs(&py)).max(1.0);
            let r = mult.max(inv);
            hom.observe(
                tol.eps_eq * scale * scale - r,
                || json!({"index": sys.label(a), "trial": t, "multiplicative": mult, "involution": inv}),
            );
        }
    }
    report.push(hom.entry("star-homomorphism", "star-homomorphism"));

    let mut coh = SlackTracker::new();
    for ((a, b), e) in sys.edges() {
        let u = h.cover(a, b).expect("cover");
        for t in 0..trials {
            let x = unit_matrix(sys.dim(a), rng);
            let lhs = rep.apply(b, &e.apply(&x));
            let rhs = u * rep.apply(a, &x) * u.adjoint();
            let r = numerics::max_abs_diff(&lhs, &rhs);
            coh.observe(tol.eps_eq * numerics::max_abs(&lhs).max(1.0) - r, || {
                json!({"src": sys.label(a), "dst": sys.label(b), "trial": t, "residual": r, "x": MatrixJson::from(&x)})
            });
        }
    }
    report.push(coh.entry("representation-coherence", "representation-coherence"));
    report
}

#[derive(Debug, Clone, PartialEq)]
pub struct FaithfulnessVerdict {
    pub faithful: bool,
    /// Every component is injective, which proves faithfulness.
    pub certified: bool,
    /// Origin index and nonzero PSD `x` with `π_α(j_{αγ}(x)) = 0` above it.
    pub witness: Option<(String, ComplexMatrix)>,
}

/// `x` pushed from `gamma` is annihilated at every index above it.
fn annihilated(rep: &Representation, gamma: IndexId, x: &ComplexMatrix, tol: Tolerance) -> bool {
    let sys = &rep.system;
    sys.poset()
        .up_set(gamma)
        .into_iter()
        .all(|b| numerics::max_abs(&rep.apply(b, &sys.push(gamma, b, x))) <= tol.eps_eq * numerics::max_abs(x).max(1.0))
}

/// Faithfulness: structural certificate when every `π_α` is injective,
/// otherwise a search for a nonzero positive `x` with `π(x) = 0`. The
/// search tries the identity, PSD kernel elements of each component, then
/// `trials` random PSD matrices. Without a certificate, a failed search
/// only suggests faithfulness.
pub fn faithfulness<R: Rng + ?Sized>(
    rep: &Representation,
    trials: usize,
    tol: Tolerance,
    rng: &mut R,
) -> FaithfulnessVerdict {
    if rep.structurally_faithful() {
        return FaithfulnessVerdict {
            faithful: true,
            certified: true,
            witness: None,
        };
    }
    let sys = &rep.system;
    for gamma in sys.poset().bottom_up() {
        let n = sys.dim(gamma);
        let mut candidates = vec![numerics::identity(n)];
        candidates.extend(rep.pi(gamma).kernel_candidates());
        candidates.extend((0..trials).map(|_| random_psd(n, rng)));
        for x in candidates {
            let norm = numerics::operator_norm(&x);
            if norm <= tol.eps_eq {
                continue;
            }
            let x = x.unscale(norm);
            if annihilated(rep, gamma, &x, tol) {
                return FaithfulnessVerdict {
                    faithful: false,
                    certified: false,
                    witness: Some((sys.label(gamma).to_string(), x)),
                };
            }
        }
    }
    FaithfulnessVerdict {
        faithful: true,
        certified: false,
        witness: None,
    }
}

pub fn is_faithful<R: Rng + ?Sized>(rep: &Representation, trials: usize, tol: Tolerance, rng: &mut R) -> bool {
    faithfulness(rep, trials, tol, rng).faithful
}

/// For a structurally faithful representation, whether each `π_α` is
/// faithful on its own matrix algebra: no nonzero PSD matrix in its kernel.
pub fn componentwise_faithfulness_check(rep: &Representation, tol: Tolerance) -> Result<BTreeMap<String, bool>> {
    if !rep.structurally_faithful() {
        return Err(Error::PreconditionsUnmet(
            "representation is not certified faithful".into(),
        ));
    }
    let sys = &rep.system;
    Ok(sys
        .poset()
        .ids()
        .map(|a| {
            let m = rep.pi(a);
            let ok = m.is_injective()
                || !m.kernel_candidates().iter().any(|x| {
                    let norm = numerics::operator_norm(x);
                    norm > tol.eps_eq && numerics::max_abs(&m.apply(&x.unscale(norm))) <= tol.eps_eq
                });
            (sys.label(a).to_string(), ok)
        })
        .collect())
}

/// `max_α ‖π_α(x_α)‖` against the bounded norm of `x`, per representation.
///
/// The bound `s ≤ ‖x‖_b` is asserted when `x` is bounded. Equality is
/// asserted for representations whose components are isometric
/// *-homomorphisms by construction.
pub fn rep_bound_suite(x: &CoherentElement, reps: &[Representation], tol: Tolerance) -> Report {
    let sys = x.system();
    let mut report = Report::new("rep-bound", sys.id(), reps.len());
    let bounded = x.bounded_norm(tol);
    let full = bounded
        .as_ref()
        .map(|b| b.element().clone())
        .unwrap_or_else(|| x.clone());
    if let Some(b) = &bounded {
        report.metric("bnorm", b.bnorm());
    }
    for (k, rep) in reps.iter().enumerate() {
        let s = rep
            .image(&full)
            .values()
            .map(numerics::operator_norm)
            .fold(0.0, f64::max);
        report.metric(&format!("s{k}"), s);
        match &bounded {
            Some(b) => {
                let bn = b.bnorm();
                report.push(
                    Entry::check(format!("bound-{k}"), "representation-bound", bn + tol.eps_eq - s)
                        .witness(json!({"s": s, "bnorm": bn})),
                );
                if rep.pi.iter().all(StarMap::is_isometric_star_map) {
                    report.push(
                        Entry::check(
                            format!("isometry-{k}"),
                            "faithful-representation-isometry",
                            tol.eps_eq * bn.max(1.0) - (s - bn).abs(),
                        )
                        .witness(json!({"s": s, "bnorm": bn})),
                    );
                }
            }
            None => report.push(
                Entry::with_status(format!("bound-{k}"), "representation-bound", Status::Reported, 0.0)
                    .witness(json!({"s": s, "bounded": false})),
            ),
        }
    }
    report
}

/// Block-diagonal of all representatives and its operator norm.
#[derive(Debug, Clone)]
pub struct DirectSum {
    pub matrix: ComplexMatrix,
    pub norm: f64,
    pub bnorm: f64,
}

pub fn direct_sum_embed(x: &CoherentElement, tol: Tolerance) -> Result<DirectSum> {
    let b = x.bounded_norm(tol).ok_or(Error::NotBounded)?;
    let blocks: Vec<&ComplexMatrix> = b.element().reps().values().collect();
    let matrix = numerics::block_diagonal(&blocks);
    let norm = numerics::operator_norm(&matrix);
    Ok(DirectSum {
        matrix,
        norm,
        bnorm: b.bnorm(),
    })
}
