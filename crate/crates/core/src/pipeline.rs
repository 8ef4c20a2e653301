//! The staged end-to-end run behind `cstar suite-all`.
//!
//! Stages run in dependency order (axioms, elements, order,
//! multiplication, functionals, representations, rigged model) on systems
//! generated from a single seed, and stop at the first failing stage.

use std::sync::Arc;

use serde_json::{json, Value};

use crate::directed::{
    generate_compression_system, generate_unitary_system, verify_axioms, DirectedSystem, SystemShape,
};
use crate::elements::{elements_suite, sample_bounded, CoherentElement};
use crate::error::{Error, Result};
use crate::functionals::{extremal_pair, functional_bound_suite, functional_checks, p_upper_bound, Functional};
use crate::mult::{banach_inequality_suite, partiality_probe, WeightFamily};
use crate::numerics::Tolerance;
use crate::order::{bounded_iff_order_bounded_suite, find_pre_unit};
use crate::report::{canonical_json, Entry, Report};
use crate::representations::{
    componentwise_faithfulness_check, corner_killing_representation, direct_sum_embed, faithfulness,
    identity_representation, rep_bound_suite, unitary_conjugation_representation, verify_representation,
    zero_representation,
};
use crate::rigged::{cross_model_check, equivalence_suite, export_directed_system, RiggedModel};
use crate::sampling::{random_hermitian, random_psd, seeded, unit_matrix, SeededRng, GENERATOR};

pub const STAGES: &[&str] = &["axioms", "elements", "order", "mult", "functionals", "reps", "rigged"];

#[derive(Debug, Clone)]
pub struct SuiteRun {
    pub seed: u64,
    pub trials: usize,
    pub stages: Vec<Report>,
}

impl SuiteRun {
    pub fn passed(&self) -> bool {
        self.stages.len() == STAGES.len() && self.stages.iter().all(Report::all_passed)
    }

    pub fn to_value(&self) -> Value {
        json!({
            "generator": GENERATOR,
            "seed": self.seed,
            "trials": self.trials,
            "passed": self.passed(),
            "stages": self.stages.iter().map(Report::to_value).collect::<Vec<_>>(),
        })
    }

    pub fn to_canonical_json(&self) -> String {
        canonical_json(&self.to_value())
    }
}

fn chain_system(seed: u64) -> Result<Arc<DirectedSystem>> {
    Ok(Arc::new(generate_compression_system(
        &SystemShape::chain(&[2, 3, 4]),
        seed,
    )?))
}

fn renamed(mut r: Report, suite: &str) -> Report {
    r.suite = suite.to_string();
    r
}

pub fn axioms_stage(seed: u64, trials: usize, tol: Tolerance, rng: &mut SeededRng) -> Result<Report> {
    let mut report = Report::new("axioms", "", trials);
    let shapes = [
        ("chain", SystemShape::chain(&[2, 3, 4])),
        ("vee", SystemShape::vee(2, 3, 4)),
        ("diamond", SystemShape::diamond(2, 3, 3, 4)),
    ];
    for (k, (name, shape)) in shapes.iter().enumerate() {
        let sys = generate_compression_system(shape, seed.wrapping_add(k as u64))?;
        report.extend(renamed(verify_axioms(&sys, trials, tol, rng), name));
    }
    Ok(report)
}

pub fn elements_stage(seed: u64, trials: usize, tol: Tolerance, rng: &mut SeededRng) -> Result<Report> {
    let sys = chain_system(seed)?;
    elements_suite(&sys, trials, tol, rng)
}

pub fn order_stage(seed: u64, trials: usize, tol: Tolerance, rng: &mut SeededRng) -> Result<Report> {
    let sys = chain_system(seed)?;
    bounded_iff_order_bounded_suite(&sys, trials, tol, rng)
}

/// Banach inequality and C*-identity with identity weights on a unitary
/// chain; partiality with pre-unit weights on a compression chain.
pub fn mult_stage(seed: u64, trials: usize, tol: Tolerance, rng: &mut SeededRng) -> Result<Report> {
    let unitary = Arc::new(generate_unitary_system(&SystemShape::chain(&[3, 3, 3]), seed)?);
    let w = WeightFamily::identity(&unitary, tol)?;
    let mut report = banach_inequality_suite(&unitary, &w, trials, tol, rng)?;
    let strict = chain_system(seed)?;
    let u = find_pre_unit(&strict, tol).ok_or_else(|| Error::PreconditionsUnmet("no pre-unit".into()))?;
    let w = WeightFamily::new(u.element().clone(), tol)?;
    report.push(partiality_probe(&strict, &w, trials.clamp(1, 20), tol, rng)?);
    Ok(report)
}

/// Functional checks and both bounds for a Hermitian bounded element on a
/// compression chain with pre-unit weights. Multipliers live at the top,
/// where every product is defined; one attains `p(x)`.
pub fn functionals_stage(seed: u64, trials: usize, tol: Tolerance, rng: &mut SeededRng) -> Result<Report> {
    let sys = chain_system(seed)?;
    let top = sys.top();
    let n = sys.dim(top);
    let u = find_pre_unit(&sys, tol).ok_or_else(|| Error::PreconditionsUnmet("no pre-unit".into()))?;
    let w = WeightFamily::new(u.element().clone(), tol)?;
    let x = sample_bounded(&sys, true, tol, rng).ok_or(Error::NotBounded)?;
    let mut fs = vec![Functional::trace_state(&sys)];
    for _ in 0..trials.max(1) {
        fs.push(Functional::from_top_density(&sys, random_psd(n, rng), tol)?);
    }
    let mut ms = Vec::new();
    for _ in 0..4 {
        ms.push(CoherentElement::push_forward(&sys, top, unit_matrix(n, rng))?);
    }
    let (omega, a) = extremal_pair(&x, &u, &w, tol).ok_or(Error::NotOrderBounded)?;
    fs.push(omega);
    ms.push(a);

    let mut report = Report::new("functionals", sys.id(), trials);
    report.extend(functional_checks(&sys, &fs, 5, tol, rng));
    report.extend(functional_bound_suite(&x, &u, &w, &fs, &ms, tol)?);
    let b = p_upper_bound(&x, &u, &w, &fs, &ms, tol)?;
    report.metric("p_upper_bound", b.bound);
    report.push(
        Entry::check("p-upper-bound", "p-upper-bound", b.gap + 1e-8).witness(json!({"bound": b.bound, "p": b.p})),
    );
    Ok(report)
}

/// Identity, unitary-conjugation and zero representations of a compression
/// chain, plus the corner-killing fixture on an identity chain, which must
/// be flagged non-faithful.
pub fn reps_stage(seed: u64, trials: usize, tol: Tolerance, rng: &mut SeededRng) -> Result<Report> {
    let sys = chain_system(seed)?;
    let reps = vec![
        identity_representation(&sys)?,
        unitary_conjugation_representation(&sys, seed)?,
        zero_representation(&sys)?,
    ];
    let mut report = Report::new("reps", sys.id(), trials);
    for (name, rep) in ["identity", "unitary", "zero"].iter().zip(&reps) {
        report.extend(renamed(verify_representation(rep, trials, tol, rng), name));
    }
    for (name, rep) in ["identity", "unitary"].iter().zip(&reps) {
        let v = faithfulness(rep, trials, tol, rng);
        let ok = v.faithful && v.certified;
        report.push(Entry::check(
            format!("{name}.faithful"),
            "faithfulness",
            if ok { 0.0 } else { -1.0 },
        ));
        let cw = componentwise_faithfulness_check(rep, tol)?;
        let bad: Vec<&String> = cw.iter().filter(|(_, &ok)| !ok).map(|(l, _)| l).collect();
        report.push(
            Entry::check(
                format!("{name}.componentwise"),
                "componentwise-faithfulness",
                if bad.is_empty() { 0.0 } else { -1.0 },
            )
            .witness(json!({"failing": bad})),
        );
    }
    let id_chain = Arc::new(DirectedSystem::identity_chain(3, 3));
    let corner = corner_killing_representation(&id_chain)?;
    let v = faithfulness(&corner, trials, tol, rng);
    report.push(
        Entry::check(
            "corner-killing.flagged",
            "faithfulness",
            if v.faithful { -1.0 } else { 0.0 },
        )
        .witness(json!({"witness_index": v.witness.as_ref().map(|(l, _)| l.clone())})),
    );
    let x = sample_bounded(&sys, false, tol, rng).ok_or(Error::NotBounded)?;
    report.extend(rep_bound_suite(&x, &reps, tol));
    let d = direct_sum_embed(&x, tol)?;
    report.push(Entry::check(
        "direct-sum",
        "direct-sum-isometry",
        tol.eps_eq * d.bnorm.max(1.0) - (d.norm - d.bnorm).abs(),
    ));
    Ok(report)
}

/// Equivalence suite on a random model for Hermitian and general
/// operators, then the axioms and cross-model checks on an exported chain.
pub fn rigged_stage(seed: u64, trials: usize, tol: Tolerance, rng: &mut SeededRng) -> Result<Report> {
    let model = RiggedModel::random(3, 5, seed, tol)?;
    let mut report = Report::new("rigged", "", trials);
    let h = random_hermitian(3, rng);
    report.extend(renamed(
        equivalence_suite(&model, &h, trials.min(20), tol, rng)?,
        "hermitian",
    ));
    let g = unit_matrix(3, rng);
    report.extend(renamed(
        equivalence_suite(&model, &g, trials.min(20), tol, rng)?,
        "general",
    ));
    let chain = RiggedModel::chain(3, 4, seed, tol)?;
    let sys = export_directed_system(&chain)?;
    report.system_id = sys.id().to_string();
    report.extend(renamed(verify_axioms(&sys, trials, tol, rng), "export-axioms"));
    report.extend(cross_model_check(&chain, &random_hermitian(3, rng), tol)?);
    Ok(report)
}

/// Runs every stage with one generator seeded by `seed`, stopping after the
/// first stage with a failing entry.
pub fn suite_all(seed: u64, trials: usize, tol: Tolerance) -> Result<SuiteRun> {
    type Stage = fn(u64, usize, Tolerance, &mut SeededRng) -> Result<Report>;
    let stages: [Stage; 7] = [
        axioms_stage,
        elements_stage,
        order_stage,
        mult_stage,
        functionals_stage,
        reps_stage,
        rigged_stage,
    ];
    let mut rng = seeded(seed);
    let mut run = SuiteRun {
        seed,
        trials,
        stages: Vec::new(),
    };
    for stage in stages {
        let r = stage(seed, trials, tol, &mut rng)?;
        let ok = r.all_passed();
        run.stages.push(r);
        if !ok {
            break;
        }
    }
    Ok(run)
}
