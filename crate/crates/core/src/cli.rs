//! `cstar` command line: generation, verification suites and JSON reports.
//!
//! Exit codes: 0 when every hard assertion passes, 2 when a report has a
//! failing entry, 1 on usage, input or I/O errors. `CSTAR_EPS` sets both
//! tolerances unless `--eps-psd` / `--eps-eq` are given.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::directed::{
    check_r1, check_r2, generate_compression_system, generate_unitary_system, verify_axioms, DirectedSystem,
    SystemShape,
};
use crate::elements::{sample_bounded, CoherentElement};
use crate::error::{Error, Result};
use crate::functionals::{extremal_pair, functional_bound_suite, functional_checks, p_upper_bound, Functional};
use crate::mult::{banach_inequality_suite, find_unit, is_bounded_unit, multiply, partiality_probe, WeightFamily};
use crate::numerics::{ComplexMatrix, MatrixJson, Tolerance};
use crate::order::{bounded_iff_order_bounded_suite, find_pre_unit, order_bound, pre_unit_candidates, PreUnit};
use crate::pipeline::suite_all;
use crate::report::{canonical_json, Entry, Report, Status};
use crate::representations::{
    componentwise_faithfulness_check, direct_sum_embed, faithfulness, identity_representation, rep_bound_suite,
    verify_representation, Representation,
};
use crate::rigged::{equivalence_suite, export_directed_system, RiggedModel};
use crate::sampling::{random_hermitian, random_psd, seeded, unit_matrix, SeededRng};

pub const EPS_ENV: &str = "CSTAR_EPS";

#[derive(Parser, Debug)]
#[command(
    name = "cstar",
    version,
    about = "Checks for C*-inductive spaces over matrix algebras"
)]
struct Cli {
    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,
    #[arg(long, global = true, default_value_t = 50)]
    trials: usize,
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true)]
    eps_psd: Option<f64>,
    #[arg(long, global = true)]
    eps_eq: Option<f64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate a directed system of compressions (or unitary conjugations).
    Generate {
        #[arg(long, value_enum, default_value_t = Shape::Chain)]
        shape: Shape,
        /// Dimensions: any number for a chain, 3 for a vee, 4 for a diamond.
        #[arg(long, value_delimiter = ',', default_values_t = [2, 3, 4])]
        dims: Vec<usize>,
        #[arg(long)]
        unitary: bool,
    },
    /// Check the axioms of a system file and report positivity reflection
    /// and unit ranges.
    Verify {
        #[arg(long = "in")]
        input: PathBuf,
    },
    #[command(subcommand)]
    Element(ElementCommand),
    #[command(subcommand)]
    Order(OrderCommand),
    #[command(subcommand)]
    Mult(MultCommand),
    #[command(subcommand)]
    Func(FuncCommand),
    #[command(subcommand)]
    Rep(RepCommand),
    #[command(subcommand)]
    Rigged(RiggedCommand),
    /// Run every stage on generated systems, stopping at the first failure.
    SuiteAll,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum Shape {
    Chain,
    Vee,
    Diamond,
}

#[derive(Subcommand, Debug)]
enum ElementCommand {
    /// Push a matrix forward from an index (random Hermitian if no matrix).
    Push {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        index: String,
        #[arg(long)]
        matrix: Option<PathBuf>,
    },
    /// Extend an element down to one index, or to every index.
    Extend {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        element: PathBuf,
        #[arg(long)]
        index: Option<String>,
    },
    /// Bounded norm, when the element has a representative everywhere.
    Norm {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        element: PathBuf,
    },
}

#[derive(Subcommand, Debug)]
enum OrderCommand {
    Preunit {
        #[arg(long = "in")]
        input: PathBuf,
    },
    PValue {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        element: PathBuf,
    },
    Suite {
        #[arg(long = "in")]
        input: PathBuf,
    },
}

#[derive(Subcommand, Debug)]
enum MultCommand {
    Product {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        x: PathBuf,
        #[arg(long)]
        y: PathBuf,
        /// Weight element; identity weights if coherent, else the pre-unit.
        #[arg(long)]
        weight: Option<PathBuf>,
    },
    Unit {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        weight: Option<PathBuf>,
    },
    Suite {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        weight: Option<PathBuf>,
        /// Also require an undefined product among random pairs.
        #[arg(long)]
        probe_partiality: bool,
    },
}

#[derive(Subcommand, Debug)]
enum FuncCommand {
    /// Functional from a top density (random PSD if none given).
    Make {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        density: Option<PathBuf>,
    },
    Positivity {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        functional: PathBuf,
    },
    /// Functional bounds for an order-bounded element.
    #[command(alias = "thm55")]
    Bounds {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        element: Option<PathBuf>,
    },
}

#[derive(Subcommand, Debug)]
enum RepCommand {
    Identity {
        #[arg(long = "in")]
        input: PathBuf,
    },
    Verify {
        #[arg(long = "in")]
        input: PathBuf,
    },
    BoundSuite {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        element: Option<PathBuf>,
    },
}

#[derive(Subcommand, Debug)]
enum RiggedCommand {
    Build {
        #[arg(long)]
        dim: usize,
        #[arg(long, default_value_t = 5)]
        weights: usize,
        /// Totally ordered weights instead of random ones.
        #[arg(long)]
        chain: bool,
    },
    #[command(alias = "thm35")]
    Equivalence {
        #[arg(long = "in")]
        input: PathBuf,
        /// Operator to test; otherwise `--trials` random ones.
        #[arg(long)]
        matrix: Option<PathBuf>,
    },
    Export {
        #[arg(long = "in")]
        input: PathBuf,
    },
}

/// What a command produced.
enum Output {
    Data(Value),
    Report(Value, bool),
}

struct Ctx {
    seed: u64,
    trials: usize,
    tol: Tolerance,
    rng: SeededRng,
}

/// Parses `argv` (including the program name), runs the command and returns
/// the exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

fn tolerance(cli: &Cli) -> Result<Tolerance> {
    let env = match std::env::var(EPS_ENV) {
        Ok(s) => Some(
            s.trim()
                .parse::<f64>()
                .map_err(|_| Error::InvalidTolerance(format!("{EPS_ENV}={s}")))?,
        ),
        Err(_) => None,
    };
    let d = Tolerance::default();
    let psd = cli.eps_psd.or(env).unwrap_or(d.eps_psd);
    let eq = cli.eps_eq.or(env).unwrap_or(d.eps_eq);
    Tolerance::new(psd, eq)
}

fn execute(cli: Cli) -> Result<i32> {
    let tol = tolerance(&cli)?;
    let mut ctx = Ctx {
        seed: cli.seed,
        trials: cli.trials,
        tol,
        rng: seeded(cli.seed),
    };
    let out = dispatch(cli.command, &mut ctx)?;
    let (value, code) = match out {
        Output::Data(v) => (v, 0),
        Output::Report(v, ok) => (v, if ok { 0 } else { 2 }),
    };
    let mut text = canonical_json(&value);
    text.push('\n');
    match &cli.out {
        Some(p) => fs::write(p, text)?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(code)
}

fn read_json(p: &Path) -> Result<Value> {
    Ok(serde_json::from_str(&fs::read_to_string(p)?)?)
}

fn read_system(p: &Path) -> Result<Arc<DirectedSystem>> {
    Ok(Arc::new(DirectedSystem::from_value(read_json(p)?)?))
}

fn read_matrix(p: &Path) -> Result<ComplexMatrix> {
    let m: MatrixJson = serde_json::from_value(read_json(p)?)?;
    ComplexMatrix::try_from(m)
}

fn read_element(sys: &Arc<DirectedSystem>, p: &Path) -> Result<CoherentElement> {
    CoherentElement::from_value(sys, &read_json(p)?)
}

fn report(r: Report) -> Output {
    let ok = r.all_passed();
    Output::Report(r.to_value(), ok)
}

fn need_pre_unit(sys: &Arc<DirectedSystem>, tol: Tolerance) -> Result<PreUnit> {
    find_pre_unit(sys, tol).ok_or_else(|| Error::PreconditionsUnmet("system has no pre-unit".into()))
}

fn weight(sys: &Arc<DirectedSystem>, path: Option<&Path>, tol: Tolerance) -> Result<WeightFamily> {
    if let Some(p) = path {
        return WeightFamily::new(read_element(sys, p)?, tol);
    }
    WeightFamily::identity(sys, tol).or_else(|_| WeightFamily::new(need_pre_unit(sys, tol)?.element().clone(), tol))
}

fn dispatch(cmd: Command, ctx: &mut Ctx) -> Result<Output> {
    let tol = ctx.tol;
    match cmd {
        Command::Generate { shape, dims, unitary } => {
            let shape = match (shape, dims.as_slice()) {
                (Shape::Chain, d) if !d.is_empty() => SystemShape::chain(d),
                (Shape::Vee, &[l, r, t]) => SystemShape::vee(l, r, t),
                (Shape::Diamond, &[b, l, r, t]) => SystemShape::diamond(b, l, r, t),
                _ => return Err(Error::BadShape(format!("wrong number of dims for {shape:?}"))),
            };
            let sys = if unitary {
                generate_unitary_system(&shape, ctx.seed)?
            } else {
                generate_compression_system(&shape, ctx.seed)?
            };
            Ok(Output::Data(sys.to_value()))
        }
        Command::Verify { input } => {
            let sys = read_system(&input)?;
            let mut r = verify_axioms(&sys, ctx.trials, tol, &mut ctx.rng);
            let r1 = check_r1(&sys, ctx.trials, tol, &mut ctx.rng);
            let mut e = Entry::with_status("r1", "positivity-reflecting", Status::Reported, 0.0)
                .witness(json!({"holds": r1.holds, "structural": r1.structural, "counterexample": r1.witness}));
            e.worst_slack = if r1.holds { 0.0 } else { -1.0 };
            r.push(e);
            let r2 = check_r2(&sys, tol);
            r.push(
                Entry::with_status("r2", "unit-in-range", Status::Reported, 0.0).witness(json!(r2
                    .iter()
                    .map(|e| json!({"src": e.src, "dst": e.dst, "holds": e.holds, "residual": e.residual}))
                    .collect::<Vec<_>>())),
            );
            Ok(report(r))
        }
        Command::Element(c) => element(c, ctx),
        Command::Order(c) => order(c, ctx),
        Command::Mult(c) => mult(c, ctx),
        Command::Func(c) => func(c, ctx),
        Command::Rep(c) => rep(c, ctx),
        Command::Rigged(c) => rigged(c, ctx),
        Command::SuiteAll => {
            let run = suite_all(ctx.seed, ctx.trials, tol)?;
            let ok = run.passed();
            Ok(Output::Report(run.to_value(), ok))
        }
    }
}

fn element(cmd: ElementCommand, ctx: &mut Ctx) -> Result<Output> {
    let tol = ctx.tol;
    match cmd {
        ElementCommand::Push { input, index, matrix } => {
            let sys = read_system(&input)?;
            let a = sys.index(&index)?;
            let m = match matrix {
                Some(p) => read_matrix(&p)?,
                None => random_hermitian(sys.dim(a), &mut ctx.rng),
            };
            Ok(Output::Data(CoherentElement::push_forward(&sys, a, m)?.to_value()))
        }
        ElementCommand::Extend { input, element, index } => {
            let sys = read_system(&input)?;
            let e = read_element(&sys, &element)?;
            let extended = match index {
                Some(l) => e.with_extension(sys.index(&l)?, tol),
                None => e.extend_to_all(tol),
            };
            Ok(Output::Data(match extended {
                Some(x) => json!({"representable": true, "element": x.to_value()}),
                None => json!({"representable": false}),
            }))
        }
        ElementCommand::Norm { input, element } => {
            let sys = read_system(&input)?;
            let e = read_element(&sys, &element)?;
            Ok(Output::Data(match e.bounded_norm(tol) {
                Some(b) => json!({"bounded": true, "bnorm": b.bnorm()}),
                None => json!({"bounded": false, "sup_norm_on_domain": e.sup_norm()}),
            }))
        }
    }
}

fn order(cmd: OrderCommand, ctx: &mut Ctx) -> Result<Output> {
    let tol = ctx.tol;
    match cmd {
        OrderCommand::Preunit { input } => {
            let sys = read_system(&input)?;
            let cands = pre_unit_candidates(&sys, tol);
            let chosen = find_pre_unit(&sys, tol);
            Ok(Output::Data(json!({
                "found": chosen.is_some(),
                "pre_unit": chosen.as_ref().map(|u| json!({
                    "origin": sys.label(u.origin()),
                    "reading": u.reading(),
                    "element": u.element().to_value(),
                })),
                "candidates": cands.iter().map(|u| json!({
                    "origin": sys.label(u.origin()),
                    "reading": u.reading(),
                })).collect::<Vec<_>>(),
            })))
        }
        OrderCommand::PValue { input, element } => {
            let sys = read_system(&input)?;
            let x = read_element(&sys, &element)?;
            let u = need_pre_unit(&sys, tol)?;
            Ok(Output::Data(match order_bound(&x, &u, tol)? {
                Some(b) => json!({
                    "order_bounded": true,
                    "p_re": b.re,
                    "p_im": b.im,
                    "index": sys.label(b.index),
                    "p": if x.is_hermitian(tol) { json!(b.re) } else { Value::Null },
                }),
                None => json!({"order_bounded": false}),
            }))
        }
        OrderCommand::Suite { input } => {
            let sys = read_system(&input)?;
            Ok(report(bounded_iff_order_bounded_suite(
                &sys,
                ctx.trials,
                tol,
                &mut ctx.rng,
            )?))
        }
    }
}

fn mult(cmd: MultCommand, ctx: &mut Ctx) -> Result<Output> {
    let tol = ctx.tol;
    match cmd {
        MultCommand::Product {
            input,
            x,
            y,
            weight: wp,
        } => {
            let sys = read_system(&input)?;
            let w = weight(&sys, wp.as_deref(), tol)?;
            let (x, y) = (read_element(&sys, &x)?, read_element(&sys, &y)?);
            let pp = multiply(&x, &y, &w, tol)?;
            Ok(Output::Data(json!({
                "defined": pp.is_defined(),
                "witness": sys.label(pp.witness),
                "residuals": pp.residuals.iter().map(|r| json!({
                    "lower": r.lower, "upper": r.upper, "residual": r.residual,
                })).collect::<Vec<_>>(),
                "value": pp.value.as_ref().map(CoherentElement::to_value),
            })))
        }
        MultCommand::Unit { input, weight: wp } => {
            let sys = read_system(&input)?;
            let w = weight(&sys, wp.as_deref(), tol)?;
            Ok(Output::Data(match find_unit(&w, tol) {
                Some(e) => json!({"found": true, "bounded": is_bounded_unit(&e, tol), "unit": e.element().to_value()}),
                None => json!({"found": false}),
            }))
        }
        MultCommand::Suite {
            input,
            weight: wp,
            probe_partiality,
        } => {
            let sys = read_system(&input)?;
            let w = weight(&sys, wp.as_deref(), tol)?;
            let mut r = match banach_inequality_suite(&sys, &w, ctx.trials, tol, &mut ctx.rng) {
                Ok(r) => r,
                Err(Error::PreconditionsUnmet(why)) => {
                    let mut r = Report::new("mult", sys.id(), ctx.trials);
                    r.push(
                        Entry::with_status("banach", "banach-inequality", Status::Skipped, 0.0)
                            .witness(json!({"reason": why})),
                    );
                    r
                }
                Err(e) => return Err(e),
            };
            if probe_partiality {
                r.push(partiality_probe(&sys, &w, ctx.trials, tol, &mut ctx.rng)?);
            }
            Ok(report(r))
        }
    }
}

fn func(cmd: FuncCommand, ctx: &mut Ctx) -> Result<Output> {
    let tol = ctx.tol;
    match cmd {
        FuncCommand::Make { input, density } => {
            let sys = read_system(&input)?;
            let rho = match density {
                Some(p) => read_matrix(&p)?,
                None => random_psd(sys.dim(sys.top()), &mut ctx.rng),
            };
            Ok(Output::Data(Functional::from_top_density(&sys, rho, tol)?.to_value()))
        }
        FuncCommand::Positivity { input, functional } => {
            let sys = read_system(&input)?;
            let f = Functional::from_value(&sys, &read_json(&functional)?, tol)?;
            Ok(report(functional_checks(&sys, &[f], ctx.trials, tol, &mut ctx.rng)))
        }
        FuncCommand::Bounds { input, element } => {
            let sys = read_system(&input)?;
            let u = need_pre_unit(&sys, tol)?;
            let w = weight(&sys, None, tol)?;
            let x = match element {
                Some(p) => read_element(&sys, &p)?,
                None => sample_bounded(&sys, true, tol, &mut ctx.rng).ok_or(Error::NotBounded)?,
            };
            let top = sys.top();
            let n = sys.dim(top);
            let mut fs = vec![Functional::trace_state(&sys)];
            for _ in 0..ctx.trials {
                fs.push(Functional::from_top_density(&sys, random_psd(n, &mut ctx.rng), tol)?);
            }
            let mut ms = Vec::new();
            for _ in 0..4 {
                ms.push(CoherentElement::push_forward(&sys, top, unit_matrix(n, &mut ctx.rng))?);
            }
            if let Some((omega, a)) = extremal_pair(&x, &u, &w, tol) {
                fs.push(omega);
                ms.push(a);
            }
            let mut r = functional_bound_suite(&x, &u, &w, &fs, &ms, tol)?;
            if x.is_hermitian(tol) {
                let b = p_upper_bound(&x, &u, &w, &fs, &ms, tol)?;
                r.push(
                    Entry::check("p-upper-bound", "p-upper-bound", b.gap + 1e-8)
                        .witness(json!({"bound": b.bound, "p": b.p})),
                );
            }
            Ok(report(r))
        }
    }
}

fn rep(cmd: RepCommand, ctx: &mut Ctx) -> Result<Output> {
    let tol = ctx.tol;
    match cmd {
        RepCommand::Identity { input } => {
            let sys = read_system(&input)?;
            Ok(Output::Data(identity_representation(&sys)?.to_value()))
        }
        RepCommand::Verify { input } => {
            let rep = Representation::from_value(&read_json(&input)?)?;
            let mut r = verify_representation(&rep, ctx.trials, tol, &mut ctx.rng);
            let v = faithfulness(&rep, ctx.trials, tol, &mut ctx.rng);
            r.push(
                Entry::with_status("faithful", "faithfulness", Status::Reported, 0.0).witness(json!({
                    "faithful": v.faithful,
                    "certified": v.certified,
                    "witness": v.witness.as_ref().map(|(l, x)| json!({"index": l, "x": MatrixJson::from(x)})),
                })),
            );
            if v.certified {
                let cw = componentwise_faithfulness_check(&rep, tol)?;
                let ok = cw.values().all(|&b| b);
                r.push(
                    Entry::check(
                        "componentwise",
                        "componentwise-faithfulness",
                        if ok { 0.0 } else { -1.0 },
                    )
                    .witness(json!(cw)),
                );
            }
            Ok(report(r))
        }
        RepCommand::BoundSuite { input, element } => {
            let rep = Representation::from_value(&read_json(&input)?)?;
            let sys = Arc::clone(rep.system());
            let x = match element {
                Some(p) => read_element(&sys, &p)?,
                None => sample_bounded(&sys, false, tol, &mut ctx.rng).ok_or(Error::NotBounded)?,
            };
            let mut r = rep_bound_suite(&x, &[rep], tol);
            if let Ok(d) = direct_sum_embed(&x, tol) {
                r.push(Entry::check(
                    "direct-sum",
                    "direct-sum-isometry",
                    tol.eps_eq * d.bnorm.max(1.0) - (d.norm - d.bnorm).abs(),
                ));
            }
            Ok(report(r))
        }
    }
}

fn rigged(cmd: RiggedCommand, ctx: &mut Ctx) -> Result<Output> {
    let tol = ctx.tol;
    match cmd {
        RiggedCommand::Build { dim, weights, chain } => {
            let m = if chain {
                RiggedModel::chain(dim, weights, ctx.seed, tol)?
            } else {
                RiggedModel::random(dim, weights, ctx.seed, tol)?
            };
            Ok(Output::Data(m.to_value()))
        }
        RiggedCommand::Equivalence { input, matrix } => {
            let m = RiggedModel::from_value(read_json(&input)?, tol)?;
            let xs: Vec<ComplexMatrix> = match matrix {
                Some(p) => vec![read_matrix(&p)?],
                None => (0..ctx.trials)
                    .map(|k| {
                        if k % 2 == 0 {
                            random_hermitian(m.n(), &mut ctx.rng)
                        } else {
                            unit_matrix(m.n(), &mut ctx.rng)
                        }
                    })
                    .collect(),
            };
            let mut r = Report::new("equivalence", "rigged", ctx.trials);
            for (k, x) in xs.iter().enumerate() {
                let mut sub = equivalence_suite(&m, x, 10, tol, &mut ctx.rng)?;
                sub.suite = format!("x{k}");
                r.extend(sub);
            }
            Ok(report(r))
        }
        RiggedCommand::Export { input } => {
            let m = RiggedModel::from_value(read_json(&input)?, tol)?;
            Ok(Output::Data(export_directed_system(&m)?.to_value()))
        }
    }
}
