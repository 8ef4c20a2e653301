//! Coherent functionals: positivity, kernel reflection, and the bounds
//! `|ω(a*·x·a)| ≤ p(x) ω(a*·u·a)` with an extremal pair attaining `p(x)`.
//!
//! cargo run --example functional_bounds

use std::sync::Arc;

use cstar_inductive::directed::{generate_compression_system, SystemShape};
use cstar_inductive::elements::{sample_bounded, CoherentElement};
use cstar_inductive::functionals::{check_r3, extremal_pair, functional_bound_suite, p_upper_bound, Functional};
use cstar_inductive::mult::WeightFamily;
use cstar_inductive::order::find_pre_unit;
use cstar_inductive::sampling::{random_psd, seeded, unit_matrix};
use cstar_inductive::Tolerance;

fn main() -> cstar_inductive::Result<()> {
    let tol = Tolerance::default();
    let sys = Arc::new(generate_compression_system(&SystemShape::chain(&[2, 3, 4]), 9)?);
    let mut rng = seeded(9);
    let top = sys.top();
    let n = sys.dim(top);

    let trace = Functional::trace_state(&sys);
    println!(
        "trace state reflects kernels: {}",
        check_r3(&trace, 20, tol, &mut rng).holds
    );

    let u = find_pre_unit(&sys, tol).unwrap();
    let w = WeightFamily::new(u.element().clone(), tol)?;
    let x = sample_bounded(&sys, true, tol, &mut rng).unwrap();
    let mut fs = vec![trace];
    let mut ms = Vec::new();
    for _ in 0..10 {
        fs.push(Functional::from_top_density(&sys, random_psd(n, &mut rng), tol)?);
    }
    for _ in 0..4 {
        ms.push(CoherentElement::push_forward(&sys, top, unit_matrix(n, &mut rng))?);
    }
    let before = p_upper_bound(&x, &u, &w, &fs, &ms, tol)?;
    println!("random pairs: sup = {:.6}, p(x) = {:.6}", before.bound, before.p);

    let (omega, a) = extremal_pair(&x, &u, &w, tol).expect("extremal vector lies in range");
    fs.push(omega);
    ms.push(a);
    let after = p_upper_bound(&x, &u, &w, &fs, &ms, tol)?;
    println!("with extremal pair: sup = {:.9}, gap {:.2e}", after.bound, after.gap);

    print!("{}", functional_bound_suite(&x, &u, &w, &fs, &ms, tol)?.summary());
    Ok(())
}
