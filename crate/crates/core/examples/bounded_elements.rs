//! Coherent elements: push forward, extend down, bounded norm, and the limit
//! of a Cauchy sequence.
//!
//! cargo run --example bounded_elements

use std::sync::Arc;

use cstar_inductive::directed::{generate_compression_system, SystemShape};
use cstar_inductive::elements::{cauchy_limit, elements_suite, BoundedElement, CoherentElement};
use cstar_inductive::sampling::{random_hermitian, seeded};
use cstar_inductive::Tolerance;

fn main() -> cstar_inductive::Result<()> {
    let tol = Tolerance::default();
    let sys = Arc::new(generate_compression_system(&SystemShape::chain(&[2, 3, 4]), 3)?);
    let mut rng = seeded(3);
    let (bottom, top) = (sys.index("i0")?, sys.top());

    let x = CoherentElement::push_forward(&sys, bottom, random_hermitian(2, &mut rng))?;
    let b = x
        .bounded_norm(tol)
        .expect("pushed from the bottom, so defined everywhere");
    println!("pushed from i0: bounded norm {:.6}", b.bnorm());

    let y = CoherentElement::push_forward(&sys, top, random_hermitian(4, &mut rng))?;
    println!(
        "random top matrix extends down to i0: {} (bounded: {})",
        y.with_extension(bottom, tol).is_some(),
        y.bounded_norm(tol).is_some()
    );

    let mut partial = CoherentElement::zero(&sys);
    let mut seq = Vec::new();
    for k in 0..80 {
        partial = partial.add(&x.scale_real(0.5f64.powi(k)))?;
        seq.push(BoundedElement::from_full(partial.clone())?);
    }
    let limit = cauchy_limit(&seq, 1e-9)?;
    let target = BoundedElement::from_full(x.scale_real(2.0))?;
    println!(
        "geometric series limit differs from 2x by {:.2e}",
        limit.distance(&target)?
    );

    print!("{}", elements_suite(&sys, 20, tol, &mut rng)?.summary());
    Ok(())
}
