//! Pre-units and the order bound `p(x)`, compared with the bounded norm.
//!
//! cargo run --example order_bounds

use std::sync::Arc;

use cstar_inductive::directed::{generate_compression_system, SystemShape};
use cstar_inductive::elements::sample_bounded;
use cstar_inductive::order::{bounded_iff_order_bounded_suite, order_bound, pre_unit_candidates};
use cstar_inductive::sampling::seeded;
use cstar_inductive::Tolerance;

fn main() -> cstar_inductive::Result<()> {
    let tol = Tolerance::default();
    let sys = Arc::new(generate_compression_system(&SystemShape::chain(&[2, 3, 5]), 11)?);
    let mut rng = seeded(11);

    let cands = pre_unit_candidates(&sys, tol);
    for u in &cands {
        println!("pre-unit candidate from {}: {:?}", sys.label(u.origin()), u.reading());
    }
    let u = cands
        .iter()
        .find(|u| u.is_strict())
        .expect("bottom pre-unit is defined everywhere");

    for _ in 0..3 {
        let x = sample_bounded(&sys, true, tol, &mut rng).expect("chain has full-domain elements");
        let b = x.bounded_norm(tol).unwrap().bnorm();
        let ob = order_bound(&x, u, tol)?.expect("bounded elements are order bounded");
        println!(
            "p(x) = {:.9}  ‖x‖_b = {:.9}  attained at {}",
            ob.re,
            b,
            sys.label(ob.index)
        );
    }

    print!(
        "{}",
        bounded_iff_order_bounded_suite(&sys, 20, tol, &mut rng)?.summary()
    );
    Ok(())
}
