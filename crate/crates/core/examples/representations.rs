//! Representations on contractive Hilbert systems: verification,
//! faithfulness, and the bound `max ‖π_α(x_α)‖ ≤ ‖x‖_b`.
//!
//! cargo run --example representations

use std::sync::Arc;

use cstar_inductive::directed::{generate_compression_system, DirectedSystem, SystemShape};
use cstar_inductive::elements::sample_bounded;
use cstar_inductive::representations::{
    corner_killing_representation, direct_sum_embed, faithfulness, identity_representation, rep_bound_suite,
    unitary_conjugation_representation, verify_representation,
};
use cstar_inductive::sampling::seeded;
use cstar_inductive::Tolerance;

fn main() -> cstar_inductive::Result<()> {
    let tol = Tolerance::default();
    let sys = Arc::new(generate_compression_system(&SystemShape::vee(3, 3, 4), 2)?);
    let mut rng = seeded(2);

    let reps = vec![
        identity_representation(&sys)?,
        unitary_conjugation_representation(&sys, 2)?,
    ];
    for rep in &reps {
        print!("{}", verify_representation(rep, 10, tol, &mut rng).summary());
        let v = faithfulness(rep, 10, tol, &mut rng);
        println!("faithful: {} (certified: {})", v.faithful, v.certified);
    }

    let x = sample_bounded(&sys, false, tol, &mut rng).expect("vee ranges intersect");
    print!("{}", rep_bound_suite(&x, &reps, tol).summary());
    let d = direct_sum_embed(&x, tol)?;
    println!("direct sum norm {:.9} vs bounded norm {:.9}", d.norm, d.bnorm);

    let chain = Arc::new(DirectedSystem::identity_chain(3, 3));
    let corner = corner_killing_representation(&chain)?;
    let v = faithfulness(&corner, 20, tol, &mut rng);
    let (index, witness) = v.witness.expect("corner killing annihilates a projection");
    println!("corner-killing is not faithful: nonzero element at {index} maps to zero\n{witness:.3}");
    Ok(())
}
