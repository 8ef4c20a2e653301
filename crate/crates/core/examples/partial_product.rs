//! Weighted partial multiplication: always defined with identity weights on
//! unitary chains, often undefined on strict compression chains.
//!
//! cargo run --example partial_product

use std::sync::Arc;

use cstar_inductive::directed::{generate_compression_system, generate_unitary_system, SystemShape};
use cstar_inductive::mult::{banach_inequality_suite, find_unit, multiply, random_full_element, WeightFamily};
use cstar_inductive::order::find_pre_unit;
use cstar_inductive::sampling::seeded;
use cstar_inductive::Tolerance;

fn main() -> cstar_inductive::Result<()> {
    let tol = Tolerance::default();
    let mut rng = seeded(5);

    let unitary = Arc::new(generate_unitary_system(&SystemShape::chain(&[3, 3, 3]), 5)?);
    let w = WeightFamily::identity(&unitary, tol)?;
    println!("identity weights admit a unit: {}", find_unit(&w, tol).is_some());
    print!(
        "{}",
        banach_inequality_suite(&unitary, &w, 50, tol, &mut rng)?.summary()
    );

    let strict = Arc::new(generate_compression_system(&SystemShape::chain(&[2, 3, 4]), 5)?);
    let u = find_pre_unit(&strict, tol).expect("compression chains have a pre-unit");
    let w = WeightFamily::new(u.element().clone(), tol)?;
    println!("pre-unit weights admit a unit: {}", find_unit(&w, tol).is_some());
    for _ in 0..5 {
        let x = random_full_element(&strict, tol, &mut rng).unwrap();
        let y = random_full_element(&strict, tol, &mut rng).unwrap();
        let pp = multiply(&x, &y, &w, tol)?;
        println!(
            "x·y defined: {:5}  lowest defining index {}  worst residual {:.2e}",
            pp.is_defined(),
            strict.label(pp.witness),
            pp.worst_residual()
        );
    }
    Ok(())
}
