//! A scale of weighted inner products on `C^n`: representatives, the
//! bounded norm at the zero weight, and the export to a directed system.
//!
//! cargo run --example rigged_scale

use std::sync::Arc;

use cstar_inductive::directed::verify_axioms;
use cstar_inductive::numerics::operator_norm;
use cstar_inductive::rigged::{
    cross_model_check, equivalence_suite, export_directed_system, representative, RiggedModel,
};
use cstar_inductive::sampling::{random_hermitian, seeded};
use cstar_inductive::Tolerance;

fn main() -> cstar_inductive::Result<()> {
    let tol = Tolerance::default();
    let model = RiggedModel::random(3, 5, 4, tol)?;
    let mut rng = seeded(4);
    let x = random_hermitian(3, &mut rng);

    println!("‖X‖ = {:.9}", operator_norm(&x));
    for k in 0..model.len() {
        println!(
            "  {}: representative norm {:.9}",
            model.label(k),
            representative(&model, &x, k)?.norm
        );
    }
    print!("{}", equivalence_suite(&model, &x, 10, tol, &mut rng)?.summary());

    let chain = RiggedModel::chain(3, 4, 4, tol)?;
    let sys = Arc::new(export_directed_system(&chain)?);
    println!("exported system {} with {} indices", sys.id(), sys.dims().len());
    print!("{}", verify_axioms(&sys, 10, tol, &mut rng).summary());
    print!("{}", cross_model_check(&chain, &x, tol)?.summary());
    Ok(())
}
