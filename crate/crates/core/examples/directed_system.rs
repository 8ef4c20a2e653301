//! Build a diamond of compressions, check every axiom, and round-trip it
//! through JSON.
//!
//! cargo run --example directed_system

use cstar_inductive::directed::{
    check_r1, check_r2, generate_compression_system, verify_axioms, DirectedSystem, SystemShape,
};
use cstar_inductive::sampling::seeded;
use cstar_inductive::Tolerance;

fn main() -> cstar_inductive::Result<()> {
    let tol = Tolerance::default();
    let sys = generate_compression_system(&SystemShape::diamond(2, 3, 3, 4), 7)?;
    println!("system {} with dims {:?}", sys.id(), sys.dims());
    for ((a, b), e) in sys.edges() {
        println!(
            "  {} -> {}: injectivity margin {:.3}",
            sys.label(a),
            sys.label(b),
            e.injectivity_margin()
        );
    }

    let mut rng = seeded(7);
    print!("{}", verify_axioms(&sys, 20, tol, &mut rng).summary());
    let r1 = check_r1(&sys, 20, tol, &mut rng);
    println!("positivity reflected on every edge: {}", r1.holds);
    for e in check_r2(&sys, tol) {
        println!(
            "  unit of {} in range at {}: {} (residual {:.2e})",
            e.src, e.dst, e.holds, e.residual
        );
    }

    let back = DirectedSystem::from_json(&sys.to_canonical_json())?;
    assert_eq!(back.id(), sys.id());
    println!("JSON round trip preserves the id");
    Ok(())
}
