//! The staged run behind `cstar suite-all`, with a per-stage summary.
//!
//! cargo run --example suite_all -- 42

use cstar_inductive::pipeline::{suite_all, STAGES};
use cstar_inductive::report::fingerprint;
use cstar_inductive::Tolerance;

fn main() -> cstar_inductive::Result<()> {
    let seed = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(1);
    let run = suite_all(seed, 20, Tolerance::default())?;
    for (name, stage) in STAGES.iter().zip(&run.stages) {
        println!(
            "{name:12} {:3} entries, {:3} failures",
            stage.entries.len(),
            stage.failures().len()
        );
    }
    println!(
        "passed: {}  fingerprint {}",
        run.passed(),
        &fingerprint(&run.to_value())[..16]
    );
    Ok(())
}
