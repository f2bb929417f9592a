//! Fuzz the tail bounds against exact enumerated probabilities.
//!
//! Usage: cargo run --release --example exact_oracle [instances] [seed]

use tbdlab::exactcheck::{
    doob_trace, exact_tbdi_check, run_martingale_suite, run_product_space_suite, EventSpec,
    FiniteProductSpace, FnSpec, GeneratorConfig,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let count: u64 = args.next().map(|s| s.parse()).transpose()?.unwrap_or(1000);
    let seed: u64 = args.next().map(|s| s.parse()).transpose()?.unwrap_or(2024);

    // One hand-built space first: majority of three fair coins.
    let space = FiniteProductSpace::fair_bits(3, FnSpec::majority(3), EventSpec::All, 1.0);
    let trace = doob_trace(&space, &[1, 1, 0])?;
    println!("majority Doob path for (1,1,0): {:?}", trace.y);
    let report = exact_tbdi_check(&space, 0.25)?;
    for check in &report.checks {
        println!("  {:<22} exact {:.6}  bound {:.6}", check.name, check.exact, check.bound);
    }

    let config = GeneratorConfig::default();
    let start = std::time::Instant::now();
    let summary = run_product_space_suite(&config, seed, count)?;
    println!(
        "\n{} instances, {} bound checks, {} violations ({:.1?})",
        summary.instances,
        summary.checks,
        summary.counterexamples.len(),
        start.elapsed()
    );
    for (name, n) in &summary.coverage {
        println!("  {name:<22} {n}");
    }
    if let Some(cex) = summary.counterexamples.first() {
        println!("first counterexample:\n{}", serde_json::to_string_pretty(cex)?);
    }

    let lemmas = run_martingale_suite(&config, seed, count.min(200))?;
    println!(
        "\nmartingale lemmas: {} instances, {} checks, {} failures",
        lemmas.instances,
        lemmas.checks,
        lemmas.failures.len()
    );
    Ok(())
}
