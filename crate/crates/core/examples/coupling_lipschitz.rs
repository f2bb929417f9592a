//! Truncated against full runs on shared orders, and the effect of one
//! perturbed edge.
//!
//! Usage: cargo run --release --example coupling_lipschitz [n]

use tbdlab::graphs::PatternGraph;
use tbdlab::harness::{coupling_experiment, lipschitz_sweep, CouplingConfig, LipschitzConfig};
use tbdlab::processes::{edge_order, perturb_and_rerun, ProcessConfig, Perturbation, Variant};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let n: usize = std::env::args().nth(1).map(|s| s.parse()).transpose()?.unwrap_or(60);
    let k3 = PatternGraph::named("K3")?;
    let total = n * (n - 1) / 2;

    for m in [total / 8, total / 4, total] {
        let r = coupling_experiment(&CouplingConfig { patterns: vec![k3.clone()], n, trials: 300, seed: 5, m: Some(m) })?;
        println!("m = {m:>5}: truncated run equals full run in {:.3} of pairs", r.agreement.point);
    }

    let cfg = ProcessConfig::new(n, vec![k3.clone()], Variant::ReverseAddition, 5).truncated(total / 4);
    let order = edge_order(n, 5, 0);
    let (base, moved) = perturb_and_rerun(&cfg, &order, Perturbation::Swap(0, total / 8))?;
    println!("\nswapping positions 0 and {}: {} -> {} edges", total / 8, base.final_edges, moved.final_edges);

    let r = lipschitz_sweep(&LipschitzConfig { pattern: k3, n, m: Some(total / 4), sweeps: 500, seed: 5 })?;
    println!(
        "{} perturbations ({} swaps, {} replacements): max change {}, limit {:.0}, violations {}",
        r.sweeps, r.swaps, r.replacements, r.max_change, r.limit, r.violations
    );
    Ok(())
}
