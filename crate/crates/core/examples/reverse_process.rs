//! One run of every process variant on the same seed, and the run-length
//! encoded accepted bits.
//!
//! Usage: cargo run --release --example reverse_process [n] [seed]

use tbdlab::graphs::{count_copies_total, PatternGraph};
use tbdlab::processes::{default_m_cap, psi, rle, run, ProcessConfig, Variant};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let n: usize = args.next().map(|s| s.parse()).transpose()?.unwrap_or(40);
    let seed: u64 = args.next().map(|s| s.parse()).transpose()?.unwrap_or(7);
    let k3 = PatternGraph::named("K3")?;

    println!("n = {n}, H = K3, truncation at m = {}, Psi = {:.1}", default_m_cap(n, &[k3.clone()])?, psi(n, &k3));
    for variant in [Variant::ReverseAddition, Variant::ReverseRemoval, Variant::BirthTime, Variant::ForwardHfree, Variant::HRemoval] {
        let out = run(&ProcessConfig::new(n, vec![k3.clone()], variant, seed))?;
        println!(
            "{:<16} {:>5} edges, {:>5} steps, triangles left {}",
            format!("{variant:?}"),
            out.final_edges,
            out.steps_traversed,
            count_copies_total(&out.final_graph, &k3)
        );
    }

    // a family: no triangle and no 4-cycle may be closed
    let family = vec![k3, PatternGraph::named("C4")?];
    let out = run(&ProcessConfig::new(n, family, Variant::ReverseAddition, seed))?;
    let bytes = rle::to_bytes(&out.accepted);
    println!(
        "\n{{K3, C4}}: {} edges kept of {} traversed; accepted bits take {} bytes run-length encoded",
        out.final_edges,
        out.accepted.len(),
        bytes.len()
    );
    println!("{}", serde_json::to_string_pretty(&out.record())?);
    Ok(())
}
