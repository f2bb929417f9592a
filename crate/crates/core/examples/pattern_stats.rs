//! Densities, balancedness and copy counts of the built-in patterns.
//!
//! Usage: cargo run --example pattern_stats

use tbdlab::graphs::{count_copies_total, pattern_stats, HostGraph, PatternGraph};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let petersen = HostGraph::petersen();
    let k7 = HostGraph::complete(7);
    println!("{:<11} {:>2} {:>2} {:>4} {:>6} {:>6} {:>9} {:>6} {:>9} {:>5}", "pattern", "v", "e", "aut", "d2", "m2", "balanced", "extbal", "Petersen", "K7");
    for name in PatternGraph::NAMES {
        let h = PatternGraph::named(name)?;
        let s = pattern_stats(&h)?;
        println!(
            "{:<11} {:>2} {:>2} {:>4} {:>6} {:>6} {:>9} {:>6} {:>9} {:>5}",
            name,
            s.v,
            s.e,
            h.aut_count(),
            s.d2.to_string(),
            s.m2.to_string(),
            s.two_balanced,
            s.extbal,
            count_copies_total(&petersen, &h),
            count_copies_total(&k7, &h),
        );
    }

    let custom: PatternGraph = "4\n0 1\n1 2\n2 0\n2 3\n".parse()?;
    let s = pattern_stats(&custom)?;
    println!("\nparsed paw: d2 = {}, m2 = {}, 2-balanced {}", s.d2, s.m2, s.two_balanced);
    Ok(())
}
