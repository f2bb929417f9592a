//! Growth exponent of the reverse H-free process, with CSV and plot data.
//!
//! Usage: cargo run --release --example exponent_fit [pattern] [trials] [out_dir]

use std::path::PathBuf;

use tbdlab::graphs::PatternGraph;
use tbdlab::harness::{plotdata, reverse_process_experiment, to_json, write_atomic, write_csv, Envelope, Report, ReverseConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let name = args.next().unwrap_or_else(|| "K3".into());
    let trials: u64 = args.next().map(|s| s.parse()).transpose()?.unwrap_or(100);
    let out_dir = args.next().map(PathBuf::from);

    let cfg = ReverseConfig {
        patterns: vec![PatternGraph::named(&name)?],
        n_grid: vec![32, 64, 128, 256],
        trials,
        seed: 11,
        untruncated: false,
    };
    let r = reverse_process_experiment(&cfg)?;
    for row in &r.rows {
        println!("n = {:>4}: mean {:>8.1}, std/sqrt(mean) {:.3}", row.n, row.mean, row.std_over_sqrt_mean);
    }
    if let Some(fit) = &r.fit {
        println!("slope {:.4}, predicted {:?}, r2 {:.5}", fit.slope, r.predicted_slope, fit.r2);
    }

    if let Some(dir) = out_dir {
        std::fs::create_dir_all(&dir)?;
        write_atomic(&dir.join("reverse.json"), to_json(&Envelope::new(&cfg, &r))?.as_bytes())?;
        let mut csv = Vec::new();
        write_csv(&r.csv_rows(), &mut csv)?;
        write_atomic(&dir.join("reverse.csv"), &csv)?;
        write_atomic(&dir.join("reverse.dat"), plotdata(&r.plot_series()).as_bytes())?;
        println!("wrote reverse.json, reverse.csv, reverse.dat to {}", dir.display());
    }
    Ok(())
}
