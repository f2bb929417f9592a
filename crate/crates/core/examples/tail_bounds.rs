//! Classical versus typical bounded differences on one profile.
//!
//! Usage: cargo run --example tail_bounds [t]

use tbdlab::bounds::{
    bdi_bound, janson_zero_bound, tbdi_bernoulli_bound, tbdi_bound, truncation_bound, BernoulliOptions,
    LipschitzProfile, TbdiOptions,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let t: f64 = std::env::args().nth(1).map(|s| s.parse()).transpose()?.unwrap_or(40.0);

    // 1000 coordinates that usually move f by 1 but can move it by 50
    let n = 1000;
    let profile = LipschitzProfile::uniform(n, 1.0, 50.0, 1.0 / 50.0)?.with_p(vec![0.05; n])?;
    let worst = LipschitzProfile::worst_case(vec![50.0; n])?;

    println!("t = {t}");
    println!("{:<26} {:>12} {:>12}", "bound", "exponent", "value");
    let show = |name: &str, exponent: f64, value: f64| println!("{name:<26} {exponent:>12.4} {value:>12.4e}");

    let b = bdi_bound(&worst, t)?;
    show("bdi, c = d = 50", b.exponent, b.value);
    let b = tbdi_bound(&profile, t, &TbdiOptions { gamma_fail: Some(1e-6), ..Default::default() })?;
    show("tbdi", b.exponent, b.value);
    println!("{:<26} {:>12} {:>12.4e}", "  + bad-event budget", "", b.bad_budget.unwrap_or(0.0));
    let b = tbdi_bound(&profile, t, &TbdiOptions { two_valued: true, ..Default::default() })?;
    show("tbdi, two-valued", b.exponent, b.value);
    for (name, bennett) in [("Bernstein form", false), ("Bennett form", true)] {
        let b = tbdi_bernoulli_bound(&profile, t, &BernoulliOptions { bennett, ..Default::default() })?;
        show(name, b.exponent, b.value);
    }

    let tb = truncation_bound(&profile, t, 1000.0, 1e-6, false)?;
    println!("truncation: exponent {:.4}, threshold shift {:.4}", tb.bound.exponent, tb.shift);
    println!("Janson, mu = 4, Delta = 2: P(X = 0) <= {:.4}", janson_zero_bound(4.0, 2.0)?);
    Ok(())
}
