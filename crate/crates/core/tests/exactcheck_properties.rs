use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tbdlab::bounds::{bdi_bound, tbdi_bound, LipschitzProfile, TbdiOptions};
use tbdlab::exactcheck::{
    check_instance, exact_tbdi_check, generate_space, EventSpec, ExactModel, FiniteProductSpace, FnSpec,
    GeneratorConfig, SpaceLimits,
};

/// Outcomes with their probabilities and `f` values, by plain nested
/// enumeration (coordinate 0 most significant).
fn enumerate(space: &FiniteProductSpace) -> Vec<(Vec<usize>, f64, f64)> {
    let sizes: Vec<usize> = space.weights.iter().map(Vec::len).collect();
    let mut out = Vec::new();
    let mut x = vec![0usize; sizes.len()];
    let mut flat = 0usize;
    loop {
        let p: f64 = x.iter().enumerate().map(|(k, &v)| space.weights[k][v]).product();
        out.push((x.clone(), p, space.f.eval(&x, flat)));
        flat += 1;
        let mut k = sizes.len();
        loop {
            if k == 0 {
                return out;
            }
            k -= 1;
            x[k] += 1;
            if x[k] < sizes[k] {
                break;
            }
            x[k] = 0;
        }
    }
}

#[test]
fn doob_martingale_matches_reenumeration() {
    let config = GeneratorConfig::default();
    for index in 0..150 {
        let space = generate_space(&config, 99, index);
        let model = ExactModel::build(&space, &SpaceLimits::default()).unwrap();
        let outcomes = enumerate(&space);
        let n = space.coords();
        for k in 0..=n {
            for (prefix, &y) in model.doob[k].iter().enumerate() {
                // E(f | first k coordinates) straight from the definition
                let (mut mass, mut sum) = (0.0, 0.0);
                for (i, (_, p, f)) in outcomes.iter().enumerate() {
                    if i / model.suffix[k] == prefix {
                        mass += p;
                        sum += p * f;
                    }
                }
                if mass > 0.0 {
                    assert!((sum / mass - y).abs() < 1e-10, "instance {index} level {k}");
                }
                if k < n {
                    let w = &space.weights[k];
                    let next: f64 = (0..w.len()).map(|v| w[v] * model.doob[k + 1][prefix * w.len() + v]).sum();
                    assert!((next - y).abs() < 1e-10, "martingale property, instance {index} level {k}");
                }
            }
        }
        let tower: f64 = outcomes.iter().map(|(_, p, f)| p * f).sum();
        assert!((tower - model.mean()).abs() < 1e-10);
        for i in 0..model.outcomes() {
            assert!(model.in_bad_event(i) || model.good[i], "complement of the bad event leaves Gamma");
        }
    }
}

#[test]
fn exact_tails_match_reenumeration() {
    let config = GeneratorConfig::default();
    for index in 0..150 {
        let (space, reports) = check_instance(&config, 7, index).unwrap();
        let outcomes = enumerate(&space);
        for r in reports {
            let tail: f64 = outcomes.iter().filter(|o| o.2 >= r.mean + r.t - 1e-12).map(|o| o.1).sum();
            let reported = r.check("bdi").unwrap().exact;
            assert!((tail - reported).abs() < 1e-9, "instance {index}: {tail} vs {reported}");
        }
    }
}

/// Sum of fair bits: the exact upper tail is a binomial sum.
#[test]
fn coin_sum_against_binomial() {
    for n in 1..=8usize {
        let space = FiniteProductSpace::fair_bits(n, FnSpec::coordinate_sum(n), EventSpec::All, 1.0);
        for t in [0.5, 1.0, n as f64 / 2.0] {
            let r = exact_tbdi_check(&space, t).unwrap();
            let threshold = n as f64 / 2.0 + t;
            let mut tail = 0.0;
            let mut binom = 1.0f64;
            for k in 0..=n {
                if k > 0 {
                    binom = binom * (n - k + 1) as f64 / k as f64;
                }
                if k as f64 >= threshold - 1e-12 {
                    tail += binom / 2f64.powi(n as i32);
                }
            }
            let check = r.check("bdi").unwrap();
            assert!((check.exact - tail).abs() < 1e-12);
            assert!((check.bound - (-2.0 * t * t / n as f64).exp().min(1.0)).abs() < 1e-12);
            assert!(r.holds());
        }
    }
}

/// Six fair bits, a random increasing `f`, three bad outcomes (about 0.05)
/// and `gamma = 0.3`, at `t = 1`.
#[test]
fn random_monotone_six_bits() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for _ in 0..1000 {
        let w: Vec<f64> = (0..6).map(|_| rng.random_range(0.0..1.0)).collect();
        let u: Vec<f64> = (0..36).map(|_| if rng.random_bool(0.3) { rng.random_range(0.0..1.0) } else { 0.0 }).collect();
        let values: Vec<f64> = (0..64u32)
            .map(|flat| {
                let bit = |k: usize| ((flat >> (5 - k)) & 1) as f64;
                let linear: f64 = (0..6).map(|k| w[k] * bit(k)).sum();
                let pairs: f64 = (0..6).flat_map(|j| (j + 1..6).map(move |k| (j, k))).map(|(j, k)| u[j * 6 + k] * bit(j) * bit(k)).sum();
                linear + pairs
            })
            .collect();
        let mut members = vec![true; 64];
        for _ in 0..3 {
            loop {
                let i = rng.random_range(0..64);
                if members[i] {
                    members[i] = false;
                    break;
                }
            }
        }
        let space = FiniteProductSpace::fair_bits(6, FnSpec::Table { values }, EventSpec::Table { members }, 0.3);
        let r = exact_tbdi_check(&space, 1.0).unwrap();
        assert!((r.fail_probability - 3.0 / 64.0).abs() < 1e-12);
        assert!(r.holds(), "{:?}", r.violations());
    }
}

/// The oracle must catch wrong formulas: McDiarmid with the typical
/// constants in place of the worst-case ones, and the factor 4 applied off
/// binary alphabets, both fail somewhere while the correct bounds never do.
#[test]
fn oracle_catches_wrong_bounds() {
    let config = GeneratorConfig::default();
    let (mut typical_in_bdi, mut factor_four, mut correct) = (0, 0, 0);
    for index in 0..400 {
        let (space, reports) = check_instance(&config, 3, index).unwrap();
        let binary = space.is_binary();
        for r in reports {
            let exact_tail = r.check("bdi").unwrap().exact;
            let joint = r.check("tbdi").unwrap().exact;
            if r.c.iter().all(|&c| c > 0.0) {
                let typical = LipschitzProfile::worst_case(r.c.clone()).unwrap();
                if exact_tail > bdi_bound(&typical, r.t).unwrap().value + 1e-9 {
                    typical_in_bdi += 1;
                }
            }
            if !binary && r.d.iter().any(|&d| d > 0.0) {
                let worst = LipschitzProfile::worst_case(r.d.clone()).unwrap();
                let four = (-4.0 * bdi_bound(&worst, r.t).unwrap().exponent).exp();
                if exact_tail > four + 1e-9 {
                    factor_four += 1;
                }
            }
            if r.c.iter().any(|&c| c > 0.0) {
                let profile = LipschitzProfile::new(r.c.clone(), r.d.clone(), space.gamma.clone()).unwrap();
                if joint > tbdi_bound(&profile, r.t, &TbdiOptions::default()).unwrap().value + 1e-9 {
                    correct += 1;
                }
            }
        }
    }
    assert!(typical_in_bdi > 0, "typical constants in the classical bound never caught");
    assert!(factor_four > 0, "factor 4 on large alphabets never caught");
    assert_eq!(correct, 0);
}
