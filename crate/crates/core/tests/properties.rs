mod common;

use rand::Rng;
use rayon::prelude::*;

use common::{reference_config, REFERENCE_P_SAFE};
use zonecert::certify::{
    classic_interval, run_brute_force, run_proxy_process, uncertainty_interval, CltAccumulator, CltSummary,
    DecisionThresholds, ProcessConfig,
};
use zonecert::mgp::{fit_hyperparameters, local_subset, omega_from_zone, posterior, LocalityConfig, TrainingSet};
use zonecert::mvncdf::{safe_probability, RectangleProbQuery};
use zonecert::netsim::classify;
use zonecert::rng::{stream, Domain, SeedSpace};

#[test]
fn proxy_budget_accounting() {
    let cfg = reference_config();
    let ctx = cfg.build_context().unwrap();
    let out = run_proxy_process(&ctx, &ProcessConfig { budget: 700, ..cfg.process_config() }).unwrap();
    assert_eq!(out.simulations, 700);
    assert!(out.iterations >= 700);
    let mut prev = 0;
    for row in &out.log.rows {
        let step = row.n_sims - prev;
        assert_eq!(step, u64::from(row.simulated), "only simulated rows consume budget");
        prev = row.n_sims;
    }
    assert_eq!(prev, 700);
    assert!(out.log.rows.last().unwrap().simulated, "stops on the record that spends the budget");
    for r in out.records.iter().filter(|r| !r.simulated) {
        assert!(r.q >= 0.99 || r.q <= 0.01);
    }
}

#[test]
fn never_trusting_proxy_reduces_to_classic_interval() {
    let cfg = reference_config();
    let ctx = cfg.build_context().unwrap();
    let pc = ProcessConfig { budget: 450, thresholds: DecisionThresholds::never(), ..cfg.process_config() };
    let out = run_proxy_process(&ctx, &pc).unwrap();
    assert_eq!(out.iterations, out.simulations);
    assert!(out.records.iter().all(|r| r.simulated && r.q == 1.0));
    let w: Vec<bool> = out.records.iter().map(|r| r.w).collect();
    let classic = classic_interval(&w, pc.alpha).unwrap();
    assert!((classic.p_min - out.interval.p_min).abs() < 1e-12);
    assert!((classic.p_max - out.interval.p_max).abs() < 1e-12);
}

#[test]
fn brute_force_agrees_with_frozen_reference() {
    let mut cfg = reference_config();
    cfg.seed = 4242;
    let ctx = cfg.build_context().unwrap();
    let out = run_brute_force(&ctx, &ProcessConfig { budget: 100_000, ..cfg.process_config() }).unwrap();
    let p = out.records.iter().filter(|r| r.w).count() as f64 / out.records.len() as f64;
    let se = (REFERENCE_P_SAFE * (1.0 - REFERENCE_P_SAFE) / 100_000.0).sqrt();
    assert!((p - REFERENCE_P_SAFE).abs() < 3.0 * se, "p={p}");
}

#[test]
fn brute_force_p_safe_stable_across_seeds() {
    let base = reference_config();
    let estimate = |seed| {
        let mut cfg = base.clone();
        cfg.seed = seed;
        let ctx = cfg.build_context().unwrap();
        let out = run_brute_force(&ctx, &ProcessConfig { budget: 50_000, ..cfg.process_config() }).unwrap();
        out.records.iter().filter(|r| r.w).count() as f64 / 50_000.0
    };
    let (a, b) = (estimate(1), estimate(2));
    let sd = (2.0 * a * (1.0 - a) / 50_000.0).sqrt();
    assert!((a - b).abs() < 3.0 * sd, "{a} vs {b}");
}

/// `w` equals the true outcome with probability `q`.
fn observe<R: Rng>(rng: &mut R, p: f64, q: f64) -> bool {
    let z = rng.random::<f64>() < p;
    if rng.random::<f64>() < q {
        z
    } else {
        !z
    }
}

#[test]
fn corrected_outcome_is_unbiased() {
    let p = 0.8;
    let n = 400_000u64;
    let values: Vec<f64> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream(31, Domain::Synthetic, i);
            let q = rng.random_range(0.9..=1.0);
            let w = f64::from(u8::from(observe(&mut rng, p, q)));
            (w - (1.0 - q)) / (2.0 * q - 1.0)
        })
        .collect();
    let mean = values.iter().sum::<f64>() / n as f64;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    let se = (var / n as f64).sqrt();
    assert!((mean - p).abs() < 3.0 * se, "mean {mean}, se {se}");
}

#[test]
fn classic_interval_coverage() {
    let (p, m, reps) = (0.9, 5000, 1000u64);
    let hits: u64 = (0..reps)
        .into_par_iter()
        .map(|r| {
            let mut rng = stream(32, Domain::Synthetic, r);
            let w: Vec<bool> = (0..m).map(|_| rng.random::<f64>() < p).collect();
            u64::from(classic_interval(&w, 0.05).unwrap().contains(p))
        })
        .sum();
    let rate = hits as f64 / reps as f64;
    assert!((0.93..=0.97).contains(&rate), "{rate}");
}

#[test]
fn interval_length_grows_with_uncertainty_variance() {
    let mut rng = stream(33, Domain::Synthetic, 0);
    for _ in 0..200 {
        let z_bar = rng.random_range(0.05..0.95);
        let v = rng.random_range(5.0..1e5);
        let mut last = 0.0;
        for k in 0..20 {
            let s = CltSummary { z_bar, v, sigma_sq: k as f64 * 0.01, m: v as u64 };
            let len = uncertainty_interval(&s, 0.05).unwrap().length();
            assert!(len >= last - 1e-15);
            last = len;
        }
    }
}

#[test]
fn accumulator_matches_effective_size_bound() {
    let mut rng = stream(34, Domain::Synthetic, 0);
    let mut acc = CltAccumulator::default();
    for _ in 0..1000 {
        let q = rng.random_range(0.6..=1.0);
        acc.push(rng.random(), q);
    }
    let s = acc.summary().unwrap();
    assert!(s.v <= s.m as f64 + 1e-9);
}

#[test]
fn posterior_variance_shrinks_with_data_and_tracks_outcomes() {
    let cfg = reference_config();
    let ctx = cfg.build_context().unwrap();
    let omega = omega_from_zone(ctx.simulator.zone());
    let seeds = SeedSpace::new(77);
    let sampler = ctx.sampler.with_seeds(seeds);
    let params = cfg.process_config().init_params;
    // Nested conditioning sets, so the posterior variance cannot grow.
    let everything = LocalityConfig { max_neighbors: usize::MAX, max_distance: f64::INFINITY };

    let mut train = TrainingSet::new();
    let probe = sampler.sample(1_000_000).unwrap();
    let mut last = f64::INFINITY;
    for chunk in 0..5 {
        for id in chunk * 100..(chunk + 1) * 100 {
            let x = sampler.sample(id).unwrap();
            let y = ctx.simulator.simulate(&x, seeds).unwrap();
            train.push(x, y.flows).unwrap();
        }
        let s = posterior(&local_subset(&train, &probe, &everything), &probe, &params, &omega).unwrap().sigma_star;
        assert!(s <= last + 1e-12, "sigma* rose from {last} to {s}");
        last = s;
    }

    // Confident predictions from fitted parameters mostly match the simulator.
    let pc = cfg.process_config();
    let params = fit_hyperparameters(&train, &params, &omega, &pc.fit, &mut stream(1, Domain::Fit, 0)).unwrap();
    let loc = cfg.process_config().locality;
    let (mut agree, mut kept) = (0, 0);
    for id in 0..400u64 {
        let x = sampler.sample(2_000_000 + id).unwrap();
        let post = posterior(&local_subset(&train, &x, &loc), &x, &params, &omega).unwrap();
        let p = safe_probability(&RectangleProbQuery::from_posterior(&post), 1e-4, &mut stream(1, Domain::Cdf, id))
            .unwrap()
            .value;
        if p >= 0.99 || p <= 0.01 {
            kept += 1;
            agree += usize::from((p >= 0.99) == classify(&ctx.simulator.simulate(&x, seeds).unwrap().flows));
        }
    }
    assert!(kept > 50, "too few confident predictions: {kept}");
    assert!(agree as f64 >= 0.9 * kept as f64, "{agree}/{kept}");
}
