use geophase_core::discrete::{closed_form_phase, make_cycle_input, phase, simulate, CycleSpec};
use geophase_core::market::{ImpactFunction, MarketParams};
use geophase_core::stochastic::{
    cycle_cash_prediction, gen_cycle_schedule, gen_drift, hold_interval_identity, monte_carlo,
    run_experiment, run_realization, trial_seed, ScheduleParams,
};

fn params(r: f64, q: f64, c: f64, sigma: f64) -> MarketParams {
    MarketParams::new(ImpactFunction::Linear { r }, q, c, sigma, 100.0).unwrap()
}

#[test]
fn drift_moments() {
    let sigma = 0.05;
    let n = 10_000;
    let w = gen_drift(sigma, n, 2024).unwrap();
    let mean = w.iter().sum::<f64>() / n as f64;
    let var = w.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    assert!(mean.abs() <= 4.0 * sigma / (n as f64).sqrt(), "mean {mean}");
    assert!(
        (var.sqrt() - sigma).abs() <= 0.05 * sigma,
        "std {}",
        var.sqrt()
    );
}

/// Cycle count of a schedule against the renewal oracle: ceil(Exp(mean))
/// gaps are geometric on whole ticks (memoryless), so after an accepted
/// cycle the next accepted start is the first arrival after its sell tick.
/// A renewal therefore lasts E[hold] + E[gap] ticks on average.
#[test]
fn schedule_count_matches_renewal_oracle() {
    let (mean_ia, mean_hold, horizon) = (100.0f64, 5.0f64, 100_000usize);
    let sp = ScheduleParams {
        mean_interarrival: mean_ia,
        mean_hold,
        k: 1.0,
        horizon,
        allow_short: false,
    };
    let mean_gap = 1.0 / (1.0 - (-1.0 / mean_ia).exp());
    let mean_hold_ticks = 1.0 / (1.0 - (-1.0 / mean_hold).exp());
    let renewal = horizon as f64 / (mean_gap + mean_hold_ticks);
    let naive = horizon as f64 / (mean_ia + mean_hold);
    for seed in [1u64, 2, 3] {
        let n = gen_cycle_schedule(&sp, seed).unwrap().len() as f64;
        assert!(
            (n - renewal).abs() <= 4.0 * renewal.sqrt(),
            "n={n} renewal={renewal}"
        );
        assert!(
            (n - naive).abs() <= 4.0 * naive.sqrt(),
            "n={n} naive={naive}"
        );
    }
}

#[test]
fn schedule_hold_mean_matches_rounded_exponential() {
    let sp = ScheduleParams {
        mean_interarrival: 30.0,
        mean_hold: 4.0,
        k: 1.0,
        horizon: 400_000,
        allow_short: false,
    };
    let cycles = gen_cycle_schedule(&sp, 77).unwrap();
    let n = cycles.len() as f64;
    let mean = cycles.iter().map(|c| c.duration() as f64).sum::<f64>() / n;
    // accepted cycles are not biased in their own hold
    let expected = 1.0 / (1.0 - (-1.0f64 / 4.0).exp());
    assert!(
        (mean - expected).abs() < 4.0 * 4.0 / n.sqrt(),
        "{mean} vs {expected}"
    );
}

/// Brute force over candidate summation windows: the only window that
/// reproduces every realization is [t_b, t_s - 1].
#[test]
fn hold_window_bounds_by_brute_force() {
    let p = params(0.1, 0.0, 0.0, 0.05);
    let (t_b, t_s) = (10usize, 18usize);
    let cycle = CycleSpec::buy_then_sell(t_b, t_s, 1.0);
    let u = make_cycle_input(&[cycle], 30).unwrap();
    let candidates: Vec<(usize, usize)> = (t_b - 1..=t_b + 1)
        .flat_map(|lo| (t_s - 1..=t_s + 1).map(move |hi| (lo, hi)))
        .collect();
    let mut surviving = candidates.clone();
    for seed in 0..20u64 {
        let w = gen_drift(p.sigma, 30, seed).unwrap();
        let traj = simulate(p.initial_state(), &u, &w, &p).unwrap();
        surviving.retain(|&(lo, hi)| {
            let window: f64 = w[lo..=hi].iter().sum();
            (phase(&traj) - (0.1 + window)).abs() <= 1e-12
        });
    }
    assert_eq!(surviving, vec![(t_b, t_s - 1)]);
}

#[test]
fn hold_identity_over_seeds_and_sizes() {
    for (k, r) in [(1.0, 0.1), (3.0, 0.2)] {
        let p = params(r, 0.0, 0.0, 0.05);
        for seed in 0..100u64 {
            let t_b = 5 + (seed as usize % 7);
            let cycle = CycleSpec::buy_then_sell(t_b, t_b + 1 + (seed as usize % 11), k);
            let u = make_cycle_input(&[cycle], 40).unwrap();
            let w = gen_drift(p.sigma, 40, seed).unwrap();
            let traj = simulate(p.initial_state(), &u, &w, &p).unwrap();
            let residual = hold_interval_identity(&traj, &cycle, &p).unwrap();
            assert!(residual <= 1e-12, "seed {seed}: {residual}");
        }
    }
    let p = params(0.1, 0.0, 0.0, 0.0);
    let cycle = CycleSpec::sell_then_buy(3, 9, 2.0);
    let u = make_cycle_input(&[cycle], 12).unwrap();
    let traj = simulate(p.initial_state(), &u, &[0.0; 12], &p).unwrap();
    assert!(hold_interval_identity(&traj, &cycle, &p).unwrap() <= 1e-12);
}

#[test]
fn drift_and_spread_cash_formula_holds_per_realization() {
    let p = params(0.1, 0.03, 0.01, 0.05);
    let sp = ScheduleParams {
        mean_interarrival: 15.0,
        mean_hold: 3.0,
        k: 2.0,
        horizon: 2_000,
        allow_short: true,
    };
    for seed in 0..20 {
        let real = run_realization(&sp, &p, seed).unwrap();
        let predicted = cycle_cash_prediction(&real.cycles, &real.trajectory.drifts, &p);
        assert!((phase(&real.trajectory) - predicted).abs() < 1e-9);
        assert!(real.trajectory.last().inventory.abs() < 1e-12);
    }
}

#[test]
fn deterministic_run_reduces_to_closed_form() {
    let p = params(0.1, 0.02, 0.005, 0.0);
    // a horizon short enough that at most one cycle fits for this seed
    let sp = ScheduleParams {
        mean_interarrival: 200.0,
        mean_hold: 3.0,
        k: 1.0,
        horizon: 400,
        allow_short: false,
    };
    let mut saw_single = false;
    for seed in 0..50 {
        let s = run_experiment(&sp, &p, seed).unwrap();
        assert!((s.z_end - s.n_cycles as f64 * closed_form_phase(1.0, &p)).abs() < 1e-10);
        saw_single |= s.n_cycles == 1;
    }
    assert!(saw_single);
}

#[test]
fn zero_drift_correlation_with_cycle_count_is_one() {
    let p = params(0.1, 0.0, 0.0, 0.0);
    let sp = ScheduleParams {
        mean_interarrival: 20.0,
        mean_hold: 2.0,
        k: 1.0,
        horizon: 1_000,
        allow_short: false,
    };
    let report = monte_carlo(&sp, &p, 200, 9).unwrap();
    assert!((report.stats.corr_z_ncycles.unwrap() - 1.0).abs() < 1e-12);
}

/// With one fixed cycle and zero-mean drift, the mean phase is unbiased.
#[test]
fn expected_phase_is_drift_independent() {
    let (k, sigma, hold, trials) = (2.0, 0.05, 9usize, 2_000u64);
    let p = params(0.1, 0.02, 0.01, sigma);
    let cycle = CycleSpec::buy_then_sell(4, 4 + hold, k);
    let u = make_cycle_input(&[cycle], 20).unwrap();
    let mean: f64 = (0..trials)
        .map(|i| {
            let w = gen_drift(sigma, 20, trial_seed(5, i)).unwrap();
            phase(&simulate(p.initial_state(), &u, &w, &p).unwrap())
        })
        .sum::<f64>()
        / trials as f64;
    let band = 3.0 * k * sigma * (hold as f64).sqrt() / (trials as f64).sqrt();
    assert!((mean - closed_form_phase(k, &p)).abs() <= band, "{mean}");
}

#[test]
fn monte_carlo_is_reproducible() {
    let p = params(0.1, 0.01, 0.0, 0.02);
    let sp = ScheduleParams {
        mean_interarrival: 25.0,
        mean_hold: 2.0,
        k: 1.0,
        horizon: 800,
        allow_short: true,
    };
    let a = monte_carlo(&sp, &p, 50, 123).unwrap();
    let b = monte_carlo(&sp, &p, 50, 123).unwrap();
    assert_eq!(a, b);
    assert!(a.records.iter().all(|r| r.summary.y_end == 0.0));
    assert!(a
        .records
        .iter()
        .all(|r| r.summary.n_cycles == 0 || r.summary.mean_duration >= 1.0));
}

/// Short cycles: every bucket of trials (grouped by cycle count) is profitable
/// on average.
#[test]
fn short_cycles_profit_in_every_bucket() {
    let p = params(0.1, 0.02, 0.01, 0.01);
    let sp = ScheduleParams {
        mean_interarrival: 50.0,
        mean_hold: 1.0,
        k: 1.0,
        horizon: 5_000,
        allow_short: false,
    };
    let report = monte_carlo(&sp, &p, 1_000, 31).unwrap();
    let mut by_count = report.records.clone();
    by_count.sort_by_key(|r| r.summary.n_cycles);
    for bucket in by_count.chunks(100) {
        let mean = bucket.iter().map(|r| r.summary.z_end).sum::<f64>() / bucket.len() as f64;
        assert!(mean > 0.0);
    }
}
