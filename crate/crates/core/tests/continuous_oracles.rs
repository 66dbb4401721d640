use std::f64::consts::PI;

use geophase_core::continuous::{
    delayed_spread_phase, integrate, spread_cycle_loss, steady_state_window, stokes_check,
    ContinuousModel, InputSignal,
};

fn sine(amplitude: f64, period: f64) -> InputSignal {
    InputSignal::Sinusoid { amplitude, period }
}

/// Steady-state phase per period of the delayed model driven by
/// `A sin(2 pi t / P)`: `-r ∫ Y(t - tau) u(t) dt` with
/// `Y(t) = (A P / 2 pi)(1 - cos(2 pi t / P))`, i.e. `r A^2 P^2 sin(2 pi tau / P) / (4 pi)`.
fn delayed_phase_per_cycle(r: f64, a: f64, p: f64, tau: f64) -> f64 {
    r * a * a * p * p * (2.0 * PI * tau / p).sin() / (4.0 * PI)
}

/// Spread cost per period of the same input: `(q/2) ∫ |u| dt = q A P / pi`.
fn spread_cost_per_cycle(q: f64, a: f64, p: f64) -> f64 {
    q * a * p / PI
}

#[test]
fn plain_model_has_no_phase_for_any_sinusoid() {
    for (a, p) in [(1.0, 1.0), (0.3, 2.0), (5.0, 0.5)] {
        let traj = integrate(
            &ContinuousModel::plain(0.1, 100.0),
            &sine(a, p),
            1e-3,
            3.0 * p,
        )
        .unwrap();
        assert!(traj.phase().abs() <= 1e-8, "A={a} P={p}: {}", traj.phase());
    }
}

#[test]
fn plain_model_converges_at_fourth_order() {
    // z(T) = -s0 Y - r Y^2 / 2 off a period boundary
    let (r, s0, t_end) = (0.5, 1.0, 0.4);
    let y = (1.0 / (2.0 * PI)) * (1.0 - (2.0 * PI * t_end).cos());
    let exact = -s0 * y - 0.5 * r * y * y;
    let errors: Vec<f64> = [0.04, 0.02, 0.01, 0.005]
        .iter()
        .map(|&dt| {
            let traj =
                integrate(&ContinuousModel::plain(r, s0), &sine(1.0, 1.0), dt, t_end).unwrap();
            (traj.samples.last().unwrap().z - exact).abs()
        })
        .collect();
    for pair in errors.windows(2) {
        assert!(pair[0] / pair[1] >= 8.0, "{errors:?}");
    }
}

#[test]
fn delayed_phase_matches_analytic_and_stokes() {
    let (r, tau) = (0.1, 0.25);
    let model = ContinuousModel::delayed(r, tau, 100.0);
    let window = steady_state_window(&model, &sine(1.0, 1.0), 1e-3, 1).unwrap();
    let report = stokes_check(&window).unwrap();
    let oracle = delayed_phase_per_cycle(r, 1.0, 1.0, tau);
    assert!(oracle > 0.0);
    assert!(
        (report.phase - oracle).abs() <= 1e-6 * oracle,
        "{report:?} vs {oracle}"
    );
    assert!(report.residual <= 1e-6 * report.phase.abs());
    // polygon area converges at second order only
    assert!((report.area - oracle).abs() <= 1e-4 * oracle);
}

#[test]
fn delayed_phase_accumulates_per_cycle() {
    let model = ContinuousModel::delayed(0.2, 0.1, 50.0);
    let input = sine(0.7, 0.5);
    let one = steady_state_window(&model, &input, 5e-4, 1)
        .unwrap()
        .phase();
    for m in [2usize, 3, 5] {
        let many = steady_state_window(&model, &input, 5e-4, m).unwrap();
        assert!((many.phase() - m as f64 * one).abs() <= 1e-6 * (m as f64 * one).abs());
        let report = stokes_check(&many).unwrap();
        assert!(report.residual <= 1e-6 * report.phase.abs());
    }
}

#[test]
fn spread_cycle_costs_q_times_k() {
    for (q, k) in [(0.2, 1.0), (0.2, 3.0), (0.05, 2.0)] {
        let model = ContinuousModel::with_spread(0.1, q, 100.0);
        let input = InputSignal::TrapezoidCycle {
            k,
            ramp: 0.1,
            hold: 1.0,
        };
        let loss = spread_cycle_loss(&model, &input, 1e-4).unwrap();
        assert!((loss + q * k).abs() <= 1e-4, "q={q} k={k}: {loss}");
        assert!(loss < 0.0);
    }
}

#[test]
fn spread_cycle_converges_at_first_order() {
    let model = ContinuousModel::with_spread(0.1, 0.2, 100.0);
    let input = InputSignal::TrapezoidCycle {
        k: 1.0,
        ramp: 0.25,
        hold: 0.5,
    };
    let errors: Vec<f64> = [1e-2, 5e-3, 2.5e-3, 1.25e-3]
        .iter()
        .map(|&dt| (spread_cycle_loss(&model, &input, dt).unwrap() + 0.2).abs())
        .collect();
    for pair in errors.windows(2) {
        let order = (pair[0] / pair[1]).log2();
        assert!((0.9..=1.1).contains(&order), "{errors:?}");
    }
}

#[test]
fn delayed_spread_sign_follows_impact_versus_spread() {
    let (r, tau, dt) = (0.1, 0.25, 1e-4);
    let input = sine(1.0, 1.0);
    let mut signs = Vec::new();
    for q in [0.0, 0.01, 0.02, 0.03, 0.05, 0.1] {
        let model = ContinuousModel::delayed_with_spread(r, tau, q, 100.0);
        let numeric = delayed_spread_phase(&model, &input, dt, 1).unwrap();
        let oracle = delayed_phase_per_cycle(r, 1.0, 1.0, tau) - spread_cost_per_cycle(q, 1.0, 1.0);
        assert!(
            (numeric - oracle).abs() <= 1e-4,
            "q={q}: {numeric} vs {oracle}"
        );
        signs.push(numeric > 0.0);
    }
    // sign change at q = r A P sin(2 pi tau / P) / 4 = 0.025
    assert_eq!(signs, [true, true, true, false, false, false]);
}

#[test]
fn delayed_spread_without_spread_is_delayed() {
    let input = sine(1.0, 1.0);
    let with = delayed_spread_phase(
        &ContinuousModel::delayed_with_spread(0.1, 0.25, 0.0, 100.0),
        &input,
        1e-3,
        2,
    )
    .unwrap();
    let without = steady_state_window(&ContinuousModel::delayed(0.1, 0.25, 100.0), &input, 1e-3, 2)
        .unwrap()
        .phase();
    assert!((with - without).abs() < 1e-12);
}
