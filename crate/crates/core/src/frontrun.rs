//! A classical trader whose round trip is front-run by a high-frequency
//! trader sharing the same quote.
//!
//! Event order is fixed: the HF trader buys at `t_cb - tau1`, the classical
//! trader buys at `t_cb`, the HF trader sells at `t_cb + tau2`, the classical
//! trader sells at `t_cs`. Each trader pays the shared pre-trade quote (plus
//! half the spread and the fee), and both orders move the quote.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::market::{execution_price, MarketParams, PriceImpact};

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct TwoTraderState {
    pub y_c: f64,
    pub y_h: f64,
    pub quote: f64,
    pub z_c: f64,
    pub z_h: f64,
}

impl TwoTraderState {
    pub fn is_finite(&self) -> bool {
        [self.y_c, self.y_h, self.quote, self.z_c, self.z_h]
            .iter()
            .all(|v| v.is_finite())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrontrunSpec {
    pub k_c: f64,
    pub k_h: f64,
    pub t_cb: usize,
    pub t_cs: usize,
    pub tau1: usize,
    pub tau2: usize,
}

impl FrontrunSpec {
    pub fn hf_buy_tick(&self) -> Option<usize> {
        self.t_cb.checked_sub(self.tau1)
    }

    pub fn hf_sell_tick(&self) -> usize {
        self.t_cb + self.tau2
    }

    pub fn validate(&self, horizon: usize) -> Result<()> {
        if self.tau1 == 0 || self.tau2 == 0 {
            return Err(Error::FrontrunOrdering("tau1 and tau2 must be positive"));
        }
        if self.hf_buy_tick().is_none() {
            return Err(Error::FrontrunOrdering("t_cb - tau1 must be >= 0"));
        }
        if self.hf_sell_tick() >= self.t_cs {
            return Err(Error::FrontrunOrdering("t_cb + tau2 must precede t_cs"));
        }
        if self.t_cs >= horizon {
            return Err(Error::FrontrunOrdering("horizon must exceed t_cs"));
        }
        for (name, value) in [("k_c", self.k_c), ("k_h", self.k_h)] {
            if !(value.is_finite() && value >= 0.0) {
                return Err(Error::InvalidParameter { name, value });
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FrontrunTrajectory {
    pub states: Vec<TwoTraderState>,
    pub u_c: Vec<f64>,
    pub u_h: Vec<f64>,
    pub drifts: Vec<f64>,
}

impl FrontrunTrajectory {
    /// `(Δz_c, Δz_h)` over the whole run.
    pub fn cash_deltas(&self) -> (f64, f64) {
        let (first, last) = (self.states[0], self.states[self.states.len() - 1]);
        (last.z_c - first.z_c, last.z_h - first.z_h)
    }

    pub fn last(&self) -> &TwoTraderState {
        &self.states[self.states.len() - 1]
    }
}

fn settle(cash: f64, quote: f64, u: f64, spread: f64, fee: f64) -> f64 {
    match execution_price(quote, u, spread) {
        Ok(price) => cash - price * u - fee,
        Err(_) => cash,
    }
}

/// Simulates both traders over `horizon` ticks from `(0, 0, s0, 0, 0)`.
pub fn simulate_two_traders<I: PriceImpact>(
    spec: &FrontrunSpec,
    params: &MarketParams<I>,
    drifts: &[f64],
    horizon: usize,
) -> Result<FrontrunTrajectory> {
    spec.validate(horizon)?;
    if drifts.len() != horizon {
        return Err(Error::LengthMismatch {
            what: "drift sequence",
            expected: horizon,
            found: drifts.len(),
        });
    }
    let mut u_c = alloc::vec![0.0; horizon];
    let mut u_h = alloc::vec![0.0; horizon];
    u_c[spec.t_cb] = spec.k_c;
    u_c[spec.t_cs] = -spec.k_c;
    // validated above
    let t_hb = spec.hf_buy_tick().unwrap_or(0);
    u_h[t_hb] = spec.k_h;
    u_h[spec.hf_sell_tick()] = -spec.k_h;

    let mut state = TwoTraderState {
        quote: params.initial_quote,
        ..Default::default()
    };
    let mut states = Vec::with_capacity(horizon + 1);
    states.push(state);
    for i in 0..horizon {
        let (uc, uh) = (u_c[i], u_h[i]);
        let s = state.quote;
        state = TwoTraderState {
            y_c: state.y_c + uc,
            y_h: state.y_h + uh,
            quote: s + drifts[i] + params.impact.impact(uc) + params.impact.impact(uh),
            z_c: settle(state.z_c, s, uc, params.spread, params.fee),
            z_h: settle(state.z_h, s, uh, params.spread, params.fee),
        };
        states.push(state);
    }
    if !state.is_finite() {
        return Err(Error::NonFinite("two-trader state"));
    }
    Ok(FrontrunTrajectory {
        states,
        u_c,
        u_h,
        drifts: drifts.to_vec(),
    })
}

/// Frictionless drift-free cash deltas under linear impact `r`:
/// `(r k_c (k_c - k_h), r k_h (k_c + k_h))`.
pub fn closed_form_frontrun(k_c: f64, k_h: f64, r: f64) -> (f64, f64) {
    (r * k_c * (k_c - k_h), r * k_h * (k_c + k_h))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::market::ImpactFunction;

    fn spec(k_c: f64, k_h: f64) -> FrontrunSpec {
        FrontrunSpec {
            k_c,
            k_h,
            t_cb: 20,
            t_cs: 60,
            tau1: 3,
            tau2: 4,
        }
    }

    fn run(k_c: f64, k_h: f64) -> (f64, f64) {
        let params = MarketParams::frictionless(ImpactFunction::Linear { r: 0.1 }, 100.0);
        let traj = simulate_two_traders(&spec(k_c, k_h), &params, &[0.0; 80], 80).unwrap();
        traj.cash_deltas()
    }

    #[test]
    fn equal_sizes_transfer_all_gain() {
        let (dc, dh) = run(1.0, 1.0);
        assert!(dc.abs() < 1e-12);
        assert!((dh - 0.2).abs() < 1e-12);
    }

    #[test]
    fn absent_front_runner() {
        let (dc, dh) = run(1.0, 0.0);
        assert!((dc - 0.1).abs() < 1e-12);
        assert_eq!(dh, 0.0);
    }

    #[test]
    fn larger_front_runner_inflicts_loss() {
        let (dc, dh) = run(1.0, 2.0);
        assert!((dc + 0.1).abs() < 1e-12);
        assert!((dh - 0.6).abs() < 1e-12);
    }

    #[test]
    fn closed_form_examples() {
        let (c, h) = closed_form_frontrun(1.0, 1.0, 0.1);
        assert!(c.abs() < 1e-15 && (h - 0.2).abs() < 1e-15);
        assert_eq!(closed_form_frontrun(1.0, 0.0, 0.1), (0.1, 0.0));
        assert_eq!(closed_form_frontrun(2.0, 3.0, 0.5), (-1.0, 7.5));
    }

    #[test]
    fn ordering_violations_rejected() {
        let params = MarketParams::frictionless(ImpactFunction::Linear { r: 0.1 }, 100.0);
        let too_early = FrontrunSpec {
            tau1: 21,
            ..spec(1.0, 1.0)
        };
        let late_exit = FrontrunSpec {
            tau2: 40,
            ..spec(1.0, 1.0)
        };
        let zero_lag = FrontrunSpec {
            tau1: 0,
            ..spec(1.0, 1.0)
        };
        for bad in [too_early, late_exit, zero_lag] {
            assert!(matches!(
                simulate_two_traders(&bad, &params, &[0.0; 80], 80),
                Err(Error::FrontrunOrdering(_))
            ));
        }
        assert!(simulate_two_traders(&spec(1.0, 1.0), &params, &[0.0; 60], 60).is_err());
        assert!(simulate_two_traders(&spec(1.0, 1.0), &params, &[0.0; 10], 80).is_err());
    }
}
