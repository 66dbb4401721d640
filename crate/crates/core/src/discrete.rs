//! Deterministic discrete-time dynamics of a single trader.
//!
//! One tick applies
//!
//! ```text
//! y' = y + u
//! s' = s + w + impact(u)
//! z' = z - v(s, u) * u - c * [u != 0]
//! ```
//!
//! where `v` is the ask or bid around `s` and `w` the exogenous drift. Ticks
//! are unit spaced. Inventory always accumulates (`y' = y + u`), including in
//! the drifted model.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::geometry;
use crate::market::{execution_price, MarketParams, PriceImpact, SystemState};

/// Closed-shape tolerance used by [`shape_area`].
pub const SHAPE_CLOSURE_TOL: f64 = 1e-9;

/// Advances the state by one tick.
pub fn step<I: PriceImpact>(
    state: SystemState,
    u: f64,
    w: f64,
    params: &MarketParams<I>,
) -> SystemState {
    if u == 0.0 {
        return SystemState {
            quote: state.quote + w,
            ..state
        };
    }
    // u != 0, so an execution price always exists
    let price = execution_price(state.quote, u, params.spread).unwrap_or(state.quote);
    SystemState {
        inventory: state.inventory + u,
        quote: state.quote + w + params.impact.impact(u),
        cash: state.cash - price * u - params.fee,
    }
}

/// Sampled solution: `states[i]` is the state at tick `i`, `inputs[i]` and
/// `drifts[i]` act between ticks `i` and `i + 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub states: Vec<SystemState>,
    pub inputs: Vec<f64>,
    pub drifts: Vec<f64>,
}

impl Trajectory {
    /// Number of steps (`states.len() - 1`).
    pub fn horizon(&self) -> usize {
        self.inputs.len()
    }

    pub fn first(&self) -> &SystemState {
        &self.states[0]
    }

    pub fn last(&self) -> &SystemState {
        &self.states[self.states.len() - 1]
    }

    pub fn trade_count(&self) -> usize {
        self.inputs.iter().filter(|&&u| u != 0.0).count()
    }

    pub fn cumulative_drift(&self) -> f64 {
        self.drifts.iter().sum()
    }

    pub fn negative_quote_ticks(&self) -> usize {
        self.states.iter().filter(|s| s.quote < 0.0).count()
    }

    /// True when every consecutive pair satisfies [`step`] bit for bit.
    pub fn replays<I: PriceImpact>(&self, params: &MarketParams<I>) -> bool {
        self.states.len() == self.inputs.len() + 1
            && self.drifts.len() == self.inputs.len()
            && self
                .states
                .windows(2)
                .enumerate()
                .all(|(i, pair)| step(pair[0], self.inputs[i], self.drifts[i], params) == pair[1])
    }

    /// Final cash recomputed as `z(0) - Σ v(t_i) u(t_i) - c * #trades`.
    pub fn telescoped_cash<I>(&self, params: &MarketParams<I>) -> f64 {
        let mut spent = 0.0;
        let mut trades = 0usize;
        for (i, &u) in self.inputs.iter().enumerate() {
            if u != 0.0 {
                let price = execution_price(self.states[i].quote, u, params.spread)
                    .unwrap_or(self.states[i].quote);
                spent += price * u;
                trades += 1;
            }
        }
        self.first().cash - spent - params.fee * trades as f64
    }

    /// `(y, s)` path.
    pub fn shape_path(&self) -> Vec<(f64, f64)> {
        self.states.iter().map(|s| (s.inventory, s.quote)).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CycleDirection {
    BuyThenSell,
    SellThenBuy,
}

impl CycleDirection {
    /// `+1` for buy-then-sell, `-1` for sell-then-buy.
    pub fn sign(self) -> f64 {
        match self {
            Self::BuyThenSell => 1.0,
            Self::SellThenBuy => -1.0,
        }
    }
}

/// Enter a position of `k` shares at `t_b`, leave it at `t_s`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CycleSpec {
    pub t_b: usize,
    pub t_s: usize,
    pub k: f64,
    pub direction: CycleDirection,
}

impl CycleSpec {
    pub fn buy_then_sell(t_b: usize, t_s: usize, k: f64) -> Self {
        Self {
            t_b,
            t_s,
            k,
            direction: CycleDirection::BuyThenSell,
        }
    }

    pub fn sell_then_buy(t_b: usize, t_s: usize, k: f64) -> Self {
        Self {
            t_b,
            t_s,
            k,
            direction: CycleDirection::SellThenBuy,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.t_b < self.t_s && self.k.is_finite() && self.k > 0.0 {
            Ok(())
        } else {
            Err(Error::InvalidCycle {
                t_b: self.t_b,
                t_s: self.t_s,
                k: self.k,
            })
        }
    }

    /// Ticks spent holding the position.
    pub fn duration(&self) -> usize {
        self.t_s - self.t_b
    }

    /// Signed quantity traded at the opening tick.
    pub fn opening_quantity(&self) -> f64 {
        self.direction.sign() * self.k
    }
}

/// Builds the dense input sequence of a set of disjoint cycles.
pub fn make_cycle_input(cycles: &[CycleSpec], horizon: usize) -> Result<Vec<f64>> {
    let mut sorted: Vec<CycleSpec> = cycles.to_vec();
    sorted.sort_by_key(|c| c.t_b);
    let mut input = alloc::vec![0.0; horizon];
    let mut previous: Option<CycleSpec> = None;
    for cycle in &sorted {
        cycle.validate()?;
        if cycle.t_s >= horizon {
            return Err(Error::TickOutOfRange {
                tick: cycle.t_s,
                horizon,
            });
        }
        if let Some(prev) = previous {
            if cycle.t_b <= prev.t_s {
                return Err(Error::OverlappingCycles {
                    t_b: cycle.t_b,
                    t_s: cycle.t_s,
                    other_b: prev.t_b,
                    other_s: prev.t_s,
                });
            }
        }
        let open = cycle.opening_quantity();
        input[cycle.t_b] = open;
        input[cycle.t_s] = -open;
        previous = Some(*cycle);
    }
    Ok(input)
}

/// Iterates [`step`] over the inputs and drifts.
pub fn simulate<I: PriceImpact>(
    initial: SystemState,
    inputs: &[f64],
    drifts: &[f64],
    params: &MarketParams<I>,
) -> Result<Trajectory> {
    if inputs.len() != drifts.len() {
        return Err(Error::LengthMismatch {
            what: "drift sequence",
            expected: inputs.len(),
            found: drifts.len(),
        });
    }
    if !initial.is_finite() {
        return Err(Error::NonFinite("initial state"));
    }
    if inputs.iter().chain(drifts).any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("input or drift sequence"));
    }
    let mut states = Vec::with_capacity(inputs.len() + 1);
    let mut state = initial;
    states.push(state);
    for (&u, &w) in inputs.iter().zip(drifts) {
        state = step(state, u, w, params);
        states.push(state);
    }
    Ok(Trajectory {
        states,
        inputs: inputs.to_vec(),
        drifts: drifts.to_vec(),
    })
}

/// Drift-free cash gained by one cycle of size `k`:
/// `impact(k) * k - q * k - 2c`, i.e. `r k^2 - q k - 2c` for linear impact.
///
/// `k <= 0` means no cycle and gives 0.
pub fn closed_form_phase<I: PriceImpact>(k: f64, params: &MarketParams<I>) -> f64 {
    if k <= 0.0 {
        return 0.0;
    }
    params.impact.impact(k) * k - params.spread * k - 2.0 * params.fee
}

/// `z(t_end) - z(0)`.
pub fn phase(traj: &Trajectory) -> f64 {
    traj.last().cash - traj.first().cash
}

/// Signed area enclosed by the `(y, s)` path, which must return to its start.
pub fn shape_area(traj: &Trajectory) -> Result<f64> {
    let (first, last) = (traj.first(), traj.last());
    let gap_y = last.inventory - first.inventory;
    let gap_s = last.quote - first.quote;
    if gap_y.abs() > SHAPE_CLOSURE_TOL || gap_s.abs() > SHAPE_CLOSURE_TOL {
        return Err(Error::OpenPath { gap_y, gap_s });
    }
    Ok(geometry::signed_area(&traj.shape_path()))
}
