//! Quote drift, randomized cycle schedules and Monte Carlo batteries.
//!
//! Randomness is drawn from ChaCha20 keyed by a 64-bit seed. A seed owns two
//! independent streams: stream [`DRIFT_STREAM`] feeds the drift and stream
//! [`SCHEDULE_STREAM`] feeds the cycle schedule, so changing the schedule
//! parameters never perturbs the drift realization of the same seed.

use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::{Exp1, Normal};

use crate::discrete::{make_cycle_input, phase, simulate, CycleDirection, CycleSpec, Trajectory};
use crate::error::{check_non_negative, Error, Result};
use crate::market::{MarketParams, PriceImpact};

pub const DRIFT_STREAM: u64 = 0;
pub const SCHEDULE_STREAM: u64 = 1;

/// Generator used for every random draw.
pub const RNG_ALGORITHM: &str =
    "ChaCha20 (rand_chacha 0.9) seeded with seed_from_u64; stream 0 = drift, stream 1 = schedule";
/// Algorithm behind the normal drift increments.
pub const NORMAL_ALGORITHM: &str = "Ziggurat (rand_distr 0.5 Normal { mean: 0, std_dev: sigma })";
/// Algorithm behind inter-arrival and hold durations.
pub const DURATION_ALGORITHM: &str =
    "mean * Exp1 (rand_distr 0.5 Ziggurat), rounded up to whole ticks, at least 1 tick";
/// How per-trial seeds are derived from a base seed.
pub const SEED_DERIVATION: &str =
    "seed(trial i) = splitmix64(base_seed + (i + 1) * 0x9E3779B97F4A7C15), i.e. the (i+1)-th SplitMix64 output";

fn stream_rng(seed: u64, stream: u64) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// SplitMix64 output function.
pub fn splitmix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of trial `trial` in a batch keyed by `base_seed`.
pub fn trial_seed(base_seed: u64, trial: u64) -> u64 {
    splitmix64(base_seed.wrapping_add(trial.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15)))
}

/// `horizon` i.i.d. `N(0, sigma)` increments.
pub fn gen_drift(sigma: f64, horizon: usize, seed: u64) -> Result<Vec<f64>> {
    check_non_negative("sigma", sigma)?;
    if sigma == 0.0 {
        return Ok(alloc::vec![0.0; horizon]);
    }
    let normal = Normal::new(0.0, sigma).map_err(|_| Error::InvalidParameter {
        name: "sigma",
        value: sigma,
    })?;
    let mut rng = stream_rng(seed, DRIFT_STREAM);
    Ok((0..horizon).map(|_| rng.sample(normal)).collect())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScheduleParams {
    /// Mean ticks between cycle start attempts. `f64::INFINITY` disables trading.
    pub mean_interarrival: f64,
    /// Mean of `t_s - t_b` in ticks.
    pub mean_hold: f64,
    /// Shares per cycle.
    pub k: f64,
    pub horizon: usize,
    /// Draw sell-then-buy cycles with probability 1/2.
    pub allow_short: bool,
}

impl ScheduleParams {
    pub fn validate(&self) -> Result<()> {
        if self.mean_interarrival.is_nan() || self.mean_interarrival <= 0.0 {
            return Err(Error::InvalidParameter {
                name: "mean_interarrival",
                value: self.mean_interarrival,
            });
        }
        for (name, value) in [("mean_hold", self.mean_hold), ("k", self.k)] {
            if !(value.is_finite() && value > 0.0) {
                return Err(Error::InvalidParameter { name, value });
            }
        }
        Ok(())
    }
}

fn ceil_ticks(x: f64) -> usize {
    // `as` saturates; NaN maps to 0
    (libm::ceil(x) as usize).max(1)
}

/// Random non-overlapping cycles.
///
/// Start attempts form a renewal process with exponential gaps of mean
/// `mean_interarrival` (rounded up to whole ticks); each attempt draws an
/// exponential hold of mean `mean_hold`. An attempt whose buy tick is not
/// strictly after the previous accepted sell tick, or whose sell tick falls
/// outside the horizon, is dropped.
pub fn gen_cycle_schedule(sp: &ScheduleParams, seed: u64) -> Result<Vec<CycleSpec>> {
    sp.validate()?;
    let mut cycles = Vec::new();
    if !sp.mean_interarrival.is_finite() {
        return Ok(cycles);
    }
    let mut rng = stream_rng(seed, SCHEDULE_STREAM);
    let mut clock = 0usize;
    let mut last_close: Option<usize> = None;
    loop {
        let gap: f64 = rng.sample(Exp1);
        clock = clock.saturating_add(ceil_ticks(sp.mean_interarrival * gap));
        if clock >= sp.horizon {
            break;
        }
        let hold: f64 = rng.sample(Exp1);
        let t_s = clock.saturating_add(ceil_ticks(sp.mean_hold * hold));
        let direction = if sp.allow_short && rng.random_bool(0.5) {
            CycleDirection::SellThenBuy
        } else {
            CycleDirection::BuyThenSell
        };
        if t_s >= sp.horizon || last_close.is_some_and(|close| clock <= close) {
            continue;
        }
        cycles.push(CycleSpec {
            t_b: clock,
            t_s,
            k: sp.k,
            direction,
        });
        last_close = Some(t_s);
    }
    Ok(cycles)
}

/// Cash gained by a set of disjoint cycles under a given drift sequence:
///
/// `Σ [impact(k) k ± k Σ_{i=t_b}^{t_s-1} w_i - q k - 2c]`
///
/// with `+` for buy-then-sell and `-` for sell-then-buy cycles.
pub fn cycle_cash_prediction<I: PriceImpact>(
    cycles: &[CycleSpec],
    drifts: &[f64],
    params: &MarketParams<I>,
) -> f64 {
    cycles
        .iter()
        .map(|c| {
            let window: f64 = drifts[c.t_b..c.t_s].iter().sum();
            params.impact.impact(c.k) * c.k + c.direction.sign() * c.k * window
                - params.spread * c.k
                - 2.0 * params.fee
        })
        .sum()
}

/// One seeded realization: its schedule and full trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct Realization {
    pub seed: u64,
    pub cycles: Vec<CycleSpec>,
    pub trajectory: Trajectory,
}

impl Realization {
    pub fn summary(&self) -> RunSummary {
        let last = self.trajectory.last();
        let n_cycles = self.cycles.len();
        let mean_duration = if n_cycles == 0 {
            0.0
        } else {
            self.cycles.iter().map(|c| c.duration() as f64).sum::<f64>() / n_cycles as f64
        };
        RunSummary {
            z_end: last.cash,
            s_end: last.quote,
            y_end: last.inventory,
            n_cycles,
            mean_duration,
            cum_drift: self.trajectory.cumulative_drift(),
            seed: self.seed,
        }
    }
}

/// Endpoint statistics of one realization started at `(0, s0, 0)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunSummary {
    pub z_end: f64,
    pub s_end: f64,
    pub y_end: f64,
    pub n_cycles: usize,
    pub mean_duration: f64,
    pub cum_drift: f64,
    pub seed: u64,
}

pub fn run_realization<I: PriceImpact>(
    sp: &ScheduleParams,
    params: &MarketParams<I>,
    seed: u64,
) -> Result<Realization> {
    let drifts = gen_drift(params.sigma, sp.horizon, seed)?;
    let cycles = gen_cycle_schedule(sp, seed)?;
    let input = make_cycle_input(&cycles, sp.horizon)?;
    let trajectory = simulate(params.initial_state(), &input, &drifts, params)?;
    Ok(Realization {
        seed,
        cycles,
        trajectory,
    })
}

pub fn run_experiment<I: PriceImpact>(
    sp: &ScheduleParams,
    params: &MarketParams<I>,
    seed: u64,
) -> Result<RunSummary> {
    run_realization(sp, params, seed).map(|r| r.summary())
}

/// `|Δz - (impact(k) k ± k Σ_{i=t_b}^{t_s-1} w_i)|` for a trajectory holding
/// exactly one cycle in a market without spread or fee.
pub fn hold_interval_identity<I: PriceImpact>(
    traj: &Trajectory,
    cycle: &CycleSpec,
    params: &MarketParams<I>,
) -> Result<f64> {
    if params.spread != 0.0 || params.fee != 0.0 {
        return Err(Error::Precondition(
            "hold-interval identity requires q = c = 0",
        ));
    }
    let expected_input = make_cycle_input(core::slice::from_ref(cycle), traj.horizon())?;
    if expected_input != traj.inputs {
        return Err(Error::Precondition(
            "trajectory input must be exactly the given single cycle",
        ));
    }
    let predicted = cycle_cash_prediction(core::slice::from_ref(cycle), &traj.drifts, params);
    Ok((phase(traj) - predicted).abs())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrialRecord {
    pub trial: u64,
    pub summary: RunSummary,
}

pub fn run_trial<I: PriceImpact>(
    sp: &ScheduleParams,
    params: &MarketParams<I>,
    base_seed: u64,
    trial: u64,
) -> Result<TrialRecord> {
    let summary = run_experiment(sp, params, trial_seed(base_seed, trial))?;
    Ok(TrialRecord { trial, summary })
}

/// Aggregate statistics over trials. Quantities that need at least two trials
/// or non-zero variance are `None` when undefined.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonteCarloStats {
    pub trials: usize,
    pub mean_z: f64,
    pub std_z: Option<f64>,
    pub corr_z_ncycles: Option<f64>,
    pub corr_z_send: Option<f64>,
    pub corr_z_drift: Option<f64>,
    pub frac_profitable: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MonteCarloReport {
    pub records: Vec<TrialRecord>,
    pub stats: MonteCarloStats,
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Sample standard deviation (`n - 1` denominator).
pub fn sample_std(xs: &[f64]) -> Option<f64> {
    if xs.len() < 2 {
        return None;
    }
    let m = mean(xs);
    let ss: f64 = xs.iter().map(|x| (x - m) * (x - m)).sum();
    Some(libm::sqrt(ss / (xs.len() - 1) as f64))
}

/// Pearson correlation coefficient.
pub fn pearson(xs: &[f64], ys: &[f64]) -> Option<f64> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return None;
    }
    let (mx, my) = (mean(xs), mean(ys));
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        let (dx, dy) = (x - mx, y - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return None;
    }
    Some(sxy / libm::sqrt(sxx * syy))
}

/// Sorts records by trial index and computes the batch statistics, so the
/// result does not depend on the order trials finished in.
pub fn aggregate(mut records: Vec<TrialRecord>) -> MonteCarloReport {
    records.sort_by_key(|r| r.trial);
    let z: Vec<f64> = records.iter().map(|r| r.summary.z_end).collect();
    let n: Vec<f64> = records.iter().map(|r| r.summary.n_cycles as f64).collect();
    let s: Vec<f64> = records.iter().map(|r| r.summary.s_end).collect();
    let w: Vec<f64> = records.iter().map(|r| r.summary.cum_drift).collect();
    let trials = records.len();
    let stats = MonteCarloStats {
        trials,
        mean_z: if trials == 0 { 0.0 } else { mean(&z) },
        std_z: sample_std(&z),
        corr_z_ncycles: pearson(&z, &n),
        corr_z_send: pearson(&z, &s),
        corr_z_drift: pearson(&z, &w),
        frac_profitable: if trials == 0 {
            0.0
        } else {
            z.iter().filter(|&&v| v > 0.0).count() as f64 / trials as f64
        },
    };
    MonteCarloReport { records, stats }
}

/// Runs `trials` seeded realizations sequentially and aggregates them.
pub fn monte_carlo<I: PriceImpact>(
    sp: &ScheduleParams,
    params: &MarketParams<I>,
    trials: usize,
    base_seed: u64,
) -> Result<MonteCarloReport> {
    if trials == 0 {
        return Err(Error::InvalidParameter {
            name: "trials",
            value: 0.0,
        });
    }
    let records = (0..trials as u64)
        .map(|i| run_trial(sp, params, base_seed, i))
        .collect::<Result<Vec<_>>>()?;
    Ok(aggregate(records))
}
