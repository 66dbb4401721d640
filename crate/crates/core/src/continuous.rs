//! Continuous-time counterpart of the trading model:
//!
//! ```text
//! dy/dt = u(t)
//! ds/dt = r u(t - tau)          (tau = 0 without delay)
//! dz/dt = -s u                  (smooth variants)
//! dz/dt = -(s ± q/2) u          (spread variants, + for u > 0, - for u < 0)
//! ```
//!
//! Smooth variants use classical fixed-step RK4. Spread variants use
//! explicit Euler with the cash branch picked by the sign of `u` at the start
//! of the step; at `u = 0` the cash equation contributes nothing. A spread
//! variant with `q = 0` is the smooth model and is integrated as such.
//!
//! Delayed input is read from a FIFO delay line fed with the applied input,
//! which is zero before `t = 0` (system at rest).

use alloc::collections::VecDeque;
use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::error::{check_non_negative, check_positive, Error, Result};
use crate::geometry;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelVariant {
    Plain,
    Delayed,
    Spread,
    DelayedSpread,
}

impl ModelVariant {
    pub fn is_delayed(self) -> bool {
        matches!(self, Self::Delayed | Self::DelayedSpread)
    }

    pub fn has_spread(self) -> bool {
        matches!(self, Self::Spread | Self::DelayedSpread)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContinuousModel {
    pub r: f64,
    pub tau: f64,
    pub spread: f64,
    pub initial_quote: f64,
    pub variant: ModelVariant,
}

impl ContinuousModel {
    pub fn plain(r: f64, initial_quote: f64) -> Self {
        Self {
            r,
            tau: 0.0,
            spread: 0.0,
            initial_quote,
            variant: ModelVariant::Plain,
        }
    }

    pub fn delayed(r: f64, tau: f64, initial_quote: f64) -> Self {
        Self {
            tau,
            variant: ModelVariant::Delayed,
            ..Self::plain(r, initial_quote)
        }
    }

    pub fn with_spread(r: f64, spread: f64, initial_quote: f64) -> Self {
        Self {
            spread,
            variant: ModelVariant::Spread,
            ..Self::plain(r, initial_quote)
        }
    }

    pub fn delayed_with_spread(r: f64, tau: f64, spread: f64, initial_quote: f64) -> Self {
        Self {
            tau,
            spread,
            variant: ModelVariant::DelayedSpread,
            ..Self::plain(r, initial_quote)
        }
    }

    pub fn validate(&self) -> Result<()> {
        check_non_negative("r", self.r)?;
        check_non_negative("q", self.spread)?;
        if !self.initial_quote.is_finite() {
            return Err(Error::InvalidParameter {
                name: "s0",
                value: self.initial_quote,
            });
        }
        if self.variant.is_delayed() {
            check_positive("tau", self.tau)?;
        } else if self.tau != 0.0 {
            return Err(Error::InvalidParameter {
                name: "tau",
                value: self.tau,
            });
        }
        if !self.variant.has_spread() && self.spread != 0.0 {
            return Err(Error::InvalidParameter {
                name: "q",
                value: self.spread,
            });
        }
        Ok(())
    }

    fn uses_euler(&self) -> bool {
        self.variant.has_spread() && self.spread > 0.0
    }
}

/// Periodic trading rate `u(t)`, zero for `t < 0`. Each shape integrates to
/// zero over one period.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InputSignal {
    /// `A sin(2 pi t / P)`
    Sinusoid { amplitude: f64, period: f64 },
    /// A trapezoidal buying pulse of total size `k` (ramp up, hold, ramp
    /// down), then the mirrored selling pulse.
    TrapezoidCycle { k: f64, ramp: f64, hold: f64 },
}

impl InputSignal {
    pub fn validate(&self) -> Result<()> {
        match *self {
            Self::Sinusoid { amplitude, period } => {
                if !amplitude.is_finite() {
                    return Err(Error::InvalidParameter {
                        name: "amplitude",
                        value: amplitude,
                    });
                }
                check_positive("period", period)
            }
            Self::TrapezoidCycle { k, ramp, hold } => {
                check_positive("k", k)?;
                check_non_negative("ramp", ramp)?;
                check_non_negative("hold", hold)?;
                check_positive("ramp + hold", ramp + hold)
            }
        }
    }

    pub fn period(&self) -> f64 {
        match *self {
            Self::Sinusoid { period, .. } => period,
            Self::TrapezoidCycle { ramp, hold, .. } => 2.0 * (2.0 * ramp + hold),
        }
    }

    pub fn value(&self, t: f64) -> f64 {
        if t < 0.0 {
            return 0.0;
        }
        match *self {
            Self::Sinusoid { amplitude, period } => amplitude * libm::sin(2.0 * PI * t / period),
            Self::TrapezoidCycle { k, ramp, hold } => {
                let pulse = 2.0 * ramp + hold;
                let height = k / (ramp + hold);
                let phase = libm::fmod(t, 2.0 * pulse);
                let (sign, local) = if phase < pulse {
                    (1.0, phase)
                } else {
                    (-1.0, phase - pulse)
                };
                let level = if local < ramp {
                    local / ramp
                } else if local <= ramp + hold {
                    1.0
                } else {
                    (pulse - local) / ramp
                };
                sign * height * level
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContinuousSample {
    pub t: f64,
    pub u: f64,
    pub y: f64,
    pub s: f64,
    pub z: f64,
}

/// Uniformly sampled solution, `samples[i].t = t0 + i * dt`.
#[derive(Debug, Clone, PartialEq)]
pub struct ContinuousTrajectory {
    pub dt: f64,
    pub samples: Vec<ContinuousSample>,
}

impl ContinuousTrajectory {
    pub fn phase(&self) -> f64 {
        match (self.samples.first(), self.samples.last()) {
            (Some(a), Some(b)) => b.z - a.z,
            _ => 0.0,
        }
    }

    /// Sub-trajectory between two sample times (both on the grid).
    pub fn window(&self, start: f64, end: f64) -> Result<ContinuousTrajectory> {
        let t0 = self.samples.first().ok_or(Error::EmptyTrajectory)?.t;
        let i0 = steps_in("window start", start - t0, self.dt)?;
        let i1 = steps_in("window end", end - t0, self.dt)?;
        if i0 > i1 || i1 >= self.samples.len() {
            return Err(Error::Precondition("window outside the trajectory"));
        }
        Ok(ContinuousTrajectory {
            dt: self.dt,
            samples: self.samples[i0..=i1].to_vec(),
        })
    }
}

fn steps_in(quantity: &'static str, value: f64, dt: f64) -> Result<usize> {
    let n = libm::round(value / dt);
    if !(value.is_finite() && n >= 0.0) || (value - n * dt).abs() > 1e-9 * dt.max(value.abs()) {
        return Err(Error::NotStepMultiple {
            quantity,
            value,
            dt,
        });
    }
    Ok(n as usize)
}

/// FIFO of `lag` samples; pushing returns the sample `lag` pushes earlier, or
/// zero while the line is still filling.
struct DelayLine {
    buf: VecDeque<f64>,
    lag: usize,
}

impl DelayLine {
    fn new(lag: usize) -> Self {
        Self {
            buf: VecDeque::with_capacity(lag + 1),
            lag,
        }
    }

    fn push(&mut self, value: f64) -> f64 {
        self.buf.push_back(value);
        if self.buf.len() > self.lag {
            self.buf.pop_front().unwrap_or(0.0)
        } else {
            0.0
        }
    }
}

/// Integrates `model` driven by `input` from `(0, s0, 0)` over `[0, duration]`.
pub fn integrate(
    model: &ContinuousModel,
    input: &InputSignal,
    dt: f64,
    duration: f64,
) -> Result<ContinuousTrajectory> {
    model.validate()?;
    input.validate()?;
    check_positive("dt", dt)?;
    let steps = steps_in("duration", duration, dt)?;
    let delay_steps = if model.variant.is_delayed() {
        steps_in("tau", model.tau, dt)?
    } else {
        0
    };
    let mut samples = Vec::with_capacity(steps + 1);
    let mut x = [0.0, model.initial_quote, 0.0];
    let mut record = |n: usize, x: &[f64; 3]| {
        let t = n as f64 * dt;
        samples.push(ContinuousSample {
            t,
            u: input.value(t),
            y: x[0],
            s: x[1],
            z: x[2],
        });
    };
    record(0, &x);

    if model.uses_euler() {
        let mut line = DelayLine::new(delay_steps);
        let half_q = 0.5 * model.spread;
        for n in 0..steps {
            let u = input.value(n as f64 * dt);
            let u_lag = line.push(u);
            let price = if u > 0.0 {
                x[1] + half_q
            } else if u < 0.0 {
                x[1] - half_q
            } else {
                0.0
            };
            x = [
                x[0] + dt * u,
                x[1] + dt * model.r * u_lag,
                x[2] - dt * price * u,
            ];
            record(n + 1, &x);
        }
    } else {
        // half-step samples: lag of 2 per full step
        let mut line = DelayLine::new(2 * delay_steps);
        let delayed = delay_steps > 0;
        let r = model.r;
        let rhs = |x: &[f64; 3], u: f64, u_lag: f64| [u, r * u_lag, -x[1] * u];
        let axpy = |x: &[f64; 3], h: f64, k: &[f64; 3]| {
            [x[0] + h * k[0], x[1] + h * k[1], x[2] + h * k[2]]
        };
        let mut lag_start = line.push(input.value(0.0));
        for n in 0..steps {
            let t = n as f64 * dt;
            let (u0, um, u1) = (
                input.value(t),
                input.value(t + 0.5 * dt),
                input.value(t + dt),
            );
            let (l0, lm, l1) = if delayed {
                let lm = line.push(um);
                let l1 = line.push(u1);
                (lag_start, lm, l1)
            } else {
                (u0, um, u1)
            };
            let k1 = rhs(&x, u0, l0);
            let k2 = rhs(&axpy(&x, 0.5 * dt, &k1), um, lm);
            let k3 = rhs(&axpy(&x, 0.5 * dt, &k2), um, lm);
            let k4 = rhs(&axpy(&x, dt, &k3), u1, l1);
            for i in 0..3 {
                x[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
            }
            lag_start = l1;
            record(n + 1, &x);
        }
    }
    if !x.iter().all(|v| v.is_finite()) {
        return Err(Error::NonFinite("continuous state"));
    }
    Ok(ContinuousTrajectory { dt, samples })
}

/// Holonomy check on a closed shape path.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StokesReport {
    /// `z(T) - z(0)`
    pub phase: f64,
    /// `∮ s dy = ∫ s u dt`, trapezoidal quadrature
    pub line_integral: f64,
    /// Shoelace area of the sampled `(y, s)` loop, `y` horizontal
    pub area: f64,
    /// `|phase + line_integral|`
    pub residual: f64,
}

/// Relative closure tolerance for [`stokes_check`].
pub const CLOSURE_REL_TOL: f64 = 1e-6;

/// Compares the phase with `-∮ s dy`, which is what `dz/dt = -s u` implies.
pub fn stokes_check(traj: &ContinuousTrajectory) -> Result<StokesReport> {
    let (first, last) = match (traj.samples.first(), traj.samples.last()) {
        (Some(a), Some(b)) => (a, b),
        _ => return Err(Error::EmptyTrajectory),
    };
    let range = |f: fn(&ContinuousSample) -> f64| {
        let (lo, hi) = traj
            .samples
            .iter()
            .map(f)
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
                (lo.min(v), hi.max(v))
            });
        hi - lo
    };
    let extent = range(|p| p.y).max(range(|p| p.s));
    let (gap_y, gap_s) = (last.y - first.y, last.s - first.s);
    let tol = CLOSURE_REL_TOL * extent;
    if gap_y.abs() > tol || gap_s.abs() > tol {
        return Err(Error::OpenPath { gap_y, gap_s });
    }
    let power: Vec<f64> = traj.samples.iter().map(|p| p.s * p.u).collect();
    let line_integral = geometry::trapezoid(&power, traj.dt);
    let path: Vec<(f64, f64)> = traj.samples.iter().map(|p| (p.y, p.s)).collect();
    let area = geometry::signed_area(&path);
    let phase = traj.phase();
    Ok(StokesReport {
        phase,
        line_integral,
        area,
        residual: (phase + line_integral).abs(),
    })
}

/// Cash change over one trapezoid cycle of the spread model without delay.
pub fn spread_cycle_loss(model: &ContinuousModel, input: &InputSignal, dt: f64) -> Result<f64> {
    if model.variant != ModelVariant::Spread {
        return Err(Error::Precondition(
            "spread_cycle_loss needs the Spread variant",
        ));
    }
    if !matches!(input, InputSignal::TrapezoidCycle { .. }) {
        return Err(Error::Precondition(
            "spread_cycle_loss needs a trapezoid cycle",
        ));
    }
    Ok(integrate(model, input, dt, input.period())?.phase())
}

/// Cash change of the delayed model over `cycles` steady-state periods.
///
/// The run lasts `tau + cycles * period`; the transient `[0, tau)`, during
/// which the delayed input is still zero, is excluded.
pub fn steady_state_window(
    model: &ContinuousModel,
    input: &InputSignal,
    dt: f64,
    cycles: usize,
) -> Result<ContinuousTrajectory> {
    if !model.variant.is_delayed() {
        return Err(Error::Precondition(
            "steady-state window needs a delayed variant",
        ));
    }
    let period = input.period();
    steps_in("period", period, dt)?;
    let start = model.tau;
    let end = start + cycles as f64 * period;
    let steps = steps_in("tau", start, dt)? + cycles * steps_in("period", period, dt)?;
    let traj = integrate(model, input, dt, steps as f64 * dt)?;
    traj.window(start, end)
}

/// Steady-state cash change of the delayed spread model over `cycles` periods.
pub fn delayed_spread_phase(
    model: &ContinuousModel,
    input: &InputSignal,
    dt: f64,
    cycles: usize,
) -> Result<f64> {
    if model.variant != ModelVariant::DelayedSpread {
        return Err(Error::Precondition(
            "delayed_spread_phase needs the DelayedSpread variant",
        ));
    }
    Ok(steady_state_window(model, input, dt, cycles)?.phase())
}
