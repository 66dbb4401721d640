//! Geometric phases of cyclic trading under price impact.
//!
//! A trader who buys and later sells the same quantity traces a closed,
//! zero-area loop in `(inventory, quote)` space, yet in discrete time the
//! cash balance still moves by `impact(k) * k - q * k - 2c`. This crate holds
//! the pure models:
//!
//! * [`market`]: state, impact functions and market parameters
//! * [`discrete`]: the deterministic tick engine and its closed forms
//! * [`stochastic`]: drifted quotes, random schedules and Monte Carlo
//! * [`frontrun`]: a classical trader front-run by a fast one
//! * [`continuous`]: the ODE/DDE counterpart and its holonomy check
//!
//! The crate is `no_std` and only needs `alloc`.
#![no_std]

extern crate alloc;

pub mod continuous;
pub mod discrete;
pub mod error;
pub mod frontrun;
pub mod geometry;
pub mod market;
pub mod stochastic;

pub use discrete::{CycleDirection, CycleSpec, Trajectory};
pub use error::{Error, Result};
pub use market::{ImpactFunction, MarketParams, PriceImpact, SystemState, TradeOrder};
