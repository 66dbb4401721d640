//! Domain types shared by every engine: the trader state, the price impact
//! abstraction and the market parameters.

use crate::error::{check_non_negative, check_positive, Error, Result};

/// Trader state `(y, s, z)`: inventory in shares, stock quote and cash balance.
///
/// Quotes are allowed to become negative; the linear impact model has no floor.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SystemState {
    pub inventory: f64,
    pub quote: f64,
    pub cash: f64,
}

impl SystemState {
    pub fn new(inventory: f64, quote: f64, cash: f64) -> Result<Self> {
        let state = Self {
            inventory,
            quote,
            cash,
        };
        if state.is_finite() {
            Ok(state)
        } else {
            Err(Error::NonFinite("system state"))
        }
    }

    /// Flat inventory and zero cash at the given quote.
    pub fn at_quote(quote: f64) -> Self {
        Self {
            inventory: 0.0,
            quote,
            cash: 0.0,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.inventory.is_finite() && self.quote.is_finite() && self.cash.is_finite()
    }
}

/// Quote displacement caused by executing a signed order.
///
/// Implementations must be odd (`impact(-u) == -impact(u)`) and sign
/// preserving (`u > 0` moves the quote up, `u < 0` moves it down). Oddness is
/// what keeps the quote unchanged after a closed trading cycle.
///
/// Any `Fn(f64) -> f64` closure can be used as an impact function.
pub trait PriceImpact {
    fn impact(&self, u: f64) -> f64;
}

impl<F> PriceImpact for F
where
    F: Fn(f64) -> f64,
{
    fn impact(&self, u: f64) -> f64 {
        self(u)
    }
}

/// Built-in impact functions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ImpactFunction {
    /// `r * u`
    Linear { r: f64 },
    /// `sign(u) * r * |u|^gamma`
    SignedPower { r: f64, gamma: f64 },
}

impl ImpactFunction {
    pub fn linear(r: f64) -> Result<Self> {
        check_non_negative("r", r)?;
        Ok(Self::Linear { r })
    }

    pub fn signed_power(r: f64, gamma: f64) -> Result<Self> {
        check_non_negative("r", r)?;
        check_positive("gamma", gamma)?;
        Ok(Self::SignedPower { r, gamma })
    }

    /// The impact coefficient `r`.
    pub fn coefficient(&self) -> f64 {
        match *self {
            Self::Linear { r } | Self::SignedPower { r, .. } => r,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            Self::Linear { r } => check_non_negative("r", r),
            Self::SignedPower { r, gamma } => {
                check_non_negative("r", r)?;
                check_positive("gamma", gamma)
            }
        }
    }
}

impl PriceImpact for ImpactFunction {
    fn impact(&self, u: f64) -> f64 {
        match *self {
            Self::Linear { r } => r * u,
            Self::SignedPower { r, gamma } => {
                if u == 0.0 {
                    return 0.0;
                }
                // magnitude first, then sign, so that oddness is exact
                let magnitude = r * libm::pow(u.abs(), gamma);
                if u > 0.0 {
                    magnitude
                } else {
                    -magnitude
                }
            }
        }
    }
}

/// Evaluates an impact function.
pub fn impact_eval<I: PriceImpact + ?Sized>(f: &I, u: f64) -> f64 {
    f.impact(u)
}

/// Price at which an order of signed size `u` executes when the quote `s` is
/// the midprice of a constant bid-ask spread: the ask `s + q/2` for buys, the
/// bid `s - q/2` for sells.
pub fn execution_price(s: f64, u: f64, spread: f64) -> Result<f64> {
    if u > 0.0 {
        Ok(s + 0.5 * spread)
    } else if u < 0.0 {
        Ok(s - 0.5 * spread)
    } else {
        Err(Error::NullTrade)
    }
}

/// Market parameters: impact function, bid-ask spread `q`, per-trade fee `c`,
/// drift standard deviation per tick and the initial quote.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MarketParams<I = ImpactFunction> {
    pub impact: I,
    pub spread: f64,
    pub fee: f64,
    pub sigma: f64,
    pub initial_quote: f64,
}

impl<I> MarketParams<I> {
    pub fn new(impact: I, spread: f64, fee: f64, sigma: f64, initial_quote: f64) -> Result<Self> {
        let params = Self {
            impact,
            spread,
            fee,
            sigma,
            initial_quote,
        };
        params.validate_scalars()?;
        Ok(params)
    }

    /// Frictionless, drift-free market with the given impact.
    pub fn frictionless(impact: I, initial_quote: f64) -> Self {
        Self {
            impact,
            spread: 0.0,
            fee: 0.0,
            sigma: 0.0,
            initial_quote,
        }
    }

    pub fn validate_scalars(&self) -> Result<()> {
        check_non_negative("q", self.spread)?;
        check_non_negative("c", self.fee)?;
        check_non_negative("sigma", self.sigma)?;
        if !self.initial_quote.is_finite() {
            return Err(Error::InvalidParameter {
                name: "s0",
                value: self.initial_quote,
            });
        }
        Ok(())
    }

    pub fn initial_state(&self) -> SystemState {
        SystemState::at_quote(self.initial_quote)
    }
}

impl MarketParams<ImpactFunction> {
    pub fn validate(&self) -> Result<()> {
        self.impact.validate()?;
        self.validate_scalars()
    }
}

/// A single order: signed quantity `u` executed at `tick`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TradeOrder {
    pub tick: usize,
    pub quantity: f64,
}

/// Expands an order list into a dense per-tick input sequence.
///
/// Ticks must be strictly increasing and inside the horizon.
pub fn orders_to_input(orders: &[TradeOrder], horizon: usize) -> Result<alloc::vec::Vec<f64>> {
    let mut input = alloc::vec![0.0; horizon];
    let mut previous: Option<usize> = None;
    for order in orders {
        if let Some(prev) = previous {
            if order.tick <= prev {
                return Err(Error::UnorderedTicks {
                    tick: order.tick,
                    previous: prev,
                });
            }
        }
        if order.tick >= horizon {
            return Err(Error::TickOutOfRange {
                tick: order.tick,
                horizon,
            });
        }
        if !order.quantity.is_finite() {
            return Err(Error::NonFinite("order quantity"));
        }
        input[order.tick] = order.quantity;
        previous = Some(order.tick);
    }
    Ok(input)
}

/// Non-zero entries of an input sequence as orders.
pub fn input_to_orders(input: &[f64]) -> alloc::vec::Vec<TradeOrder> {
    input
        .iter()
        .enumerate()
        .filter(|(_, &u)| u != 0.0)
        .map(|(tick, &quantity)| TradeOrder { tick, quantity })
        .collect()
}
