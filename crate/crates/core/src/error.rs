use thiserror::Error;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}` = {value}")]
    InvalidParameter { name: &'static str, value: f64 },

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("a null trade (u = 0) has no execution price")]
    NullTrade,

    #[error("length mismatch for {what}: expected {expected}, found {found}")]
    LengthMismatch {
        what: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("cycle must satisfy t_b < t_s and k > 0 (t_b = {t_b}, t_s = {t_s}, k = {k})")]
    InvalidCycle { t_b: usize, t_s: usize, k: f64 },

    #[error("cycle [{t_b}, {t_s}] overlaps cycle [{other_b}, {other_s}]")]
    OverlappingCycles {
        t_b: usize,
        t_s: usize,
        other_b: usize,
        other_s: usize,
    },

    #[error("tick {tick} is outside the horizon of {horizon} ticks")]
    TickOutOfRange { tick: usize, horizon: usize },

    #[error("order ticks must be strictly increasing (tick {tick} follows {previous})")]
    UnorderedTicks { tick: usize, previous: usize },

    #[error("shape path is not closed: endpoint gap dy = {gap_y:e}, ds = {gap_s:e}")]
    OpenPath { gap_y: f64, gap_s: f64 },

    #[error("{quantity} = {value} is not a multiple of the step {dt}")]
    NotStepMultiple {
        quantity: &'static str,
        value: f64,
        dt: f64,
    },

    #[error("front-running schedule must satisfy 0 <= t_hb < t_cb < t_hs < t_cs < horizon: {0}")]
    FrontrunOrdering(&'static str),

    #[error("empty trajectory")]
    EmptyTrajectory,

    #[error("precondition violated: {0}")]
    Precondition(&'static str),
}

impl Error {
    /// True for errors caused by a bad parameter value rather than a
    /// numerical or structural precondition.
    pub fn is_parameter_error(&self) -> bool {
        matches!(self, Error::InvalidParameter { .. })
    }
}

pub(crate) fn check_non_negative(name: &'static str, value: f64) -> Result<()> {
    if value.is_finite() && value >= 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter { name, value })
    }
}

pub(crate) fn check_positive(name: &'static str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter { name, value })
    }
}
