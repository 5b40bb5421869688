//! Error type shared by every module of the crate.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("parameter c must lie strictly inside (0, 1/2), got {0}")]
    InvalidC(f64),

    #[error("probability p0 must lie strictly inside (0, 1), got {0}")]
    InvalidP0(f64),

    #[error("{what} must lie in {range}, got {value}")]
    OutOfDomain {
        what: &'static str,
        range: &'static str,
        value: f64,
    },

    #[error("symbol window [{have_lo}, {have_hi}) does not cover required indices [{need_lo}, {need_hi})")]
    WindowTooShort {
        need_lo: i64,
        need_hi: i64,
        have_lo: i64,
        have_hi: i64,
    },

    #[error("past window must end at index -1 (cover [-n, -1]), but it ends at {end} exclusive")]
    WindowMisIndexed { end: i64 },

    #[error("windows are not contiguous: past ends at {past_end}, future starts at {future_start}")]
    WindowsNotContiguous { past_end: i64, future_start: i64 },

    #[error("symbol value {0} is not 0 or 1")]
    BadSymbol(u8),

    #[error("pair ({x}, {y}) straddles the linear pieces of f{symbol}; split it at the piece boundaries first")]
    PairStraddlesPieces { symbol: u8, x: f64, y: f64 },

    #[error("interval [{lo}, {hi}] straddles 1/2; split it at 1/2 first")]
    IntervalStraddlesHalf { lo: f64, hi: f64 },

    #[error("interval [{lo}, {hi}] is not an ordered subinterval of [0, 1]")]
    BadInterval { lo: f64, hi: f64 },

    #[error("empty sample")]
    EmptySample,

    #[error("m must be at least 1")]
    ZeroM,

    #[error("pullback estimate did not converge, which this operation requires")]
    Unconverged,

    #[error("{0}")]
    InvalidArgument(String),
}
