//! The two-parameter family of piecewise-linear interval maps driven by the
//! base symbols.
//!
//! For a shape parameter `c` in (0, 1/2) set `a = 1/(2(1-c))` and
//! `b = 1/(2c)`, so `a < 1 < b` and `1/a + 1/b = 2`. The two fiber maps are
//! increasing homeomorphisms of `[0, 1]` with slopes `{a, b}` and a single
//! interior kink each:
//!
//! * map 0: slope `a` on `[0, 1-c]`, slope `b` on `[1-c, 1]`;
//! * map 1: slope `b` on `[0, c]`, slope `a` on `[c, 1]`.
//!
//! Both send their kink to `1/2`, and map 1 is the mirror image of map 0
//! under `x -> 1 - x`. Derivatives at a kink follow the left-slope
//! convention (the slope of the piece ending there).

use crate::base::Symbol;
use crate::error::{Error, Result};

/// Smallest state value kept by the clamp guard: `2^-74`.
///
/// Iterating the slope-`a` piece of map 0 contracts toward the fixed point
/// at 0 geometrically; long runs in floating point would reach exact 0 (an
/// absorbing artifact) or subnormal territory. Experiments that must stay
/// inside the open interval clamp into `[MIN_OPEN, MAX_OPEN]` and count how
/// often the guard fired.
pub const MIN_OPEN: f64 = f64::from_bits(0x3B50_0000_0000_0000);

/// Largest state value kept by the clamp guard: the predecessor of 1.
///
/// The nominal upper guard `1 - 2^-74` is not representable in `f64` (it
/// rounds to 1), so the guard uses the closest representable value below 1,
/// namely `1 - 2^-53`.
pub const MAX_OPEN: f64 = 1.0 - f64::EPSILON / 2.0;

/// Clamps `x` into `[MIN_OPEN, MAX_OPEN]`; the flag reports whether the
/// guard fired.
pub fn clamp_open(x: f64) -> (f64, bool) {
    if x < MIN_OPEN {
        (MIN_OPEN, true)
    } else if x > MAX_OPEN {
        (MAX_OPEN, true)
    } else {
        (x, false)
    }
}

/// One member of the piecewise-linear family, with derived slopes cached.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PLFamily {
    c: f64,
    a: f64,
    b: f64,
    one_minus_c: f64,
    ln_a: f64,
    ln_b: f64,
}

impl PLFamily {
    /// Builds the family member for `c`, which must lie strictly in (0, 1/2).
    pub fn new(c: f64) -> Result<PLFamily> {
        if !(c > 0.0 && c < 0.5) {
            return Err(Error::InvalidC(c));
        }
        let one_minus_c = 1.0 - c;
        let a = 1.0 / (2.0 * one_minus_c);
        let b = 1.0 / (2.0 * c);
        Ok(PLFamily {
            c,
            a,
            b,
            one_minus_c,
            ln_a: a.ln(),
            ln_b: b.ln(),
        })
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    /// The mild slope `a = 1/(2(1-c)) < 1`.
    pub fn a(&self) -> f64 {
        self.a
    }

    /// The steep slope `b = 1/(2c) > 1`.
    pub fn b(&self) -> f64 {
        self.b
    }

    /// Location of the interior kink of the given map.
    pub fn breakpoint(&self, symbol: Symbol) -> f64 {
        match symbol {
            Symbol::Zero => self.one_minus_c,
            Symbol::One => self.c,
        }
    }

    /// Whether `x` sits exactly on the interior kink of the given map.
    pub fn is_at_breakpoint(&self, symbol: Symbol, x: f64) -> bool {
        x == self.breakpoint(symbol)
    }

    fn require_unit(&self, what: &'static str, x: f64) -> Result<()> {
        if (0.0..=1.0).contains(&x) {
            Ok(())
        } else {
            Err(Error::OutOfDomain {
                what,
                range: "[0, 1]",
                value: x,
            })
        }
    }

    pub(crate) fn apply_raw(&self, symbol: Symbol, x: f64) -> f64 {
        match symbol {
            Symbol::Zero => {
                if x <= self.one_minus_c {
                    self.a * x
                } else {
                    1.0 - self.b * (1.0 - x)
                }
            }
            Symbol::One => {
                if x <= self.c {
                    self.b * x
                } else {
                    1.0 - self.a * (1.0 - x)
                }
            }
        }
    }

    pub(crate) fn apply_inverse_raw(&self, symbol: Symbol, y: f64) -> f64 {
        match symbol {
            Symbol::Zero => {
                if y <= 0.5 {
                    y / self.a
                } else {
                    1.0 - (1.0 - y) / self.b
                }
            }
            Symbol::One => {
                if y <= 0.5 {
                    y / self.b
                } else {
                    1.0 - (1.0 - y) / self.a
                }
            }
        }
    }

    pub(crate) fn log_deriv_raw(&self, symbol: Symbol, x: f64) -> f64 {
        match symbol {
            Symbol::Zero => {
                if x <= self.one_minus_c {
                    self.ln_a
                } else {
                    self.ln_b
                }
            }
            Symbol::One => {
                if x <= self.c {
                    self.ln_b
                } else {
                    self.ln_a
                }
            }
        }
    }

    /// Evaluates the selected map at `x` in `[0, 1]`.
    pub fn apply(&self, symbol: Symbol, x: f64) -> Result<f64> {
        self.require_unit("map argument x", x)?;
        Ok(self.apply_raw(symbol, x))
    }

    /// Evaluates the inverse of the selected map at `y` in `[0, 1]`.
    pub fn apply_inverse(&self, symbol: Symbol, y: f64) -> Result<f64> {
        self.require_unit("inverse argument y", y)?;
        Ok(self.apply_inverse_raw(symbol, y))
    }

    /// Slope of the selected map at `x`, with the left-slope convention at
    /// the kink.
    pub fn derivative(&self, symbol: Symbol, x: f64) -> Result<f64> {
        self.require_unit("derivative argument x", x)?;
        Ok(self.log_deriv_raw(symbol, x).exp())
    }

    /// `|f_1(x) - (1 - f_0(1 - x))|`: deviation from the mirror symmetry
    /// relating the two maps. Identically zero in exact arithmetic.
    pub fn symmetry_defect(&self, x: f64) -> f64 {
        let mirrored = 1.0 - self.apply_raw(Symbol::Zero, 1.0 - x);
        (self.apply_raw(Symbol::One, x) - mirrored).abs()
    }
}
