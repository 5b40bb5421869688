//! Finite windows of i.i.d. fair-coin symbols and the seeded sampler that
//! produces them.
//!
//! An infinite symbol sequence is only ever observed through the finitely
//! many coordinates an experiment touches, so we represent exactly that: a
//! finite block of symbols together with the absolute index of its first
//! entry. Negative indices are the "past" of the sequence, nonnegative
//! indices the "future"; a sequence split into past and future is a pair of
//! windows covering `[-n, -1]` and `[0, m-1]`.
//!
//! All randomness flows from a single 64-bit master seed. Ensemble members
//! derive child samplers from `(seed, task index)`, so results never depend
//! on scheduling or thread count.

use crate::error::{Error, Result};
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// One base symbol: selects which of the two fiber maps acts at a time step.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Symbol {
    Zero,
    One,
}

impl Symbol {
    /// Converts a `0`/`1` bit into a symbol.
    pub fn from_bit(bit: u8) -> Result<Symbol> {
        match bit {
            0 => Ok(Symbol::Zero),
            1 => Ok(Symbol::One),
            other => Err(Error::BadSymbol(other)),
        }
    }

    pub fn as_bit(self) -> u8 {
        match self {
            Symbol::Zero => 0,
            Symbol::One => 1,
        }
    }

    pub fn flip(self) -> Symbol {
        match self {
            Symbol::Zero => Symbol::One,
            Symbol::One => Symbol::Zero,
        }
    }
}

impl std::fmt::Display for Symbol {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.as_bit())
    }
}

/// A finite block of symbols starting at an absolute index (possibly negative).
///
/// The symbol at absolute index `k` is defined iff `offset <= k < offset + len`.
/// Windows are immutable values; shifting relabels indices without copying
/// semantics from one coordinate to another.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymbolWindow {
    offset: i64,
    symbols: Vec<Symbol>,
}

impl SymbolWindow {
    pub fn new(offset: i64, symbols: Vec<Symbol>) -> SymbolWindow {
        SymbolWindow { offset, symbols }
    }

    /// Builds a window from raw `0`/`1` bits.
    pub fn from_bits(offset: i64, bits: &[u8]) -> Result<SymbolWindow> {
        let symbols = bits
            .iter()
            .map(|&b| Symbol::from_bit(b))
            .collect::<Result<Vec<_>>>()?;
        Ok(SymbolWindow { offset, symbols })
    }

    /// The empty window (offset 0, no symbols).
    pub fn empty() -> SymbolWindow {
        SymbolWindow {
            offset: 0,
            symbols: Vec::new(),
        }
    }

    /// Absolute index of the first symbol.
    pub fn offset(&self) -> i64 {
        self.offset
    }

    /// One past the absolute index of the last symbol.
    pub fn end(&self) -> i64 {
        self.offset + self.symbols.len() as i64
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    /// Symbol at absolute index `k`, if covered.
    pub fn get(&self, k: i64) -> Option<Symbol> {
        if k < self.offset {
            return None;
        }
        self.symbols.get((k - self.offset) as usize).copied()
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.symbols
    }

    /// Whether the window covers every index of `[lo, hi)`.
    pub fn covers(&self, lo: i64, hi: i64) -> bool {
        lo >= hi || (self.offset <= lo && hi <= self.end())
    }

    pub(crate) fn require_cover(&self, lo: i64, hi: i64) -> Result<()> {
        if self.covers(lo, hi) {
            Ok(())
        } else {
            Err(Error::WindowTooShort {
                need_lo: lo,
                need_hi: hi,
                have_lo: self.offset,
                have_hi: self.end(),
            })
        }
    }

    /// Reads the window through the shift: the result describes the same
    /// symbols as seen from the sequence shifted `k` steps, so the result's
    /// symbol at absolute index `j` equals this window's symbol at `j + k`,
    /// and the offset drops by `k`.
    pub fn shift(&self, k: i64) -> SymbolWindow {
        SymbolWindow {
            offset: self.offset - k,
            symbols: self.symbols.clone(),
        }
    }

    /// Joins a past block and a future block into one contiguous window.
    ///
    /// The blocks must be adjacent (`past.end() == future.offset()`); a gap
    /// or overlap signals a malformed past/future split. An empty side is
    /// accepted regardless of its nominal offset.
    pub fn concat(past: &SymbolWindow, future: &SymbolWindow) -> Result<SymbolWindow> {
        if past.is_empty() {
            return Ok(future.clone());
        }
        if future.is_empty() {
            return Ok(past.clone());
        }
        if past.end() != future.offset {
            return Err(Error::WindowsNotContiguous {
                past_end: past.end(),
                future_start: future.offset,
            });
        }
        let mut symbols = Vec::with_capacity(past.len() + future.len());
        symbols.extend_from_slice(&past.symbols);
        symbols.extend_from_slice(&future.symbols);
        Ok(SymbolWindow {
            offset: past.offset,
            symbols,
        })
    }

    /// The sub-window covering absolute indices `[lo, hi)`.
    pub fn slice(&self, lo: i64, hi: i64) -> Result<SymbolWindow> {
        self.require_cover(lo, hi)?;
        if lo >= hi {
            return Ok(SymbolWindow {
                offset: lo,
                symbols: Vec::new(),
            });
        }
        let start = (lo - self.offset) as usize;
        let stop = (hi - self.offset) as usize;
        Ok(SymbolWindow {
            offset: lo,
            symbols: self.symbols[start..stop].to_vec(),
        })
    }
}

/// SplitMix64 mixing step, used to derive child seeds.
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Reproducible source of i.i.d. symbols and uniform variates.
///
/// The generator is ChaCha8 (`rand_chacha`), seeded from a 64-bit value.
/// `derive(i)` produces an independent child keyed by `(seed, i)` through a
/// SplitMix64 hash chain, so nested derivations are well defined and an
/// ensemble's member `i` always sees the same stream no matter which thread
/// runs it. Identical `(seed, request sequence)` yields identical output on
/// every platform.
#[derive(Clone, Debug)]
pub struct SeededSampler {
    seed: u64,
    p0: f64,
    rng: ChaCha8Rng,
}

impl SeededSampler {
    /// Fair-coin sampler (`p0 = 1/2`).
    pub fn new(seed: u64) -> SeededSampler {
        SeededSampler {
            seed,
            p0: 0.5,
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    /// Sampler with a custom probability of symbol 0.
    pub fn with_p0(seed: u64, p0: f64) -> Result<SeededSampler> {
        if !(p0 > 0.0 && p0 < 1.0) {
            return Err(Error::InvalidP0(p0));
        }
        Ok(SeededSampler {
            seed,
            p0,
            rng: ChaCha8Rng::seed_from_u64(seed),
        })
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn p0(&self) -> f64 {
        self.p0
    }

    /// Independent child sampler keyed by `(seed, index)`; inherits `p0`.
    pub fn derive(&self, index: u64) -> SeededSampler {
        let child_seed = splitmix64(self.seed.wrapping_add(splitmix64(index)));
        SeededSampler {
            seed: child_seed,
            p0: self.p0,
            rng: ChaCha8Rng::seed_from_u64(child_seed),
        }
    }

    /// Uniform variate strictly inside (0, 1).
    ///
    /// Returns midpoints `(k + 1/2) / 2^52` of a dyadic grid; every value is
    /// exactly representable, none equals 0 or 1, and `P(u < 1/2) = 1/2`
    /// exactly.
    pub fn uniform_unit(&mut self) -> f64 {
        const SCALE: f64 = 1.0 / 4_503_599_627_370_496.0; // 2^-52
        ((self.rng.next_u64() >> 12) as f64 + 0.5) * SCALE
    }

    /// Uniform variate in the open interval `(lo, hi)`.
    pub fn uniform_in(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.uniform_unit()
    }

    /// One symbol: `Zero` with probability `p0`.
    pub fn sample_symbol(&mut self) -> Symbol {
        if self.uniform_unit() < self.p0 {
            Symbol::Zero
        } else {
            Symbol::One
        }
    }

    /// A window of `length` i.i.d. symbols starting at `offset`.
    ///
    /// The drawn values do not depend on `offset` (it only labels indices);
    /// the call consumes exactly `length` draws from the stream.
    pub fn sample_window(&mut self, offset: i64, length: usize) -> SymbolWindow {
        let symbols = (0..length).map(|_| self.sample_symbol()).collect();
        SymbolWindow { offset, symbols }
    }
}
