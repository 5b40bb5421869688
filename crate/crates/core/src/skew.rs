//! Orbits of the skew product: forward iteration along a symbol word,
//! backward iteration along a past, and pullback images.
//!
//! The skew product pairs the base shift with the fiber maps: over the
//! symbol at time `k` the state moves by that map. A forward orbit applies
//! the symbols of a word in index order; a backward orbit runs the
//! inverses along a past window `[-n, -1]`; a pullback image composes
//! `f_{w(-1)} . f_{w(-2)} ... f_{w(-n)}` applied to a seed point, i.e.
//! starts at the deep end of the past and flows forward to time 0.

use crate::base::{SeededSampler, Symbol, SymbolWindow};
use crate::error::{Error, Result};
use crate::fiber::{clamp_open, PLFamily};

/// Fully materialised orbit segment.
///
/// `states` always has one more entry than `branches`; `log_derivs[k]` is
/// the log-slope of the step-`k` map at its pre-image point (the point of
/// `states` from which the forward step departs).
#[derive(Clone, Debug, PartialEq)]
pub struct OrbitTrace {
    pub states: Vec<f64>,
    pub branches: Vec<Symbol>,
    pub log_derivs: Vec<f64>,
    /// Clamp-guard activations while generating the orbit; the unclamped
    /// constructors in this module always report 0.
    pub clamp_count: usize,
}

/// Running totals of a forward orbit, for long runs that should not be
/// materialised.
#[derive(Clone, Copy, Debug)]
pub struct OrbitSummary {
    /// State after the last step.
    pub endpoint: f64,
    pub steps: usize,
    /// Sum of per-step log-slopes at the pre-image points.
    pub sum_log_deriv: f64,
    /// Sum of their squares.
    pub sumsq_log_deriv: f64,
    pub clamp_count: usize,
    /// Steps whose pre-image sat exactly on the acting map's kink, where
    /// the slope is convention- rather than dynamics-determined.
    pub breakpoint_hits: usize,
    /// Post-step states in (0, 1/2].
    pub visits_left: usize,
    /// Post-step states in [1/2, 1); a state of exactly 1/2 counts for both
    /// sides.
    pub visits_right: usize,
}

fn require_state(what: &'static str, x: f64) -> Result<()> {
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

fn require_past(past: &SymbolWindow) -> Result<()> {
    if past.is_empty() || past.end() == 0 {
        Ok(())
    } else {
        Err(Error::WindowMisIndexed { end: past.end() })
    }
}

/// Forward orbit of `x0` under the symbols of `word`, in index order.
///
/// No clamping is applied: the endpoints 0 and 1 are genuine fixed points
/// and stay put.
pub fn forward_orbit(fam: &PLFamily, word: &SymbolWindow, x0: f64) -> Result<OrbitTrace> {
    require_state("initial state x0", x0)?;
    let n = word.len();
    let mut states = Vec::with_capacity(n + 1);
    let mut log_derivs = Vec::with_capacity(n);
    states.push(x0);
    let mut x = x0;
    for &s in word.symbols() {
        log_derivs.push(fam.log_deriv_raw(s, x));
        x = fam.apply_raw(s, x);
        states.push(x);
    }
    Ok(OrbitTrace {
        states,
        branches: word.symbols().to_vec(),
        log_derivs,
        clamp_count: 0,
    })
}

/// Backward orbit of `x0` along a past window covering `[-n, -1]`.
///
/// `states[k]` is the point at time `-k`, so the list reads
/// `x_0, x_{-1}, ..., x_{-n}` with `x_{-k} = f_{w(-k)}^{-1}(x_{-k+1})`.
/// `branches[k-1]` is the symbol `w(-k)` consumed by that step and
/// `log_derivs[k-1]` the forward log-slope at the newly found pre-image.
pub fn backward_orbit(fam: &PLFamily, past: &SymbolWindow, x0: f64) -> Result<OrbitTrace> {
    require_state("initial state x0", x0)?;
    require_past(past)?;
    let n = past.len();
    let mut states = Vec::with_capacity(n + 1);
    let mut branches = Vec::with_capacity(n);
    let mut log_derivs = Vec::with_capacity(n);
    states.push(x0);
    let mut x = x0;
    for k in 1..=n {
        let s = past.get(-(k as i64)).expect("index covered by past window");
        x = fam.apply_inverse_raw(s, x);
        branches.push(s);
        log_derivs.push(fam.log_deriv_raw(s, x));
        states.push(x);
    }
    Ok(OrbitTrace {
        states,
        branches,
        log_derivs,
        clamp_count: 0,
    })
}

/// Image of `y` under the composition `f_{w(-1)} . ... . f_{w(-n)}` read
/// off a past window covering `[-n, -1]`: the deepest symbol acts first.
pub fn pullback_point(fam: &PLFamily, past: &SymbolWindow, y: f64) -> Result<f64> {
    require_state("seed point y", y)?;
    require_past(past)?;
    let mut x = y;
    for k in past.offset()..past.end() {
        let s = past.get(k).expect("index covered by past window");
        x = fam.apply_raw(s, x);
    }
    Ok(x)
}

/// The depth-`n` pullback of the reference point `1/m`: the past is
/// truncated to its last `n` symbols before composing.
pub fn phi_nm(fam: &PLFamily, past: &SymbolWindow, n: usize, m: u64) -> Result<f64> {
    if m == 0 {
        return Err(Error::ZeroM);
    }
    let truncated = past.slice(-(n as i64), 0)?;
    pullback_point(fam, &truncated, 1.0 / m as f64)
}

/// Streams a forward orbit of `n` sampler-driven steps, keeping running
/// totals only.
///
/// Unlike [`forward_orbit`] this guards the open interval: the start point
/// and every post-step state are clamped into
/// [`MIN_OPEN`](crate::fiber::MIN_OPEN)`..=`[`MAX_OPEN`](crate::fiber::MAX_OPEN),
/// and activations are counted.
pub fn forward_summary(
    fam: &PLFamily,
    sampler: &mut SeededSampler,
    x0: f64,
    n: usize,
) -> Result<OrbitSummary> {
    require_state("initial state x0", x0)?;
    let (mut x, clamped) = clamp_open(x0);
    let mut summary = OrbitSummary {
        endpoint: x,
        steps: n,
        sum_log_deriv: 0.0,
        sumsq_log_deriv: 0.0,
        clamp_count: clamped as usize,
        breakpoint_hits: 0,
        visits_left: 0,
        visits_right: 0,
    };
    for _ in 0..n {
        let s = sampler.sample_symbol();
        if fam.is_at_breakpoint(s, x) {
            summary.breakpoint_hits += 1;
        }
        let ld = fam.log_deriv_raw(s, x);
        summary.sum_log_deriv += ld;
        summary.sumsq_log_deriv += ld * ld;
        let (next, clamped) = clamp_open(fam.apply_raw(s, x));
        summary.clamp_count += clamped as usize;
        x = next;
        if x <= 0.5 {
            summary.visits_left += 1;
        }
        if x >= 0.5 {
            summary.visits_right += 1;
        }
    }
    summary.endpoint = x;
    Ok(summary)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn quarter() -> PLFamily {
        PLFamily::new(0.25).unwrap()
    }

    #[test]
    fn empty_word_returns_start_only() {
        let f = quarter();
        let trace = forward_orbit(&f, &SymbolWindow::empty(), 0.3).unwrap();
        assert_eq!(trace.states, vec![0.3]);
        assert!(trace.branches.is_empty());
        assert!(trace.log_derivs.is_empty());
        assert_eq!(trace.clamp_count, 0);
    }

    #[test]
    fn two_step_orbit_values() {
        let f = quarter();
        let word = SymbolWindow::from_bits(0, &[0, 1]).unwrap();
        let trace = forward_orbit(&f, &word, 0.3).unwrap();
        assert_eq!(
            trace.states,
            vec![0.3, 0.19999999999999998, 0.39999999999999997]
        );
        assert_eq!(trace.log_derivs, vec![f.a().ln(), f.b().ln()]);
        assert_eq!(trace.branches.len(), 2);
    }

    #[test]
    fn zero_is_fixed() {
        let f = quarter();
        let mut sampler = SeededSampler::new(11);
        let word = sampler.sample_window(0, 50);
        let trace = forward_orbit(&f, &word, 0.0).unwrap();
        assert!(trace.states.iter().all(|&x| x == 0.0));
        let trace = forward_orbit(&f, &word, 1.0).unwrap();
        assert!(trace.states.iter().all(|&x| x == 1.0));
    }

    #[test]
    fn orbit_rejects_bad_start() {
        let f = quarter();
        assert!(forward_orbit(&f, &SymbolWindow::empty(), 1.5).is_err());
        assert!(forward_orbit(&f, &SymbolWindow::empty(), f64::NAN).is_err());
        assert!(backward_orbit(&f, &SymbolWindow::empty(), -0.1).is_err());
    }

    #[test]
    fn backward_orbit_shape_and_indexing() {
        let f = quarter();
        // Past [-2, -1] = (w(-2), w(-1)) = (1, 0).
        let past = SymbolWindow::from_bits(-2, &[1, 0]).unwrap();
        let trace = backward_orbit(&f, &past, 0.5).unwrap();
        // First step inverts w(-1) = 0: f0^{-1}(0.5) = 0.75.
        // Second inverts w(-2) = 1: f1^{-1}(0.75) = 1 - 0.25/a = 0.625.
        assert_eq!(trace.states, vec![0.5, 0.75, 0.625]);
        assert_eq!(trace.branches, vec![Symbol::Zero, Symbol::One]);
        // Forward slopes at the pre-images: f0 at 0.75 (kink, left slope a),
        // f1 at 0.625 (right piece, slope a).
        assert_eq!(trace.log_derivs, vec![f.a().ln(), f.a().ln()]);
    }

    #[test]
    fn backward_orbit_requires_past_ending_at_minus_one() {
        let f = quarter();
        let not_past = SymbolWindow::from_bits(-3, &[1, 0]).unwrap();
        assert_eq!(
            backward_orbit(&f, &not_past, 0.5).unwrap_err(),
            Error::WindowMisIndexed { end: -1 }
        );
        assert!(pullback_point(&f, &not_past, 0.5).is_err());
        let future = SymbolWindow::from_bits(0, &[1]).unwrap();
        assert!(backward_orbit(&f, &future, 0.5).is_err());
    }

    #[test]
    fn backward_then_pullback_roundtrips() {
        // x_{-n} found by the backward orbit is mapped back onto x_0 by the
        // pullback composition along the same past. Rounding at depth k is
        // amplified by the composed forward derivative, so the attainable
        // precision scales with exp(sum of forward log-slopes).
        for (ci, c) in [0.1, 0.25, 0.4].into_iter().enumerate() {
            let f = PLFamily::new(c).unwrap();
            let mut sampler = SeededSampler::new(1000 + ci as u64);
            for _ in 0..3400 {
                let past = sampler.sample_window(-32, 32);
                let x0 = sampler.uniform_unit();
                let trace = backward_orbit(&f, &past, x0).unwrap();
                let back = pullback_point(&f, &past, *trace.states.last().unwrap()).unwrap();
                // Rounding injected at depth k rides the partial forward
                // derivative from -k back to 0, so sum those partial
                // products rather than using the total alone.
                let mut amplification = 0.0f64;
                let mut prefix = 0.0f64;
                for &ld in &trace.log_derivs {
                    prefix += ld;
                    amplification += prefix.exp();
                }
                let tol = 16.0 * f64::EPSILON * (1.0 + amplification);
                assert!(
                    (back - x0).abs() <= tol,
                    "roundtrip error {} exceeds {tol} (x0={x0}, c={c})",
                    (back - x0).abs()
                );
            }
        }
    }

    #[test]
    fn pullback_applies_deepest_symbol_first() {
        let f = quarter();
        // Past [-2, -1] = (w(-2), w(-1)) = (0, 1): image is f1(f0(y)).
        // On the shared right piece the two maps commute (both rescale
        // 1 - x), so the probe must move across pieces: y = 0.6 does.
        let past = SymbolWindow::from_bits(-2, &[0, 1]).unwrap();
        let y = 0.6;
        let expected = f
            .apply(Symbol::One, f.apply(Symbol::Zero, y).unwrap())
            .unwrap();
        assert_eq!(pullback_point(&f, &past, y).unwrap(), expected);
        // The reversed past gives f0(f1(y)), which differs.
        let reversed = SymbolWindow::from_bits(-2, &[1, 0]).unwrap();
        assert_ne!(
            pullback_point(&f, &reversed, y).unwrap(),
            pullback_point(&f, &past, y).unwrap()
        );
    }

    #[test]
    fn pullback_of_empty_past_is_identity() {
        let f = quarter();
        assert_eq!(pullback_point(&f, &SymbolWindow::empty(), 0.37).unwrap(), 0.37);
    }

    #[test]
    fn reference_point_pullbacks() {
        let f = quarter();
        let past = SymbolWindow::from_bits(-3, &[0, 0, 0]).unwrap();
        // Depth 0 ignores the past entirely.
        assert_eq!(phi_nm(&f, &past, 0, 2).unwrap(), 0.5);
        // Three slope-a steps from 1/2: (2/3)^3 / 2 = 4/27.
        let v = phi_nm(&f, &past, 3, 2).unwrap();
        assert_eq!(v, 0.14814814814814814);
        assert_abs_diff_eq!(v, 4.0 / 27.0, epsilon = 1e-16);
        // Depth beyond the window is refused, as is m = 0.
        assert!(phi_nm(&f, &past, 4, 2).is_err());
        assert_eq!(phi_nm(&f, &past, 3, 0).unwrap_err(), Error::ZeroM);
    }

    #[test]
    fn summary_matches_materialised_orbit() {
        let f = PLFamily::new(0.3).unwrap();
        let mut s1 = SeededSampler::new(5);
        let mut s2 = SeededSampler::new(5);
        let n = 1000;
        let word = s1.sample_window(0, n);
        let trace = forward_orbit(&f, &word, 0.37).unwrap();
        let summary = forward_summary(&f, &mut s2, 0.37, n).unwrap();
        assert_eq!(summary.endpoint, *trace.states.last().unwrap());
        assert_eq!(summary.steps, n);
        assert_eq!(summary.clamp_count, 0);
        let sum: f64 = trace.log_derivs.iter().sum();
        assert_abs_diff_eq!(summary.sum_log_deriv, sum, epsilon = 1e-12);
        let left = trace.states[1..].iter().filter(|&&x| x <= 0.5).count();
        let right = trace.states[1..].iter().filter(|&&x| x >= 0.5).count();
        assert_eq!(summary.visits_left, left);
        assert_eq!(summary.visits_right, right);
    }

    #[test]
    fn orbits_visit_both_halves() {
        // From a start point deep in the left half, every seeded run pays
        // at least 1000 visits to each half within 10^5 steps.
        let f = quarter();
        for seed in 0..100u64 {
            let mut sampler = SeededSampler::new(seed);
            let summary = forward_summary(&f, &mut sampler, 1e-3, 100_000).unwrap();
            assert!(
                summary.visits_left >= 1000 && summary.visits_right >= 1000,
                "seed {seed}: visits {} / {}",
                summary.visits_left,
                summary.visits_right
            );
        }
    }
}
