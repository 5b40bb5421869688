//! Pullback estimation of the attractor graph and the experiments built on
//! it: invariance checking, basin dichotomy, conditional sampling, the
//! vanishing one-sided attractor, and the dense-graph histogram.
//!
//! The graph point `phi(past)` is the common limit of the pullback images
//! of any compact interval strictly inside (0, 1): composing the fiber maps
//! selected by the past symbols, deepest first, squeezes the interval onto
//! a single point for almost every past. The estimator pulls a fixed
//! bracket through ever deeper prefixes (depths doubling, each stage
//! recomputed from scratch) until the bracket's logarithmic width drops
//! below a tolerance. Estimates are deterministic functions of the symbol
//! source, so ensembles keyed by derived seeds are reproducible bit for
//! bit at any thread count.

use crate::base::{SeededSampler, Symbol, SymbolWindow};
use crate::error::{Error, Result};
use crate::fiber::{clamp_open, PLFamily};
use crate::metric::{dist_raw, h_inv, h_raw};
use crate::par::run_indexed;
use crate::stats::ks_statistic;

/// Width of the boundary zones `[0, 1e-6]` and `[1-1e-6, 1]` used for two
/// purposes: a pullback bracket wholly inside one of them is flagged
/// degenerate (the word is collapsing onto an endpoint rather than an
/// interior graph point), and the basin classifier calls a backward orbit
/// for an endpoint once it enters the matching zone.
pub const EDGE_ZONE: f64 = 1e-6;

/// Tuning knobs of the pullback estimator.
#[derive(Clone, Copy, Debug)]
pub struct PhiOptions {
    /// Convergence threshold for the bracket width in the logarithmic
    /// metric.
    pub tol_d: f64,
    /// Deepest prefix the doubling schedule may reach.
    pub max_depth: usize,
    /// Initial bracket; must satisfy `0 < lo < hi < 1`.
    pub bracket: (f64, f64),
}

impl Default for PhiOptions {
    fn default() -> PhiOptions {
        PhiOptions {
            tol_d: 1e-8,
            max_depth: 1 << 20,
            bracket: (1e-6, 1.0 - 1e-6),
        }
    }
}

/// Result of pulling a bracket through a past word.
#[derive(Clone, Debug)]
pub struct PullbackEstimate {
    /// Midpoint of the final bracket in the logarithmic metric; strictly
    /// inside (0, 1).
    pub value: f64,
    pub bracket_lo: f64,
    pub bracket_hi: f64,
    /// Depth of the final stage.
    pub depth: usize,
    /// Logarithmic width of the final bracket.
    pub d_width: f64,
    /// Whether `d_width <= tol_d` was reached.
    pub converged: bool,
    /// Whether the bracket collapsed into a boundary zone — the signature
    /// of a past (like the all-zeros word) whose pullback heads to an
    /// endpoint instead of an interior graph point.
    pub degenerate: bool,
    /// Clamp-guard activations summed over all recomputation stages.
    pub clamp_count: usize,
    /// Every stage visited, for decay diagnostics.
    pub stages: Vec<StageRecord>,
}

/// One doubling stage of a pullback estimation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StageRecord {
    pub depth: usize,
    pub bracket_lo: f64,
    pub bracket_hi: f64,
    /// Logarithmic width of the bracket after this stage.
    pub d_width: f64,
}

/// Shared stage loop: `symbol_at(j)` must yield the symbol at index `-j`
/// and is called exactly once per depth, in increasing order of `j`.
fn estimate_phi_core(
    fam: &PLFamily,
    opts: &PhiOptions,
    max_depth: usize,
    mut symbol_at: impl FnMut(usize) -> Symbol,
) -> Result<PullbackEstimate> {
    let (lo0, hi0) = opts.bracket;
    if !(lo0 > 0.0 && lo0 < hi0 && hi0 < 1.0) {
        return Err(Error::BadInterval { lo: lo0, hi: hi0 });
    }
    if opts.tol_d.is_nan() || opts.tol_d <= 0.0 {
        return Err(Error::InvalidArgument(format!(
            "tolerance tol_d must be positive, got {}",
            opts.tol_d
        )));
    }
    let mut past: Vec<Symbol> = Vec::new();
    let mut clamp_count = 0usize;
    let mut stages: Vec<StageRecord> = Vec::new();
    let mut depth = max_depth.min(1);
    let (mut converged, mut degenerate) = (false, false);
    let (mut lo, mut hi);
    loop {
        while past.len() < depth {
            let j = past.len() + 1;
            past.push(symbol_at(j));
        }
        lo = lo0;
        hi = hi0;
        for j in (1..=depth).rev() {
            let s = past[j - 1];
            let (l, cl) = clamp_open(fam.apply_raw(s, lo));
            let (h, ch) = clamp_open(fam.apply_raw(s, hi));
            clamp_count += cl as usize + ch as usize;
            lo = l;
            hi = h;
        }
        let d_width = dist_raw(lo, hi);
        stages.push(StageRecord {
            depth,
            bracket_lo: lo,
            bracket_hi: hi,
            d_width,
        });
        if hi <= EDGE_ZONE || lo >= 1.0 - EDGE_ZONE {
            degenerate = true;
            break;
        }
        if d_width <= opts.tol_d {
            converged = true;
            break;
        }
        if depth >= max_depth {
            break;
        }
        depth = depth.saturating_mul(2).min(max_depth);
    }
    let d_width = stages.last().expect("at least one stage ran").d_width;
    Ok(PullbackEstimate {
        value: h_inv(0.5 * (h_raw(lo) + h_raw(hi))),
        bracket_lo: lo,
        bracket_hi: hi,
        depth,
        d_width,
        converged,
        degenerate,
        clamp_count,
        stages,
    })
}

/// Estimates the graph point of a past drawn on demand from the sampler;
/// the `j`-th draw is the symbol at index `-j`.
pub fn estimate_phi(
    fam: &PLFamily,
    sampler: &mut SeededSampler,
    opts: &PhiOptions,
) -> Result<PullbackEstimate> {
    estimate_phi_core(fam, opts, opts.max_depth, |_| sampler.sample_symbol())
}

/// Estimates the graph point of an explicit past window covering
/// `[-n, -1]`; the depth cap is lowered to the window length.
pub fn estimate_phi_window(
    fam: &PLFamily,
    past: &SymbolWindow,
    opts: &PhiOptions,
) -> Result<PullbackEstimate> {
    if !past.is_empty() && past.end() != 0 {
        return Err(Error::WindowMisIndexed { end: past.end() });
    }
    let max_depth = opts.max_depth.min(past.len());
    estimate_phi_core(fam, opts, max_depth, |j| {
        past.get(-(j as i64))
            .expect("depth capped at window length")
    })
}

/// Measures how far the estimated graph is from being invariant: for a
/// window covering `[-n, 0]` (a past with the time-0 symbol appended),
/// returns `|f_{w(0)}(phi_hat(past)) - phi_hat(shifted past)|`.
///
/// Both estimates must converge; an unconverged side is an error rather
/// than a silently large defect.
pub fn check_graph_invariance(
    fam: &PLFamily,
    window: &SymbolWindow,
    opts: &PhiOptions,
) -> Result<f64> {
    if window.is_empty() || window.end() != 1 {
        return Err(Error::InvalidArgument(format!(
            "invariance check needs a window covering [-n, 0], got [{}, {})",
            window.offset(),
            window.end()
        )));
    }
    let omega0 = window.get(0).expect("window ends at index 0");
    let past = window.slice(window.offset(), 0)?;
    let est = estimate_phi_window(fam, &past, opts)?;
    let est_shifted = estimate_phi_window(fam, &window.shift(1), opts)?;
    if !est.converged || !est_shifted.converged {
        return Err(Error::Unconverged);
    }
    Ok((fam.apply_raw(omega0, est.value) - est_shifted.value).abs())
}

/// Where a backward orbit ends up relative to the boundary zones.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Basin {
    ToZero,
    ToOne,
    Undecided,
}

/// Classifies `x` by running its backward orbit `n` steps along the past:
/// points below the graph flow to 0, points above it to 1, and points too
/// close to the graph to resolve in `n` steps stay undecided.
pub fn basin_dichotomy(
    fam: &PLFamily,
    past: &SymbolWindow,
    x: f64,
    n: usize,
) -> Result<Basin> {
    if !(x > 0.0 && x < 1.0) {
        return Err(Error::OutOfDomain {
            what: "probe point x",
            range: "(0, 1)",
            value: x,
        });
    }
    if !past.is_empty() && past.end() != 0 {
        return Err(Error::WindowMisIndexed { end: past.end() });
    }
    past.require_cover(-(n as i64), 0)?;
    let mut z = x;
    for k in 1..=n {
        let s = past.get(-(k as i64)).expect("coverage checked above");
        z = fam.apply_inverse_raw(s, z);
    }
    Ok(if z < EDGE_ZONE {
        Basin::ToZero
    } else if z > 1.0 - EDGE_ZONE {
        Basin::ToOne
    } else {
        Basin::Undecided
    })
}

/// Converged graph-point samples conditioned on a future window.
#[derive(Clone, Debug)]
pub struct PhiSample {
    /// Converged estimates, ordered by sample index.
    pub values: Vec<f64>,
    /// Samples dropped for non-convergence (never retried, to keep the
    /// statistics unbiased).
    pub unconverged: usize,
    pub requested: usize,
}

/// Draws `num_samples` independent pasts (children of the sampler keyed by
/// sample index) and estimates the graph point of each.
///
/// The future window is accepted for interface symmetry only: the graph
/// point is a function of the past alone, so the returned sample is
/// identical for any two futures. Conditioning on a future therefore does
/// not narrow the law — which is the content of the conditional-uniformity
/// experiments.
pub fn sample_phi_given_future(
    fam: &PLFamily,
    future: &SymbolWindow,
    num_samples: usize,
    sampler: &SeededSampler,
    opts: &PhiOptions,
) -> Result<PhiSample> {
    if num_samples == 0 {
        return Err(Error::InvalidArgument(
            "num_samples must be at least 1".into(),
        ));
    }
    if !future.is_empty() && future.offset() < 0 {
        return Err(Error::InvalidArgument(format!(
            "future window must not cover negative indices, got offset {}",
            future.offset()
        )));
    }
    let estimates = run_indexed(num_samples, |i| {
        let mut child = sampler.derive(i as u64);
        estimate_phi(fam, &mut child, opts)
    });
    let mut values = Vec::with_capacity(num_samples);
    let mut unconverged = 0usize;
    for est in estimates {
        let est = est?;
        if est.converged {
            values.push(est.value);
        } else {
            unconverged += 1;
        }
    }
    Ok(PhiSample {
        values,
        unconverged,
        requested: num_samples,
    })
}

/// Outcome of [`vanishing_attractor_experiment`].
#[derive(Clone, Debug)]
pub struct SpreadReport {
    /// Time-`n` states, one per sampled prefix, ordered by prefix index.
    pub xs: Vec<f64>,
    pub min: f64,
    pub max: f64,
    /// One-sample KS statistic of `xs` against uniform(0, 1); NaN when no
    /// prefixes were sampled.
    pub ks_vs_uniform: f64,
    /// `max - min` of the time-`n` states over the nine starts
    /// `0.1, ..., 0.9` driven by the prefix-0 word: how much of the
    /// `x0`-dependence survives to time `n`.
    pub residual_x0_spread: f64,
    /// The nine time-`n` states behind `residual_x0_spread`, ordered by
    /// start point.
    pub residual_finals: Vec<f64>,
    pub n: usize,
    pub num_pasts: usize,
    pub future_seed: u64,
    /// First 32 symbols at indices `n, n+1, ...` drawn from `future_seed`.
    /// Recorded for the report, never consumed by the dynamics: the
    /// experiment's point is that fixing them constrains nothing.
    pub fixed_future: SymbolWindow,
}

/// The one-sided no-attractor experiment: fix the symbols from time `n` on
/// (via `future_seed`), vary the prefix symbols `[0, n-1]` and the start
/// `x0`, and look at the law of `x_n`.
///
/// The observed `x_n` remains uniformly distributed — no single point
/// attracts — even though each fixed prefix has collapsed essentially all
/// `x0`-dependence, as the residual spread documents.
pub fn vanishing_attractor_experiment(
    fam: &PLFamily,
    future_seed: u64,
    n: usize,
    num_pasts: usize,
    sampler: &SeededSampler,
) -> SpreadReport {
    let fixed_future = SeededSampler::new(future_seed).sample_window(n as i64, 32);
    let xs = run_indexed(num_pasts, |i| {
        let mut child = sampler.derive(i as u64);
        let mut x = child.uniform_unit();
        for _ in 0..n {
            x = clamp_open(fam.apply_raw(child.sample_symbol(), x)).0;
        }
        x
    });
    let mut child0 = sampler.derive(0);
    let _ = child0.uniform_unit(); // skip the x0 draw: reuse prefix 0's symbol stream
    let mut states: Vec<f64> = (1..=9).map(|k| k as f64 / 10.0).collect();
    for _ in 0..n {
        let s = child0.sample_symbol();
        for z in states.iter_mut() {
            *z = clamp_open(fam.apply_raw(s, *z)).0;
        }
    }
    let spread_min = states.iter().copied().fold(f64::INFINITY, f64::min);
    let spread_max = states.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let (min, max, ks_vs_uniform) = if xs.is_empty() {
        (f64::NAN, f64::NAN, f64::NAN)
    } else {
        (
            xs.iter().copied().fold(f64::INFINITY, f64::min),
            xs.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            ks_statistic(&xs)
                .map(|r| r.statistic)
                .unwrap_or(f64::NAN),
        )
    };
    SpreadReport {
        xs,
        min,
        max,
        ks_vs_uniform,
        residual_x0_spread: spread_max - spread_min,
        residual_finals: states,
        n,
        num_pasts,
        future_seed,
        fixed_future,
    }
}

/// Histogram of graph-point estimates over `[0, 1]` with equal-width bins.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Histogram {
    pub counts: Vec<u64>,
    pub bins: usize,
    /// Converged samples binned.
    pub total: u64,
    pub unconverged: usize,
}

/// Samples pasts consistent with a cylinder constraint and histograms
/// their graph points: the estimates fill every bin, illustrating that the
/// graph's preimage of any interval is dense in the base.
///
/// The cylinder window pins symbols wherever it covers negative indices;
/// all other past symbols are drawn fresh per sample. Symbols the cylinder
/// fixes at indices `>= 0` are irrelevant to the graph point and are
/// ignored.
pub fn dense_graph_demo(
    fam: &PLFamily,
    cylinder: &SymbolWindow,
    num_samples: usize,
    sampler: &SeededSampler,
    bins: usize,
    opts: &PhiOptions,
) -> Result<Histogram> {
    if bins < 10 {
        return Err(Error::InvalidArgument(format!(
            "histogram needs at least 10 bins, got {bins}"
        )));
    }
    let results = run_indexed(num_samples, |i| {
        let mut child = sampler.derive(i as u64);
        estimate_phi_core(fam, opts, opts.max_depth, |j| {
            cylinder
                .get(-(j as i64))
                .unwrap_or_else(|| child.sample_symbol())
        })
    });
    let mut counts = vec![0u64; bins];
    let mut total = 0u64;
    let mut unconverged = 0usize;
    for est in results {
        let est = est?;
        if est.converged {
            let idx = ((est.value * bins as f64) as usize).min(bins - 1);
            counts[idx] += 1;
            total += 1;
        } else {
            unconverged += 1;
        }
    }
    Ok(Histogram {
        counts,
        bins,
        total,
        unconverged,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::skew::pullback_point;

    fn quarter() -> PLFamily {
        PLFamily::new(0.25).unwrap()
    }

    #[test]
    fn random_past_converges_and_reproduces() {
        let fam = quarter();
        let opts = PhiOptions::default();
        let mut s1 = SeededSampler::new(12);
        let mut s2 = SeededSampler::new(12);
        let e1 = estimate_phi(&fam, &mut s1, &opts).unwrap();
        let e2 = estimate_phi(&fam, &mut s2, &opts).unwrap();
        assert!(e1.converged && !e1.degenerate);
        assert!(e1.depth <= 1 << 14, "depth {} too deep", e1.depth);
        assert!(e1.d_width <= opts.tol_d);
        assert!(e1.bracket_lo > 0.0 && e1.bracket_hi < 1.0);
        assert!(e1.bracket_lo < e1.value && e1.value < e1.bracket_hi);
        // Bit-exact reproducibility.
        assert_eq!(e1.value, e2.value);
        assert_eq!(e1.depth, e2.depth);
        assert_eq!(e1.d_width, e2.d_width);
        // The recorded stages end exactly at the reported depth/width.
        let last = *e1.stages.last().unwrap();
        assert_eq!(last.depth, e1.depth);
        assert_eq!(last.d_width, e1.d_width);
        assert_eq!(last.bracket_lo, e1.bracket_lo);
        assert_eq!(last.bracket_hi, e1.bracket_hi);
    }

    #[test]
    fn all_zeros_past_is_degenerate() {
        let fam = quarter();
        let past = SymbolWindow::new(-1024, vec![Symbol::Zero; 1024]);
        let est = estimate_phi_window(&fam, &past, &PhiOptions::default()).unwrap();
        assert!(est.degenerate);
        assert!(!est.converged);
        assert!(est.bracket_hi <= EDGE_ZONE);
    }

    #[test]
    fn short_window_yields_unconverged_not_error() {
        let fam = quarter();
        let mut sampler = SeededSampler::new(4);
        let past = sampler.sample_window(-4, 4);
        let est = estimate_phi_window(&fam, &past, &PhiOptions::default()).unwrap();
        assert!(!est.converged);
        assert!(!est.degenerate);
        assert_eq!(est.depth, 4);
    }

    #[test]
    fn estimator_validates_inputs() {
        let fam = quarter();
        let mut sampler = SeededSampler::new(4);
        let bad_bracket = PhiOptions {
            bracket: (0.7, 0.3),
            ..PhiOptions::default()
        };
        assert!(estimate_phi(&fam, &mut sampler, &bad_bracket).is_err());
        let bad_tol = PhiOptions {
            tol_d: 0.0,
            ..PhiOptions::default()
        };
        assert!(estimate_phi(&fam, &mut sampler, &bad_tol).is_err());
        let not_past = SymbolWindow::from_bits(-5, &[0, 1]).unwrap();
        assert!(estimate_phi_window(&fam, &not_past, &PhiOptions::default()).is_err());
    }

    #[test]
    fn invariance_telescopes_exactly_at_fixed_depth() {
        let fam = quarter();
        let mut sampler = SeededSampler::new(21);
        let w = sampler.sample_window(-16, 17); // covers [-16, 0]
        let past = w.slice(-16, 0).unwrap();
        let shifted = w.shift(1); // covers [-17, -1]
        let y = 0.37;
        let through = fam
            .apply(w.get(0).unwrap(), pullback_point(&fam, &past, y).unwrap())
            .unwrap();
        let direct = pullback_point(&fam, &shifted, y).unwrap();
        assert_eq!(through, direct, "same composition must be bit-identical");
    }

    #[test]
    fn invariance_defect_is_small() {
        let fam = quarter();
        let mut sampler = SeededSampler::new(33);
        let w = sampler.sample_window(-16384, 16385); // covers [-2^14, 0]
        let defect = check_graph_invariance(&fam, &w, &PhiOptions::default()).unwrap();
        assert!(defect <= 1e-6, "invariance defect {defect}");
    }

    #[test]
    fn invariance_requires_convergence_and_shape() {
        let fam = quarter();
        let mut sampler = SeededSampler::new(33);
        let w = sampler.sample_window(-8, 9);
        assert_eq!(
            check_graph_invariance(&fam, &w, &PhiOptions::default()).unwrap_err(),
            Error::Unconverged
        );
        let not_through_zero = sampler.sample_window(-8, 8);
        assert!(
            check_graph_invariance(&fam, &not_through_zero, &PhiOptions::default()).is_err()
        );
    }

    #[test]
    fn flipping_the_time_zero_symbol_moves_the_shifted_estimate() {
        let fam = quarter();
        let mut sampler = SeededSampler::new(9);
        let w = sampler.sample_window(-16384, 16385);
        let mut bits: Vec<u8> = w.symbols().iter().map(|s| s.as_bit()).collect();
        let last = bits.len() - 1;
        bits[last] ^= 1;
        let w_flipped = SymbolWindow::from_bits(w.offset(), &bits).unwrap();
        let opts = PhiOptions::default();
        let a = estimate_phi_window(&fam, &w.shift(1), &opts).unwrap();
        let b = estimate_phi_window(&fam, &w_flipped.shift(1), &opts).unwrap();
        assert!(a.converged && b.converged);
        assert_ne!(a.value, b.value, "time-0 symbol must matter after the shift");
    }

    #[test]
    fn basin_classification_around_the_graph() {
        let fam = quarter();
        let mut sampler = SeededSampler::new(77);
        let n = 10_000usize;
        let past = sampler.sample_window(-(n as i64), n);
        let opts = PhiOptions {
            max_depth: 8192,
            ..PhiOptions::default()
        };
        let est = estimate_phi_window(&fam, &past, &opts).unwrap();
        assert!(est.converged);
        // Probe points a safe multiple of the bracket resolution away.
        let width = (est.bracket_hi - est.bracket_lo).max(10.0 * est.value.abs() * f64::EPSILON);
        let below = est.value - 10.0 * width;
        let above = est.value + 10.0 * width;
        assert_eq!(basin_dichotomy(&fam, &past, below, n).unwrap(), Basin::ToZero);
        assert_eq!(basin_dichotomy(&fam, &past, above, n).unwrap(), Basin::ToOne);
    }

    #[test]
    fn basin_validation() {
        let fam = quarter();
        let mut sampler = SeededSampler::new(77);
        let past = sampler.sample_window(-10, 10);
        assert!(basin_dichotomy(&fam, &past, 0.0, 10).is_err());
        assert!(basin_dichotomy(&fam, &past, 0.5, 11).is_err());
        let not_past = sampler.sample_window(3, 10);
        assert!(basin_dichotomy(&fam, &not_past, 0.5, 2).is_err());
        // Zero steps never classifies an interior point.
        assert_eq!(
            basin_dichotomy(&fam, &past, 0.5, 0).unwrap(),
            Basin::Undecided
        );
    }

    #[test]
    fn conditional_sample_ignores_the_future() {
        let fam = quarter();
        let sampler = SeededSampler::new(55);
        let opts = PhiOptions::default();
        let f1 = SymbolWindow::from_bits(0, &[0, 0, 0, 0]).unwrap();
        let f2 = SymbolWindow::from_bits(0, &[1, 1, 1, 1]).unwrap();
        let s1 = sample_phi_given_future(&fam, &f1, 64, &sampler, &opts).unwrap();
        let s2 = sample_phi_given_future(&fam, &f2, 64, &sampler, &opts).unwrap();
        assert_eq!(s1.values, s2.values, "the future must not affect the sample");
        assert_eq!(s1.requested, 64);
        assert!(s1.values.iter().all(|&v| v > 0.0 && v < 1.0));
    }

    #[test]
    fn conditional_sample_validation() {
        let fam = quarter();
        let sampler = SeededSampler::new(55);
        let opts = PhiOptions::default();
        let past_window = SymbolWindow::from_bits(-2, &[0, 1]).unwrap();
        assert!(sample_phi_given_future(&fam, &past_window, 10, &sampler, &opts).is_err());
        let future = SymbolWindow::empty();
        assert!(sample_phi_given_future(&fam, &future, 0, &sampler, &opts).is_err());
    }

    #[test]
    fn conditional_sample_looks_uniform() {
        let fam = quarter();
        let sampler = SeededSampler::new(101);
        let sample = sample_phi_given_future(
            &fam,
            &SymbolWindow::empty(),
            2000,
            &sampler,
            &PhiOptions::default(),
        )
        .unwrap();
        assert!(sample.unconverged <= 20, "unconverged {}", sample.unconverged);
        let ks = ks_statistic(&sample.values).unwrap();
        assert!(
            ks.statistic <= ks.critical_001,
            "KS {} above critical {}",
            ks.statistic,
            ks.critical_001
        );
    }

    #[test]
    fn vanishing_attractor_small_run() {
        let fam = quarter();
        let sampler = SeededSampler::new(5);
        let report = vanishing_attractor_experiment(&fam, 99, 200, 100, &sampler);
        assert_eq!(report.xs.len(), 100);
        assert!(report.min < report.max);
        assert!(report.min > 0.0 && report.max < 1.0);
        assert!(report.ks_vs_uniform <= 0.163, "KS {}", report.ks_vs_uniform);
        assert!(
            report.residual_x0_spread <= 1e-2,
            "residual spread {}",
            report.residual_x0_spread
        );
        assert_eq!(report.fixed_future.offset(), 200);
        assert_eq!(report.fixed_future.len(), 32);
        // Deterministic rerun.
        let again = vanishing_attractor_experiment(&fam, 99, 200, 100, &sampler);
        assert_eq!(report.xs, again.xs);
    }

    #[test]
    fn vanishing_attractor_single_prefix_is_degenerate() {
        let fam = quarter();
        let sampler = SeededSampler::new(5);
        let report = vanishing_attractor_experiment(&fam, 99, 50, 1, &sampler);
        assert_eq!(report.min, report.max);
        assert_eq!(report.xs.len(), 1);
    }

    #[test]
    fn dense_histogram_fills_every_bin() {
        let fam = quarter();
        let sampler = SeededSampler::new(8);
        let mut cyl_sampler = SeededSampler::new(80);
        let cylinder = cyl_sampler.sample_window(-3, 7); // covers [-3, 3]
        let hist = dense_graph_demo(&fam, &cylinder, 1000, &sampler, 20, &PhiOptions::default())
            .unwrap();
        assert_eq!(hist.bins, 20);
        assert_eq!(hist.total + hist.unconverged as u64, 1000);
        assert!(
            hist.counts.iter().all(|&k| k > 0),
            "empty bins in {:?}",
            hist.counts
        );
    }

    #[test]
    fn dense_histogram_future_only_cylinder_changes_nothing() {
        let fam = quarter();
        let sampler = SeededSampler::new(8);
        let opts = PhiOptions::default();
        let future_only = SymbolWindow::from_bits(0, &[1, 0, 1]).unwrap();
        let constrained =
            dense_graph_demo(&fam, &future_only, 500, &sampler, 20, &opts).unwrap();
        let unconstrained =
            dense_graph_demo(&fam, &SymbolWindow::empty(), 500, &sampler, 20, &opts).unwrap();
        assert_eq!(constrained, unconstrained);
    }

    #[test]
    fn dense_histogram_edge_cases() {
        let fam = quarter();
        let sampler = SeededSampler::new(8);
        let opts = PhiOptions::default();
        let empty = dense_graph_demo(&fam, &SymbolWindow::empty(), 0, &sampler, 20, &opts)
            .unwrap();
        assert_eq!(empty.total, 0);
        assert!(empty.counts.iter().all(|&k| k == 0));
        assert!(
            dense_graph_demo(&fam, &SymbolWindow::empty(), 10, &sampler, 9, &opts).is_err()
        );
    }
}
