//! Exponent estimators with closed-form oracles, the Lebesgue transfer
//! identity, synchronization experiments, empirical fiber distributions,
//! and Kolmogorov–Smirnov statistics.
//!
//! Two quantities of the family have exact closed forms: the fiber Lyapunov
//! exponent `-(1-c) ln(1-c) - c ln c - ln 2` (negative throughout the
//! parameter range) and the endpoint-level exponent
//! `(1/2) ln(1/(4c(1-c)))` (positive throughout). Both are implemented as
//! the log-averages matching their Birkhoff sums. Monte Carlo estimators
//! report naive standard errors `sd / sqrt(n)` of the per-step terms.
//!
//! Lebesgue measure is invariant in the mean for the one-sided system: for
//! an interval `A` on one side of `1/2`, the two preimages have average
//! length `|A| (1/a + 1/b) / 2 = |A|`. The defect of this identity is a
//! deterministic quantity, checked to round-off, not a statistical test.

use crate::base::SeededSampler;
use crate::error::{Error, Result};
use crate::fiber::{clamp_open, PLFamily};
use crate::metric::dist_raw;
use crate::skew::forward_summary;

/// Monte Carlo exponent estimate plus the closed form it should match.
#[derive(Clone, Copy, Debug)]
pub struct ExponentEstimate {
    /// Mean per-step log-slope along the orbit (nats per step).
    pub estimate: f64,
    pub n: usize,
    /// Sample standard deviation of the per-step log-slopes divided by
    /// `sqrt(n)`.
    pub std_error: f64,
    /// Exact value; `None` when the sampler is biased (`p0 != 1/2`), where
    /// no closed form applies.
    pub closed_form: Option<f64>,
    /// Steps whose pre-image sat exactly on the acting map's kink. The
    /// estimate is convention-independent iff this stays 0.
    pub breakpoint_hits: usize,
    pub clamp_count: usize,
    /// Start point actually used (drawn when not supplied).
    pub x0: f64,
}

/// Exact fiber Lyapunov exponent `-(1-c) ln(1-c) - c ln c - ln 2`.
pub fn fiber_lyapunov_closed_form(fam: &PLFamily) -> f64 {
    let c = fam.c();
    -(1.0 - c) * (1.0 - c).ln() - c * c.ln() - std::f64::consts::LN_2
}

/// Monte Carlo fiber Lyapunov exponent along one forward orbit.
///
/// The start point is `x0` when given, otherwise one uniform draw taken
/// from the sampler before any symbol; stepping is clamp-guarded.
pub fn fiber_lyapunov(
    fam: &PLFamily,
    sampler: &mut SeededSampler,
    x0: Option<f64>,
    n: usize,
) -> Result<ExponentEstimate> {
    if n == 0 {
        return Err(Error::InvalidArgument(
            "exponent estimation needs at least one step".into(),
        ));
    }
    let start = match x0 {
        Some(v) => {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::OutOfDomain {
                    what: "initial state x0",
                    range: "[0, 1]",
                    value: v,
                });
            }
            v
        }
        None => sampler.uniform_unit(),
    };
    let summary = forward_summary(fam, sampler, start, n)?;
    let nf = n as f64;
    let estimate = summary.sum_log_deriv / nf;
    let variance = if n > 1 {
        ((summary.sumsq_log_deriv - summary.sum_log_deriv * summary.sum_log_deriv / nf)
            / (nf - 1.0))
            .max(0.0)
    } else {
        0.0
    };
    let closed_form = (sampler.p0() == 0.5).then(|| fiber_lyapunov_closed_form(fam));
    Ok(ExponentEstimate {
        estimate,
        n,
        std_error: (variance / nf).sqrt(),
        closed_form,
        breakpoint_hits: summary.breakpoint_hits,
        clamp_count: summary.clamp_count,
        x0: start,
    })
}

/// Exponent of the fair-coin system at the endpoint fixed level 0 or 1:
/// `(1/2) ln(1/(4c(1-c)))`, positive for every valid `c` and identical for
/// both levels by the family's mirror symmetry.
pub fn level_exponent(fam: &PLFamily, level: u8) -> Result<f64> {
    if level > 1 {
        return Err(Error::BadSymbol(level));
    }
    let c = fam.c();
    Ok(0.5 * (1.0 / (4.0 * c * (1.0 - c))).ln())
}

pub fn interval_defect(fam: &PLFamily, lo: f64, hi: f64) -> Result<f64> {
    if !(lo.is_finite() && hi.is_finite() && (0.0..=1.0).contains(&lo) && lo <= hi && hi <= 1.0)
    {
        return Err(Error::BadInterval { lo, hi });
    }
    if lo < 0.5 && hi > 0.5 {
        return Err(Error::IntervalStraddlesHalf { lo, hi });
    }
    // Closed-form preimage endpoints: each branch inverse is affine on each
    // side of 1/2, so preimage lengths are exact up to round-off.
    let len = hi - lo;
    let len0 = fam.apply_inverse_raw(crate::base::Symbol::Zero, hi)
        - fam.apply_inverse_raw(crate::base::Symbol::Zero, lo);
    let len1 = fam.apply_inverse_raw(crate::base::Symbol::One, hi)
        - fam.apply_inverse_raw(crate::base::Symbol::One, lo);
    Ok(0.5 * (len0 + len1) - len)
}

/// Per-interval defects of the Lebesgue transfer identity
/// `(|f0^{-1}A| + |f1^{-1}A|) / 2 = |A|`.
///
/// Each interval must lie entirely in `[0, 1/2]` or `[1/2, 1]`; split
/// straddling intervals at `1/2` first (the identity is additive).
pub fn lebesgue_interval_defects(fam: &PLFamily, intervals: &[(f64, f64)]) -> Result<Vec<f64>> {
    intervals
        .iter()
        .map(|&(lo, hi)| interval_defect(fam, lo, hi))
        .collect()
}

/// Maximum absolute defect of the Lebesgue transfer identity over the given
/// intervals. A deterministic identity: stays below 1e-12 for any
/// admissible input.
pub fn lebesgue_invariance_defect(fam: &PLFamily, intervals: &[(f64, f64)]) -> Result<f64> {
    let defects = lebesgue_interval_defects(fam, intervals)?;
    Ok(defects.iter().fold(0.0, |m, d| m.max(d.abs())))
}

/// Trace of a two-orbit synchronization experiment.
#[derive(Clone, Debug)]
pub struct SyncRun {
    /// Logarithmic distances `d(x_k, y_k)` for `k = 0..=n`; non-increasing
    /// up to per-step round-off.
    pub d_seq: Vec<f64>,
    pub clamp_count: usize,
}

/// Runs two orbits under one symbol stream and records their logarithmic
/// distance after every step.
pub fn synchronization_run(
    fam: &PLFamily,
    sampler: &mut SeededSampler,
    x0: f64,
    y0: f64,
    n: usize,
) -> Result<SyncRun> {
    for (what, v) in [("initial state x0", x0), ("initial state y0", y0)] {
        if !(v > 0.0 && v < 1.0) {
            return Err(Error::OutOfDomain {
                what,
                range: "(0, 1)",
                value: v,
            });
        }
    }
    let (mut x, cx) = clamp_open(x0);
    let (mut y, cy) = clamp_open(y0);
    let mut clamp_count = cx as usize + cy as usize;
    let mut d_seq = Vec::with_capacity(n + 1);
    d_seq.push(dist_raw(x, y));
    for _ in 0..n {
        let s = sampler.sample_symbol();
        let (nx, cx) = clamp_open(fam.apply_raw(s, x));
        let (ny, cy) = clamp_open(fam.apply_raw(s, y));
        clamp_count += cx as usize + cy as usize;
        x = nx;
        y = ny;
        d_seq.push(dist_raw(x, y));
    }
    Ok(SyncRun { d_seq, clamp_count })
}

/// Kolmogorov–Smirnov outcome of a one-sample test against uniform(0, 1).
#[derive(Clone, Copy, Debug)]
pub struct KSResult {
    pub statistic: f64,
    pub n: usize,
    /// Asymptotic critical value at significance 0.01: `1.63 / sqrt(n)`.
    pub critical_001: f64,
}

/// Kolmogorov–Smirnov outcome of a two-sample test.
#[derive(Clone, Copy, Debug)]
pub struct TwoSampleKS {
    pub statistic: f64,
    pub n: usize,
    pub m: usize,
    /// Asymptotic critical value at significance 0.01:
    /// `1.63 * sqrt((n + m) / (n m))`.
    pub critical_001: f64,
}

fn require_sample(samples: &[f64]) -> Result<()> {
    if samples.is_empty() {
        return Err(Error::EmptySample);
    }
    for &u in samples {
        if !(0.0..=1.0).contains(&u) {
            return Err(Error::OutOfDomain {
                what: "sample value",
                range: "[0, 1]",
                value: u,
            });
        }
    }
    Ok(())
}

/// Exact one-sample KS statistic against uniform(0, 1):
/// `max_i max(i/n - u_(i), u_(i) - (i-1)/n)` over the sorted sample.
pub fn ks_statistic(samples: &[f64]) -> Result<KSResult> {
    require_sample(samples)?;
    let mut sorted = samples.to_vec();
    sorted.sort_unstable_by(f64::total_cmp);
    let n = sorted.len();
    let nf = n as f64;
    let mut d = 0.0f64;
    for (i, &u) in sorted.iter().enumerate() {
        d = d.max((i + 1) as f64 / nf - u).max(u - i as f64 / nf);
    }
    Ok(KSResult {
        statistic: d,
        n,
        critical_001: 1.63 / nf.sqrt(),
    })
}

/// Exact two-sample KS statistic: the largest gap between the two empirical
/// distribution functions.
pub fn ks_two_sample(xs: &[f64], ys: &[f64]) -> Result<TwoSampleKS> {
    require_sample(xs)?;
    require_sample(ys)?;
    let mut a = xs.to_vec();
    let mut b = ys.to_vec();
    a.sort_unstable_by(f64::total_cmp);
    b.sort_unstable_by(f64::total_cmp);
    let (n, m) = (a.len(), b.len());
    let (nf, mf) = (n as f64, m as f64);
    let (mut i, mut j) = (0usize, 0usize);
    let mut d = 0.0f64;
    while i < n || j < m {
        let t = match (a.get(i), b.get(j)) {
            (Some(&x), Some(&y)) => x.min(y),
            (Some(&x), None) => x,
            (None, Some(&y)) => y,
            (None, None) => unreachable!(),
        };
        while i < n && a[i] <= t {
            i += 1;
        }
        while j < m && b[j] <= t {
            j += 1;
        }
        d = d.max((i as f64 / nf - j as f64 / mf).abs());
    }
    Ok(TwoSampleKS {
        statistic: d,
        n,
        m,
        critical_001: 1.63 * ((nf + mf) / (nf * mf)).sqrt(),
    })
}

/// KS test of the states `x_{burn_in}, ..., x_{n-1}` of one forward orbit
/// against uniform(0, 1).
///
/// The orbit is unclamped (a start on an endpoint stays there, and the
/// statistic duly reports the degeneracy). Samples are serially dependent,
/// so the i.i.d. critical value in the result does not apply to them; use
/// the empirical acceptance threshold 0.01 at `n = 10^6` instead.
pub fn empirical_fiber_distribution(
    fam: &PLFamily,
    sampler: &mut SeededSampler,
    x0: f64,
    n: usize,
    burn_in: usize,
) -> Result<KSResult> {
    if !(0.0..=1.0).contains(&x0) {
        return Err(Error::OutOfDomain {
            what: "initial state x0",
            range: "[0, 1]",
            value: x0,
        });
    }
    if n <= burn_in {
        return Err(Error::InvalidArgument(format!(
            "orbit length n = {n} must exceed burn_in = {burn_in}"
        )));
    }
    let mut samples = Vec::with_capacity(n - burn_in);
    let mut x = x0;
    for k in 0..n {
        if k >= burn_in {
            samples.push(x);
        }
        if k + 1 < n {
            x = fam.apply_raw(sampler.sample_symbol(), x);
        }
    }
    ks_statistic(&samples)
}
