//! The logarithmic metric on the open unit interval and the one-step
//! contraction certificates of the fiber maps with respect to it.
//!
//! The metric is pushed forward from the real line by the chart
//!
//! ```text
//! h(x) = ln(2x)        for x <= 1/2,
//! h(x) = -ln(2(1-x))   for x >  1/2,
//! ```
//!
//! i.e. `d(x, y) = |h(x) - h(y)|`. It is additive on ordered triples,
//! dominates the Euclidean distance, and blows up at the endpoints, which is
//! what makes the endpoint-fixing fiber maps weak contractions rather than
//! merely nonexpansive near 0 and 1.
//!
//! Each fiber map acts on `d` in one of two ways, depending on where the
//! pair of points sits relative to `1/2` and the map's kink: either as an
//! exact isometry or as a genuine contraction with the explicit factor
//! `1 - (2c/3) d`. Runs of contracting steps are summarised by the gain
//! function `chi`, a concave increasing function with `chi(t) < t` for
//! `t > 0`: a crossing pair started at distance `t` is brought within
//! `chi(t)` by the time it has crossed `1/2`.

use crate::base::Symbol;
use crate::error::{Error, Result};
use crate::fiber::PLFamily;

/// Chart value of `x` in (0, 1); monotone, `h(1/2) = 0`, `h(1-x) = -h(x)`.
///
/// The upper branch is evaluated as `-(ln 2 + ln_1p(-x))` so that values
/// near 1 lose no precision to the subtraction `1 - x`.
pub(crate) fn h_raw(x: f64) -> f64 {
    if x <= 0.5 {
        (2.0 * x).ln()
    } else {
        -(std::f64::consts::LN_2 + (-x).ln_1p())
    }
}

/// Inverse chart: `h_inv(h(x)) = x` for `x` in (0, 1).
///
/// The result is always strictly inside (0, 1). For `|u|` beyond float
/// resolution it saturates at the nearest representable interior point:
/// the smallest positive double on the left, `1 - 2^-53` on the right
/// (doubles cannot express points closer to 1 than that).
pub fn h_inv(u: f64) -> f64 {
    if u <= 0.0 {
        let x = 0.5 * u.exp();
        if x > 0.0 {
            x
        } else {
            f64::from_bits(1)
        }
    } else {
        let x = 1.0 - 0.5 * (-u).exp();
        if x < 1.0 {
            x
        } else {
            crate::fiber::MAX_OPEN
        }
    }
}

/// `h(f_symbol(x))` evaluated piecewise in gap coordinates.
///
/// Materializing an image `1 - slope * (1 - x)` as a double quantizes its
/// gap to 1 onto the `2^-53` grid, which the chart amplifies into errors
/// of order `2^-54 / (1 - x)` — far beyond certificate tolerances when x
/// is within ~1e-6 of 1. Composing the chart with the map symbolically
/// (left images: `ln(2 * slope * x)`; right images:
/// `-(ln(2 * slope) + ln_1p(-x))`) keeps full relative precision for any
/// interior x.
pub(crate) fn h_of_image(fam: &PLFamily, symbol: Symbol, x: f64) -> f64 {
    match symbol {
        Symbol::Zero => {
            if x <= fam.breakpoint(Symbol::Zero) {
                (2.0 * fam.a() * x).ln()
            } else {
                -((2.0 * fam.b()).ln() + (-x).ln_1p())
            }
        }
        Symbol::One => {
            if x <= fam.breakpoint(Symbol::One) {
                (2.0 * fam.b() * x).ln()
            } else {
                -((2.0 * fam.a()).ln() + (-x).ln_1p())
            }
        }
    }
}

fn require_open_unit(what: &'static str, x: f64) -> Result<()> {
    if x > 0.0 && x < 1.0 {
        Ok(())
    } else {
        Err(Error::OutOfDomain {
            what,
            range: "(0, 1)",
            value: x,
        })
    }
}

/// Chart value of `x`, which must lie strictly inside (0, 1).
pub fn h(x: f64) -> Result<f64> {
    require_open_unit("chart argument x", x)?;
    Ok(h_raw(x))
}

pub(crate) fn dist_raw(x: f64, y: f64) -> f64 {
    (h_raw(x) - h_raw(y)).abs()
}

/// Logarithmic distance between two points of (0, 1).
pub fn dist(x: f64, y: f64) -> Result<f64> {
    require_open_unit("metric argument x", x)?;
    require_open_unit("metric argument y", y)?;
    Ok(dist_raw(x, y))
}

/// Slack in the two-point slope inequality used by the contraction
/// estimates: for `1/2 <= x < y < 1`,
///
/// ```text
/// (ln y - ln x) / (ln(1-x) - ln(1-y))  <=  (4 - 2y) / 3,
/// ```
///
/// returned as right-hand side minus left-hand side (nonnegative when the
/// inequality holds).
pub fn check_deriv_inequality(x: f64, y: f64) -> Result<f64> {
    if !(0.5..1.0).contains(&x) {
        return Err(Error::OutOfDomain {
            what: "inequality argument x",
            range: "[1/2, 1)",
            value: x,
        });
    }
    if !(y > x && y < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "inequality arguments must satisfy x < y < 1, got x = {x}, y = {y}"
        )));
    }
    let ratio = (y.ln() - x.ln()) / ((-x).ln_1p() - (-y).ln_1p());
    Ok((4.0 - 2.0 * y) / 3.0 - ratio)
}

/// How a single fiber-map step acts on the distance of a point pair.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StepClass {
    /// The step preserves the distance exactly.
    Isometry,
    /// The step contracts by at least the factor `1 - (2c/3) d`.
    Contracting,
}

/// Verdict of [`MetricContext::check_step_contraction`] for one map applied
/// to one pair of points.
#[derive(Clone, Copy, Debug)]
pub struct StepCertificate {
    pub class: StepClass,
    /// Distance of the input pair.
    pub input_distance: f64,
    /// Distance of the image pair.
    pub output_distance: f64,
    /// Promised upper bound for the output distance.
    pub bound: f64,
    /// `bound - output_distance`; nonnegative up to rounding when the
    /// promise holds.
    pub defect: f64,
}

/// Metric-side data derived from a family member: the distance scale `eta`
/// and the crossing gain function `chi`.
#[derive(Clone, Copy, Debug)]
pub struct MetricContext {
    fam: PLFamily,
    eta: f64,
    chi_slope: f64,
}

impl MetricContext {
    pub fn new(fam: PLFamily) -> MetricContext {
        let c = fam.c();
        let eta = (1.0 / (2.0 * c)).ln();
        let chi_slope = (2.0 + c * eta / 6.0) / (2.0 + c * eta / 3.0);
        MetricContext {
            fam,
            eta,
            chi_slope,
        }
    }

    pub fn family(&self) -> &PLFamily {
        &self.fam
    }

    /// Distance scale `eta = ln(1/(2c))`: the diameter of `[1/2, 1-c]` in
    /// the logarithmic metric, and the threshold below which a pair cannot
    /// jump across the contraction zone in one step.
    pub fn eta(&self) -> f64 {
        self.eta
    }

    /// Slope of the linear tail of `chi` (strictly below 1).
    pub fn chi_slope(&self) -> f64 {
        self.chi_slope
    }

    /// Crossing gain function: concave, increasing, `chi(t) < t` for
    /// `t > 0`. Quadratic-over-linear up to `eta/2`, linear beyond.
    pub fn chi(&self, t: f64) -> Result<f64> {
        if t.is_nan() || t < 0.0 {
            return Err(Error::OutOfDomain {
                what: "gain argument t",
                range: "[0, inf)",
                value: t,
            });
        }
        let c = self.fam.c();
        if t <= self.eta / 2.0 {
            Ok((2.0 + (c / 3.0) * t) / (2.0 + (2.0 * c / 3.0) * t) * t)
        } else {
            Ok(self.chi_slope * t)
        }
    }

    /// Inverse of [`chi`](MetricContext::chi) on `[0, inf)`.
    pub fn chi_inverse(&self, u: f64) -> Result<f64> {
        if u.is_nan() || u < 0.0 {
            return Err(Error::OutOfDomain {
                what: "gain value u",
                range: "[0, inf)",
                value: u,
            });
        }
        if u == 0.0 {
            return Ok(0.0);
        }
        let boundary = self.chi_slope * (self.eta / 2.0);
        if u > boundary {
            return Ok(u / self.chi_slope);
        }
        // Solve q t^2 + (2 - 2 q u) t - 2 u = 0 with q = c/3, taking the
        // positive root in the subtraction-free form.
        let q = self.fam.c() / 3.0;
        let a = 2.0 - 2.0 * q * u;
        Ok(4.0 * u / (a + (a * a + 8.0 * q * u).sqrt()))
    }

    /// Certifies how one application of the selected map acts on the pair
    /// `{x, y}`.
    ///
    /// The pair must fit inside a single certification zone of that map:
    /// for map 0 these are `(0, 1/2]` and `[1-c, 1)` (isometry) and
    /// `[1/2, 1-c]` (contraction); for map 1 they are `(0, c]` and
    /// `[1/2, 1)` (isometry) and `[c, 1/2]` (contraction). Pairs straddling
    /// a zone boundary are rejected; split them at the boundary and certify
    /// each part.
    pub fn check_step_contraction(
        &self,
        symbol: Symbol,
        x: f64,
        y: f64,
    ) -> Result<StepCertificate> {
        require_open_unit("pair member x", x)?;
        require_open_unit("pair member y", y)?;
        let (lo, hi) = if x <= y { (x, y) } else { (y, x) };
        let c = self.fam.c();
        let class = match symbol {
            Symbol::Zero => {
                if hi <= 0.5 || lo >= 1.0 - c {
                    StepClass::Isometry
                } else if lo >= 0.5 && hi <= 1.0 - c {
                    StepClass::Contracting
                } else {
                    return Err(Error::PairStraddlesPieces { symbol: 0, x, y });
                }
            }
            Symbol::One => {
                if hi <= c || lo >= 0.5 {
                    StepClass::Isometry
                } else if lo >= c && hi <= 0.5 {
                    StepClass::Contracting
                } else {
                    return Err(Error::PairStraddlesPieces { symbol: 1, x, y });
                }
            }
        };
        let input_distance = dist_raw(lo, hi);
        // Image distance via the gap-coordinate chart composition: see
        // `h_of_image` for why the images are never materialized.
        let output_distance =
            (h_of_image(&self.fam, symbol, hi) - h_of_image(&self.fam, symbol, lo)).abs();
        let bound = match class {
            StepClass::Isometry => input_distance,
            StepClass::Contracting => {
                (1.0 - (2.0 * c / 3.0) * input_distance) * input_distance
            }
        };
        Ok(StepCertificate {
            class,
            input_distance,
            output_distance,
            bound,
            defect: bound - output_distance,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::LN_2;

    #[test]
    fn chart_reference_values() {
        assert_eq!(h(0.5).unwrap(), 0.0);
        assert_eq!(h(0.25).unwrap(), -LN_2);
        assert_eq!(h(0.75).unwrap(), LN_2);
        assert_eq!(dist(0.25, 0.75).unwrap(), 2.0 * LN_2);
        assert_eq!(dist(0.3, 0.3).unwrap(), 0.0);
    }

    #[test]
    fn chart_domain() {
        assert!(h(0.0).is_err());
        assert!(h(1.0).is_err());
        assert!(h(-0.5).is_err());
        assert!(dist(0.0, 0.5).is_err());
        assert!(dist(0.5, 1.0).is_err());
    }

    #[test]
    fn chart_is_odd_about_one_half() {
        // Dyadic grid points keep 1 - x exact, so only the two branch
        // evaluations themselves are compared.
        for i in 1..512 {
            let x = i as f64 / 1024.0;
            let lhs = h(1.0 - x).unwrap();
            let rhs = -h(x).unwrap();
            assert_abs_diff_eq!(lhs, rhs, epsilon = 1e-14);
        }
    }

    #[test]
    fn chart_inverse_roundtrip() {
        assert_eq!(h_inv(0.0), 0.5);
        for i in 1..1000 {
            let x = i as f64 / 1000.0;
            let back = h_inv(h(x).unwrap());
            assert_abs_diff_eq!(back, x, epsilon = 1e-15);
        }
        // The left tail keeps full relative precision (x itself is the
        // stored quantity), so the roundtrip stays tight arbitrarily deep.
        for u in [-700.0, -30.0, -1.0, 1.0] {
            let x = h_inv(u);
            assert!(x > 0.0 && x < 1.0);
            assert_abs_diff_eq!(h(x).unwrap(), u, epsilon = 1e-12);
        }
        // The right tail stores 1 - x on the 2^-53 grid, so h(h_inv(u))
        // is only good to about 2^-53 * e^u there.
        assert_abs_diff_eq!(h(h_inv(30.0)).unwrap(), 30.0, epsilon = 2e-3);
        // Beyond representability the inverse saturates at interior points.
        assert_eq!(h_inv(700.0), crate::fiber::MAX_OPEN);
        assert_abs_diff_eq!(h(h_inv(700.0)).unwrap(), 52.0 * LN_2, epsilon = 1e-12);
        assert!(h_inv(-800.0) > 0.0);
        assert!(h(h_inv(-800.0)).is_ok());
    }

    #[test]
    fn distance_dominates_euclidean_and_adds_on_ordered_triples() {
        let pts = [0.01, 0.2, 0.45, 0.5, 0.55, 0.8, 0.99];
        for (i, &x) in pts.iter().enumerate() {
            for &y in &pts[i + 1..] {
                let d = dist(x, y).unwrap();
                assert!(d >= (x - y).abs() - 1e-15);
            }
        }
        for w in pts.windows(3) {
            let (x, y, z) = (w[0], w[1], w[2]);
            let lhs = dist(x, z).unwrap();
            let rhs = dist(x, y).unwrap() + dist(y, z).unwrap();
            assert_abs_diff_eq!(lhs, rhs, epsilon = 1e-14);
        }
    }

    #[test]
    fn eta_reference_values() {
        let eta = |c: f64| MetricContext::new(PLFamily::new(c).unwrap()).eta();
        assert_eq!(eta(0.1), 1.6094379124341003);
        assert_eq!(eta(0.25), LN_2);
        assert_eq!(eta(0.4), 0.22314355131420976);
    }

    #[test]
    fn gain_slope_reference_values() {
        let slope = |c: f64| MetricContext::new(PLFamily::new(c).unwrap()).chi_slope();
        assert_eq!(slope(0.1), 0.986938381788829);
        assert_eq!(slope(0.25), 0.9859647865966303);
        assert_eq!(slope(0.4), 0.9926709108876877);
    }

    #[test]
    fn gain_function_shape() {
        for (c, at_knee) in [
            (0.1, 0.794208024443651),
            (0.25, 0.34170935598042124),
            (0.4, 0.11075405617089504),
        ] {
            let ctx = MetricContext::new(PLFamily::new(c).unwrap());
            let knee = ctx.eta() / 2.0;
            assert_abs_diff_eq!(ctx.chi(knee).unwrap(), at_knee, epsilon = 1e-15);
            // Continuity across the knee.
            let below = ctx.chi(knee * (1.0 - 1e-12)).unwrap();
            let above = ctx.chi(knee * (1.0 + 1e-12)).unwrap();
            assert_abs_diff_eq!(below, above, epsilon = 1e-11);
            // Strict gain and monotonicity on a grid spanning both branches.
            assert_eq!(ctx.chi(0.0).unwrap(), 0.0);
            let mut prev = 0.0;
            for i in 1..=100 {
                let t = 2.0 * knee * i as f64 / 100.0;
                let v = ctx.chi(t).unwrap();
                assert!(v < t, "c={c}: chi({t}) = {v} is not a strict gain");
                assert!(v > prev, "c={c}: chi not increasing at t={t}");
                prev = v;
            }
        }
    }

    #[test]
    fn gain_inverse_roundtrip() {
        for c in [0.1, 0.25, 0.4] {
            let ctx = MetricContext::new(PLFamily::new(c).unwrap());
            let knee = ctx.eta() / 2.0;
            assert_eq!(ctx.chi_inverse(0.0).unwrap(), 0.0);
            for i in 1..=200 {
                let t = 3.0 * knee * i as f64 / 200.0;
                let u = ctx.chi(t).unwrap();
                let back = ctx.chi_inverse(u).unwrap();
                assert_abs_diff_eq!(back, t, epsilon = 1e-14);
                let forward = ctx.chi(ctx.chi_inverse(u).unwrap()).unwrap();
                assert_abs_diff_eq!(forward, u, epsilon = 1e-14);
            }
            assert!(ctx.chi(-1.0).is_err());
            assert!(ctx.chi_inverse(-1.0).is_err());
        }
    }

    #[test]
    fn slope_inequality_reference_value() {
        let slack = check_deriv_inequality(0.5, 0.75).unwrap();
        // Bound (4 - 2*0.75)/3 minus ratio log2(3) - 1.
        assert_abs_diff_eq!(slack, 0.2483708326121771, epsilon = 1e-15);
        assert!(check_deriv_inequality(0.4, 0.6).is_err());
        assert!(check_deriv_inequality(0.6, 0.6).is_err());
        assert!(check_deriv_inequality(0.6, 1.0).is_err());
    }

    #[test]
    fn slope_inequality_holds_on_grid() {
        for i in 0..60 {
            for j in (i + 1)..=60 {
                let x = 0.5 + 0.5 * i as f64 / 61.0;
                let y = 0.5 + 0.5 * j as f64 / 61.0;
                let slack = check_deriv_inequality(x, y).unwrap();
                assert!(slack >= -1e-12, "slack {slack} at ({x}, {y})");
            }
        }
    }

    #[test]
    fn step_certificates_at_quarter() {
        let ctx = MetricContext::new(PLFamily::new(0.25).unwrap());

        // Map 0 on (0, 1/2]: isometry.
        let cert = ctx.check_step_contraction(Symbol::Zero, 0.1, 0.4).unwrap();
        assert_eq!(cert.class, StepClass::Isometry);
        assert_abs_diff_eq!(cert.output_distance, cert.input_distance, epsilon = 1e-14);

        // Map 0 on [1-c, 1): isometry.
        let cert = ctx.check_step_contraction(Symbol::Zero, 0.8, 0.9).unwrap();
        assert_eq!(cert.class, StepClass::Isometry);
        assert_abs_diff_eq!(cert.output_distance, cert.input_distance, epsilon = 1e-14);

        // Map 0 on [1/2, 1-c]: genuine contraction with the promised factor.
        let cert = ctx.check_step_contraction(Symbol::Zero, 0.5, 0.75).unwrap();
        assert_eq!(cert.class, StepClass::Contracting);
        assert!(cert.defect >= -1e-12);
        assert!(cert.output_distance < cert.input_distance);

        // Map 1 mirror cases.
        let cert = ctx.check_step_contraction(Symbol::One, 0.6, 0.9).unwrap();
        assert_eq!(cert.class, StepClass::Isometry);
        let cert = ctx.check_step_contraction(Symbol::One, 0.25, 0.5).unwrap();
        assert_eq!(cert.class, StepClass::Contracting);
        assert!(cert.defect >= -1e-12);

        // Argument order must not matter.
        let ab = ctx.check_step_contraction(Symbol::Zero, 0.5, 0.75).unwrap();
        let ba = ctx.check_step_contraction(Symbol::Zero, 0.75, 0.5).unwrap();
        assert_eq!(ab.bound, ba.bound);
        assert_eq!(ab.output_distance, ba.output_distance);
    }

    #[test]
    fn step_certificate_rejects_straddling_pairs() {
        let ctx = MetricContext::new(PLFamily::new(0.25).unwrap());
        assert!(matches!(
            ctx.check_step_contraction(Symbol::Zero, 0.4, 0.6),
            Err(Error::PairStraddlesPieces { symbol: 0, .. })
        ));
        assert!(ctx.check_step_contraction(Symbol::Zero, 0.7, 0.8).is_err());
        assert!(ctx.check_step_contraction(Symbol::One, 0.2, 0.3).is_err());
        assert!(ctx.check_step_contraction(Symbol::One, 0.1, 0.6).is_err());
        assert!(ctx.check_step_contraction(Symbol::Zero, 0.0, 0.3).is_err());
    }
}
