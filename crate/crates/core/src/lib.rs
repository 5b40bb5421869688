//! Random interval dynamics: a pair of piecewise-linear interval maps
//! driven by coin flips, studied through the logarithmic metric in which
//! every step is a weak contraction.
//!
//! The crate provides
//!
//! * the map family and its inverses ([`PLFamily`]), with a guarded
//!   open-interval clamp for long orbits;
//! * the logarithmic metric, the crossing-gain function, and per-step
//!   isometry/contraction certificates ([`MetricContext`]);
//! * forward, backward, and pullback orbits over two-sided symbol windows
//!   ([`SymbolWindow`], [`forward_orbit`], [`backward_orbit`],
//!   [`pullback_point`]);
//! * bracketed pullback estimation of the global attracting graph and the
//!   experiments built on it: graph invariance, basin dichotomy,
//!   conditional uniformity, the vanishing-attractor demonstration
//!   ([`estimate_phi`], [`check_graph_invariance`], [`basin_dichotomy`],
//!   [`sample_phi_given_future`], [`vanishing_attractor_experiment`]);
//! * closed-form and Monte Carlo exponents, the Lebesgue transfer
//!   identity, synchronization runs, and Kolmogorov-Smirnov checks
//!   ([`fiber_lyapunov`], [`level_exponent`], [`synchronization_run`],
//!   [`ks_statistic`]);
//! * deterministic seeded sampling ([`SeededSampler`]) with stable child
//!   derivation, an index-keyed parallel runner ([`run_indexed`]), and
//!   canonical CSV/JSON reports ([`ExperimentReport`]);
//! * the acceptance battery ([`selftest::run_all`]).
//!
//! All randomness flows through [`SeededSampler`]; every public experiment
//! is a pure function of its seed, including under `RID_THREADS`-bounded
//! parallelism.

pub mod attractor;
pub mod base;
pub mod error;
pub mod fiber;
pub mod metric;
pub mod par;
pub mod report;
pub mod selftest;
pub mod skew;
pub mod stats;

pub use attractor::{
    basin_dichotomy, check_graph_invariance, dense_graph_demo, estimate_phi, estimate_phi_window,
    sample_phi_given_future, vanishing_attractor_experiment, Basin, Histogram, PhiOptions,
    PhiSample, PullbackEstimate, SpreadReport, StageRecord, EDGE_ZONE,
};
pub use base::{splitmix64, SeededSampler, Symbol, SymbolWindow};
pub use error::{Error, Result};
pub use fiber::{clamp_open, PLFamily, MAX_OPEN, MIN_OPEN};
pub use metric::{
    check_deriv_inequality, dist, h, h_inv, MetricContext, StepCertificate, StepClass,
};
pub use par::{run_indexed, thread_cap};
pub use report::{CellValue, ExperimentReport, RunConfig};
pub use skew::{
    backward_orbit, forward_orbit, forward_summary, phi_nm, pullback_point, OrbitSummary,
    OrbitTrace,
};
pub use stats::{
    empirical_fiber_distribution, fiber_lyapunov, fiber_lyapunov_closed_form, interval_defect,
    ks_statistic, ks_two_sample, lebesgue_interval_defects, lebesgue_invariance_defect,
    level_exponent, synchronization_run, ExponentEstimate, KSResult, SyncRun, TwoSampleKS,
};
