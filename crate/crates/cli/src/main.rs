//! `rid`: command-line front end for the coin-flip driven piecewise-linear
//! interval dynamics. Every subcommand emits one self-describing CSV or
//! JSON report (config header, tabular rows, summary lines) on standard
//! output or to `--output`; diagnostics and wall time go to standard
//! error. Identical invocations produce byte-identical reports: all
//! randomness derives from `--seed`, and wall-clock times are never part
//! of the report.
//!
//! Exit codes: 0 success, 1 a built-in check failed (estimate did not
//! converge, statistic exceeded its threshold), 2 usage or validation
//! error.

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rid_core::{
    check_graph_invariance, clamp_open, dense_graph_demo, estimate_phi_window,
    fiber_lyapunov_closed_form, ks_statistic, lebesgue_interval_defects, level_exponent,
    sample_phi_given_future, synchronization_run, vanishing_attractor_experiment, Error,
    ExperimentReport, PLFamily, PhiOptions, Result, RunConfig, SeededSampler, Symbol,
    SymbolWindow,
};

#[derive(Parser)]
#[command(
    name = "rid",
    version,
    about = "Coin-flip driven piecewise-linear interval dynamics: orbits, the attracting graph, and its statistics",
    after_help = "Parallel sections respect the RID_THREADS environment variable; \
                  results are identical for any thread count."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

impl Format {
    fn name(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

#[derive(Args)]
struct OutputArgs {
    /// Report format.
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Write the report to this file instead of standard output.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Trace a forward orbit driven by fair coin flips.
    Simulate {
        /// Family parameter in (0, 1/2).
        #[arg(long, default_value_t = 0.25)]
        c: f64,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Number of steps.
        #[arg(long, default_value_t = 1_000_000)]
        n: usize,
        /// Start point in [0, 1]; drawn uniformly when omitted.
        #[arg(long)]
        x0: Option<f64>,
        /// Steps discarded before the occupation uniformity check.
        #[arg(long, default_value_t = 1_000)]
        burn_in: usize,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Estimate the attracting graph point of a sampled past and check
    /// its equivariance under the shift.
    Attractor {
        #[arg(long, default_value_t = 0.25)]
        c: f64,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Convergence tolerance for the logarithmic bracket width.
        #[arg(long, default_value_t = 1e-8)]
        tol_d: f64,
        /// Deepest pullback depth attempted.
        #[arg(long, default_value_t = 1 << 20)]
        max_depth: usize,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Monte Carlo orbit and fixed-level exponents against their closed
    /// forms.
    Lyapunov {
        #[arg(long, default_value_t = 0.25)]
        c: f64,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Number of steps (at least 2).
        #[arg(long, default_value_t = 1_000_000)]
        n: usize,
        /// Start point in [0, 1]; drawn uniformly when omitted.
        #[arg(long)]
        x0: Option<f64>,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Check the Lebesgue transfer identity on random admissible
    /// intervals.
    Invariance {
        #[arg(long, default_value_t = 0.25)]
        c: f64,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Number of random intervals per run.
        #[arg(long, default_value_t = 1_000)]
        intervals: usize,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Follow two starts under one symbol stream and watch their distance
    /// contract.
    Sync {
        #[arg(long, default_value_t = 0.25)]
        c: f64,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Number of steps.
        #[arg(long, default_value_t = 100_000)]
        n: usize,
        #[arg(long, default_value_t = 0.1)]
        x0: f64,
        #[arg(long, default_value_t = 0.9)]
        y0: f64,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Sample graph points over random pasts, optionally conditioned on a
    /// fixed future, and test uniformity.
    Phidist {
        #[arg(long, default_value_t = 0.25)]
        c: f64,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Ensemble size.
        #[arg(long, default_value_t = 10_000)]
        num_samples: usize,
        /// Fixed future symbols at indices 0, 1, ... as a bit string like
        /// "0110"; empty means unconditioned.
        #[arg(long, default_value = "")]
        future: String,
        #[arg(long, default_value_t = 1e-8)]
        tol_d: f64,
        #[arg(long, default_value_t = 1 << 20)]
        max_depth: usize,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Fix the far future, vary prefix and start: the time-n law stays
    /// uniform while each prefix erases its start point.
    Vanish {
        #[arg(long, default_value_t = 0.25)]
        c: f64,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Prefix length (time of observation).
        #[arg(long, default_value_t = 200)]
        n: usize,
        /// Number of random prefixes.
        #[arg(long, default_value_t = 10_000)]
        num_pasts: usize,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Histogram of conditional graph points: every bin is hit, so the
    /// graph's closure fills the square.
    Dense {
        #[arg(long, default_value_t = 0.25)]
        c: f64,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Number of equal-width bins (at least 10).
        #[arg(long, default_value_t = 20)]
        bins: usize,
        /// Ensemble size.
        #[arg(long, default_value_t = 10_000)]
        num_samples: usize,
        /// Cylinder symbols at indices 0, 1, ... as a bit string; empty
        /// means no conditioning.
        #[arg(long, default_value = "")]
        future: String,
        #[arg(long, default_value_t = 1e-8)]
        tol_d: f64,
        #[arg(long, default_value_t = 1 << 20)]
        max_depth: usize,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Run the full acceptance battery (nine criteria) and report each
    /// verdict.
    Selftest {
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[command(flatten)]
        out: OutputArgs,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(pass) => {
            if pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::from(2)
        }
    }
}

fn run(command: Command) -> std::result::Result<bool, String> {
    let started = Instant::now();
    let (mut report, pass, out) = build(command).map_err(|e| e.to_string())?;
    report.wall_time = started.elapsed();
    let body = match out.format {
        Format::Csv => report.to_csv(),
        Format::Json => report.to_json(),
    };
    match &out.output {
        Some(path) => {
            std::fs::write(path, body).map_err(|e| format!("cannot write {path:?}: {e}"))?
        }
        None => std::io::stdout()
            .write_all(body.as_bytes())
            .map_err(|e| format!("cannot write standard output: {e}"))?,
    }
    eprintln!("wall time: {:.2?}", report.wall_time);
    Ok(pass)
}

fn build(command: Command) -> Result<(ExperimentReport, bool, OutputArgs)> {
    match command {
        Command::Simulate {
            c,
            seed,
            n,
            x0,
            burn_in,
            out,
        } => simulate(c, seed, n, x0, burn_in, out),
        Command::Attractor {
            c,
            seed,
            tol_d,
            max_depth,
            out,
        } => attractor(c, seed, tol_d, max_depth, out),
        Command::Lyapunov { c, seed, n, x0, out } => lyapunov(c, seed, n, x0, out),
        Command::Invariance {
            c,
            seed,
            intervals,
            out,
        } => invariance(c, seed, intervals, out),
        Command::Sync {
            c,
            seed,
            n,
            x0,
            y0,
            out,
        } => sync(c, seed, n, x0, y0, out),
        Command::Phidist {
            c,
            seed,
            num_samples,
            future,
            tol_d,
            max_depth,
            out,
        } => phidist(c, seed, num_samples, &future, tol_d, max_depth, out),
        Command::Vanish {
            c,
            seed,
            n,
            num_pasts,
            out,
        } => vanish(c, seed, n, num_pasts, out),
        Command::Dense {
            c,
            seed,
            bins,
            num_samples,
            future,
            tol_d,
            max_depth,
            out,
        } => dense(c, seed, bins, num_samples, &future, tol_d, max_depth, out),
        Command::Selftest { seed, out } => selftest(seed, out),
    }
}

fn columns(names: &[&str]) -> Vec<String> {
    names.iter().map(|s| s.to_string()).collect()
}

fn finish_config(config: &mut RunConfig, out: &OutputArgs) {
    config.push("format", out.format.name());
    if let Some(path) = &out.output {
        config.push("output", path.display().to_string());
    }
}

/// Parses a future/cylinder bit string like "0110" into a window at
/// offset 0; empty input gives the empty window.
fn parse_future(bits: &str) -> Result<SymbolWindow> {
    if bits.is_empty() {
        return Ok(SymbolWindow::empty());
    }
    let digits = bits
        .chars()
        .map(|ch| match ch {
            '0' => Ok(0u8),
            '1' => Ok(1u8),
            other => Err(Error::InvalidArgument(format!(
                "future must be a string of 0s and 1s, found {other:?}"
            ))),
        })
        .collect::<Result<Vec<u8>>>()?;
    SymbolWindow::from_bits(0, &digits)
}

fn window_bits(window: &SymbolWindow) -> String {
    window
        .symbols()
        .iter()
        .map(|s| char::from(b'0' + s.as_bit()))
        .collect()
}

fn require_unit_interval(what: &'static str, x: f64) -> Result<()> {
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

/// Log-slope of `f_symbol` at `x` with the left-slope convention at the
/// kink, matching the orbit statistics in the core crate.
fn log_slope(fam: &PLFamily, symbol: Symbol, x: f64, ln_a: f64, ln_b: f64) -> f64 {
    let left = x <= fam.breakpoint(symbol);
    match symbol {
        Symbol::Zero => {
            if left {
                ln_a
            } else {
                ln_b
            }
        }
        Symbol::One => {
            if left {
                ln_b
            } else {
                ln_a
            }
        }
    }
}

fn simulate(
    c: f64,
    seed: u64,
    n: usize,
    x0: Option<f64>,
    burn_in: usize,
    out: OutputArgs,
) -> Result<(ExperimentReport, bool, OutputArgs)> {
    let fam = PLFamily::new(c)?;
    if n == 0 {
        return Err(Error::InvalidArgument("n must be positive".into()));
    }
    if burn_in >= n {
        return Err(Error::InvalidArgument(format!(
            "burn_in ({burn_in}) must be smaller than n ({n})"
        )));
    }
    let mut config = RunConfig::new();
    config.push("subcommand", "simulate");
    config.push("c", c);
    config.push("seed", seed);
    config.push("n", n as u64);
    if let Some(v) = x0 {
        config.push("x0", v);
    }
    config.push("burn_in", burn_in as u64);
    finish_config(&mut config, &out);

    let mut sampler = SeededSampler::new(seed);
    let start = match x0 {
        Some(v) => {
            require_unit_interval("start point x0", v)?;
            v
        }
        None => sampler.uniform_unit(),
    };
    let (ln_a, ln_b) = (fam.a().ln(), fam.b().ln());
    let (mut x, clamped) = clamp_open(start);
    let mut clamp_count = clamped as usize;
    let mut report = report_with(config, &["step", "x", "symbol", "log_deriv"]);
    let mut sum_ld = 0.0f64;
    let mut breakpoint_hits = 0u64;
    let (mut visits_left, mut visits_right) = (0u64, 0u64);
    let mut tail = Vec::with_capacity(n - burn_in);
    for k in 0..n {
        if k >= burn_in {
            tail.push(x);
        }
        let s = sampler.sample_symbol();
        if fam.is_at_breakpoint(s, x) {
            breakpoint_hits += 1;
        }
        let ld = log_slope(&fam, s, x, ln_a, ln_b);
        sum_ld += ld;
        report.push_row(vec![
            (k as u64).into(),
            x.into(),
            u64::from(s.as_bit()).into(),
            ld.into(),
        ]);
        let (next, clamped) = clamp_open(fam.apply(s, x)?);
        clamp_count += clamped as usize;
        x = next;
        if x <= 0.5 {
            visits_left += 1;
        }
        if x >= 0.5 {
            visits_right += 1;
        }
    }
    let ks = ks_statistic(&tail)?;
    report.push_summary("final_x", x);
    report.push_summary("mean_log_deriv", sum_ld / n as f64);
    report.push_summary("ks_vs_uniform", ks.statistic);
    report.push_summary("ks_critical_001", ks.critical_001);
    report.push_summary("breakpoint_hits", breakpoint_hits);
    report.push_summary("visits_left", visits_left);
    report.push_summary("visits_right", visits_right);
    report.clamp_count = clamp_count;
    Ok((report, true, out))
}

fn attractor(
    c: f64,
    seed: u64,
    tol_d: f64,
    max_depth: usize,
    out: OutputArgs,
) -> Result<(ExperimentReport, bool, OutputArgs)> {
    let fam = PLFamily::new(c)?;
    let opts = PhiOptions {
        tol_d,
        max_depth,
        ..PhiOptions::default()
    };
    let mut config = RunConfig::new();
    config.push("subcommand", "attractor");
    config.push("c", c);
    config.push("seed", seed);
    config.push("tol_d", tol_d);
    config.push("max_depth", max_depth as u64);
    finish_config(&mut config, &out);

    // Window [-max_depth, 0]: the symbol at 0 drives the equivariance
    // check, the rest is the past the estimate pulls back along.
    let mut sampler = SeededSampler::new(seed).derive(0);
    let window = sampler.sample_window(-(max_depth as i64), max_depth + 1);
    let past = window.slice(window.offset(), 0)?;
    let est = estimate_phi_window(&fam, &past, &opts)?;
    let defect = if est.converged {
        match check_graph_invariance(&fam, &window, &opts) {
            Ok(d) => Some(d),
            Err(Error::Unconverged) => None,
            Err(e) => return Err(e),
        }
    } else {
        None
    };

    let mut report = report_with(config, &["stage", "depth", "bracket_lo", "bracket_hi", "d_width"]);
    for (i, stage) in est.stages.iter().enumerate() {
        report.push_row(vec![
            (i as u64).into(),
            (stage.depth as u64).into(),
            stage.bracket_lo.into(),
            stage.bracket_hi.into(),
            stage.d_width.into(),
        ]);
    }
    report.push_summary("phi", est.value);
    report.push_summary("bracket_lo", est.bracket_lo);
    report.push_summary("bracket_hi", est.bracket_hi);
    report.push_summary("depth", est.depth as u64);
    report.push_summary("d_width", est.d_width);
    report.push_summary("converged", est.converged);
    report.push_summary("degenerate", est.degenerate);
    match defect {
        Some(d) => report.push_summary("invariance_defect", d),
        None => report.push_summary("invariance_defect", "unconverged"),
    }
    report.clamp_count = est.clamp_count;
    let pass = est.converged && !est.degenerate && defect.is_some_and(|d| d <= 1e-6);
    Ok((report, pass, out))
}

fn lyapunov(
    c: f64,
    seed: u64,
    n: usize,
    x0: Option<f64>,
    out: OutputArgs,
) -> Result<(ExperimentReport, bool, OutputArgs)> {
    let fam = PLFamily::new(c)?;
    if n < 2 {
        return Err(Error::InvalidArgument("n must be at least 2".into()));
    }
    let mut config = RunConfig::new();
    config.push("subcommand", "lyapunov");
    config.push("c", c);
    config.push("seed", seed);
    config.push("n", n as u64);
    if let Some(v) = x0 {
        config.push("x0", v);
    }
    finish_config(&mut config, &out);

    let parent = SeededSampler::new(seed);
    let batches = 100usize.min(n);
    let mut report = report_with(
        config,
        &["quantity", "batch", "count", "sum_log_deriv", "sumsq_log_deriv"],
    );

    // Orbit exponent: one long orbit, accumulated per batch.
    let mut sampler = parent.derive(0);
    let start = match x0 {
        Some(v) => {
            require_unit_interval("start point x0", v)?;
            v
        }
        None => sampler.uniform_unit(),
    };
    let (ln_a, ln_b) = (fam.a().ln(), fam.b().ln());
    let (mut x, clamped) = clamp_open(start);
    let mut clamp_count = clamped as usize;
    let mut breakpoint_hits = 0u64;
    let (mut total, mut totalsq) = (0.0f64, 0.0f64);
    for b in 0..batches {
        let (from, to) = (b * n / batches, (b + 1) * n / batches);
        let (mut sum, mut sumsq) = (0.0f64, 0.0f64);
        for _ in from..to {
            let s = sampler.sample_symbol();
            if fam.is_at_breakpoint(s, x) {
                breakpoint_hits += 1;
            }
            let ld = log_slope(&fam, s, x, ln_a, ln_b);
            sum += ld;
            sumsq += ld * ld;
            let (next, clamped) = clamp_open(fam.apply(s, x)?);
            clamp_count += clamped as usize;
            x = next;
        }
        total += sum;
        totalsq += sumsq;
        report.push_row(vec![
            "fiber".into(),
            (b as u64).into(),
            ((to - from) as u64).into(),
            sum.into(),
            sumsq.into(),
        ]);
    }
    let estimate = total / n as f64;
    let std_error = std_error_from(total, totalsq, n);
    let closed_form = fiber_lyapunov_closed_form(&fam);
    let z = (estimate - closed_form) / std_error;

    // Fixed-level exponent: the log-slope at the bottom level under the
    // same coin, from an independent child stream.
    let mut level_sampler = parent.derive(1);
    let (mut ltotal, mut ltotalsq) = (0.0f64, 0.0f64);
    for b in 0..batches {
        let (from, to) = (b * n / batches, (b + 1) * n / batches);
        let (mut sum, mut sumsq) = (0.0f64, 0.0f64);
        for _ in from..to {
            let ld = match level_sampler.sample_symbol() {
                Symbol::Zero => ln_a,
                Symbol::One => ln_b,
            };
            sum += ld;
            sumsq += ld * ld;
        }
        ltotal += sum;
        ltotalsq += sumsq;
        report.push_row(vec![
            "level".into(),
            (b as u64).into(),
            ((to - from) as u64).into(),
            sum.into(),
            sumsq.into(),
        ]);
    }
    let level_estimate = ltotal / n as f64;
    let level_std_error = std_error_from(ltotal, ltotalsq, n);
    let level_closed_form = level_exponent(&fam, 0)?;
    let level_z = (level_estimate - level_closed_form) / level_std_error;

    report.push_summary("estimate", estimate);
    report.push_summary("std_error", std_error);
    report.push_summary("closed_form", closed_form);
    report.push_summary("z", z);
    report.push_summary("level_estimate", level_estimate);
    report.push_summary("level_std_error", level_std_error);
    report.push_summary("level_closed_form", level_closed_form);
    report.push_summary("level_z", level_z);
    report.push_summary("breakpoint_hits", breakpoint_hits);
    report.clamp_count = clamp_count;
    let pass = z.abs() <= 3.0 && level_z.abs() <= 3.0;
    Ok((report, pass, out))
}

fn std_error_from(sum: f64, sumsq: f64, n: usize) -> f64 {
    let nf = n as f64;
    let variance = ((sumsq - sum * sum / nf) / (nf - 1.0)).max(0.0);
    (variance / nf).sqrt()
}

fn invariance(
    c: f64,
    seed: u64,
    intervals: usize,
    out: OutputArgs,
) -> Result<(ExperimentReport, bool, OutputArgs)> {
    let fam = PLFamily::new(c)?;
    if intervals == 0 {
        return Err(Error::InvalidArgument("intervals must be positive".into()));
    }
    let mut config = RunConfig::new();
    config.push("subcommand", "invariance");
    config.push("c", c);
    config.push("seed", seed);
    config.push("intervals", intervals as u64);
    finish_config(&mut config, &out);

    let mut sampler = SeededSampler::new(seed).derive(0);
    let mut pairs = Vec::with_capacity(intervals);
    for _ in 0..intervals {
        let left_half = sampler.uniform_unit() < 0.5;
        let (u, v) = (sampler.uniform_unit(), sampler.uniform_unit());
        let (lo, hi) = if u <= v { (u, v) } else { (v, u) };
        pairs.push(if left_half {
            (0.5 * lo, 0.5 * hi)
        } else {
            (0.5 + 0.5 * lo, 0.5 + 0.5 * hi)
        });
    }
    let defects = lebesgue_interval_defects(&fam, &pairs)?;
    let mut report = report_with(config, &["index", "lo", "hi", "defect"]);
    let mut max_defect = 0.0f64;
    for (i, ((lo, hi), defect)) in pairs.iter().zip(&defects).enumerate() {
        max_defect = max_defect.max(defect.abs());
        report.push_row(vec![
            (i as u64).into(),
            (*lo).into(),
            (*hi).into(),
            (*defect).into(),
        ]);
    }
    report.push_summary("max_defect", max_defect);
    report.push_summary("intervals", intervals as u64);
    let pass = max_defect <= 1e-12;
    Ok((report, pass, out))
}

fn sync(
    c: f64,
    seed: u64,
    n: usize,
    x0: f64,
    y0: f64,
    out: OutputArgs,
) -> Result<(ExperimentReport, bool, OutputArgs)> {
    let fam = PLFamily::new(c)?;
    let mut config = RunConfig::new();
    config.push("subcommand", "sync");
    config.push("c", c);
    config.push("seed", seed);
    config.push("n", n as u64);
    config.push("x0", x0);
    config.push("y0", y0);
    finish_config(&mut config, &out);

    let mut sampler = SeededSampler::new(seed).derive(0);
    let run = synchronization_run(&fam, &mut sampler, x0, y0, n)?;
    let mut report = report_with(config, &["step", "d"]);
    let mut monotone = true;
    let mut steps_to_sync: i64 = -1;
    for (k, &d) in run.d_seq.iter().enumerate() {
        if k > 0 && d > run.d_seq[k - 1] + 1e-12 {
            monotone = false;
        }
        if steps_to_sync < 0 && d <= 1e-6 {
            steps_to_sync = k as i64;
        }
        report.push_row(vec![(k as u64).into(), d.into()]);
    }
    let final_d = *run.d_seq.last().expect("sequence is non-empty");
    report.push_summary("final_d", final_d);
    report.push_summary("monotone", monotone);
    report.push_summary("synced", final_d <= 1e-6);
    report.push_summary("steps_to_sync", steps_to_sync);
    report.clamp_count = run.clamp_count;
    Ok((report, monotone, out))
}

fn phidist(
    c: f64,
    seed: u64,
    num_samples: usize,
    future: &str,
    tol_d: f64,
    max_depth: usize,
    out: OutputArgs,
) -> Result<(ExperimentReport, bool, OutputArgs)> {
    let fam = PLFamily::new(c)?;
    let window = parse_future(future)?;
    let opts = PhiOptions {
        tol_d,
        max_depth,
        ..PhiOptions::default()
    };
    let mut config = RunConfig::new();
    config.push("subcommand", "phidist");
    config.push("c", c);
    config.push("seed", seed);
    config.push("num_samples", num_samples as u64);
    config.push("future", future);
    config.push("tol_d", tol_d);
    config.push("max_depth", max_depth as u64);
    finish_config(&mut config, &out);

    let sampler = SeededSampler::new(seed).derive(0);
    let sample = sample_phi_given_future(&fam, &window, num_samples, &sampler, &opts)?;
    let mut report = report_with(config, &["index", "phi"]);
    for (i, &phi) in sample.values.iter().enumerate() {
        report.push_row(vec![(i as u64).into(), phi.into()]);
    }
    let pass = if sample.values.is_empty() {
        report.push_summary("ks_vs_uniform", f64::NAN);
        report.push_summary("ks_critical_001", f64::NAN);
        false
    } else {
        let ks = ks_statistic(&sample.values)?;
        report.push_summary("ks_vs_uniform", ks.statistic);
        report.push_summary("ks_critical_001", ks.critical_001);
        ks.statistic <= ks.critical_001
    };
    report.push_summary("converged", sample.values.len() as u64);
    report.push_summary("unconverged", sample.unconverged as u64);
    report.push_summary("requested", sample.requested as u64);
    Ok((report, pass, out))
}

fn vanish(
    c: f64,
    seed: u64,
    n: usize,
    num_pasts: usize,
    out: OutputArgs,
) -> Result<(ExperimentReport, bool, OutputArgs)> {
    let fam = PLFamily::new(c)?;
    if num_pasts == 0 {
        return Err(Error::InvalidArgument("num_pasts must be positive".into()));
    }
    let mut config = RunConfig::new();
    config.push("subcommand", "vanish");
    config.push("c", c);
    config.push("seed", seed);
    config.push("n", n as u64);
    config.push("num_pasts", num_pasts as u64);
    finish_config(&mut config, &out);

    let parent = SeededSampler::new(seed);
    let future_seed = parent.derive(1).seed();
    let spread = vanishing_attractor_experiment(&fam, future_seed, n, num_pasts, &parent.derive(2));
    let mut report = report_with(config, &["kind", "index", "value"]);
    for (i, &x) in spread.xs.iter().enumerate() {
        report.push_row(vec!["prefix".into(), (i as u64).into(), x.into()]);
    }
    for (i, &x) in spread.residual_finals.iter().enumerate() {
        report.push_row(vec!["probe".into(), ((i + 1) as u64).into(), x.into()]);
    }
    let critical = 1.63 / (num_pasts as f64).sqrt();
    report.push_summary("ks_vs_uniform", spread.ks_vs_uniform);
    report.push_summary("ks_critical_001", critical);
    report.push_summary("min", spread.min);
    report.push_summary("max", spread.max);
    report.push_summary("residual_x0_spread", spread.residual_x0_spread);
    report.push_summary("future_seed", spread.future_seed);
    report.push_summary("fixed_future", window_bits(&spread.fixed_future));
    report.push_summary("fixed_future_offset", spread.fixed_future.offset());
    let pass = spread.ks_vs_uniform <= critical && spread.residual_x0_spread <= 1e-6;
    Ok((report, pass, out))
}

#[allow(clippy::too_many_arguments)]
fn dense(
    c: f64,
    seed: u64,
    bins: usize,
    num_samples: usize,
    future: &str,
    tol_d: f64,
    max_depth: usize,
    out: OutputArgs,
) -> Result<(ExperimentReport, bool, OutputArgs)> {
    let fam = PLFamily::new(c)?;
    let cylinder = parse_future(future)?;
    let opts = PhiOptions {
        tol_d,
        max_depth,
        ..PhiOptions::default()
    };
    let mut config = RunConfig::new();
    config.push("subcommand", "dense");
    config.push("c", c);
    config.push("seed", seed);
    config.push("bins", bins as u64);
    config.push("num_samples", num_samples as u64);
    config.push("future", future);
    config.push("tol_d", tol_d);
    config.push("max_depth", max_depth as u64);
    finish_config(&mut config, &out);

    let sampler = SeededSampler::new(seed).derive(0);
    let hist = dense_graph_demo(&fam, &cylinder, num_samples, &sampler, bins, &opts)?;
    let mut report = report_with(config, &["bin", "lo", "hi", "count"]);
    for (b, &count) in hist.counts.iter().enumerate() {
        report.push_row(vec![
            (b as u64).into(),
            (b as f64 / bins as f64).into(),
            ((b + 1) as f64 / bins as f64).into(),
            count.into(),
        ]);
    }
    let occupied = hist.counts.iter().filter(|&&k| k > 0).count();
    report.push_summary("total", hist.total);
    report.push_summary("unconverged", hist.unconverged as u64);
    report.push_summary("occupied_bins", occupied as u64);
    report.push_summary("all_bins_occupied", occupied == bins);
    Ok((report, occupied == bins, out))
}

fn selftest(seed: u64, out: OutputArgs) -> Result<(ExperimentReport, bool, OutputArgs)> {
    let results = rid_core::selftest::run_all(seed);
    for r in &results {
        eprintln!(
            "criterion {} ({}): {} metric={:.6e} threshold={:.6e} runtime={:.2?}",
            r.index,
            r.name,
            if r.pass && r.runtime_ok { "PASS" } else { "FAIL" },
            r.metric,
            r.threshold,
            r.runtime,
        );
    }
    let mut config = RunConfig::new();
    config.push("subcommand", "selftest");
    config.push("seed", seed);
    finish_config(&mut config, &out);
    let pass = results.iter().all(|r| r.pass && r.runtime_ok);
    let report = rid_core::selftest::build_report(config, &results);
    Ok((report, pass, out))
}

fn report_with(config: RunConfig, names: &[&str]) -> ExperimentReport {
    ExperimentReport::new(config, columns(names))
}
