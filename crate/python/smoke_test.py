#!/usr/bin/env python3
"""Smoke test for the rid_py extension module.

Builds nothing itself: it locates the shared library produced by
`cargo build -p rid-py` (release or debug), stages it under the import
name `rid_py`, and exercises the bindings end to end. Exits non-zero on
the first failed check.
"""

import math
import shutil
import sys
import tempfile
from pathlib import Path

REPO_ROOT = Path(__file__).resolve().parent.parent


def stage_module() -> None:
    candidates = [
        REPO_ROOT / "target" / "release" / "librid_py.so",
        REPO_ROOT / "target" / "debug" / "librid_py.so",
    ]
    for built in candidates:
        if built.exists():
            stage = Path(tempfile.mkdtemp(prefix="rid-py-smoke-"))
            shutil.copy2(built, stage / "rid_py.so")
            sys.path.insert(0, str(stage))
            return
    sys.exit(
        "librid_py.so not found; run `cargo build -p rid-py` "
        "(optionally --release) first"
    )


stage_module()
import rid_py  # noqa: E402


def check(label: str, condition: bool) -> None:
    status = "ok" if condition else "FAIL"
    print(f"{status:4} {label}")
    if not condition:
        sys.exit(1)


def close(a: float, b: float, tol: float = 1e-12) -> bool:
    return abs(a - b) <= tol


c = 0.25
fam = rid_py.PLFamily(c)

# Family geometry: slopes, mirror symmetry, kinks landing on 1/2.
check("slope a = 1/(2(1-c))", close(fam.a, 1.0 / (2.0 * (1.0 - c))))
check("slope b = 1/(2c)", close(fam.b, 1.0 / (2.0 * c)))
check("f0 kink maps to 1/2", close(fam.apply(0, fam.breakpoint(0)), 0.5))
check("f1 kink maps to 1/2", close(fam.apply(1, fam.breakpoint(1)), 0.5))
check(
    "mirror symmetry f1(x) = 1 - f0(1-x)",
    all(close(fam.apply(1, x), 1.0 - fam.apply(0, 1.0 - x)) for x in (0.1, 0.4, 0.55, 0.9)),
)
check(
    "inverse branches undo the maps",
    all(
        close(fam.apply_inverse(s, fam.apply(s, x)), x, 1e-14)
        for s in (0, 1)
        for x in (0.2, 0.49, 0.51, 0.8)
    ),
)
check("left-slope convention at the kink", close(fam.derivative(0, fam.breakpoint(0)), fam.a))

# Rejections surface as ValueError.
for bad in (0.0, 0.5, 0.7):
    try:
        rid_py.PLFamily(bad)
    except ValueError:
        pass
    else:
        check(f"PLFamily({bad}) rejected", False)
check("parameter validation raises ValueError", True)

# Logarithmic chart and metric.
check("h(1/4) = -ln 2", close(rid_py.h(0.25), -math.log(2.0)))
check("h is odd about 1/2", close(rid_py.h(0.75), math.log(2.0)))
check("h_inv inverts h", close(rid_py.h_inv(rid_py.h(0.3)), 0.3, 1e-14))
check(
    "metric is additive on ordered triples",
    close(
        rid_py.dist(0.1, 0.4) + rid_py.dist(0.4, 0.8),
        rid_py.dist(0.1, 0.8),
        1e-12,
    ),
)

# Orbits: forward trace, backward branches, and their consistency.
states, log_derivs = rid_py.forward_orbit(fam, [0, 1, 1, 0], 0.3)
check("forward orbit has n+1 states", len(states) == 5 and len(log_derivs) == 4)
check("forward orbit starts at x0", states[0] == 0.3)
back_states, branches, _ = rid_py.backward_orbit(fam, [0, 1, 1, 0], 0.3)
check("backward orbit returns branch choices", len(branches) == 4)
check(
    "pullback of the backward endpoint recovers the start",
    close(rid_py.pullback_point(fam, [0, 1, 1, 0], back_states[-1]), 0.3, 1e-12),
)

# Graph point of a sampled past: convergence and shift-equivariance.
sampler = rid_py.SeededSampler(42)
est = rid_py.estimate_phi_sampled(fam, sampler.derive(7))
check("pullback estimate converges", est.converged and not est.degenerate)
check("bracket width below tolerance", est.d_width <= 1e-8)
check("estimate lies in its bracket", est.bracket_lo <= est.value <= est.bracket_hi)
check("stages recorded", len(est.stages) >= 1 and est.stages[-1][0] == est.depth)

word = sampler.derive(8).sample_bits(4096)
defect = rid_py.check_graph_invariance(fam, word)
check("graph equivariance defect below 1e-6", defect <= 1e-6)

est_word = rid_py.estimate_phi(fam, word[:-1])
width = max(est_word.bracket_hi - est_word.bracket_lo, 1e-12)
check(
    "basin dichotomy below/above the graph point",
    rid_py.basin_dichotomy(fam, word[:-1], max(est_word.value - 10 * width, 1e-9), 4000)
    == "to_zero"
    and rid_py.basin_dichotomy(fam, word[:-1], min(est_word.value + 10 * width, 1 - 1e-9), 4000)
    == "to_one",
)

# Exponents against their closed forms.
lyap = rid_py.fiber_lyapunov(fam, rid_py.SeededSampler(7), 200_000)
check("orbit exponent has a closed form", lyap.closed_form is not None)
check(
    "orbit exponent matches closed form within 3 sigma",
    abs(lyap.estimate - lyap.closed_form) <= 3.0 * lyap.std_error,
)
check(
    "closed form value",
    close(rid_py.fiber_lyapunov_closed_form(fam), -0.130812035941137, 1e-12),
)
check(
    "level exponent value",
    close(rid_py.level_exponent(fam, 0), 0.5 * math.log(1.0 / (4.0 * c * (1.0 - c)))),
)

# Transfer identity on a deterministic grid of intervals.
intervals = [(k / 40.0, (k + 1) / 40.0) for k in range(20)]
intervals += [(0.5 + k / 40.0, 0.5 + (k + 1) / 40.0) for k in range(20)]
check(
    "Lebesgue transfer defect below 1e-12",
    rid_py.lebesgue_invariance_defect(fam, intervals) <= 1e-12,
)

# Synchronization of two starts under one symbol stream.
d_seq = rid_py.synchronization_run(fam, rid_py.SeededSampler(3), 0.1, 0.9, 2000)
check("synchronization distances never increase", all(b <= a + 1e-12 for a, b in zip(d_seq, d_seq[1:])))
check("orbits synchronize", d_seq[-1] <= 1e-6)

# Kolmogorov-Smirnov: the centered grid attains exactly 1/(2n).
grid = [(k + 0.5) / 100 for k in range(100)]
stat, crit = rid_py.ks_statistic(grid)
check("KS of the centered grid is 1/(2n)", close(stat, 0.005) and close(crit, 0.163))
two_stat, _ = rid_py.ks_two_sample(grid, grid)
check("two-sample KS of identical samples is 0", two_stat == 0.0)

stat, crit = rid_py.empirical_fiber_distribution(fam, rid_py.SeededSampler(11), 0.3, 60_000, 1_000)
check("occupation measure looks uniform", stat <= crit)

# Conditional sampling: deterministic under a fixed seed, independent of
# the conditioning future.
values_a, dropped_a = rid_py.sample_phi_given_future(fam, [], 200, rid_py.SeededSampler(5))
values_b, dropped_b = rid_py.sample_phi_given_future(fam, [], 200, rid_py.SeededSampler(5))
values_c, _ = rid_py.sample_phi_given_future(fam, [0, 1, 1], 200, rid_py.SeededSampler(5))
check("same seed, same sample", values_a == values_b and dropped_a == dropped_b)
check("future conditioning changes nothing", values_a == values_c)
stat, crit = rid_py.ks_statistic(values_a)
check("graph-point law looks uniform", stat <= crit)

counts, total, _ = rid_py.dense_graph_demo(fam, -3, [0, 1, 1], 400, rid_py.SeededSampler(9), bins=10)
check("dense demo fills every bin", min(counts) > 0 and total == sum(counts))

spread = rid_py.vanishing_attractor_experiment(fam, 123, 200, 800, rid_py.SeededSampler(17))
check("time-n law stays uniform for a fixed future", spread.ks_vs_uniform <= 1.63 / math.sqrt(800))
check("start point is forgotten", spread.residual_x0_spread <= 1e-6)
check("fixed future recorded at offset n", spread.fixed_future_offset == 200)

print("smoke test passed")
