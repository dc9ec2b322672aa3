"""Stage benchmarks: measured wall time against the predicted cost models.

The combiner's pairing work grows like N^2/2^b at weight 2, so its log-log
slope against N should sit near 2; the transform stage costs m * 2^m
additions, so its time normalized by m * 2^m should stay flat.  These runs
quantify both on the actual implementation.
"""

from __future__ import annotations

import gc
import math
import time
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .combiner import combine
from .core import generate_instance
from .walsh import fwht_in_place

__all__ = [
    "CombinerPoint",
    "WalshPoint",
    "BenchReport",
    "run_combiner_scaling",
    "run_walsh_scaling",
    "fit_loglog_slope",
    "run_bench",
]


@dataclass(slots=True)
class CombinerPoint:
    log_n: float
    n_samples: int
    b_int: int
    seconds: float
    equations: int
    predicted_log_cost: float


@dataclass(slots=True)
class WalshPoint:
    m: int
    seconds: float
    normalized_ns: float


@dataclass(slots=True)
class BenchReport:
    combiner: list[CombinerPoint]
    combiner_slope: float
    walsh: list[WalshPoint]
    walsh_spread: float


def fit_loglog_slope(xs, ys) -> float:
    """Least-squares slope of log2(y) against log2(x)."""
    lx = np.log2(np.asarray(xs, dtype=float))
    ly = np.log2(np.asarray(ys, dtype=float))
    return float(np.polyfit(lx, ly, 1)[0])


def run_combiner_scaling(
    n: int,
    eps: Fraction,
    log_n_max: float,
    sizes: int = 3,
    reps: int = 1,
    b_int: int | None = None,
    seed: int = 0,
) -> list[CombinerPoint]:
    """Time weight-2 combination at log_n_max - sizes + 1 .. log_n_max.

    The block width defaults to logN_max - 6 (clamped to [0, n-1]) so the
    in-bucket pairing dominates the sort at every size.
    """
    if reps < 1:
        raise ValueError("repetitions must be at least 1")
    if b_int is None:
        b_int = max(0, min(n - 1, int(log_n_max) - 6))
    points = []
    for log_n in range(int(log_n_max) - sizes + 1, int(log_n_max) + 1):
        count = 1 << log_n
        inst = generate_instance(n, eps, count, seed)
        best = math.inf
        equations = 0
        for rep in range(reps + 1):
            # GC off while timing (as timeit does): collector sweeps grow with
            # the number of live objects and would distort the scaling.
            gc.collect()
            gc_was_on = gc.isenabled()
            gc.disable()
            try:
                t0 = time.perf_counter()
                res = combine(inst.samples, 2, b_int, eps)
                elapsed = time.perf_counter() - t0
            finally:
                if gc_was_on:
                    gc.enable()
            if rep:  # rep 0 is an untimed warmup
                best = min(best, elapsed)
            equations = res.count
            del res
        predicted = max(float(log_n), 2.0 * log_n - b_int)
        points.append(CombinerPoint(log_n, count, b_int, best, equations, predicted))
    return points


def run_walsh_scaling(
    ms=(16, 20, 24), reps: int = 3, seed: int = 0
) -> list[WalshPoint]:
    """Best-of-`reps` transform time for each spectrum dimension."""
    if reps < 1:
        raise ValueError("repetitions must be at least 1")
    rng = np.random.default_rng(seed)
    points = []
    for m in ms:
        best = math.inf
        for _ in range(reps):
            a = rng.integers(-(1 << 20), 1 << 20, size=1 << m, dtype=np.int64)
            t0 = time.perf_counter()
            fwht_in_place(a)
            best = min(best, time.perf_counter() - t0)
        points.append(WalshPoint(m, best, best / (m * (1 << m)) * 1e9))
    return points


def run_bench(
    n: int,
    eps: Fraction,
    log_n: float,
    reps: int,
    walsh_ms=(16, 20, 24),
    seed: int = 0,
) -> BenchReport:
    """Full benchmark: combiner scaling over three sizes plus transform
    scaling over `walsh_ms`."""
    if reps < 1:
        raise ValueError("repetitions must be at least 1")
    combiner = run_combiner_scaling(n, eps, log_n, reps=reps, seed=seed)
    slope = fit_loglog_slope(
        [p.n_samples for p in combiner], [p.seconds for p in combiner]
    )
    walsh = run_walsh_scaling(walsh_ms, reps=max(reps, 2), seed=seed)
    norms = [p.normalized_ns for p in walsh]
    spread = max(norms) / min(norms)
    return BenchReport(combiner, slope, walsh, spread)
