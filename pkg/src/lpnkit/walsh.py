"""Hypothesis testing over all sub-key candidates via the fast
Walsh-Hadamard transform.

Each combined equation (g, y) with g supported on coordinates 0..m-1 votes
(-1)^y into an accumulator cell indexed by g; the unnormalized +-1-kernel
transform then yields, for every candidate x in F_2^m, the score

    values[x] = #(equations satisfied by x) - #(equations violated by x)

in m * 2^m additions.  Scores are kept as exact signed integers so the
brute-force reference evaluator must match bit-for-bit.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ResourceBudgetError

__all__ = [
    "WalshSpectrum",
    "fwht_in_place",
    "build_spectrum",
    "best_candidate",
    "top_candidates",
    "brute_force_spectrum",
    "DEFAULT_MAX_SPECTRUM_M",
]

DEFAULT_MAX_SPECTRUM_M = 26

# Transforms larger than this run their bottom levels block-local and the
# remaining levels on cache-sized column chunks, keeping the per-element cost
# roughly flat from L2-resident to RAM-resident sizes.
_BLOCK_POW = 16
_CHUNK_POW = 11


@dataclass(slots=True)
class WalshSpectrum:
    """Signed agreement scores for all 2^m sub-key candidates."""

    m: int
    values: np.ndarray
    total: int


def _fwht_levels(a: np.ndarray, h: int) -> None:
    n = a.shape[0]
    while h < n:
        v = a.reshape(-1, 2, h)
        x = v[:, 0, :]
        y = v[:, 1, :]
        t = x - y
        x += y
        y[:] = t
        h *= 2


def _fwht_array(a: np.ndarray) -> None:
    n = a.shape[0]
    block = 1 << _BLOCK_POW
    if n <= block:
        _fwht_levels(a, 1)
        return
    grid = a.reshape(-1, block)
    rows = grid.shape[0]
    width = 1 << _CHUNK_POW
    for j in range(0, block, width):
        chunk = np.ascontiguousarray(grid[:, j : j + width])
        h = 1
        while h < rows:
            v = chunk.reshape(-1, 2, h, chunk.shape[1])
            x = v[:, 0]
            y = v[:, 1]
            t = x - y
            x += y
            y[:] = t
            h *= 2
        grid[:, j : j + width] = chunk
    for row in grid:
        _fwht_levels(row, 1)


def fwht_in_place(values):
    """Walsh-Hadamard transform (unnormalized, +-1 kernel), in place.

    Accepts a list of ints (exact, any magnitude) or a 1-d numpy integer
    array (vectorized).  Length must be a power of two.  Returns its input.
    """
    n = len(values)
    if n == 0 or n & (n - 1):
        raise ValueError(f"length must be a power of two, got {n}")
    if isinstance(values, np.ndarray):
        _fwht_array(values)
        return values
    h = 1
    while h < n:
        for start in range(0, n, 2 * h):
            for i in range(start, start + h):
                x, y = values[i], values[i + h]
                values[i] = x + y
                values[i + h] = x - y
        h *= 2
    return values


def build_spectrum(
    equations, m: int, max_m: int = DEFAULT_MAX_SPECTRUM_M
) -> WalshSpectrum:
    """Score all 2^m candidates against equations supported on coords 0..m-1.

    `equations` is any sequence of objects with `coeffs` (BitVec) and `rhs`.
    """
    if m < 0:
        raise ValueError(f"sub-dimension must be non-negative, got {m}")
    if m > max_m:
        raise ResourceBudgetError("build_spectrum", 2.0**m, 2.0**max_m)
    acc = np.zeros(1 << m, dtype=np.int64)
    if equations:
        idx = np.empty(len(equations), dtype=np.int64)
        sign = np.empty(len(equations), dtype=np.int64)
        for i, eq in enumerate(equations):
            v = eq.coeffs.value
            if v >> m:
                raise ValueError(
                    f"equation {i} has nonzero coordinates at or above {m}"
                )
            idx[i] = v
            sign[i] = 1 - 2 * eq.rhs
        acc = np.bincount(idx, weights=sign, minlength=1 << m).astype(np.int64)
    fwht_in_place(acc)
    return WalshSpectrum(m, acc, len(equations))


def best_candidate(spectrum: WalshSpectrum) -> tuple[int, int, int]:
    """Highest-scoring candidate, its score, and the runner-up score.

    Combined equations have positive bias, so agreements dominate for the
    true sub-key; ties break toward the smallest index.
    """
    if spectrum.m < 1:
        raise ValueError("need at least one unknown coordinate")
    if spectrum.total < 1:
        raise ValueError("need at least one equation")
    x_hat = int(np.argmax(spectrum.values))
    score = int(spectrum.values[x_hat])
    second = int(np.partition(spectrum.values, -2)[-2])
    return x_hat, score, second


def top_candidates(spectrum: WalshSpectrum, count: int) -> list[int]:
    """Candidate indices in decreasing score order (ties: smaller index first)."""
    count = min(count, len(spectrum.values))
    order = np.argsort(-spectrum.values, kind="stable")
    return [int(i) for i in order[:count]]


def brute_force_spectrum(equations, m: int) -> WalshSpectrum:
    """Reference evaluator: per-candidate counting, no transform.

    Capped at m <= 16; quadratic-style cost 2^m * M.
    """
    if m < 0:
        raise ValueError(f"sub-dimension must be non-negative, got {m}")
    if m > 16:
        raise ValueError(f"brute force capped at m <= 16, got {m}")
    size = 1 << m
    values = np.zeros(size, dtype=np.int64)
    if equations:
        gs = np.empty(len(equations), dtype=np.uint64)
        rhs = np.empty(len(equations), dtype=np.uint64)
        for i, eq in enumerate(equations):
            v = eq.coeffs.value
            if v >> m:
                raise ValueError(
                    f"equation {i} has nonzero coordinates at or above {m}"
                )
            gs[i] = v
            rhs[i] = eq.rhs
        total = len(equations)
        for x in range(size):
            par = np.bitwise_count(gs & np.uint64(x)) & np.uint64(1)
            violated = int(np.count_nonzero(par != rhs))
            values[x] = total - 2 * violated
    return WalshSpectrum(m, values, len(equations))
