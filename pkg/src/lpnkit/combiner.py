"""w-ary linear combination via birthday bucketing.

To obtain equations that vanish on the last b coordinates, all (w/2)-ary
XOR combinations of the samples are enumerated, grouped into buckets by the
bit pattern of their last b coordinates, and paired inside each bucket: two
half-combinations agreeing on the suffix cancel it.  Pairs sharing a sample
index are dropped (their effective weight is below w, which would break the
piling-up bias model), as are pairs whose XOR is the all-zero vector (they
carry no key information).  Output order is canonical - sorted by coefficient
bytes, then right-hand side, then index set - regardless of grouping order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations

import numpy as np

from .core import BitVec, Sample, piling_up_bias, required_samples
from .errors import ResourceBudgetError

__all__ = [
    "HalfCombination",
    "CombinedEquation",
    "CombineResult",
    "enumerate_halves",
    "bucket_and_pair",
    "combine",
    "DEFAULT_MAX_HALVES",
]

DEFAULT_MAX_HALVES = 1 << 26


@dataclass(slots=True)
class HalfCombination:
    """XOR of w/2 distinct samples, remembering which ones."""

    coeffs: BitVec
    rhs: int
    indices: tuple[int, ...]


@dataclass(slots=True)
class CombinedEquation:
    """XOR of w distinct samples whose last b coordinates cancel.

    `bias` is the piled-up bias 2^(w-1) eps^w of the combined noise bit when
    the source bias is known, else None.
    """

    coeffs: BitVec
    rhs: int
    indices: tuple[int, ...]
    bias: Fraction | None = None


def enumerate_halves(
    samples: list[Sample], half_weight: int, max_halves: int = DEFAULT_MAX_HALVES
) -> list[HalfCombination]:
    """All C(N, half_weight) XOR combinations of `half_weight` distinct samples."""
    if not 1 <= half_weight <= 3:
        raise ValueError(f"half weight must be in 1..3, got {half_weight}")
    n_samples = len(samples)
    total = math.comb(n_samples, half_weight)
    if total > max_halves:
        raise ResourceBudgetError("enumerate_halves", total, max_halves)
    if half_weight == 1:
        return [HalfCombination(s.coeffs, s.rhs, (i,)) for i, s in enumerate(samples)]
    out = []
    for idx in combinations(range(n_samples), half_weight):
        v = 0
        r = 0
        for i in idx:
            v ^= samples[i].coeffs.value
            r ^= samples[i].rhs
        out.append(HalfCombination(BitVec(samples[0].coeffs.n, v), r, idx))
    return out


def _pair_bucketed(halves: list[HalfCombination], n: int, b_int: int):
    """Yield raw (value, rhs, indices) pairings; caller wraps and sorts."""
    shift = n - b_int
    keyed = sorted(
        (h.coeffs.value >> shift, h.coeffs.value, h.rhs, h.indices) for h in halves
    )
    out = []
    single = halves and len(halves[0].indices) == 1
    i = 0
    total = len(keyed)
    while i < total:
        j = i
        key = keyed[i][0]
        while j < total and keyed[j][0] == key:
            j += 1
        for a in range(i, j):
            _, va, ra, ia = keyed[a]
            for c in range(a + 1, j):
                _, vc, rc, ic = keyed[c]
                v = va ^ vc
                if v == 0:
                    continue
                if not single and not set(ia).isdisjoint(ic):
                    continue
                out.append((v, ra ^ rc, tuple(sorted(ia + ic))))
        i = j
    return out


def _canonical_order(raw, n: int) -> None:
    """Sort (value, rhs, indices) triples by coefficient bytes (byte 0 first),
    then rhs, then indices, in place."""
    nbytes = (n + 7) // 8
    if n <= 63 and len(raw) > 4096:
        # byte-lexicographic order of the little-endian serialization equals
        # numeric order after reversing the bytes; lexsort keys run last=primary
        vals = np.fromiter((t[0] for t in raw), np.int64, len(raw))
        swapped = np.zeros_like(vals)
        for i in range(nbytes):
            swapped |= ((vals >> (8 * i)) & 0xFF) << (8 * (nbytes - 1 - i))
        width = len(raw[0][2])
        keys = [
            np.fromiter((t[2][j] for t in raw), np.int64, len(raw))
            for j in range(width - 1, -1, -1)
        ]
        keys.append(np.fromiter((t[1] for t in raw), np.int64, len(raw)))
        keys.append(swapped)
        order = np.lexsort(keys)
        raw[:] = [raw[i] for i in order]
    else:
        raw.sort(key=lambda t: (t[0].to_bytes(nbytes, "little"), t[1], t[2]))


def bucket_and_pair(
    halves: list[HalfCombination], b_int: int, bias: Fraction | None = None
) -> list[CombinedEquation]:
    """Group halves by their last-b-coordinate pattern and pair within groups.

    Emits one equation per unordered pair of index-disjoint halves in the
    same bucket whose XOR is non-zero, canonically sorted.
    """
    if not halves:
        return []
    n = halves[0].coeffs.n
    if not 0 <= b_int <= n:
        raise ValueError(f"block width {b_int} outside [0, {n}]")
    raw = _pair_bucketed(halves, n, b_int)
    _canonical_order(raw, n)
    return [CombinedEquation(BitVec(n, v), r, idx, bias) for v, r, idx in raw]


@dataclass(slots=True)
class CombineResult:
    """Equations plus the bookkeeping needed to judge their supply."""

    equations: list[CombinedEquation]
    n_halves: int
    count: int
    expected_count: float
    threshold: int | None
    shortfall: bool | None


def combine(
    samples: list[Sample],
    w_int: int,
    b_int: int,
    eps: Fraction | None = None,
    max_halves: int = DEFAULT_MAX_HALVES,
    threshold_c: Fraction | int = 1,
) -> CombineResult:
    """Produce all w-ary combinations vanishing on the last b coordinates.

    The expected count C(N, w/2)^2 / 2^(b+1) accounts for unordered pairing.
    When `eps` is given, the result carries the piled-up bias on each
    equation and compares the realized count against the hypothesis-testing
    threshold ceil(c / bias^2); falling short is reported, not raised.
    """
    if w_int < 2 or w_int % 2:
        raise ValueError(f"weight must be even and >= 2, got {w_int}")
    halves = enumerate_halves(samples, w_int // 2, max_halves)
    bias = piling_up_bias(eps, w_int) if eps is not None else None
    equations = bucket_and_pair(halves, b_int, bias)
    expected = math.comb(len(samples), w_int // 2) ** 2 / 2.0 ** (b_int + 1)
    threshold = required_samples(bias, threshold_c) if bias is not None else None
    shortfall = len(equations) < threshold if threshold is not None else None
    return CombineResult(
        equations=equations,
        n_halves=len(halves),
        count=len(equations),
        expected_count=expected,
        threshold=threshold,
        shortfall=shortfall,
    )
