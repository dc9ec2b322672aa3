"""Bit-packed GF(2) vectors, the simulated LPN oracle, and bias arithmetic.

The LPN oracle with secret x in F_2^n and bias eps draws a uniform vector g
and outputs the pair (<g,x> XOR e, g), where the noise bit e is 1 with
probability p = 1/2 - eps.  Everything downstream (combination, hypothesis
testing, planning) builds on the primitives in this module.

Randomness convention
---------------------
All instance material derives from a single 64-bit seed through SplitMix64,
a counter-based generator: word i of the stream is

    mix64((seed + (i+1) * 0x9E3779B97F4A7C15) mod 2^64)

with the standard finalizer ``mix64`` (xor-shift 30, multiply
0xBF58476D1CE4E5B9, xor-shift 27, multiply 0x94D049BB133111EB, xor-shift 31).
An instance of dimension n consumes ceil(n/64) words for the key, then per
sample ceil(n/64) coefficient words followed by one noise word.  Word t of a
vector supplies coordinates 64t .. 64t+63, least-significant bit first; the
final word is masked down to the remaining coordinates.  The noise bit is 1
iff  u * p_den < p_num * 2^64  for the noise word u and p = p_num/p_den.
This makes instances reproducible bit-for-bit from (n, eps, count, seed)
in any implementation of the same recipe.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

__all__ = [
    "BitVec",
    "Sample",
    "LpnInstance",
    "SplitMix64",
    "inner_product",
    "oracle_sample",
    "generate_instance",
    "piling_up_bias",
    "required_samples",
    "pileup_experiment",
    "PileupReport",
]

_MASK64 = (1 << 64) - 1
_PHI = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB


def _mix64(z: int) -> int:
    z &= _MASK64
    z = ((z ^ (z >> 30)) * _MIX1) & _MASK64
    z = ((z ^ (z >> 27)) * _MIX2) & _MASK64
    return z ^ (z >> 31)


class SplitMix64:
    """Counter-based 64-bit word stream; word(i) is a pure function of (seed, i)."""

    __slots__ = ("seed", "position")

    def __init__(self, seed: int, position: int = 0):
        self.seed = seed & _MASK64
        self.position = position

    def word(self, index: int) -> int:
        return _mix64(self.seed + (index + 1) * _PHI)

    def next_u64(self) -> int:
        w = self.word(self.position)
        self.position += 1
        return w

    def take(self, count: int) -> np.ndarray:
        """Consume `count` words, returned as a uint64 array (vectorized mix)."""
        out = splitmix64_words(self.seed, self.position, count)
        self.position += count
        return out


def splitmix64_words(seed: int, start: int, count: int) -> np.ndarray:
    """Words start .. start+count-1 of the SplitMix64 stream for `seed`."""
    idx = np.arange(start + 1, start + 1 + count, dtype=np.uint64)
    z = np.uint64(seed & _MASK64) + idx * np.uint64(_PHI)
    z = (z ^ (z >> np.uint64(30))) * np.uint64(_MIX1)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(_MIX2)
    return z ^ (z >> np.uint64(31))


class BitVec:
    """Packed n-dimensional GF(2) vector.

    Coordinate j lives at bit position (j mod 8) of byte (j div 8) in the
    little-endian byte serialization, i.e. at bit j of the backing integer.
    The "last b coordinates" are therefore the b highest bit positions.
    Storage beyond coordinate n-1 is always zero, so equality of vectors is
    equality of (n, value).
    """

    __slots__ = ("n", "value")

    def __init__(self, n: int, value: int = 0):
        if n < 1:
            raise ValueError(f"dimension must be positive, got {n}")
        if value < 0 or value >> n:
            raise ValueError(f"value has bits outside coordinates 0..{n - 1}")
        self.n = n
        self.value = value

    @classmethod
    def from_bits(cls, bits) -> "BitVec":
        """Build from an iterable of 0/1 coordinates, index 0 first."""
        bits = list(bits)
        v = 0
        for j, b in enumerate(bits):
            if b:
                v |= 1 << j
        return cls(len(bits), v)

    @classmethod
    def from_bitstring(cls, s: str) -> "BitVec":
        """Build from a string like '1011' (coordinate 0 is the leftmost char)."""
        return cls.from_bits(int(c) for c in s)

    @classmethod
    def from_bytes(cls, n: int, data: bytes) -> "BitVec":
        if len(data) != (n + 7) // 8:
            raise ValueError(f"expected {(n + 7) // 8} bytes for dimension {n}")
        return cls(n, int.from_bytes(data, "little"))

    @classmethod
    def from_hex(cls, n: int, s: str) -> "BitVec":
        return cls.from_bytes(n, bytes.fromhex(s))

    def to_bytes(self) -> bytes:
        return self.value.to_bytes((self.n + 7) // 8, "little")

    def to_hex(self) -> str:
        return self.to_bytes().hex()

    def to_bitstring(self) -> str:
        return "".join(str((self.value >> j) & 1) for j in range(self.n))

    def bit(self, j: int) -> int:
        if not 0 <= j < self.n:
            raise IndexError(f"coordinate {j} out of range for dimension {self.n}")
        return (self.value >> j) & 1

    def weight(self) -> int:
        return self.value.bit_count()

    def prefix_int(self, m: int) -> int:
        """Coordinates 0..m-1 as an integer (coordinate 0 = bit 0)."""
        return self.value & ((1 << m) - 1)

    def suffix_int(self, b: int) -> int:
        """The last b coordinates (n-b .. n-1) as an integer."""
        return self.value >> (self.n - b)

    def drop_prefix(self, l: int) -> "BitVec":
        """Remove coordinates 0..l-1, re-indexing the rest down."""
        if not 0 <= l < self.n:
            raise ValueError(f"cannot drop {l} of {self.n} coordinates")
        return BitVec(self.n - l, self.value >> l)

    @staticmethod
    def concat(low: "BitVec", high: "BitVec") -> "BitVec":
        """Concatenate: low supplies coordinates 0..low.n-1, high the rest."""
        return BitVec(low.n + high.n, low.value | (high.value << low.n))

    def __xor__(self, other: "BitVec") -> "BitVec":
        if self.n != other.n:
            raise ValueError(f"dimension mismatch: {self.n} != {other.n}")
        return BitVec(self.n, self.value ^ other.value)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, BitVec)
            and self.n == other.n
            and self.value == other.value
        )

    def __hash__(self):
        return hash((self.n, self.value))

    def __repr__(self):
        return f"BitVec({self.n}, '{self.to_bitstring()}')"


def inner_product(a: BitVec, b: BitVec) -> int:
    """Parity of the coordinate-wise AND of two equal-dimension vectors."""
    if a.n != b.n:
        raise ValueError(f"dimension mismatch: {a.n} != {b.n}")
    return (a.value & b.value).bit_count() & 1


@dataclass(slots=True)
class Sample:
    """One oracle output: coefficient vector g and noisy bit <g,x> XOR e."""

    coeffs: BitVec
    rhs: int


@dataclass(slots=True)
class LpnInstance:
    """A dimension-n LPN problem with bias eps and a collection of samples.

    `key` is the planted secret when the instance was simulated; attack-only
    instances carry None.  `seed` is kept for reproducibility bookkeeping.
    """

    n: int
    eps: Fraction
    key: BitVec | None
    samples: list[Sample]
    seed: int | None = None

    def __post_init__(self):
        if not (0 < self.eps <= Fraction(1, 2)):
            raise ValueError(f"bias must lie in (0, 1/2], got {self.eps}")

    @property
    def noise_rate(self) -> Fraction:
        return Fraction(1, 2) - self.eps


def _noise_threshold(eps: Fraction) -> tuple[int, int]:
    """(num, den) of p = 1/2 - eps; noise bit is 1 iff u*den < num*2^64."""
    p = Fraction(1, 2) - eps
    return p.numerator, p.denominator


def _vec_from_words(n: int, words) -> int:
    v = 0
    for t, w in enumerate(words):
        v |= int(w) << (64 * t)
    return v & ((1 << n) - 1)


def oracle_sample(key: BitVec, eps: Fraction, rng: SplitMix64) -> Sample:
    """Draw one sample from the simulated oracle, consuming from `rng`.

    Deterministic given the stream position: ceil(n/64) coefficient words
    then one noise word, per the module-level convention.
    """
    if not (0 < eps <= Fraction(1, 2)):
        raise ValueError(f"bias must lie in (0, 1/2], got {eps}")
    k = (key.n + 63) // 64
    coeffs = BitVec(key.n, _vec_from_words(key.n, (rng.next_u64() for _ in range(k))))
    u = rng.next_u64()
    p_num, p_den = _noise_threshold(eps)
    e = 1 if u * p_den < (p_num << 64) else 0
    return Sample(coeffs, inner_product(coeffs, key) ^ e)


def generate_instance(n: int, eps: Fraction, count: int, seed: int) -> LpnInstance:
    """Simulate a planted instance: key from the stream head, then samples.

    Equivalent to drawing the key and then `count` oracle_sample calls, but
    the word stream is produced in one vectorized pass.
    """
    if not (0 < eps <= Fraction(1, 2)):
        raise ValueError(f"bias must lie in (0, 1/2], got {eps}")
    if count < 0:
        raise ValueError("sample count must be non-negative")
    k = (n + 63) // 64
    words = splitmix64_words(seed, 0, k + count * (k + 1))
    key = BitVec(n, _vec_from_words(n, words[:k]))
    p_num, p_den = _noise_threshold(eps)
    p_hi = p_num << 64
    mask = (1 << n) - 1
    kv = key.value
    samples = []
    body = words[k:].reshape(count, k + 1)
    for row in body:
        if k == 1:
            g = int(row[0]) & mask
        else:
            g = _vec_from_words(n, row[:k])
        e = 1 if int(row[k]) * p_den < p_hi else 0
        rhs = ((g & kv).bit_count() & 1) ^ e
        samples.append(Sample(BitVec(n, g), rhs))
    return LpnInstance(n, eps, key, samples, seed)


def piling_up_bias(eps: Fraction, w: int) -> Fraction:
    """Bias of the XOR of w independent bits of bias eps: 2^(w-1) * eps^w."""
    if w < 1:
        raise ValueError(f"combination weight must be >= 1, got {w}")
    if not (0 < eps <= Fraction(1, 2)):
        raise ValueError(f"bias must lie in (0, 1/2], got {eps}")
    return Fraction(2) ** (w - 1) * Fraction(eps) ** w


def required_samples(eps_tilde: Fraction, c: Fraction | int = 1) -> int:
    """Distinguishing threshold ceil(c / eps_tilde^2).

    The constant c is a tunable knob (default 1); success probability of a
    hypothesis test rises with c.
    """
    if eps_tilde <= 0:
        raise ValueError("cannot distinguish with zero bias")
    return math.ceil(Fraction(c) / (Fraction(eps_tilde) ** 2))


@dataclass(slots=True)
class PileupReport:
    """Outcome of an empirical piling-up experiment."""

    eps: Fraction
    w: int
    trials: int
    predicted: float
    empirical: float
    sigma: float
    z_score: float
    trace: list[tuple[int, float]] = field(default_factory=list)


def pileup_experiment(
    eps: Fraction, w: int, trials: int, seed: int = 0, checkpoints: int = 40
) -> PileupReport:
    """XOR w independent oracle noise bits `trials` times; compare the
    empirical bias of the XOR against 2^(w-1) * eps^w.

    Noise bits come from the SplitMix64 stream for `seed`, laid out row-major
    (trial 0's w words first).
    """
    if w < 1:
        raise ValueError(f"combination weight must be >= 1, got {w}")
    if trials < 1000:
        raise ValueError("need at least 1000 trials for meaningful statistics")
    p_num, p_den = _noise_threshold(eps)
    words = splitmix64_words(seed, 0, trials * w).reshape(trials, w)
    # u * den < num * 2^64, evaluated as u < ceil(num*2^64/den) on uint64
    bound = -(-(p_num << 64) // p_den)
    bits = (words < np.uint64(bound)).astype(np.uint8)
    xors = bits.sum(axis=1) & 1
    predicted = float(piling_up_bias(eps, w))
    sigma = 1.0 / (2.0 * math.sqrt(trials))
    csum = np.cumsum(xors)
    trace = []
    for i in np.unique(np.geomspace(1000, trials, checkpoints).astype(int)):
        trace.append((int(i), 0.5 - float(csum[i - 1]) / i))
    empirical = 0.5 - float(csum[-1]) / trials
    z = (empirical - predicted) / sigma
    return PileupReport(eps, w, trials, predicted, empirical, sigma, z, trace)


def parity_u64(arr: np.ndarray) -> np.ndarray:
    """Popcount parity of each element of a uint64/int64 array."""
    return (np.bitwise_count(arr) & np.uint64(1)).astype(np.int64)
