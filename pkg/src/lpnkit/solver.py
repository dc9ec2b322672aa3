"""End-to-end key recovery.

Pipeline: optionally decimate (keep samples untouched by the first l' key
bits), combine to weight-w' equations that vanish on the last b' coordinates,
score all 2^m sub-key hypotheses on the remaining m coordinates with the
Walsh transform, then back-substitute: fix the recovered bits in the original
samples and re-solve the small residual instances at the original bias.
Candidates from the spectrum are tried in score order until the assembled
full key verifies against the original samples.

Everything is deterministic given the instance and the plan.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .combiner import DEFAULT_MAX_HALVES, combine
from .core import BitVec, LpnInstance, Sample, required_samples, splitmix64_words
from .errors import InfeasiblePlanError
from .planner import Plan, make_plan
from .walsh import (
    DEFAULT_MAX_SPECTRUM_M,
    best_candidate,
    build_spectrum,
    top_candidates,
)

__all__ = [
    "SolveResult",
    "SuffixRecovery",
    "decimate",
    "recover_suffix",
    "verify_key",
    "agreement_threshold",
    "solve",
    "DEFAULT_FWT_CAP",
    "DEFAULT_CANDIDATE_DEPTH",
]

DEFAULT_FWT_CAP = 20
DEFAULT_CANDIDATE_DEPTH = 8


def decimate(samples: list[Sample], l_prime: int) -> tuple[list[Sample], int]:
    """Keep samples whose first l' coordinates are all zero; drop those
    coordinates, re-indexing into dimension n - l'."""
    if not samples:
        return [], 0
    n = samples[0].coeffs.n
    if not 0 <= l_prime <= n - 3:
        raise ValueError(f"decimation amount {l_prime} outside [0, {n - 3}]")
    if l_prime == 0:
        return list(samples), n
    mask = (1 << l_prime) - 1
    reduced = n - l_prime
    return [
        Sample(BitVec(reduced, s.coeffs.value >> l_prime), s.rhs)
        for s in samples
        if not s.coeffs.value & mask
    ], reduced


@dataclass(slots=True)
class _SubProblem:
    """Samples restricted to unknown coordinates after fixing known bits."""

    gs: list[int]
    rhs: list[int]
    dim: int


def _substitute_prefix(samples: list[Sample], prefix: BitVec) -> _SubProblem:
    """Fold <g[0..m-1], prefix> into the right-hand sides; unknowns are the
    remaining high coordinates, re-indexed from zero."""
    m = prefix.n
    n = samples[0].coeffs.n
    pv = prefix.value
    gs, rhs = [], []
    for s in samples:
        v = s.coeffs.value
        gs.append(v >> m)
        rhs.append(s.rhs ^ ((v & pv).bit_count() & 1))
    return _SubProblem(gs, rhs, n - m)


def _substitute_suffix(samples: list[Sample], suffix: BitVec, l: int) -> _SubProblem:
    """Fold the known last n-l coordinates in; unknowns are the first l."""
    sv = suffix.value
    mask = (1 << l) - 1
    gs, rhs = [], []
    for s in samples:
        v = s.coeffs.value
        gs.append(v & mask)
        rhs.append(s.rhs ^ (((v >> l) & sv).bit_count() & 1))
    return _SubProblem(gs, rhs, l)


@dataclass(slots=True)
class _EqView:
    coeffs: BitVec
    rhs: int


def _direct_solve(sub: _SubProblem, max_m: int) -> int:
    """Argmax of the Walsh spectrum of a substituted sub-problem."""
    eqs = [_EqView(BitVec(sub.dim, g), r) for g, r in zip(sub.gs, sub.rhs)]
    spectrum = build_spectrum(eqs, sub.dim, max_m)
    x_hat, _, _ = best_candidate(spectrum)
    return x_hat


@dataclass(slots=True)
class SuffixRecovery:
    """A full key candidate assembled from a known prefix."""

    key_hat: BitVec
    warnings: list[str] = field(default_factory=list)
    recursion_depth: int = 0


def recover_suffix(
    samples: list[Sample],
    known_prefix: BitVec,
    eps: Fraction,
    fwt_cap: int = DEFAULT_FWT_CAP,
    max_spectrum_m: int = DEFAULT_MAX_SPECTRUM_M,
    max_halves: int = DEFAULT_MAX_HALVES,
) -> SuffixRecovery:
    """Recover the remaining key bits given the first m.

    Substituting the prefix leaves an LPN instance on the other n - m
    coordinates at the original bias; it is solved by a direct spectrum when
    small enough, else by recursing through the full pipeline.
    """
    if not samples:
        raise ValueError("cannot recover from an empty sample list")
    n = samples[0].coeffs.n
    d = n - known_prefix.n
    if d < 1:
        raise ValueError("no coordinates left to recover")
    warnings = []
    if len(samples) < required_samples(eps):
        warnings.append(
            f"suffix recovery has {len(samples)} samples, below the "
            f"threshold {required_samples(eps)} for bias {eps}"
        )
    sub = _substitute_prefix(samples, known_prefix)
    if d <= fwt_cap:
        suffix = BitVec(d, _direct_solve(sub, max_spectrum_m))
        return SuffixRecovery(BitVec.concat(known_prefix, suffix), warnings, 0)
    reduced = LpnInstance(
        d,
        eps,
        None,
        [Sample(BitVec(d, g), r) for g, r in zip(sub.gs, sub.rhs)],
    )
    plan = make_plan(d, eps, math.log2(len(samples)))
    result = solve(
        reduced,
        plan,
        fwt_cap=fwt_cap,
        max_spectrum_m=max_spectrum_m,
        max_halves=max_halves,
    )
    warnings.extend(result.stage_report.get("warning_list", []))
    depth = result.stage_report["recursion_depth"] + 1
    return SuffixRecovery(
        BitVec.concat(known_prefix, result.key_hat), warnings, depth
    )


def verify_key(samples: list[Sample], key_hat: BitVec, eps: Fraction) -> float:
    """Fraction of samples whose right-hand side matches <g, key_hat>.

    A planted key scores about 1/2 + eps, a wrong key about 1/2.
    """
    if not samples:
        raise ValueError("agreement is undefined on an empty sample list")
    if not (0 < eps <= Fraction(1, 2)):
        raise ValueError(f"bias must lie in (0, 1/2], got {eps}")
    kv = key_hat.value
    hits = 0
    for s in samples:
        hits += ((s.coeffs.value & kv).bit_count() & 1) == s.rhs
    return hits / len(samples)


def agreement_threshold(eps: Fraction) -> float:
    """Midpoint between wrong-key (1/2) and true-key (1/2 + eps) agreement."""
    return 0.5 + float(eps) / 2.0


@dataclass(slots=True)
class SolveResult:
    """Recovered key plus verification outcome and per-stage bookkeeping."""

    key_hat: BitVec
    agreement: float
    success: bool
    stage_report: dict


def _select_samples(
    instance: LpnInstance, budget: int, sample_seed: int | None
) -> list[Sample]:
    if sample_seed is None:
        return instance.samples[:budget]
    # seeded partial Fisher-Yates over the index range
    count = len(instance.samples)
    words = splitmix64_words(sample_seed, 0, budget)
    idx = list(range(count))
    for i in range(budget):
        j = i + int(words[i]) % (count - i)
        idx[i], idx[j] = idx[j], idx[i]
    return [instance.samples[i] for i in idx[:budget]]


def solve(
    instance: LpnInstance,
    plan: Plan,
    sample_seed: int | None = None,
    candidate_depth: int = DEFAULT_CANDIDATE_DEPTH,
    fwt_cap: int = DEFAULT_FWT_CAP,
    max_spectrum_m: int = DEFAULT_MAX_SPECTRUM_M,
    max_halves: int = DEFAULT_MAX_HALVES,
) -> SolveResult:
    """Run the full attack pipeline for `instance` under `plan`.

    Stages: decimate by plan.l_prime, combine (w', b'), Walsh-score the m =
    n - l' - b' low coordinates, then for each spectrum candidate in score
    order recover the bucketed-out b' bits from the decimated samples and the
    l' decimated bits from the full sample set, accepting the first assembled
    key whose agreement on the original samples clears 1/2 + eps/2.  If none
    does, the top candidate's assembly is reported with success False.
    """
    if not plan.feasible:
        raise InfeasiblePlanError("refusing to run an infeasible plan")
    if instance.n != plan.n:
        raise ValueError(f"plan is for n={plan.n}, instance has n={instance.n}")
    budget = int(math.floor(2.0**plan.log_n_samples + 1e-9))
    if len(instance.samples) < budget:
        raise ValueError(
            f"instance has {len(instance.samples)} samples, plan needs {budget}"
        )
    eps = instance.eps
    report: dict = {}
    warnings: list[str] = []
    t0 = time.perf_counter()

    used = _select_samples(instance, budget, sample_seed)
    report["samples_used"] = len(used)

    t = time.perf_counter()
    dec_samples, n_red = decimate(used, plan.l_prime)
    report["t_decimate_ms"] = (time.perf_counter() - t) * 1e3
    report["samples_retained"] = len(dec_samples)
    if plan.l_prime:
        expected = len(used) * 2.0**-plan.l_prime
        report["retention_expected"] = expected
        if not dec_samples:
            warnings.append("decimation retained no samples")

    t = time.perf_counter()
    cres = combine(dec_samples, plan.w_int, plan.b_int, eps, max_halves)
    report["t_combine_ms"] = (time.perf_counter() - t) * 1e3
    report["halves"] = cres.n_halves
    report["equations"] = cres.count
    report["eq_threshold"] = cres.threshold
    if cres.shortfall:
        warnings.append(
            f"only {cres.count} combined equations, below threshold {cres.threshold}"
        )

    if candidate_depth < 1:
        raise ValueError("candidate depth must be at least 1")
    m = n_red - plan.b_int
    report["spectrum_dim"] = m
    t = time.perf_counter()
    spectrum = build_spectrum(cres.equations, m, max_spectrum_m)
    report["t_spectrum_ms"] = (time.perf_counter() - t) * 1e3
    if cres.count == 0:
        warnings.append("no combined equations; reporting the zero key")
        key_full = BitVec(instance.n)
        agreement = verify_key(instance.samples, key_full, eps)
        report.update(
            best_score=0,
            second_score=0,
            t_recover_ms=0.0,
            recursion_depth=0,
            candidates_tried=0,
            warning_list=warnings,
            t_total_ms=(time.perf_counter() - t0) * 1e3,
        )
        return SolveResult(
            key_full, agreement, agreement >= agreement_threshold(eps), report
        )
    _, best, second = best_candidate(spectrum)
    report["best_score"] = best
    report["second_score"] = second

    threshold = agreement_threshold(eps)
    depth = 0
    t = time.perf_counter()
    chosen = None
    first = None
    for rank, cand in enumerate(top_candidates(spectrum, candidate_depth)):
        rec = recover_suffix(
            dec_samples, BitVec(m, cand), eps, fwt_cap, max_spectrum_m, max_halves
        )
        depth = max(depth, rec.recursion_depth)
        key_red = rec.key_hat  # coordinates l' .. n-1 of the full key
        if plan.l_prime:
            sub = _substitute_suffix(used, key_red, plan.l_prime)
            head = BitVec(plan.l_prime, _direct_solve(sub, max_spectrum_m))
            key_full = BitVec.concat(head, key_red)
        else:
            key_full = key_red
        agreement = verify_key(instance.samples, key_full, eps)
        if first is None:
            first = (key_full, agreement)
        if agreement >= threshold:
            chosen = (key_full, agreement, rank)
            break
    report["t_recover_ms"] = (time.perf_counter() - t) * 1e3
    report["recursion_depth"] = depth

    if chosen is not None:
        key_full, agreement, rank = chosen
        success = True
        report["candidates_tried"] = rank + 1
    else:
        key_full, agreement = first
        success = False
        report["candidates_tried"] = candidate_depth
    report["warning_list"] = warnings
    report["t_total_ms"] = (time.perf_counter() - t0) * 1e3
    return SolveResult(key_full, agreement, success, report)
