"""Versioned text formats: instance files, plan and result documents.

Instance files start with the magic line ``LPN1``, followed by ``key = value``
header lines (n, eps, samples, then optional seed and key), a ``---``
separator, and one record per sample: the coefficient vector as lowercase hex
(ceil(n/8) bytes, byte 0 first, bit j of the vector at bit position j mod 8
of byte j div 8) a space, and the right-hand-side bit.  Serialization is
canonical, so parse followed by re-serialization is byte-identical.

Plans and solve results serialize to flat ``key = value`` documents.
"""

from __future__ import annotations

import math
from fractions import Fraction

from .core import BitVec, LpnInstance, Sample
from .planner import Plan
from .solver import SolveResult

__all__ = [
    "MAGIC",
    "serialize_instance",
    "parse_instance",
    "write_instance",
    "read_instance",
    "write_key_file",
    "read_key_file",
    "plan_to_text",
    "plan_from_text",
    "result_to_text",
]

MAGIC = "LPN1"


def _fmt_value(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def serialize_instance(instance: LpnInstance, include_key: bool = True) -> str:
    """Render an instance to its canonical text form."""
    lines = [
        MAGIC,
        f"n = {instance.n}",
        f"eps = {instance.eps.numerator}/{instance.eps.denominator}",
        f"samples = {len(instance.samples)}",
    ]
    if instance.seed is not None:
        lines.append(f"seed = {instance.seed}")
    if include_key and instance.key is not None:
        lines.append(f"key = {instance.key.to_hex()}")
    lines.append("---")
    lines.extend(f"{s.coeffs.to_hex()} {s.rhs}" for s in instance.samples)
    lines.append("")
    return "\n".join(lines)


def _parse_fraction(text: str) -> Fraction:
    num, sep, den = text.partition("/")
    if not sep:
        raise ValueError(f"expected NUM/DEN fraction, got {text!r}")
    try:
        frac = Fraction(int(num), int(den))
    except (ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"bad fraction {text!r}: {exc}") from None
    return frac


def parse_instance(text: str) -> LpnInstance:
    """Parse the canonical instance format, validating structure strictly."""
    lines = text.splitlines()
    if not lines or lines[0] != MAGIC:
        raise ValueError(f"missing {MAGIC} magic header")
    header: dict[str, str] = {}
    body_at = None
    for i, line in enumerate(lines[1:], start=1):
        if line == "---":
            body_at = i + 1
            break
        key, sep, value = line.partition(" = ")
        if not sep:
            raise ValueError(f"malformed header line {i + 1}: {line!r}")
        header[key] = value
    if body_at is None:
        raise ValueError("missing '---' separator")
    for required in ("n", "eps", "samples"):
        if required not in header:
            raise ValueError(f"missing header field {required!r}")
    n = int(header["n"])
    eps = _parse_fraction(header["eps"])
    count = int(header["samples"])
    seed = int(header["seed"]) if "seed" in header else None
    key = BitVec.from_hex(n, header["key"]) if "key" in header else None

    records = [l for l in lines[body_at:] if l]
    if len(records) != count:
        raise ValueError(f"expected {count} sample records, found {len(records)}")
    hex_len = 2 * ((n + 7) // 8)
    samples = []
    for i, rec in enumerate(records):
        parts = rec.split(" ")
        if len(parts) != 2 or len(parts[0]) != hex_len or parts[1] not in ("0", "1"):
            raise ValueError(f"malformed sample record {i}: {rec!r}")
        samples.append(Sample(BitVec.from_hex(n, parts[0]), int(parts[1])))
    return LpnInstance(n, eps, key, samples, seed)


def write_instance(path, instance: LpnInstance, include_key: bool = True) -> None:
    with open(path, "w") as fh:
        fh.write(serialize_instance(instance, include_key))


def read_instance(path) -> LpnInstance:
    with open(path) as fh:
        return parse_instance(fh.read())


def write_key_file(path, key: BitVec) -> None:
    with open(path, "w") as fh:
        fh.write(key.to_hex() + "\n")


def read_key_file(path, n: int) -> BitVec:
    with open(path) as fh:
        return BitVec.from_hex(n, fh.read().strip())


_PLAN_KEYS = (
    "n",
    "eps_num",
    "eps_den",
    "log_n_samples",
    "w_real",
    "b_real",
    "t",
    "w_int",
    "b_int",
    "r",
    "l_prime",
    "log_c_lc",
    "log_c_ht",
    "feasible",
)


def plan_to_text(plan: Plan) -> str:
    values = {
        "n": plan.n,
        "eps_num": plan.eps.numerator,
        "eps_den": plan.eps.denominator,
        "log_n_samples": plan.log_n_samples,
        "w_real": plan.w_real,
        "b_real": plan.b_real,
        "t": plan.t,
        "w_int": plan.w_int,
        "b_int": plan.b_int,
        "r": plan.r,
        "l_prime": plan.l_prime,
        "log_c_lc": plan.log_c_lc,
        "log_c_ht": plan.log_c_ht,
        "feasible": plan.feasible,
    }
    return "".join(f"{k} = {_fmt_value(values[k])}\n" for k in _PLAN_KEYS)


def _parse_kv(text: str) -> dict[str, str]:
    out = {}
    for line in text.splitlines():
        if not line.strip():
            continue
        key, sep, value = line.partition(" = ")
        if not sep:
            raise ValueError(f"malformed line: {line!r}")
        out[key] = value
    return out


def plan_from_text(text: str) -> Plan:
    kv = _parse_kv(text)
    missing = [k for k in _PLAN_KEYS if k not in kv]
    if missing:
        raise ValueError(f"plan document missing keys: {missing}")
    return Plan(
        n=int(kv["n"]),
        eps=Fraction(int(kv["eps_num"]), int(kv["eps_den"])),
        log_n_samples=float(kv["log_n_samples"]),
        w_real=float(kv["w_real"]),
        b_real=float(kv["b_real"]),
        t=float(kv["t"]),
        w_int=int(kv["w_int"]),
        b_int=int(kv["b_int"]),
        r=float(kv["r"]),
        l_prime=int(kv["l_prime"]),
        log_c_lc=float(kv["log_c_lc"]),
        log_c_ht=float(kv["log_c_ht"]),
        feasible=kv["feasible"] == "true",
    )


_REPORT_KEYS = (
    "samples_used",
    "halves",
    "equations",
    "eq_threshold",
    "spectrum_dim",
    "recursion_depth",
)

_TIMING_KEYS = (
    "t_decimate_ms",
    "t_combine_ms",
    "t_spectrum_ms",
    "t_recover_ms",
    "t_total_ms",
)


def result_to_text(result: SolveResult, exact_match: bool | None = None) -> str:
    """Flat document: recovery outcome, then the stage report block."""
    lines = [
        f"key_hat = {result.key_hat.to_hex()}",
        f"agreement = {_fmt_value(result.agreement)}",
        f"success = {_fmt_value(result.success)}",
    ]
    if exact_match is not None:
        lines.append(f"exact_match = {_fmt_value(exact_match)}")
    report = result.stage_report
    for k in _REPORT_KEYS:
        lines.append(f"{k} = {_fmt_value(report[k])}")
    extras = sorted(
        k
        for k in report
        if k not in _REPORT_KEYS + _TIMING_KEYS + ("warning_list",)
    )
    for k in extras:
        lines.append(f"{k} = {_fmt_value(report[k])}")
    warnings = report.get("warning_list", [])
    lines.append(f"warnings = {'; '.join(warnings)}")
    for k in _TIMING_KEYS:
        lines.append(f"{k} = {report[k]:.3f}")
    lines.append("")
    return "\n".join(lines)
