"""Attack-parameter planning.

Given the dimension n, the bias eps and a sample budget log2(N), the planner
balances the two stage costs of the attack: forming w-ary combinations that
vanish on the last b coordinates (cost ~ max{N^(w/2), N^w/2^b}) against
testing all 2^(n-b) hypotheses on the remaining coordinates.  The real-valued
optimum (w, b) is then rounded to an even integer weight w' and block width
b', and the resulting predicted log-complexities are reported.

All logarithms are base 2 and evaluated in double precision; exact rational
bias arithmetic stays in :mod:`lpnkit.core`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import InfeasiblePlanError

__all__ = [
    "Plan",
    "TableRow",
    "compute_T",
    "choose_w",
    "choose_b",
    "round_params",
    "complexity_estimates",
    "minimum_samples",
    "cube_root_sample_bound",
    "decimation_plan",
    "make_plan",
    "emit_table",
    "render_table",
]


@dataclass(slots=True)
class Plan:
    """Chosen attack parameters for one instance.

    w_real/b_real/t are the real-valued optimizer outputs, w_int/b_int their
    integer roundings (w_int even), r = w_real - w_int.  When l_prime > 0 the
    derived parameters apply to the decimated problem of dimension
    n - l_prime with log_n_samples - l_prime samples.
    """

    n: int
    eps: Fraction
    log_n_samples: float
    w_real: float
    b_real: float
    t: float
    w_int: int
    b_int: int
    r: float
    l_prime: int
    log_c_lc: float
    log_c_ht: float
    feasible: bool


def _log_eps(eps: Fraction) -> float:
    if not (0 < eps <= Fraction(1, 2)):
        raise ValueError(f"bias must lie in (0, 1/2], got {eps}")
    return math.log2(eps)


def compute_T(log_n: float, eps: Fraction) -> float:
    """log N / (3 log N + 4 + 4 log eps); the exponent driver of both costs."""
    den = 3.0 * log_n + 4.0 + 4.0 * _log_eps(eps)
    if den <= 0.0:
        raise InfeasiblePlanError(
            f"too few samples: 3*logN + 4 + 4*log2(eps) = {den:.4g} <= 0"
        )
    return log_n / den


def choose_w(n: int, log_n: float, eps: Fraction) -> float:
    """Real-valued optimal combination weight (n+2)/(1.5 logN + 2 + 2 log eps)."""
    den = 1.5 * log_n + 2.0 + 2.0 * _log_eps(eps)
    if den <= 0.0:
        raise InfeasiblePlanError(
            f"too few samples: 1.5*logN + 2 + 2*log2(eps) = {den:.4g} <= 0"
        )
    return (n + 2) / den


def choose_b(n: int, w: float, log_n: float, eps: Fraction) -> float:
    """Block width making the combined-equation supply exactly sufficient:
    b = w (logN + 2 + 2 log eps) - 2, equivalently n - (n+2) T."""
    if w <= 0:
        raise ValueError(f"weight must be positive, got {w}")
    return w * (log_n + 2.0 + 2.0 * _log_eps(eps)) - 2.0


def round_params(w: float, log_n: float, eps: Fraction) -> tuple[int, int, float]:
    """Round the real weight to the nearest even integer and floor the block.

    Returns (w_int, b_int, r) with w_int = 2*floor((w+1)/2) even,
    r = w - w_int in [-1, 1], and b_int = floor(w_int (logN + 2 + 2 log eps) - 2).
    """
    if w <= 0:
        raise ValueError(f"weight must be positive, got {w}")
    w_int = 2 * math.floor((w + 1.0) / 2.0)
    if w_int < 2:
        raise InfeasiblePlanError(
            f"optimal weight {w:.4g} is below 1; the even-rounding rule needs "
            "w >= 1 (override the weight explicitly for larger sample budgets)"
        )
    b_int = math.floor(w_int * (log_n + 2.0 + 2.0 * _log_eps(eps)) - 2.0)
    if b_int < 0:
        raise InfeasiblePlanError(
            f"negative block width b' = {b_int} (too few samples for weight {w_int})"
        )
    return w_int, b_int, w - w_int


def complexity_estimates(
    n: int, w_int: int, b_int: int, log_n: float
) -> tuple[float, float]:
    """Predicted log2 costs of the two stages.

    Linear combination: (w'/2) log N.  Hypothesis testing: evaluating the
    surviving w' logN - b' log-supply of equations at all 2^(n-b') points,
    (n - b') + log2(w' logN - b').
    """
    if w_int < 2 or w_int % 2:
        raise ValueError(f"weight must be even and >= 2, got {w_int}")
    if b_int < 0:
        raise ValueError(f"block width must be non-negative, got {b_int}")
    surviving = w_int * log_n - b_int
    if surviving <= 0:
        raise InfeasiblePlanError(
            f"no equations survive: w'*logN - b' = {surviving:.4g} <= 0"
        )
    return (w_int / 2.0) * log_n, (n - b_int) + math.log2(surviving)


def minimum_samples(eps: Fraction) -> float:
    """log2 of the baseline sample requirement 4/(2 eps)^4."""
    return 2.0 - 4.0 * math.log2(2 * Fraction(eps))


def cube_root_sample_bound(n: int, eps: Fraction) -> float:
    """log2 of the sample count 2^(n/log n) * 4/(2 eps)^4 beyond which
    decimation starts to pay off."""
    if n < 2:
        raise ValueError(f"dimension must be >= 2, got {n}")
    return n / math.log2(n) + minimum_samples(eps)


def decimation_plan(n: int, log_n: float, eps: Fraction) -> int:
    """How many leading key bits can be traded away given surplus samples.

    Samples beyond the cube-root bound let us keep only equations that do not
    touch the first l' coordinates; the retained 2^(logN - l') samples must
    still clear the bound for the reduced dimension, so l' is walked down
    until  n/log n + l - l' >= (n - l')/log(n - l')  holds.
    """
    surplus = log_n - cube_root_sample_bound(n, eps)
    if surplus <= 0:
        return 0
    l_prime = min(math.floor(surplus), n - 3)
    base = n / math.log2(n)
    while l_prime > 0:
        reduced = n - l_prime
        if base + surplus - l_prime >= reduced / math.log2(reduced):
            break
        l_prime -= 1
    return max(l_prime, 0)


def _feasibility_margin(
    w_int: int, b_int: int, log_n: float, eps: Fraction
) -> float:
    """log2(expected equations) - log2(1/eps_tilde^2); >= 0 means enough."""
    need = -(2.0 * (w_int - 1) + 2.0 * w_int * _log_eps(eps))
    return (w_int * log_n - b_int) - need


def make_plan(
    n: int,
    eps: Fraction,
    log_n: float,
    w_int: int | None = None,
    b_int: int | None = None,
    l_prime: int | None = None,
) -> Plan:
    """Build a full plan, optionally pinning w', b' and/or the decimation l'.

    Without overrides the plan follows the rounded optimum and is feasible by
    construction.  Overridden parameters are re-checked against the supply
    condition N^w' / 2^b' >= 1/(2^(2(w'-1)) eps^(2w')).  A computed b' that
    would leave no unknown bits is clamped to n-1 and the plan is flagged
    infeasible.
    """
    min_log = minimum_samples(eps)
    if log_n < min_log - 1e-12:
        raise InfeasiblePlanError(
            f"too few samples: logN = {log_n:.4g} < minimum {min_log:.4g}"
        )
    lp = 0 if l_prime is None else l_prime
    if not 0 <= lp <= n - 3:
        raise InfeasiblePlanError(f"decimation amount {lp} outside [0, {n - 3}]")
    n_eff = n - lp
    log_n_eff = log_n - lp
    if lp and log_n_eff < min_log - 1e-12:
        raise InfeasiblePlanError(
            f"decimation by {lp} leaves logN = {log_n_eff:.4g} < minimum {min_log:.4g}"
        )

    t = compute_T(log_n_eff, eps)
    w_real = choose_w(n_eff, log_n_eff, eps)
    b_real = choose_b(n_eff, w_real, log_n_eff, eps)

    overridden = w_int is not None or b_int is not None
    if w_int is None:
        w_int = 2 * math.floor((w_real + 1.0) / 2.0)
        if w_int < 2:
            raise InfeasiblePlanError(
                f"optimal weight {w_real:.4g} is below 1; override the weight "
                "explicitly for such large sample budgets"
            )
    elif w_int < 2 or w_int % 2:
        raise InfeasiblePlanError(f"weight override must be even >= 2, got {w_int}")
    r = w_real - w_int
    if b_int is None:
        b_int = math.floor(w_int * (log_n_eff + 2.0 + 2.0 * _log_eps(eps)) - 2.0)
    if b_int < 0:
        raise InfeasiblePlanError(f"negative block width b' = {b_int}")

    feasible = True
    if b_int > n_eff - 1:
        if overridden:
            raise InfeasiblePlanError(
                f"empty hypothesis space: b' = {b_int} >= dimension {n_eff}"
            )
        b_int = n_eff - 1
        feasible = False
    if _feasibility_margin(w_int, b_int, log_n_eff, eps) < -1e-6:
        feasible = False

    log_c_lc, log_c_ht = complexity_estimates(n_eff, w_int, b_int, log_n_eff)
    return Plan(
        n=n,
        eps=eps,
        log_n_samples=log_n,
        w_real=w_real,
        b_real=b_real,
        t=t,
        w_int=w_int,
        b_int=b_int,
        r=r,
        l_prime=lp,
        log_c_lc=log_c_lc,
        log_c_ht=log_c_ht,
        feasible=feasible,
    )


@dataclass(slots=True)
class TableRow:
    """One line of the parameter/complexity overview table."""

    log_n: float
    w: float
    b: float
    w_int: int
    b_int: int
    abs_r_log_n: float
    log_c_lc: float
    log_c_ht: float


def emit_table(n: int, eps: Fraction, log_n_list) -> list[TableRow]:
    """Parameter choices and predicted costs for each sample budget.

    Decimation is not applied here; each row is the plain rounded optimum
    for (n, eps, logN).
    """
    rows = []
    for log_n in log_n_list:
        t = compute_T(log_n, eps)
        w = choose_w(n, log_n, eps)
        b = choose_b(n, w, log_n, eps)
        w_int, b_int, r = round_params(w, log_n, eps)
        log_c_lc, log_c_ht = complexity_estimates(n, w_int, b_int, log_n)
        rows.append(
            TableRow(log_n, w, b, w_int, b_int, abs(r) * log_n, log_c_lc, log_c_ht)
        )
    return rows


def _fmt(x: float, decimals: int, force_decimals: bool = False) -> str:
    if not force_decimals and abs(x - round(x)) < 1e-9:
        return str(round(x))
    return f"{x:.{decimals}f}"


def format_row_cells(row: TableRow) -> list[str]:
    """Render one row at display precision: two decimals for w, b and
    log C_HT (the latter always), one decimal for |r| logN, integers
    displayed plain."""
    return [
        _fmt(row.log_n, 2),
        _fmt(row.w, 2),
        _fmt(row.b, 2),
        str(row.w_int),
        str(row.b_int),
        _fmt(row.abs_r_log_n, 1),
        _fmt(row.log_c_lc, 2),
        _fmt(row.log_c_ht, 2, force_decimals=True),
    ]


TABLE_HEADER = ("logN", "w", "b", "w'", "b'", "|r|logN", "logC_LC", "logC_HT")


def render_table(rows: list[TableRow]) -> str:
    """Aligned text table in the fixed column order."""
    cells = [list(TABLE_HEADER)] + [format_row_cells(r) for r in rows]
    widths = [max(len(c[i]) for c in cells) for i in range(len(TABLE_HEADER))]
    lines = [
        "  ".join(c[i].rjust(widths[i]) for i in range(len(widths))) for c in cells
    ]
    return "\n".join(lines)
