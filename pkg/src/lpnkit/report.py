"""Report rendering: delimited data files plus matplotlib figures.

Every reporting command can write its numbers as a tab-separated file and a
PNG figure side by side under a report directory.  Figures are rendered with
the Agg backend, so no display is needed.
"""

from __future__ import annotations

import os

from .bench import BenchReport
from .core import PileupReport
from .planner import TableRow

__all__ = [
    "write_table_report",
    "write_pileup_report",
    "write_bench_report",
    "write_solve_report",
]


def _pyplot():
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    return plt


def _write_tsv(path, header, rows):
    with open(path, "w") as fh:
        fh.write("\t".join(header) + "\n")
        for row in rows:
            fh.write("\t".join(str(c) for c in row) + "\n")


def write_table_report(rows: list[TableRow], outdir) -> list[str]:
    """table.tsv with full-precision cells and table.png with the two
    predicted stage costs against the sample budget."""
    os.makedirs(outdir, exist_ok=True)
    tsv = os.path.join(outdir, "table.tsv")
    _write_tsv(
        tsv,
        ("log_n", "w", "b", "w_int", "b_int", "abs_r_log_n", "log_c_lc", "log_c_ht"),
        [
            (
                r.log_n,
                repr(r.w),
                repr(r.b),
                r.w_int,
                r.b_int,
                repr(r.abs_r_log_n),
                repr(r.log_c_lc),
                repr(r.log_c_ht),
            )
            for r in rows
        ],
    )
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(6, 4))
    xs = [r.log_n for r in rows]
    ax.plot(xs, [r.log_c_lc for r in rows], "o-", label="combination")
    ax.plot(xs, [r.log_c_ht for r in rows], "s-", label="hypothesis testing")
    ax.plot(
        xs,
        [max(r.log_c_lc, r.log_c_ht) for r in rows],
        "k--",
        alpha=0.5,
        label="max",
    )
    ax.set_xlabel("log2 N")
    ax.set_ylabel("log2 cost")
    ax.legend()
    fig.tight_layout()
    png = os.path.join(outdir, "table.png")
    fig.savefig(png, dpi=120)
    plt.close(fig)
    return [tsv, png]


def write_pileup_report(report: PileupReport, outdir) -> list[str]:
    """pileup.tsv with the running-bias trace and pileup.png showing its
    convergence toward the predicted value."""
    os.makedirs(outdir, exist_ok=True)
    tsv = os.path.join(outdir, "pileup.tsv")
    _write_tsv(
        tsv,
        ("trials", "running_bias", "predicted"),
        [(c, repr(b), repr(report.predicted)) for c, b in report.trace],
    )
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(6, 4))
    xs = [c for c, _ in report.trace]
    ax.semilogx(xs, [b for _, b in report.trace], label="empirical")
    ax.axhline(report.predicted, color="k", linestyle="--", label="predicted")
    ax.fill_between(
        xs,
        [report.predicted - 4 * 0.5 / c**0.5 for c in xs],
        [report.predicted + 4 * 0.5 / c**0.5 for c in xs],
        alpha=0.15,
        color="gray",
        label="4 sigma band",
    )
    ax.set_xlabel("trials")
    ax.set_ylabel("bias of XOR")
    ax.set_title(f"w={report.w}, eps={report.eps}, z={report.z_score:+.2f}")
    ax.legend()
    fig.tight_layout()
    png = os.path.join(outdir, "pileup.png")
    fig.savefig(png, dpi=120)
    plt.close(fig)
    return [tsv, png]


def write_bench_report(report: BenchReport, outdir) -> list[str]:
    """bench.tsv plus log-log scaling figures for both stages."""
    os.makedirs(outdir, exist_ok=True)
    tsv = os.path.join(outdir, "bench.tsv")
    rows = [
        (
            "combine",
            p.n_samples,
            repr(p.seconds),
            p.equations,
            repr(p.predicted_log_cost),
        )
        for p in report.combiner
    ]
    rows += [("walsh", 1 << p.m, repr(p.seconds), "", repr(p.normalized_ns)) for p in report.walsh]
    _write_tsv(tsv, ("stage", "size", "seconds", "equations", "predicted_or_norm"), rows)

    plt = _pyplot()
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(10, 4))
    xs = [p.n_samples for p in report.combiner]
    ys = [p.seconds for p in report.combiner]
    ax1.loglog(xs, ys, "o-", base=2)
    ax1.set_xlabel("samples N")
    ax1.set_ylabel("seconds")
    ax1.set_title(f"combination, fitted slope {report.combiner_slope:.2f}")
    ms = [p.m for p in report.walsh]
    ax2.plot(ms, [p.normalized_ns for p in report.walsh], "s-")
    ax2.set_xlabel("spectrum dimension m")
    ax2.set_ylabel("time / (m 2^m)  [ns]")
    ax2.set_title(f"transform, spread x{report.walsh_spread:.2f}")
    fig.tight_layout()
    png = os.path.join(outdir, "bench.png")
    fig.savefig(png, dpi=120)
    plt.close(fig)
    return [tsv, png]


def write_solve_report(result, text: str, outdir) -> list[str]:
    """result.txt, stages.tsv and a stage-timing bar figure."""
    os.makedirs(outdir, exist_ok=True)
    doc = os.path.join(outdir, "result.txt")
    with open(doc, "w") as fh:
        fh.write(text)
    report = result.stage_report
    stages = [
        (k.removeprefix("t_").removesuffix("_ms"), report[k])
        for k in ("t_decimate_ms", "t_combine_ms", "t_spectrum_ms", "t_recover_ms")
    ]
    tsv = os.path.join(outdir, "stages.tsv")
    _write_tsv(tsv, ("stage", "milliseconds"), [(s, repr(v)) for s, v in stages])
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.bar([s for s, _ in stages], [v for _, v in stages])
    ax.set_ylabel("milliseconds")
    ax.set_title(f"success={result.success}, agreement={result.agreement:.4f}")
    fig.tight_layout()
    png = os.path.join(outdir, "stages.png")
    fig.savefig(png, dpi=120)
    plt.close(fig)
    return [doc, tsv, png]
