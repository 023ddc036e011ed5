"""Complexity report: measured plan ledgers beside published baselines.

The proposed rows are computed live from count_ops over the builtin
plans; the competitor rows (Cooley-Tukey radix-2/4, split-radix,
Rader-Brenner) and the mu lower-bound row are cited constants, never
implemented here.
"""

from __future__ import annotations

from dataclasses import dataclass

from .fastplan import count_ops
from .plans import builtin_plan

# Minimal multiplicative complexity mu(DFT(N)) for short blocklengths.
MU_DFT = {4: 0, 8: 2, 12: 4, 16: 10}

# Published operation counts (M, A) of competitor fast algorithms.
_BASELINES = {
    8: (
        ("Cooley-Tukey-4", 12, 48),
        ("Split-Radix", 8, 42),
        ("Cooley-Tukey-2", 4, 26),
        ("Rader-Brenner", 2, 24),
    ),
    16: (
        ("Cooley-Tukey-2", 20, 74),
        ("Cooley-Tukey-4", 14, 70),
        ("Split-Radix", 12, 64),
        ("Rader-Brenner", 10, 64),
    ),
}

_PROPOSED = {8: "n8_p7", 16: "n16_p31"}


@dataclass(frozen=True)
class ReportRow:
    algorithm: str
    n: int
    mults: int | None
    adds: int | None
    total: int | None
    source: str  # "paper" or "measured"


def complexity_report() -> tuple[ReportRow, ...]:
    """All report rows: mu bounds, then per-blocklength comparisons."""
    rows = [
        ReportRow("mu(DFT)", n, MU_DFT[n], None, None, "paper")
        for n in sorted(MU_DFT)
    ]
    for n in sorted(_BASELINES):
        for name, m, a in _BASELINES[n]:
            rows.append(ReportRow(name, n, m, a, m + a, "paper"))
        cost = count_ops(builtin_plan(_PROPOSED[n]))
        rows.append(
            ReportRow(
                "Proposed",
                n,
                cost.total_mults,
                cost.total_adds,
                cost.total,
                "measured",
            )
        )
    return tuple(rows)


def _cell(v: int | None) -> str:
    return "" if v is None else str(v)


def render_report(fmt: str = "md") -> str:
    """Render the report as markdown tables or flat csv."""
    rows = complexity_report()
    if fmt == "csv":
        lines = ["algorithm,N,M,A,total,source"]
        for r in rows:
            lines.append(
                f"{r.algorithm},{r.n},{_cell(r.mults)},{_cell(r.adds)},"
                f"{_cell(r.total)},{r.source}"
            )
        return "\n".join(lines) + "\n"
    if fmt != "md":
        raise ValueError(f"unknown report format {fmt!r}")
    out = []
    mu_rows = [r for r in rows if r.algorithm == "mu(DFT)"]
    out.append("## Multiplicative complexity lower bounds")
    out.append("")
    out.append("| N | mu(DFT(N)) | source |")
    out.append("| --- | --- | --- |")
    for r in mu_rows:
        out.append(f"| {r.n} | {r.mults} | {r.source} |")
    for n in sorted(_BASELINES):
        out.append("")
        out.append(f"## Complexity of the {n}-point transform")
        out.append("")
        out.append(f"| algorithm | M({n}) | A({n}) | M({n})+A({n}) | source |")
        out.append("| --- | --- | --- | --- | --- |")
        for r in rows:
            if r.n == n and r.algorithm != "mu(DFT)":
                out.append(
                    f"| {r.algorithm} | {r.mults} | {r.adds} | {r.total} | {r.source} |"
                )
    return "\n".join(out) + "\n"
