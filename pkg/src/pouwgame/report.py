"""Plain-text tables and CSV emission for solver results.

Tables round to 6 significant digits for the eye; CSV carries 17 so a
re-read reproduces every float bit for bit. Sweep CSVs are long format,
one row per (swept value, miner), with an error column so degenerate
values show up as data instead of aborting the file. Per-scenario totals
ride along as trailing summary rows whose first cell is '#'.
"""

from __future__ import annotations

import csv
import io
import math

from .decentralization import decentralization_coefficient
from .model import EquilibriumSolution, Scenario

SOLVE_HEADER = ("miner_id", "alpha", "beta", "hash_rate", "share", "utility", "foc_residual")
SWEEP_HEADER = ("swept_value",) + SOLVE_HEADER + ("error",)


def fmt_cell(x: float) -> str:
    """6 significant digits, for tables."""
    return f"{x:.6g}"


def fmt_csv(x: float) -> str:
    """17 significant digits, enough to round-trip a double exactly."""
    return f"{x:.17g}"


def _miner_row(scenario: Scenario, solution: EquilibriumSolution, i: int, fmt) -> list[str]:
    m = scenario.miners[i]
    return [
        m.id,
        fmt(m.alpha),
        fmt(m.beta),
        fmt(solution.hash_rates[i]),
        fmt(solution.shares[i]),
        fmt(solution.utilities[i]),
        fmt(solution.residuals[i]),
    ]


def _summary_cells(solution: EquilibriumSolution, base: float) -> list[tuple[str, float]]:
    return [
        ("total_hash", solution.total_hash),
        ("total_utility", sum(solution.utilities)),
        ("decentralization", decentralization_coefficient(solution.hash_rates, base)),
    ]


def solution_table(scenario: Scenario, solution: EquilibriumSolution, base: float = math.e) -> str:
    """Fixed-width per-miner table with totals and solver provenance."""
    rows = [list(SOLVE_HEADER)]
    for i in range(len(scenario.miners)):
        rows.append(_miner_row(scenario, solution, i, fmt_cell))
    widths = [max(len(r[c]) for r in rows) for c in range(len(SOLVE_HEADER))]
    lines = ["  ".join(cell.rjust(w) for cell, w in zip(row, widths)) for row in rows]
    for name, value in _summary_cells(solution, base):
        lines.append(f"{name}: {fmt_cell(value)}")
    diag = solution.solver
    extra = "" if diag.bracket is None else f", bracket ({fmt_cell(diag.bracket[0])}, {fmt_cell(diag.bracket[1])})"
    lines.append(f"solver: {diag.method} ({diag.iterations} iterations{extra})")
    return "\n".join(lines)


def solve_csv_rows(
    scenario: Scenario, solution: EquilibriumSolution, base: float = math.e
) -> list[list[str]]:
    """CSV payload for one solved scenario: header, miner rows, '#' summaries."""
    rows = [list(SOLVE_HEADER)]
    for i in range(len(scenario.miners)):
        rows.append(_miner_row(scenario, solution, i, fmt_csv))
    for name, value in _summary_cells(solution, base):
        rows.append(["#", name, fmt_csv(value)])
    return rows


def sweep_csv_rows(
    outcomes: list[tuple[float, Scenario, EquilibriumSolution | None, str | None]],
    base: float = math.e,
) -> list[list[str]]:
    """CSV payload for a sweep.

    outcomes holds (value, scenario as swept, solution or None, error or
    None) per grid point. A failed point becomes a single row with the
    miner cells blank and the error column filled; successful points get
    one row per miner (error blank) plus '#' summary rows keyed by the
    swept value.
    """
    rows = [list(SWEEP_HEADER)]
    blank = [""] * len(SOLVE_HEADER)
    for value, scenario, solution, error in outcomes:
        if solution is None:
            rows.append([fmt_csv(value), *blank, error or "failed"])
            continue
        for i in range(len(scenario.miners)):
            rows.append([fmt_csv(value), *_miner_row(scenario, solution, i, fmt_csv), ""])
        for name, total in _summary_cells(solution, base):
            rows.append(["#", fmt_csv(value), name, fmt_csv(total)])
    return rows


def render_csv(rows: list[list[str]]) -> str:
    """Serialize rows with '\\n' line ends regardless of platform."""
    buf = io.StringIO()
    csv.writer(buf, lineterminator="\n").writerows(rows)
    return buf.getvalue()


def write_csv(path: str, rows: list[list[str]]) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(render_csv(rows))


def read_csv(path: str) -> list[list[str]]:
    with open(path, "r", encoding="utf-8", newline="") as fh:
        return list(csv.reader(fh))
