"""SVG chart rendering for the CLI report path.

Matplotlib with the Agg backend; output is deterministic (fixed hash salt,
no embedded timestamps) so repeated runs produce identical files.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .model import EquilibriumSolution, Scenario

_SVG_SALT = "pouwgame"


def _save_svg(fig, path: str) -> None:
    with plt.rc_context({"svg.hashsalt": _SVG_SALT}):
        fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)


def render_solution_chart(path: str, scenario: Scenario, solution: EquilibriumSolution) -> None:
    """Bar chart of per-miner equilibrium hash rates, annotated with shares."""
    ids = [m.id for m in scenario.miners]
    fig, ax = plt.subplots(figsize=(8.0, 4.5))
    bars = ax.bar(range(len(ids)), solution.hash_rates, color="#4878a8")
    for bar, share in zip(bars, solution.shares):
        ax.annotate(
            f"{share:.1%}",
            (bar.get_x() + bar.get_width() / 2.0, bar.get_height()),
            ha="center",
            va="bottom",
            fontsize=9,
        )
    ax.set_xticks(range(len(ids)), ids)
    ax.set_ylabel("equilibrium hash rate")
    ax.set_title(f"total hash rate {solution.total_hash:.6g}")
    ax.grid(axis="y", alpha=0.3)
    fig.tight_layout()
    _save_svg(fig, path)


def render_sweep_chart(
    path: str,
    parameter: str,
    outcomes: list[tuple[float, Scenario, EquilibriumSolution | None, str | None]],
) -> None:
    """Line chart of each miner's rate (and the total) across the sweep.

    Failed grid points are simply absent from the lines.
    """
    solved = [(v, scn, sol) for v, scn, sol, _ in outcomes if sol is not None]
    fig, ax = plt.subplots(figsize=(8.0, 4.5))
    if solved:
        ids = [m.id for m in solved[0][1].miners]
        xs = [v for v, _, _ in solved]
        for i, miner_id in enumerate(ids):
            ax.plot(xs, [sol.hash_rates[i] for _, _, sol in solved], marker="o", label=miner_id)
        ax.plot(xs, [sol.total_hash for _, _, sol in solved], "k--", label="total")
        ax.legend()
    ax.set_xlabel(parameter)
    ax.set_ylabel("equilibrium hash rate")
    ax.grid(alpha=0.3)
    fig.tight_layout()
    _save_svg(fig, path)
