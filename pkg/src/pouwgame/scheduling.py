"""Coupon-budget allocation across a horizon of blocks.

Blocks are independent copies of the same game, so a coupon schedule is
scored by summing the linear-reward equilibrium utility block by block.
That utility is strictly convex in the coupon level (its beta**2
coefficient is alpha/2 > 0), so a fixed budget buys the most when it is
spent all at once rather than spread out.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .model import MinerParams, _check_finite, equilibrium_utility_linear

# allocations produced by dividing a budget can overshoot it by float dust
_BUDGET_SLACK = 1e-9


def _check_budget_inputs(alpha: float, budget: float, blocks: int, rho: float):
    alpha = _check_finite("alpha", alpha)
    if alpha <= 0:
        raise ValueError(f"alpha must be > 0, got {alpha}")
    budget = _check_finite("budget", budget)
    if budget < 0:
        raise ValueError(f"budget must be >= 0, got {budget}")
    if not isinstance(blocks, int) or isinstance(blocks, bool) or blocks < 1:
        raise ValueError(f"blocks must be an integer >= 1, got {blocks!r}")
    rho = _check_finite("rho", rho)
    if rho <= 0:
        raise ValueError(f"rho must be > 0, got {rho}")
    return alpha, budget, blocks, rho


@dataclass(frozen=True)
class CouponSchedule:
    """An assignment of coupon amounts to each block of a horizon.

    Unused budget may expire (sum of the allocation can fall short of the
    budget) but the allocation can never exceed it.
    """

    allocation: tuple[float, ...]
    budget: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "allocation", tuple(float(x) for x in self.allocation))
        if not self.allocation:
            raise ValueError("allocation must cover at least one block")
        for x in self.allocation:
            if not math.isfinite(x) or x < 0:
                raise ValueError(f"allocations must be finite and >= 0, got {x}")
        object.__setattr__(self, "budget", _check_finite("budget", self.budget))
        if self.budget < 0:
            raise ValueError(f"budget must be >= 0, got {self.budget}")
        if sum(self.allocation) > self.budget + _BUDGET_SLACK * max(1.0, self.budget):
            raise ValueError(
                f"allocation sums to {sum(self.allocation):g}, exceeding the budget {self.budget:g}"
            )

    @property
    def blocks(self) -> int:
        return len(self.allocation)


@dataclass(frozen=True)
class ScheduleEvaluation:
    """Block-by-block equilibrium utilities of a schedule and their sum."""

    per_block_utility: tuple[float, ...]
    total_utility: float

    def __post_init__(self) -> None:
        object.__setattr__(
            self, "per_block_utility", tuple(float(x) for x in self.per_block_utility)
        )
        if self.total_utility != sum(self.per_block_utility):
            raise ValueError("total_utility must equal the sum of per_block_utility")


def evaluate_schedule(alpha: float, schedule: CouponSchedule, rho: float) -> ScheduleEvaluation:
    """Score a schedule for a miner with cost coefficient alpha under R = rho*H.

    Block t is an independent game played with beta = allocation[t]; the
    closed-form equilibrium utility makes the other miners irrelevant.
    """
    alpha, _, _, rho = _check_budget_inputs(alpha, schedule.budget, schedule.blocks, rho)
    per_block = tuple(
        equilibrium_utility_linear(MinerParams("scheduled", alpha, b), rho)
        for b in schedule.allocation
    )
    return ScheduleEvaluation(per_block_utility=per_block, total_utility=sum(per_block))


def optimal_schedule(alpha: float, budget: float, blocks: int, rho: float) -> CouponSchedule:
    """Best feasible schedule: the whole budget concentrated in one block.

    Convexity of the per-block utility in beta puts the optimum at a corner
    of the budget simplex; every corner scores the same, and the last block
    is the canonical pick. alpha and rho only scale the gain, so they are
    validated but do not steer the choice.
    """
    alpha, budget, blocks, rho = _check_budget_inputs(alpha, budget, blocks, rho)
    allocation = [0.0] * blocks
    allocation[-1] = budget
    return CouponSchedule(allocation=tuple(allocation), budget=budget)


def uniform_schedule(budget: float, blocks: int) -> CouponSchedule:
    """The budget spread evenly over the horizon, the natural baseline."""
    budget = _check_finite("budget", budget)
    if budget < 0:
        raise ValueError(f"budget must be >= 0, got {budget}")
    if not isinstance(blocks, int) or isinstance(blocks, bool) or blocks < 1:
        raise ValueError(f"blocks must be an integer >= 1, got {blocks!r}")
    return CouponSchedule(allocation=(budget / blocks,) * blocks, budget=budget)


def concentration_gain(alpha: float, budget: float, blocks: int, rho: float) -> float:
    """Extra utility from concentrating the budget instead of splitting it evenly.

    Zero when blocks == 1 or budget == 0, strictly positive otherwise; at
    two blocks the gain reduces to alpha * budget**2 / 4.
    """
    alpha, budget, blocks, rho = _check_budget_inputs(alpha, budget, blocks, rho)
    best = evaluate_schedule(alpha, optimal_schedule(alpha, budget, blocks, rho), rho)
    even = evaluate_schedule(alpha, uniform_schedule(budget, blocks), rho)
    return best.total_utility - even.total_utility
