"""Shannon-entropy concentration metrics for equilibrium hash-rate profiles.

Under a linear reward each equilibrium rate splits exactly into a coupon
part (beta_i) and a cost part (rho / alpha_i). Entropy is concave, so the
entropy of the full profile is bounded below by the mixture of the two
parts' entropies; the bound is reported alongside the coefficient.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .model import LINEAR, EquilibriumSolution, Scenario, _check_finite

# slack for the concavity bound; pure float dust at sane sizes
_BOUND_SLACK = 1e-12

# a solution whose rates stray further than this from beta + rho/alpha was
# not produced for this scenario (or not by the closed form)
_MIXTURE_TOL = 1e-10


class AllZero(ValueError):
    """No positive weight to normalize."""


class NotLinearReward(ValueError):
    """The coupon/cost decomposition only exists under a linear reward."""


class MixtureMismatch(ValueError):
    """Solution rates do not equal beta + rho/alpha; stale or foreign solution."""


@dataclass(frozen=True)
class DecentralizationReport:
    """Entropy of an equilibrium profile and its coupon/cost lower bound.

    coupon_weight is the share of the total hash rate that coupons
    contribute; coupon_component is None when no miner holds coupons (the
    coupon side of the mixture is then empty, and the bound reduces to the
    cost term alone).
    """

    coefficient: float
    coupon_component: float | None
    cost_component: float
    coupon_weight: float
    lower_bound: float
    bound_satisfied: bool


def entropy(weights: Sequence[float], base: float = math.e) -> float:
    """Shannon entropy of weights normalized to a distribution.

    Zero weights contribute nothing (the p*log(p) limit at 0). Raises
    AllZero when no weight is positive, ValueError on negative or
    non-finite weights or a base not exceeding 1.
    """
    base = _check_finite("base", base)
    if base <= 1.0:
        raise ValueError(f"entropy base must be > 1, got {base}")
    ws = [_check_finite("weight", w) for w in weights]
    for w in ws:
        if w < 0:
            raise ValueError(f"weights must be >= 0, got {w}")
    total = math.fsum(ws)
    if total <= 0.0:
        raise AllZero("entropy needs at least one positive weight")
    acc = math.fsum(p * math.log(p) for p in (w / total for w in ws) if p > 0.0)
    return -acc / math.log(base) + 0.0


def decentralization_coefficient(hash_rates: Sequence[float], base: float = math.e) -> float:
    """Entropy of an equilibrium hash-rate profile; the headline metric.

    Ranges from 0 (one miner does everything) to log(n) in the chosen base
    (perfectly even split).
    """
    return entropy(hash_rates, base)


def decomposition_report(
    scenario: Scenario,
    solution: EquilibriumSolution,
    base: float = math.e,
) -> DecentralizationReport:
    """Split an equilibrium's entropy into coupon and cost contributions.

    Linear rewards only: each rate is beta_i + rho/alpha_i, a mixture of
    the coupon profile (beta_1..beta_n) and the cost profile (rho/alpha_i)
    with mixture weight coupon_weight = sum(beta) / H. Concavity of
    entropy gives

        coefficient >= coupon_weight * H(coupon profile)
                       + (1 - coupon_weight) * H(cost profile)

    which is checked (with float slack) and reported as bound_satisfied.

    Raises NotLinearReward for other reward families and MixtureMismatch
    when the solution's rates do not reproduce beta + rho/alpha, which
    means the solution does not belong to this scenario.
    """
    if scenario.reward.kind != LINEAR:
        raise NotLinearReward(
            f"the coupon/cost decomposition requires a linear reward, got {scenario.reward.kind!r}"
        )
    rho = scenario.reward.rho
    coupon_part = [m.beta for m in scenario.miners]
    cost_part = [rho / m.alpha for m in scenario.miners]
    for m, b, c, h in zip(scenario.miners, coupon_part, cost_part, solution.hash_rates):
        if abs(h - (b + c)) > _MIXTURE_TOL:
            raise MixtureMismatch(
                f"miner {m.id!r}: rate {h!r} differs from beta + rho/alpha = {b + c!r} "
                f"by more than {_MIXTURE_TOL:g}; solution does not match the scenario"
            )

    coupon_weight = min(1.0, max(0.0, sum(coupon_part) / solution.total_hash))
    coefficient = entropy(solution.hash_rates, base)
    cost_component = entropy(cost_part, base)
    coupon_component = entropy(coupon_part, base) if coupon_weight > 0.0 else None
    lower_bound = (1.0 - coupon_weight) * cost_component
    if coupon_component is not None:
        lower_bound += coupon_weight * coupon_component
    return DecentralizationReport(
        coefficient=coefficient,
        coupon_component=coupon_component,
        cost_component=cost_component,
        coupon_weight=coupon_weight,
        lower_bound=lower_bound,
        bound_satisfied=coefficient >= lower_bound - _BOUND_SLACK,
    )
