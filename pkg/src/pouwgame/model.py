"""Domain types and the cost/reward/utility primitives of the mining game.

Miners spend hash rate to win a pro-rata share of a block reward that
depends on the total hash rate. The cost side is quadratic,
(alpha/2)*h**2 - alpha*beta*h: alpha prices compute, and the first beta
units (compute coupons, hash rate whose cost is already paid for by
outside demand for the useful work) carry zero or negative marginal cost.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

LINEAR = "linear"
CONSTANT = "constant"
POWER = "power"


def _check_finite(name: str, value: float) -> float:
    out = float(value)
    if not math.isfinite(out):
        raise ValueError(f"{name} must be finite, got {value!r}")
    return out


def _check_hash_rate(h: float) -> float:
    h = _check_finite("hash rate", h)
    if h < 0:
        raise ValueError(f"hash rate must be >= 0, got {h}")
    return h


@dataclass(frozen=True)
class MinerParams:
    """Cost parameters of a single miner.

    alpha > 0 is the compute cost coefficient; beta >= 0 is the coupon
    endowment, measured in hash-rate units whose marginal cost is
    subsidized away.
    """

    id: str
    alpha: float
    beta: float

    def __post_init__(self) -> None:
        if not isinstance(self.id, str) or not self.id:
            raise ValueError("miner id must be a non-empty string")
        object.__setattr__(self, "alpha", _check_finite("alpha", self.alpha))
        object.__setattr__(self, "beta", _check_finite("beta", self.beta))
        if self.alpha <= 0:
            raise ValueError(f"miner {self.id!r}: alpha must be > 0, got {self.alpha}")
        if self.beta < 0:
            raise ValueError(f"miner {self.id!r}: beta must be >= 0, got {self.beta}")


@dataclass(frozen=True)
class RewardSpec:
    """Block reward R(H) as a function of the total hash rate H, plus its slope.

    Three families, all positive and differentiable on H > 0:

        linear    R(H) = rho * H        rho > 0
        constant  R(H) = r0             r0 > 0
        power     R(H) = a * H**gamma   a > 0, 0 <= gamma <= 1

    Build instances through the linear/constant/power constructors; the
    per-family parameter fields stay None for the other families.
    """

    kind: str
    rho: float | None = None
    r0: float | None = None
    a: float | None = None
    gamma: float | None = None

    def __post_init__(self) -> None:
        wanted = {LINEAR: ("rho",), CONSTANT: ("r0",), POWER: ("a", "gamma")}
        if self.kind not in wanted:
            raise ValueError(f"unknown reward kind {self.kind!r}")
        for name in ("rho", "r0", "a", "gamma"):
            value = getattr(self, name)
            if name in wanted[self.kind]:
                if value is None:
                    raise ValueError(f"{self.kind} reward requires {name}")
                object.__setattr__(self, name, _check_finite(name, value))
            elif value is not None:
                raise ValueError(f"{self.kind} reward does not take {name}")
        if self.kind == LINEAR and self.rho <= 0:
            raise ValueError(f"rho must be > 0, got {self.rho}")
        if self.kind == CONSTANT and self.r0 <= 0:
            raise ValueError(f"r0 must be > 0, got {self.r0}")
        if self.kind == POWER:
            if self.a <= 0:
                raise ValueError(f"a must be > 0, got {self.a}")
            if not 0.0 <= self.gamma <= 1.0:
                raise ValueError(f"gamma must lie in [0, 1], got {self.gamma}")

    @classmethod
    def linear(cls, rho: float) -> "RewardSpec":
        return cls(LINEAR, rho=rho)

    @classmethod
    def constant(cls, r0: float) -> "RewardSpec":
        return cls(CONSTANT, r0=r0)

    @classmethod
    def power(cls, a: float, gamma: float) -> "RewardSpec":
        return cls(POWER, a=a, gamma=gamma)

    def value(self, total_hash: float) -> float:
        """R(H) for H > 0."""
        H = _check_finite("total_hash", total_hash)
        if H <= 0:
            raise ValueError(f"total_hash must be > 0, got {H}")
        if self.kind == LINEAR:
            return self.rho * H
        if self.kind == CONSTANT:
            return self.r0
        return self.a * H ** self.gamma

    def slope(self, total_hash: float) -> float:
        """R'(H) for H > 0."""
        H = _check_finite("total_hash", total_hash)
        if H <= 0:
            raise ValueError(f"total_hash must be > 0, got {H}")
        if self.kind == LINEAR:
            return self.rho
        if self.kind == CONSTANT:
            return 0.0
        return self.a * self.gamma * H ** (self.gamma - 1.0)


@dataclass(frozen=True)
class Scenario:
    """A full game instance: two or more miners plus a reward function.

    blocks is the horizon length used by coupon-schedule analyses; the
    equilibrium itself is always per block.
    """

    miners: tuple[MinerParams, ...]
    reward: RewardSpec
    blocks: int = 1

    def __post_init__(self) -> None:
        object.__setattr__(self, "miners", tuple(self.miners))
        if len(self.miners) < 2:
            raise ValueError("a scenario needs at least two miners")
        for m in self.miners:
            if not isinstance(m, MinerParams):
                raise ValueError(f"miners must be MinerParams, got {type(m).__name__}")
        ids = [m.id for m in self.miners]
        if len(set(ids)) != len(ids):
            dupes = sorted({i for i in ids if ids.count(i) > 1})
            raise ValueError(f"duplicate miner ids: {', '.join(dupes)}")
        if not isinstance(self.reward, RewardSpec):
            raise ValueError(f"reward must be a RewardSpec, got {type(self.reward).__name__}")
        if not isinstance(self.blocks, int) or isinstance(self.blocks, bool) or self.blocks < 1:
            raise ValueError(f"blocks must be an integer >= 1, got {self.blocks!r}")


@dataclass(frozen=True)
class SolverDiagnostics:
    """How an equilibrium was obtained.

    method is "closed_form" (linear rewards), "fixed_point" (scalar root
    find on the aggregate), or "dynamics" (best-response iteration limit).
    """

    method: str
    iterations: int
    bracket: tuple[float, float] | None = None

    def __post_init__(self) -> None:
        if self.method not in ("closed_form", "fixed_point", "dynamics"):
            raise ValueError(f"unknown solver method {self.method!r}")
        if not isinstance(self.iterations, int) or self.iterations < 0:
            raise ValueError(f"iterations must be a non-negative integer, got {self.iterations!r}")


@dataclass(frozen=True)
class EquilibriumSolution:
    """Per-miner equilibrium hash rates with utilities and stationarity residuals.

    Every hash rate is strictly positive (coupon holders mine their
    subsidized rate at minimum, and a zero rate is never stationary when
    competitors leave reward on the table). total_hash is exactly the
    builtin sum of hash_rates.
    """

    hash_rates: tuple[float, ...]
    total_hash: float
    utilities: tuple[float, ...]
    residuals: tuple[float, ...]
    solver: SolverDiagnostics

    def __post_init__(self) -> None:
        for name in ("hash_rates", "utilities", "residuals"):
            object.__setattr__(self, name, tuple(float(x) for x in getattr(self, name)))
        n = len(self.hash_rates)
        if n < 2:
            raise ValueError("a solution needs at least two miners")
        if len(self.utilities) != n or len(self.residuals) != n:
            raise ValueError("hash_rates, utilities and residuals must have equal length")
        for h in self.hash_rates:
            if not math.isfinite(h) or h <= 0:
                raise ValueError(f"equilibrium hash rates must be > 0, got {h}")
        if self.total_hash != sum(self.hash_rates):
            raise ValueError("total_hash must equal the sum of hash_rates")

    @property
    def shares(self) -> tuple[float, ...]:
        """Each miner's fraction of the total hash rate."""
        return tuple(h / self.total_hash for h in self.hash_rates)


def cost(miner: MinerParams, h: float) -> float:
    """Net cost of producing hash rate h: (alpha/2)*h**2 - alpha*beta*h.

    Negative when the coupon subsidy outweighs the compute spend; zero at
    h = 0 (staying out is free).
    """
    h = _check_hash_rate(h)
    return 0.5 * miner.alpha * h * h - miner.alpha * miner.beta * h


def marginal_cost(miner: MinerParams, h: float) -> float:
    """Cost of the next unit of hash rate at h: alpha * (h - beta)."""
    h = _check_hash_rate(h)
    return miner.alpha * (h - miner.beta)


def utility(miner: MinerParams, h: float, h_others: float, reward: RewardSpec) -> float:
    """Expected net reward at hash rate h against an aggregate h_others.

    Pro-rata reward share minus cost: (h / (h + h_others)) * R(h + h_others)
    - cost(h). h_others must be strictly positive; without competition the
    pro-rata share is discontinuous at zero and the game degenerates.
    """
    h = _check_hash_rate(h)
    h_others = _check_finite("h_others", h_others)
    if h_others <= 0:
        raise ValueError(f"h_others must be > 0, got {h_others}")
    total = h + h_others
    return (h / total) * reward.value(total) - cost(miner, h)


def equilibrium_utility_linear(miner: MinerParams, rho: float) -> float:
    """Utility at the linear-reward equilibrium rate beta + rho/alpha.

    Closed form (alpha**2 * beta**2 + 2*alpha*beta*rho + rho**2) / (2*alpha),
    independent of every other miner's behaviour.
    """
    rho = _check_finite("rho", rho)
    if rho <= 0:
        raise ValueError(f"rho must be > 0, got {rho}")
    a, b = miner.alpha, miner.beta
    return (a * a * b * b + 2.0 * a * b * rho + rho * rho) / (2.0 * a)
