"""Nash-equilibrium solvers for the mining game.

Two independent routes to the same answer. The algebraic route evaluates
the per-miner stationarity formula at a self-consistent total hash rate
(a closed form under linear rewards, a scalar root find otherwise). The
numeric route maximizes each miner's utility directly with a
derivative-free search and iterates best responses; it never touches the
algebra, so it can vouch for it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from scipy.optimize import brentq

from .model import (
    LINEAR,
    EquilibriumSolution,
    MinerParams,
    RewardSpec,
    Scenario,
    SolverDiagnostics,
    _check_finite,
    utility,
    equilibrium_utility_linear,
)

# Terminal bracket width of the golden-section localization stage.
_BR_WIDTH = 1e-10
_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0
_INV_PHI2 = (3.0 - math.sqrt(5.0)) / 2.0

# Half-width of the chord-balance polish stencil, relative to 1 + |h|.
_CHORD_DELTA = 1e-3

# First abscissa of the geometric bracket scan over the aggregate.
_SCAN_START = 1e-12

# Refined roots closer than this (relative) are the same root.
_ROOT_MERGE = 1e-9


class SolverFailure(RuntimeError):
    """Base class for equilibrium solver failures."""


class NoBracket(SolverFailure):
    """The aggregate-excess function never changes sign on the scanned range."""


class NoConvergence(SolverFailure):
    """Iteration budget exhausted or a post-solve check failed.

    When raised by best_response_dynamics, the trajectory gathered so far
    is attached as the `trajectory` attribute.
    """

    def __init__(self, message: str, trajectory: list[tuple[float, ...]] | None = None):
        super().__init__(message)
        self.trajectory = trajectory


class DegenerateDenominator(SolverFailure):
    """The stationarity formula's denominator alpha*H**2 + R(H) - H*R'(H) is not positive."""


class MultipleRoots(SolverFailure):
    """More than one self-consistent total hash rate survived refinement."""


@dataclass(frozen=True)
class SolverConfig:
    """Knobs for the equilibrium solvers; the defaults suit well-scaled inputs.

    h_max bounds each miner's strategy interval [0, h_max] (and the
    aggregate scan at n * h_max). fp_tol bounds the relative
    self-consistency gap of the aggregate, foc_tol the per-miner
    stationarity residual, dynamics_tol the sup-norm step at which
    best-response iteration is declared converged.
    """

    h_max: float = 1e9
    fp_tol: float = 1e-12
    foc_tol: float = 1e-8
    max_iters: int = 200
    dynamics_tol: float = 1e-10

    def __post_init__(self) -> None:
        for name in ("h_max", "fp_tol", "foc_tol", "dynamics_tol"):
            value = _check_finite(name, getattr(self, name))
            object.__setattr__(self, name, value)
            if value <= 0:
                raise ValueError(f"{name} must be > 0, got {value}")
        if not isinstance(self.max_iters, int) or self.max_iters < 1:
            raise ValueError(f"max_iters must be an integer >= 1, got {self.max_iters!r}")


@dataclass(frozen=True)
class BestResponseResult:
    """Outcome of one derivative-free best-response search."""

    h_star: float
    u_star: float
    evaluations: int


def _utility_slope(miner: MinerParams, h: float, total: float, reward: RewardSpec) -> float:
    # d/dh of (h/H)*R(H) - cost(h) with H = h + (others held fixed at total - h)
    r = reward.value(total)
    rp = reward.slope(total)
    return (total - h) / (total * total) * r + (h / total) * rp - miner.alpha * (h - miner.beta)


def best_response_formula(miner: MinerParams, total_hash: float, reward: RewardSpec) -> float:
    """Stationary hash rate of one miner when the aggregate is total_hash.

    (alpha*beta*H**2 + H*R(H)) / (alpha*H**2 + R(H) - H*R'(H)). Raises
    DegenerateDenominator unless the denominator is positive; for the
    built-in reward families it always is.
    """
    H = _check_finite("total_hash", total_hash)
    if H <= 0:
        raise ValueError(f"total_hash must be > 0, got {H}")
    r = reward.value(H)
    rp = reward.slope(H)
    denom = miner.alpha * H * H + r - H * rp
    if denom <= 0:
        raise DegenerateDenominator(
            f"alpha*H**2 + R(H) - H*R'(H) = {denom:g} at H = {H:g}; no interior stationary point"
        )
    return (miner.alpha * miner.beta * H * H + H * r) / denom


def _check_residuals(residuals: tuple[float, ...], config: SolverConfig) -> None:
    worst = max(residuals)
    if worst > config.foc_tol:
        raise NoConvergence(f"stationarity residual {worst:g} exceeds foc_tol {config.foc_tol:g}")


def solve_linear(scenario: Scenario, config: SolverConfig | None = None) -> EquilibriumSolution:
    """Closed-form equilibrium under a linear reward: h_i = beta_i + rho/alpha_i.

    Each miner's rate is independent of everyone else's parameters, so no
    iteration is needed. Utilities use the matching closed form; residuals
    are still evaluated and checked against config.foc_tol.
    """
    cfg = config if config is not None else SolverConfig()
    if scenario.reward.kind != LINEAR:
        raise ValueError(f"solve_linear requires a linear reward, got {scenario.reward.kind!r}")
    rho = scenario.reward.rho
    rates = tuple(m.beta + rho / m.alpha for m in scenario.miners)
    total = sum(rates)
    utilities = tuple(equilibrium_utility_linear(m, rho) for m in scenario.miners)
    residuals = tuple(
        abs(_utility_slope(m, h, total, scenario.reward)) for m, h in zip(scenario.miners, rates)
    )
    _check_residuals(residuals, cfg)
    diag = SolverDiagnostics(method="closed_form", iterations=0, bracket=None)
    return EquilibriumSolution(rates, total, utilities, residuals, diag)


def _scan_sign_changes(g, lo: float, hi: float):
    """Walk lo, 2*lo, 4*lo, ... up to hi; collect sign-change brackets and exact zeros."""
    brackets: list[tuple[float, float]] = []
    zeros: list[float] = []
    prev_x = lo
    prev_g = g(lo)
    if prev_g == 0.0:
        zeros.append(lo)
    x = lo
    while x < hi:
        x = min(x * 2.0, hi)
        gx = g(x)
        if gx == 0.0:
            zeros.append(x)
        elif prev_g != 0.0 and (gx > 0.0) != (prev_g > 0.0):
            brackets.append((prev_x, x))
        prev_x, prev_g = x, gx
    return brackets, zeros


def solve_general(scenario: Scenario, config: SolverConfig | None = None) -> EquilibriumSolution:
    """Equilibrium for any reward family via a one-dimensional root find.

    The stationarity formula pins each miner's rate as a function of the
    aggregate H alone, so an equilibrium total is a root of

        G(H) = sum_i h_i(H) - H

    on (0, n * h_max]. A geometric doubling scan locates every sign change
    of G, each bracket is refined with Brent's method, and exactly one
    distinct root may survive (the game is concave, so the equilibrium is
    unique; a second root would mean the model broke down). Linear rewards
    short-circuit to the closed form.

    Raises NoBracket when the scan finds no sign change, MultipleRoots when
    refinement leaves more than one root, DegenerateDenominator where the
    stationarity formula breaks down, and NoConvergence when refinement or
    the post-solve consistency checks fail.
    """
    cfg = config if config is not None else SolverConfig()
    if scenario.reward.kind == LINEAR:
        return solve_linear(scenario, cfg)
    miners = scenario.miners
    reward = scenario.reward

    def aggregate_excess(H: float) -> float:
        return sum(best_response_formula(m, H, reward) for m in miners) - H

    hi = len(miners) * cfg.h_max
    brackets, zeros = _scan_sign_changes(aggregate_excess, _SCAN_START, hi)
    if not brackets and not zeros:
        raise NoBracket(
            f"no sign change of the aggregate excess in [{_SCAN_START:g}, {hi:g}]; "
            f"raise h_max if the equilibrium may lie outside"
        )

    roots = list(zeros)
    iterations = 0
    used_bracket: tuple[float, float] | None = None
    for blo, bhi in brackets:
        root, info = brentq(
            aggregate_excess,
            blo,
            bhi,
            xtol=1e-300,
            rtol=4.0 * math.ulp(1.0),
            maxiter=cfg.max_iters,
            full_output=True,
            disp=False,
        )
        if not info.converged:
            raise NoConvergence(f"root refinement stalled on bracket ({blo:g}, {bhi:g})")
        roots.append(root)
        iterations += info.iterations
        used_bracket = (blo, bhi)

    roots.sort()
    distinct = [roots[0]]
    for r in roots[1:]:
        if r - distinct[-1] > _ROOT_MERGE * max(1.0, abs(r)):
            distinct.append(r)
    if len(distinct) > 1:
        raise MultipleRoots(
            "aggregate excess has several roots: "
            + ", ".join(f"{r:.6g}" for r in distinct)
            + "; the instance violates the uniqueness the solver relies on"
        )
    h_star = distinct[0]

    rates = tuple(best_response_formula(m, h_star, reward) for m in miners)
    total = sum(rates)
    if abs(total - h_star) > cfg.fp_tol * h_star:
        raise NoConvergence(
            f"aggregate self-consistency gap {abs(total - h_star):g} exceeds fp_tol * H = {cfg.fp_tol * h_star:g}"
        )
    utilities = tuple(utility(m, h, total - h, reward) for m, h in zip(miners, rates))
    residuals = tuple(abs(_utility_slope(m, h, total, reward)) for m, h in zip(miners, rates))
    _check_residuals(residuals, cfg)
    diag = SolverDiagnostics(method="fixed_point", iterations=iterations, bracket=used_bracket)
    return EquilibriumSolution(rates, total, utilities, residuals, diag)


def _chord_root(g, lo: float, hi: float) -> float | None:
    """Bisect g to float resolution on [lo, hi]; None if no sign change."""
    glo, ghi = g(lo), g(hi)
    if glo == 0.0:
        return lo
    if ghi == 0.0:
        return hi
    if (glo > 0.0) == (ghi > 0.0):
        return None
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if not lo < mid < hi:
            break
        gm = g(mid)
        if gm == 0.0:
            return mid
        if (gm > 0.0) == (glo > 0.0):
            lo, glo = mid, gm
        else:
            hi, ghi = mid, gm
    return 0.5 * (lo + hi)


def numeric_best_response(
    miner: MinerParams,
    h_others: float,
    reward: RewardSpec,
    config: SolverConfig | None = None,
) -> BestResponseResult:
    """Maximize one miner's utility over [0, h_max] without derivatives.

    Two stages, both built from plain utility evaluations so the search
    stays independent of the stationarity algebra it is used to check.
    A golden-section shrink localizes the maximizer, but comparison-based
    search alone cannot place it more tightly than the square-root noise
    floor sqrt(eps * |u| / u''), around 1e-8 at unit scale. The polish
    stage therefore bisects the symmetric chord balance
    u(h + d) - u(h - d), whose root is the maximizer of the d-smoothed
    utility, at two stencil widths; one Richardson step cancels the d**2
    smoothing bias. That pins h_star to roughly 1e-10 absolute at unit
    scale and, crucially, makes repeated calls reproducible far below
    dynamics_tol. The utility is strictly concave in h, which makes the
    maximizer unique; concavity is probed at the result rather than
    assumed.

    Returns a BestResponseResult; u_star is never below the utility at
    either endpoint of the search interval.
    """
    cfg = config if config is not None else SolverConfig()
    h_others = _check_finite("h_others", h_others)
    if h_others <= 0:
        raise ValueError(f"h_others must be > 0, got {h_others}")

    evals = 0

    def f(h: float) -> float:
        nonlocal evals
        evals += 1
        return utility(miner, h, h_others, reward)

    a, b = 0.0, cfg.h_max
    u_left = f(a)
    u_right = f(b)
    best_h, best_u = (a, u_left) if u_left >= u_right else (b, u_right)

    width = b - a
    c = a + _INV_PHI2 * width
    d = a + _INV_PHI * width
    fc, fd = f(c), f(d)
    while b - a > _BR_WIDTH:
        prev_width = b - a
        if fc >= fd:
            b, d, fd = d, c, fc
            c = a + _INV_PHI2 * (b - a)
            fc = f(c)
            if fc > best_u:
                best_h, best_u = c, fc
        else:
            a, c, fc = c, d, fd
            d = a + _INV_PHI * (b - a)
            fd = f(d)
            if fd > best_u:
                best_h, best_u = d, fd
        if b - a >= prev_width:
            break  # float resolution floor reached before _BR_WIDTH

    # concavity probe: a convex kink at the result would mean the model
    # assumptions (hence uniqueness of the best response) do not hold
    delta = 1e-4 * (1.0 + abs(best_h))
    lo = max(0.0, best_h - delta)
    hi = min(cfg.h_max, best_h + delta)
    if hi > lo:
        mid = 0.5 * (lo + hi)
        gap = f(mid) - 0.5 * (f(lo) + f(hi))
        if gap < -1e-9 * max(1.0, abs(best_u)):
            raise NoConvergence(
                f"utility is not concave around h = {best_h:g} (midpoint gap {gap:g})"
            )

    # chord-balance polish (see docstring); falls back to the golden-section
    # point when the maximizer sits against an interval edge
    h_star, u_star = best_h, best_u
    d_full = _CHORD_DELTA * (1.0 + abs(best_h))
    lo = max(d_full, best_h - 4.0 * d_full)
    hi = min(cfg.h_max - d_full, best_h + 4.0 * d_full)
    if lo < hi:
        roots = []
        for d in (d_full, 0.5 * d_full):
            root = _chord_root(lambda h: f(h + d) - f(h - d), lo, hi)
            if root is None:
                roots = []
                break
            roots.append(root)
        if roots:
            polished = roots[1] + (roots[1] - roots[0]) / 3.0
            if lo <= polished <= hi:
                u_pol = f(polished)
                if u_pol >= u_left and u_pol >= u_right:
                    h_star, u_star = polished, u_pol

    return BestResponseResult(h_star=h_star, u_star=u_star, evaluations=evals)


def best_response_dynamics(
    scenario: Scenario,
    initial: tuple[float, ...],
    config: SolverConfig | None = None,
) -> tuple[EquilibriumSolution, list[tuple[float, ...]]]:
    """Simultaneous best-response iteration from a chosen starting point.

    Every miner replaces its rate with the numeric best response to the
    current aggregate of the others, all at once; iteration stops when the
    sup-norm step drops below config.dynamics_tol. Starting at a fixed
    point yields a one-entry trajectory. This is the empirical uniqueness
    check: independent starts should land on the same limit, and the limit
    should match the direct solvers.

    Returns (solution, trajectory) where the trajectory includes the start
    and every accepted iterate. Raises NoConvergence (trajectory attached)
    if max_iters sweeps do not reach the tolerance. The limit's residuals
    are reported but not held to foc_tol: a derivative-free argmax carries
    O(sqrt(eps)) noise, which the FOC magnifies by the utility curvature.
    """
    cfg = config if config is not None else SolverConfig()
    miners = scenario.miners
    current = tuple(float(h) for h in initial)
    if len(current) != len(miners):
        raise ValueError(f"initial point has {len(current)} rates for {len(miners)} miners")
    for h in current:
        if not math.isfinite(h) or h <= 0:
            raise ValueError(f"initial hash rates must be > 0, got {h}")

    trajectory = [current]
    iterations = 0
    for _ in range(cfg.max_iters):
        total = sum(current)
        nxt = tuple(
            numeric_best_response(m, total - h, scenario.reward, cfg).h_star
            for m, h in zip(miners, current)
        )
        step = max(abs(x - y) for x, y in zip(nxt, current))
        if step < cfg.dynamics_tol:
            break
        current = nxt
        trajectory.append(current)
        iterations += 1
    else:
        raise NoConvergence(
            f"best-response dynamics still moving after {cfg.max_iters} sweeps "
            f"(last step {step:g})",
            trajectory=trajectory,
        )

    total = sum(current)
    utilities = tuple(utility(m, h, total - h, scenario.reward) for m, h in zip(miners, current))
    residuals = tuple(
        abs(_utility_slope(m, h, total, scenario.reward)) for m, h in zip(miners, current)
    )
    diag = SolverDiagnostics(method="dynamics", iterations=iterations, bracket=None)
    return EquilibriumSolution(current, total, utilities, residuals, diag), trajectory
