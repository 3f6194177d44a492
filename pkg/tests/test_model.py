import math

import numpy as np
import pytest
from scipy.integrate import quad

from pouwgame import (
    EquilibriumSolution,
    MinerParams,
    RewardSpec,
    Scenario,
    SolverDiagnostics,
    cost,
    equilibrium_utility_linear,
    marginal_cost,
    utility,
)


def test_cost_examples():
    assert cost(MinerParams("m", 1.0, 0.0), 2.0) == 2.0
    assert cost(MinerParams("m", 1.0, 3.0), 0.0) == 0.0
    m = MinerParams("m", 2.0, 1.0)
    assert cost(m, 1.0) == -1.0
    # oracle: the cost must be the integral of the marginal cost from 0
    integral, err = quad(lambda t: marginal_cost(m, t), 0.0, 1.0)
    assert abs(cost(m, 1.0) - integral) < 1e-10 + err


def test_marginal_cost_examples():
    assert marginal_cost(MinerParams("m", 1.0, 3.0), 3.0) == 0.0
    assert marginal_cost(MinerParams("m", 2.0, 0.0), 5.0) == 10.0
    m = MinerParams("m", 1.0, 2.0)
    assert marginal_cost(m, 1.0) == -1.0
    eps = 1e-6
    fd = (cost(m, 1.0 + eps) - cost(m, 1.0 - eps)) / (2.0 * eps)
    assert abs(marginal_cost(m, 1.0) - fd) < 1e-4


def test_utility_examples():
    m = MinerParams("m", 1.0, 0.0)
    assert utility(m, 0.0, 5.0, RewardSpec.linear(1.0)) == 0.0
    assert utility(m, 1.0, 3.5, RewardSpec.linear(1.0)) == pytest.approx(0.5, abs=1e-15)
    # term-by-term: share 0.5 of reward 1, minus cost 0.125
    r = RewardSpec.constant(1.0)
    share = 0.5 / (0.5 + 0.5) * r.value(1.0)
    assert utility(m, 0.5, 0.5, r) == pytest.approx(share - cost(m, 0.5), abs=1e-15)
    assert utility(m, 0.5, 0.5, r) == pytest.approx(0.375, abs=1e-15)


def test_equilibrium_utility_linear_examples():
    assert equilibrium_utility_linear(MinerParams("m", 1.0, 0.0), 1.0) == 0.5
    assert equilibrium_utility_linear(MinerParams("m", 1.0, 1.0), 1.0) == 2.0
    assert equilibrium_utility_linear(MinerParams("m", 2.0, 0.0), 2.0) == 1.0
    # oracle: plain utility at the closed-form rate, inside any population
    for m, rho in ((MinerParams("m", 1.0, 1.0), 1.0), (MinerParams("m", 2.0, 0.0), 2.0)):
        h = m.beta + rho / m.alpha
        u = utility(m, h, 7.3, RewardSpec.linear(rho))
        assert equilibrium_utility_linear(m, rho) == pytest.approx(u, rel=1e-12)


def test_miner_validation():
    with pytest.raises(ValueError):
        MinerParams("", 1.0, 0.0)
    with pytest.raises(ValueError, match="alpha"):
        MinerParams("m", 0.0, 0.0)
    with pytest.raises(ValueError, match="alpha"):
        MinerParams("m", -1.0, 0.0)
    with pytest.raises(ValueError, match="beta"):
        MinerParams("m", 1.0, -0.5)
    with pytest.raises(ValueError, match="finite"):
        MinerParams("m", math.nan, 0.0)


def test_reward_validation():
    with pytest.raises(ValueError, match="rho"):
        RewardSpec.linear(0.0)
    with pytest.raises(ValueError, match="r0"):
        RewardSpec.constant(-1.0)
    with pytest.raises(ValueError, match="gamma"):
        RewardSpec.power(1.0, 1.5)
    with pytest.raises(ValueError, match="gamma"):
        RewardSpec.power(1.0, -0.1)
    with pytest.raises(ValueError, match="kind"):
        RewardSpec("exotic", rho=1.0)
    with pytest.raises(ValueError, match="does not take"):
        RewardSpec("linear", rho=1.0, r0=2.0)
    with pytest.raises(ValueError, match="requires"):
        RewardSpec("power", a=1.0)


def test_reward_values_and_slopes():
    lin = RewardSpec.linear(2.0)
    assert lin.value(3.0) == 6.0 and lin.slope(3.0) == 2.0
    con = RewardSpec.constant(5.0)
    assert con.value(10.0) == 5.0 and con.slope(10.0) == 0.0
    pow_ = RewardSpec.power(2.0, 0.5)
    assert pow_.value(4.0) == 4.0
    assert pow_.slope(4.0) == pytest.approx(0.5, rel=1e-15)
    # edge exponents collapse onto the other families
    assert RewardSpec.power(3.0, 0.0).value(7.0) == 3.0
    assert RewardSpec.power(3.0, 0.0).slope(7.0) == 0.0
    assert RewardSpec.power(3.0, 1.0).slope(7.0) == 3.0
    with pytest.raises(ValueError):
        lin.value(0.0)
    with pytest.raises(ValueError):
        lin.slope(-1.0)


def test_reward_slope_matches_finite_difference():
    rng = np.random.default_rng(7)
    specs = [
        RewardSpec.linear(1.7),
        RewardSpec.constant(4.0),
        RewardSpec.power(2.5, 0.6),
        RewardSpec.power(1.0, 1.0),
    ]
    for spec in specs:
        for _ in range(20):
            H = float(rng.uniform(0.2, 50.0))
            eps = 1e-6 * H
            fd = (spec.value(H + eps) - spec.value(H - eps)) / (2.0 * eps)
            assert abs(spec.slope(H) - fd) < 1e-4 * max(1.0, abs(fd))


def test_scenario_validation():
    m1, m2 = MinerParams("a", 1.0, 0.0), MinerParams("b", 1.0, 0.0)
    with pytest.raises(ValueError, match="two miners"):
        Scenario((m1,), RewardSpec.linear(1.0))
    with pytest.raises(ValueError, match="duplicate"):
        Scenario((m1, MinerParams("a", 2.0, 0.0)), RewardSpec.linear(1.0))
    with pytest.raises(ValueError, match="blocks"):
        Scenario((m1, m2), RewardSpec.linear(1.0), blocks=0)
    with pytest.raises(ValueError, match="RewardSpec"):
        Scenario((m1, m2), "linear")
    scn = Scenario([m1, m2], RewardSpec.linear(1.0))
    assert isinstance(scn.miners, tuple) and scn.blocks == 1


def test_solution_invariants():
    diag = SolverDiagnostics("closed_form", 0)
    sol = EquilibriumSolution((1.0, 3.5), 4.5, (0.5, 8.25), (0.0, 0.0), diag)
    assert sol.shares == (1.0 / 4.5, 3.5 / 4.5)
    with pytest.raises(ValueError, match="> 0"):
        EquilibriumSolution((0.0, 1.0), 1.0, (0.0, 0.0), (0.0, 0.0), diag)
    with pytest.raises(ValueError, match="total_hash"):
        EquilibriumSolution((1.0, 3.5), 4.6, (0.0, 0.0), (0.0, 0.0), diag)
    with pytest.raises(ValueError, match="length"):
        EquilibriumSolution((1.0, 3.5), 4.5, (0.0,), (0.0, 0.0), diag)
    with pytest.raises(ValueError, match="method"):
        SolverDiagnostics("guesswork", 0)


def test_input_rejection():
    m = MinerParams("m", 1.0, 0.0)
    r = RewardSpec.linear(1.0)
    with pytest.raises(ValueError):
        cost(m, -1.0)
    with pytest.raises(ValueError):
        marginal_cost(m, math.inf)
    with pytest.raises(ValueError):
        utility(m, 1.0, 0.0, r)
    with pytest.raises(ValueError):
        utility(m, 1.0, -2.0, r)
    with pytest.raises(ValueError):
        equilibrium_utility_linear(m, 0.0)


def _random_miner(rng):
    return MinerParams("m", float(rng.uniform(0.1, 10.0)), float(rng.uniform(0.0, 10.0)))


def _random_reward(rng):
    kind = rng.integers(0, 3)
    if kind == 0:
        return RewardSpec.linear(float(rng.uniform(0.1, 5.0)))
    if kind == 1:
        return RewardSpec.constant(float(rng.uniform(0.1, 20.0)))
    return RewardSpec.power(float(rng.uniform(0.1, 5.0)), float(rng.uniform(0.0, 1.0)))


def test_zero_cost_at_zero():
    rng = np.random.default_rng(11)
    for _ in range(200):
        assert cost(_random_miner(rng), 0.0) == 0.0


def test_marginal_cost_monotone():
    rng = np.random.default_rng(12)
    for _ in range(200):
        m = _random_miner(rng)
        h1, h2 = sorted(rng.uniform(0.0, 50.0, size=2))
        assert marginal_cost(m, float(h1)) <= marginal_cost(m, float(h2))


def test_marginal_cost_is_cost_derivative():
    rng = np.random.default_rng(13)
    eps = 1e-6
    for _ in range(200):
        m = _random_miner(rng)
        h = float(rng.uniform(eps, 20.0))
        fd = (cost(m, h + eps) - cost(m, h - eps)) / (2.0 * eps)
        assert abs(marginal_cost(m, h) - fd) < 1e-4


def test_utility_concave_in_own_hash():
    rng = np.random.default_rng(14)
    for _ in range(300):
        m = _random_miner(rng)
        reward = _random_reward(rng)
        h_others = float(rng.uniform(0.05, 30.0))
        h1 = float(rng.uniform(0.0, 20.0))
        step = float(rng.uniform(0.01, 5.0))
        u1 = utility(m, h1, h_others, reward)
        u2 = utility(m, h1 + step, h_others, reward)
        u3 = utility(m, h1 + 2.0 * step, h_others, reward)
        assert u2 >= 0.5 * (u1 + u3) - 1e-12


def test_linear_equilibrium_utility_ignores_others():
    rng = np.random.default_rng(15)
    for _ in range(200):
        m = _random_miner(rng)
        rho = float(rng.uniform(0.1, 5.0))
        h_star = m.beta + rho / m.alpha
        expected = equilibrium_utility_linear(m, rho)
        for h_others in (0.1, 1.0, float(rng.uniform(5.0, 500.0))):
            u = utility(m, h_star, h_others, RewardSpec.linear(rho))
            assert abs(u - expected) <= 1e-10 * max(1.0, abs(expected))
