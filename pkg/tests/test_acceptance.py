"""Acceptance gate: every release-blocking check, one printed line each.

Each criterion prints "[acceptance] criterion N (label): PASS|FAIL" on the
real terminal (via the acceptance_line fixture, which sidesteps output
capture), then asserts. Expensive scenario batches are memoized so the
participation criterion can reuse them without re-solving.
"""

import csv
import math
import time
from pathlib import Path

import numpy as np
import pytest

from pouwgame import (
    MinerParams,
    RewardSpec,
    Scenario,
    best_response_dynamics,
    best_response_formula,
    concentration_gain,
    decomposition_report,
    equilibrium_utility_linear,
    evaluate_schedule,
    numeric_best_response,
    optimal_schedule,
    solve_general,
    solve_linear,
    utility,
)
from pouwgame.cli import main
from pouwgame.report import SOLVE_HEADER

DATA = Path(__file__).parent / "data"

_cache = {}


def _report(emit, num, label, failures):
    status = "PASS" if not failures else "FAIL"
    emit(f"[acceptance] criterion {num} ({label}): {status}")
    assert not failures, f"criterion {num}: " + "; ".join(failures[:5])


def _linear_batch():
    """1,000 random linear scenarios with their closed-form solutions."""
    if "linear" not in _cache:
        rng = np.random.default_rng(101)
        batch = []
        for _ in range(1000):
            n = int(rng.integers(2, 11))
            rho = float(rng.uniform(0.1, 5.0))
            miners = tuple(
                MinerParams(f"m{i}", float(rng.uniform(0.1, 10.0)), float(rng.uniform(0.0, 10.0)))
                for i in range(n)
            )
            scn = Scenario(miners, RewardSpec.linear(rho))
            batch.append((scn, solve_linear(scn)))
        _cache["linear"] = batch
    return _cache["linear"]


def _general_batch():
    """500 random constant/power scenarios; symmetric-constant ones flagged."""
    if "general" not in _cache:
        rng = np.random.default_rng(102)
        batch = []
        for k in range(500):
            n = int(rng.integers(2, 9))
            if k < 150:
                alpha = float(rng.uniform(0.1, 10.0))
                miners = tuple(MinerParams(f"m{i}", alpha, 0.0) for i in range(n))
                reward = RewardSpec.constant(float(rng.uniform(0.1, 20.0)))
                symmetric = True
            elif k < 300:
                miners = tuple(
                    MinerParams(
                        f"m{i}", float(rng.uniform(0.1, 10.0)), float(rng.uniform(0.0, 10.0))
                    )
                    for i in range(n)
                )
                reward = RewardSpec.constant(float(rng.uniform(0.1, 20.0)))
                symmetric = False
            else:
                miners = tuple(
                    MinerParams(
                        f"m{i}", float(rng.uniform(0.1, 10.0)), float(rng.uniform(0.0, 10.0))
                    )
                    for i in range(n)
                )
                reward = RewardSpec.power(
                    float(rng.uniform(0.1, 5.0)), float(rng.uniform(0.0, 1.0))
                )
                symmetric = False
            scn = Scenario(miners, reward)
            batch.append((scn, solve_general(scn), symmetric))
        _cache["general"] = batch
    return _cache["general"]


def test_criterion_1_linear_closed_form(acceptance_line):
    failures = []
    started = time.perf_counter()
    for scn, sol in _linear_batch():
        rho = scn.reward.rho
        for m, h in zip(scn.miners, sol.hash_rates):
            if h != m.beta + rho / m.alpha:
                failures.append(f"{m.id} in {scn}: {h!r} != beta + rho/alpha")
                break
            br = numeric_best_response(m, sol.total_hash - h, scn.reward)
            if abs(br.h_star - h) > 1e-6:
                failures.append(f"{m.id}: numeric best response off by {abs(br.h_star - h):g}")
                break
    elapsed = time.perf_counter() - started
    if elapsed >= 10.0:
        failures.append(f"runtime {elapsed:.1f}s exceeds 10s")
    _report(acceptance_line, 1, "closed-form linear equilibria match the numeric oracle", failures)


def test_criterion_2_general_fixed_points(acceptance_line):
    failures = []
    for scn, sol, symmetric in _general_batch():
        if max(sol.residuals) > 1e-8:
            failures.append(f"residual {max(sol.residuals):g} > 1e-8")
            continue
        H = sol.total_hash
        gap = abs(sum(best_response_formula(m, H, scn.reward) for m in scn.miners) - H)
        if gap > 1e-10 * H:
            failures.append(f"aggregate gap {gap:g} > 1e-10*H")
            continue
        if symmetric:
            n = len(scn.miners)
            analytic = math.sqrt((n - 1) * scn.reward.r0 / scn.miners[0].alpha)
            if abs(H - analytic) > 1e-9:
                failures.append(f"symmetric H {H!r} vs analytic {analytic!r}")
    _report(acceptance_line, 2, "general-reward fixed points are stationary and self-consistent", failures)


def test_criterion_3_dynamics_agree_with_solver(acceptance_line):
    failures = []
    rng = np.random.default_rng(103)
    for _ in range(100):
        n = int(rng.integers(2, 7))
        kind = int(rng.integers(0, 3))
        if kind == 0:
            reward = RewardSpec.linear(float(rng.uniform(0.1, 5.0)))
        elif kind == 1:
            reward = RewardSpec.constant(float(rng.uniform(0.1, 20.0)))
        else:
            reward = RewardSpec.power(float(rng.uniform(0.1, 5.0)), float(rng.uniform(0.0, 1.0)))
        miners = tuple(
            MinerParams(f"m{i}", float(rng.uniform(0.1, 10.0)), float(rng.uniform(0.0, 10.0)))
            for i in range(n)
        )
        scn = Scenario(miners, reward)
        sol = solve_general(scn)
        mean_rate = sol.total_hash / n
        for start_idx in range(5):
            start = tuple(
                mean_rate * 10.0 ** float(rng.uniform(-1.0, 1.0)) for _ in range(n)
            )
            try:
                limit, _ = best_response_dynamics(scn, start)
            except Exception as exc:
                failures.append(f"start {start_idx}: {type(exc).__name__}: {exc}")
                continue
            gap = max(abs(a - b) for a, b in zip(limit.hash_rates, sol.hash_rates))
            if gap > 1e-5:
                failures.append(f"dynamics landed {gap:g} away")
    _report(acceptance_line, 3, "dynamics converge to the solver answer from scattered starts", failures)


def test_criterion_4_equilibrium_utility_closed_form(acceptance_line):
    failures = []
    if equilibrium_utility_linear(MinerParams("m", 1.0, 0.0), 1.0) != 0.5:
        failures.append("u(alpha=1, beta=0, rho=1) != 0.5")
    rng = np.random.default_rng(104)
    for _ in range(500):
        m = MinerParams("m", float(rng.uniform(0.1, 10.0)), float(rng.uniform(0.0, 10.0)))
        rho = float(rng.uniform(0.1, 5.0))
        h = m.beta + rho / m.alpha
        direct = utility(m, h, float(rng.uniform(0.1, 100.0)), RewardSpec.linear(rho))
        closed = equilibrium_utility_linear(m, rho)
        if abs(closed - direct) > 1e-10 * max(1.0, abs(direct)):
            failures.append(f"closed {closed!r} vs direct {direct!r}")
    _report(acceptance_line, 4, "closed-form equilibrium utility matches direct evaluation", failures)


def test_criterion_5_coupon_concentration(acceptance_line):
    from pouwgame import CouponSchedule

    failures = []
    split = evaluate_schedule(1.0, CouponSchedule((1.0, 1.0), 2.0), 1.0).total_utility
    saved = evaluate_schedule(1.0, CouponSchedule((0.0, 2.0), 2.0), 1.0).total_utility
    if split != 4.0:
        failures.append(f"split total {split!r} != 4.0")
    if saved != 5.0:
        failures.append(f"concentrated total {saved!r} != 5.0")

    rng = np.random.default_rng(105)
    for _ in range(200):
        budget = float(rng.uniform(0.1, 10.0))
        blocks = int(rng.integers(1, 8))
        alpha = float(rng.uniform(0.1, 10.0))
        rho = float(rng.uniform(0.1, 5.0))
        sched = optimal_schedule(alpha, budget, blocks, rho)
        spent = [x for x in sched.allocation if x > 0.0]
        if len(spent) != 1 or spent[0] != budget:
            failures.append(f"optimal schedule {sched.allocation} is not a single-block corner")
        gain = concentration_gain(1.0, budget, 2, rho)
        want = budget * budget / 4.0
        if abs(gain - want) > 1e-12 * max(1.0, want):
            failures.append(f"two-block gain {gain!r} != budget^2/4 = {want!r}")
    _report(acceptance_line, 5, "coupon concentration dominates splitting", failures)


def test_criterion_6_entropy_mixture_bound(acceptance_line):
    failures = []
    rng = np.random.default_rng(106)
    for k in range(1000):
        n = int(rng.integers(2, 11))
        rho = float(rng.uniform(0.1, 5.0))
        alphas = rng.uniform(0.1, 10.0, size=n)
        aligned = k % 2 == 1
        if aligned:
            betas = float(rng.uniform(0.1, 10.0)) / alphas
        else:
            betas = rng.uniform(0.0, 10.0, size=n)
        scn = Scenario(
            tuple(
                MinerParams(f"m{i}", float(a), float(b))
                for i, (a, b) in enumerate(zip(alphas, betas))
            ),
            RewardSpec.linear(rho),
        )
        rep = decomposition_report(scn, solve_linear(scn))
        if rep.coefficient < rep.lower_bound - 1e-12:
            failures.append(
                f"coefficient {rep.coefficient!r} below bound {rep.lower_bound!r}"
            )
        if aligned and abs(rep.coefficient - rep.lower_bound) > 1e-12:
            failures.append(
                f"aligned profiles not tight: {abs(rep.coefficient - rep.lower_bound):g}"
            )
    _report(acceptance_line, 6, "entropy never falls below the mixture bound", failures)


def test_criterion_7_full_participation(acceptance_line):
    failures = []
    checked = 0
    for scn, sol in _linear_batch():
        checked += 1
        if min(sol.hash_rates) <= 0.0:
            failures.append(f"non-positive rate in linear batch: {min(sol.hash_rates)!r}")
    for scn, sol, _ in _general_batch():
        checked += 1
        if min(sol.hash_rates) <= 0.0:
            failures.append(f"non-positive rate in general batch: {min(sol.hash_rates)!r}")
    if checked != 1500:
        failures.append(f"expected 1500 scenarios, saw {checked}")
    _report(acceptance_line, 7, "every equilibrium has full participation", failures)


def test_criterion_8_cli_round_trip(acceptance_line, tmp_path, capsys):
    failures = []
    scenario = str(DATA / "linear_pair.scn")
    out_a, out_b = tmp_path / "a.csv", tmp_path / "b.csv"
    if main(["solve", scenario, "--out", str(out_a)]) != 0:
        failures.append("first solve exited non-zero")
    if main(["solve", scenario, "--out", str(out_b)]) != 0:
        failures.append("second solve exited non-zero")
    capsys.readouterr()

    if out_a.read_bytes() != out_b.read_bytes():
        failures.append("CSV output differs between identical runs")

    rows = list(csv.reader(out_a.open(newline="")))
    if rows[0] != list(SOLVE_HEADER):
        failures.append(f"unexpected header {rows[0]}")
    summaries = {r[1]: float(r[2]) for r in rows if r[0] == "#"}
    H = summaries["total_hash"]
    rho = 1.0
    for row in rows[1:]:
        if row[0] == "#":
            continue
        alpha, beta, h, share, u = (float(row[i]) for i in range(1, 6))
        recomputed = share * rho * H - 0.5 * alpha * h * h + alpha * beta * h
        if abs(u - recomputed) > 1e-9:
            failures.append(f"{row[0]}: utility {u!r} vs recomputed {recomputed!r}")
    _report(acceptance_line, 8, "CLI CSV round-trips and is byte-stable", failures)
