"""Command-line interface.

Subcommands: solve (table, optional CSV/SVG), verify (numeric oracle
checks against the algebraic answer), schedule (coupon-budget planning),
decentralization (entropy report with the coupon/cost bound), sweep
(repeated solves over a parameter grid, CSV/SVG output).

Exit codes: 0 success, 2 bad input (unparseable scenario, domain errors),
3 solver failure, 4 verification failure, 5 decentralization bound
violated.
"""

from __future__ import annotations

import argparse
import math
import random
import sys

from .decentralization import DecentralizationReport, decomposition_report
from .equilibrium import (
    SolverConfig,
    SolverFailure,
    best_response_dynamics,
    numeric_best_response,
    solve_general,
    solve_linear,
)
from .model import LINEAR, Scenario
from .report import (
    fmt_cell,
    render_csv,
    solution_table,
    solve_csv_rows,
    sweep_csv_rows,
    write_csv,
)
from .scenario_io import ScenarioFormatError, SweepSpec, parse_scenario_file
from .scheduling import concentration_gain, evaluate_schedule, optimal_schedule, uniform_schedule

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_SOLVER = 3
EXIT_VERIFY = 4
EXIT_BOUND = 5

# every oracle check in `verify` must agree with the solver this tightly
_VERIFY_TOL = 1e-6
_VERIFY_STARTS = 5


def _base_arg(text: str) -> float:
    if text == "e":
        return math.e
    try:
        base = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected 'e' or a number > 1, got {text!r}") from None
    if not math.isfinite(base) or base <= 1.0:
        raise argparse.ArgumentTypeError(f"entropy base must be > 1, got {text!r}")
    return base


def build_parser() -> argparse.ArgumentParser:
    solver_flags = argparse.ArgumentParser(add_help=False)
    group = solver_flags.add_argument_group("solver options")
    group.add_argument("--h-max", type=float, default=None, help="strategy interval cap")
    group.add_argument("--fp-tol", type=float, default=None, help="aggregate self-consistency tolerance")
    group.add_argument("--foc-tol", type=float, default=None, help="stationarity residual tolerance")
    group.add_argument("--max-iters", type=int, default=None, help="iteration budget")

    parser = argparse.ArgumentParser(
        prog="pouwgame",
        description="Nash equilibria of proof-of-useful-work mining games",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", parents=[solver_flags], help="solve one scenario file")
    p.add_argument("scenario", help="scenario file")
    p.add_argument("--out", default=None, help="write per-miner CSV here")
    p.add_argument("--svg", default=None, help="render a hash-rate chart here")
    p.add_argument("--base", type=_base_arg, default=None, help="entropy base (default from file)")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("verify", parents=[solver_flags], help="check a solve against numeric oracles")
    p.add_argument("scenario", help="scenario file")
    p.add_argument("--seed", type=int, default=1, help="seed for the dynamics starting points")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("schedule", help="plan a coupon budget over a block horizon")
    p.add_argument("--alpha", type=float, required=True, help="compute cost coefficient")
    p.add_argument("--budget", type=float, required=True, help="total coupon budget")
    p.add_argument("--blocks", type=int, required=True, help="horizon length")
    p.add_argument("--rho", type=float, required=True, help="linear reward slope")
    p.set_defaults(func=cmd_schedule)

    p = sub.add_parser(
        "decentralization",
        parents=[solver_flags],
        help="entropy report with the coupon/cost decomposition bound",
    )
    p.add_argument("scenario", help="scenario file (linear reward)")
    p.add_argument("--base", type=_base_arg, default=None, help="entropy base (default from file)")
    p.set_defaults(func=cmd_decentralization)

    p = sub.add_parser("sweep", parents=[solver_flags], help="solve across a parameter grid")
    p.add_argument("scenario", help="scenario file")
    p.add_argument("--param", required=True, help="rho, r0, miner.<id>.alpha or miner.<id>.beta")
    p.add_argument("--values", default=None, help="comma-separated grid values")
    p.add_argument("--from", dest="grid_from", type=float, default=None, help="grid start")
    p.add_argument("--to", dest="grid_to", type=float, default=None, help="grid stop")
    p.add_argument("--steps", type=int, default=None, help="grid point count")
    p.add_argument("--out", default=None, help="write the sweep CSV here (default stdout)")
    p.add_argument("--svg", default=None, help="render a sweep chart here")
    p.add_argument("--base", type=_base_arg, default=None, help="entropy base (default from file)")
    p.set_defaults(func=cmd_sweep)

    return parser


def _solver_config(args: argparse.Namespace) -> SolverConfig:
    overrides = {}
    for attr, name in (
        ("h_max", "h_max"),
        ("fp_tol", "fp_tol"),
        ("foc_tol", "foc_tol"),
        ("max_iters", "max_iters"),
    ):
        value = getattr(args, attr, None)
        if value is not None:
            overrides[name] = value
    return SolverConfig(**overrides)


def cmd_solve(args: argparse.Namespace) -> int:
    scn_file = parse_scenario_file(args.scenario)
    cfg = _solver_config(args)
    solution = solve_general(scn_file.scenario, cfg)
    base = args.base if args.base is not None else scn_file.entropy_base
    print(solution_table(scn_file.scenario, solution, base))
    if args.out:
        write_csv(args.out, solve_csv_rows(scn_file.scenario, solution, base))
    if args.svg:
        from .charts import render_solution_chart

        render_solution_chart(args.svg, scn_file.scenario, solution)
    return EXIT_OK


def cmd_verify(args: argparse.Namespace) -> int:
    scn_file = parse_scenario_file(args.scenario)
    scenario = scn_file.scenario
    cfg = _solver_config(args)
    solution = solve_general(scenario, cfg)

    failures: list[str] = []

    # oracle 1: each miner's rate must be its own numeric best response
    br_gap = 0.0
    for m, h in zip(scenario.miners, solution.hash_rates):
        br = numeric_best_response(m, solution.total_hash - h, scenario.reward, cfg)
        gap = abs(br.h_star - h)
        br_gap = max(br_gap, gap)
        if gap > _VERIFY_TOL:
            failures.append(f"best response of {m.id}: |{br.h_star:.12g} - {h:.12g}| = {gap:.3g}")
    print(f"best-response deviation: {br_gap:.3g} (tolerance {_VERIFY_TOL:g})")

    # oracle 2: best-response dynamics from scattered starts must land here
    rng = random.Random(args.seed)
    mean_rate = solution.total_hash / len(scenario.miners)
    dyn_gap = 0.0
    for attempt in range(_VERIFY_STARTS):
        start = tuple(mean_rate * 10.0 ** rng.uniform(-1.0, 1.0) for _ in scenario.miners)
        try:
            limit, _ = best_response_dynamics(scenario, start, cfg)
        except SolverFailure as exc:
            failures.append(f"dynamics from start {attempt + 1}: {type(exc).__name__}: {exc}")
            continue
        gap = max(abs(a - b) for a, b in zip(limit.hash_rates, solution.hash_rates))
        dyn_gap = max(dyn_gap, gap)
        if gap > _VERIFY_TOL:
            failures.append(f"dynamics from start {attempt + 1} landed {gap:.3g} away")
    print(f"dynamics deviation over {_VERIFY_STARTS} starts (seed {args.seed}): {dyn_gap:.3g}")

    if failures:
        for line in failures:
            print(f"FAIL {line}", file=sys.stderr)
        return EXIT_VERIFY
    print("verified: numeric oracles agree with the solver")
    return EXIT_OK


def cmd_schedule(args: argparse.Namespace) -> int:
    best = optimal_schedule(args.alpha, args.budget, args.blocks, args.rho)
    best_eval = evaluate_schedule(args.alpha, best, args.rho)
    even = uniform_schedule(args.budget, args.blocks)
    even_eval = evaluate_schedule(args.alpha, even, args.rho)
    gain = concentration_gain(args.alpha, args.budget, args.blocks, args.rho)
    print(f"optimal allocation: [{', '.join(fmt_cell(x) for x in best.allocation)}]")
    print(f"optimal total utility: {fmt_cell(best_eval.total_utility)}")
    print(f"uniform total utility: {fmt_cell(even_eval.total_utility)}")
    print(f"concentration gain: {fmt_cell(gain)}")
    return EXIT_OK


def _report_lines(report: DecentralizationReport, base: float) -> list[str]:
    base_label = "e" if base == math.e else fmt_cell(base)
    lines = [
        f"decentralization (base {base_label}): {fmt_cell(report.coefficient)}",
        f"coupon weight: {fmt_cell(report.coupon_weight)}",
        "coupon component: "
        + ("n/a (no coupons)" if report.coupon_component is None else fmt_cell(report.coupon_component)),
        f"cost component: {fmt_cell(report.cost_component)}",
        f"lower bound: {fmt_cell(report.lower_bound)}",
        f"bound satisfied: {'yes' if report.bound_satisfied else 'NO'}",
    ]
    return lines


def cmd_decentralization(args: argparse.Namespace) -> int:
    scn_file = parse_scenario_file(args.scenario)
    scenario = scn_file.scenario
    if scenario.reward.kind != LINEAR:
        print(
            f"decentralization: the coupon/cost decomposition requires a linear reward, "
            f"got {scenario.reward.kind}",
            file=sys.stderr,
        )
        return EXIT_INPUT
    cfg = _solver_config(args)
    solution = solve_linear(scenario, cfg)
    base = args.base if args.base is not None else scn_file.entropy_base
    report = decomposition_report(scenario, solution, base)
    for line in _report_lines(report, base):
        print(line)
    if not report.bound_satisfied:
        print(
            f"decentralization bound violated: coefficient {report.coefficient!r} "
            f"below lower bound {report.lower_bound!r}",
            file=sys.stderr,
        )
        return EXIT_BOUND
    return EXIT_OK


def _sweep_values(args: argparse.Namespace) -> SweepSpec:
    grid_given = any(v is not None for v in (args.grid_from, args.grid_to, args.steps))
    if args.values is not None and grid_given:
        raise ValueError("give either --values or --from/--to/--steps, not both")
    if args.values is not None:
        try:
            values = tuple(float(tok) for tok in args.values.split(",") if tok.strip())
        except ValueError:
            raise ValueError(f"--values must be comma-separated numbers, got {args.values!r}") from None
        return SweepSpec(parameter=args.param, values=values)
    if not grid_given:
        raise ValueError("sweep needs --values or --from/--to/--steps")
    if args.grid_from is None or args.grid_to is None or args.steps is None:
        raise ValueError("--from, --to and --steps must be given together")
    return SweepSpec.from_grid(args.param, args.grid_from, args.grid_to, args.steps)


def cmd_sweep(args: argparse.Namespace) -> int:
    scn_file = parse_scenario_file(args.scenario)
    scenario = scn_file.scenario
    spec = _sweep_values(args)
    spec.validate_for(scenario)
    cfg = _solver_config(args)
    base = args.base if args.base is not None else scn_file.entropy_base

    outcomes = []
    solved = 0
    for value in spec.values:
        swept = spec.apply(scenario, value)
        try:
            solution = solve_general(swept, cfg)
        except SolverFailure as exc:
            outcomes.append((value, swept, None, f"{type(exc).__name__}: {exc}"))
            continue
        outcomes.append((value, swept, solution, None))
        solved += 1

    rows = sweep_csv_rows(outcomes, base)
    if args.out:
        write_csv(args.out, rows)
    else:
        sys.stdout.write(render_csv(rows))
    if args.svg:
        from .charts import render_sweep_chart

        render_sweep_chart(args.svg, spec.parameter, outcomes)
    if solved == 0:
        print("sweep: every grid point failed to solve", file=sys.stderr)
        return EXIT_SOLVER
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ScenarioFormatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except SolverFailure as exc:
        print(f"solver failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
