"""Nash equilibria of proof-of-useful-work mining games.

Quadratic miner costs with coupon subsidies, pro-rata block rewards that
may scale with the total hash rate, closed-form and root-finding solvers
cross-checked by derivative-free search, coupon-schedule optimization,
and Shannon-entropy decentralization analysis.
"""

from .decentralization import (
    AllZero,
    DecentralizationReport,
    MixtureMismatch,
    NotLinearReward,
    decentralization_coefficient,
    decomposition_report,
    entropy,
)
from .equilibrium import (
    BestResponseResult,
    DegenerateDenominator,
    MultipleRoots,
    NoBracket,
    NoConvergence,
    SolverConfig,
    SolverFailure,
    best_response_dynamics,
    best_response_formula,
    numeric_best_response,
    solve_general,
    solve_linear,
)
from .model import (
    CONSTANT,
    LINEAR,
    POWER,
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
from .scenario_io import (
    ScenarioFile,
    ScenarioFormatError,
    SweepSpec,
    parse_scenario_file,
    parse_scenario_text,
)
from .scheduling import (
    CouponSchedule,
    ScheduleEvaluation,
    concentration_gain,
    evaluate_schedule,
    optimal_schedule,
    uniform_schedule,
)

__version__ = "0.1.0"

__all__ = [
    "AllZero",
    "BestResponseResult",
    "CONSTANT",
    "CouponSchedule",
    "DecentralizationReport",
    "DegenerateDenominator",
    "EquilibriumSolution",
    "LINEAR",
    "MinerParams",
    "MixtureMismatch",
    "MultipleRoots",
    "NoBracket",
    "NoConvergence",
    "NotLinearReward",
    "POWER",
    "RewardSpec",
    "Scenario",
    "ScenarioFile",
    "ScenarioFormatError",
    "ScheduleEvaluation",
    "SolverConfig",
    "SolverDiagnostics",
    "SolverFailure",
    "SweepSpec",
    "best_response_dynamics",
    "best_response_formula",
    "concentration_gain",
    "cost",
    "decentralization_coefficient",
    "decomposition_report",
    "entropy",
    "equilibrium_utility_linear",
    "evaluate_schedule",
    "marginal_cost",
    "numeric_best_response",
    "optimal_schedule",
    "parse_scenario_file",
    "parse_scenario_text",
    "solve_general",
    "solve_linear",
    "uniform_schedule",
    "utility",
]
