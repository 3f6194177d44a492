"""Scenario files and sweep specifications.

The on-disk format is line oriented so diffs and hand edits stay painless:

    # comment
    schema_version: 1
    miner: id=m1 alpha=1.0 beta=0.0
    miner: id=m2 alpha=2.0 beta=3.0
    reward: kind=linear rho=1.0
    blocks: 1
    entropy_base: e

Blank lines and '#' comments are ignored. schema_version and reward are
required, at least two miner lines are required, blocks (default 1) and
entropy_base (default e) are optional. Parse errors carry the file name
and line number plus the offending field.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

from .model import CONSTANT, LINEAR, POWER, MinerParams, RewardSpec, Scenario

SCHEMA_VERSION = 1

_REWARD_FIELDS = {LINEAR: ("rho",), CONSTANT: ("r0",), POWER: ("a", "gamma")}


class ScenarioFormatError(ValueError):
    """A scenario file could not be parsed; message carries file:line context."""

    def __init__(self, source: str, line: int | None, message: str):
        where = source if line is None else f"{source}:{line}"
        super().__init__(f"{where}: {message}")
        self.source = source
        self.line = line


@dataclass(frozen=True)
class ScenarioFile:
    """A parsed scenario plus the presentation defaults stored next to it."""

    scenario: Scenario
    entropy_base: float = math.e
    schema_version: int = SCHEMA_VERSION


def _parse_pairs(source: str, lineno: int, rest: str) -> dict[str, str]:
    fields: dict[str, str] = {}
    for token in rest.split():
        key, sep, value = token.partition("=")
        if not sep or not key or not value:
            raise ScenarioFormatError(source, lineno, f"expected key=value, got {token!r}")
        if key in fields:
            raise ScenarioFormatError(source, lineno, f"duplicate field {key!r}")
        fields[key] = value
    return fields


def _parse_float(source: str, lineno: int, field: str, text: str) -> float:
    try:
        return float(text)
    except ValueError:
        raise ScenarioFormatError(source, lineno, f"{field} must be a number, got {text!r}") from None


def _parse_base(source: str, lineno: int | None, text: str) -> float:
    if text == "e":
        return math.e
    try:
        base = float(text)
    except ValueError:
        raise ScenarioFormatError(
            source, lineno, f"entropy_base must be 'e' or a number > 1, got {text!r}"
        ) from None
    if not math.isfinite(base) or base <= 1.0:
        raise ScenarioFormatError(source, lineno, f"entropy_base must be > 1, got {text!r}")
    return base


def _build_miner(source: str, lineno: int, rest: str) -> MinerParams:
    fields = _parse_pairs(source, lineno, rest)
    extra = set(fields) - {"id", "alpha", "beta"}
    if extra:
        raise ScenarioFormatError(source, lineno, f"unknown miner field {sorted(extra)[0]!r}")
    for need in ("id", "alpha", "beta"):
        if need not in fields:
            raise ScenarioFormatError(source, lineno, f"miner line is missing {need!r}")
    alpha = _parse_float(source, lineno, "alpha", fields["alpha"])
    beta = _parse_float(source, lineno, "beta", fields["beta"])
    try:
        return MinerParams(id=fields["id"], alpha=alpha, beta=beta)
    except ValueError as exc:
        raise ScenarioFormatError(source, lineno, str(exc)) from None


def _build_reward(source: str, lineno: int, rest: str) -> RewardSpec:
    fields = _parse_pairs(source, lineno, rest)
    kind = fields.pop("kind", None)
    if kind is None:
        raise ScenarioFormatError(source, lineno, "reward line is missing 'kind'")
    if kind not in _REWARD_FIELDS:
        raise ScenarioFormatError(source, lineno, f"unknown reward kind {kind!r}")
    wanted = _REWARD_FIELDS[kind]
    extra = set(fields) - set(wanted)
    if extra:
        raise ScenarioFormatError(
            source, lineno, f"{kind} reward does not take {sorted(extra)[0]!r}"
        )
    values = {}
    for need in wanted:
        if need not in fields:
            raise ScenarioFormatError(source, lineno, f"{kind} reward requires {need!r}")
        values[need] = _parse_float(source, lineno, need, fields[need])
    try:
        return RewardSpec(kind, **values)
    except ValueError as exc:
        raise ScenarioFormatError(source, lineno, str(exc)) from None


def parse_scenario_text(text: str, source: str = "<scenario>") -> ScenarioFile:
    """Parse scenario text; see the module docstring for the format."""
    miners: list[MinerParams] = []
    reward: RewardSpec | None = None
    scalars: dict[str, tuple[int, str]] = {}

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, rest = line.partition(":")
        key, rest = key.strip(), rest.strip()
        if not sep or not key:
            raise ScenarioFormatError(source, lineno, f"expected 'key: value', got {raw.strip()!r}")
        if key == "miner":
            miners.append(_build_miner(source, lineno, rest))
        elif key == "reward":
            if reward is not None:
                raise ScenarioFormatError(source, lineno, "duplicate reward line")
            reward = _build_reward(source, lineno, rest)
        elif key in ("schema_version", "blocks", "entropy_base"):
            if key in scalars:
                raise ScenarioFormatError(source, lineno, f"duplicate {key} line")
            scalars[key] = (lineno, rest)
        else:
            raise ScenarioFormatError(source, lineno, f"unknown key {key!r}")

    if "schema_version" not in scalars:
        raise ScenarioFormatError(source, None, "missing schema_version line")
    lineno, text_value = scalars["schema_version"]
    if text_value != str(SCHEMA_VERSION):
        raise ScenarioFormatError(
            source, lineno, f"unsupported schema_version {text_value!r} (expected {SCHEMA_VERSION})"
        )
    if reward is None:
        raise ScenarioFormatError(source, None, "missing reward line")
    if len(miners) < 2:
        raise ScenarioFormatError(source, None, f"need at least two miner lines, found {len(miners)}")

    blocks = 1
    if "blocks" in scalars:
        lineno, text_value = scalars["blocks"]
        try:
            blocks = int(text_value)
        except ValueError:
            raise ScenarioFormatError(
                source, lineno, f"blocks must be an integer, got {text_value!r}"
            ) from None
        if blocks < 1:
            raise ScenarioFormatError(source, lineno, f"blocks must be >= 1, got {blocks}")

    entropy_base = math.e
    if "entropy_base" in scalars:
        lineno, text_value = scalars["entropy_base"]
        entropy_base = _parse_base(source, lineno, text_value)

    try:
        scenario = Scenario(miners=tuple(miners), reward=reward, blocks=blocks)
    except ValueError as exc:
        raise ScenarioFormatError(source, None, str(exc)) from None
    return ScenarioFile(scenario=scenario, entropy_base=entropy_base)


def parse_scenario_file(path: str) -> ScenarioFile:
    """Read and parse a scenario file; errors carry path:line context."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ScenarioFormatError(str(path), None, f"cannot read scenario file: {exc.strerror or exc}") from None
    return parse_scenario_text(text, source=str(path))


@dataclass(frozen=True)
class SweepSpec:
    """A parameter axis for repeated solves.

    parameter is "rho", "r0", or "miner.<id>.alpha" / "miner.<id>.beta";
    values is the grid it takes. Whether the parameter exists in a given
    scenario (and whether every value lies in its domain) is checked by
    validate_for, which simply tries to apply each value.
    """

    parameter: str
    values: tuple[float, ...]

    def __post_init__(self) -> None:
        if not isinstance(self.parameter, str) or not self.parameter:
            raise ValueError("sweep parameter must be a non-empty string")
        object.__setattr__(self, "values", tuple(float(v) for v in self.values))
        if not self.values:
            raise ValueError("sweep needs at least one value")
        for v in self.values:
            if not math.isfinite(v):
                raise ValueError(f"sweep values must be finite, got {v!r}")

    @classmethod
    def from_grid(cls, parameter: str, start: float, stop: float, steps: int) -> "SweepSpec":
        """Evenly spaced grid from start to stop inclusive."""
        if not isinstance(steps, int) or isinstance(steps, bool) or steps < 2:
            raise ValueError(f"a grid needs at least 2 steps, got {steps!r}")
        start = float(start)
        stop = float(stop)
        span = stop - start
        values = [start + i * span / (steps - 1) for i in range(steps)]
        values[-1] = stop
        return cls(parameter=parameter, values=tuple(values))

    def apply(self, scenario: Scenario, value: float) -> Scenario:
        """A copy of the scenario with the swept parameter set to value."""
        if self.parameter == "rho":
            if scenario.reward.kind != LINEAR:
                raise ValueError(f"cannot sweep rho of a {scenario.reward.kind} reward")
            return replace(scenario, reward=RewardSpec.linear(value))
        if self.parameter == "r0":
            if scenario.reward.kind != CONSTANT:
                raise ValueError(f"cannot sweep r0 of a {scenario.reward.kind} reward")
            return replace(scenario, reward=RewardSpec.constant(value))
        parts = self.parameter.split(".")
        if len(parts) == 3 and parts[0] == "miner" and parts[2] in ("alpha", "beta"):
            _, miner_id, field = parts
            ids = [m.id for m in scenario.miners]
            if miner_id not in ids:
                raise ValueError(f"no miner with id {miner_id!r} to sweep")
            miners = tuple(
                replace(m, **{field: value}) if m.id == miner_id else m for m in scenario.miners
            )
            return replace(scenario, miners=miners)
        raise ValueError(
            f"unknown sweep parameter {self.parameter!r} "
            f"(expected rho, r0, miner.<id>.alpha or miner.<id>.beta)"
        )

    def validate_for(self, scenario: Scenario) -> None:
        """Check every value against the scenario before any solving starts."""
        for v in self.values:
            try:
                self.apply(scenario, v)
            except ValueError as exc:
                raise ValueError(f"sweep value {v:g}: {exc}") from None
