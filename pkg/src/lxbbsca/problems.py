"""Five engineering design problems with penalty-based constraint handling.

Objectives are written for arrays whose last axis is the decision vector.
Where a formula has a pole inside the box (gas production at x1 = 40,
bridge cost at r_j = 1) the value is +inf, which every optimizer treats as
infeasible.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources
from typing import Callable

import numpy as np

from .core import ConfigurationError, ObjectiveProblem, SearchSpace, StructuralError

GEAR_RATIO = 1.0 / 6.931
CAPSULE_K = np.array([100.0, 100.0, 200.0, 150.0])
CAPSULE_P = 0.6
BRIDGE_A = 1.0
BRIDGE_BETA = 0.0003
RELIABILITY_TARGET = 0.9
ENGINEERING_BUDGET = 1000

ENGINEERING_IDS = ("GearTrain", "GasProduction", "BeamDesign", "SpaceCapsule", "BridgeNetwork")
BRIDGE_MODES = ("literal", "system")


def _check_len(x, n, name):
    x = np.asarray(x, dtype=float)
    if x.shape[-1] != n:
        raise StructuralError(f"{name} takes {n} variables, got {x.shape[-1]}")
    return x


def gear_train(x, integer: bool = False):
    x = _check_len(x, 4, "gear_train")
    if integer:
        x = np.round(x)
    x1, x2, x3, x4 = np.moveaxis(x, -1, 0)
    return (GEAR_RATIO - x1 * x3 / (x2 * x4)) ** 2


def gear_train_exhaustive(low: int = 12, high: int = 60):
    """Brute-force integer optimum of the gear train over the full grid.

    Returns ``(best_value, solutions)`` with every integer tuple attaining it.
    """
    teeth = np.arange(low, high + 1, dtype=float)
    num = np.multiply.outer(teeth, teeth).ravel()  # x1 * x3
    den = num  # x2 * x4 spans the same products
    values = (GEAR_RATIO - num[:, None] / den[None, :]) ** 2
    best = float(values.min())
    hits = np.argwhere(values == best)
    k = teeth.size
    solutions = [
        (int(teeth[i // k]), int(teeth[j // k]), int(teeth[i % k]), int(teeth[j % k])) for i, j in hits
    ]
    return best, sorted(solutions)


def gas_production(x):
    x = _check_len(x, 2, "gas_production")
    x1, x2 = np.moveaxis(x, -1, 0)
    base = (40.0 - x1) * np.log(x2 / 200.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        value = 61.8 + 5.72 * x1 + 0.2623 * base ** (-0.85) + 0.087 * base + 700.23 * x2 ** (-0.75)
    return np.where(base > 0, value, np.inf)


def beam_design(x):
    """Deflection objective and signed constraint slacks (negative = satisfied).

    Transcribed symbol by symbol from the published model, including its
    ``x1 x1`` products, so reported table values can be checked against it.
    """
    x = _check_len(x, 4, "beam_design")
    x1, x2, x3, x4 = np.moveaxis(x, -1, 0)
    web = x2 - 2.0 * x4
    with np.errstate(divide="ignore", invalid="ignore"):
        denom = x2 * web / 12.0 + x1 * x3**3 / 6.0 + 2.0 * x1 * x1 * ((x2 - x4) / 2.0) ** 2
        f = np.where(denom != 0, 5000.0 / denom, np.inf)
        g1 = 2.0 * x1 * x3 + x3 * web
        d1 = x3 * web**3 + 2.0 * x1 * x3 * (4.0 * x4**2 + 3.0 * x2 * web)
        d2 = web * x3**3 + 2.0 * x1 * x1**3
        g2 = 18.0 * x2 * 1e4 / d1 + 15.0 * x2 * 1e3 / d2
    g2 = np.where((d1 != 0) & (d2 != 0), g2, np.inf)
    return f, g1 - 300.0, g2 - 6.0


def capsule_reliability(r):
    r = _check_len(r, 4, "capsule_reliability")
    r1, r2, r3, r4 = np.moveaxis(r, -1, 0)
    both_fail = (1.0 - r1) * (1.0 - r4)
    return 1.0 - r3 * both_fail**2 - (1.0 - r3) * (1.0 - r2 * (1.0 - both_fail)) ** 2


def capsule_cost(r):
    r = _check_len(r, 4, "capsule_cost")
    return np.sum(2.0 * CAPSULE_K * r**CAPSULE_P, axis=-1)


def bridge_cost(r):
    r = _check_len(r, 5, "bridge_cost")
    with np.errstate(divide="ignore", over="ignore"):
        terms = BRIDGE_A * np.exp(BRIDGE_BETA / (1.0 - r))
    terms = np.where(r < 1.0, terms, np.inf)
    return np.sum(terms, axis=-1)


def bridge_reliability(r):
    r = _check_len(r, 5, "bridge_reliability")
    r1, r2, r3, r4, r5 = np.moveaxis(r, -1, 0)
    return (
        r1 * r4
        + r2 * r5
        + r1 * r3 * r5
        + r2 * r3 * r4
        - r2 * r3 * r4 * r5
        + 2.0 * r1 * r2 * r3 * r4 * r5
        - r1 * r3 * r4 * r5
        - r1 * r2 * r3 * r5
        - r1 * r2 * r4 * r5
        - r1 * r2 * r3 * r4
    )


@dataclass(frozen=True)
class PenaltyPolicy:
    coefficient: float = 1e6
    exponent: float = 2.0

    def __post_init__(self):
        if not self.coefficient > 0:
            raise ConfigurationError("penalty coefficient must be positive")
        if not self.exponent >= 1:
            raise ConfigurationError("penalty exponent must be at least 1")


@dataclass
class EngineeringProblem:
    id: str
    space: SearchSpace
    raw_objective: Callable
    constraints: list = field(default_factory=list)
    integer: np.ndarray = None
    description: str = ""

    def __post_init__(self):
        if self.integer is None:
            self.integer = np.zeros(self.space.dim, dtype=bool)

    @property
    def reference_solutions(self) -> list:
        return reference_rows(self.id)

    def violations(self, x) -> np.ndarray:
        """Constraint values stacked on the last axis; positive = violated."""
        x = np.asarray(x, dtype=float)
        if not self.constraints:
            return np.zeros(x.shape[:-1] + (0,))
        return np.stack([np.asarray(g(x), dtype=float) for g in self.constraints], axis=-1)

    def to_objective(self, policy: PenaltyPolicy = PenaltyPolicy()) -> ObjectiveProblem:
        return ObjectiveProblem(
            name=self.id,
            space=self.space,
            func=lambda X, rng=None: penalized_objective(self, X, policy),
            integer=self.integer if np.any(self.integer) else None,
            description=self.description,
            default_budget=ENGINEERING_BUDGET,
        )


def penalized_objective(problem: EngineeringProblem, x, policy: PenaltyPolicy = PenaltyPolicy()):
    x = np.asarray(x, dtype=float)
    raw = np.asarray(problem.raw_objective(x), dtype=float)
    viol = np.maximum(problem.violations(x), 0.0)
    with np.errstate(over="ignore", invalid="ignore"):
        penalty = policy.coefficient * np.sum(viol**policy.exponent, axis=-1)
    out = raw + penalty
    return float(out) if out.ndim == 0 else out


def _beam_objective(x):
    return beam_design(x)[0]


def _beam_g1(x):
    return beam_design(x)[1]


def _beam_g2(x):
    return beam_design(x)[2]


def _capsule_min_reliability(x):
    return RELIABILITY_TARGET - capsule_reliability(x)


def _bridge_min_reliability(x):
    return RELIABILITY_TARGET - bridge_reliability(x)


def get_engineering_problem(problem_id: str, integer_gear: bool = False, bridge_mode: str = "literal") -> EngineeringProblem:
    if problem_id == "GearTrain":
        integer = np.full(4, bool(integer_gear))
        return EngineeringProblem(
            "GearTrain",
            SearchSpace.uniform(12, 60, 4),
            lambda x: gear_train(x, integer=integer_gear),
            integer=integer,
            description="gear ratio error (integer teeth)" if integer_gear else "gear ratio error",
        )
    if problem_id == "GasProduction":
        return EngineeringProblem(
            "GasProduction", SearchSpace([17.5, 300.0], [40.0, 600.0]), gas_production,
            description="gas production capacity",
        )
    if problem_id == "BeamDesign":
        return EngineeringProblem(
            "BeamDesign",
            SearchSpace([10.0, 10.0, 0.9, 0.9], [80.0, 50.0, 5.0, 5.0]),
            _beam_objective,
            [_beam_g1, _beam_g2],
            description="beam static deflection",
        )
    if problem_id == "SpaceCapsule":
        return EngineeringProblem(
            "SpaceCapsule", SearchSpace.uniform(0.5, 1.0, 4), capsule_cost, [_capsule_min_reliability],
            description="life-support system cost subject to reliability >= 0.9",
        )
    if problem_id == "BridgeNetwork":
        if bridge_mode == "literal":
            # the printed "0.9 <= r_5 <= 1" read as a box bound on r_5
            space = SearchSpace([0.5, 0.5, 0.5, 0.5, 0.9], [1.0] * 5)
            return EngineeringProblem("BridgeNetwork", space, bridge_cost, description="bridge network cost")
        if bridge_mode == "system":
            return EngineeringProblem(
                "BridgeNetwork", SearchSpace.uniform(0.5, 1.0, 5), bridge_cost, [_bridge_min_reliability],
                description="bridge network cost subject to system reliability >= 0.9",
            )
        raise ConfigurationError(f"unknown bridge mode {bridge_mode!r}; expected one of {BRIDGE_MODES}")
    raise KeyError(f"unknown engineering problem {problem_id!r}")


@lru_cache(maxsize=None)
def _reference_data() -> dict:
    text = resources.files("lxbbsca").joinpath("data/reference_solutions.json").read_text()
    return json.loads(text)


def reference_rows(problem_id: str) -> list:
    data = _reference_data()
    if problem_id not in data:
        raise KeyError(f"no published rows for {problem_id!r}")
    return [dict(row) for row in data[problem_id]["rows"]]


def reliability_of(problem_id: str, x):
    """System reliability for the two reliability problems, else None."""
    if problem_id == "SpaceCapsule":
        return float(capsule_reliability(x))
    if problem_id == "BridgeNetwork":
        return float(bridge_reliability(x))
    return None
