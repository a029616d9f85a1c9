"""BBO, LX-BBO, SCA and the LX-BBSCA hybrid behind one calling convention.

Each optimizer is ``run_xxx(problem, config, rng) -> RunResult``.  Populations
are held as ``(n, dim)`` arrays and whole generations are evaluated in one
batched objective call; the budget counts individual objective evaluations.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Callable

import numpy as np

from . import operators as ops
from .core import (
    BudgetExhausted,
    ConfigurationError,
    Evaluator,
    ObjectiveProblem,
    RngStream,
    RunResult,
    clamp_to_bounds,
    random_population,
)
from .operators import LaplaceParams
from .stats import TrialSummary, summarize


class AlgorithmId(str, Enum):
    BBO = "BBO"
    LXBBO = "LXBBO"
    SCA = "SCA"
    LXBBSCA = "LXBBSCA"

    @classmethod
    def parse(cls, value) -> "AlgorithmId":
        if isinstance(value, cls):
            return value
        key = str(value).upper().replace("-", "").replace("_", "")
        try:
            return cls(key)
        except ValueError:
            raise KeyError(f"unknown algorithm {value!r}; expected one of {[a.value for a in cls]}") from None


REPLACE_MODES = ("emigration", "random")


@dataclass(frozen=True)
class OptimizerConfig:
    population_size: int = 50
    eval_budget: int = 30_000
    elitism_count: int = 2
    mutation_rate: float = 0.01
    laplace: LaplaceParams = field(default_factory=LaplaceParams)
    immigration_max: float = 1.0
    emigration_max: float = 1.0
    eq5_mode: str = "progress"
    r2_mode: str = "two_pi"
    r1_start: float = 2.0
    # how LX-BBSCA's rand < 0.5 branch picks the replacement SIV
    replace_mode: str = "emigration"

    def __post_init__(self):
        n = self.population_size
        if n < 2:
            raise ConfigurationError("population_size must be at least 2")
        if self.eval_budget < n:
            raise ConfigurationError("eval_budget must cover at least one evaluation of the population")
        if not 0 <= self.elitism_count < n:
            raise ConfigurationError("elitism_count must be in [0, population_size)")
        if not 0.0 <= self.mutation_rate <= 1.0:
            raise ConfigurationError("mutation_rate must lie in [0, 1]")
        if self.eq5_mode not in ops.EQ5_MODES:
            raise ConfigurationError(f"eq5_mode must be one of {ops.EQ5_MODES}")
        if self.r2_mode not in ops.R2_MODES:
            raise ConfigurationError(f"r2_mode must be one of {ops.R2_MODES}")
        if self.replace_mode not in REPLACE_MODES:
            raise ConfigurationError(f"replace_mode must be one of {REPLACE_MODES}")

    def with_budget(self, budget: int) -> "OptimizerConfig":
        return replace(self, eval_budget=int(budget))


def _max_iterations(config: OptimizerConfig, evals_per_iteration: int) -> int:
    return max(1, config.eval_budget // evals_per_iteration)


def _initial(problem: ObjectiveProblem, config: OptimizerConfig, rng: RngStream, ev: Evaluator):
    X = random_population(problem.space, config.population_size, rng).positions()
    f = ev(X)
    order = np.argsort(f, kind="stable")
    return X[order], f[order]


def _sorted(X, f):
    order = np.argsort(f, kind="stable")
    return X[order], f[order]


def _same_column_pick(X, rows):
    """X[rows[i, d], d] for every cell of the (n, dim) index array ``rows``."""
    return X[rows, np.arange(X.shape[1])]


def _uniform_in_bounds(problem, rng, shape):
    return problem.space.lower + rng.random(shape) * problem.space.width


def _mutate(problem, X, rate, rng):
    mask = rng.random(X.shape) < rate
    return np.where(mask, _uniform_in_bounds(problem, rng, X.shape), X)


def _lx_migrate(X, lam, mu, gamma, config, rng):
    """Laplace migration on a best-to-worst sorted population snapshot.

    Returns the blended population, the immigration mask and the per-cell
    donor values so callers can decide what happens on a migration miss.
    """
    shape = X.shape
    immigrate = rng.random(shape) < lam[:, None]
    donors = _same_column_pick(X, rng.roulette(mu, shape))
    beta = ops.draw_beta(rng, shape, config.laplace)
    y1, y2 = ops.laplace_crossover(X, donors, beta)
    z = ops.blend_offspring(y1, y2, gamma)
    return np.where(immigrate, z, X), immigrate, donors


def run_bbo(problem: ObjectiveProblem, config: OptimizerConfig, rng: RngStream) -> RunResult:
    ev = Evaluator(problem, config.eval_budget, rng)
    rates = ops.migration_rates(config.population_size, config.immigration_max, config.emigration_max)
    lam, mu = rates.immigration, rates.emigration
    e = config.elitism_count
    try:
        X, f = _initial(problem, config, rng, ev)
        while True:
            elite_X, elite_f = X[:e].copy(), f[:e].copy()
            immigrate = rng.random(X.shape) < lam[:, None]
            donors = _same_column_pick(X, rng.roulette(mu, X.shape))
            new_X = np.where(immigrate, donors, X)
            new_X = _mutate(problem, new_X, config.mutation_rate, rng)
            new_f = ev(new_X)
            X, f = ops.replace_worst(*_sorted(new_X, new_f), elite_X, elite_f)
    except BudgetExhausted:
        pass
    return ev.result(AlgorithmId.BBO.value)


def run_lxbbo(problem: ObjectiveProblem, config: OptimizerConfig, rng: RngStream) -> RunResult:
    ev = Evaluator(problem, config.eval_budget, rng)
    n = config.population_size
    rates = ops.migration_rates(n, config.immigration_max, config.emigration_max)
    lam, mu = rates.immigration, rates.emigration
    e = config.elitism_count
    T = _max_iterations(config, n)
    t = 0
    try:
        X, f = _initial(problem, config, rng, ev)
        while True:
            t += 1
            gamma = ops.blend_gamma(min(t, T), T, config.laplace, config.eq5_mode)
            elite_X, elite_f = X[:e].copy(), f[:e].copy()
            blended, immigrate, donors = _lx_migrate(X, lam, mu, gamma, config, rng)
            # migration miss: the SIV is copied from the emigration-selected habitat
            new_X = np.where(immigrate, blended, donors)
            new_X = _mutate(problem, new_X, config.mutation_rate, rng)
            new_X = clamp_to_bounds(new_X, problem.space)
            new_f = ev(new_X)
            X, f = ops.replace_worst(*_sorted(new_X, new_f), elite_X, elite_f)
    except BudgetExhausted:
        pass
    return ev.result(AlgorithmId.LXBBO.value)


class _GlobalBest:
    def __init__(self, X, f):
        i = int(np.argmin(f))
        self.position = X[i].copy()
        self.fitness = float(f[i])

    def offer(self, X, f):
        i = int(np.argmin(f))
        if f[i] < self.fitness:
            self.position = X[i].copy()
            self.fitness = float(f[i])


def _sca_pass(problem, X, f, gbest: _GlobalBest, r1, config, rng, ev):
    """One sine-cosine sweep with greedy acceptance; updates X and f in place.

    The destination point is the global best at the start of the sweep.
    """
    controls = ops.draw_sca_controls(rng, X.shape, r1, config.r2_mode)
    trial = clamp_to_bounds(ops.sca_step(X, gbest.position, controls), problem.space)
    trial_f = ev(trial)
    better = trial_f < f
    X[better] = trial[better]
    f[better] = trial_f[better]
    gbest.offer(X, f)


def run_sca(problem: ObjectiveProblem, config: OptimizerConfig, rng: RngStream) -> RunResult:
    ev = Evaluator(problem, config.eval_budget, rng)
    T = _max_iterations(config, config.population_size)
    t = 0
    try:
        X, f = _initial(problem, config, rng, ev)
        gbest = _GlobalBest(X, f)
        while True:
            t += 1
            r1 = ops.r1_schedule(min(t, T), T, config.r1_start)
            _sca_pass(problem, X, f, gbest, r1, config, rng, ev)
    except BudgetExhausted:
        pass
    return ev.result(AlgorithmId.SCA.value)


def run_lxbbsca(problem: ObjectiveProblem, config: OptimizerConfig, rng: RngStream) -> RunResult:
    ev = Evaluator(problem, config.eval_budget, rng)
    n = config.population_size
    rates = ops.migration_rates(n, config.immigration_max, config.emigration_max)
    lam, mu = rates.immigration, rates.emigration
    e = config.elitism_count
    # two full evaluation passes per iteration
    T = _max_iterations(config, 2 * n)
    t = 0
    try:
        X, f = _initial(problem, config, rng, ev)
        gbest = _GlobalBest(X, f)
        while True:
            t += 1
            progress = min(t, T)
            _sca_pass(problem, X, f, gbest, ops.r1_schedule(progress, T, config.r1_start), config, rng, ev)

            X, f = _sorted(X, f)
            elite_X, elite_f = X[:e].copy(), f[:e].copy()
            gamma = ops.blend_gamma(progress, T, config.laplace, config.eq5_mode)
            new_X, _, _ = _lx_migrate(X, lam, mu, gamma, config, rng)
            swap = rng.random(X.shape) < 0.5
            if config.replace_mode == "emigration":
                replacement = _same_column_pick(X, rng.roulette(mu, X.shape))
            else:
                replacement = _uniform_in_bounds(problem, rng, X.shape)
            new_X = clamp_to_bounds(np.where(swap, replacement, new_X), problem.space)
            new_f = ev(new_X)
            better = new_f < f
            X[better] = new_X[better]
            f[better] = new_f[better]
            gbest.offer(X, f)
            X, f = ops.replace_worst(*_sorted(X, f), elite_X, elite_f)
    except BudgetExhausted:
        pass
    return ev.result(AlgorithmId.LXBBSCA.value)


OPTIMIZERS: dict = {
    AlgorithmId.BBO: run_bbo,
    AlgorithmId.LXBBO: run_lxbbo,
    AlgorithmId.SCA: run_sca,
    AlgorithmId.LXBBSCA: run_lxbbsca,
}


def get_optimizer(algorithm) -> Callable:
    return OPTIMIZERS[AlgorithmId.parse(algorithm)]


def trial_seed(base_seed: int, trial_index: int) -> int:
    return int(base_seed) + int(trial_index)


def run_trials(problem: ObjectiveProblem, algorithm, config: OptimizerConfig, n_trials: int, base_seed: int = 0):
    """Run independent seeded trials; returns ``(TrialSummary, [RunResult, ...])``.

    Trial ``i`` uses seed ``base_seed + i``, so the same trial index of two
    algorithms can be paired in the statistical tests.
    """
    if n_trials < 1:
        raise ConfigurationError("n_trials must be at least 1")
    optimizer = get_optimizer(algorithm)
    results = [optimizer(problem, config, RngStream(trial_seed(base_seed, i))) for i in range(n_trials)]
    summary: TrialSummary = summarize([r.best.fitness for r in results])
    return summary, results
