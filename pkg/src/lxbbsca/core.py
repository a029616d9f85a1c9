"""Shared types, seeded randomness and run bookkeeping for all optimizers."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np


class StructuralError(ValueError):
    """Raised when array shapes or orderings do not fit together."""


class ConfigurationError(ValueError):
    """Raised for parameter values an optimizer cannot work with."""


class BudgetExhausted(Exception):
    """Internal signal: the objective-evaluation budget is used up."""


@dataclass(frozen=True)
class SearchSpace:
    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        lower = np.atleast_1d(np.asarray(self.lower, dtype=float))
        upper = np.atleast_1d(np.asarray(self.upper, dtype=float))
        if lower.ndim != 1 or lower.shape != upper.shape:
            raise StructuralError("lower and upper must be 1-D vectors of equal length")
        if lower.size < 1:
            raise StructuralError("search space needs at least one dimension")
        if not np.all(lower < upper):
            raise ConfigurationError("every lower bound must be strictly below its upper bound")
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)

    @classmethod
    def uniform(cls, low: float, high: float, dim: int) -> "SearchSpace":
        return cls(np.full(dim, float(low)), np.full(dim, float(high)))

    @property
    def dim(self) -> int:
        return self.lower.size

    @property
    def width(self) -> np.ndarray:
        return self.upper - self.lower

    def contains(self, x) -> bool:
        x = np.asarray(x, dtype=float)
        return bool(np.all((x >= self.lower) & (x <= self.upper)))


@dataclass
class Candidate:
    """A position together with its (possibly not yet computed) fitness."""

    position: np.ndarray
    fitness: Optional[float] = None

    @property
    def evaluated(self) -> bool:
        return self.fitness is not None


@dataclass
class Population:
    members: list

    @property
    def size(self) -> int:
        return len(self.members)

    def positions(self) -> np.ndarray:
        return np.array([c.position for c in self.members], dtype=float)

    def fitness(self) -> np.ndarray:
        if not all(c.evaluated for c in self.members):
            raise StructuralError("population contains unevaluated candidates")
        return np.array([c.fitness for c in self.members], dtype=float)

    def sorted(self) -> "Population":
        """Return a copy ordered best-to-worst (ascending fitness)."""
        order = np.argsort(self.fitness(), kind="stable")
        return Population([self.members[i] for i in order])

    @classmethod
    def from_arrays(cls, positions, fitness=None) -> "Population":
        positions = np.asarray(positions, dtype=float)
        if fitness is None:
            return cls([Candidate(p.copy()) for p in positions])
        return cls([Candidate(p.copy(), float(f)) for p, f in zip(positions, fitness)])


class RngStream:
    """Seeded random stream; one per trial, never shared between trials."""

    def __init__(self, seed: int):
        self.seed = int(seed)
        self._gen = np.random.Generator(np.random.PCG64(self.seed))

    def random(self, size=None):
        """Uniform draws on [0, 1)."""
        return self._gen.random(size)

    def random_open_closed(self, size=None):
        """Uniform draws on (0, 1]; keeps log(u) finite."""
        return 1.0 - self._gen.random(size)

    def uniform(self, low, high, size=None):
        return self._gen.uniform(low, high, size)

    def integers(self, low, high=None, size=None):
        return self._gen.integers(low, high, size)

    def roulette(self, weights, size):
        """Draw indices with probability proportional to ``weights``."""
        cdf = np.cumsum(weights, dtype=float)
        if cdf[-1] <= 0:
            return self._gen.integers(0, len(weights), size)
        idx = np.searchsorted(cdf, self._gen.random(size) * cdf[-1], side="right")
        return np.minimum(idx, len(weights) - 1)


@dataclass
class ConvergenceTrace:
    points: list = field(default_factory=list)

    def append(self, eval_count: int, fitness: float) -> None:
        if self.points and eval_count <= self.points[-1][0]:
            raise StructuralError(
                f"eval_count {eval_count} does not exceed last recorded count {self.points[-1][0]}"
            )
        best = fitness if not self.points else min(fitness, self.points[-1][1])
        self.points.append((int(eval_count), float(best)))

    @property
    def eval_counts(self) -> np.ndarray:
        return np.array([p[0] for p in self.points], dtype=int)

    @property
    def best_values(self) -> np.ndarray:
        return np.array([p[1] for p in self.points], dtype=float)

    def __len__(self):
        return len(self.points)


def update_trace(trace: ConvergenceTrace, eval_count: int, fitness: float) -> ConvergenceTrace:
    """Return a new trace with one more best-so-far point."""
    out = ConvergenceTrace(list(trace.points))
    out.append(eval_count, fitness)
    return out


@dataclass
class RunResult:
    algorithm: str
    problem: str
    seed: int
    best: Candidate
    trace: ConvergenceTrace
    evals_used: int


@dataclass
class ObjectiveProblem:
    """A named minimization problem over a box.

    ``func`` maps an ``(n, dim)`` array to ``n`` objective values.  It also
    receives the run's RngStream (or None) for noisy objectives.
    """

    name: str
    space: SearchSpace
    func: Callable
    f_min: Optional[float] = None
    x_star: Optional[np.ndarray] = None
    integer: Optional[np.ndarray] = None
    description: str = ""
    default_budget: Optional[int] = None

    @property
    def dim(self) -> int:
        return self.space.dim

    def repair(self, X: np.ndarray) -> np.ndarray:
        X = np.clip(X, self.space.lower, self.space.upper)
        if self.integer is not None and np.any(self.integer):
            X = X.copy()
            X[..., self.integer] = np.round(X[..., self.integer])
        return X

    def evaluate_batch(self, X, rng: Optional[RngStream] = None) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        if X.ndim != 2 or X.shape[1] != self.dim:
            raise StructuralError(f"{self.name} expects shape (n, {self.dim}), got {X.shape}")
        return np.asarray(self.func(X, rng), dtype=float)

    def evaluate(self, x, rng: Optional[RngStream] = None) -> float:
        x = np.asarray(x, dtype=float)
        if x.shape != (self.dim,):
            raise StructuralError(f"{self.name} expects a vector of length {self.dim}, got {x.shape}")
        return float(self.evaluate_batch(x[None, :], rng)[0])


def clamp_to_bounds(position, space: SearchSpace) -> np.ndarray:
    position = np.asarray(position, dtype=float)
    if position.shape[-1] != space.dim:
        raise StructuralError(f"position has {position.shape[-1]} coordinates, space has {space.dim}")
    return np.clip(position, space.lower, space.upper)


def random_population(space: SearchSpace, n: int, rng: RngStream) -> Population:
    if n < 2:
        raise ConfigurationError("population needs at least two habitats for migration")
    X = space.lower + rng.random((n, space.dim)) * space.width
    return Population.from_arrays(X)


class Evaluator:
    """Budgeted objective wrapper that owns the best-so-far and the trace.

    Each call evaluates a batch of rows. When fewer evaluations remain than
    rows requested, only the leading rows are evaluated and BudgetExhausted
    is raised after bookkeeping.
    """

    def __init__(self, problem: ObjectiveProblem, budget: int, rng: RngStream):
        self.problem = problem
        self.budget = int(budget)
        self.rng = rng
        self.count = 0
        self.best_position: Optional[np.ndarray] = None
        self.best_fitness = np.inf
        self.trace = ConvergenceTrace()

    @property
    def remaining(self) -> int:
        return self.budget - self.count

    def __call__(self, X: np.ndarray) -> np.ndarray:
        k = min(self.remaining, len(X))
        if k <= 0:
            raise BudgetExhausted
        Xk = self.problem.repair(X[:k])
        values = self.problem.evaluate_batch(Xk, self.rng)
        values = np.where(np.isnan(values), np.inf, values)
        self.count += k
        i = int(np.argmin(values))
        if self.best_position is None or values[i] < self.best_fitness:
            self.best_fitness = float(values[i])
            self.best_position = Xk[i].copy()
        self.trace.append(self.count, self.best_fitness)
        if k < len(X):
            raise BudgetExhausted
        return values

    def result(self, algorithm: str) -> RunResult:
        return RunResult(
            algorithm=algorithm,
            problem=self.problem.name,
            seed=self.rng.seed,
            best=Candidate(self.best_position, self.best_fitness),
            trace=self.trace,
            evals_used=self.count,
        )
