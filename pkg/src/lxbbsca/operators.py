"""Variation operators: Laplace crossover, gamma blending, migration rates,
the sine-cosine position update and elitism.

Everything here is a pure function of its arguments; randomness enters only
through explicit draws passed in (or an RngStream for the ``draw_*`` helpers).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import Candidate, ConfigurationError, Population, RngStream, StructuralError

EQ5_MODES = ("progress", "literal")
R2_MODES = ("two_pi", "strict")


@dataclass(frozen=True)
class LaplaceParams:
    a: float = 0.0
    b: float = 0.5
    gamma_min: float = 0.0
    gamma_max: float = 1.0
    k: float = 2.0

    def __post_init__(self):
        if not self.b > 0:
            raise ConfigurationError("Laplace scale b must be positive")
        if not 0.0 <= self.gamma_min <= self.gamma_max <= 1.0:
            raise ConfigurationError("need 0 <= gamma_min <= gamma_max <= 1")


@dataclass(frozen=True)
class MigrationRates:
    """Immigration (lambda) and emigration (mu) rates indexed by rank - 1."""

    immigration: np.ndarray
    emigration: np.ndarray


@dataclass(frozen=True)
class ScaControls:
    """Sine-cosine controls; r2, r3, r4 may be per-dimension arrays."""

    r1: float
    r2: np.ndarray
    r3: np.ndarray
    r4: np.ndarray


def laplace_beta(u, params: LaplaceParams = LaplaceParams()):
    """Spread factor from a uniform draw ``u`` in (0, 1].

    Branches are kept exactly as published: ``a - b ln u`` for u <= 1/2 and
    ``a + b ln u`` otherwise (not the textbook log(2u) inverse CDF).
    """
    u = np.asarray(u, dtype=float)
    if np.any((u <= 0.0) | (u > 1.0)):
        raise ValueError("u must lie in (0, 1]")
    log_u = np.log(u)
    beta = np.where(u <= 0.5, params.a - params.b * log_u, params.a + params.b * log_u)
    return float(beta) if beta.ndim == 0 else beta


def draw_beta(rng: RngStream, size, params: LaplaceParams = LaplaceParams()):
    return laplace_beta(rng.random_open_closed(size), params)


def _same_shape(*arrays):
    shape = np.shape(arrays[0])
    for a in arrays[1:]:
        if np.shape(a) != shape:
            raise StructuralError(f"shape mismatch: {shape} vs {np.shape(a)}")


def laplace_crossover(x1, x2, beta):
    x1 = np.asarray(x1, dtype=float)
    x2 = np.asarray(x2, dtype=float)
    beta = np.asarray(beta, dtype=float)
    _same_shape(x1, x2)
    if beta.ndim and beta.shape != x1.shape:
        raise StructuralError(f"beta shape {beta.shape} does not match parents {x1.shape}")
    spread = beta * (x1 - x2)
    return x1 + spread, x2 + spread


def blend_gamma(t, T, params: LaplaceParams = LaplaceParams(), mode: str = "progress") -> float:
    """Blend weight for the two crossover children.

    ``progress`` scales the range by (t/T)**k so the weight moves from
    gamma_min toward gamma_max over the run; ``literal`` returns the
    constant gamma_min + (gamma_max - gamma_min)**k.
    """
    span = params.gamma_max - params.gamma_min
    if mode == "literal":
        return params.gamma_min + span ** params.k
    if mode != "progress":
        raise ConfigurationError(f"unknown gamma mode {mode!r}; expected one of {EQ5_MODES}")
    if T < 1 or not 0 <= t <= T:
        raise ConfigurationError("need T >= 1 and 0 <= t <= T")
    return params.gamma_min + span * (t / T) ** params.k


def blend_offspring(y1, y2, gamma: float):
    y1 = np.asarray(y1, dtype=float)
    y2 = np.asarray(y2, dtype=float)
    _same_shape(y1, y2)
    return gamma * y1 + (1.0 - gamma) * y2


def migration_rates(n: int, immigration_max: float = 1.0, emigration_max: float = 1.0) -> MigrationRates:
    """Linear rank model: rank 1 (best) never immigrates, rank n always does."""
    if n < 2:
        raise ConfigurationError("migration needs at least two habitats")
    if immigration_max <= 0 or emigration_max <= 0:
        raise ConfigurationError("maximum rates must be positive")
    r = np.arange(1, n + 1, dtype=float)
    lam = immigration_max * (r - 1) / (n - 1)
    mu = emigration_max * (n - r) / (n - 1)
    return MigrationRates(lam, mu)


def r1_schedule(t, T, a: float = 2.0) -> float:
    if T <= 0:
        raise ConfigurationError("max iteration count must be positive")
    return a * (1.0 - t / T)


def draw_sca_controls(rng: RngStream, shape, r1: float, r2_mode: str = "two_pi") -> ScaControls:
    if r2_mode == "two_pi":
        r2_high = 2.0 * np.pi
    elif r2_mode == "strict":
        r2_high = 2.0
    else:
        raise ConfigurationError(f"unknown r2 mode {r2_mode!r}; expected one of {R2_MODES}")
    r2 = r2_high * rng.random(shape)
    r3 = 2.0 * rng.random(shape)
    r4 = rng.random(shape)
    return ScaControls(r1, r2, r3, r4)


def sca_step(x, gbest, controls: ScaControls):
    """Move ``x`` around ``gbest`` along a sine or cosine arc.

    ``x`` may be a single vector or a population matrix; ``gbest`` broadcasts.
    """
    x = np.asarray(x, dtype=float)
    gbest = np.asarray(gbest, dtype=float)
    if gbest.shape[-1] != x.shape[-1]:
        raise StructuralError("gbest and x differ in dimension")
    wave = np.where(controls.r4 <= 0.5, np.sin(controls.r2), np.cos(controls.r2))
    return x + controls.r1 * wave * np.abs(controls.r3 * gbest - x)


def replace_worst(X, fitness, elite_X, elite_fitness):
    """Array form of elitism on a best-to-worst sorted population.

    Elites already present (same position and fitness) are skipped; each
    remaining elite overwrites the current worst member if it improves on it.
    The result is re-sorted.
    """
    X = np.array(X, dtype=float)
    fitness = np.array(fitness, dtype=float)
    n = len(fitness)
    if len(elite_fitness) > n:
        raise ConfigurationError("more elites than population members")
    slot = n - 1
    for ex, ef in zip(elite_X, elite_fitness):
        present = np.any((fitness == ef) & np.all(X == ex, axis=1))
        if present:
            continue
        if slot < 0 or not ef < fitness[slot]:
            continue
        X[slot] = ex
        fitness[slot] = ef
        slot -= 1
    order = np.argsort(fitness, kind="stable")
    return X[order], fitness[order]


def elitism_replace(sorted_pop: Population, elites: list) -> Population:
    if len(elites) > sorted_pop.size:
        raise ConfigurationError("more elites than population members")
    X, f = replace_worst(
        sorted_pop.positions(),
        sorted_pop.fitness(),
        [e.position for e in elites],
        [e.fitness for e in elites],
    )
    return Population([Candidate(x, float(v)) for x, v in zip(X, f)])
