import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lxbbsca import operators as ops
from lxbbsca.core import Candidate, ConfigurationError, Population, RngStream, StructuralError
from lxbbsca.operators import LaplaceParams, ScaControls

TOL = 1e-9
finite = st.floats(-1e3, 1e3, allow_nan=False)


class TestLaplaceBeta:
    @pytest.mark.parametrize(
        "u, a, b, expected",
        [
            (1.0, 0.0, 0.5, 0.0),
            (0.5, 0.0, 0.5, 0.34657359027997264),
            (0.9, 1.0, 1.0, 0.8946394843421737),
        ],
    )
    def test_examples(self, u, a, b, expected):
        assert ops.laplace_beta(u, LaplaceParams(a=a, b=b)) == pytest.approx(expected, abs=TOL)

    @pytest.mark.parametrize("u", [0.0, -0.1, 1.5])
    def test_rejects_outside_open_closed(self, u):
        with pytest.raises(ValueError):
            ops.laplace_beta(u)

    def test_branch_split_and_median(self):
        beta = ops.draw_beta(RngStream(2024), 100_000, LaplaceParams(a=0.0, b=1.0))
        assert abs(np.median(beta)) < 0.05
        positive = np.mean(beta > 0)
        assert abs(positive - 0.5) < 0.01

    def test_draws_are_finite(self):
        assert np.all(np.isfinite(ops.draw_beta(RngStream(0), 100_000)))

    def test_params_validated(self):
        with pytest.raises(ConfigurationError):
            LaplaceParams(b=0.0)
        with pytest.raises(ConfigurationError):
            LaplaceParams(gamma_min=0.8, gamma_max=0.2)


class TestLaplaceCrossover:
    def test_equal_parents_unchanged(self):
        y1, y2 = ops.laplace_crossover([3.0, -1.0], [3.0, -1.0], [0.7, -2.0])
        np.testing.assert_array_equal(y1, [3.0, -1.0])
        np.testing.assert_array_equal(y2, [3.0, -1.0])

    def test_positive_beta(self):
        y1, y2 = ops.laplace_crossover([2.0], [1.0], [0.5])
        np.testing.assert_allclose(y1, [2.5], atol=TOL)
        np.testing.assert_allclose(y2, [1.5], atol=TOL)

    def test_negative_beta(self):
        y1, y2 = ops.laplace_crossover([0.0], [4.0], [-0.25])
        np.testing.assert_allclose(y1, [1.0], atol=TOL)
        np.testing.assert_allclose(y2, [5.0], atol=TOL)

    def test_length_mismatch(self):
        with pytest.raises(StructuralError):
            ops.laplace_crossover([1.0, 2.0], [1.0], [0.1, 0.2])

    @given(st.lists(st.tuples(finite, finite, st.floats(-5, 5)), min_size=1, max_size=8))
    def test_midpoint_identity(self, rows):
        x1, x2, beta = (np.array(c) for c in zip(*rows))
        y1, y2 = ops.laplace_crossover(x1, x2, beta)
        np.testing.assert_allclose((y1 + y2) / 2, (x1 + x2) / 2 + beta * (x1 - x2), rtol=0, atol=1e-12 * 1e4)

    def test_midpoint_identity_1e5_draws(self):
        rng = RngStream(5)
        x1, x2 = rng.uniform(-10, 10, 100_000), rng.uniform(-10, 10, 100_000)
        beta = ops.draw_beta(rng, 100_000)
        y1, y2 = ops.laplace_crossover(x1, x2, beta)
        assert np.max(np.abs((y1 + y2) / 2 - ((x1 + x2) / 2 + beta * (x1 - x2)))) < 1e-12 * 1e2

    def test_one_dimensional_children_collinear(self):
        # in one dimension every point is collinear, but both children sit on the parents' line
        y1, y2 = ops.laplace_crossover([1.0], [3.0], [0.4])
        assert y1[0] - y2[0] == pytest.approx(1.0 - 3.0)


class TestBlend:
    def test_gamma_zero_progress(self):
        assert ops.blend_gamma(0, 100, LaplaceParams(k=1)) == pytest.approx(0.0, abs=TOL)

    def test_gamma_full_progress(self):
        assert ops.blend_gamma(100, 100, LaplaceParams(k=2)) == pytest.approx(1.0, abs=TOL)

    @pytest.mark.parametrize("t", [0, 17, 100])
    def test_gamma_literal(self, t):
        p = LaplaceParams(gamma_min=0.2, gamma_max=0.8, k=2)
        assert ops.blend_gamma(t, 100, p, mode="literal") == pytest.approx(0.56, abs=TOL)

    def test_gamma_range_checks(self):
        with pytest.raises(ConfigurationError):
            ops.blend_gamma(5, 0)
        with pytest.raises(ConfigurationError):
            ops.blend_gamma(1, 10, mode="other")

    @given(st.integers(0, 500), st.integers(1, 500))
    def test_gamma_in_range(self, t, T):
        t = min(t, T)
        g = ops.blend_gamma(t, T, LaplaceParams(gamma_min=0.1, gamma_max=0.9, k=2))
        assert 0.1 - 1e-12 <= g <= 0.9 + 1e-12

    def test_offspring_endpoints(self):
        y1, y2 = np.array([1.0, 2.0]), np.array([5.0, -3.0])
        np.testing.assert_array_equal(ops.blend_offspring(y1, y2, 1.0), y1)
        np.testing.assert_array_equal(ops.blend_offspring(y1, y2, 0.0), y2)

    def test_offspring_convex(self):
        np.testing.assert_allclose(ops.blend_offspring([2.0], [4.0], 0.25), [3.5], atol=TOL)

    def test_offspring_mismatch(self):
        with pytest.raises(StructuralError):
            ops.blend_offspring([1.0], [1.0, 2.0], 0.5)


class TestMigrationRates:
    def test_two_habitats(self):
        r = ops.migration_rates(2)
        np.testing.assert_allclose(r.immigration, [0.0, 1.0], atol=TOL)
        np.testing.assert_allclose(r.emigration, [1.0, 0.0], atol=TOL)

    def test_midpoint(self):
        r = ops.migration_rates(5)
        assert r.immigration[2] == pytest.approx(0.5, abs=TOL)
        assert r.emigration[2] == pytest.approx(0.5, abs=TOL)

    def test_monotone(self):
        r = ops.migration_rates(10)
        assert np.all(np.diff(r.immigration) > 0)
        assert np.all(np.diff(r.emigration) < 0)

    @given(st.integers(2, 300))
    def test_sum_is_one(self, n):
        r = ops.migration_rates(n)
        assert np.max(np.abs(r.immigration + r.emigration - 1.0)) <= 1e-12

    def test_too_small(self):
        with pytest.raises(ConfigurationError):
            ops.migration_rates(1)


class TestSca:
    @pytest.mark.parametrize("t, expected", [(0, 2.0), (10, 0.0), (5, 1.0)])
    def test_r1_schedule(self, t, expected):
        assert ops.r1_schedule(t, 10) == pytest.approx(expected, abs=TOL)

    def test_r1_schedule_zero_T(self):
        with pytest.raises(ConfigurationError):
            ops.r1_schedule(0, 0)

    def test_step_at_gbest_is_identity(self):
        x = np.array([1.5, -2.0])
        for r4 in (0.2, 0.8):
            c = ScaControls(1.7, np.array([0.3, 2.0]), np.ones(2), np.full(2, r4))
            np.testing.assert_allclose(ops.sca_step(x, x, c), x, atol=TOL)

    def test_step_sine_branch(self):
        c = ScaControls(1.0, np.array([math.pi / 2]), np.array([1.0]), np.array([0.3]))
        np.testing.assert_allclose(ops.sca_step([0.0], [1.0], c), [1.0], atol=TOL)

    def test_step_cosine_branch(self):
        c = ScaControls(1.0, np.array([0.0]), np.array([2.0]), np.array([0.9]))
        np.testing.assert_allclose(ops.sca_step([0.0], [1.0], c), [2.0], atol=TOL)

    @given(st.lists(finite, min_size=1, max_size=6), st.integers(0, 2**31))
    @settings(max_examples=50)
    def test_r1_zero_is_identity(self, xs, seed):
        x = np.array(xs)
        c = ops.draw_sca_controls(RngStream(seed), x.shape, 0.0)
        np.testing.assert_array_equal(ops.sca_step(x, np.zeros_like(x), c), x)

    def test_control_ranges(self):
        c = ops.draw_sca_controls(RngStream(1), (2000,), 1.0)
        assert c.r2.min() >= 0 and c.r2.max() <= 2 * math.pi and c.r2.max() > 2.5
        assert c.r3.min() >= 0 and c.r3.max() <= 2
        assert c.r4.min() >= 0 and c.r4.max() <= 1
        strict = ops.draw_sca_controls(RngStream(1), (2000,), 1.0, "strict")
        assert strict.r2.max() <= 2.0


def _pop(fitness, dim=2):
    f = np.asarray(fitness, dtype=float)
    X = np.repeat(f[:, None], dim, axis=1)
    return Population.from_arrays(X, f)


class TestElitism:
    def test_worst_two_replaced(self):
        pop = _pop([3.0, 4.0, 5.0, 6.0])
        elites = [Candidate(np.full(2, 0.5), 0.5), Candidate(np.full(2, 1.0), 1.0)]
        out = ops.elitism_replace(pop, elites)
        assert list(out.fitness()) == [0.5, 1.0, 3.0, 4.0]

    def test_idempotent_when_elites_present(self):
        pop = _pop([1.0, 2.0, 3.0, 4.0])
        elites = [Candidate(m.position.copy(), m.fitness) for m in pop.members[:2]]
        out = ops.elitism_replace(pop, elites)
        np.testing.assert_array_equal(out.positions(), pop.positions())
        np.testing.assert_array_equal(out.fitness(), pop.fitness())

    def test_too_many_elites(self):
        with pytest.raises(ConfigurationError):
            ops.elitism_replace(_pop([1.0]), [Candidate(np.zeros(2), 0.0)] * 2)

    @given(st.lists(st.floats(-100, 100), min_size=3, max_size=12), st.lists(st.floats(-100, 100), min_size=2, max_size=2))
    def test_best_never_worsens(self, after, before_best):
        before_best = sorted(before_best)
        pop = _pop(sorted(after))
        elites = [Candidate(np.full(2, 1000.0 + i), v) for i, v in enumerate(before_best)]
        out = ops.elitism_replace(pop, elites)
        assert out.fitness().min() <= min(before_best[0], min(after))
        assert np.all(np.diff(out.fitness()) >= 0)
