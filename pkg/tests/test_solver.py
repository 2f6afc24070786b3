import math

import numpy as np
import pytest

from noma_mec.solver import maximize_box


def neg_quadratic(c):
    def fun(x):
        val = -sum((xi - ci) ** 2 for xi, ci in zip(x, c))
        return val, [-2 * (xi - ci) for xi, ci in zip(x, c)]

    return fun


def test_interior_maximizer():
    c = [0.3, 1.2, 0.7]
    sol = maximize_box(neg_quadratic(c), [0, 0, 0], [0, 0, 0], [2, 2, 2])
    assert sol.converged
    np.testing.assert_allclose(sol.x, c, atol=1e-6)


def test_maximizer_outside_box_is_projected():
    c = [-1.0, 3.0, 0.5]
    sol = maximize_box(neg_quadratic(c), [1, 1, 1], [0, 0, 0], [2, 2, 2])
    np.testing.assert_allclose(sol.x, [0.0, 2.0, 0.5], atol=1e-6)


def test_degenerate_box():
    sol = maximize_box(neg_quadratic([1.0]), [0.5], [0.0], [0.0])
    assert sol.x == [0.0]


def test_empty_box_rejected():
    with pytest.raises(ValueError):
        maximize_box(neg_quadratic([1.0]), [0.0], [1.0], [0.0])


def test_log_sum_matches_grid():
    rng = np.random.default_rng(3)
    for _ in range(10):
        a = rng.uniform(0.5, 2.0, 2)
        b = rng.uniform(0.5, 5.0, 2)
        c = rng.uniform(0.2, 1.5)
        hi = [2.0, 2.0]

        def fun(x):
            s = 1 + x[0] + x[1]
            val = sum(ai * math.log(1 + bi * xi) for ai, bi, xi in zip(a, b, x)) + math.log(s) - c * (x[0] + x[1])
            grad = [ai * bi / (1 + bi * xi) + 1 / s - c for ai, bi, xi in zip(a, b, x)]
            return val, grad

        sol = maximize_box(fun, [0.0, 0.0], [0, 0], hi)
        g = np.linspace(0, 2, 801)
        X, Y = np.meshgrid(g, g, indexing="ij")
        F = a[0] * np.log(1 + b[0] * X) + a[1] * np.log(1 + b[1] * Y) + np.log(1 + X + Y) - c * (X + Y)
        # the solver may only beat the grid, never lose by more than the grid's own discretization error
        assert sol.value >= F.max() - 1e-6


def test_iteration_cap_reports_non_convergence():
    def stiff(x):
        val = -((x[0] - 0.5) ** 2) - 1e-4 * (x[1] - 0.9) ** 2
        return val, [-2 * (x[0] - 0.5), -2e-4 * (x[1] - 0.9)]

    sol = maximize_box(stiff, [0, 0], [0, 0], [1, 1], max_iter=2, pg_tol=0, rel_tol=0)
    assert not sol.converged
    assert sol.iterations == 2
