"""Projected gradient ascent for smooth concave objectives over a box.

Small and dependency-free on purpose: the slot problems have one variable per
user, so plain Python floats are much faster than numpy for them.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

ValueAndGrad = Callable[[list], tuple]


@dataclass
class BoxSolution:
    x: list
    value: float
    iterations: int
    converged: bool


def _clip(x: Sequence[float], lo: Sequence[float], hi: Sequence[float]) -> list:
    return [min(max(xi, l), h) for xi, l, h in zip(x, lo, hi)]


def stationarity(x, g, lo, hi, scale: float) -> float:
    """Largest relative objective change available along a free box direction.

    Each coordinate is rescaled to the unit interval; a value of zero means
    ``x`` satisfies the KKT conditions of the box problem.
    """
    worst = 0.0
    for xi, gi, l, h in zip(x, g, lo, hi):
        w = h - l
        if w <= 0.0:
            continue
        z = (xi - l) / w
        zt = min(max(z + gi * w / scale, 0.0), 1.0)
        worst = max(worst, abs(zt - z))
    return worst


def maximize_box(
    fun: ValueAndGrad,
    x0: Sequence[float],
    lower: Sequence[float],
    upper: Sequence[float],
    *,
    max_iter: int = 10_000,
    pg_tol: float = 1e-8,
    rel_tol: float = 1e-10,
    armijo: float = 1e-4,
) -> BoxSolution:
    """Maximize a concave ``fun`` over ``lower <= x <= upper``.

    ``fun(x)`` returns ``(value, gradient)``. Steps are projected onto the box
    and accepted under an Armijo condition with step halving; the step length
    doubles after every accepted step. Stops when the scaled projected
    gradient drops to ``pg_tol`` or one iteration improves the objective by
    less than ``rel_tol`` relative. ``converged`` is False when ``max_iter``
    is hit first.
    """
    lo = [float(v) for v in lower]
    hi = [float(v) for v in upper]
    if any(h < l for l, h in zip(lo, hi)):
        raise ValueError("empty box")
    x = _clip([float(v) for v in x0], lo, hi)
    f, g = fun(x)
    widths = [h - l for l, h in zip(lo, hi)]
    gscale = sum(abs(gi) * w for gi, w in zip(g, widths))
    scale = max(abs(f), gscale, 1e-300)
    if stationarity(x, g, lo, hi, scale) <= pg_tol:
        return BoxSolution(x, f, 0, True)

    gmax = max(abs(gi) for gi in g)
    step = max(widths) / gmax if gmax > 0 else 1.0
    for it in range(1, max_iter + 1):
        while True:
            x_new = _clip([xi + step * gi for xi, gi in zip(x, g)], lo, hi)
            moved = sum(gi * (xn - xi) for gi, xn, xi in zip(g, x_new, x))
            if x_new == x or moved <= 0.0:
                return BoxSolution(x, f, it, True)
            f_new, g_new = fun(x_new)
            if f_new >= f + armijo * moved:
                break
            step *= 0.5
        gain = f_new - f
        x, f, g = x_new, f_new, g_new
        scale = max(abs(f), gscale, 1e-300)
        if gain <= rel_tol * abs(f) or stationarity(x, g, lo, hi, scale) <= pg_tol:
            return BoxSolution(x, f, it, True)
        step *= 2.0
    return BoxSolution(x, f, max_iter, False)
