"""Per-slot drift-plus-penalty maximization.

Each slot maximizes

    sum_n Q_n (R_n tau - A_n) + V sum_n (R_n tau - eta P_n tau)

over the CPU frequencies ``f`` and transmit powers ``p``, where ``R_n`` is the
local plus secure offloading rate and ``P_n = kappa f^3 + zeta p + p_r``. The
frequency step has a closed form; the power step is a successive convex
approximation (SCA) that lower-bounds each ``-ln x`` term by
``-y x + ln y + 1`` and solves the resulting concave box problem.

Internally the SIC partial sums are normalized by the noise power, so every
log term is ``ln(1 + small)`` and stays accurate; the auxiliaries exposed in
:class:`ScaAuxiliaries` are in physical units (1/W).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Optional, Sequence

import numpy as np

from .model import (
    LN2,
    ChannelState,
    SystemParams,
    local_power,
    local_rate,
    offload_power,
    secrecy_rates,
)
from .solver import maximize_box

FEAS_TOL = 1e-9
# budget left over from rounding, relative to p_max, counts as none
BUDGET_EPS = 1e-12


@dataclass(frozen=True)
class SlotState:
    queues: np.ndarray
    arrivals: np.ndarray
    channel: ChannelState
    ee_ratio: float
    params: SystemParams
    # False models an eavesdropper that cancels every other user's signal.
    eve_interference: bool = True

    def __post_init__(self) -> None:
        q = np.asarray(self.queues, dtype=float)
        a = np.asarray(self.arrivals, dtype=float)
        n = self.channel.num_users
        if q.shape != (n,) or a.shape != (n,):
            raise ValueError(f"queues and arrivals must have shape ({n},)")
        if np.any(q < 0) or np.any(a < 0):
            raise ValueError("queues and arrivals must be non-negative")
        if not self.ee_ratio >= 0:
            raise ValueError(f"ee_ratio must be >= 0, got {self.ee_ratio}")
        object.__setattr__(self, "queues", q)
        object.__setattr__(self, "arrivals", a)

    @property
    def num_users(self) -> int:
        return self.channel.num_users


@dataclass(frozen=True)
class SlotDecision:
    cpu_freq: np.ndarray
    tx_power: np.ndarray
    flags: frozenset = frozenset()
    # smooth P2 objective after each outer alternation (solve_slot only)
    history: tuple = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "cpu_freq", np.asarray(self.cpu_freq, dtype=float))
        object.__setattr__(self, "tx_power", np.asarray(self.tx_power, dtype=float))

    @classmethod
    def idle(cls, n: int, flags=frozenset()) -> "SlotDecision":
        return cls(np.zeros(n), np.zeros(n), frozenset(flags))


@dataclass(frozen=True)
class EeAccumulator:
    sum_bits: float = 0.0
    sum_energy: float = 0.0

    @property
    def ratio(self) -> float:
        # no energy spent yet: start the running ratio at zero
        return self.sum_bits / self.sum_energy if self.sum_energy > 0 else 0.0


def ee_ratio_update(acc: EeAccumulator, R_tot: float, P_tot: float, tau: float):
    """Add one slot to the running bits-per-Joule ratio."""
    if R_tot < 0 or P_tot < 0:
        raise ValueError("rate and power must be non-negative")
    new = EeAccumulator(acc.sum_bits + R_tot * tau, acc.sum_energy + P_tot * tau)
    return new, new.ratio


@dataclass(frozen=True)
class ScaAuxiliaries:
    y_b: np.ndarray
    y_e: np.ndarray


# ---------------------------------------------------------------------------
# objective evaluation


def is_feasible(params: SystemParams, f, p, tol: float = FEAS_TOL) -> bool:
    f = np.asarray(f, dtype=float)
    p = np.asarray(p, dtype=float)
    if np.any(f < 0) or np.any(f > params.f_max * (1 + 1e-12)) or np.any(p < 0):
        return False
    used = local_power(f, params.kappa) + offload_power(p, params)
    return bool(np.all(used <= params.p_max + tol))


def slot_rates(state: SlotState, decision: SlotDecision):
    """Realized per-user (local rate, clipped secure offloading rate)."""
    pr = state.params
    r_loc = local_rate(decision.cpu_freq, pr.cycles_per_bit)
    r_off = secrecy_rates(decision.tx_power, state.channel, pr, state.eve_interference)
    return r_loc, r_off


def drift_penalty_objective(state: SlotState, decision: SlotDecision) -> float:
    """Per-slot drift-plus-penalty value of a feasible decision (clipped rates)."""
    pr = state.params
    if not is_feasible(pr, decision.cpu_freq, decision.tx_power):
        raise ValueError("infeasible slot decision")
    tau, V = pr.slot_duration, pr.lyapunov_v
    r_loc, r_off = slot_rates(state, decision)
    r_tot = r_loc + r_off
    p_tot = local_power(decision.cpu_freq, pr.kappa) + offload_power(decision.tx_power, pr)
    drift = np.sum(state.queues * (r_tot * tau - state.arrivals))
    penalty = V * np.sum(r_tot * tau - state.ee_ratio * p_tot * tau)
    return float(drift + penalty)


def idle_objective(state: SlotState) -> float:
    """Objective of the all-zero decision: the baseline every policy can reach."""
    return drift_penalty_objective(state, SlotDecision.idle(state.num_users))


# ---------------------------------------------------------------------------
# CPU frequency step


def cpu_frequency_cap(params: SystemParams, p: float) -> float:
    """Highest frequency the per-user power budget allows at transmit power ``p``.

    Returns -1.0 when ``p`` alone already exceeds the budget.
    """
    left = params.p_max - params.amp_coeff * p - params.circuit_power
    if left < -FEAS_TOL:
        return -1.0
    if left <= BUDGET_EPS * params.p_max:
        return 0.0
    return min(params.f_max, (left / params.kappa) ** (1.0 / 3.0))


def optimal_cpu_frequency(state: SlotState, p_n: float, n: int) -> float:
    """Maximizer of ``(Q+V) tau f / C - V eta tau kappa f^3`` on the budget interval."""
    pr = state.params
    cap = cpu_frequency_cap(pr, p_n)
    if cap <= 0.0:
        return 0.0
    return _unclamped_frequency(pr, float(state.queues[n]), state.ee_ratio, cap)


def _unclamped_frequency(pr: SystemParams, q: float, eta: float, cap: float) -> float:
    V = pr.lyapunov_v
    denom = 3.0 * V * eta * pr.kappa * pr.cycles_per_bit
    if denom <= 0.0:
        # no energy price: the rate term is non-decreasing in f
        return cap if V + q > 0 else 0.0
    return min(math.sqrt((V + q) / denom), cap)


def local_objective(state: SlotState, f: float, n: int) -> float:
    """Frequency-dependent part of the slot objective for user ``n``."""
    pr = state.params
    V, tau = pr.lyapunov_v, pr.slot_duration
    q = float(state.queues[n])
    return (q + V) * tau * f / pr.cycles_per_bit - V * state.ee_ratio * tau * pr.kappa * f**3


# ---------------------------------------------------------------------------
# power step


class _PowerProblem:
    """Power-dependent part of the slot objective, in decode order.

    Holds noise-normalized gains and per-user rate weights so the smooth
    objective, the SCA surrogate and their gradients run on plain floats.
    """

    def __init__(self, state: SlotState):
        pr = state.params
        self.order = [int(i) for i in state.channel.decode_order]
        s2 = pr.noise_power
        self.hb = [float(state.channel.gain_to_mec[i]) / s2 for i in self.order]
        self.he = [float(state.channel.gain_to_eve[i]) / s2 for i in self.order]
        k = pr.slot_duration * pr.bandwidth / LN2
        self.w = [(float(state.queues[i]) + pr.lyapunov_v) * k for i in self.order]
        self.c = pr.lyapunov_v * state.ee_ratio * pr.slot_duration * pr.amp_coeff
        self.eve_int = state.eve_interference
        self.n = len(self.order)
        # normalization for reported surrogate values
        self.scale = max(max(self.w), 1e-300)

    def to_sorted(self, v) -> list:
        return [float(v[i]) for i in self.order]

    def to_original(self, v) -> np.ndarray:
        out = np.empty(self.n)
        out[self.order] = v
        return out

    def sums(self, p):
        """Normalized SIC sums: (sb, sb_prev, se, se_prev) per decode position."""
        sb, sbp, se, sep = [], [], [], []
        acc_b = acc_e = 1.0
        for k in range(self.n):
            sbp.append(acc_b)
            acc_b += p[k] * self.hb[k]
            sb.append(acc_b)
            if self.eve_int:
                sep.append(acc_e)
                acc_e += p[k] * self.he[k]
                se.append(acc_e)
            else:
                sep.append(1.0)
                se.append(1.0 + p[k] * self.he[k])
        return sb, sbp, se, sep

    def smooth_rates(self, p) -> list:
        """Unclipped secrecy rate per decode position, in nats per unit weight."""
        sb, sbp, se, sep = self.sums(p)
        return [math.log(sb[k] / sbp[k]) - math.log(se[k] / sep[k]) for k in range(self.n)]

    def true_value(self, p) -> float:
        rates = self.smooth_rates(p)
        return sum(w * r for w, r in zip(self.w, rates)) - self.c * sum(p)

    def true_value_grad(self, p):
        sb, sbp, se, sep = self.sums(p)
        val = -self.c * sum(p)
        for k in range(self.n):
            val += self.w[k] * (math.log(sb[k] / sbp[k]) - math.log(se[k] / sep[k]))
        grad = []
        for v in range(self.n):
            g = -self.c
            for k in range(v, self.n):
                g += self.w[k] * self.hb[v] / sb[k]
                if k > v:
                    g -= self.w[k] * self.hb[v] / sbp[k]
                if self.eve_int:
                    g -= self.w[k] * self.he[v] / se[k]
                    if k > v:
                        g += self.w[k] * self.he[v] / sep[k]
            if not self.eve_int:
                g -= self.w[v] * self.he[v] / se[v]
            grad.append(g)
        return val, grad

    def tight_aux(self, p):
        """Normalized auxiliaries at which the surrogate touches the true objective."""
        _, sbp, se, _ = self.sums(p)
        return [1.0 / x for x in sbp], [1.0 / x for x in se]

    def surrogate_value_grad(self, p, yb, ye):
        sb, sbp, se, sep = self.sums(p)
        val = -self.c * sum(p)
        for k in range(self.n):
            val += self.w[k] * (
                math.log(sb[k])
                - yb[k] * sbp[k] + math.log(yb[k]) + 1.0
                - ye[k] * se[k] + math.log(ye[k]) + 1.0
                + math.log(sep[k])
            )
        # suffix sums make the gradient O(N)
        n = self.n
        a = [0.0] * (n + 1)
        b = [0.0] * (n + 1)
        e = [0.0] * (n + 1)
        fsum = [0.0] * (n + 1)
        for k in range(n - 1, -1, -1):
            a[k] = a[k + 1] + self.w[k] / sb[k]
            b[k] = b[k + 1] + self.w[k] * yb[k]
            e[k] = e[k + 1] + self.w[k] * ye[k]
            fsum[k] = fsum[k + 1] + self.w[k] / sep[k]
        grad = []
        for v in range(n):
            g = self.hb[v] * (a[v] - b[v + 1]) - self.c
            if self.eve_int:
                g += self.he[v] * (fsum[v + 1] - e[v])
            else:
                g -= self.he[v] * self.w[v] * ye[v]
            grad.append(g)
        return val, grad


def power_caps(params: SystemParams, f) -> list:
    """Upper ends of the transmit-power box given the CPU frequencies."""
    caps = []
    for fi in f:
        left = params.p_max - params.circuit_power - params.kappa * fi**3
        caps.append(left / params.amp_coeff if left > BUDGET_EPS * params.p_max else 0.0)
    return caps


def lemma1_bound(x: float, y: float) -> float:
    """``-y x + ln y + 1``, a lower bound on ``-ln x`` that is tight at ``y = 1/x``."""
    if x <= 0 or y <= 0:
        raise ValueError("lemma1_bound needs x > 0 and y > 0")
    return -y * x + math.log(y) + 1.0


@dataclass
class ScaResult:
    power: np.ndarray
    aux: ScaAuxiliaries
    # normalized surrogate value after each power update
    surrogate_history: list = field(default_factory=list)
    # (surrogate, true) normalized pairs right after each auxiliary update
    tightness: list = field(default_factory=list)
    iterations: int = 0
    converged: bool = True


def sca_power_allocation(
    state: SlotState,
    f: Sequence[float],
    init_p: Sequence[float],
    *,
    max_iter: int = 200,
    tol: float = 1e-10,
    _problem: Optional[_PowerProblem] = None,
) -> ScaResult:
    """Transmit powers maximizing the smooth slot objective for fixed ``f``.

    Alternates the tight auxiliary update ``y = 1/x`` with a projected
    gradient solve of the concave surrogate, warm-started at the current
    powers so the surrogate value never decreases.
    """
    prob = _problem or _PowerProblem(state)
    hi = prob.to_sorted(power_caps(state.params, f))
    lo = [0.0] * prob.n
    p = [min(max(float(v), 0.0), h) for v, h in zip(prob.to_sorted(init_p), hi)]
    res = ScaResult(power=prob.to_original(p), aux=None)
    if all(h <= 0.0 for h in hi):
        yb, ye = prob.tight_aux(p)
        res.aux = _physical_aux(prob, state, yb, ye)
        return res

    prev = None
    for it in range(1, max_iter + 1):
        yb, ye = prob.tight_aux(p)
        s_val, _ = prob.surrogate_value_grad(p, yb, ye)
        res.tightness.append((s_val / prob.scale, prob.true_value(p) / prob.scale))

        sol = maximize_box(lambda x: prob.surrogate_value_grad(x, yb, ye), p, lo, hi)
        if not sol.converged:
            res.converged = False
        p = sol.x
        cur = sol.value / prob.scale
        res.surrogate_history.append(cur)
        res.iterations = it
        if prev is not None and cur - prev <= tol * max(1.0, abs(cur)):
            break
        prev = cur
    else:
        res.converged = False

    yb, ye = prob.tight_aux(p)
    res.power = prob.to_original(p)
    res.aux = _physical_aux(prob, state, yb, ye)
    return res


def _physical_aux(prob: _PowerProblem, state: SlotState, yb, ye) -> ScaAuxiliaries:
    s2 = state.params.noise_power
    return ScaAuxiliaries(prob.to_original([y / s2 for y in yb]), prob.to_original([y / s2 for y in ye]))


def surrogate_objective(state: SlotState, f, p, aux: ScaAuxiliaries) -> float:
    """Full SCA surrogate of the slot objective at fixed auxiliaries (bits scale)."""
    prob = _PowerProblem(state)
    s2 = state.params.noise_power
    yb = prob.to_sorted(np.asarray(aux.y_b) * s2)
    ye = prob.to_sorted(np.asarray(aux.y_e) * s2)
    val, _ = prob.surrogate_value_grad(prob.to_sorted(p), yb, ye)
    return val + _constant_terms(state, f)


def smooth_objective(state: SlotState, f, p) -> float:
    """Slot objective with the unclipped secrecy rates (bits scale)."""
    prob = _PowerProblem(state)
    return prob.true_value(prob.to_sorted(p)) + _constant_terms(state, f)


def _constant_terms(state: SlotState, f) -> float:
    """Everything in the slot objective that does not depend on the powers."""
    pr = state.params
    V, tau = pr.lyapunov_v, pr.slot_duration
    total = sum(local_objective(state, float(fi), n) for n, fi in enumerate(f))
    total -= V * state.ee_ratio * tau * pr.circuit_power * state.num_users
    total -= float(np.dot(state.queues, state.arrivals))
    return total


# ---------------------------------------------------------------------------
# two-user closed form


@dataclass
class ClosedFormResult:
    power: np.ndarray
    # "ok", "clamped", "no_feasible_root", "discriminant", "nonpositive_a1",
    # "zero_budget" or "unsupported"
    status: str
    roots: tuple = ()


def two_user_closed_form(state: SlotState, f, aux: ScaAuxiliaries) -> ClosedFormResult:
    """Stationary point of the two-user SCA surrogate from the quadratic in p1.

    User 1 is the first decoded (weaker) user. The quadratic's coefficients
    follow the textbook derivation with ``B / ln 2`` rate scaling and linear
    power gains. Each root is clamped to user 1's power box and paired with
    the stronger user's best response p2, itself clamped; a pair whose root
    was already in the box beats a clamped one, then the larger surrogate
    value wins. When
    the quadratic has no real root or its leading coefficient vanishes, the
    numeric solver result is returned with a non-"ok" status.
    """
    if state.num_users != 2:
        raise ValueError("the closed form covers exactly two users")
    pr = state.params
    caps = power_caps(pr, f)
    i1, i2 = (int(i) for i in state.channel.decode_order)
    if caps[i1] <= 0 and caps[i2] <= 0:
        return ClosedFormResult(np.zeros(2), "zero_budget")
    if not state.eve_interference:
        return ClosedFormResult(_numeric_surrogate_max(state, f, aux), "unsupported")

    V, eta, zeta = pr.lyapunov_v, state.ee_ratio, pr.amp_coeff
    kb = pr.bandwidth / LN2
    s2 = pr.noise_power
    hb1, hb2 = _gain(state, i1, "b"), _gain(state, i2, "b")
    he1, he2 = _gain(state, i1, "e"), _gain(state, i2, "e")
    v1 = V + float(state.queues[i1])
    v2 = V + float(state.queues[i2])
    yb2 = float(aux.y_b[i2])
    ye1, ye2 = float(aux.y_e[i1]), float(aux.y_e[i2])

    price = V * eta * zeta / kb
    inner2 = price / v2 + ye2 * he2
    a1 = price + v2 * (yb2 * hb1 + ye2 * he1) + v1 * ye1 * he1 - v2 * hb1 * inner2 / hb2
    if a1 <= 0:
        return ClosedFormResult(_numeric_surrogate_max(state, f, aux), "nonpositive_a1")
    u1 = s2 / hb1
    u2 = s2 / he1
    b1 = u1 + u2 - v1 / a1 - v2 / a1
    b2 = u2 * u1 - v2 / a1 * u1 - v1 / a1 * u2
    disc = b1 * b1 - 4.0 * b2
    if disc < 0:
        return ClosedFormResult(_numeric_surrogate_max(state, f, aux), "discriminant")
    sq = math.sqrt(disc)
    roots = ((-b1 + sq) / 2.0, (-b1 - sq) / 2.0)

    best = None
    for p1 in roots:
        feasible = 0.0 <= p1 <= caps[i1]
        p1 = min(max(p1, 0.0), caps[i1])
        # best response of the stronger user to p1
        p2 = 1.0 / inner2 - p1 * hb1 / hb2 - s2 / hb2
        cand = np.zeros(2)
        cand[i1] = p1
        cand[i2] = min(max(p2, 0.0), caps[i2])
        val = surrogate_objective(state, f, cand, aux)
        key = (feasible, val)
        if best is None or key > best[0]:
            best = (key, cand)
    status = "ok" if best[0][0] else "clamped"
    return ClosedFormResult(best[1], status, roots)


def _gain(state: SlotState, i: int, rx: str) -> float:
    ch = state.channel
    return float(ch.gain_to_mec[i] if rx == "b" else ch.gain_to_eve[i])


def _numeric_surrogate_max(state: SlotState, f, aux: ScaAuxiliaries, start=None) -> np.ndarray:
    prob = _PowerProblem(state)
    s2 = state.params.noise_power
    yb = prob.to_sorted(np.asarray(aux.y_b) * s2)
    ye = prob.to_sorted(np.asarray(aux.y_e) * s2)
    hi = prob.to_sorted(power_caps(state.params, f))
    x0 = [0.0] * prob.n if start is None else prob.to_sorted(start)
    sol = maximize_box(lambda x: prob.surrogate_value_grad(x, yb, ye), x0, [0.0] * prob.n, hi)
    return prob.to_original(sol.x)


def numeric_surrogate_max(state: SlotState, f, aux: ScaAuxiliaries, start=None) -> np.ndarray:
    """Numeric maximizer of the SCA surrogate at fixed auxiliaries."""
    return _numeric_surrogate_max(state, f, aux, start)


# ---------------------------------------------------------------------------
# full slot solve


def solve_slot(
    state: SlotState,
    init_power: Optional[Sequence[float]] = None,
    *,
    allow_local: bool = True,
    max_outer: int = 50,
    tol: float = 1e-6,
) -> SlotDecision:
    """Alternate the closed-form frequency step and the SCA power step.

    Runs from the warm-start powers (previous slot) and from zero powers and
    keeps the better end point, since the shared power budget can pin a
    block-coordinate ascent to one corner. Users whose optimized secrecy rate
    is negative get their power zeroed when that raises the objective.
    ``allow_local=False`` forces every CPU frequency to zero.
    """
    n = state.num_users
    prob = _PowerProblem(state)
    starts = [[0.0] * n]
    if init_power is not None and any(float(v) > 0 for v in init_power):
        starts.insert(0, [float(v) for v in init_power])

    best = None
    for p0 in starts:
        cand = _alternate(state, prob, p0, allow_local, max_outer, tol)
        if best is None or cand[2] > best[2]:
            best = cand
    f, p, _, history, flags = best

    rates = prob.smooth_rates(prob.to_sorted(p))
    negative = [prob.order[k] for k, r in enumerate(rates) if r < 0]
    decision = SlotDecision(f, p, frozenset(flags), tuple(history))
    if negative:
        p0 = p.copy()
        p0[negative] = 0.0
        f0 = _frequencies(state, p0, allow_local)
        zeroed = SlotDecision(f0, p0, frozenset(flags | {"zeroed_negative_rate"}), tuple(history))
        if drift_penalty_objective(state, zeroed) >= drift_penalty_objective(state, decision):
            decision = zeroed
    return decision


def _frequencies(state: SlotState, p, allow_local: bool) -> np.ndarray:
    if not allow_local:
        return np.zeros(state.num_users)
    return np.array([optimal_cpu_frequency(state, float(p[i]), i) for i in range(state.num_users)])


def _alternate(state, prob, p0, allow_local, max_outer, tol):
    flags = set()
    pr = state.params
    caps0 = power_caps(pr, [0.0] * state.num_users)
    p = np.array([min(max(v, 0.0), c) for v, c in zip(p0, caps0)])
    f = _frequencies(state, p, allow_local)
    obj = prob.true_value(prob.to_sorted(p)) + _constant_terms(state, f)
    history = [obj]
    for _ in range(max_outer):
        sca = sca_power_allocation(state, f, p, _problem=prob)
        if not sca.converged:
            flags.add("sca_not_converged")
        p = sca.power
        f = _frequencies(state, p, allow_local)
        new = prob.true_value(prob.to_sorted(p)) + _constant_terms(state, f)
        history.append(new)
        if abs(new - obj) <= tol * max(abs(new), 1e-300):
            break
        obj = new
    else:
        flags.add("outer_not_converged")
    if any(cpu_frequency_cap(pr, float(v)) < 0 for v in p):
        flags.add("budget_exhausted")
    return f, p, history[-1], history, flags


# ---------------------------------------------------------------------------
# brute-force verification oracle


def brute_force_slot_oracle(state: SlotState, grid_points: int = 100, *, allow_local: bool = True):
    """Exhaustive grid maximum of the slot objective (N <= 3).

    Frequencies range over ``[0, f_max]`` and powers over
    ``[0, (P_max - p_r) / zeta]``, both with ``grid_points`` values. The
    objective separates into per-user frequency terms plus a power term, so
    for each power grid point the best budget-feasible frequency grid point
    is taken from a prefix maximum; the result is the exact maximum over the
    full product grid. Ties go to the lowest grid index.
    """
    n = state.num_users
    if n > 3:
        raise ValueError("brute-force oracle supports at most 3 users")
    pr = state.params
    G = int(grid_points)
    V, tau, eta = pr.lyapunov_v, pr.slot_duration, state.ee_ratio
    p_grid = np.linspace(0.0, pr.max_tx_power, G)
    f_grid = np.linspace(0.0, pr.f_max, G) if allow_local else np.zeros(1)

    # best feasible local term for each (user, power grid index)
    budget = pr.p_max - pr.circuit_power - pr.amp_coeff * p_grid
    f_power = pr.kappa * f_grid**3
    n_ok = np.searchsorted(f_power, budget + FEAS_TOL, side="right")
    local_best = np.empty((n, G))
    local_arg = np.zeros((n, G), dtype=int)
    for u in range(n):
        q = float(state.queues[u])
        vals = (q + V) * tau * f_grid / pr.cycles_per_bit - V * eta * tau * f_power
        run_arg = np.zeros(len(vals), dtype=int)
        best_i = 0
        for i in range(len(vals)):
            if vals[i] > vals[best_i]:
                best_i = i
            run_arg[i] = best_i
        ok = n_ok > 0
        idx = np.where(ok, n_ok - 1, 0)
        local_arg[u] = run_arg[idx]
        local_best[u] = np.where(ok, vals[run_arg[idx]], -np.inf)

    mesh = np.stack(np.meshgrid(*([p_grid] * n), indexing="ij"), axis=-1).reshape(-1, n)
    idx = np.stack(np.meshgrid(*([np.arange(G)] * n), indexing="ij"), axis=-1).reshape(-1, n)
    r_off = secrecy_rates(mesh, state.channel, pr, state.eve_interference)
    weights = state.queues + V
    total = (r_off * tau * weights).sum(axis=1) - V * eta * tau * pr.amp_coeff * mesh.sum(axis=1)
    for u in range(n):
        total = total + local_best[u][idx[:, u]]
    k = int(np.argmax(total))
    p = mesh[k]
    f = np.array([f_grid[local_arg[u][idx[k, u]]] for u in range(n)])
    decision = SlotDecision(f, p, frozenset({"oracle"}))
    return decision, drift_penalty_objective(state, decision)


def with_eve_model(state: SlotState, eve_interference: bool) -> SlotState:
    return replace(state, eve_interference=eve_interference)
