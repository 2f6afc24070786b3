"""Episode driver, Monte-Carlo averaging and parameter sweeps."""

from __future__ import annotations

import logging
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Iterator, Optional, Sequence

import numpy as np

from .model import (
    DEFAULT_GEOMETRY,
    ChannelState,
    SystemParams,
    UserGeometry,
    path_loss_gain,
    sample_fading,
    user_power,
)
from .optimizer import EeAccumulator, SlotState, ee_ratio_update, slot_rates
from .queueing import ArrivalModel, queue_update, sample_arrival
from .schemes import ALL_SCHEMES, SchemeId, decide, scheme_state

log = logging.getLogger(__name__)

SWEEP_PARAMS = ("task_length", "eve_distance", "p_max")


@dataclass(frozen=True)
class Sweep:
    """One swept parameter.

    ``task_length`` values are mean task sizes in bits (the arrival support
    is scaled to hit each mean), ``eve_distance`` values scale every user's
    distance to the eavesdropper, ``p_max`` values are power caps in Watts.
    """

    param: str
    values: tuple

    def __post_init__(self) -> None:
        if self.param not in SWEEP_PARAMS:
            raise ValueError(f"unknown sweep parameter {self.param!r}; expected one of {SWEEP_PARAMS}")
        vals = tuple(float(v) for v in self.values)
        if not vals or any(not v > 0 for v in vals):
            raise ValueError("sweep values must be a non-empty list of positive numbers")
        object.__setattr__(self, "values", vals)


@dataclass(frozen=True)
class SimConfig:
    params: SystemParams = field(default_factory=SystemParams)
    geometry: tuple = DEFAULT_GEOMETRY
    arrival: ArrivalModel = field(default_factory=ArrivalModel)
    num_slots: int = 1000
    num_realizations: int = 1000
    seed: int = 0
    schemes: tuple = ALL_SCHEMES
    sweep: Optional[Sweep] = None
    initial_queue: float = 0.0

    def __post_init__(self) -> None:
        geometry = tuple(self.geometry)
        if not geometry:
            raise ValueError("need at least one user")
        for g in geometry:
            g.validate(self.params)
        if self.num_slots < 1 or self.num_realizations < 1:
            raise ValueError("num_slots and num_realizations must be >= 1")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be an unsigned 64-bit integer")
        schemes = tuple(SchemeId(s) for s in self.schemes)
        if not schemes:
            raise ValueError("need at least one scheme")
        object.__setattr__(self, "geometry", geometry)
        object.__setattr__(self, "schemes", schemes)

    @property
    def num_users(self) -> int:
        return len(self.geometry)

    def at_sweep_value(self, value: float) -> "SimConfig":
        """Copy of the config with the sweep parameter set to ``value``."""
        if self.sweep is None:
            return self
        if self.sweep.param == "task_length":
            return replace(self, arrival=self.arrival.scaled(value / self.arrival.mean))
        if self.sweep.param == "eve_distance":
            geo = tuple(UserGeometry(g.dist_to_mec, g.dist_to_eve * value) for g in self.geometry)
            return replace(self, geometry=geo)
        return replace(self, params=replace(self.params, p_max=value))


@dataclass(frozen=True)
class TraceRecord:
    slot: int
    realization: int
    cpu_freq: tuple
    tx_power: tuple
    local_rate: tuple
    offload_rate: tuple
    queue: tuple
    arrival: tuple
    total_rate: float
    total_power: float
    ee_ratio: float
    effective_throughput: float


@dataclass
class EpisodeTrace:
    """Per-slot outcome arrays of one episode; rows are slots.

    ``queue`` is the backlog at the start of each slot and ``ee_ratio`` the
    running bits-per-Joule ratio after the slot has been accounted.
    """

    realization: int
    scheme: SchemeId
    tau: float
    cpu_freq: np.ndarray
    tx_power: np.ndarray
    local_rate: np.ndarray
    offload_rate: np.ndarray
    queue: np.ndarray
    arrival: np.ndarray
    total_rate: np.ndarray
    total_power: np.ndarray
    ee_ratio: np.ndarray
    effective_throughput: np.ndarray
    final_queue: np.ndarray
    flags: list

    @property
    def num_slots(self) -> int:
        return len(self.total_rate)

    @property
    def energy_efficiency(self) -> float:
        return float(self.ee_ratio[-1])

    def records(self) -> Iterator[TraceRecord]:
        for t in range(self.num_slots):
            yield TraceRecord(
                t + 1,
                self.realization,
                tuple(self.cpu_freq[t]),
                tuple(self.tx_power[t]),
                tuple(self.local_rate[t]),
                tuple(self.offload_rate[t]),
                tuple(self.queue[t]),
                tuple(self.arrival[t]),
                float(self.total_rate[t]),
                float(self.total_power[t]),
                float(self.ee_ratio[t]),
                float(self.effective_throughput[t]),
            )


def realization_rng(seed: int, realization: int, sweep_index: int = 0) -> np.random.Generator:
    # Independent of the scheme: every scheme sees the same channels and arrivals.
    return np.random.default_rng(np.random.SeedSequence([seed, sweep_index, realization]))


def run_episode(
    config: SimConfig,
    realization: int = 0,
    scheme: Optional[SchemeId] = None,
    sweep_index: int = 0,
    *,
    arrivals: Optional[np.ndarray] = None,
) -> EpisodeTrace:
    """Simulate one realization for ``num_slots`` slots.

    Fading and arrivals for the whole episode are drawn up front in a fixed
    order, so a (seed, realization, sweep index) triple fixes every random
    input regardless of the scheme. ``arrivals`` overrides the drawn task
    sizes (shape ``(T, N)``).
    """
    scheme = SchemeId(scheme or config.schemes[0])
    pr = config.params
    T, N = config.num_slots, config.num_users
    rng = realization_rng(config.seed, realization, sweep_index)
    fade_b = sample_fading(rng, (T, N))
    fade_e = sample_fading(rng, (T, N))
    drawn = sample_arrival(config.arrival, rng, (T, N))
    A = drawn if arrivals is None else np.asarray(arrivals, dtype=float).reshape(T, N)
    h_b = path_loss_gain(fade_b, [g.dist_to_mec for g in config.geometry], pr)
    h_e = path_loss_gain(fade_e, [g.dist_to_eve for g in config.geometry], pr)

    out = {k: np.zeros((T, N)) for k in ("f", "p", "rl", "ro", "q")}
    r_tot = np.zeros(T)
    p_tot = np.zeros(T)
    eta = np.zeros(T)
    eff = np.zeros(T)
    flags = []

    tau = pr.slot_duration
    Q = np.full(N, float(config.initial_queue))
    acc = EeAccumulator()
    prev_p = None
    for t in range(T):
        state = SlotState(Q, A[t], ChannelState(h_b[t], h_e[t]), acc.ratio, pr)
        d = decide(scheme, state, prev_p)
        r_loc, r_off = slot_rates(scheme_state(scheme, state), d)
        r_user = r_loc + r_off
        out["f"][t], out["p"][t], out["rl"][t], out["ro"][t], out["q"][t] = (
            d.cpu_freq, d.tx_power, r_loc, r_off, Q,
        )
        r_tot[t] = r_user.sum()
        p_tot[t] = user_power(d.cpu_freq, d.tx_power, pr).sum()
        acc, eta[t] = ee_ratio_update(acc, r_tot[t], p_tot[t], tau)
        eff[t] = np.minimum(Q, r_user * tau).sum() / tau
        flags.append(";".join(sorted(d.flags)))
        Q = queue_update(Q, r_user, tau, A[t])
        prev_p = d.tx_power

    return EpisodeTrace(
        realization, scheme, tau, out["f"], out["p"], out["rl"], out["ro"], out["q"], A.copy(),
        r_tot, p_tot, eta, eff, Q, flags,
    )


def window_ee(trace: EpisodeTrace, start_slot: int = 1) -> float:
    """Bits per Joule over slots ``start_slot..T`` (1-based, inclusive)."""
    s = max(start_slot - 1, 0)
    return float(trace.total_rate[s:].sum() / trace.total_power[s:].sum())


def convergence_slot(series: Sequence[float], tol: float = 0.02, min_window: int = 10) -> Optional[int]:
    """First (1-based) slot after which ``series`` stays within ``tol`` of its last value.

    The settled stretch must span at least ``min_window`` slots; otherwise
    the series is judged non-convergent and None is returned.
    """
    s = np.asarray(series, dtype=float)
    if len(s) < min_window:
        raise ValueError(f"series of length {len(s)} is shorter than the window {min_window}")
    final = s[-1]
    outside = np.nonzero(np.abs(s - final) > tol * abs(final))[0]
    first = 0 if len(outside) == 0 else int(outside[-1]) + 1
    if len(s) - first < min_window:
        return None
    return first + 1


@dataclass
class EpisodeSummary:
    realization: int
    ee: float
    mean_queue: float
    running_ee: np.ndarray
    trace: Optional[EpisodeTrace] = None


@dataclass
class SchemeResult:
    scheme: SchemeId
    sweep_value: Optional[float]
    episodes: list

    @property
    def ee(self) -> np.ndarray:
        return np.array([e.ee for e in self.episodes])

    @property
    def mean_ee(self) -> float:
        return float(self.ee.mean())

    @property
    def stderr_ee(self) -> float:
        n = len(self.episodes)
        return float(self.ee.std(ddof=1) / math.sqrt(n)) if n > 1 else 0.0

    @property
    def mean_queue(self) -> float:
        return float(np.mean([e.mean_queue for e in self.episodes]))

    @property
    def running_ee(self) -> np.ndarray:
        """Running EE per slot averaged over realizations."""
        return np.mean([e.running_ee for e in self.episodes], axis=0)

    @property
    def convergence_slot(self) -> Optional[int]:
        return convergence_slot(self.running_ee, min_window=min(10, len(self.running_ee)))


@dataclass
class ExperimentResult:
    config: SimConfig
    results: list  # SchemeResult, sweep-major then scheme order

    def get(self, scheme, sweep_value=None) -> SchemeResult:
        for r in self.results:
            if r.scheme == SchemeId(scheme) and r.sweep_value == sweep_value:
                return r
        raise KeyError((scheme, sweep_value))


def _episode_job(args) -> EpisodeSummary:
    config, realization, scheme, sweep_index, keep_trace = args
    tr = run_episode(config, realization, scheme, sweep_index)
    return EpisodeSummary(
        realization,
        tr.energy_efficiency,
        float(tr.queue.sum(axis=1).mean()),
        tr.ee_ratio,
        tr if keep_trace else None,
    )


def worker_count() -> int:
    cpus = os.cpu_count() or 1
    cap = os.environ.get("NOMA_MEC_THREADS")
    if cap:
        try:
            cpus = min(cpus, max(1, int(cap)))
        except ValueError:
            log.warning("ignoring non-integer NOMA_MEC_THREADS=%r", cap)
    return cpus


def run_experiment(
    config: SimConfig,
    *,
    keep_traces: bool = False,
    workers: Optional[int] = None,
    progress=None,
) -> ExperimentResult:
    """Run every realization of every scheme at every sweep value.

    Realizations may run in worker processes; results are collected in
    realization order, so the outcome does not depend on ``workers``.
    """
    workers = worker_count() if workers is None else workers
    sweep_values = config.sweep.values if config.sweep else (None,)
    jobs, keys = [], []
    for si, value in enumerate(sweep_values):
        cfg = config.at_sweep_value(value) if value is not None else config
        for scheme in config.schemes:
            keys.append((scheme, value))
            jobs.append([(cfg, r, scheme, si, keep_traces) for r in range(config.num_realizations)])

    flat = [j for group in jobs for j in group]
    if workers > 1 and len(flat) > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            done = list(ex.map(_episode_job, flat, chunksize=max(1, len(flat) // (8 * workers))))
    else:
        done = []
        for job in flat:
            done.append(_episode_job(job))
            if progress:
                progress(len(done), len(flat))

    results, i = [], 0
    for (scheme, value), group in zip(keys, jobs):
        results.append(SchemeResult(scheme, value, done[i : i + len(group)]))
        i += len(group)
    return ExperimentResult(config, results)
