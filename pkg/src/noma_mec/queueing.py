"""Task-buffer dynamics, arrivals and stability statistics."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass
class UserState:
    queue: float = 0.0
    arrival: float = 0.0


@dataclass(frozen=True)
class ArrivalModel:
    """Uniform per-slot task arrivals on ``[low, high]`` bits."""

    low: float = 1e6
    high: float = 2e6

    def __post_init__(self) -> None:
        if not 0 <= self.low <= self.high:
            raise ValueError(f"need 0 <= low <= high, got [{self.low}, {self.high}]")

    @property
    def mean(self) -> float:
        return 0.5 * (self.low + self.high)

    def scaled(self, factor: float) -> "ArrivalModel":
        return ArrivalModel(self.low * factor, self.high * factor)


def queue_update(Q, R_tot, tau: float, A):
    """Backlog at the next slot: ``max(Q - R_tot * tau, 0) + A``."""
    return np.maximum(np.asarray(Q) - np.asarray(R_tot) * tau, 0.0) + np.asarray(A)


def sample_arrival(model: ArrivalModel, rng: np.random.Generator, size=None):
    if model.low == model.high:
        return np.full(size, model.low) if size is not None else model.low
    return rng.uniform(model.low, model.high, size=size)


def mean_queue_metric(trace) -> tuple[float, float]:
    """Time-averaged total backlog and that average divided by the horizon.

    ``trace`` holds one queue vector (or scalar) per slot. A normalized value
    that does not shrink as the horizon grows flags an unstable queue.
    """
    q = np.asarray(trace, dtype=float)
    if q.size == 0 or q.shape[0] == 0:
        raise ValueError("empty queue trace")
    totals = q.reshape(q.shape[0], -1).sum(axis=1)
    avg = float(totals.mean())
    return avg, avg / q.shape[0]
