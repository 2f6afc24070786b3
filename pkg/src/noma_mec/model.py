"""Physical-layer and computation models for the uplink NOMA MEC network.

Channel gains are linear *power* gains everywhere. Users are addressed by
their original index; SIC decoding follows ``ChannelState.decode_order``
(ascending gain to the MEC receiver), and a user at decode position ``k`` sees
interference from the users at positions ``0..k-1`` at both receivers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, fields
from typing import Sequence

import numpy as np

LN2 = math.log(2.0)


def db_to_linear(db: float) -> float:
    return 10.0 ** (db / 10.0)


def dbm_to_watts(dbm: float) -> float:
    return 10.0 ** ((dbm - 30.0) / 10.0)


@dataclass(frozen=True)
class SystemParams:
    """Physical and algorithmic constants, all in SI units.

    Defaults are the two-user simulation setting: B = 1 MHz, tau = 1 s,
    theta = 4, g0 = -40 dB, d0 = 1 m, sigma^2 = -60 dBm, kappa = 1e-28,
    C = 737.5 cycles/bit, zeta = 1, P_max = 2 W, f_max = 2.15 GHz, V = 1e7.
    The circuit power ``circuit_power`` has no published value; 0.1 W is used.
    """

    bandwidth: float = 1e6
    slot_duration: float = 1.0
    pathloss_exponent: float = 4.0
    pathloss_const: float = 1e-4
    ref_distance: float = 1.0
    noise_power: float = 1e-9
    kappa: float = 1e-28
    cycles_per_bit: float = 737.5
    amp_coeff: float = 1.0
    circuit_power: float = 0.1
    p_max: float = 2.0
    f_max: float = 2.15e9
    lyapunov_v: float = 1e7

    def __post_init__(self) -> None:
        for f in fields(self):
            value = getattr(self, f.name)
            if not math.isfinite(value):
                raise ValueError(f"{f.name} must be finite, got {value}")
            if f.name == "lyapunov_v":
                if value < 0:
                    raise ValueError(f"lyapunov_v must be >= 0, got {value}")
            elif value <= 0:
                raise ValueError(f"{f.name} must be > 0, got {value}")
        if self.p_max <= self.circuit_power:
            raise ValueError(
                f"p_max ({self.p_max}) must exceed circuit_power ({self.circuit_power})"
            )

    @property
    def max_tx_power(self) -> float:
        """Largest transmit power allowed when the CPU is idle."""
        return (self.p_max - self.circuit_power) / self.amp_coeff


@dataclass(frozen=True)
class UserGeometry:
    dist_to_mec: float
    dist_to_eve: float

    def validate(self, params: SystemParams) -> None:
        for name in ("dist_to_mec", "dist_to_eve"):
            d = getattr(self, name)
            if not d >= params.ref_distance:
                raise ValueError(
                    f"{name}={d} is inside the reference distance {params.ref_distance}"
                )


DEFAULT_GEOMETRY = (UserGeometry(80.0, 120.0), UserGeometry(40.0, 80.0))


@dataclass(frozen=True)
class ChannelState:
    """Per-slot channel power gains; ``decode_order`` is derived."""

    gain_to_mec: np.ndarray
    gain_to_eve: np.ndarray
    decode_order: np.ndarray = field(init=False)

    def __post_init__(self) -> None:
        hb = np.asarray(self.gain_to_mec, dtype=float)
        he = np.asarray(self.gain_to_eve, dtype=float)
        if hb.ndim != 1 or hb.shape != he.shape:
            raise ValueError("gain vectors must be 1-D and of equal length")
        if np.any(hb <= 0) or np.any(he <= 0):
            raise ValueError("channel gains must be strictly positive")
        hb.setflags(write=False)
        he.setflags(write=False)
        order = np.argsort(hb, kind="stable")
        order.setflags(write=False)
        object.__setattr__(self, "gain_to_mec", hb)
        object.__setattr__(self, "gain_to_eve", he)
        object.__setattr__(self, "decode_order", order)

    @property
    def num_users(self) -> int:
        return len(self.gain_to_mec)


def sample_fading(rng: np.random.Generator, size=None):
    """Small-scale power fading, Exponential with unit mean."""
    return rng.exponential(1.0, size=size)


def path_loss_gain(H, d, params: SystemParams):
    """Channel power gain ``H * g0 * (d0 / d) ** theta``."""
    d_arr = np.asarray(d, dtype=float)
    if np.any(d_arr < params.ref_distance):
        raise ValueError(f"distance {d} is inside the reference distance {params.ref_distance}")
    g = np.asarray(H, dtype=float) * params.pathloss_const * (params.ref_distance / d_arr) ** params.pathloss_exponent
    return float(g) if g.ndim == 0 else g


def channel_from_fading(
    fading_mec: Sequence[float],
    fading_eve: Sequence[float],
    geometry: Sequence[UserGeometry],
    params: SystemParams,
) -> ChannelState:
    d_b = [g.dist_to_mec for g in geometry]
    d_e = [g.dist_to_eve for g in geometry]
    return ChannelState(
        path_loss_gain(np.asarray(fading_mec, dtype=float), d_b, params),
        path_loss_gain(np.asarray(fading_eve, dtype=float), d_e, params),
    )


def draw_channel(
    rng: np.random.Generator, geometry: Sequence[UserGeometry], params: SystemParams
) -> ChannelState:
    n = len(geometry)
    return channel_from_fading(sample_fading(rng, n), sample_fading(rng, n), geometry, params)


def sinr_at_receiver(powers: Sequence[float], gains: Sequence[float], noise: float, n: int) -> float:
    """SINR of the user at decode position ``n`` (0-based).

    ``powers`` and ``gains`` are given in decode order; only the users decoded
    before ``n`` interfere.
    """
    interference = sum(p * h for p, h in zip(powers[:n], gains[:n]))
    return powers[n] * gains[n] / (interference + noise)


def _sinrs(powers: np.ndarray, gains: np.ndarray, order: np.ndarray, noise: float, interference: bool):
    """SINR for every user (original indexing); ``powers`` may carry leading batch axes."""
    rx = powers * gains
    if not interference:
        return rx / noise
    rx_sorted = rx[..., order]
    before = np.cumsum(rx_sorted, axis=-1) - rx_sorted
    sinr_sorted = rx_sorted / (before + noise)
    out = np.empty_like(sinr_sorted)
    out[..., order] = sinr_sorted
    return out


def secrecy_rates(
    powers,
    ch: ChannelState,
    params: SystemParams,
    eve_interference: bool = True,
    clip: bool = True,
) -> np.ndarray:
    """Secure offloading rate of every user in bits/s.

    With ``eve_interference=False`` the eavesdropper is assumed to cancel all
    other users (interference-free SINR). ``clip=False`` returns the smooth
    rate difference, which can be negative.
    """
    p = np.asarray(powers, dtype=float)
    g_b = _sinrs(p, ch.gain_to_mec, ch.decode_order, params.noise_power, True)
    g_e = _sinrs(p, ch.gain_to_eve, ch.decode_order, params.noise_power, eve_interference)
    rate = params.bandwidth * (np.log1p(g_b) - np.log1p(g_e)) / LN2
    return np.maximum(rate, 0.0) if clip else rate


def secure_offload_rate(
    powers: Sequence[float],
    ch: ChannelState,
    params: SystemParams,
    n: int,
    eve_interference: bool = True,
) -> float:
    """Clipped secrecy rate of user ``n`` (original index)."""
    order = list(ch.decode_order)
    k = order.index(n)
    p_sorted = [powers[i] for i in order]
    noise = params.noise_power
    g_b = sinr_at_receiver(p_sorted, [ch.gain_to_mec[i] for i in order], noise, k)
    if eve_interference:
        g_e = sinr_at_receiver(p_sorted, [ch.gain_to_eve[i] for i in order], noise, k)
    else:
        g_e = powers[n] * ch.gain_to_eve[n] / noise
    return max(0.0, params.bandwidth * (math.log2(1.0 + g_b) - math.log2(1.0 + g_e)))


def local_rate(f, cycles_per_bit: float):
    return f / cycles_per_bit


def local_power(f, kappa: float):
    return kappa * f**3


def offload_power(p, params: SystemParams):
    return params.amp_coeff * p + params.circuit_power


def user_power(f, p, params: SystemParams):
    """Total power draw of one user, the left side of the per-user budget."""
    return local_power(f, params.kappa) + offload_power(p, params)
