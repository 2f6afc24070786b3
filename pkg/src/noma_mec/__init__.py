"""Secure, energy-efficient task offloading in an uplink NOMA MEC network.

A per-slot drift-plus-penalty controller chooses local CPU frequencies and
transmit powers; the simulator runs it against two benchmark policies over
block-fading channels with a passive eavesdropper.
"""

from .model import ChannelState, SystemParams, UserGeometry
from .optimizer import SlotDecision, SlotState, solve_slot
from .queueing import ArrivalModel
from .schemes import SchemeId, decide
from .sim import SimConfig, Sweep, run_episode, run_experiment

__all__ = [
    "ArrivalModel",
    "ChannelState",
    "SchemeId",
    "SimConfig",
    "SlotDecision",
    "SlotState",
    "Sweep",
    "SystemParams",
    "UserGeometry",
    "decide",
    "run_episode",
    "run_experiment",
    "solve_slot",
]
