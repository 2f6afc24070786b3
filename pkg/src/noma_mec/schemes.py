"""Offloading policies behind one decision interface."""

from __future__ import annotations

from enum import Enum
from typing import Optional, Sequence

from .optimizer import SlotDecision, SlotState, solve_slot, with_eve_model


class SchemeId(str, Enum):
    PROPOSED = "proposed"
    FULL_OFFLOADING = "full_offloading"
    EVE_FULLY_DECODE = "eve_fully_decode"

    def __str__(self) -> str:
        return self.value


ALL_SCHEMES = (SchemeId.PROPOSED, SchemeId.EVE_FULLY_DECODE, SchemeId.FULL_OFFLOADING)


def scheme_state(scheme: SchemeId, state: SlotState) -> SlotState:
    """The slot state as the scheme models it (eavesdropper capability)."""
    return with_eve_model(state, SchemeId(scheme) is not SchemeId.EVE_FULLY_DECODE)


def decide(
    scheme: SchemeId, state: SlotState, init_power: Optional[Sequence[float]] = None
) -> SlotDecision:
    """Slot decision of ``scheme``.

    ``full_offloading`` keeps every CPU idle and optimizes only the powers;
    ``eve_fully_decode`` optimizes against an eavesdropper free of multi-user
    interference. Realized rates must be evaluated on :func:`scheme_state`.
    """
    scheme = SchemeId(scheme)
    st = scheme_state(scheme, state)
    return solve_slot(st, init_power, allow_local=scheme is not SchemeId.FULL_OFFLOADING)
