import numpy as np
import pytest

from noma_mec.model import DEFAULT_GEOMETRY, ChannelState, SystemParams, draw_channel
from noma_mec.optimizer import SlotState


@pytest.fixture
def params():
    return SystemParams()


def random_slot_state(rng, params=None, geometry=DEFAULT_GEOMETRY, eve_interference=True):
    """A slot state with the default constants and randomized dynamics.

    Queues up to 2e7 bits, arrivals on [1, 2] Mbit and a running EE ratio
    log-uniform on [1e4, 10^7.5] bits/J, which spans both the regime where
    offloading pays and the one where it does not.
    """
    params = params or SystemParams()
    n = len(geometry)
    ch = draw_channel(rng, geometry, params)
    return SlotState(
        rng.uniform(0, 2e7, n),
        rng.uniform(1e6, 2e6, n),
        ch,
        float(10 ** rng.uniform(4, 7.5)),
        params,
        eve_interference,
    )


def make_state(hb, he, queues=None, arrivals=None, eta=2.9e6, params=None):
    params = params or SystemParams()
    n = len(hb)
    return SlotState(
        np.zeros(n) if queues is None else np.asarray(queues, float),
        np.zeros(n) if arrivals is None else np.asarray(arrivals, float),
        ChannelState(np.asarray(hb, float), np.asarray(he, float)),
        eta,
        params,
    )


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
