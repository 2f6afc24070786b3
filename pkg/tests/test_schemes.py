import numpy as np
import pytest

from conftest import make_state, random_slot_state
from noma_mec.model import secrecy_rates
from noma_mec.optimizer import drift_penalty_objective, slot_rates
from noma_mec.schemes import ALL_SCHEMES, SchemeId, decide, scheme_state


def test_scheme_ids():
    assert {s.value for s in SchemeId} == {"proposed", "full_offloading", "eve_fully_decode"}
    assert set(ALL_SCHEMES) == set(SchemeId)
    assert SchemeId("full_offloading") is SchemeId.FULL_OFFLOADING


def test_eve_model_per_scheme():
    st_ = random_slot_state(np.random.default_rng(0))
    assert scheme_state(SchemeId.PROPOSED, st_).eve_interference
    assert scheme_state(SchemeId.FULL_OFFLOADING, st_).eve_interference
    assert not scheme_state(SchemeId.EVE_FULLY_DECODE, st_).eve_interference


def test_full_offloading_never_computes_locally():
    rng = np.random.default_rng(1)
    for _ in range(30):
        d = decide(SchemeId.FULL_OFFLOADING, random_slot_state(rng))
        assert np.all(d.cpu_freq == 0.0)


def test_vanishing_eavesdropper_equalizes_schemes():
    rng = np.random.default_rng(2)
    for _ in range(20):
        hb = rng.exponential(1, 2) * np.array([2.4e-12, 3.9e-11])
        st_ = make_state(hb, [1e-30, 1e-30], rng.uniform(0, 2e7, 2), [1.5e6, 1.5e6], eta=10 ** rng.uniform(4, 7))
        ra = sum(slot_rates(scheme_state(SchemeId.PROPOSED, st_), decide(SchemeId.PROPOSED, st_)))
        rb = sum(slot_rates(scheme_state(SchemeId.EVE_FULLY_DECODE, st_), decide(SchemeId.EVE_FULLY_DECODE, st_)))
        np.testing.assert_allclose(ra, rb, rtol=1e-6, atol=1e-6)


def test_proposed_dominates_full_offloading_per_slot():
    rng = np.random.default_rng(3)
    for _ in range(100):
        st_ = random_slot_state(rng)
        prop = drift_penalty_objective(st_, decide(SchemeId.PROPOSED, st_))
        full = drift_penalty_objective(st_, decide(SchemeId.FULL_OFFLOADING, st_))
        assert prop >= full - 1e-9 * abs(full)


def test_pessimistic_eve_never_raises_rate():
    rng = np.random.default_rng(4)
    for _ in range(200):
        st_ = random_slot_state(rng)
        p = rng.uniform(0, 1.9, 2)
        honest = secrecy_rates(p, st_.channel, st_.params, eve_interference=True)
        worst = secrecy_rates(p, st_.channel, st_.params, eve_interference=False)
        assert np.all(worst <= honest + 1e-9)


@pytest.mark.parametrize("scheme", list(SchemeId))
def test_decide_is_deterministic(scheme):
    st_ = random_slot_state(np.random.default_rng(5))
    a, b = decide(scheme, st_), decide(scheme, st_)
    np.testing.assert_array_equal(a.cpu_freq, b.cpu_freq)
    np.testing.assert_array_equal(a.tx_power, b.tx_power)
