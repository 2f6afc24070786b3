import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from noma_mec.queueing import ArrivalModel, mean_queue_metric, queue_update, sample_arrival

bits = st.floats(0, 1e8)


@pytest.mark.parametrize(
    "Q, served, A, expected",
    [
        (0.0, 0.0, 0.0, 0.0),
        (5e6, 2e6, 1.5e6, 4.5e6),
        (1e6, 5e6, 2e6, 2e6),
    ],
)
def test_queue_update(Q, served, A, expected):
    assert queue_update(Q, served, 1.0, A) == pytest.approx(expected)


def test_queue_update_uses_slot_length():
    assert queue_update(5e6, 1e6, 2.0, 0.0) == pytest.approx(3e6)


@given(bits, bits, st.floats(0.1, 2.0), bits)
def test_queue_update_bounds(Q, R, tau, A):
    q = queue_update(Q, R, tau, A)
    assert q >= 0
    assert q >= A


@given(bits, bits, bits, bits, st.floats(0, 1e7))
def test_queue_update_monotone(Q, R, A, dq, dr):
    base = queue_update(Q, R, 1.0, A)
    assert queue_update(Q + dq, R, 1.0, A) >= base
    assert queue_update(Q, R, 1.0, A + dq) >= base
    assert queue_update(Q, R + dr, 1.0, A) <= base


@given(st.lists(st.floats(0, 1), min_size=1, max_size=200), st.floats(0, 1e6))
def test_service_above_max_arrival_keeps_queue_bounded(us, extra):
    model = ArrivalModel(1e6, 2e6)
    q = 0.0
    for u in us:
        a = model.low + u * (model.high - model.low)
        q = float(queue_update(q, model.high + extra, 1.0, a))
        assert q <= model.high


class TestArrivals:
    def test_degenerate(self):
        assert sample_arrival(ArrivalModel(3.0, 3.0), np.random.default_rng(0)) == 3.0

    def test_mean_and_support(self):
        model = ArrivalModel()
        draws = sample_arrival(model, np.random.default_rng(1), 10**6)
        assert abs(draws.mean() - 1.5e6) < 1e3
        assert np.all((draws >= model.low) & (draws <= model.high))

    def test_invalid_support(self):
        with pytest.raises(ValueError):
            ArrivalModel(2.0, 1.0)
        with pytest.raises(ValueError):
            ArrivalModel(-1.0, 1.0)

    def test_scaled_mean(self):
        assert ArrivalModel().scaled(2.0).mean == pytest.approx(3e6)


class TestMeanQueueMetric:
    def test_constant(self):
        avg, norm = mean_queue_metric([[5.0]] * 40)
        assert avg == pytest.approx(5.0)
        assert norm == pytest.approx(5.0 / 40)

    def test_linear_growth_does_not_vanish(self):
        T = 10_000
        _, norm = mean_queue_metric(np.arange(1, T + 1, dtype=float))
        assert norm == pytest.approx(0.5, rel=1e-3)

    def test_zero(self):
        assert mean_queue_metric(np.zeros((10, 2))) == (0.0, 0.0)

    def test_sums_users(self):
        avg, _ = mean_queue_metric([[1.0, 2.0], [3.0, 4.0]])
        assert avg == pytest.approx(5.0)

    def test_empty(self):
        with pytest.raises(ValueError):
            mean_queue_metric([])
