import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from altarb.errors import DataError, InsufficientHistoryError
from altarb.factors import (
    ReturnMode,
    WindowConfig,
    av_factor,
    close_returns,
    hlv_factor,
    mom_factor,
    prior_day,
    return_sd,
    size_factor,
    trailing_mean,
)
from altarb.ingest import PanelMatrix

P = PanelMatrix


def test_close_returns_hand_values():
    r = close_returns(P([[11.0, 10.0, 8.0]]))
    np.testing.assert_allclose(r.log_ret.values, [[math.log(1.1), math.log(1.25)]], rtol=1e-15)
    np.testing.assert_allclose(r.simple_ret.values, [[0.1, 0.25]], rtol=1e-14)


def test_close_returns_constant():
    r = close_returns(P([[5.0, 5.0, 5.0]]))
    assert r.log_ret.values.tolist() == [[0.0, 0.0]]
    assert r.simple_ret.values.tolist() == [[0.0, 0.0]]


def test_close_returns_truncates_to_d():
    r = close_returns(P([[4.0, 2.0, 1.0, 0.5]]), d=3)
    assert r.simple_ret.values.tolist() == [[1.0, 1.0]]


def test_close_returns_nonpositive():
    with pytest.raises(DataError):
        close_returns(P([[1.0, 0.0, 2.0]]))
    r = close_returns(P([[1.0, 0.0, 2.0]]), strict=False)
    assert math.isinf(r.simple_ret.values[0, 0])


def test_open_close_returns():
    r = close_returns(P([[11.0, 9.0, 7.0]]), mode=ReturnMode.OPEN_TO_CLOSE, open=P([[10.0, 10.0, 7.0]]))
    np.testing.assert_allclose(r.simple_ret.values, [[0.1, -0.1]], rtol=1e-14)
    with pytest.raises(ValueError):
        close_returns(P([[1.0, 1.0]]), mode="open-close")


@settings(max_examples=50, deadline=None)
@given(arrays(np.float64, (3, 7), elements=st.floats(0.01, 1e6)))
def test_log_simple_identity(prices):
    r = close_returns(P(prices))
    np.testing.assert_allclose(np.log1p(r.simple_ret.values), r.log_ret.values, rtol=1e-9, atol=1e-12)


def test_trailing_mean_hand():
    assert trailing_mean(P([[1.0, 2.0, 3.0, 4.0]]), 2, 2).values.tolist() == [[1.5, 2.5]]


def test_trailing_mean_span_one_identity():
    x = np.arange(12.0).reshape(2, 6)
    np.testing.assert_array_equal(trailing_mean(P(x), 4, 1).values, x[:, :4])


def test_trailing_mean_constant_and_nan():
    out = trailing_mean(P([[3.0, 3.0, np.nan, 3.0, 3.0]]), 3, 3).values
    assert out.tolist() == [[3.0, 3.0, 3.0]]
    assert np.isnan(trailing_mean(P([[np.nan, np.nan, 1.0]]), 1, 2).values[0, 0])


def test_trailing_mean_insufficient():
    with pytest.raises(InsufficientHistoryError):
        trailing_mean(P([[1.0, 2.0, 3.0]]), 3, 2)


def test_trailing_mean_matches_loop(rng):
    x = rng.normal(size=(4, 30))
    x[rng.random(x.shape) < 0.1] = np.nan
    out = trailing_mean(P(x), 10, 7).values
    for i in range(4):
        for s in range(10):
            w = [v for v in x[i, s : s + 7] if not np.isnan(v)]
            assert out[i, s] == pytest.approx(sum(w) / len(w), rel=1e-13)


def test_mom_hand_value():
    close = P([[11.0, 10.0, 8.0]])
    mom = mom_factor(prior_day(close), 1)
    assert mom.values[0, 0] == pytest.approx(math.log(10 / 8), rel=1e-15)
    assert mom.values[0, 0] == pytest.approx(0.22314, abs=1e-5)


def test_mom_flat():
    assert mom_factor(prior_day(P([[5.0] * 6])), 4).values.tolist() == [[0.0] * 4]


@settings(max_examples=50, deadline=None)
@given(arrays(np.float64, (4, 12), elements=st.floats(0.01, 1e5)))
def test_mom_is_next_day_log_return(prices):
    r = close_returns(P(prices))
    mom = mom_factor(prior_day(P(prices)), 10)
    np.testing.assert_array_equal(mom.values, r.log_ret.values[:, 1:11])


def test_hlv_single_day():
    out = hlv_factor(P([[12.0]]), P([[8.0]]), P([[10.0]]), 1, 1)
    assert out.values[0, 0] == pytest.approx(0.5 * math.log(0.16), rel=1e-14)
    assert out.values[0, 0] == pytest.approx(-0.91629, abs=1e-5)


def test_hlv_flat_window_nonfinite():
    h = P([[5.0, 5.0, 6.0, 6.0]])
    out = hlv_factor(h, P([[5.0, 5.0, 4.0, 4.0]]), P([[5.0] * 4]), 2, 2).values
    assert out[0, 0] == -math.inf
    assert np.isfinite(out[0, 1])


def test_hlv_scale_invariant(rng):
    c = rng.uniform(1, 10, size=(3, 25))
    h, l = c * 1.05, c * 0.97
    a = hlv_factor(P(h), P(l), P(c), 5, 20).values
    b = hlv_factor(P(2 * h), P(2 * l), P(2 * c), 5, 20).values
    np.testing.assert_allclose(a, b, rtol=1e-12)


def test_av():
    assert av_factor(P([[100.0, 300.0]]), 1, 2).values[0, 0] == pytest.approx(math.log(200))
    assert av_factor(P([[7.0] * 5]), 3, 3).values[0].tolist() == pytest.approx([math.log(7)] * 3)
    vol = P([[1.0, 2.0, 3.0]])
    np.testing.assert_allclose(av_factor(vol, 3, 1).values, [[0.0, math.log(2), math.log(3)]])


def test_size():
    assert size_factor(P([[1.19e8]]), 1).values[0, 0] == pytest.approx(18.595, abs=5e-4)
    assert size_factor(P([[1.0]]), 1).values[0, 0] == 0.0
    s = size_factor(P([[3e9], [2e9]]), 1).values
    assert s[0, 0] > s[1, 0]
    with pytest.raises(DataError):
        size_factor(P([[0.0]]), 1)


def test_return_sd_window():
    r = np.array([[0.0, 0.1, -0.1, 0.2, 0.0, 0.3]])
    out = return_sd(P(r), 2, 3).values
    assert out[0, 0] == pytest.approx(np.std([0.1, -0.1, 0.2], ddof=1))
    assert out[0, 1] == pytest.approx(np.std([-0.1, 0.2, 0.0], ddof=1))


def test_window_config():
    assert WindowConfig(days=365).padded == 386
    with pytest.raises(ValueError):
        WindowConfig(days=10, d_r=0)


def test_factor_causality(rng):
    """Factors for day s must not move when raw column s (or newer) changes."""
    n, T, days = 4, 40, 15
    close = rng.uniform(1, 10, size=(n, T))
    high, low = close * 1.1, close * 0.9
    vol, cap = rng.uniform(1e3, 1e5, size=(n, T)), close * 1e6

    def build(c, h, l, v, k):
        c, h, l, v, k = (prior_day(P(a)) for a in (c, h, l, v, k))
        return [mom_factor(c, days).values, hlv_factor(h, l, c, days, 20).values,
                av_factor(v, days, 20).values, size_factor(k, days).values]

    base = build(close, high, low, vol, cap)
    for s in (0, 3, 10):
        bumped = [a.copy() for a in (close, high, low, vol, cap)]
        for a in bumped:
            a[:, s] *= 1.7
        new = build(*bumped)
        for f0, f1 in zip(base, new):
            np.testing.assert_array_equal(f0[:, s:], f1[:, s:])
