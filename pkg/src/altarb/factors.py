"""
Returns and the mom / hlv / av / size factor panels.

Alignment convention: raw panels have column 0 = most recent date. Factors
for trading day ``s`` must only see data from day ``s+1`` and older, so every
factor is built from *prior-day* panels, i.e. raw panels with their most
recent column dropped (see :func:`prior_day`). After the shift, column ``s``
of a prior-day panel holds the raw value for date ``s+1``.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import DataError, InsufficientHistoryError
from .ingest import PanelMatrix


class ReturnMode(str, Enum):
    CLOSE_TO_CLOSE = "close"
    OPEN_TO_CLOSE = "open-close"


@dataclass(frozen=True)
class WindowConfig:
    days: int
    d_r: int = 20
    d_v: int = 20
    d_i: int = 20

    def __post_init__(self):
        for name in ("days", "d_r", "d_v", "d_i"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1")

    @property
    def padded(self) -> int:
        """Raw columns consumed: selection period + padding + one day for the shift."""
        return self.days + self.d_r + 1


@dataclass(frozen=True)
class ReturnsPanel:
    log_ret: PanelMatrix
    simple_ret: PanelMatrix


@dataclass(frozen=True)
class FactorSet:
    mom: PanelMatrix
    hlv: PanelMatrix
    av: PanelMatrix
    size: PanelMatrix
    n_days: int


def prior_day(panel: PanelMatrix) -> PanelMatrix:
    """
    Drop the most recent column.

    This is the single place where the one-day lag is introduced: column ``s``
    of the result is raw date ``s+1``, the day before trading day ``s``.
    """
    return panel.shifted(1)


def _values(x) -> np.ndarray:
    return x.values if isinstance(x, PanelMatrix) else np.asarray(x, dtype=np.float64)


def _require_positive(arr: np.ndarray, what: str) -> None:
    bad = ~(arr > 0)
    if bad.any():
        i, j = np.argwhere(bad)[0]
        raise DataError(f"non-positive or missing {what} at row {i + 1}, column {j + 1}: {arr[i, j]!r}")


def _require_cols(arr: np.ndarray, need: int, what: str) -> None:
    if arr.shape[1] < need:
        raise InsufficientHistoryError(
            f"insufficient history for {what}: need {need} columns, have {arr.shape[1]}"
        )


def close_returns(
    close: PanelMatrix,
    d: int | None = None,
    *,
    mode: ReturnMode | str = ReturnMode.CLOSE_TO_CLOSE,
    open: PanelMatrix | None = None,
    strict: bool = True,
) -> ReturnsPanel:
    """
    Daily log and simple returns, column ``s`` = return realized on day ``s``.

    Close-to-close by default: ``close[s] / close[s+1]``. In open-close mode
    the same-day ``close[s] / open[s]`` is used instead. Either way the output
    has ``d - 1`` columns so it lines up with the prior-day panels.

    Args:
        close: Close prices.
        d: Number of raw columns to use (defaults to all).
        mode: Return definition.
        open: Open prices, required in open-close mode.
        strict: Raise on non-positive prices instead of letting log/div produce
            non-finite values.
    """
    mode = ReturnMode(mode)
    c = _values(close)
    if d is None:
        d = c.shape[1]
    _require_cols(c, d, "returns")
    c = c[:, :d]
    if mode is ReturnMode.CLOSE_TO_CLOSE:
        num, den = c[:, :-1], c[:, 1:]
    else:
        if open is None:
            raise ValueError("open prices are required for open-close returns")
        o = _values(open)[:, :d]
        num, den = c[:, :-1], o[:, :-1]
    if strict:
        _require_positive(num, "price")
        _require_positive(den, "price")
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = num / den
        log_ret = np.log(ratio)
    return ReturnsPanel(PanelMatrix(log_ret), PanelMatrix(ratio - 1.0))


def trailing_mean(x: PanelMatrix, days: int, span: int) -> PanelMatrix:
    """Mean of ``x[:, s:s+span]`` for ``s < days``; NaN cells are skipped."""
    arr = _values(x)
    if span == 1:
        _require_cols(arr, days, "trailing mean")
        return PanelMatrix(arr[:, :days])
    _require_cols(arr, days + span - 1, "trailing mean")
    windows = np.lib.stride_tricks.sliding_window_view(arr, span, axis=1)[:, :days, :]
    with np.errstate(invalid="ignore"):
        counts = (~np.isnan(windows)).sum(axis=2)
        totals = np.where(np.isnan(windows), 0.0, windows).sum(axis=2)
        out = totals / np.where(counts > 0, counts, np.nan)
    return PanelMatrix(out)


def mom_factor(close_shifted: PanelMatrix, days: int, *, strict: bool = True) -> PanelMatrix:
    """Prior-day close-to-close log return; ``mom[:, s]`` equals the log return at ``s+1``."""
    c = _values(close_shifted)
    _require_cols(c, days + 1, "mom")
    num, den = c[:, :days], c[:, 1 : days + 1]
    if strict:
        _require_positive(c[:, : days + 1], "price")
    with np.errstate(divide="ignore", invalid="ignore"):
        return PanelMatrix(np.log(num / den))


def mom_factor_open_close(
    close_shifted: PanelMatrix, open_shifted: PanelMatrix, days: int, *, strict: bool = True
) -> PanelMatrix:
    """Prior-day open-to-close log return, for the open-close return mode."""
    c, o = _values(close_shifted), _values(open_shifted)
    _require_cols(c, days, "mom")
    if strict:
        _require_positive(c[:, :days], "price")
        _require_positive(o[:, :days], "price")
    with np.errstate(divide="ignore", invalid="ignore"):
        return PanelMatrix(np.log(c[:, :days] / o[:, :days]))


def hlv_factor(
    high: PanelMatrix, low: PanelMatrix, close: PanelMatrix, days: int, d_i: int
) -> PanelMatrix:
    """
    Log intraday volatility: ``0.5 * log(mean((high - low)^2 / close^2))`` over ``d_i`` days.

    A window where high == low throughout gives ``-inf``; callers rely on that
    to detect stale prices.
    """
    h, l, c = _values(high), _values(low), _values(close)
    with np.errstate(divide="ignore", invalid="ignore"):
        rng = (h - l) ** 2 / c**2
        return PanelMatrix(0.5 * np.log(trailing_mean(PanelMatrix(rng), days, d_i).values))


def av_factor(volume: PanelMatrix, days: int, d_v: int) -> PanelMatrix:
    """Log of the ``d_v``-day trailing mean dollar volume."""
    with np.errstate(divide="ignore", invalid="ignore"):
        return PanelMatrix(np.log(trailing_mean(volume, days, d_v).values))


def size_factor(cap: PanelMatrix, days: int, *, strict: bool = True) -> PanelMatrix:
    """Log market cap (prior-day panel in, so column ``s`` is yesterday's cap)."""
    arr = _values(cap)
    _require_cols(arr, days, "size")
    arr = arr[:, :days]
    if strict:
        _require_positive(arr, "market cap")
    with np.errstate(divide="ignore", invalid="ignore"):
        return PanelMatrix(np.log(arr))


def return_sd(log_ret: PanelMatrix, days: int, window: int) -> PanelMatrix:
    """
    Sample standard deviation of log returns over the ``window`` days before each day.

    ``out[:, s]`` uses returns at ``s+1 .. s+window``.
    """
    if window < 2:
        raise ValueError("return volatility needs a window of at least 2 days")
    r = _values(log_ret)
    _require_cols(r, days + window, "return volatility")
    windows = np.lib.stride_tricks.sliding_window_view(r[:, 1:], window, axis=1)[:, :days, :]
    return PanelMatrix(windows.std(axis=2, ddof=1))


def compute_factors(
    close_sh: PanelMatrix,
    open_sh: PanelMatrix,
    high_sh: PanelMatrix,
    low_sh: PanelMatrix,
    volume_sh: PanelMatrix,
    cap_sh: PanelMatrix,
    days: int,
    d_v: int = 20,
    d_i: int = 20,
    *,
    mode: ReturnMode | str = ReturnMode.CLOSE_TO_CLOSE,
    strict: bool = True,
) -> FactorSet:
    """All four factors from prior-day panels, ``days`` columns each."""
    mode = ReturnMode(mode)
    if mode is ReturnMode.CLOSE_TO_CLOSE:
        mom = mom_factor(close_sh, days, strict=strict)
    else:
        mom = mom_factor_open_close(close_sh, open_sh, days, strict=strict)
    return FactorSet(
        mom=mom,
        hlv=hlv_factor(high_sh, low_sh, close_sh, days, d_i),
        av=av_factor(volume_sh, days, d_v),
        size=size_factor(cap_sh, days, strict=strict),
        n_days=days,
    )
