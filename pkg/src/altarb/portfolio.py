"""Daily long-only altcoin weights from the prior-day momentum signal."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import DataError


class SignalMode(str, Enum):
    MEAN_REVERSION = "mean-reversion"
    REVERSED = "reversed"
    ALWAYS_ON = "always-on"


class WeightingScheme(str, Enum):
    EQUAL = "equal"
    INVERSE_VOL = "inverse-vol"
    MOM_OVER_VAR = "mom-over-var"


class VolSource(str, Enum):
    HLV = "hlv"
    RET_SD = "ret-sd"


@dataclass(frozen=True)
class WeightVector:
    w: np.ndarray
    n_signals: int

    @property
    def is_empty(self) -> bool:
        return self.n_signals == 0


def raw_signal(mom_col, mode: SignalMode | str = SignalMode.MEAN_REVERSION) -> np.ndarray:
    """
    1 where the asset should be held long, 0 otherwise.

    Mean reversion holds last-day losers (mom < 0); reversed holds winners.
    A momentum of exactly zero is never held in either mode.
    """
    mode = SignalMode(mode)
    mom_col = np.asarray(mom_col, dtype=np.float64)
    if mode is SignalMode.ALWAYS_ON:
        return np.ones_like(mom_col)
    x = -np.sign(mom_col)
    if mode is SignalMode.REVERSED:
        x = -x
    # sign(nan) is nan; an undefined momentum carries no position
    return np.clip(np.nan_to_num(x, nan=0.0), 0.0, None)


def build_weights(
    signal,
    eligible,
    vol=None,
    mom_col=None,
    scheme: WeightingScheme | str = WeightingScheme.EQUAL,
    btc_index: int | None = None,
) -> WeightVector:
    """
    Normalize the signal over eligible altcoins so weights sum to one.

    Args:
        signal: Raw 0/1 (or non-negative) signal per asset.
        eligible: Boolean tradability mask per asset.
        vol: Per-asset volatility, needed by the volatility-scaled schemes.
        mom_col: Per-asset momentum, needed by ``mom-over-var``.
        scheme: Weighting scheme.
        btc_index: Row forced to zero weight.

    Returns:
        WeightVector; all zeros with ``n_signals == 0`` if nothing is held.

    Raises:
        DataError: Volatility is non-finite or non-positive on a held asset.
    """
    scheme = WeightingScheme(scheme)
    x = np.where(np.asarray(eligible, dtype=bool), np.asarray(signal, dtype=np.float64), 0.0)
    if btc_index is not None:
        x[btc_index] = 0.0
    x[x < 0] = 0.0
    held = x > 0

    if scheme is not WeightingScheme.EQUAL and held.any():
        if vol is None:
            raise ValueError(f"{scheme.value} weighting needs volatilities")
        vol = np.asarray(vol, dtype=np.float64)
        bad = held & ~(np.isfinite(vol) & (vol > 0))
        if bad.any():
            raise DataError(f"invalid volatility on held asset row {int(np.flatnonzero(bad)[0])}")
        sig = np.where(held, vol, 1.0)
        if scheme is WeightingScheme.INVERSE_VOL:
            x = np.where(held, x / sig, 0.0)
        else:
            if mom_col is None:
                raise ValueError("mom-over-var weighting needs momentum values")
            mom_col = np.asarray(mom_col, dtype=np.float64)
            x = np.where(held, x * np.abs(np.nan_to_num(mom_col)) / sig**2, 0.0)

    total = np.abs(x).sum()
    if total == 0:
        return WeightVector(np.zeros_like(x), 0)
    w = x / total
    return WeightVector(w, int((w > 0).sum()))
