"""Asset eligibility: static data-quality filters, stale prices, and market-cap tiers."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import ConfigError, DataError, InsufficientHistoryError
from .ingest import MarketDataSet, PanelMatrix

logger = logging.getLogger(__name__)

# Stored (truncated) name of Circuits of Value Coin; excluded from lookbacks over a year.
COVAL_NAME = "Circuits of V..."
COVAL_MIN_LOOKBACK = 366

NA_DATA = "na_data"
ZERO_VOLUME = "zero_volume"
STALE_PRICE = "stale_price"


@dataclass(frozen=True)
class StaticMask:
    keep: np.ndarray
    reasons: dict[int, str] = field(default_factory=dict)

    @property
    def n_kept(self) -> int:
        return int(self.keep.sum())


@dataclass(frozen=True)
class TierSpec:
    """Market-cap rank band, 1 = largest. ``ix_lower=None`` means down to the last asset."""

    ix_upper: int = 2
    ix_lower: int | None = None

    def __post_init__(self):
        if self.ix_upper < 1:
            raise ConfigError("rank-upper must be >= 1")
        if self.ix_lower is not None and self.ix_lower < self.ix_upper:
            raise ConfigError("rank-lower must be >= rank-upper")

    def label(self) -> str:
        return f"{self.ix_upper}-{'end' if self.ix_lower is None else self.ix_lower}"


@dataclass(frozen=True)
class DailyUniverse:
    eligible: np.ndarray  # assets x days
    btc_index: int


def static_filter(dataset: MarketDataSet, padded_window: int) -> StaticMask:
    """
    Keep assets with complete data and no zero-volume day over the padded window.

    Only the ``padded_window`` most recent columns are inspected.
    """
    if dataset.n_dates < padded_window:
        raise InsufficientHistoryError(
            f"insufficient history: need {padded_window} date columns, have {dataset.n_dates}"
        )
    na = np.zeros(dataset.n_assets, dtype=bool)
    for panel in dataset.panels().values():
        na |= np.isnan(panel.values[:, :padded_window]).any(axis=1)
    zero_vol = (dataset.volume.values[:, :padded_window] == 0).any(axis=1)
    keep = ~na & ~zero_vol
    reasons = {}
    for i in np.flatnonzero(~keep):
        reasons[int(i)] = NA_DATA if na[i] else ZERO_VOLUME
    return StaticMask(keep=keep, reasons=reasons)


def stale_filter(hlv: PanelMatrix) -> np.ndarray:
    """True for assets whose hlv is finite on every day (no flat high == low window)."""
    return np.isfinite(hlv.values).all(axis=1)


def tier_mask(size_col, spec: TierSpec) -> np.ndarray:
    """
    Assets whose log-cap lies between the caps ranked ``ix_lower`` and ``ix_upper``.

    Threshold comparison, not slicing: ties at either boundary are all admitted.
    """
    size_col = np.asarray(size_col, dtype=np.float64)
    n = size_col.size
    ix_lower = n if spec.ix_lower is None else spec.ix_lower
    if spec.ix_upper > n:
        raise ConfigError(f"rank-upper {spec.ix_upper} exceeds universe size {n}")
    if ix_lower > n:
        raise ConfigError(f"rank-lower {ix_lower} exceeds universe size {n}")
    ranked = np.sort(size_col)[::-1]
    return (size_col >= ranked[ix_lower - 1]) & (size_col <= ranked[spec.ix_upper - 1])


def apply_exclusions(names: Sequence[str], exclusions: Sequence[str], active: bool = True) -> np.ndarray:
    """Boolean keep-mask: False where the stored name exactly matches an exclusion."""
    keep = np.ones(len(names), dtype=bool)
    if not active or not exclusions:
        return keep
    excluded = set(exclusions)
    for i, name in enumerate(names):
        if name in excluded:
            keep[i] = False
    return keep


def default_exclusions_active(lookback: int) -> bool:
    return lookback >= COVAL_MIN_LOOKBACK


def locate_bitcoin(names: Sequence[str], btc_name: str = "Bitcoin") -> int:
    hits = [i for i, n in enumerate(names) if n == btc_name]
    if not hits:
        raise DataError(f"{btc_name!r} not found among surviving assets")
    if len(hits) > 1:
        raise DataError(f"{btc_name!r} matches {len(hits)} surviving assets")
    return hits[0]


def check_bitcoin_top(cap_col, btc_index: int, btc_name: str) -> str | None:
    """Warning text if the located Bitcoin row is not the largest cap, else None."""
    cap_col = np.asarray(cap_col)
    top = int(np.argmax(cap_col))
    if top != btc_index:
        msg = f"{btc_name!r} (row {btc_index}) is not the largest market cap on the most recent day"
        logger.warning(msg)
        return msg
    return None
