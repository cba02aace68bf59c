"""
Performance and liquidity statistics.

P&L is in units of the long investment level with long = short = 1, so total
capital is 2. Annualization uses 365 days because cryptoassets trade every day.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from .ingest import MarketDataSet

DAYS_PER_YEAR = 365
TOTAL_CAPITAL = 2.0  # long + short investment levels

TVR_CAP_OVER_ADV = "cap-over-adv"
# The published liquidity table's turnover magnitudes are ADV / Cap.
TVR_ADV_OVER_CAP = "adv-over-cap"


@dataclass(frozen=True)
class PerformanceReport:
    roc_pct: float
    sharpe: float
    sharpe_defined: bool
    n_days: int
    mean_daily_pnl: float
    sd_daily_pnl: float
    capital_divisor: float = TOTAL_CAPITAL

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class SixNumberSummary:
    min: float
    q1: float
    median: float
    mean: float
    q3: float
    max: float

    def as_tuple(self) -> tuple[float, ...]:
        return (self.min, self.q1, self.median, self.mean, self.q3, self.max)


@dataclass(frozen=True)
class LiquiditySummary:
    cap: SixNumberSummary
    adv: SixNumberSummary
    tvr: SixNumberSummary
    n_assets: int

    def to_dict(self) -> dict:
        return {
            "n_assets": self.n_assets,
            "cap": asdict(self.cap),
            "adv": asdict(self.adv),
            "tvr": asdict(self.tvr),
        }


def _as_series(daily_pnls) -> np.ndarray:
    return np.asarray(daily_pnls, dtype=np.float64).ravel()


def annualized_roc(daily_pnls) -> float:
    """Annualized return on capital in percent: ``365 * mean / 2 * 100``."""
    x = _as_series(daily_pnls)
    if x.size == 0:
        raise ValueError("cannot compute ROC of an empty series")
    return float(np.mean(x) * DAYS_PER_YEAR / TOTAL_CAPITAL * 100)


def annualized_sharpe(daily_pnls) -> float:
    """
    ``sqrt(365) * mean / sd`` with the sample (n-1) standard deviation.

    Returns NaN when the ratio is undefined (fewer than two points or zero variance).
    """
    x = _as_series(daily_pnls)
    if x.size < 2 or np.all(x == x[0]):
        return math.nan
    sd = np.std(x, ddof=1)
    if sd == 0 or not np.isfinite(sd):
        return math.nan
    return float(np.mean(x) / sd * math.sqrt(DAYS_PER_YEAR))


def performance(daily_pnls) -> PerformanceReport:
    x = _as_series(daily_pnls)
    sharpe = annualized_sharpe(x)
    return PerformanceReport(
        roc_pct=annualized_roc(x),
        sharpe=sharpe,
        sharpe_defined=not math.isnan(sharpe),
        n_days=int(x.size),
        mean_daily_pnl=float(np.mean(x)),
        sd_daily_pnl=float(np.std(x, ddof=1)) if x.size > 1 else math.nan,
    )


def cumulative_pnl(daily_pnls) -> np.ndarray:
    """Running sum, oldest first. Plain left-to-right accumulation."""
    return np.cumsum(_as_series(daily_pnls))


def six_number_summary(values) -> SixNumberSummary:
    """Min, quartiles, mean and max; quartiles interpolate order statistics at 1 + (n-1)p."""
    x = _as_series(values)
    if x.size == 0:
        raise ValueError("cannot summarize an empty list")
    if np.isnan(x).any():
        raise ValueError("values contain missing entries")
    q1, med, q3 = np.quantile(x, [0.25, 0.5, 0.75], method="linear")
    return SixNumberSummary(
        min=float(x.min()),
        q1=float(q1),
        median=float(med),
        mean=float(x.mean()),
        q3=float(q3),
        max=float(x.max()),
    )


def liquidity_stats(
    dataset: MarketDataSet, mask, adv_window: int = 20, tvr: str = TVR_CAP_OVER_ADV
) -> LiquiditySummary:
    """
    Cap / ADV / turnover summaries over the masked assets.

    Cap is the most recent market cap. ADV is the mean dollar volume over the
    ``adv_window`` days before the most recent date, matching the av factor used
    for trading on that date. Turnover is Cap / ADV unless ``tvr`` asks for the
    inverse.
    """
    if tvr not in (TVR_CAP_OVER_ADV, TVR_ADV_OVER_CAP):
        raise ValueError(f"unknown turnover definition {tvr!r}")
    mask = np.asarray(mask, dtype=bool)
    if not mask.any():
        raise ValueError("no assets selected for liquidity statistics")
    if adv_window < 1:
        raise ValueError("adv_window must be >= 1")
    if dataset.n_dates < adv_window + 1:
        raise ValueError(f"need {adv_window + 1} date columns for a {adv_window}-day ADV")
    cap = dataset.cap.values[mask, 0]
    adv = np.nanmean(dataset.volume.values[mask, 1 : adv_window + 1], axis=1)
    if not np.all(np.isfinite(cap)):
        raise ValueError("selected assets have missing market cap on the most recent date")
    if not np.all(adv > 0):
        raise ValueError("selected assets have zero or missing average volume")
    return LiquiditySummary(
        cap=six_number_summary(cap),
        adv=six_number_summary(adv),
        tvr=six_number_summary(cap / adv if tvr == TVR_CAP_OVER_ADV else adv / cap),
        n_assets=int(mask.sum()),
    )
