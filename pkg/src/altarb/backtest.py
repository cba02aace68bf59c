"""
Daily altcoin-vs-Bitcoin backtest.

Pipeline, in order:

1. truncate every panel to the padded selection window (``days + d_r + 1``);
2. drop assets with missing data or a zero-volume day in that window;
3. compute daily returns, then lag the raw panels by one day;
4. skip ``back`` columns;
5. build the factors over ``lookback`` days and drop stale-price assets;
6. for each day, oldest first: tier -> signal -> weights -> P&L.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from . import factors as fx
from .errors import ConfigError, DataError, InsufficientHistoryError
from .factors import FactorSet, ReturnMode
from .ingest import MarketDataSet, PanelMatrix
from .metrics import PerformanceReport, cumulative_pnl, performance
from .portfolio import SignalMode, VolSource, WeightingScheme, WeightVector, build_weights, raw_signal
from .universe import (
    COVAL_NAME,
    STALE_PRICE,
    TierSpec,
    apply_exclusions,
    check_bitcoin_top,
    default_exclusions_active,
    locate_bitcoin,
    stale_filter,
    static_filter,
    tier_mask,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class BacktestConfig:
    days: int = 365
    back: int = 0
    lookback: int | None = None
    d_r: int = 20
    d_v: int = 20
    d_i: int = 20
    tier: TierSpec = field(default_factory=TierSpec)
    signal_mode: SignalMode = SignalMode.MEAN_REVERSION
    weighting: WeightingScheme = WeightingScheme.EQUAL
    vol_source: VolSource = VolSource.HLV
    btc_name: str = "Bitcoin"
    exclusions: tuple[str, ...] = ()
    default_exclusions: tuple[str, ...] = (COVAL_NAME,)
    return_mode: ReturnMode = ReturnMode.CLOSE_TO_CLOSE
    charge_btc_on_empty: bool = False

    def __post_init__(self):
        object.__setattr__(self, "signal_mode", SignalMode(self.signal_mode))
        object.__setattr__(self, "weighting", WeightingScheme(self.weighting))
        object.__setattr__(self, "vol_source", VolSource(self.vol_source))
        object.__setattr__(self, "return_mode", ReturnMode(self.return_mode))
        object.__setattr__(self, "exclusions", tuple(self.exclusions))
        object.__setattr__(self, "default_exclusions", tuple(self.default_exclusions))
        if self.lookback is None:
            object.__setattr__(self, "lookback", self.days)
        if self.days < 1:
            raise ConfigError("days must be >= 1")
        if self.back < 0:
            raise ConfigError("back must be >= 0")
        if not 1 <= self.lookback <= self.days:
            raise ConfigError("lookback must be between 1 and days")
        for name in ("d_r", "d_v", "d_i"):
            if getattr(self, name) < 1:
                raise ConfigError(f"{name} must be >= 1")
        if self.vol_source is VolSource.RET_SD and self.d_i < 2:
            raise ConfigError("return-volatility source needs d_i >= 2")

    @property
    def padded_window(self) -> int:
        return self.days + self.d_r + 1

    def to_dict(self) -> dict:
        return {
            "days": self.days,
            "back": self.back,
            "lookback": self.lookback,
            "d_r": self.d_r,
            "d_v": self.d_v,
            "d_i": self.d_i,
            "rank_upper": self.tier.ix_upper,
            "rank_lower": self.tier.ix_lower,
            "signal_mode": self.signal_mode.value,
            "weighting": self.weighting.value,
            "vol_source": self.vol_source.value,
            "btc_name": self.btc_name,
            "exclusions": list(self.exclusions),
            "default_exclusions": list(self.default_exclusions),
            "default_exclusions_active": default_exclusions_active(self.lookback),
            "return_mode": self.return_mode.value,
            "charge_btc_on_empty": self.charge_btc_on_empty,
        }


@dataclass(frozen=True)
class DailyResult:
    day_index: int  # 0 = most recent trading day
    pnl: float
    n_eligible: int
    n_signals: int
    degenerate: bool
    zeroed: bool = False  # non-finite P&L replaced by 0


@dataclass
class BacktestResult:
    daily: list[DailyResult]
    cum_pnl: np.ndarray
    performance: PerformanceReport
    n_static_kept: int
    n_universe: int
    warnings: list[str] = field(default_factory=list)

    @property
    def roc_pct(self) -> float:
        return self.performance.roc_pct

    @property
    def sharpe(self) -> float:
        return self.performance.sharpe

    @property
    def pnl(self) -> np.ndarray:
        return np.array([d.pnl for d in self.daily])


@dataclass(frozen=True)
class PreparedData:
    """Everything the daily loop needs, restricted to the surviving assets."""

    rows: np.ndarray  # original dataset row of each surviving asset
    names: tuple[str, ...]
    btc_index: int
    factors: FactorSet
    simple_ret: np.ndarray  # assets x lookback, column s = return on day s
    vol: np.ndarray | None  # sigma for the volatility-scaled schemes
    tradable: np.ndarray  # exclusion mask (True = may be held)
    n_static_kept: int
    warnings: tuple[str, ...]


def prepare(dataset: MarketDataSet, config: BacktestConfig) -> PreparedData:
    """
    Run the filters and factor construction once.

    Raises:
        InsufficientHistoryError: Fewer date columns than the windows need.
        DataError: Bitcoin missing or filtered out.
    """
    warnings: list[str] = []
    d = config.padded_window
    static = static_filter(dataset, d)
    keep = static.keep
    raw = {k: p.values[keep, :d] for k, p in dataset.panels().items()}
    names = tuple(n for n, k in zip(dataset.names, keep) if k)

    rets = fx.close_returns(
        PanelMatrix(raw["close"]), d, mode=config.return_mode, open=PanelMatrix(raw["open"]), strict=False
    )
    lagged = {k: fx.prior_day(PanelMatrix(v)) for k, v in raw.items()}
    log_ret, simple_ret = rets.log_ret, rets.simple_ret
    if config.back:
        # every panel is skipped by the same amount, simple returns included
        log_ret, simple_ret = log_ret.shifted(config.back), simple_ret.shifted(config.back)
        lagged = {k: p.shifted(config.back) for k, p in lagged.items()}

    days = config.lookback
    fs = fx.compute_factors(
        lagged["close"],
        lagged["open"],
        lagged["high"],
        lagged["low"],
        lagged["volume"],
        lagged["cap"],
        days,
        config.d_v,
        config.d_i,
        mode=config.return_mode,
        strict=False,
    )
    if simple_ret.n_dates < days:
        raise InsufficientHistoryError(f"insufficient history: need {days} return columns")

    fresh = stale_filter(fs.hlv)
    n_stale = int((~fresh).sum())
    if n_stale:
        logger.info("%d assets dropped for stale prices (%s)", n_stale, STALE_PRICE)
    fs = FactorSet(
        mom=fs.mom.take_rows(fresh),
        hlv=fs.hlv.take_rows(fresh),
        av=fs.av.take_rows(fresh),
        size=fs.size.take_rows(fresh),
        n_days=days,
    )
    names = tuple(n for n, f in zip(names, fresh) if f)
    rows = np.flatnonzero(keep)[fresh]

    if config.weighting is WeightingScheme.EQUAL:
        vol = None
    elif config.vol_source is VolSource.HLV:
        vol = np.exp(fs.hlv.values)
    else:
        vol = fx.return_sd(log_ret.take_rows(fresh), days, config.d_i).values

    btc = locate_bitcoin(names, config.btc_name)
    msg = check_bitcoin_top(raw["cap"][fresh, 0], btc, config.btc_name)
    if msg:
        warnings.append(msg)

    tradable = apply_exclusions(names, config.exclusions, True) & apply_exclusions(
        names, config.default_exclusions, default_exclusions_active(days)
    )
    return PreparedData(
        rows=rows,
        names=names,
        btc_index=btc,
        factors=fs,
        simple_ret=simple_ret.values[fresh, :days],
        vol=vol,
        tradable=tradable,
        n_static_kept=static.n_kept,
        warnings=tuple(warnings),
    )


def day_eligibility(prep: PreparedData, s: int, tier: TierSpec) -> np.ndarray:
    """Tradable long set on day ``s``: in the cap tier, not excluded, not Bitcoin."""
    eligible = tier_mask(prep.factors.size.values[:, s], tier) & prep.tradable
    eligible[prep.btc_index] = False
    return eligible


def day_weights(prep: PreparedData, s: int, config: BacktestConfig) -> tuple[WeightVector, np.ndarray]:
    mom = prep.factors.mom.values[:, s]
    eligible = day_eligibility(prep, s, config.tier)
    w = build_weights(
        raw_signal(mom, config.signal_mode),
        eligible,
        vol=None if prep.vol is None else prep.vol[:, s],
        mom_col=mom,
        scheme=config.weighting,
        btc_index=prep.btc_index,
    )
    return w, eligible


def daily_pnl(
    weights: WeightVector,
    simple_ret_col,
    btc_index: int,
    *,
    charge_btc_on_empty: bool = False,
) -> tuple[float, bool]:
    """
    Long-altcoin return minus the Bitcoin return, per unit of long capital.

    A day with no held altcoin is degenerate: P&L is 0, or ``-R_btc`` when
    ``charge_btc_on_empty`` is set.

    Raises:
        DataError: A held asset or Bitcoin has a non-finite return.
    """
    r = np.asarray(simple_ret_col, dtype=np.float64)
    btc_ret = r[btc_index]
    if weights.is_empty:
        if not charge_btc_on_empty:
            return 0.0, True
        if not math.isfinite(btc_ret):
            raise DataError("non-finite Bitcoin return")
        return float(-btc_ret), True
    held = weights.w > 0
    if not np.all(np.isfinite(r[held])) or not math.isfinite(btc_ret):
        raise DataError("non-finite return on a held asset")
    return float(np.sum(weights.w[held] * r[held]) - btc_ret), False


def simulate_day(prep: PreparedData, s: int, config: BacktestConfig) -> DailyResult:
    """One trading day; a pure function of the prepared data."""
    try:
        w, eligible = day_weights(prep, s, config)
        pnl, degenerate = daily_pnl(
            w, prep.simple_ret[:, s], prep.btc_index, charge_btc_on_empty=config.charge_btc_on_empty
        )
    except DataError as exc:
        logger.warning("day %d: %s; P&L set to 0", s, exc)
        eligible = day_eligibility(prep, s, config.tier)
        return DailyResult(s, 0.0, int(eligible.sum()), 0, False, zeroed=True)
    if not math.isfinite(pnl):
        logger.warning("day %d: non-finite P&L set to 0", s)
        return DailyResult(s, 0.0, int(eligible.sum()), w.n_signals, degenerate, zeroed=True)
    return DailyResult(s, pnl, int(eligible.sum()), w.n_signals, degenerate)


def run_backtest(dataset: MarketDataSet, config: BacktestConfig | None = None) -> BacktestResult:
    """Run the full backtest; daily results are ordered oldest first."""
    config = config or BacktestConfig()
    prep = prepare(dataset, config)
    daily = [simulate_day(prep, s, config) for s in range(config.lookback - 1, -1, -1)]
    pnls = np.array([d.pnl for d in daily])
    warnings = list(prep.warnings)
    n_zeroed = sum(d.zeroed for d in daily)
    if n_zeroed:
        warnings.append(f"{n_zeroed} day(s) had non-finite P&L and were set to 0")
    return BacktestResult(
        daily=daily,
        cum_pnl=cumulative_pnl(pnls),
        performance=performance(pnls),
        n_static_kept=prep.n_static_kept,
        n_universe=len(prep.names),
        warnings=warnings,
    )
