"""Altcoin-vs-Bitcoin mean-reversion backtesting."""

from .backtest import BacktestConfig, BacktestResult, DailyResult, run_backtest
from .errors import ConfigError, DataError, InsufficientHistoryError, ParseError
from .factors import ReturnMode
from .ingest import MarketDataSet, PanelMatrix, load_dataset
from .portfolio import SignalMode, VolSource, WeightingScheme
from .universe import TierSpec

__all__ = [
    "BacktestConfig",
    "BacktestResult",
    "ConfigError",
    "DailyResult",
    "DataError",
    "InsufficientHistoryError",
    "MarketDataSet",
    "PanelMatrix",
    "ParseError",
    "ReturnMode",
    "SignalMode",
    "TierSpec",
    "VolSource",
    "WeightingScheme",
    "load_dataset",
    "run_backtest",
]

__version__ = "0.1.0"
