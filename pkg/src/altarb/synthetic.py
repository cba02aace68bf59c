"""Random market panels for tests, benchmarks and demos."""

from __future__ import annotations

import numpy as np

from .ingest import MarketDataSet


def random_dataset(
    rng: np.random.Generator,
    n_assets: int = 12,
    n_dates: int = 60,
    *,
    missing_prob: float = 0.0,
    zero_volume_prob: float = 0.0,
    unchanged_prob: float = 0.0,
    n_flat: int = 0,
    btc_name: str = "Bitcoin",
) -> MarketDataSet:
    """
    Build a random but internally consistent dataset, column 0 = most recent.

    Row 0 is Bitcoin with the largest market cap and complete data. Other rows
    may carry missing cells, zero-volume days, unchanged closes (mom == 0) and,
    for the last ``n_flat`` rows, a flat stretch with high == low.
    """
    shape = (n_assets, n_dates)
    log_steps = rng.normal(0.0, 0.05, size=shape)
    # chronological random walk, then flip so column 0 is the newest date
    close = np.exp(np.log(rng.uniform(0.5, 50.0, size=(n_assets, 1))) + np.cumsum(log_steps, axis=1))
    close = close[:, ::-1].copy()
    if unchanged_prob > 0:
        same = rng.random(shape) < unchanged_prob
        same[:, -1] = False
        for j in range(n_dates - 2, -1, -1):
            close[same[:, j], j] = close[same[:, j], j + 1]
    open_ = np.empty_like(close)
    open_[:, :-1] = close[:, 1:] * np.exp(rng.normal(0.0, 0.005, size=(n_assets, n_dates - 1)))
    open_[:, -1] = close[:, -1]
    top = np.maximum(open_, close) * (1.0 + rng.uniform(0.001, 0.08, size=shape))
    bottom = np.minimum(open_, close) * (1.0 - rng.uniform(0.001, 0.08, size=shape))
    volume = np.exp(rng.normal(12.0, 2.0, size=shape))
    supply = np.exp(rng.uniform(10.0, 18.0, size=(n_assets, 1)))
    supply[0] = 1e6 * supply.max()
    cap = close * supply

    if n_flat:
        for i in range(n_assets - n_flat, n_assets):
            if i <= 0:
                continue
            start = int(rng.integers(0, max(1, n_dates - 25)))
            stop = min(n_dates, start + 25)
            close[i, start:stop] = close[i, start]
            open_[i, start:stop] = close[i, start]
            top[i, start:stop] = close[i, start]
            bottom[i, start:stop] = close[i, start]
            cap[i, start:stop] = close[i, start] * supply[i, 0]

    panels = [close, open_, top, bottom, volume, cap]
    if missing_prob > 0:
        for p in panels:
            hole = rng.random(shape) < missing_prob
            hole[0] = False
            p[hole] = np.nan
    if zero_volume_prob > 0:
        zero = rng.random(shape) < zero_volume_prob
        zero[0] = False
        volume[zero] = 0.0

    names = [btc_name] + [f"ALT{i}" for i in range(1, n_assets)]
    return MarketDataSet.from_arrays(close, open_, top, bottom, volume, cap, names, minable=[1] * n_assets)
