"""Serialization of backtest and liquidity results: P&L CSV, JSON reports, text tables."""

from __future__ import annotations

import csv
import io
import json
import math
from pathlib import Path

from .backtest import BacktestConfig, BacktestResult
from .metrics import LiquiditySummary

PNL_COLUMNS = ("day_index", "daily_pnl", "cum_pnl")


def _clean(obj):
    """Replace non-finite floats by None so the document stays valid JSON."""
    if isinstance(obj, float):
        return obj if math.isfinite(obj) else None
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    return obj


def dumps(doc: dict) -> str:
    return json.dumps(_clean(doc), indent=2, sort_keys=True, allow_nan=False) + "\n"


def pnl_csv(result: BacktestResult) -> str:
    """``day_index`` 0 is the oldest simulated day."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(PNL_COLUMNS)
    for k, (day, cum) in enumerate(zip(result.daily, result.cum_pnl)):
        writer.writerow([k, repr(float(day.pnl)), repr(float(cum))])
    return buf.getvalue()


def read_pnl_csv(path) -> list[tuple[int, float, float]]:
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if tuple(reader.fieldnames or ()) != PNL_COLUMNS:
            raise ValueError(f"unexpected P&L columns {reader.fieldnames}")
        return [(int(r["day_index"]), float(r["daily_pnl"]), float(r["cum_pnl"])) for r in reader]


def backtest_document(result: BacktestResult, config: BacktestConfig) -> dict:
    return {
        "config": config.to_dict(),
        "performance": result.performance.to_dict(),
        "n_static_kept": result.n_static_kept,
        "n_universe": result.n_universe,
        "n_degenerate_days": sum(d.degenerate for d in result.daily),
        "daily": [
            {
                "day_index": k,
                "days_before_end": d.day_index,
                "n_eligible": d.n_eligible,
                "n_signals": d.n_signals,
                "degenerate": d.degenerate,
                "zeroed": d.zeroed,
            }
            for k, d in enumerate(result.daily)
        ],
        "warnings": list(result.warnings),
    }


def liquidity_document(summary: LiquiditySummary, config: BacktestConfig, **extra) -> dict:
    doc = {"config": config.to_dict(), "liquidity": summary.to_dict()}
    doc.update(extra)
    return doc


def performance_lines(result: BacktestResult) -> list[str]:
    p = result.performance
    sharpe = f"{p.sharpe:.2f}" if p.sharpe_defined else "NaN (zero variance)"
    return [
        f"ROC (%):   {p.roc_pct:.2f}",
        f"Sharpe:    {sharpe}",
        f"days:      {p.n_days}",
        f"universe:  {result.n_universe} assets after filters",
    ]


def liquidity_table(summary: LiquiditySummary, label: str = "") -> str:
    suffix = f".{label}" if label else ""
    head = ["Quantity", "Min", "1st Qu", "Median", "Mean", "3rd Qu", "Max"]
    rows = [head]
    for key, s in (("Cap", summary.cap), ("ADV", summary.adv), ("Tvr", summary.tvr)):
        rows.append([f"{key}{suffix}"] + [f"{v:.2e}" for v in s.as_tuple()])
    widths = [max(len(r[j]) for r in rows) for j in range(len(head))]
    return "\n".join("  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip() for r in rows) + "\n"


def write_text(path, text: str) -> None:
    path = Path(path)
    if path.parent and not path.parent.exists():
        path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text)
