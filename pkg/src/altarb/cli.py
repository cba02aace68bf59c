"""
Command-line interface.

    altarb backtest --data-dir DIR [options]
    altarb stats    --data-dir DIR [options]
    altarb validate --data-dir DIR [options]

Exit status: 0 success, 1 usage error, 2 data error.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

import numpy as np

from .backtest import BacktestConfig, prepare, run_backtest
from .errors import ConfigError, DataError
from .factors import ReturnMode
from .ingest import load_dataset
from .metrics import TVR_ADV_OVER_CAP, TVR_CAP_OVER_ADV, liquidity_stats
from .portfolio import SignalMode, VolSource, WeightingScheme
from .report import (
    backtest_document,
    dumps,
    liquidity_document,
    liquidity_table,
    performance_lines,
    pnl_csv,
    write_text,
)
from .universe import TierSpec, static_filter, tier_mask

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _positive(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return v


def _non_negative(text: str) -> int:
    v = int(text)
    if v < 0:
        raise argparse.ArgumentTypeError("must be >= 0")
    return v


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--data-dir", required=True, type=Path, help="directory with the cr.*.txt files")
    p.add_argument("--header", action="store_true", help="panel files have a header row")
    p.add_argument("--days", type=_positive, default=365, help="selection period (default 365)")
    p.add_argument("--back", type=_non_negative, default=0, help="days to skip (default 0)")
    p.add_argument("--lookback", type=_positive, default=None, help="backtest length (default: days)")
    p.add_argument("--dr", type=_positive, default=20, help="padding span (default 20)")
    p.add_argument("--dv", type=_positive, default=20, help="av moving-average length (default 20)")
    p.add_argument("--di", type=_positive, default=20, help="hlv moving-average length (default 20)")
    p.add_argument("--rank-upper", type=_positive, default=2, help="highest cap rank admitted (default 2)")
    p.add_argument("--rank-lower", type=_positive, default=None, help="lowest cap rank admitted (default: all)")
    p.add_argument("--signal-mode", choices=[m.value for m in SignalMode], default=SignalMode.MEAN_REVERSION.value)
    p.add_argument("--weighting", choices=[m.value for m in WeightingScheme], default=WeightingScheme.EQUAL.value)
    p.add_argument("--vol-source", choices=[m.value for m in VolSource], default=VolSource.HLV.value)
    p.add_argument("--exclude", action="append", default=[], metavar="NAME", help="exclude an asset by stored name")
    p.add_argument("--exclude-file", type=Path, help="file with one asset name to exclude per line")
    p.add_argument("--btc-name", default="Bitcoin")
    p.add_argument("--return-mode", choices=[m.value for m in ReturnMode], default=ReturnMode.CLOSE_TO_CLOSE.value)
    p.add_argument("--charge-btc-on-empty", action="store_true", help="charge the Bitcoin leg on days with no longs")
    p.add_argument("-v", "--verbose", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="altarb", description="Altcoin-vs-Bitcoin mean-reversion backtester")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    bt = sub.add_parser("backtest", help="run a backtest")
    _common(bt)
    bt.add_argument("--pnl-out", type=Path, default=Path("pnl.csv"))
    bt.add_argument("--report-out", type=Path, default=Path("report.json"))

    st = sub.add_parser("stats", help="liquidity summaries for a cap tier")
    _common(st)
    st.add_argument("--adv-window", type=_positive, default=20)
    st.add_argument("--include-btc", action="store_true", help="add Bitcoin to the summarized set")
    st.add_argument("--tvr", choices=[TVR_CAP_OVER_ADV, TVR_ADV_OVER_CAP], default=TVR_CAP_OVER_ADV)
    st.add_argument("--label", default="", help="row-label suffix for the printed table")
    st.add_argument("--report-out", type=Path, default=None)

    va = sub.add_parser("validate", help="check the data files and report filter survivors")
    _common(va)
    return parser


def config_from_args(args) -> BacktestConfig:
    exclusions = list(args.exclude)
    if args.exclude_file is not None:
        if not args.exclude_file.is_file():
            raise UsageError(f"exclusion file not found: {args.exclude_file}")
        exclusions += [ln.strip() for ln in args.exclude_file.read_text().splitlines() if ln.strip()]
    return BacktestConfig(
        days=args.days,
        back=args.back,
        lookback=args.lookback,
        d_r=args.dr,
        d_v=args.dv,
        d_i=args.di,
        tier=TierSpec(args.rank_upper, args.rank_lower),
        signal_mode=args.signal_mode,
        weighting=args.weighting,
        vol_source=args.vol_source,
        btc_name=args.btc_name,
        exclusions=tuple(exclusions),
        return_mode=args.return_mode,
        charge_btc_on_empty=args.charge_btc_on_empty,
    )


def cmd_backtest(args, config: BacktestConfig) -> int:
    dataset, _ = load_dataset(args.data_dir, header=args.header)
    result = run_backtest(dataset, config)
    write_text(args.pnl_out, pnl_csv(result))
    write_text(args.report_out, dumps(backtest_document(result, config)))
    for w in result.warnings:
        print(f"warning: {w}", file=sys.stderr)
    print("\n".join(performance_lines(result)))
    return EXIT_OK


def cmd_stats(args, config: BacktestConfig) -> int:
    dataset, _ = load_dataset(args.data_dir, header=args.header)
    prep = prepare(dataset, config)
    # the universe traded on the most recent day, ranked by the prior day's cap
    local = tier_mask(prep.factors.size.values[:, 0], config.tier) & prep.tradable
    local[prep.btc_index] = args.include_btc
    mask = np.zeros(dataset.n_assets, dtype=bool)
    mask[prep.rows[local]] = True
    if not mask.any():
        raise DataError("tier is empty after filters")
    summary = liquidity_stats(dataset, mask, args.adv_window, tvr=args.tvr)
    print(liquidity_table(summary, args.label), end="")
    print(f"assets: {summary.n_assets}")
    if args.report_out is not None:
        doc = liquidity_document(
            summary, config, adv_window=args.adv_window, include_btc=args.include_btc, tvr=args.tvr
        )
        write_text(args.report_out, dumps(doc))
    return EXIT_OK


def cmd_validate(args, config: BacktestConfig) -> int:
    dataset, report = load_dataset(args.data_dir, header=args.header)
    print(f"assets: {report.n_assets}")
    print(f"dates:  {report.n_dates}")
    for key, n in report.n_missing_cells.items():
        print(f"missing {key}: {n}")
    for w in report.warnings:
        print(f"warning: {w}")
    static = static_filter(dataset, config.padded_window)
    print(f"window: {config.padded_window} columns (days={config.days}, dr={config.d_r})")
    print(f"kept by data filters: {static.n_kept}")
    prep = prepare(dataset, config)
    print(f"kept after stale-price filter: {len(prep.names)}")
    print(f"bitcoin row: {int(prep.rows[prep.btc_index])} ({config.btc_name})")
    return EXIT_OK


COMMANDS = {"backtest": cmd_backtest, "stats": cmd_stats, "validate": cmd_validate}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        config = config_from_args(args)
    except (ConfigError, UsageError) as exc:
        print(f"altarb: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        return COMMANDS[args.command](args, config)
    except ConfigError as exc:
        print(f"altarb: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (DataError, ValueError, OSError) as exc:
        print(f"altarb: data error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
