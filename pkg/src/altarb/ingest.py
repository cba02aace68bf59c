"""
Panel file ingestion.

The on-disk format is one tab-separated file per field, one row per asset and
one column per date, most recent date first, no header. Missing cells are
written as ``?``.
"""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import DataError, ParseError

logger = logging.getLogger(__name__)

MISSING_TOKENS = frozenset({"?", "NA", ""})
MISSING_OUT = "?"

PANEL_FILES = {
    "close": "cr.prc.txt",
    "open": "cr.open.txt",
    "high": "cr.high.txt",
    "low": "cr.low.txt",
    "volume": "cr.vol.txt",
    "cap": "cr.cap.txt",
}
NAME_FILE = "cr.name.txt"
MINABLE_FILE = "cr.mnbl.txt"

_NUMBER = re.compile(r"[+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?")


@dataclass(frozen=True)
class PanelMatrix:
    """Asset x date grid. Column 0 is the most recent date; NaN marks a missing cell."""

    values: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.values, dtype=np.float64)
        if arr.ndim == 1:
            arr = arr.reshape(1, -1) if arr.size else arr.reshape(0, 0)
        if arr.ndim != 2:
            raise ValueError(f"panel must be 2-D, got shape {arr.shape}")
        arr.setflags(write=False)
        object.__setattr__(self, "values", arr)

    @property
    def n_assets(self) -> int:
        return self.values.shape[0]

    @property
    def n_dates(self) -> int:
        return self.values.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self.values.shape

    def n_missing(self) -> int:
        return int(np.isnan(self.values).sum())

    def head(self, n: int) -> "PanelMatrix":
        """Keep the `n` most recent columns."""
        return PanelMatrix(self.values[:, :n])

    def shifted(self, k: int = 1) -> "PanelMatrix":
        """Drop the `k` most recent columns so column s holds what was column s+k."""
        return PanelMatrix(self.values[:, k:])

    def take_rows(self, mask) -> "PanelMatrix":
        return PanelMatrix(self.values[np.asarray(mask)])

    def to_text(self) -> str:
        # repr round-trips exactly; no finite repr contains "nan"
        return "".join(
            "\t".join(map(repr, row)).replace("nan", MISSING_OUT) + "\n" for row in self.values.tolist()
        )


@dataclass(frozen=True)
class MarketDataSet:
    close: PanelMatrix
    open: PanelMatrix
    high: PanelMatrix
    low: PanelMatrix
    volume: PanelMatrix
    cap: PanelMatrix
    names: tuple[str, ...]
    minable: tuple[int, ...] | None = None

    def __post_init__(self):
        object.__setattr__(self, "names", tuple(self.names))
        if self.minable is not None:
            object.__setattr__(self, "minable", tuple(int(m) for m in self.minable))
        shapes = {k: p.shape for k, p in self.panels().items()}
        if len(set(shapes.values())) != 1:
            raise DataError(f"panel dimension mismatch: {shapes}")
        n = self.close.n_assets
        if len(self.names) != n:
            raise DataError(f"names has {len(self.names)} entries, panels have {n} rows")
        if self.minable is not None and len(self.minable) != n:
            raise DataError(f"minable has {len(self.minable)} entries, panels have {n} rows")

    def panels(self) -> dict[str, PanelMatrix]:
        return {k: getattr(self, k) for k in PANEL_FILES}

    @property
    def n_assets(self) -> int:
        return self.close.n_assets

    @property
    def n_dates(self) -> int:
        return self.close.n_dates

    def head(self, n: int) -> "MarketDataSet":
        return MarketDataSet(
            **{k: p.head(n) for k, p in self.panels().items()},
            names=self.names,
            minable=self.minable,
        )

    @classmethod
    def from_arrays(cls, close, open, high, low, volume, cap, names, minable=None) -> "MarketDataSet":
        return cls(
            close=PanelMatrix(close),
            open=PanelMatrix(open),
            high=PanelMatrix(high),
            low=PanelMatrix(low),
            volume=PanelMatrix(volume),
            cap=PanelMatrix(cap),
            names=tuple(names),
            minable=minable,
        )


@dataclass
class IngestReport:
    n_assets: int
    n_dates: int
    n_missing_cells: dict[str, int] = field(default_factory=dict)
    warnings: list[str] = field(default_factory=list)


def parse_cell(raw: str, row: int | None = None, col: int | None = None) -> float:
    """Parse one trimmed token; ``?``, ``NA`` and the empty string are missing (NaN)."""
    if raw in MISSING_TOKENS:
        return np.nan
    if _NUMBER.fullmatch(raw) is None:
        raise ParseError(raw, row, col)
    return float(raw)


def _split(line: str) -> list[str]:
    return [tok.strip() for tok in line.rstrip("\r\n").split("\t")]


def _read_lines(path: Path, header: bool) -> list[str]:
    if not path.is_file():
        raise DataError(f"missing file: {path}")
    lines = path.read_text().splitlines()
    if header and lines:
        lines = lines[1:]
    while lines and not lines[-1].strip():
        lines.pop()
    return lines


def _parse_row(tokens: Sequence[str], row: int, path: Path) -> np.ndarray:
    try:
        return np.array([parse_cell(t, row, j) for j, t in enumerate(tokens)], dtype=np.float64)
    except ParseError as exc:
        raise ParseError(exc.token, row, exc.col, path) from None


# Characters that can appear in a valid file; anything else means a bad token.
_ALLOWED = re.compile(r"[^0-9eE+\-.\t?NA]")


def _fast_parse(lines: list[str]) -> np.ndarray | None:
    """Whole-file conversion; None when some token needs the per-cell path."""
    body = "\t".join(lines)
    if _ALLOWED.search(body):
        return None
    tokens = body.split("\t")
    if ("N" in body or "A" in body) and any(("N" in t or "A" in t) and t != "NA" for t in tokens):
        return None
    try:
        flat = np.array(["nan" if t in MISSING_TOKENS else t for t in tokens], dtype=np.float64)
    except ValueError:
        return None
    return flat


def parse_rows(rows: Iterable[Sequence[str]], path: Path | str = "<memory>") -> PanelMatrix:
    parsed = []
    width = None
    for i, tokens in enumerate(rows):
        if width is None:
            width = len(tokens)
        elif len(tokens) != width:
            raise DataError(f"{path}: ragged row {i + 1} has {len(tokens)} cells, expected {width}")
        parsed.append(_parse_row(tokens, i, Path(path)))
    if not parsed:
        return PanelMatrix(np.empty((0, 0)))
    return PanelMatrix(np.vstack(parsed))


def _check_widths(lines: list[str], path: Path) -> int:
    widths = [ln.count("\t") for ln in lines]
    width = widths[0]
    for i, w in enumerate(widths):
        if w != width:
            raise DataError(f"{path}: ragged row {i + 1} has {w + 1} cells, expected {width + 1}")
    return width + 1


def load_panel(path, numeric: bool = True, header: bool = False):
    """
    Load one tab-delimited panel file.

    Args:
        path: File to read.
        numeric: Parse every cell as a number. When False the raw text table
            (list of rows of tokens) is returned instead.
        header: Skip the first line.

    Returns:
        PanelMatrix, or a list of token lists when ``numeric`` is False.
    """
    path = Path(path)
    lines = _read_lines(path, header)
    if not numeric:
        rows = [_split(line) for line in lines]
        width = {len(r) for r in rows}
        if len(width) > 1:
            raise DataError(f"{path}: ragged rows (widths {sorted(width)})")
        return rows
    if not lines:
        return PanelMatrix(np.empty((0, 0)))
    width = _check_widths(lines, path)
    flat = _fast_parse(lines)
    if flat is not None:
        return PanelMatrix(flat.reshape(len(lines), width))
    return parse_rows([_split(line) for line in lines], path)


def _load_names(path: Path, header: bool) -> list[str]:
    names = []
    for line in _read_lines(path, header):
        first = line.rstrip("\r\n").split("\t")[0]
        if len(first) >= 2 and first[0] == first[-1] == '"':
            first = first[1:-1]
        names.append(first)
    return names


def load_dataset(directory, header: bool = False) -> tuple[MarketDataSet, IngestReport]:
    """
    Read the six numeric panels, the names file, and the optional minable flags.

    Raises:
        DataError: A required file is missing or the files disagree in shape.
    """
    directory = Path(directory)
    if not directory.is_dir():
        raise DataError(f"not a directory: {directory}")
    warnings: list[str] = []
    panels = {k: load_panel(directory / fname, header=header) for k, fname in PANEL_FILES.items()}
    names = _load_names(directory / NAME_FILE, header)

    minable = None
    mnbl_path = directory / MINABLE_FILE
    if mnbl_path.is_file():
        mnbl = load_panel(mnbl_path, header=header)
        minable = tuple(int(v) for v in np.nan_to_num(mnbl.values[:, 0])) if mnbl.n_assets else ()
    else:
        warnings.append(f"{MINABLE_FILE} not found; minable flags unavailable (not used by the strategy)")

    dataset = MarketDataSet(**panels, names=names, minable=minable)
    report = IngestReport(
        n_assets=dataset.n_assets,
        n_dates=dataset.n_dates,
        n_missing_cells={k: p.n_missing() for k, p in panels.items()},
        warnings=warnings,
    )
    for w in warnings:
        logger.warning(w)
    return dataset, report


def write_panel(panel: PanelMatrix, path) -> None:
    Path(path).write_text(panel.to_text())


def write_dataset(dataset: MarketDataSet, directory) -> None:
    """Write a dataset in the same layout `load_dataset` reads."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    for key, fname in PANEL_FILES.items():
        write_panel(getattr(dataset, key), directory / fname)
    (directory / NAME_FILE).write_text("".join(f"{n}\n" for n in dataset.names))
    if dataset.minable is not None:
        (directory / MINABLE_FILE).write_text("".join(f"{m}\n" for m in dataset.minable))
