import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from altarb.errors import DataError, ParseError
from altarb.ingest import (
    MINABLE_FILE,
    MarketDataSet,
    PanelMatrix,
    load_dataset,
    load_panel,
    parse_cell,
    write_dataset,
    write_panel,
)


@pytest.mark.parametrize("raw,expected", [("3.75e+07", 3.75e7), ("-2", -2.0), (".5", 0.5), ("10.", 10.0)])
def test_parse_cell_numbers(raw, expected):
    assert parse_cell(raw) == expected


@pytest.mark.parametrize("raw", ["?", "NA", ""])
def test_parse_cell_missing(raw):
    assert math.isnan(parse_cell(raw))


@pytest.mark.parametrize("raw", ["abc", "12a", "nan", "inf", "1_000", "0x10", "1e"])
def test_parse_cell_rejects(raw):
    with pytest.raises(ParseError):
        parse_cell(raw)


def test_load_panel_well_formed(tmp_path):
    p = tmp_path / "x.txt"
    p.write_text("1\t2\t3\n4\t5\t6\n")
    panel = load_panel(p)
    assert panel.shape == (2, 3)
    np.testing.assert_array_equal(panel.values, [[1, 2, 3], [4, 5, 6]])


def test_load_panel_question_marks(tmp_path):
    p = tmp_path / "x.txt"
    p.write_text("1\t?\t3\nNA\t5\t6\n")
    v = load_panel(p).values
    assert np.isnan(v[0, 1]) and np.isnan(v[1, 0])
    assert v[1, 2] == 6


def test_load_panel_ragged(tmp_path):
    p = tmp_path / "x.txt"
    p.write_text("1\t2\t3\n4\t5\n")
    with pytest.raises(DataError, match="ragged"):
        load_panel(p)


def test_load_panel_parse_error_location(tmp_path):
    p = tmp_path / "x.txt"
    p.write_text("1\t2\t3\n4\t12a\t6\n")
    with pytest.raises(ParseError) as info:
        load_panel(p)
    assert info.value.row == 1 and info.value.col == 1
    assert "row 2" in str(info.value) and "column 2" in str(info.value)


def test_load_panel_missing_file(tmp_path):
    with pytest.raises(DataError):
        load_panel(tmp_path / "nope.txt")


def test_load_panel_header(tmp_path):
    p = tmp_path / "x.txt"
    p.write_text("d0\td1\n1\t2\n")
    assert load_panel(p, header=True).shape == (1, 2)


def test_load_panel_text(tmp_path):
    p = tmp_path / "x.txt"
    p.write_text("Bitcoin\nXRP\n")
    assert load_panel(p, numeric=False) == [["Bitcoin"], ["XRP"]]


def test_load_dataset_roundtrip(data_dir, small_dataset):
    ds, report = load_dataset(data_dir)
    assert report.warnings == []
    assert report.n_assets == small_dataset.n_assets
    assert ds.names == small_dataset.names
    for key, panel in small_dataset.panels().items():
        np.testing.assert_array_equal(getattr(ds, key).values, panel.values)


def test_load_dataset_dimension_mismatch(data_dir):
    cap = load_panel(data_dir / "cr.cap.txt")
    write_panel(PanelMatrix(cap.values[:, :-1]), data_dir / "cr.cap.txt")
    with pytest.raises(DataError, match="mismatch"):
        load_dataset(data_dir)


def test_load_dataset_missing_required(data_dir):
    (data_dir / "cr.high.txt").unlink()
    with pytest.raises(DataError, match="missing file"):
        load_dataset(data_dir)


def test_load_dataset_without_minable(data_dir):
    from altarb.backtest import BacktestConfig, run_backtest

    with_flags, _ = load_dataset(data_dir)
    (data_dir / MINABLE_FILE).unlink()
    ds, report = load_dataset(data_dir)
    assert ds.minable is None
    assert len(report.warnings) == 1
    cfg = BacktestConfig(days=30, d_r=20)
    np.testing.assert_array_equal(run_backtest(ds, cfg).pnl, run_backtest(with_flags, cfg).pnl)


def test_names_length_mismatch(small_dataset):
    with pytest.raises(DataError):
        MarketDataSet(**small_dataset.panels(), names=small_dataset.names[:-1])


def test_missing_counts(tmp_path, small_dataset):
    close = small_dataset.close.values.copy()
    close[3, 4] = np.nan
    close[5, 0] = np.nan
    ds = MarketDataSet(**{**small_dataset.panels(), "close": PanelMatrix(close)}, names=small_dataset.names)
    write_dataset(ds, tmp_path)
    _, report = load_dataset(tmp_path)
    assert report.n_missing_cells["close"] == 2
    assert report.n_missing_cells["open"] == 0
    assert all(0 <= n <= report.n_assets * report.n_dates for n in report.n_missing_cells.values())


cells = st.one_of(
    st.just(np.nan),
    st.floats(min_value=-1e12, max_value=1e12, allow_nan=False, allow_infinity=False),
)


@settings(max_examples=50, deadline=None)
@given(arrays(np.float64, st.tuples(st.integers(1, 6), st.integers(1, 6)), elements=cells))
def test_panel_text_roundtrip(tmp_path_factory, grid):
    path = tmp_path_factory.mktemp("rt") / "p.txt"
    write_panel(PanelMatrix(grid), path)
    back = load_panel(path).values
    assert back.shape == grid.shape
    np.testing.assert_array_equal(np.isnan(back), np.isnan(grid))
    np.testing.assert_array_equal(back[~np.isnan(back)], grid[~np.isnan(grid)])
