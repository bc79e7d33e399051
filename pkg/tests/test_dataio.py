"""CSV round trips and deterministic formatting."""

import math

import numpy as np
import pytest

from tpbayes.dataio import (
    DataError,
    format_value,
    read_chain_csv,
    read_design_csv,
    read_series_csv,
    write_chain_csv,
    write_meta,
    write_table,
)
from tpbayes.mcmc import Chain, McmcConfig


# ---------------------------------------------------------------- parsing


def test_read_series_plain(tmp_path):
    f = tmp_path / "series.csv"
    f.write_text("1.5\n-2.25\n0.125\n")
    values, dates = read_series_csv(f)
    assert np.array_equal(values, [1.5, -2.25, 0.125])
    assert dates is None


def test_read_series_with_dates_and_header(tmp_path):
    f = tmp_path / "series.csv"
    f.write_text("date,price\n2013-01-07,31.5\n2013-01-08,30.25\n")
    values, dates = read_series_csv(f, header=True)
    assert np.array_equal(values, [31.5, 30.25])
    assert dates == ["2013-01-07", "2013-01-08"]


def test_read_series_skips_blank_lines(tmp_path):
    f = tmp_path / "series.csv"
    f.write_text("1.0\n\n2.0\n\n")
    values, _ = read_series_csv(f)
    assert np.array_equal(values, [1.0, 2.0])


def test_read_series_errors_name_the_row(tmp_path):
    f = tmp_path / "series.csv"
    f.write_text("1.0\nnot-a-number\n")
    # a non-numeric cell in a single-column file is treated as a date
    # column only when a second column exists; alone it is a parse error
    with pytest.raises(DataError, match="row 2"):
        read_series_csv(f)
    g = tmp_path / "ragged.csv"
    g.write_text("a,1.0\nb,2.0,extra\n")
    with pytest.raises(DataError, match="row 2"):
        read_series_csv(g)


def test_read_series_missing_file(tmp_path):
    with pytest.raises(DataError, match="cannot read"):
        read_series_csv(tmp_path / "absent.csv")


def test_read_series_empty_file(tmp_path):
    f = tmp_path / "empty.csv"
    f.write_text("\n\n")
    with pytest.raises(DataError, match="no data rows"):
        read_series_csv(f)
    g = tmp_path / "only_header.csv"
    g.write_text("value\n")
    with pytest.raises(DataError, match="header but no data"):
        read_series_csv(g, header=True)


def test_read_design_prepends_intercept(tmp_path):
    f = tmp_path / "reg.csv"
    f.write_text("1.0,0.5\n2.0,0.25\n3.0,0.75\n")
    y, X = read_design_csv(f)
    assert np.array_equal(y, [1.0, 2.0, 3.0])
    assert X.shape == (3, 2)
    assert np.all(X[:, 0] == 1.0)
    assert np.array_equal(X[:, 1], [0.5, 0.25, 0.75])


def test_read_design_single_column_is_intercept_only(tmp_path):
    f = tmp_path / "reg.csv"
    f.write_text("1.0\n2.0\n")
    y, X = read_design_csv(f)
    assert np.array_equal(y, [1.0, 2.0])
    assert np.array_equal(X, np.ones((2, 1)))


def test_read_design_ragged_rows(tmp_path):
    f = tmp_path / "reg.csv"
    f.write_text("1.0,0.5\n2.0\n")
    with pytest.raises(DataError, match="row 2: expected 2 cells"):
        read_design_csv(f)


# ------------------------------------------------------------- formatting


def test_format_value_round_trip():
    assert format_value(3) == "3"
    assert format_value(np.int64(-7)) == "-7"
    assert format_value(True) == "True"
    assert format_value(0.1) == "0.1"
    assert format_value(1.0 / 3.0) == "0.3333333333333333"
    assert float(format_value(math.pi)) == math.pi
    assert format_value(np.float64(2.5)) == "2.5"
    assert format_value("label") == "label"
    # shortest representation means exact binary recovery
    x = 0.1 + 0.2
    assert float(format_value(x)) == x


def test_write_table_and_meta_are_deterministic(tmp_path):
    rows = [(1, 0.5, "a"), (2, 1.0 / 3.0, "b")]
    f1 = tmp_path / "t1.csv"
    f2 = tmp_path / "t2.csv"
    write_table(f1, ["i", "x", "tag"], rows)
    write_table(f2, ["i", "x", "tag"], rows)
    assert f1.read_bytes() == f2.read_bytes()
    assert f1.read_text().splitlines()[0] == "i,x,tag"
    assert f1.read_text().splitlines()[2] == "2,0.3333333333333333,b"

    m = tmp_path / "run.meta"
    write_meta(m, {"seed": 42, "window": 100, "model": "sepd-ar", "sigma": 0.5})
    assert m.read_text() == "seed = 42\nwindow = 100\nmodel = sepd-ar\nsigma = 0.5\n"


# ------------------------------------------------------- chain round trip


def test_chain_csv_round_trip_is_bit_exact(tmp_path):
    rng = np.random.default_rng(0)
    chain = Chain(
        draws={
            "phi1": rng.standard_normal(50),
            "alpha": rng.uniform(size=50),
            "sigma": np.exp(rng.standard_normal(50)),
            "p": rng.integers(1, 30, size=50),
        },
        acceptance={"coef": 0.3, "alpha": 0.3, "sigma": 0.3, "p": 0.3},
        seed=(1, 0),
        config=McmcConfig(),
    )
    path = tmp_path / "chain.csv"
    write_chain_csv(path, chain)
    back = read_chain_csv(path)
    assert list(back) == ["phi1", "alpha", "sigma", "p"]
    for name in ("phi1", "alpha", "sigma"):
        assert np.array_equal(back[name], chain.draws[name]), name
        assert back[name].dtype == np.float64
    assert np.array_equal(back["p"], chain.draws["p"])
    assert back["p"].dtype == np.int64


def test_chain_csv_malformed(tmp_path):
    f = tmp_path / "chain.csv"
    f.write_text("phi1,p\n0.5,2\n0.6\n")
    with pytest.raises(DataError, match="row 3"):
        read_chain_csv(f)
    g = tmp_path / "bad.csv"
    g.write_text("phi1,p\n0.5,two\n")
    with pytest.raises(DataError, match="could not parse 'two'"):
        read_chain_csv(g)
