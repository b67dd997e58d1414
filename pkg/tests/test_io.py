import io

import numpy as np
import pytest

from fastmuod import CSVFormatError, FunctionalSample, InvalidData, read_curves, write_curves
from fastmuod.io import read_labels, write_labels
from fastmuod.simulation import SimulationSpec, generate


def _read(text):
    return read_curves(io.StringIO(text))


def test_plain_matrix():
    s = _read("1,2,3\n4,5,6\n")
    assert s.values.tolist() == [[1, 2, 3], [4, 5, 6]]
    assert s.grid is None and s.ids is None


def test_grid_header_and_ids():
    s = _read("id,t=0,t=0.5,t=1\na,1,2,3\nb,4,5,6\n")
    assert s.ids == ("a", "b")
    assert s.grid.tolist() == [0, 0.5, 1]


def test_grid_header_without_ids():
    s = _read("t=0,t=1\n1,2\n3,4\n")
    assert s.grid.tolist() == [0, 1] and s.ids is None


def test_id_header_with_plain_column_names():
    s = _read("id,v1,v2\nx,1,2\ny,3,4\n")
    assert s.grid is None and s.ids == ("x", "y")


def test_blank_lines_skipped():
    assert _read("1,2\n\n3,4\n").n == 2


@pytest.mark.parametrize("text, row, col", [
    ("1,2,3\n4,x,6\n", 2, 2),
    ("1,2,3\n4,5\n", 2, None),
    ("1,2,nan\n", 1, 3),
    ("id,t=0,t=1\na,1,oops\n", 2, 3),
    ("t=0,t=a\n1,2\n", 1, 2),
])
def test_malformed_reports_location(text, row, col):
    with pytest.raises(CSVFormatError) as info:
        _read(text)
    assert info.value.row == row
    assert info.value.column == col
    assert isinstance(info.value, InvalidData)
    assert f"row {row}" in str(info.value)


def test_empty_and_header_only():
    with pytest.raises(CSVFormatError):
        _read("")
    with pytest.raises(CSVFormatError):
        _read("t=0,t=1\n")


def test_mixed_grid_header_rejected():
    with pytest.raises(CSVFormatError):
        _read("id,t=0,x\na,1,2\n")


def test_single_column_rejected():
    with pytest.raises(InvalidData):
        _read("1\n2\n")


def test_missing_file():
    with pytest.raises(InvalidData, match="cannot read"):
        read_curves("/nonexistent/curves.csv")


def test_round_trip_full_precision(tmp_path):
    rng = np.random.default_rng(3)
    s = FunctionalSample(rng.normal(size=(7, 5)) * 1e3, grid=np.linspace(0, 1, 5),
                         ids=[f"c{i}" for i in range(7)])
    path = tmp_path / "c.csv"
    write_curves(s, path)
    back = read_curves(path)
    np.testing.assert_array_equal(back.values, s.values)
    np.testing.assert_array_equal(back.grid, s.grid)
    assert back.ids == s.ids


def test_write_without_grid_or_ids():
    s = FunctionalSample([[1.5, 2.0]])
    buf = io.StringIO()
    write_curves(s, buf, with_grid=False, with_ids=False)
    assert buf.getvalue() == "1.5,2\n"


def test_labels_round_trip(tmp_path):
    lab = generate(SimulationSpec(model=8, n=40, d=5, seed=2))
    write_labels(lab, tmp_path / "labels.csv")
    got = read_labels(tmp_path / "labels.csv")
    assert sum(got.values()) == 4
    assert [got[str(i)] for i in range(40)] == lab.is_outlier.tolist()
