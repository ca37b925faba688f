import json

import numpy as np
import pytest
import scipy.sparse as sp
from hypothesis import given, strategies as st
from hypothesis.extra.numpy import arrays

from crossmrf.errors import MatrixFormatError
from crossmrf.io import (
    heatmap_triplets,
    read_matrix,
    read_matrix_csv,
    write_heatmap,
    write_matrix,
    write_matrix_csv,
    write_metadata,
)


def test_binary_header_layout(tmp_path):
    m = np.array([[1.0, 2.0, 3.0], [4.0, 5.0, 6.0]])
    path = tmp_path / "m.gmrf"
    write_matrix(path, m)
    raw = path.read_bytes()
    assert raw[:4] == b"GMRF" and raw[4] == 1
    assert int.from_bytes(raw[5:13], "little") == 2
    assert int.from_bytes(raw[13:21], "little") == 3
    assert len(raw) == 21 + 48
    np.testing.assert_array_equal(read_matrix(path), m)
    write_matrix(path, sp.identity(3, format="csr"))
    np.testing.assert_array_equal(read_matrix(path), np.eye(3))


def test_binary_errors(tmp_path):
    p = tmp_path / "bad"
    p.write_bytes(b"GM")
    with pytest.raises(MatrixFormatError):
        read_matrix(p)
    p.write_bytes(b"XXXX" + bytes(17))
    with pytest.raises(MatrixFormatError):
        read_matrix(p)
    write_matrix(p, np.eye(2))
    p.write_bytes(p.read_bytes()[:-8])
    with pytest.raises(MatrixFormatError):
        read_matrix(p)
    with pytest.raises(MatrixFormatError):
        write_matrix(p, np.ones(3))


def test_heatmap_pooling_keeps_isolated_entries(tmp_path):
    m = np.zeros((10, 10))
    m[7, 3] = 100.0
    t = heatmap_triplets(m, max_size=5)
    assert t.shape == (25, 3)
    hit = t[t[:, 2] > 0]
    np.testing.assert_allclose(hit, [[6, 2, 2.0]])
    assert np.all(t[t[:, 2] <= 0, 2] == pytest.approx(-12))
    path = tmp_path / "h.csv"
    write_heatmap(path, m, max_size=5)
    lines = path.read_text().splitlines()
    assert lines[0] == "row,col,log10_abs" and len(lines) == 26


def test_metadata_json(tmp_path):
    path = tmp_path / "meta.json"
    write_metadata(path, {"layout": {1: slice(0, 5)}, "x": np.float64(1.5), "s": {3, 1},
                          "a": np.arange(2)})
    meta = json.loads(path.read_text())
    assert meta == {"layout": {"1": [0, 5]}, "x": 1.5, "s": [1, 3], "a": [0, 1]}


@given(arrays(np.float64, st.tuples(st.integers(1, 6), st.integers(1, 6)),
              elements=st.floats(allow_nan=False, allow_infinity=False)))
def test_round_trips_are_exact(tmp_path_factory, m):
    d = tmp_path_factory.mktemp("rt")
    write_matrix(d / "a.gmrf", m)
    np.testing.assert_array_equal(read_matrix(d / "a.gmrf"), m)
    write_matrix_csv(d / "a.csv", m)
    np.testing.assert_array_equal(read_matrix_csv(d / "a.csv").reshape(m.shape), m)
