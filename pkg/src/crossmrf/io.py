"""Matrix files, heatmap exports and run metadata.

Binary matrix layout (all little-endian)::

    b"GMRF"  version:uint8  rows:uint64  cols:uint64  values:float64[rows*cols]

with values in row-major order.
"""

import json
import math
import struct

import numpy as np
import scipy.sparse as sp

from .errors import MatrixFormatError

__all__ = [
    "MAGIC",
    "VERSION",
    "write_matrix",
    "read_matrix",
    "write_matrix_csv",
    "read_matrix_csv",
    "heatmap_triplets",
    "write_heatmap",
    "write_metadata",
]

MAGIC = b"GMRF"
VERSION = 1
_HEADER = struct.Struct("<4sBQQ")


def _dense(m):
    return m.toarray() if sp.issparse(m) else np.asarray(m, dtype=float)


def write_matrix(path, m):
    m = np.ascontiguousarray(_dense(m), dtype="<f8")
    if m.ndim != 2:
        raise MatrixFormatError(f"expected a 2-D matrix, got {m.ndim} dimensions")
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(MAGIC, VERSION, m.shape[0], m.shape[1]))
        fh.write(m.tobytes(order="C"))


def read_matrix(path):
    with open(path, "rb") as fh:
        head = fh.read(_HEADER.size)
        if len(head) != _HEADER.size:
            raise MatrixFormatError(f"{path}: truncated header")
        magic, version, rows, cols = _HEADER.unpack(head)
        if magic != MAGIC:
            raise MatrixFormatError(f"{path}: bad magic {magic!r}")
        if version != VERSION:
            raise MatrixFormatError(f"{path}: unsupported version {version}")
        body = fh.read()
    if len(body) != 8 * rows * cols:
        raise MatrixFormatError(f"{path}: expected {rows * cols} values, found {len(body) // 8}")
    return np.frombuffer(body, dtype="<f8").reshape(rows, cols).astype(float)


def write_matrix_csv(path, m):
    # 17 significant digits round-trip float64 exactly
    np.savetxt(path, _dense(m), delimiter=",", fmt="%.17g")


def read_matrix_csv(path):
    return np.atleast_2d(np.loadtxt(path, delimiter=",", dtype=float))


def heatmap_triplets(m, max_size=512):
    """``(row, col, log10(|v| + 1e-12))`` triplets on a grid of at most ``max_size`` per axis.

    Larger matrices are pooled over square tiles keeping the largest
    magnitude, so isolated nonzeros stay visible; ``row``/``col`` index the
    top-left entry of each tile.
    """
    m = np.abs(_dense(m))
    rows, cols = m.shape
    k = max(1, math.ceil(max(rows, cols) / max_size))
    if k > 1:
        pr, pc = -rows % k, -cols % k
        m = np.pad(m, ((0, pr), (0, pc)))
        m = m.reshape(m.shape[0] // k, k, m.shape[1] // k, k).max(axis=(1, 3))
    r, c = np.indices(m.shape)
    return np.column_stack([(r * k).ravel(), (c * k).ravel(), np.log10(m.ravel() + 1e-12)])


def write_heatmap(path, m, max_size=512):
    t = heatmap_triplets(m, max_size)
    with open(path, "w") as fh:
        fh.write("row,col,log10_abs\n")
        for r, c, v in t:
            fh.write(f"{int(r)},{int(c)},{v:.6g}\n")


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple, set, frozenset)):
        return [_jsonable(v) for v in (sorted(x) if isinstance(x, (set, frozenset)) else x)]
    if isinstance(x, np.ndarray):
        return x.tolist()
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (np.floating,)):
        return float(x)
    if isinstance(x, slice):
        return [x.start, x.stop]
    return x


def write_metadata(path, meta):
    with open(path, "w") as fh:
        json.dump(_jsonable(meta), fh, indent=2, sort_keys=True)
        fh.write("\n")
