"""Diagnostics on constructed matrices: sparsity, asymmetry, zero-block pattern."""

from dataclasses import dataclass
import itertools

import numpy as np
import scipy.sparse as sp

from .errors import ShapeMismatch

__all__ = [
    "SparsityReport",
    "sparsity_percent",
    "asymmetry",
    "ci_pattern",
    "inverse_residual",
]


@dataclass(frozen=True)
class SparsityReport:
    """Exact-zero statistics of a matrix.

    Attributes
    ----------
    zero_percent : float
        ``100 * (#entries equal to 0.0) / size``.
    per_block_pattern : ndarray of bool or None
        ``[k, l]`` is True when block ``(k, l)`` (positions in the layout) is
        identically zero; None unless a block size was given.
    threshold_used : float or None
    """

    zero_percent: float
    per_block_pattern: np.ndarray = None
    threshold_used: float = None


def _dense(m):
    return m.toarray() if sp.issparse(m) else np.asarray(m, dtype=float)


def sparsity_percent(m, block_size=None, threshold_used=None):
    m = _dense(m)
    zero = m == 0.0
    pct = 100.0 * float(np.count_nonzero(zero)) / m.size if m.size else 100.0
    pattern = None
    if block_size:
        if m.shape[0] % block_size or m.shape[1] % block_size:
            raise ShapeMismatch(f"shape {m.shape} is not a multiple of block size {block_size}")
        p, q = m.shape[0] // block_size, m.shape[1] // block_size
        pattern = zero.reshape(p, block_size, q, block_size).all(axis=(1, 3))
    return SparsityReport(pct, pattern, threshold_used)


def asymmetry(block):
    """``max |b_ij - b_ji|``."""
    b = _dense(block)
    if b.ndim != 2 or b.shape[0] != b.shape[1]:
        raise ShapeMismatch(f"asymmetry needs a square block, got shape {b.shape}")
    return float(np.max(np.abs(b - b.T))) if b.size else 0.0


def ci_pattern(jp, raw=False):
    """Field pairs whose precision cross block is identically zero."""
    labels = sorted(jp.layout)
    return frozenset(
        (k, l)
        for k, l in itertools.combinations(labels, 2)
        if not np.any(jp.precision_block(k, l, raw=raw))
    )


def inverse_residual(jp, raw=True):
    """``max |Sigma Q - I|`` with ``Q`` the raw (default) or thresholded precision."""
    s = _dense(jp.sigma)
    q = _dense(jp.precision_raw if raw else jp.precision)
    if s.shape != q.shape:
        raise ShapeMismatch(f"covariance {s.shape} and precision {q.shape} differ in shape")
    return float(np.max(np.abs(s @ q - np.eye(s.shape[0]))))
