"""Operation counting for the block arithmetic of the assembly engine.

Counts are analytic (per operand shape and stored nonzeros), not measured,
so they are deterministic and machine independent.
"""

from collections import Counter

import numpy as np
import scipy.sparse as sp

__all__ = ["FlopCounter", "matmul"]


def _nnz(m):
    return m.nnz if sp.issparse(m) else None


class FlopCounter:
    """Accumulates floating-point operation counts by category.

    Conventions: dense ``(m,k)@(k,n)`` is ``2mkn``; a sparse operand with
    ``nnz`` stored entries times a dense ``n``-column operand is
    ``2 nnz n``; sparse times sparse counts one multiply-add per matching
    pair of stored entries; a Cholesky inversion is ``n^3``; a banded
    Cholesky of bandwidth ``w`` is ``n w^2`` and each banded solve of ``k``
    right-hand sides is ``4 n w k``; adding dense ``n x n`` blocks is ``n^2``.
    """

    def __init__(self):
        self.by_kind = Counter()

    @property
    def total(self):
        return sum(self.by_kind.values())

    def add(self, kind, count):
        self.by_kind[kind] += int(count)

    def matmul(self, a, b):
        m, k = a.shape
        n = b.shape[1]
        na, nb = _nnz(a), _nnz(b)
        if na is None and nb is None:
            self.add("matmul", 2 * m * k * n)
        elif na is not None and nb is not None:
            # one multiply-add per (a_ij, b_jl) pair sharing j
            a_cols = np.diff(a.tocsc().indptr)
            b_rows = np.diff(b.tocsr().indptr)
            self.add("spmatmul", 2 * int(a_cols @ b_rows))
        elif na is not None:
            self.add("spmatmul", 2 * na * n)
        else:
            self.add("spmatmul", 2 * nb * m)

    def cholesky_inverse(self, n):
        self.add("cholesky", n ** 3)

    def banded_cholesky(self, n, w):
        self.add("banded", n * max(w, 1) ** 2)

    def banded_solve(self, n, w, k):
        self.add("banded", 4 * n * max(w, 1) * k)

    def block_add(self, shape):
        self.add("add", int(np.prod(shape)))

    def __repr__(self):
        return f"FlopCounter(total={self.total}, by_kind={dict(self.by_kind)})"


def matmul(a, b, counter=None):
    """``a @ b`` with optional counting; a sparse result becomes CSR."""
    if counter is not None:
        counter.matmul(a, b)
    out = a @ b
    if sp.issparse(out):
        return out.tocsr()
    return np.asarray(out)
