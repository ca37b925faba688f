"""Regular 1D/2D lattices of spatial sites.

Sites are generated with inclusive endpoints and ordered lexicographically
(row-major in 2D).  Distances are Euclidean on raw coordinates.
"""

from dataclasses import dataclass
from functools import cached_property
import itertools
import math

import numpy as np
import scipy.sparse as sp
from scipy.spatial import cKDTree

from .errors import (
    DegenerateDomain,
    GridError,
    IndexOutOfRange,
    NonPositiveRadius,
    NonPositiveStep,
)

__all__ = ["Grid", "NeighborhoodMatrix", "make_grid", "displacement", "adjacency"]

# relative slack for floor-based counting and radius comparisons; lattice
# coordinates are lo + k*step and carry rounding of that order
_EPS = 1e-9


@dataclass(frozen=True, eq=False)
class Grid:
    """Ordered sites of a regular lattice.

    Attributes
    ----------
    lo, hi, step : tuple of float
        Per-axis bounds and spacing.
    shape : tuple of int
        Number of sites per axis.
    sites : ndarray, shape (n, dim)
        Site coordinates, read-only.
    """

    lo: tuple
    hi: tuple
    step: tuple
    shape: tuple
    sites: np.ndarray

    @property
    def dim(self):
        return len(self.shape)

    @property
    def n(self):
        return self.sites.shape[0]

    @property
    def coords(self):
        """Site coordinates; a flat array for 1D grids."""
        return self.sites[:, 0] if self.dim == 1 else self.sites

    def _check(self, i):
        if not 0 <= i < self.n:
            raise IndexOutOfRange(f"site index {i} outside [0, {self.n})")

    def displacement(self, i, j):
        return displacement(self, i, j)

    def distance(self, i, j):
        return float(np.linalg.norm(np.atleast_1d(displacement(self, i, j))))

    @cached_property
    def displacements(self):
        """All signed displacements ``s_j - s_i`` indexed ``[i, j]``.

        Shape ``(n, n)`` in 1D and ``(n, n, 2)`` in 2D.
        """
        d = self.sites[None, :, :] - self.sites[:, None, :]
        d = d[..., 0] if self.dim == 1 else d
        d.flags.writeable = False
        return d

    @cached_property
    def distances(self):
        d = self.displacements
        out = np.abs(d) if self.dim == 1 else np.sqrt((d ** 2).sum(-1))
        out.flags.writeable = False
        return out

    def __repr__(self):
        return f"Grid(dim={self.dim}, shape={self.shape}, lo={self.lo}, hi={self.hi}, step={self.step})"


def _as_axes(value, dim, name):
    arr = np.atleast_1d(np.asarray(value, dtype=float))
    if arr.size == 1 and dim > 1:
        arr = np.repeat(arr, dim)
    if arr.shape != (dim,):
        raise GridError(f"{name} must have {dim} component(s), got {value!r}")
    return tuple(float(v) for v in arr)


def make_grid(dim, lo, hi, step):
    """Build a regular grid with inclusive endpoints.

    Parameters
    ----------
    dim : {1, 2}
    lo, hi, step : float or sequence of float
        Per-axis bounds and spacing; scalars are broadcast in 2D.

    Examples
    --------
    >>> make_grid(1, -1, 1, 0.05).n
    41
    >>> make_grid(2, (0, 0), (1, 1), 0.5).n
    9
    """
    if dim not in (1, 2):
        raise GridError(f"dim must be 1 or 2, got {dim!r}")
    lo = _as_axes(lo, dim, "lo")
    hi = _as_axes(hi, dim, "hi")
    step = _as_axes(step, dim, "step")
    axes = []
    for a, b, h in zip(lo, hi, step):
        if not h > 0:
            raise NonPositiveStep(f"step must be positive, got {h}")
        if not b > a:
            raise DegenerateDomain(f"need hi > lo, got [{a}, {b}]")
        count = math.floor((b - a) / h + _EPS) + 1
        if count < 2:
            raise DegenerateDomain(f"axis [{a}, {b}] with step {h} has fewer than 2 sites")
        axes.append(a + h * np.arange(count))
    sites = np.array(list(itertools.product(*axes)), dtype=float)
    sites.flags.writeable = False
    return Grid(lo, hi, step, tuple(len(a) for a in axes), sites)


def displacement(g, i, j):
    """Signed displacement ``s_j - s_i``: a float in 1D, a 2-vector in 2D."""
    g._check(i)
    g._check(j)
    d = g.sites[j] - g.sites[i]
    return float(d[0]) if g.dim == 1 else d


@dataclass(frozen=True, eq=False)
class NeighborhoodMatrix:
    """Symmetric 0/1 site adjacency with zero diagonal, stored as CSR."""

    h: sp.csr_matrix
    radius: float

    @property
    def n(self):
        return self.h.shape[0]

    def toarray(self):
        return self.h.toarray()

    @cached_property
    def spectral_radius(self):
        """Largest absolute eigenvalue of ``h``."""
        if self.h.nnz == 0:
            return 0.0
        if self.n <= 400:
            return float(np.max(np.abs(np.linalg.eigvalsh(self.h.toarray()))))
        from scipy.sparse.linalg import eigsh

        # nonnegative symmetric: the Perron root is the top algebraic eigenvalue
        val = eigsh(self.h.astype(float), k=1, which="LA", return_eigenvectors=False, tol=1e-12)
        return float(val[0])

    @cached_property
    def bandwidth(self):
        coo = self.h.tocoo()
        return int(np.max(np.abs(coo.row - coo.col))) if coo.nnz else 0


def adjacency(g, radius):
    """Neighborhood matrix with ``h[i, j] = 1`` iff ``0 < dist(s_i, s_j) <= radius``."""
    if not radius > 0:
        raise NonPositiveRadius(f"radius must be positive, got {radius}")
    tree = cKDTree(g.sites)
    pairs = tree.query_pairs(radius * (1 + _EPS), output_type="ndarray")
    n = g.n
    if len(pairs) == 0:
        h = sp.csr_matrix((n, n))
    else:
        rows = np.concatenate([pairs[:, 0], pairs[:, 1]])
        cols = np.concatenate([pairs[:, 1], pairs[:, 0]])
        h = sp.csr_matrix((np.ones(len(rows)), (rows, cols)), shape=(n, n))
    h.sort_indices()
    return NeighborhoodMatrix(h, float(radius))
