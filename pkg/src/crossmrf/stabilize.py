"""Numerical stabilization of the block construction.

Spectral normalization rescales each cross-regression block so repeated
products of B blocks cannot amplify rounding error; a geometric ladder of
diagonal shifts on the conditional covariances restores positive
definiteness when rounding breaks it; a second ladder picks the largest
threshold that can zero small precision entries without losing positive
definiteness.
"""

from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp

from .errors import AsymmetricInput, RegularizationExhausted

__all__ = [
    "StabilizeConfig",
    "spectral_norm",
    "spectral_normalize",
    "regularize_diag",
    "is_pd",
    "condition_number",
    "find_min_regularization",
    "threshold_precision",
    "threshold_ladder",
    "regularization_ladder",
]


@dataclass(frozen=True)
class StabilizeConfig:
    """Stabilization policy.

    Parameters
    ----------
    spec_norm_target : float
        Spectral norm of every B block after normalization, in (0, 1).
    reg_init, reg_growth : float
        Diagonal shift ladder ``reg_init * reg_growth**k``.
    threshold_init, threshold_shrink : float
        Threshold ladder ``threshold_init / threshold_shrink**k``.
    max_iters : int
        Length of both ladders.
    normalize, regularize : bool
        Switch spectral normalization and the shift ladder off to reproduce
        the unstabilized construction (a single build with zero shift).
    """

    spec_norm_target: float = 0.99
    reg_init: float = 1e-9
    reg_growth: float = 10.0
    threshold_init: float = 1e-3
    threshold_shrink: float = 10.0
    max_iters: int = 12
    normalize: bool = True
    regularize: bool = True

    def __post_init__(self):
        if not 0 < self.spec_norm_target < 1:
            raise ValueError("spec_norm_target must lie in (0, 1)")
        if not (self.reg_init > 0 and self.reg_growth > 1):
            raise ValueError("need reg_init > 0 and reg_growth > 1")
        if not (self.threshold_init > 0 and self.threshold_shrink > 1):
            raise ValueError("need threshold_init > 0 and threshold_shrink > 1")
        if self.max_iters < 1:
            raise ValueError("max_iters must be at least 1")

    @classmethod
    def original(cls, **kw):
        """No spectral normalization and no diagonal shift."""
        return cls(normalize=False, regularize=False, **kw)


def regularization_ladder(cfg):
    return [cfg.reg_init * cfg.reg_growth ** k for k in range(cfg.max_iters)]


def threshold_ladder(cfg):
    return [cfg.threshold_init / cfg.threshold_shrink ** k for k in range(cfg.max_iters)]


def spectral_norm(b):
    """Largest singular value of ``b``, dense or scipy sparse.

    For a sparse block the Gram matrix ``b.T @ b`` is formed and, when it is
    banded (translation kernels with compact support), its top eigenvalue
    comes from a banded symmetric eigensolver.  Iterative methods converge
    slowly here because the leading singular values of these near-Toeplitz
    blocks are almost equal.
    """
    if not sp.issparse(b):
        b = np.asarray(b, dtype=float)
        return float(np.linalg.norm(b, 2)) if b.size and np.any(b) else 0.0
    if b.nnz == 0 or not np.any(b.data):
        return 0.0
    g = (b.T @ b).tocoo()
    n = g.shape[0]
    w = int(np.max(np.abs(g.col - g.row)))
    if w + 1 > n // 4:
        top = sla.eigh(g.toarray(), subset_by_index=[n - 1, n - 1], eigvals_only=True)[0]
    else:
        ab = np.zeros((w + 1, n))
        up = g.col >= g.row
        ab[w + g.row[up] - g.col[up], g.col[up]] = g.data[up]
        top = sla.eig_banded(ab, lower=False, eigvals_only=True, select="i",
                             select_range=(n - 1, n - 1))[0]
    return float(np.sqrt(max(top, 0.0)))


def spectral_normalize(b, target=0.99):
    """Rescale ``b`` so its spectral norm equals ``target``.

    A zero matrix is returned unchanged.  The sparsity pattern is preserved.
    """
    s = spectral_norm(b)
    if s == 0.0:
        return b
    return b * (target / s)


def regularize_diag(m, delta):
    if delta < 0:
        raise ValueError("delta must be nonnegative")
    if sp.issparse(m):
        return (m + delta * sp.identity(m.shape[0], format="csr")).tocsr()
    return m + delta * np.eye(m.shape[0])


def is_pd(m, sym_tol=1e-10):
    """Cholesky certificate of positive definiteness.

    ``m`` must be symmetric to ``sym_tol`` relative to its largest entry;
    non-finite matrices are reported as not PD.
    """
    if sp.issparse(m):
        m = m.toarray()
    m = np.asarray(m, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise AsymmetricInput(f"expected a square matrix, got shape {m.shape}")
    if not np.isfinite(m).all():
        return False
    scale = max(1.0, float(np.max(np.abs(m)))) if m.size else 1.0
    if m.size and np.max(np.abs(m - m.T)) > sym_tol * scale:
        raise AsymmetricInput("matrix is not symmetric within tolerance")
    try:
        sla.cholesky(0.5 * (m + m.T), lower=True, check_finite=False)
    except np.linalg.LinAlgError:
        return False
    return True


def condition_number(b):
    """2-norm condition number; ``inf`` for singular input."""
    if sp.issparse(b):
        b = b.toarray()
    s = np.linalg.svd(np.asarray(b, dtype=float), compute_uv=False)
    if s[-1] == 0:
        return float("inf")
    return float(s[0] / s[-1])


def find_min_regularization(builder, cfg):
    """Smallest shift on the ladder giving PD covariance and precision.

    ``builder(delta)`` returns an object with ``sigma`` and ``precision``
    attributes.  Returns ``(delta, built)``.
    """
    for delta in regularization_ladder(cfg):
        built = builder(delta)
        try:
            ok = is_pd(built.sigma) and is_pd(built.precision)
        except AsymmetricInput:
            # rounding-level asymmetry in a badly scaled build counts as a failure
            ok = False
        if ok:
            return delta, built
    raise RegularizationExhausted(
        f"no shift up to {regularization_ladder(cfg)[-1]:g} gives positive definite matrices"
    )


def _apply_threshold(q, t):
    out = np.where(np.abs(q) < t, 0.0, q)
    np.fill_diagonal(out, np.diagonal(q))
    return out


def threshold_precision(q, cfg):
    """Largest ladder threshold whose zeroing keeps ``q`` positive definite.

    Entries with ``|q_ij| < t`` become exact zeros (the diagonal is kept).
    Returns ``(t, q_t)``; ``(0.0, q)`` when no ladder value works.
    """
    q = np.asarray(q, dtype=float)
    for t in threshold_ladder(cfg):
        qt = _apply_threshold(q, t)
        if is_pd(qt):
            return t, qt
    return 0.0, q
