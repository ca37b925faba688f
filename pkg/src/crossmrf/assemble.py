"""Graph-guided construction of the joint covariance and precision.

Fields are processed in topological order.  With ``B`` the block-lower-
triangular matrix of cross-regression blocks ``B_rt`` (``t`` a parent of
``r``) and ``D`` the block-diagonal matrix of conditional covariances,

    Sigma = (I - B)^{-1} D (I - B)^{-T}.

Both Sigma and its inverse are grown one field at a time.  The covariance
path fills block row ``r`` from its parents' rows::

    Sigma_rc = sum_{t in Pa(r)} B_rt Sigma_tc          (c before r)
    Sigma_rr = sum_{t in Pa(r)} Sigma_rt B_rt^T + D_rr

and the precision path appends a field through the Schur complement update
``BK1 = SG^{-1} + (SG^{-1} C D^{-1})(R SG^{-1})``, ``BK2 = -SG^{-1} C D^{-1}``,
``BK3 = BK2^T``, ``BK4 = D^{-1}``, where ``SG`` is the covariance of the
fields already placed, ``R`` the new block row and ``C = R^T``.  Because
``C = SG B_r^T`` with ``B_r`` the new row of regression blocks,
``SG^{-1} C`` is just the stacked ``B_rt^T``; the default ``structured``
method uses that identity so the precision path never touches Sigma and
only writes blocks that belong to moral-graph neighbours.  ``method="dense"``
evaluates the update literally with full matrix products, as a cross-check.
"""

from dataclasses import dataclass, field
from functools import cached_property
import warnings

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp
from scipy.linalg import lapack

from .errors import (
    CholeskyFailure,
    InsufficientSamples,
    KernelError,
    MissingKernel,
    NonPdBlock,
    PdFailure,
    ShapeMismatch,
)
from .flops import matmul
from .graph import FieldDag
from .grid import adjacency
from .kernels import CarSpec, MaternSpec, b_block, car_precision, matern_block, taper_block
from .stabilize import (
    StabilizeConfig,
    find_min_regularization,
    is_pd,
    spectral_normalize,
    threshold_precision,
)

__all__ = [
    "MODES",
    "ModelSpec",
    "JointPair",
    "Build",
    "generate",
    "build_joint",
    "logdet_shortcut",
    "quadratic_form",
    "sample",
    "empirical_cross_corr",
]

MODES = ("geostat", "car", "taper")

# blocks sparser than this are stored as CSR
_SPARSE_DENSITY = 0.3


@dataclass(frozen=True, eq=False)
class ModelSpec:
    """Everything needed to build one joint model.

    Parameters
    ----------
    dag : FieldDag
    grid : Grid
    mode : {"geostat", "car", "taper"}
        How the conditional blocks ``D_rr`` are specified: Matern
        covariances, CAR precisions, or Matern covariances tapered at
        ``taper_R``.
    field_specs : MaternSpec, CarSpec or dict
        One spec for every field, or a mapping ``label -> spec``.
    cross_kernels : dict
        ``(parent, child) -> TriWaveSpec | WendlandSpec``.
    default_kernel : optional
        Used for edges missing from ``cross_kernels``.
    radius : float, optional
        CAR neighbourhood radius; defaults to the grid step (first-order
        neighbours).
    taper_R : float
        Taper support radius in taper mode.
    stabilize : StabilizeConfig
    """

    dag: FieldDag
    grid: object
    mode: str = "geostat"
    field_specs: object = None
    cross_kernels: dict = field(default_factory=dict)
    default_kernel: object = None
    radius: float = None
    taper_R: float = 0.5
    stabilize: StabilizeConfig = field(default_factory=StabilizeConfig)

    def __post_init__(self):
        if self.mode not in MODES:
            raise KernelError(f"mode must be one of {MODES}, got {self.mode!r}")
        want = CarSpec if self.mode == "car" else MaternSpec
        fs = self.field_specs
        if fs is None:
            fs = want()
        if not isinstance(fs, dict):
            fs = {v: fs for v in range(1, self.dag.p + 1)}
        fs = dict(fs)
        for v in range(1, self.dag.p + 1):
            if v not in fs:
                raise KernelError(f"field {v} has no univariate spec")
            if not isinstance(fs[v], want):
                raise KernelError(
                    f"{self.mode} mode needs {want.__name__} for field {v}, got {type(fs[v]).__name__}"
                )
        object.__setattr__(self, "field_specs", fs)
        kernels = {}
        for t, r in sorted(self.dag.edges):
            k = self.cross_kernels.get((t, r), self.default_kernel)
            if k is None:
                raise MissingKernel(f"edge {t}>{r} has no cross kernel")
            kernels[(t, r)] = k
        object.__setattr__(self, "cross_kernels", kernels)
        if self.radius is None:
            object.__setattr__(self, "radius", min(self.grid.step))
        if self.mode == "taper" and not self.taper_R > 0:
            raise KernelError(f"taper radius must be positive, got {self.taper_R}")

    @property
    def p(self):
        return self.dag.p

    @property
    def n(self):
        return self.grid.n

    @property
    def order(self):
        return self.dag.order

    @cached_property
    def layout(self):
        """``label -> slice`` of the joint index; blocks follow topological order."""
        n = self.n
        return {v: slice(k * n, (k + 1) * n) for k, v in enumerate(self.order)}

    @cached_property
    def neighborhood(self):
        return adjacency(self.grid, self.radius)


def _maybe_sparse(b):
    if np.count_nonzero(b) < _SPARSE_DENSITY * b.size:
        return sp.csr_matrix(b)
    return b


def _dense(m):
    return m.toarray() if sp.issparse(m) else m


def cross_block(spec, t, r):
    """Cross-regression block ``B_rt`` after the configured normalization."""
    b = b_block(spec.grid, spec.cross_kernels[(t, r)])
    b = _maybe_sparse(b)
    cfg = spec.stabilize
    if cfg.normalize:
        b = spectral_normalize(b, cfg.spec_norm_target)
    return b


def _chol_inverse(m, counter, what):
    """Inverse and log-determinant of an SPD matrix via LAPACK potrf/potri."""
    n = m.shape[0]
    c, info = lapack.dpotrf(m, lower=False, clean=False, overwrite_a=False)
    if info != 0:
        raise CholeskyFailure(f"{what} is not numerically positive definite")
    logdet = 2.0 * float(np.sum(np.log(np.diagonal(c))))
    inv, info = lapack.dpotri(c, lower=False, overwrite_c=True)
    if info != 0:
        raise CholeskyFailure(f"{what} is singular")
    # potri fills the upper triangle only
    inv = np.triu(inv) + np.triu(inv, 1).T
    if counter is not None:
        counter.cholesky_inverse(n)
    return inv, logdet


def _banded(q):
    """Upper banded storage of a symmetric sparse matrix."""
    q = q.tocoo()
    w = int(np.max(q.col - q.row)) if q.nnz else 0
    ab = np.zeros((w + 1, q.shape[0]))
    keep = q.col >= q.row
    ab[w + q.row[keep] - q.col[keep], q.col[keep]] = q.data[keep]
    return ab, w


def _banded_inverse(q, counter, what):
    """Covariance and log-determinant from a banded precision."""
    n = q.shape[0]
    ab, w = _banded(q)
    try:
        cb = sla.cholesky_banded(ab, lower=False, check_finite=False)
    except np.linalg.LinAlgError as exc:
        raise CholeskyFailure(f"{what} is not numerically positive definite") from exc
    cov = sla.cho_solve_banded((cb, False), np.eye(n), check_finite=False)
    cov = 0.5 * (cov + cov.T)
    if counter is not None:
        counter.banded_cholesky(n, w)
        counter.banded_solve(n, w, n)
    # log det of the covariance is minus that of the precision
    return cov, -2.0 * float(np.sum(np.log(cb[w])))


def _car_logdet(q, counter):
    ab, w = _banded(q)
    try:
        cb = sla.cholesky_banded(ab, lower=False, check_finite=False)
    except np.linalg.LinAlgError as exc:
        raise CholeskyFailure("CAR precision is not numerically positive definite") from exc
    if counter is not None:
        counter.banded_cholesky(q.shape[0], w)
    return -2.0 * float(np.sum(np.log(cb[w])))


def conditional_block(spec, r, delta=0.0, with_cov=True, counter=None):
    """``(D_rr, D_rr^{-1}, logdet D_rr)`` for field ``r`` with diagonal shift ``delta``.

    In CAR mode the shift goes on the precision and ``D_rr^{-1}`` is the
    sparse CAR matrix itself; ``D_rr`` is ``None`` unless ``with_cov``.
    """
    n = spec.n
    fs = spec.field_specs[r]
    if spec.mode == "car":
        q = car_precision(spec.neighborhood, fs)
        if delta:
            q = (q + delta * sp.identity(n, format="csr")).tocsr()
        if with_cov:
            d, logdet = _banded_inverse(q, counter, f"CAR precision of field {r}")
        else:
            d, logdet = None, _car_logdet(q, counter)
        return d, q, logdet
    d = matern_block(spec.grid, fs, check=False)
    if spec.mode == "taper":
        d = taper_block(d, spec.grid, spec.taper_R)
    if delta:
        d = d + delta * np.eye(n)
    dinv, logdet = _chol_inverse(d, counter, f"conditional block of field {r}")
    return d, dinv, logdet


class Build:
    """Raw output of one pass of the construction at a fixed shift."""

    def __init__(self, spec, delta):
        self.spec = spec
        self.delta = delta
        self.b_blocks = {}
        self.d_blocks = {}
        self.dinv_blocks = {}
        self.logdet_d = {}
        self.q_blocks = {}
        self.sigma = None
        self._q_dense = None

    @cached_property
    def precision(self):
        if self._q_dense is not None:
            return self._q_dense
        n, p = self.spec.n, self.spec.p
        q = np.zeros((n * p, n * p))
        for (i, j), blk in self.q_blocks.items():
            blk = _dense(blk)
            if i == j:
                # products B^T D^-1 B round asymmetrically
                blk = 0.5 * (blk + blk.T)
            q[i * n:(i + 1) * n, j * n:(j + 1) * n] = blk
            if i != j:
                q[j * n:(j + 1) * n, i * n:(i + 1) * n] = blk.T
        return q


def _accumulate(blocks, key, value, counter):
    value = _dense(value)
    if counter is not None:
        counter.block_add(value.shape)
    if key in blocks:
        blocks[key] += value
    else:
        blocks[key] = np.array(value, dtype=float)


def generate(spec, delta=0.0, with_sigma=True, method="structured", counter=None):
    """One pass of the construction with diagonal shift ``delta``.

    Parameters
    ----------
    spec : ModelSpec
    delta : float
        Shift added to every conditional covariance (CAR mode: precision).
    with_sigma : bool
        Also run the covariance path.  The precision path alone is what
        the construction-cost benchmarks time.
    method : {"structured", "dense"}
        ``"dense"`` runs the literal Schur-complement update and needs
        the covariance path.
    counter : FlopCounter, optional
    """
    if method not in ("structured", "dense"):
        raise ValueError(f"unknown method {method!r}")
    if method == "dense" and not with_sigma:
        raise ValueError("the dense precision update needs the covariance path")
    n, p = spec.n, spec.p
    order = spec.order
    pos = {v: k for k, v in enumerate(order)}
    dag = spec.dag
    out = Build(spec, delta)
    if with_sigma:
        out.sigma = np.zeros((n * p, n * p))
    S = out.sigma

    def blk(k):
        return slice(k * n, (k + 1) * n)

    for k, r in enumerate(order):
        pn = sorted(dag.parents(r), key=pos.get)
        for t in pn:
            out.b_blocks[(t, r)] = cross_block(spec, t, r)
        d, dinv, logdet = conditional_block(spec, r, delta, with_sigma, counter)
        out.d_blocks[r] = d
        out.dinv_blocks[r] = dinv
        out.logdet_d[r] = logdet

        if with_sigma:
            for c in range(k):
                acc = np.zeros((n, n))
                for t in pn:
                    acc += matmul(out.b_blocks[(t, r)], S[blk(pos[t]), blk(c)], counter)
                S[blk(k), blk(c)] = acc
                S[blk(c), blk(k)] = acc.T
            srr = np.array(d, dtype=float)
            for t in pn:
                srr += matmul(S[blk(k), blk(pos[t])], out.b_blocks[(t, r)].T, counter)
            S[blk(k), blk(k)] = 0.5 * (srr + srr.T)

        if method == "structured":
            _accumulate(out.q_blocks, (k, k), dinv, counter)
            for t in pn:
                btd = matmul(out.b_blocks[(t, r)].T, dinv, counter)
                out.q_blocks[(pos[t], k)] = -_dense(btd)
                for u in pn:
                    if pos[u] >= pos[t]:
                        _accumulate(out.q_blocks, (pos[t], pos[u]),
                                    matmul(btd, out.b_blocks[(u, r)], counter), counter)
        else:
            out._q_dense = _dense_update(out, k, n, counter)
    return out


def _dense_update(out, k, n, counter):
    """Literal Schur-complement update appending position ``k``."""
    r = out.spec.order[k]
    dinv = _dense(out.dinv_blocks[r])
    if k == 0:
        return np.array(dinv, dtype=float)
    sg_inv = out._q_dense
    S = out.sigma
    m = k * n
    R = S[m:m + n, :m]
    C = S[:m, m:m + n]
    cd = matmul(C, dinv, counter)
    bk2 = -matmul(sg_inv, cd, counter)
    rs = matmul(R, sg_inv, counter)
    bk1 = sg_inv + matmul(-bk2, rs, counter)
    bk3 = -matmul(matmul(dinv, R, counter), sg_inv, counter)
    q = np.empty((m + n, m + n))
    q[:m, :m] = 0.5 * (bk1 + bk1.T)
    q[:m, m:] = 0.5 * (bk2 + bk3.T)
    q[m:, :m] = q[:m, m:].T
    q[m:, m:] = dinv
    return q


@dataclass(frozen=True, eq=False)
class JointPair:
    """Constructed covariance and precision with their provenance.

    Attributes
    ----------
    sigma : ndarray
    precision : ndarray
        Thresholded precision (equal to ``precision_raw`` if thresholding
        was skipped).
    precision_raw : ndarray
        Precision before thresholding.
    layout : dict
        ``label -> slice`` of the joint index.
    applied_threshold, applied_regularization : float
    pd_certificates : dict
        ``{"sigma": bool, "precision": bool}``.
    b_blocks, d_blocks : dict
        Cross-regression blocks ``(parent, child) -> B`` and conditional
        covariances ``label -> D`` actually used.
    logdet_d : dict
        ``label -> log det D``.
    """

    sigma: np.ndarray
    precision: np.ndarray
    precision_raw: np.ndarray
    layout: dict
    order: tuple
    applied_threshold: float
    applied_regularization: float
    pd_certificates: dict
    b_blocks: dict
    d_blocks: dict
    logdet_d: dict

    @property
    def n(self):
        s = next(iter(self.layout.values()))
        return s.stop - s.start

    @property
    def p(self):
        return len(self.layout)

    @property
    def all_pd(self):
        return all(self.pd_certificates.values())

    def sigma_block(self, k, l):
        return self.sigma[self.layout[k], self.layout[l]]

    def precision_block(self, k, l, raw=False):
        q = self.precision_raw if raw else self.precision
        return q[self.layout[k], self.layout[l]]

    @cached_property
    def precision_csr(self):
        return sp.csr_matrix(self.precision)


def build_joint(spec, threshold=True, method="structured"):
    """Build a :class:`JointPair` under the spec's stabilization policy.

    With regularization enabled the smallest ladder shift giving positive
    definite covariance and precision is used; otherwise a single pass runs
    at zero shift and the certificates report what happened.
    """
    cfg = spec.stabilize

    def builder(delta):
        return generate(spec, delta, with_sigma=True, method=method)

    if cfg.regularize:
        delta, built = find_min_regularization(_tolerant(builder), cfg)
    else:
        delta, built = 0.0, builder(0.0)
    q_raw = built.precision
    if threshold:
        t, q = threshold_precision(q_raw, cfg)
    else:
        t, q = 0.0, q_raw
    certs = {"sigma": _safe_pd(built.sigma), "precision": _safe_pd(q)}
    return JointPair(
        sigma=built.sigma,
        precision=q,
        precision_raw=q_raw,
        layout=dict(spec.layout),
        order=spec.order,
        applied_threshold=t,
        applied_regularization=delta,
        pd_certificates=certs,
        b_blocks=built.b_blocks,
        d_blocks=built.d_blocks,
        logdet_d=built.logdet_d,
    )


class _NotPd:
    sigma = precision = np.array([[-1.0]])


def _tolerant(builder):
    """Turn a failed factorization during the ladder into a non-PD result."""

    def wrapped(delta):
        try:
            return builder(delta)
        except PdFailure:
            return _NotPd()

    return wrapped


def _safe_pd(m):
    # rounding can leave huge matrices visibly asymmetric; that is a failure
    # of the certificate, not a usage error
    try:
        return is_pd(m)
    except ValueError:
        return False


def logdet_shortcut(source):
    """``log det Sigma`` as the sum of ``log det D_rr``.

    ``source`` is a :class:`JointPair` or an iterable of conditional
    covariance blocks.
    """
    if isinstance(source, JointPair):
        return float(sum(source.logdet_d.values()))
    total = 0.0
    for d in source:
        try:
            c = sla.cholesky(_dense(np.asarray(d, dtype=float)), lower=True, check_finite=False)
        except np.linalg.LinAlgError as exc:
            raise NonPdBlock("conditional block is not positive definite") from exc
        total += 2.0 * float(np.sum(np.log(np.diagonal(c))))
    return total


def quadratic_form(q, y, return_touched=False):
    """``y^T Q y`` summed over the stored nonzeros of ``Q`` only."""
    q = q if sp.issparse(q) else sp.csr_matrix(np.asarray(q, dtype=float))
    q = q.tocoo()
    y = np.asarray(y, dtype=float)
    if y.ndim != 1 or q.shape != (y.size, y.size):
        raise ShapeMismatch(f"precision {q.shape} does not match vector of length {y.size}")
    val = float(np.sum(q.data * y[q.row] * y[q.col]))
    return (val, int(q.nnz)) if return_touched else val


def sample(jp, count, seed=0):
    """Draws from the recursive regression form, one field at a time.

    Field ``r`` is ``sum_t B_rt y_t + L_r z`` with ``L_r`` the Cholesky
    factor of ``D_rr`` and ``z`` standard normal.  Returns an array of
    shape ``(count, n p)`` in the joint layout.
    """
    if count < 0:
        raise ValueError("count must be nonnegative")
    n = jp.n
    out = np.zeros((count, n * jp.p))
    if count == 0:
        return out
    rng = np.random.default_rng(seed)
    for r in jp.order:
        try:
            L = sla.cholesky(jp.d_blocks[r], lower=True, check_finite=False)
        except np.linalg.LinAlgError as exc:
            raise CholeskyFailure(f"conditional block of field {r} is not positive definite") from exc
        x = rng.standard_normal((count, n)) @ L.T
        for (t, child), b in jp.b_blocks.items():
            if child == r:
                x += np.asarray((b @ out[:, jp.layout[t]].T).T)
        out[:, jp.layout[r]] = x
    return out


def empirical_cross_corr(draws, layout, k, l):
    """Sample correlation between field ``k`` at site ``i`` and field ``l`` at site ``j``."""
    draws = np.asarray(draws, dtype=float)
    m = draws.shape[0]
    if m < 2:
        raise InsufficientSamples(f"need at least 2 draws, got {m}")
    if m == 2:
        warnings.warn("two draws give a rank-one correlation estimate", RuntimeWarning, stacklevel=2)
    x = draws[:, layout[k]]
    y = draws[:, layout[l]]
    x = x - x.mean(0)
    y = y - y.mean(0)
    with np.errstate(invalid="ignore", divide="ignore"):
        c = (x.T @ y) / np.outer(np.sqrt((x * x).sum(0)), np.sqrt((y * y).sum(0)))
    return np.clip(c, -1.0, 1.0)
