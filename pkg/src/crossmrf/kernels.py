"""Scalar kernels and the n-by-n blocks built from them.

Univariate blocks (Matern nu=3/2 covariance, CAR precision, tapered
covariance) fill the diagonal of the block model.  Cross-field regression
blocks ``B_rt`` come from displacement kernels (Tri-Wave, Wendland) that are
evaluated on *signed* displacements, so ``B_rt`` is generally asymmetric.
"""

from dataclasses import dataclass, replace

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp

from .errors import CholeskyFailure, KernelError, NegativeDistance, NonPositiveR, ZeroDelta

__all__ = [
    "MaternSpec",
    "TriWaveSpec",
    "WendlandSpec",
    "CarSpec",
    "TRIWAVE_VERSIONS",
    "matern32",
    "matern_block",
    "triwave",
    "wendland32",
    "wendland_taper",
    "b_block",
    "car_precision",
    "taper_block",
]


@dataclass(frozen=True)
class MaternSpec:
    sigma2: float = 1.0
    kappa: float = 2.0

    def __post_init__(self):
        if not (self.sigma2 > 0 and self.kappa > 0):
            raise KernelError(f"Matern needs sigma2 > 0 and kappa > 0, got {self}")


#: manually set (phi, rho) factors of the named Tri-Wave versions
TRIWAVE_VERSIONS = {"V4": (0.5, 2.0), "V5": (2.0, 1.0), "V7": (2.0, 2.0)}


@dataclass(frozen=True)
class TriWaveSpec:
    """Modified triangular wave ``A (1 - phi (|h - delta| / |delta|)^2)``.

    Zero outside ``|h - delta| <= rho |delta|``.  ``delta`` may be a 2-vector
    on 2D grids; norms replace absolute values there.
    """

    A: float
    delta: float
    phi: float = 2.0
    rho: float = 1.0

    def __post_init__(self):
        if np.linalg.norm(np.atleast_1d(self.delta)) == 0:
            raise ZeroDelta("Tri-Wave translation delta must be nonzero")
        if not (self.phi > 0 and self.rho > 0):
            raise KernelError(f"Tri-Wave needs phi > 0 and rho > 0, got {self}")

    @classmethod
    def version(cls, name, A, delta):
        phi, rho = TRIWAVE_VERSIONS[name.upper()]
        return cls(A, delta, phi, rho)

    def __call__(self, h):
        return triwave(h, self)


@dataclass(frozen=True)
class WendlandSpec:
    """Translated Wendland ``k = 3/2`` regression kernel with support ``R``."""

    A: float
    delta: float
    R: float = 0.5

    def __post_init__(self):
        if not self.R > 0:
            raise NonPositiveR(f"Wendland support radius must be positive, got {self.R}")

    def __call__(self, h):
        return wendland32(h, self)


@dataclass(frozen=True)
class CarSpec:
    """CAR precision ``(I - phi H) / sigma2`` with ``phi = phi_frac / rho(H)``."""

    sigma2: float = 1.0
    phi_frac: float = 0.95

    def __post_init__(self):
        if not self.sigma2 > 0:
            raise KernelError(f"CAR needs sigma2 > 0, got {self.sigma2}")
        if not 0 < self.phi_frac < 1:
            raise KernelError(f"CAR needs 0 < phi_frac < 1, got {self.phi_frac}")


def matern32(d, spec):
    """``sigma2 (1 + kappa d) exp(-kappa d)``; vectorized over ``d``."""
    d = np.asarray(d, dtype=float)
    if np.any(d < 0):
        raise NegativeDistance("distances must be nonnegative")
    kd = spec.kappa * d
    out = spec.sigma2 * (1.0 + kd) * np.exp(-kd)
    return float(out) if out.ndim == 0 else out


def _cholesky_or_raise(m, what):
    try:
        return sla.cholesky(m, lower=True, check_finite=False)
    except np.linalg.LinAlgError as exc:
        raise CholeskyFailure(f"{what} is not numerically positive definite") from exc


def matern_block(g, spec, check=True):
    """Matern covariance over all site pairs of ``g``.

    With ``check`` a Cholesky factorization certifies positive definiteness.
    """
    m = matern32(g.distances, spec)
    if check:
        _cholesky_or_raise(m, "Matern block")
    return m


def _deviation(h, delta):
    """``|h - delta|`` and ``|delta|``; the last axis of ``h`` is spatial for vector deltas."""
    delta = np.asarray(delta, dtype=float)
    h = np.asarray(h, dtype=float)
    if delta.ndim == 0:
        return np.abs(h - delta), abs(float(delta))
    return np.linalg.norm(h - delta, axis=-1), float(np.linalg.norm(delta))


def triwave(h, spec):
    dev, size = _deviation(h, spec.delta)
    u = dev / size
    out = np.where(dev <= spec.rho * size, spec.A * (1.0 - spec.phi * u * u), 0.0)
    return float(out) if out.ndim == 0 else out


def wendland32(h, spec):
    """Wendland ``k = 3/2`` regression kernel as ``A (1 - u^4 (1 + 4u))``, ``u = |h - delta| / R``.

    The expression is kept exactly: it reaches ``-4A`` at ``u = 1`` and drops to
    0 beyond, so the kernel jumps at the support edge.
    """
    dev, _ = _deviation(h, spec.delta)
    u = dev / spec.R
    out = np.where(u <= 1.0, spec.A * (1.0 - u ** 4 * (1.0 + 4.0 * u)), 0.0)
    return float(out) if out.ndim == 0 else out


def wendland_taper(d, R):
    """Wendland-1 correlation taper ``(1 - d/R)_+^4 (1 + 4 d/R)``.

    Positive definite in up to three dimensions, 1 at the origin, exactly 0
    for ``d >= R``.
    """
    if not R > 0:
        raise NonPositiveR(f"taper radius must be positive, got {R}")
    u = np.asarray(d, dtype=float) / R
    if np.any(u < 0):
        raise NegativeDistance("distances must be nonnegative")
    out = np.where(u < 1.0, (1.0 - u) ** 4 * (1.0 + 4.0 * u), 0.0)
    return float(out) if out.ndim == 0 else out


def b_block(g, kernel):
    """Cross-regression block with entry ``(i, j) = kernel(s_j - s_i)``.

    On 2D grids a scalar ``delta`` translates along the first axis.
    """
    if g.dim == 2 and np.ndim(kernel.delta) == 0:
        kernel = replace(kernel, delta=(float(kernel.delta), 0.0))
    if isinstance(kernel, TriWaveSpec):
        return triwave(g.displacements, kernel)
    if isinstance(kernel, WendlandSpec):
        return wendland32(g.displacements, kernel)
    raise KernelError(f"unsupported cross kernel {kernel!r}")


def car_precision(h, spec):
    """CAR precision block ``(I - phi H) / sigma2`` as a CSR matrix.

    ``phi = phi_frac / max|eig(H)|`` keeps ``I - phi H`` positive definite.
    An all-zero adjacency gives the independence model ``I / sigma2``.
    """
    n = h.n
    eye = sp.identity(n, format="csr")
    rho = h.spectral_radius
    if rho == 0:
        return (eye / spec.sigma2).tocsr()
    phi = spec.phi_frac / rho
    q = ((eye - phi * h.h) / spec.sigma2).tocsr()
    q.sort_indices()
    return q


def taper_block(cov, g, R):
    """Schur product of ``cov`` with the Wendland-1 taper at radius ``R``."""
    cov = np.asarray(cov, dtype=float)
    if cov.shape != (g.n, g.n):
        raise KernelError(f"covariance shape {cov.shape} does not match grid of {g.n} sites")
    return cov * wendland_taper(g.distances, R)
