"""Likelihood, parameter fitting and Gaussian conditional prediction."""

from dataclasses import dataclass, field, replace
import math
import warnings

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp
from scipy.optimize import minimize

from .assemble import generate, quadratic_form
from .errors import (
    BudgetExhaustedWarning,
    CrossMRFError,
    EmptyTestSet,
    IndexOverlap,
    InferenceError,
    PdFailure,
    ShapeMismatch,
    SingularSystem,
)
from .kernels import CarSpec, MaternSpec

__all__ = [
    "ParamVector",
    "CvReport",
    "nll",
    "fit",
    "predict_conditional",
    "cross_validate",
]

_LOG2PI = math.log(2.0 * math.pi)


@dataclass(frozen=True)
class ParamVector:
    """Model parameters that inference may vary.

    Attributes
    ----------
    edges : dict
        ``(parent, child) -> (A, delta)``.
    fields : dict
        ``label -> (sigma2, kappa)`` for Matern blocks or
        ``label -> (sigma2, phi_frac)`` for CAR blocks.
    tau2 : float
        Observation-noise variance.
    """

    edges: dict = field(default_factory=dict)
    fields: dict = field(default_factory=dict)
    tau2: float = 0.0

    def __post_init__(self):
        if self.tau2 < 0:
            raise InferenceError(f"tau2 must be nonnegative, got {self.tau2}")

    @classmethod
    def from_spec(cls, spec, tau2=0.0):
        edges = {e: (k.A, k.delta) for e, k in spec.cross_kernels.items()}
        fields = {}
        for v, fs in spec.field_specs.items():
            second = fs.phi_frac if isinstance(fs, CarSpec) else fs.kappa
            fields[v] = (fs.sigma2, second)
        return cls(edges, fields, tau2)

    def apply(self, spec):
        """Copy of ``spec`` with these kernel parameters."""
        kernels = dict(spec.cross_kernels)
        for e, (A, delta) in self.edges.items():
            kernels[e] = replace(kernels[e], A=A, delta=delta)
        fs = dict(spec.field_specs)
        for v, (s2, second) in self.fields.items():
            if spec.mode == "car":
                fs[v] = CarSpec(s2, second)
            else:
                fs[v] = MaternSpec(s2, second)
        return replace(spec, cross_kernels=kernels, field_specs=fs)

    # flat encoding used by the optimizer: names plus transformed values
    def _entries(self, mode):
        out = []
        for e in sorted(self.edges):
            A, d = self.edges[e]
            out.append((f"A:{e[0]}>{e[1]}", A, "id"))
            out.append((f"delta:{e[0]}>{e[1]}", d, "id"))
        for v in sorted(self.fields):
            s2, second = self.fields[v]
            out.append((f"sigma2:{v}", s2, "log"))
            if mode == "car":
                out.append((f"phi_frac:{v}", second, "logit"))
            else:
                out.append((f"kappa:{v}", second, "log"))
        out.append(("tau2", self.tau2, "log"))
        return out

    def names(self, mode="geostat"):
        return [name for name, _, _ in self._entries(mode)]

    def with_values(self, values):
        """Copy with entries replaced by ``{name: value}``."""
        edges = dict(self.edges)
        fields = dict(self.fields)
        tau2 = self.tau2
        for name, val in values.items():
            if name == "tau2":
                tau2 = val
                continue
            kind, key = name.split(":")
            if kind in ("A", "delta"):
                e = tuple(int(x) for x in key.split(">"))
                A, d = edges[e]
                edges[e] = (val, d) if kind == "A" else (A, val)
            else:
                v = int(key)
                s2, second = fields[v]
                fields[v] = (val, second) if kind == "sigma2" else (s2, val)
        return ParamVector(edges, fields, tau2)


_FWD = {
    "id": lambda x: x,
    "log": math.log,
    "logit": lambda x: math.log(x / (1.0 - x)),
}
_BWD = {
    "id": lambda z: z,
    "log": math.exp,
    "logit": lambda z: 1.0 / (1.0 + math.exp(-z)),
}


def nll(params, y, spec):
    """Negative Gaussian log-likelihood of ``y`` (joint layout order).

    Without observation noise the sparse precision and the determinant
    shortcut are used; with ``tau2 > 0`` the marginal covariance
    ``Sigma + tau2 I`` is factorized densely.
    """
    model = params.apply(spec) if params is not None else spec
    y = np.asarray(y, dtype=float)
    npts = model.n * model.p
    if y.shape != (npts,):
        raise ShapeMismatch(f"expected {npts} observations, got shape {y.shape}")
    cfg = model.stabilize
    delta = cfg.reg_init if cfg.regularize else 0.0
    tau2 = params.tau2 if params is not None else 0.0
    if tau2 == 0:
        built = generate(model, delta, with_sigma=False)
        q = sp.csr_matrix(built.precision)
        logdet = float(sum(built.logdet_d.values()))
        return 0.5 * (quadratic_form(q, y) + logdet + npts * _LOG2PI)
    built = generate(model, delta, with_sigma=True)
    k = built.sigma + tau2 * np.eye(npts)
    try:
        c = sla.cho_factor(k, lower=True, check_finite=False)
    except np.linalg.LinAlgError as exc:
        raise PdFailure("marginal covariance is not positive definite") from exc
    alpha = sla.cho_solve(c, y, check_finite=False)
    logdet = 2.0 * float(np.sum(np.log(np.diagonal(c[0]))))
    return 0.5 * (float(y @ alpha) + logdet + npts * _LOG2PI)


def fit(y, spec, init=None, budget=200, free=None):
    """Nelder-Mead maximum likelihood over the ``free`` parameters.

    Positive parameters are optimized on the log scale and ``phi_frac`` on
    the logit scale.  ``tau2`` is held fixed when its initial value is 0.
    Returns ``(best, best_nll)``; the result is never worse than ``init``.
    A :class:`BudgetExhaustedWarning` flags a run stopped by ``budget``.
    """
    if budget < 1:
        raise InferenceError("budget must be at least 1")
    init = init if init is not None else ParamVector.from_spec(spec)
    entries = init._entries(spec.mode)
    if free is None:
        free = [n for n, _, _ in entries]
    free = [n for n in free if not (n == "tau2" and init.tau2 == 0)]
    table = {n: (v, t) for n, v, t in entries}
    unknown = [n for n in free if n not in table]
    if unknown:
        raise InferenceError(f"unknown parameter names {unknown}")
    z0 = np.array([_FWD[table[n][1]](table[n][0]) for n in free])

    best = {"f": math.inf, "p": init, "evals": 0}

    def decode(z):
        return init.with_values({n: _BWD[table[n][1]](float(v)) for n, v in zip(free, z)})

    def objective(z):
        best["evals"] += 1
        try:
            pv = decode(z)
            f = nll(pv, y, spec)
        except (CrossMRFError, np.linalg.LinAlgError, OverflowError, ValueError):
            return math.inf
        if not math.isfinite(f):
            return math.inf
        if f < best["f"]:
            best["f"], best["p"] = f, pv
        return f

    objective(z0)
    if budget > 1 and free:
        res = minimize(
            objective, z0, method="Nelder-Mead",
            options={"maxfev": budget - 1, "xatol": 1e-6, "fatol": 1e-9},
        )
        if not res.success and best["evals"] >= budget:
            warnings.warn(
                f"optimizer stopped after {best['evals']} evaluations; returning best so far",
                BudgetExhaustedWarning, stacklevel=2,
            )
    elif budget == 1 and free:
        warnings.warn("budget of one evaluation: returning init", BudgetExhaustedWarning, stacklevel=2)
    return best["p"], best["f"]


def _sigma_of(source):
    return source.sigma if hasattr(source, "sigma") else np.asarray(source, dtype=float)


def predict_conditional(source, fit_idx, test_idx, z_fit, tau2=0.0):
    """Gaussian conditional mean ``Sigma[test, fit] (Sigma[fit, fit] + tau2 I)^{-1} z``.

    ``source`` is a :class:`JointPair` or a covariance matrix.
    """
    sigma = _sigma_of(source)
    fit_idx = np.asarray(fit_idx, dtype=int)
    test_idx = np.asarray(test_idx, dtype=int)
    if test_idx.size == 0:
        raise EmptyTestSet("no test indices")
    if np.intersect1d(fit_idx, test_idx).size:
        raise IndexOverlap("fit and test indices overlap")
    z_fit = np.asarray(z_fit, dtype=float)
    if z_fit.shape != (fit_idx.size,):
        raise ShapeMismatch(f"{fit_idx.size} fit indices but {z_fit.shape} observations")
    if fit_idx.size == 0:
        return np.zeros(test_idx.size)
    k = sigma[np.ix_(fit_idx, fit_idx)] + tau2 * np.eye(fit_idx.size)
    try:
        c = sla.cho_factor(k, lower=True, check_finite=False)
    except np.linalg.LinAlgError as exc:
        raise SingularSystem("fit covariance is not positive definite") from exc
    return sigma[np.ix_(test_idx, fit_idx)] @ sla.cho_solve(c, z_fit, check_finite=False)


@dataclass(frozen=True)
class CvReport:
    mae: float
    rmse: float
    baseline_mae: float
    n_test: int
    predictions: np.ndarray = field(repr=False, default=None)

    def as_row(self):
        return {"mae": self.mae, "rmse": self.rmse, "baseline_mae": self.baseline_mae, "n_test": self.n_test}


def score(pred, truth, baseline_value):
    pred = np.asarray(pred, dtype=float)
    truth = np.asarray(truth, dtype=float)
    if truth.size == 0:
        raise EmptyTestSet("no test values")
    err = pred - truth
    return CvReport(
        mae=float(np.mean(np.abs(err))),
        rmse=float(np.sqrt(np.mean(err ** 2))),
        baseline_mae=float(np.mean(np.abs(baseline_value - truth))),
        n_test=int(truth.size),
        predictions=pred,
    )


def cross_validate(source, data, split, tau2=0.0, baseline_idx=None):
    """One-fold validation: predict ``data[test]`` from ``data[fit]``.

    The baseline predicts every test value by the mean of
    ``data[baseline_idx]`` (default: all fit indices).
    """
    fit_idx, test_idx = (np.asarray(a, dtype=int) for a in split)
    if test_idx.size == 0:
        raise EmptyTestSet("no test indices")
    data = np.asarray(data, dtype=float)
    pred = predict_conditional(source, fit_idx, test_idx, data[fit_idx], tau2)
    base = fit_idx if baseline_idx is None else np.asarray(baseline_idx, dtype=int)
    return score(pred, data[test_idx], float(np.mean(data[base])))
