"""Positive-definiteness sweep over a lattice of cross-kernel parameters.

For every ``(A, delta)`` in ``{0.1, ..., 1.0}^2`` a model is built with the
same kernel on every edge, once with the original blocks and once with
spectral normalization plus the regularization ladder.  The literal
Schur-complement update is used by default, since it is the path whose
rounding behaviour the stabilization is meant to control.
"""

from dataclasses import dataclass, field

import numpy as np

from .assemble import ModelSpec, build_joint
from .errors import PdFailure
from .fixtures import cross_kernel, five_field_dag, seven_field_dag, chain_dag
from .graph import FieldDag
from .grid import make_grid
from .kernels import MaternSpec
from .stabilize import StabilizeConfig

__all__ = ["SweepResult", "PARAM_LATTICE", "sweep_dag", "pd_sweep"]

PARAM_LATTICE = np.round(np.arange(1, 11) * 0.1, 10)


@dataclass(frozen=True)
class SweepResult:
    path: str
    total: int
    sigma_pd: int
    precision_pd: int
    both_pd: int
    regularizations: tuple = field(repr=False)

    @property
    def max_regularization(self):
        regs = [r for r in self.regularizations if r is not None]
        return max(regs) if regs else None

    def as_row(self):
        return {
            "path": self.path,
            "total": self.total,
            "sigma_pd": self.sigma_pd,
            "precision_pd": self.precision_pd,
            "both_pd": self.both_pd,
            "max_regularization": self.max_regularization,
        }


def sweep_dag(p):
    """Test graph for ``p`` fields: the five- and seven-field fixtures, otherwise a chain."""
    if p == 7:
        return seven_field_dag()
    if p == 5:
        return five_field_dag()
    if p == 1:
        return FieldDag(1, frozenset())
    return chain_dag(p)


def pd_sweep(version="V5", lo=-1.0, hi=1.0, step=0.1, p=7, paths=("original", "stabilized"),
             method="dense", dag=None, values=PARAM_LATTICE):
    """Count PD certificates over the ``(A, delta)`` lattice for each path.

    ``version`` is a Tri-Wave version name (``"V4"``, ``"V5"``, ``"V7"``)
    or ``"wendland"``.
    """
    g = make_grid(1, lo, hi, step)
    d = dag if dag is not None else sweep_dag(p)
    family = "wendland" if version.lower() == "wendland" else "triwave"
    configs = {"original": StabilizeConfig.original(), "stabilized": StabilizeConfig()}
    out = []
    for path in paths:
        cfg = configs[path]
        ps = pq = both = 0
        regs = []
        for A in values:
            for delta in values:
                spec = ModelSpec(
                    dag=d, grid=g, mode="geostat", field_specs=MaternSpec(),
                    default_kernel=cross_kernel(family, float(A), float(delta), version=version
                                                if family == "triwave" else "V5"),
                    stabilize=cfg,
                )
                try:
                    jp = build_joint(spec, method=method)
                except PdFailure:
                    regs.append(None)
                    continue
                s_ok, q_ok = jp.pd_certificates["sigma"], jp.pd_certificates["precision"]
                ps += s_ok
                pq += q_ok
                both += s_ok and q_ok
                regs.append(jp.applied_regularization)
        out.append(SweepResult(path, len(values) ** 2, ps, pq, both, tuple(regs)))
    return out
