"""Named graphs, model settings and data splits used by tests, demos and the CLI."""

import numpy as np

from .assemble import ModelSpec
from .errors import IndexOverlap
from .graph import FieldDag, moralize
from .grid import make_grid
from .kernels import CarSpec, MaternSpec, TriWaveSpec, WendlandSpec
from .stabilize import StabilizeConfig

__all__ = [
    "SIX_FIELD_EDGES",
    "SEVEN_FIELD_EDGES",
    "FIVE_FIELD_EDGES",
    "CAMS_NAMES",
    "CAMS_EDGES",
    "six_field_dag",
    "seven_field_dag",
    "five_field_dag",
    "cams_dag",
    "chain_dag",
    "full_dag",
    "random_dag",
    "moral_closure",
    "cross_kernel",
    "six_field_spec",
    "gap_fill_split",
    "gap_fill_study",
    "DAGS",
]

#: parents of 5 are {4}; parents of 6 are {1, 3, 5}
SIX_FIELD_EDGES = frozenset({(1, 2), (2, 3), (2, 4), (3, 4), (1, 6), (3, 6), (4, 5), (5, 6)})

# stand-ins for the randomly drawn seven- and five-field test graphs
SEVEN_FIELD_EDGES = frozenset(
    {(1, 2), (1, 3), (2, 4), (3, 4), (3, 5), (4, 6), (5, 6), (6, 7), (2, 7)}
)
FIVE_FIELD_EDGES = frozenset({(1, 2), (1, 3), (2, 4), (3, 4), (4, 5)})

CAMS_NAMES = {1: "DU", 2: "SU", 3: "OM", 4: "BC", 5: "SS"}
CAMS_EDGES = frozenset({(1, 2), (2, 4), (3, 4), (3, 5), (1, 5)})


def six_field_dag():
    return FieldDag(6, SIX_FIELD_EDGES)


def seven_field_dag():
    return FieldDag(7, SEVEN_FIELD_EDGES)


def five_field_dag():
    return FieldDag(5, FIVE_FIELD_EDGES)


def cams_dag():
    return FieldDag(5, CAMS_EDGES, dict(CAMS_NAMES))


def chain_dag(p):
    return FieldDag(p, frozenset((k, k + 1) for k in range(1, p)))


def full_dag(p):
    return FieldDag(p, frozenset((a, b) for a in range(1, p + 1) for b in range(a + 1, p + 1)))


DAGS = {
    "six": six_field_dag,
    "seven": seven_field_dag,
    "five": five_field_dag,
    "cams": cams_dag,
}


def moral_closure(d):
    """Smallest supergraph of ``d`` (edges oriented by label) whose moralization adds nothing."""
    edges = set(d.edges)
    while True:
        m = moralize(FieldDag(d.p, frozenset(edges)))
        if not m.marriages:
            return FieldDag(d.p, frozenset(edges), d.names)
        edges |= m.marriages


def random_dag(p, rng, edge_prob=0.5, moral=True):
    """Random DAG with edges ``a > b`` only for ``a < b``; closed under marriage if ``moral``."""
    edges = frozenset(
        (a, b) for a in range(1, p + 1) for b in range(a + 1, p + 1) if rng.random() < edge_prob
    )
    d = FieldDag(p, edges)
    return moral_closure(d) if moral else d


def cross_kernel(family, A, delta, version="V5", R=0.5):
    """Tri-Wave (``family="triwave"``, named version) or Wendland cross kernel."""
    if family == "triwave":
        return TriWaveSpec.version(version, A, delta)
    if family == "wendland":
        return WendlandSpec(A, delta, R)
    raise ValueError(f"unknown cross-kernel family {family!r}")


def six_field_spec(family="triwave", mode="geostat", A=0.1, delta=0.5, lo=-1.0, hi=1.0,
                   step=0.05, stabilize=None, dag=None, **kw):
    """Six-field model with a single kernel on every edge.

    Defaults: Matern ``sigma2=1, kappa=2`` conditional blocks (CAR
    ``sigma2=1, phi_frac=0.95`` in CAR mode) on ``[-1, 1]`` with step 0.05.
    """
    g = make_grid(1, lo, hi, step)
    fs = CarSpec() if mode == "car" else MaternSpec()
    return ModelSpec(
        dag=dag if dag is not None else six_field_dag(),
        grid=g,
        mode=mode,
        field_specs=fs,
        default_kernel=cross_kernel(family, A, delta),
        stabilize=stabilize if stabilize is not None else StabilizeConfig(),
        **kw,
    )


def gap_fill_split(layout, field=1, n_test=50):
    """Hold out the first ``n_test`` sites of ``field``; fit on everything else.

    Returns ``(fit_idx, test_idx)`` as sorted joint indices.
    """
    total = max(s.stop for s in layout.values())
    s = layout[field]
    test = np.arange(s.start, s.start + n_test)
    if n_test > s.stop - s.start:
        raise IndexOverlap(f"field {field} has fewer than {n_test} sites")
    fit = np.setdiff1d(np.arange(total), test)
    return fit, test


def gap_fill_study(family="triwave", mode="geostat", tau2=0.1, replicates=20, seed=0,
                   fit_budget=0):
    """Gap-filling validation on the six-field model over ``[-10, 10]`` with step 0.1.

    Each replicate draws a field realization from the model, adds noise of
    variance ``tau2``, holds out the first 50 sites of field 1 and predicts
    them from everything else.  The baseline predicts the mean of field 1's
    observed sites.  With ``fit_budget`` the edge amplitudes and the noise
    variance are refitted per replicate by Nelder-Mead.  Returns the list of
    :class:`~crossmrf.infer.CvReport`.
    """
    from .assemble import build_joint, sample
    from .infer import ParamVector, cross_validate, fit

    spec = six_field_spec(family, mode, lo=-10.0, hi=10.0, step=0.1)
    jp = build_joint(spec)
    fit_idx, test_idx = gap_fill_split(jp.layout, field=1, n_test=50)
    s1 = jp.layout[1]
    base = fit_idx[(fit_idx >= s1.start) & (fit_idx < s1.stop)]
    truth = sample(jp, replicates, seed=seed)
    rng = np.random.default_rng([seed, 1])
    reports = []
    for x in truth:
        z = x + np.sqrt(tau2) * rng.standard_normal(x.size)
        model, t2 = jp, tau2
        if fit_budget:
            init = ParamVector.from_spec(spec, tau2=tau2)
            free = [n for n in init.names(spec.mode) if n.startswith(("A:", "tau2"))]
            params, _ = fit(z, spec, init, budget=fit_budget, free=free)
            model, t2 = build_joint(params.apply(spec)), params.tau2
        reports.append(cross_validate(model, z, (fit_idx, test_idx), tau2=t2, baseline_idx=base))
    return reports
