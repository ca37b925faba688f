"""Construction-cost benchmarks.

Each scenario pairs a field graph with a way of specifying the conditional
blocks.  A timed run is one precision-path pass of :func:`generate` (the
covariance path is inherently quadratic in ``n p`` and is left out), with
cross-kernel parameters redrawn for every repetition.
"""

from dataclasses import dataclass, asdict
import time

import numpy as np

from .assemble import ModelSpec, generate
from .errors import InsufficientPoints, ScenarioUnsupported
from .fixtures import chain_dag, cross_kernel, full_dag, six_field_dag
from .flops import FlopCounter
from .grid import make_grid
from .kernels import CarSpec, MaternSpec
from .stabilize import StabilizeConfig

__all__ = [
    "SCENARIOS",
    "BenchRecord",
    "scenario_spec",
    "time_construction",
    "scaling_exponent",
    "flop_count",
]

#: scenario -> (graph kind forced by the scenario or None, univariate mode)
SCENARIOS = {
    "geostat-FD": ("full", "geostat"),
    "neighbor-FD": ("full", "car"),
    "geostat-MDAG": (None, "geostat"),
    "car-MDAG": (None, "car"),
    "taper-MDAG": (None, "taper"),
}

_DAGS = {"chain": chain_dag, "full": full_dag}

# lattice spacing of benchmark domains; larger n extends the domain
BENCH_STEP = 0.1


@dataclass(frozen=True)
class BenchRecord:
    scenario: str
    dag: str
    n: int
    p: int
    reps: int
    min: float
    lq: float
    median: float
    mean: float
    uq: float
    max: float

    def as_row(self):
        return asdict(self)


def _dag(kind, p):
    if kind == "six":
        if p != 6:
            raise ScenarioUnsupported(f"the six-field graph needs p=6, got p={p}")
        return six_field_dag()
    if kind not in _DAGS:
        raise ScenarioUnsupported(f"unknown graph {kind!r}")
    return _DAGS[kind](p)


def scenario_spec(scenario, n, p, rng, dag="chain", family="triwave", taper_R=0.5):
    """Model spec for one repetition with cross-kernel parameters drawn from ``rng``.

    Amplitudes and translations are uniform on ``[0.1, 1]`` per edge.
    """
    if scenario not in SCENARIOS:
        raise ScenarioUnsupported(f"unknown scenario {scenario!r}; choose from {sorted(SCENARIOS)}")
    forced, mode = SCENARIOS[scenario]
    d = _dag(forced or dag, p)
    if n < 2:
        raise ScenarioUnsupported("need at least 2 sites")
    g = make_grid(1, 0.0, BENCH_STEP * (n - 1), BENCH_STEP)
    kernels = {
        e: cross_kernel(family, *rng.uniform(0.1, 1.0, 2)) for e in sorted(d.edges)
    }
    return ModelSpec(
        dag=d,
        grid=g,
        mode=mode,
        field_specs=CarSpec() if mode == "car" else MaternSpec(),
        cross_kernels=kernels,
        taper_R=taper_R,
        stabilize=StabilizeConfig(),
    )


def time_construction(scenario, n, p, reps=20, seed=0, dag="chain", family="triwave", warmup=2):
    """Wall-clock statistics of the precision path over ``reps`` runs."""
    if reps < 5:
        raise ScenarioUnsupported(f"need at least 5 repetitions, got {reps}")
    rng = np.random.default_rng(seed)
    times = []
    for k in range(warmup + reps):
        spec = scenario_spec(scenario, n, p, rng, dag, family)
        # the neighbourhood spectrum depends only on the grid; keep it out of the timing
        if spec.mode == "car":
            spec.neighborhood.spectral_radius
        t0 = time.perf_counter()
        generate(spec, spec.stabilize.reg_init, with_sigma=False)
        el = time.perf_counter() - t0
        if k >= warmup:
            times.append(el)
    t = np.asarray(times)
    q1, med, q3 = np.percentile(t, [25, 50, 75])
    return BenchRecord(
        scenario, dag if SCENARIOS[scenario][0] is None else SCENARIOS[scenario][0],
        n, p, reps, float(t.min()), float(q1), float(med), float(t.mean()), float(q3), float(t.max()),
    )


def scaling_exponent(records, stat="mean"):
    """Least-squares slope of ``log(time)`` against ``log(p)``.

    Accepts :class:`BenchRecord` objects or ``(p, time)`` pairs.
    """
    pts = [(r.p, getattr(r, stat)) if isinstance(r, BenchRecord) else tuple(r) for r in records]
    if len({p for p, _ in pts}) < 4:
        raise InsufficientPoints("need at least 4 distinct values of p")
    x = np.log([p for p, _ in pts])
    y = np.log([t for _, t in pts])
    return float(np.polyfit(x, y, 1)[0])


def flop_count(scenario, n, p, seed=0, dag="chain", family="triwave"):
    """Analytic operation count of one precision-path pass."""
    rng = np.random.default_rng(seed)
    spec = scenario_spec(scenario, n, p, rng, dag, family)
    counter = FlopCounter()
    generate(spec, spec.stabilize.reg_init, with_sigma=False, counter=counter)
    return counter
