"""Command-line front end.

Subcommands: ``build``, ``moralize``, ``bench``, ``predict``, ``pd-sweep``.
Every library error maps to a fixed exit status (see :mod:`crossmrf.errors`);
``build`` and ``pd-sweep`` exit with the PD-failure status when a requested
certificate is false.
"""

import argparse
import csv
import os
from pathlib import Path
import sys

import numpy as np

from . import io
from .analyze import asymmetry, ci_pattern, sparsity_percent
from .assemble import MODES, ModelSpec, build_joint
from .bench import SCENARIOS, flop_count, scaling_exponent, time_construction
from .errors import CrossMRFError, KernelError, MissingKernel, PdFailure
from .fixtures import DAGS, chain_dag, full_dag, gap_fill_study
from .graph import ci_pairs, moralize, parse_dag
from .grid import make_grid
from .kernels import TRIWAVE_VERSIONS, CarSpec, MaternSpec, TriWaveSpec, WendlandSpec
from .robustness import pd_sweep
from .stabilize import StabilizeConfig

__all__ = ["main", "parse_kernel", "build_parser"]

DEFAULT_SEED = 20240101


def parse_kernel(text):
    """Cross-kernel from ``family[:version][:key=value...]``.

    Examples: ``triwave:V5:A=0.1:delta=0.5``, ``triwave:A=0.2:delta=1:phi=2:rho=1``,
    ``wendland:A=0.1:delta=0.5:R=0.5``.
    """
    parts = text.split(":")
    family = parts[0].lower()
    params = {}
    version = None
    for tok in parts[1:]:
        if "=" in tok:
            k, v = tok.split("=", 1)
            try:
                params[k] = float(v)
            except ValueError:
                raise KernelError(f"bad value in kernel spec {text!r}: {tok!r}") from None
        elif tok.upper() in TRIWAVE_VERSIONS:
            version = tok.upper()
        else:
            raise KernelError(f"unrecognized token {tok!r} in kernel spec {text!r}")
    if "A" not in params or "delta" not in params:
        raise KernelError(f"kernel spec {text!r} needs A= and delta=")
    try:
        if family == "triwave":
            if version:
                base = TriWaveSpec.version(version, params.pop("A"), params.pop("delta"))
                phi = params.pop("phi", base.phi)
                rho = params.pop("rho", base.rho)
                out = TriWaveSpec(base.A, base.delta, phi, rho)
            else:
                out = TriWaveSpec(**params)
        elif family == "wendland":
            out = WendlandSpec(**params)
        else:
            raise KernelError(f"unknown kernel family {family!r}")
    except TypeError as exc:
        raise KernelError(f"bad parameters in kernel spec {text!r}: {exc}") from None
    return out


def _read_dag(args):
    if args.graph:
        return parse_dag(Path(args.graph).read_text())
    name = args.fixture
    if ":" in name:
        kind, p = name.split(":", 1)
        builders = {"chain": chain_dag, "full": full_dag}
        if kind in builders:
            return builders[kind](int(p))
    if name in DAGS:
        return DAGS[name]()
    raise CrossMRFError(f"unknown fixture {name!r}")


def _grid(args):
    dim = args.dim
    def vec(v):
        return v[0] if len(v) == 1 else tuple(v)
    return make_grid(dim, vec(args.lo), vec(args.hi), vec(args.step))


def _stabilize(args):
    if args.original:
        return StabilizeConfig.original()
    return StabilizeConfig(spec_norm_target=args.spec_norm_target)


def _model(args):
    dag = _read_dag(args)
    grid = _grid(args)
    default = parse_kernel(args.kernel) if args.kernel else None
    edge_kernels = {}
    for item in args.edge_kernel or []:
        if "=" not in item.split(":")[0]:
            raise KernelError(f"--edge-kernel expects 'parent>child=spec', got {item!r}")
        edge, spec_text = item.split("=", 1)
        a, b = edge.split(">")
        edge_kernels[(int(a), int(b))] = parse_kernel(spec_text)
    missing = sorted(e for e in dag.edges if e not in edge_kernels and default is None)
    if missing:
        edges = ", ".join(f"{a}>{b}" for a, b in missing)
        raise MissingKernel(f"no cross kernel for edge(s) {edges}; pass --kernel or --edge-kernel")
    if args.mode == "car":
        fs = CarSpec(args.sigma2, args.phi_frac)
    else:
        fs = MaternSpec(args.sigma2, args.kappa)
    return ModelSpec(
        dag=dag, grid=grid, mode=args.mode, field_specs=fs,
        cross_kernels=edge_kernels, default_kernel=default,
        radius=args.radius, taper_R=args.taper_R, stabilize=_stabilize(args),
    )


def cmd_build(args):
    spec = _model(args)
    jp = build_joint(spec, threshold=not args.no_threshold, method=args.method)
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    ext = "csv" if args.csv else "gmrf"
    writer = io.write_matrix_csv if args.csv else io.write_matrix
    writer(out / f"sigma.{ext}", jp.sigma)
    writer(out / f"precision.{ext}", jp.precision)
    io.write_heatmap(out / "sigma_heatmap.csv", jp.sigma)
    io.write_heatmap(out / "precision_heatmap.csv", jp.precision)
    rep = sparsity_percent(jp.precision, spec.n, jp.applied_threshold)
    labels = list(jp.order)
    meta = {
        "n": spec.n,
        "p": spec.p,
        "mode": spec.mode,
        "order": labels,
        "block_layout": {str(k): [s.start, s.stop] for k, s in jp.layout.items()},
        "applied_threshold": jp.applied_threshold,
        "applied_regularization": jp.applied_regularization,
        "pd_certificates": jp.pd_certificates,
        "sparsity": {
            "zero_percent": rep.zero_percent,
            "zero_blocks": [[labels[i], labels[j]] for i, j in zip(*np.nonzero(rep.per_block_pattern)) if i < j],
        },
        "zero_block_pairs": sorted(ci_pattern(jp)),
        "moral_ci_pairs": sorted(ci_pairs(moralize(spec.dag))),
        "max_cross_asymmetry": max(
            [asymmetry(jp.sigma_block(k, l)) for k in labels for l in labels if k != l], default=0.0
        ),
    }
    io.write_metadata(out / "metadata.json", meta)
    print(f"wrote {out}: n={spec.n} p={spec.p} threshold={jp.applied_threshold:g} "
          f"regularization={jp.applied_regularization:g} pd={jp.pd_certificates} "
          f"zero%={rep.zero_percent:.2f}")
    return 0 if jp.all_pd else PdFailure.exit_code


def _pairs(ps):
    return ", ".join("{%d,%d}" % pair for pair in sorted(ps)) or "none"


def cmd_moralize(args):
    d = parse_dag(Path(args.graph).read_text())
    m = moralize(d)
    print(f"fields: {d.p}")
    print(f"order: {' '.join(d.label(v) for v in d.order)}")
    print("marriages: " + (_pairs(m.marriages) if m.marriages else "no marriages"))
    print("conditionally independent pairs: " + _pairs(ci_pairs(m)))
    return 0


def cmd_bench(args):
    ps = [int(x) for x in args.p.split(",")]
    fields = ["scenario", "dag", "n", "p", "reps", "min", "lq", "median", "mean", "uq", "max"]
    if args.flops:
        fields.append("flops")
    out = open(args.out, "w", newline="") if args.out else sys.stdout
    try:
        w = csv.DictWriter(out, fieldnames=fields)
        w.writeheader()
        records = []
        for sc in args.scenario:
            for p in ps:
                rec = time_construction(sc, args.n, p, args.reps, args.seed, args.dag, args.family)
                row = rec.as_row()
                if args.flops:
                    row["flops"] = flop_count(sc, args.n, p, args.seed, args.dag, args.family).total
                w.writerow(row)
                records.append(rec)
        if len(set(ps)) >= 4:
            for sc in args.scenario:
                slope = scaling_exponent([r for r in records if r.scenario == sc])
                print(f"# {sc}: log-log slope of mean time against p = {slope:.3f}", file=sys.stderr)
    finally:
        if out is not sys.stdout:
            out.close()
    return 0


def cmd_predict(args):
    reports = gap_fill_study(args.family, args.mode, args.tau2, args.replicates, args.seed,
                             args.fit_budget)
    mae = float(np.mean([r.mae for r in reports]))
    rmse = float(np.mean([r.rmse for r in reports]))
    base = float(np.mean([r.baseline_mae for r in reports]))
    print(f"{args.family}: mean over {len(reports)} replicate(s): MAE={mae:.4f} RMSE={rmse:.4f} "
          f"baseline MAE={base:.4f} n_test={reports[0].n_test}")
    if args.out_dir:
        out = Path(args.out_dir)
        out.mkdir(parents=True, exist_ok=True)
        with open(out / "cv.csv", "w", newline="") as fh:
            w = csv.DictWriter(fh, fieldnames=["family", "replicate", "mae", "rmse", "baseline_mae", "n_test"])
            w.writeheader()
            for k, r in enumerate(reports):
                w.writerow({"family": args.family, "replicate": k, **r.as_row()})
    return 0


def cmd_pd_sweep(args):
    paths = ("original", "stabilized") if args.path == "both" else (args.path,)
    res = pd_sweep(args.kernel_version, args.lo, args.hi, args.step, args.p, paths, args.method)
    print(f"kernel={args.kernel_version} ds={args.step} domain=[{args.lo:g}, {args.hi:g}] p={args.p}")
    print("path,total,sigma_pd,precision_pd,both_pd,max_regularization")
    ok = True
    for r in res:
        row = r.as_row()
        print(",".join(str(row[k]) for k in
                       ["path", "total", "sigma_pd", "precision_pd", "both_pd", "max_regularization"]))
        ok &= r.both_pd == r.total
    return 0 if ok else PdFailure.exit_code


def _add_model_flags(sp):
    src = sp.add_mutually_exclusive_group(required=True)
    src.add_argument("--graph", help="edge-list graph file")
    src.add_argument("--fixture", help="named graph: six, seven, five, cams, chain:P, full:P")
    sp.add_argument("--dim", type=int, default=1, choices=(1, 2))
    sp.add_argument("--lo", type=float, nargs="+", default=[-1.0])
    sp.add_argument("--hi", type=float, nargs="+", default=[1.0])
    sp.add_argument("--step", type=float, nargs="+", default=[0.05])
    sp.add_argument("--mode", choices=MODES, default="geostat")
    sp.add_argument("--kernel", help="default cross kernel, e.g. triwave:V5:A=0.1:delta=0.5")
    sp.add_argument("--edge-kernel", action="append", metavar="P>C=SPEC",
                    help="cross kernel for one edge (repeatable)")
    sp.add_argument("--sigma2", type=float, default=1.0)
    sp.add_argument("--kappa", type=float, default=2.0)
    sp.add_argument("--phi-frac", type=float, default=0.95)
    sp.add_argument("--radius", type=float, default=None, help="CAR neighbourhood radius")
    sp.add_argument("--taper-R", type=float, default=0.5)
    sp.add_argument("--original", action="store_true", help="no spectral normalization or regularization")
    sp.add_argument("--spec-norm-target", type=float, default=0.99)
    sp.add_argument("--method", choices=("structured", "dense"), default="structured")


def build_parser():
    ap = argparse.ArgumentParser(prog="crossmrf", description=__doc__.splitlines()[0])
    ap.add_argument("--seed", type=int, default=DEFAULT_SEED)
    sub = ap.add_subparsers(dest="command", required=True)

    b = sub.add_parser("build", help="construct covariance and precision")
    _add_model_flags(b)
    b.add_argument("--out-dir", required=True)
    b.add_argument("--csv", action="store_true", help="write matrices as CSV")
    b.add_argument("--no-threshold", action="store_true")
    b.set_defaults(func=cmd_build)

    m = sub.add_parser("moralize", help="report marriages and conditional independences")
    m.add_argument("graph")
    m.set_defaults(func=cmd_moralize)

    be = sub.add_parser("bench", help="time the precision construction")
    be.add_argument("--scenario", action="append", choices=sorted(SCENARIOS), required=True)
    be.add_argument("--n", type=int, default=500)
    be.add_argument("--p", default="6", help="comma-separated field counts")
    be.add_argument("--reps", type=int, default=20)
    be.add_argument("--dag", choices=("chain", "full", "six"), default="chain")
    be.add_argument("--family", choices=("triwave", "wendland"), default="triwave")
    be.add_argument("--flops", action="store_true", help="add an operation-count column")
    be.add_argument("--out", help="CSV path (default stdout)")
    be.set_defaults(func=cmd_bench)

    pr = sub.add_parser("predict", help="six-field gap-filling validation")
    pr.add_argument("--family", choices=("triwave", "wendland"), default="triwave")
    pr.add_argument("--mode", choices=MODES, default="geostat")
    pr.add_argument("--tau2", type=float, default=0.1)
    pr.add_argument("--replicates", type=int, default=20)
    pr.add_argument("--fit-budget", type=int, default=0,
                    help="Nelder-Mead evaluations for refitting amplitudes and noise (0: use fixture values)")
    pr.add_argument("--out-dir")
    pr.set_defaults(func=cmd_predict)

    ps = sub.add_parser("pd-sweep", help="PD counts over the (A, delta) lattice")
    ps.add_argument("--kernel-version", default="V5", help="V4, V5, V7 or wendland")
    ps.add_argument("--lo", type=float, default=-1.0)
    ps.add_argument("--hi", type=float, default=1.0)
    ps.add_argument("--step", type=float, default=0.1)
    ps.add_argument("--p", type=int, default=7)
    ps.add_argument("--path", choices=("original", "stabilized", "both"), default="stabilized")
    ps.add_argument("--method", choices=("structured", "dense"), default="dense")
    ps.set_defaults(func=cmd_pd_sweep)
    return ap


def main(argv=None):
    args = build_parser().parse_args(argv)
    threads = os.environ.get("GMRF_THREADS")
    try:
        if threads:
            from threadpoolctl import threadpool_limits

            with threadpool_limits(limits=int(threads)):
                return args.func(args)
        return args.func(args)
    except CrossMRFError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
