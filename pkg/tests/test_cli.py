import json

import numpy as np
import pytest

from crossmrf.cli import main, parse_kernel
from crossmrf.errors import KernelError
from crossmrf.io import read_matrix, read_matrix_csv
from crossmrf.kernels import TriWaveSpec, WendlandSpec


def test_parse_kernel():
    assert parse_kernel("triwave:V5:A=0.1:delta=0.5") == TriWaveSpec.version("V5", 0.1, 0.5)
    k = parse_kernel("wendland:A=0.2:delta=0.3:R=0.4")
    assert k == WendlandSpec(0.2, 0.3, 0.4)
    for bad in ("triwave:A=1", "triwave:A=x:delta=1", "triwave:V9:A=1:delta=1", "spline:A=1:delta=1"):
        with pytest.raises(KernelError):
            parse_kernel(bad)


def test_moralize(tmp_path, capsys):
    g = tmp_path / "g.txt"
    g.write_text("1>3\n2>3\n")
    assert main(["moralize", str(g)]) == 0
    out = capsys.readouterr().out
    assert "marriages: {1,2}" in out
    assert "independent pairs: none" in out


def test_build_outputs(tmp_path):
    out = tmp_path / "run"
    rc = main(["build", "--fixture", "six", "--kernel", "triwave:V5:A=0.1:delta=0.5",
               "--step", "0.1", "--out-dir", str(out)])
    assert rc == 0
    s = read_matrix(out / "sigma.gmrf")
    q = read_matrix(out / "precision.gmrf")
    assert s.shape == q.shape == (126, 126)
    meta = json.loads((out / "metadata.json").read_text())
    assert meta["pd_certificates"] == {"precision": True, "sigma": True}
    assert (out / "precision_heatmap.csv").exists()
    rc = main(["build", "--graph", str(_chain(tmp_path)), "--kernel", "wendland:A=0.3:delta=0.2",
               "--mode", "car", "--csv", "--out-dir", str(out)])
    assert rc == 0
    assert read_matrix_csv(out / "sigma.csv").shape == (82, 82)


def _chain(tmp_path):
    g = tmp_path / "chain.txt"
    g.write_text("1>2\n")
    return g


def test_exit_codes(tmp_path):
    cyc = tmp_path / "c.txt"
    cyc.write_text("1>2\n2>1\n")
    assert main(["moralize", str(cyc)]) == 4
    assert main(["moralize", str(tmp_path / "missing.txt")]) == 1
    rc = main(["build", "--graph", str(_chain(tmp_path)), "--out-dir", str(tmp_path / "o")])
    assert rc == 6
    assert main(["build", "--graph", str(_chain(tmp_path)), "--kernel", "triwave:A=1:delta=1",
                 "--step", "-1", "--out-dir", str(tmp_path / "o")]) == 2


def test_bench_and_predict(tmp_path, capsys):
    out = tmp_path / "b.csv"
    rc = main(["bench", "--scenario", "car-MDAG", "--scenario", "geostat-MDAG", "--n", "20",
               "--p", "2,3", "--reps", "5", "--flops", "--out", str(out)])
    assert rc == 0
    lines = out.read_text().splitlines()
    assert len(lines) == 5 and "flops" in lines[0]
    rc = main(["predict", "--replicates", "2", "--out-dir", str(tmp_path / "p")])
    assert rc == 0
    assert len((tmp_path / "p" / "cv.csv").read_text().splitlines()) >= 3


def test_pd_sweep_exit_code(capsys):
    assert main(["pd-sweep", "--kernel-version", "V5", "--step", "0.5", "--p", "2"]) == 0
    assert "stabilized" in capsys.readouterr().out
