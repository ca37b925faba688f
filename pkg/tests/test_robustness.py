import numpy as np

from crossmrf.robustness import PARAM_LATTICE, pd_sweep, sweep_dag


def test_lattice_and_dags():
    np.testing.assert_allclose(PARAM_LATTICE, np.arange(1, 11) / 10)
    assert sweep_dag(7).p == 7 and sweep_dag(5).p == 5
    assert sweep_dag(3).edges == {(1, 2), (2, 3)}


def test_small_sweep_counts():
    res = pd_sweep("V5", step=0.25, p=3, values=[0.2, 0.8])
    by = {r.path: r for r in res}
    assert set(by) == {"original", "stabilized"}
    st = by["stabilized"]
    assert st.total == 4 and st.both_pd == 4
    assert st.max_regularization >= 1e-9
    assert by["original"].max_regularization in (0.0, None)
    assert st.as_row()["both_pd"] == 4
