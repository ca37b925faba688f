import numpy as np
import pytest
import scipy.sparse as sp
from hypothesis import given, strategies as st

from crossmrf.analyze import asymmetry, ci_pattern, inverse_residual, sparsity_percent
from crossmrf.assemble import build_joint
from crossmrf.errors import ShapeMismatch
from crossmrf.fixtures import six_field_spec


def test_sparsity_percent_and_block_pattern():
    m = np.zeros((4, 4))
    m[0, 0] = m[3, 2] = 1.0
    r = sparsity_percent(m, block_size=2, threshold_used=1e-3)
    assert r.zero_percent == pytest.approx(87.5)
    np.testing.assert_array_equal(r.per_block_pattern, [[False, True], [True, False]])
    assert r.threshold_used == 1e-3
    assert sparsity_percent(sp.csr_matrix(m)).zero_percent == pytest.approx(87.5)
    with pytest.raises(ShapeMismatch):
        sparsity_percent(m, block_size=3)


def test_asymmetry():
    assert asymmetry(np.array([[1.0, 2.0], [-1.0, 0.0]])) == 3.0
    assert asymmetry(np.eye(3)) == 0.0
    with pytest.raises(ShapeMismatch):
        asymmetry(np.ones((2, 3)))


def test_six_field_diagnostics():
    jp = build_joint(six_field_spec())
    assert ci_pattern(jp) == {(1, 4), (2, 5), (2, 6), (4, 6)}
    assert ci_pattern(jp, raw=True) == ci_pattern(jp)
    assert inverse_residual(jp) < 1e-6
    # the thresholded precision trades exactness for sparsity
    assert sparsity_percent(jp.precision).zero_percent > sparsity_percent(jp.precision_raw).zero_percent
    for k in jp.layout:
        assert asymmetry(jp.sigma_block(k, k)) <= 1e-12
    assert max(asymmetry(jp.sigma_block(t, r)) for t, r in jp.b_blocks) > 0


def test_car_mode_is_sparser_than_geostat():
    for family in ("triwave", "wendland"):
        g = build_joint(six_field_spec(family, "geostat"))
        c = build_joint(six_field_spec(family, "car"))
        assert sparsity_percent(c.precision).zero_percent > sparsity_percent(g.precision).zero_percent


@given(st.integers(1, 12), st.integers(0, 2 ** 32 - 1))
def test_sparsity_bounds_and_transpose(n, seed):
    rng = np.random.default_rng(seed)
    m = rng.standard_normal((n, n)) * (rng.random((n, n)) < 0.4)
    pct = sparsity_percent(m).zero_percent
    assert 0 <= pct <= 100
    assert pct == sparsity_percent(m.T).zero_percent
    assert asymmetry(m) == asymmetry(m.T)
    assert asymmetry(m + m.T) == 0
