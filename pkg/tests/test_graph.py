import pytest
from hypothesis import given, strategies as st
import numpy as np

from crossmrf.errors import CycleDetected, MalformedLine, SelfEdge, UnknownField
from crossmrf.fixtures import cams_dag, chain_dag, full_dag, random_dag, six_field_dag
from crossmrf.graph import (
    FieldDag,
    ci_pairs,
    children,
    format_dag,
    moralize,
    parents,
    parse_dag,
    topological_order,
)


def test_parse_chain():
    d = parse_dag("1>2\n2>3")
    assert d.p == 3
    assert d.edges == {(1, 2), (2, 3)}
    assert topological_order(d) == (1, 2, 3)


def test_parse_directives_and_aliases():
    d = parse_dag("# demo\nfields 4\nname 1 DU\nname 2 SU\nDU > SU   # edge\n2>3\n")
    assert d.p == 4
    assert d.edges == {(1, 2), (2, 3)}
    assert d.label(1) == "DU"
    assert parse_dag(format_dag(d)) == d


@pytest.mark.parametrize(
    "text, exc",
    [("1>2\n2>1", CycleDetected), ("1>1", SelfEdge), ("1-2", MalformedLine),
     ("a>2", MalformedLine), ("name x y", MalformedLine), ("", MalformedLine)],
)
def test_parse_errors(text, exc):
    with pytest.raises(exc):
        parse_dag(text)


def test_edgeless_order_breaks_ties_by_label():
    assert topological_order(FieldDag(4, frozenset())) == (1, 2, 3, 4)


def test_six_field_parents_and_order():
    d = six_field_dag()
    assert parents(d, 5) == {4}
    assert parents(d, 6) == {1, 3, 5}
    assert parents(d, 1) == frozenset()
    assert children(d, 2) == {3, 4}
    pos = {v: k for k, v in enumerate(d.order)}
    assert all(pos[a] < pos[b] for a, b in d.edges)
    with pytest.raises(UnknownField):
        parents(d, 7)


def test_six_field_moralization():
    m = moralize(six_field_dag())
    assert m.marriages == {(1, 3), (1, 5), (3, 5)}
    assert ci_pairs(m) == {(1, 4), (2, 5), (2, 6), (4, 6)}


def test_collider_and_trivial_cases():
    m = moralize(FieldDag(3, frozenset({(1, 3), (2, 3)})))
    assert m.marriages == {(1, 2)}
    assert ci_pairs(moralize(full_dag(5))) == frozenset()
    assert ci_pairs(moralize(FieldDag(3, frozenset()))) == {(1, 2), (1, 3), (2, 3)}


def test_cams_graph_separates_bc_from_du_and_ss():
    m = moralize(cams_dag())
    # BC (4) given SU (2) and OM (3) is independent of DU (1) and SS (5)
    assert {(1, 4), (4, 5)} <= ci_pairs(m)
    assert m.adjacent(2, 3)


@given(st.integers(2, 10))
def test_chains_need_no_marriages(p):
    assert moralize(chain_dag(p)).marriages == frozenset()


@given(st.integers(1, 8), st.integers(0, 2 ** 32 - 1), st.floats(0.0, 1.0))
def test_moral_graph_invariants(p, seed, prob):
    d = random_dag(p, np.random.default_rng(seed), prob, moral=False)
    m = moralize(d)
    adj = m.adj
    assert np.array_equal(adj, adj.T) and not np.any(np.diag(adj))
    for a, b in d.edges:
        assert m.adjacent(a, b)
    for c in range(1, p + 1):
        pa = sorted(parents(d, c))
        for i, a in enumerate(pa):
            for b in pa[i + 1:]:
                assert m.adjacent(a, b)
    assert moralize(d) == m
    assert not (ci_pairs(m) & d.skeleton)
    assert set(map(tuple, map(sorted, d.skeleton))) <= m.edges
