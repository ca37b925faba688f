"""Directed acyclic graphs over variate fields and their moral graphs.

Fields are labelled ``1..p``.  The text format accepted by :func:`parse_dag`
has one directive per line::

    # comment
    fields 6          # optional, declares p when some fields have no edges
    name 1 DU         # optional alias for a label
    1>2               # edge parent > child, labels or aliases
"""

from dataclasses import dataclass, field
import heapq
import itertools
import re

import numpy as np

from .errors import CycleDetected, MalformedLine, SelfEdge, UnknownField

__all__ = [
    "FieldDag",
    "MoralGraph",
    "parse_dag",
    "format_dag",
    "topological_order",
    "parents",
    "children",
    "moralize",
    "ci_pairs",
]


def _pair(a, b):
    return (a, b) if a < b else (b, a)


@dataclass(frozen=True)
class FieldDag:
    """DAG over fields ``1..p``; edges are ``(parent, child)`` tuples."""

    p: int
    edges: frozenset
    names: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "edges", frozenset((int(a), int(b)) for a, b in self.edges))
        if self.p < 1:
            raise MalformedLine(f"need at least one field, got p={self.p}")
        for a, b in self.edges:
            for v in (a, b):
                if not 1 <= v <= self.p:
                    raise UnknownField(f"field {v} outside 1..{self.p}")
            if a == b:
                raise SelfEdge(f"self edge on field {a}")
        # raises CycleDetected
        object.__setattr__(self, "_order", _kahn(self.p, self.edges))

    @property
    def order(self):
        return self._order

    def parents(self, v):
        return parents(self, v)

    def children(self, v):
        return children(self, v)

    def label(self, v):
        return self.names.get(v, str(v))

    @property
    def skeleton(self):
        return frozenset(_pair(a, b) for a, b in self.edges)


@dataclass(frozen=True)
class MoralGraph:
    """Undirected moral graph: ``adj`` is indexed by ``label - 1``."""

    p: int
    adj: np.ndarray
    marriages: frozenset

    def adjacent(self, k, l):
        return bool(self.adj[k - 1, l - 1])

    @property
    def edges(self):
        i, j = np.nonzero(np.triu(self.adj, 1))
        return frozenset((int(a) + 1, int(b) + 1) for a, b in zip(i, j))

    def __eq__(self, other):
        return (
            isinstance(other, MoralGraph)
            and self.p == other.p
            and np.array_equal(self.adj, other.adj)
            and self.marriages == other.marriages
        )

    __hash__ = None


def _kahn(p, edges):
    indeg = [0] * (p + 1)
    succ = {v: [] for v in range(1, p + 1)}
    for a, b in edges:
        indeg[b] += 1
        succ[a].append(b)
    heap = [v for v in range(1, p + 1) if indeg[v] == 0]
    heapq.heapify(heap)
    order = []
    while heap:
        v = heapq.heappop(heap)
        order.append(v)
        for w in succ[v]:
            indeg[w] -= 1
            if indeg[w] == 0:
                heapq.heappush(heap, w)
    if len(order) != p:
        stuck = sorted(v for v in range(1, p + 1) if v not in set(order))
        raise CycleDetected(f"cycle among fields {stuck}")
    return tuple(order)


def topological_order(d):
    """Kahn ordering with ties broken by ascending label."""
    return d.order


def _check_label(d, v):
    if not 1 <= v <= d.p:
        raise UnknownField(f"field {v} outside 1..{d.p}")


def parents(d, v):
    _check_label(d, v)
    return frozenset(a for a, b in d.edges if b == v)


def children(d, v):
    _check_label(d, v)
    return frozenset(b for a, b in d.edges if a == v)


def moralize(d):
    """Marry every pair of parents sharing a child and drop directions."""
    adj = np.zeros((d.p, d.p), dtype=np.int8)
    for a, b in d.edges:
        adj[a - 1, b - 1] = adj[b - 1, a - 1] = 1
    marriages = set()
    for v in range(1, d.p + 1):
        for a, b in itertools.combinations(sorted(parents(d, v)), 2):
            if not adj[a - 1, b - 1]:
                marriages.add((a, b))
    for a, b in marriages:
        adj[a - 1, b - 1] = adj[b - 1, a - 1] = 1
    adj.flags.writeable = False
    return MoralGraph(d.p, adj, frozenset(marriages))


def ci_pairs(m):
    """Field pairs not adjacent in the moral graph, as sorted tuples."""
    return frozenset(
        (k, l)
        for k, l in itertools.combinations(range(1, m.p + 1), 2)
        if not m.adj[k - 1, l - 1]
    )


_EDGE = re.compile(r"^\s*([^\s>]+)\s*>\s*([^\s>]+)\s*$")


def parse_dag(text):
    """Parse the edge-list text format into a :class:`FieldDag`.

    Examples
    --------
    >>> sorted(parse_dag("1>2\\n2>3").edges)
    [(1, 2), (2, 3)]
    """
    names = {}
    declared = 0
    edge_tokens = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        words = line.split()
        if words[0] == "name":
            if len(words) != 3 or not words[1].isdigit():
                raise MalformedLine(f"line {lineno}: expected 'name <label> <alias>', got {raw!r}")
            names[int(words[1])] = words[2]
        elif words[0] == "fields":
            if len(words) != 2 or not words[1].isdigit():
                raise MalformedLine(f"line {lineno}: expected 'fields <p>', got {raw!r}")
            declared = int(words[1])
        else:
            m = _EDGE.match(line)
            if m is None:
                raise MalformedLine(f"line {lineno}: expected 'parent>child', got {raw!r}")
            edge_tokens.append((lineno, m.group(1), m.group(2)))

    alias = {v: k for k, v in names.items()}

    def resolve(lineno, tok):
        if tok.isdigit():
            return int(tok)
        if tok in alias:
            return alias[tok]
        raise MalformedLine(f"line {lineno}: unknown field {tok!r}")

    edges = []
    for lineno, a, b in edge_tokens:
        pa, ch = resolve(lineno, a), resolve(lineno, b)
        if pa == ch:
            raise SelfEdge(f"line {lineno}: self edge on field {pa}")
        edges.append((pa, ch))
    labels = [v for e in edges for v in e] + list(names)
    p = max([declared, *labels]) if (labels or declared) else 0
    if p < 1:
        raise MalformedLine("graph declares no fields")
    if min(labels, default=1) < 1:
        raise UnknownField("field labels start at 1")
    return FieldDag(p, frozenset(edges), names)


def format_dag(d):
    """Inverse of :func:`parse_dag`."""
    lines = [f"fields {d.p}"]
    lines += [f"name {k} {v}" for k, v in sorted(d.names.items())]
    lines += [f"{a}>{b}" for a, b in sorted(d.edges)]
    return "\n".join(lines) + "\n"
