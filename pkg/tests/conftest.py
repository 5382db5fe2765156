"""Shared builders for the test suite."""
import random
from fractions import Fraction

from vortour.graphs import Digraph, Ugraph, edge_of
from vortour.instances import NearlyEmbeddableInstance, Vortex

F = Fraction


def one_apex_graph(seed: int, n: int):
    """Random 1-apex graph: a rim cycle with non-crossing fan chords plus an
    apex (vertex 0) attached to a random nonempty rim subset."""
    rng = random.Random(seed)
    rim = list(range(1, n))
    edges = set()
    m = len(rim)
    for i, v in enumerate(rim):
        edges.add(edge_of(v, rim[(i + 1) % m]))
    anchor = rng.choice(rim)
    ai = rim.index(anchor)
    for j, v in enumerate(rim):
        if v == anchor or abs(j - ai) in (1, m - 1):
            continue
        if rng.random() < 0.4:
            edges.add(edge_of(anchor, v))
    for v in rng.sample(rim, rng.randint(1, m)):
        edges.add(edge_of(0, v))
    ug = Ugraph(range(n), {e: F(1) for e in edges})
    z = {e: F(2) for e in edges}
    return ug, 0, z


def multi_apex_graph(seed: int, n: int, a: int):
    """Random a-apex graph: apices 0..a-1 over a rim cycle with fan chords."""
    rng = random.Random(seed)
    rim = list(range(a, n))
    edges = set()
    m = len(rim)
    for i, v in enumerate(rim):
        edges.add(edge_of(v, rim[(i + 1) % m]))
    anchor = rng.choice(rim)
    ai = rim.index(anchor)
    for j, v in enumerate(rim):
        if v != anchor and abs(j - ai) not in (1, m - 1) and rng.random() < 0.3:
            edges.add(edge_of(anchor, v))
    for ap in range(a):
        for v in rng.sample(rim, rng.randint(1, m)):
            edges.add(edge_of(ap, v))
    ug = Ugraph(range(n), {e: F(1) for e in edges})
    z = {e: F(2) for e in edges}
    return ug, list(range(a)), z


def two_vortex_instance(seed: int = 0) -> NearlyEmbeddableInstance:
    """Two vortices on a fixed 6-vertex planar skeleton, seeded arc costs."""
    rng = random.Random(seed)

    def c():
        return Fraction(rng.randint(1, 9))

    arcs = {}
    und = [(0, 1), (1, 2), (0, 2), (2, 3), (3, 4), (4, 5), (3, 5)]
    for u, v in und:
        w = c()
        arcs[(u, v)] = w
        arcs[(v, u)] = w
    arcs[(6, 0)] = c()
    arcs[(0, 6)] = c()
    arcs[(7, 3)] = c()
    arcs[(3, 7)] = c()
    g = Digraph(range(8), arcs)
    rotation = {0: (1, 2), 1: (2, 0), 2: (0, 1, 3), 3: (2, 4, 5),
                4: (5, 3), 5: (3, 4)}
    vx1 = Vortex((0, 1, 2), frozenset({0, 1, 2, 6}),
                 frozenset({(6, 0), (0, 6)}),
                 {0: frozenset({0, 6}), 1: frozenset({1}), 2: frozenset({2})})
    vx2 = Vortex((3, 4, 5), frozenset({3, 4, 5, 7}),
                 frozenset({(7, 3), (3, 7)}),
                 {3: frozenset({3, 7}), 4: frozenset({4}), 5: frozenset({5})})
    return NearlyEmbeddableInstance(g, tuple(range(6)), rotation, (vx1, vx2), ())


def is_forest(edges) -> bool:
    parent = {}

    def find(x):
        parent.setdefault(x, x)
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for (u, v) in edges:
        ru, rv = find(u), find(v)
        if ru == rv:
            return False
        parent[ru] = rv
    return True
