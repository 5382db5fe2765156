"""Core graph containers, metric closure, Euler walks, serialization."""
from fractions import Fraction

import pytest

from vortour.graphs import (Digraph, Ugraph, Walk, edge_of, euler_closed_walk,
                            format_fraction, is_finite, iter_cut_sides,
                            MetricClosure, parse_digraph, parse_fraction,
                            symmetrize, write_digraph)

F = Fraction


def test_edge_of_orders_endpoints():
    assert edge_of(3, 1) == (1, 3)
    assert edge_of(1, 3) == (1, 3)


def test_digraph_rejects_bad_arcs():
    with pytest.raises(ValueError):
        Digraph([0, 1], {(0, 2): F(1)})
    with pytest.raises(ValueError):
        Digraph([0, 1], {(0, 1): F(-1)})


def test_walk_hops_close_the_loop():
    w = Walk((0, 1, 2), closed=True)
    assert w.hops() == [(0, 1), (1, 2), (2, 0)]
    assert Walk((0, 1, 2), closed=False).hops() == [(0, 1), (1, 2)]


def test_metric_closure_shortest_paths():
    g = Digraph(range(3), {(0, 1): F(1), (1, 2): F(1), (0, 2): F(5),
                           (2, 0): F(1)})
    mc = MetricClosure(g)
    assert mc.dist(0, 2) == 2          # through vertex 1, not the direct arc
    assert mc.dist(2, 1) == 2          # 2 -> 0 -> 1
    assert not is_finite(mc.dist(1, 0)) or mc.dist(1, 0) == 2


def test_metric_closure_walk_expansion():
    g = Digraph(range(3), {(0, 1): F(1), (1, 2): F(1), (2, 0): F(1)})
    mc = MetricClosure(g)
    w = Walk((0, 2), closed=True)
    full = mc.expand_walk(w)
    assert full.seq[0] == 0 and 1 in full.seq
    assert mc.walk_cost(w) == 3


def test_euler_closed_walk_covers_multiplicities():
    g = Digraph(range(3), {(0, 1): F(1), (1, 0): F(1), (1, 2): F(1),
                           (2, 1): F(1)},
                {(0, 1): 2, (1, 0): 2})
    w = euler_closed_walk(g)
    hops = w.hops()
    assert hops.count((0, 1)) == 2 and hops.count((1, 0)) == 2
    assert hops.count((1, 2)) == 1


def test_iter_cut_sides_counts():
    assert sum(1 for _ in iter_cut_sides(range(4))) == 2 ** 4 - 2


def test_symmetrize_takes_cheaper_direction():
    g = Digraph([0, 1], {(0, 1): F(3), (1, 0): F(2)})
    u = symmetrize(g)
    assert u.edges[(0, 1)] == 2


def test_fraction_roundtrip():
    for f in [F(0), F(7), F(22, 7), F(-3, 5)]:
        assert parse_fraction(format_fraction(f)) == f


def test_digraph_serialization_roundtrip():
    g = Digraph(range(3), {(0, 1): F(1, 2), (1, 2): F(3), (2, 0): F(5, 7)})
    g2 = parse_digraph(write_digraph(g).splitlines())
    assert g2.vertices == g.vertices
    assert g2.arcs == g.arcs
