"""Thin tree / forest / subgraph constructions."""
from fractions import Fraction

from conftest import is_forest
from vortour.gen import Profile, generate_instance
from vortour.graphs import MetricClosure, Ugraph, edge_of
from vortour.heldkarp import augment, measure_thinness, solve_lp, symz
from vortour.thin import (planar_thin_tree, thin_forest_a_apex,
                          thin_subgraph_nearly, thin_tree_one_apex,
                          tiny_cut_partition)
from vortour.vortexdp import optimal_vortex_walk_with_apices

F = Fraction


def ug(edges, z_const=None):
    vs = {v for e in edges for v in e}
    u = Ugraph(vs, {edge_of(*e): F(1) for e in edges})
    z = ({edge_of(*e): F(z_const) for e in edges}
         if z_const is not None else None)
    return u, z


def test_tiny_cut_partition_keeps_well_connected_parts_whole():
    u, z = ug([(0, 1), (1, 2), (2, 0)], 2)
    comps, kept = tiny_cut_partition(u, z, F(1, 10))
    assert len(comps) == 1 and kept == set(u.edges)


def test_tiny_cut_partition_splits_on_light_bridges():
    tri1 = [(0, 1), (1, 2), (2, 0)]
    tri2 = [(3, 4), (4, 5), (5, 3)]
    u = Ugraph(range(6), {edge_of(*e): F(1) for e in tri1 + tri2 + [(2, 3)]})
    z = {edge_of(*e): F(2) for e in tri1 + tri2}
    z[(2, 3)] = F(1, 20)
    comps, kept = tiny_cut_partition(u, z, F(1, 10))
    assert sorted(map(sorted, comps)) == [[0, 1, 2], [3, 4, 5]]
    assert (2, 3) not in kept


def test_planar_thin_tree_on_cycle_and_grid():
    u, z = ug([(0, 1), (1, 2), (2, 3), (3, 0)], 1)
    cert = planar_thin_tree(u, z)
    assert len(cert.edges) == 3 and is_forest(cert.edges)
    assert cert.alpha_star <= 2
    grid = []
    for r in range(3):
        for c in range(3):
            if c < 2:
                grid.append((3 * r + c, 3 * r + c + 1))
            if r < 2:
                grid.append((3 * r + c, 3 * r + c + 3))
    u3, z3 = ug(grid, 2)
    cert3 = planar_thin_tree(u3, z3)
    rep = measure_thinness(u3.vertices, z3, cert3.edges)
    assert rep.alpha_star == cert3.alpha_star


def test_planar_thin_tree_returns_trees_unchanged():
    u, z = ug([(0, 1), (1, 2), (1, 3)], 2)
    cert = planar_thin_tree(u, z)
    assert set(cert.edges) == set(u.edges)


def wheel(spokes, hub=0):
    edges = []
    rim = list(range(1, spokes + 1))
    for i, v in enumerate(rim):
        edges.append((v, rim[(i + 1) % spokes]))
        edges.append((hub, v))
    return edges


def test_one_apex_wheel():
    u, z = ug(wheel(6), 2)
    cert = thin_tree_one_apex(u, 0, z)
    assert len(cert.edges) == u.n - 1 and is_forest(cert.edges)
    assert cert.alpha_star <= 320


def test_two_apex_double_wheel():
    rim = list(range(1, 8))
    edges = []
    for i, v in enumerate(rim):
        edges.append((v, rim[(i + 1) % 7]))
        edges.append((0, v))
        edges.append((8, v))
    u, z = ug(edges, 2)
    cert = thin_forest_a_apex(u, [0, 8], z)
    assert is_forest(cert.edges)
    assert cert.components <= 2
    assert cert.alpha_star <= 4800


def test_vortex_thin_subgraph_classification_counters():
    inst = generate_instance(0, Profile(n=8))
    pt = solve_lp(inst.g)
    _, walk_mc = optimal_vortex_walk_with_apices(inst)
    walk = MetricClosure(inst.g).expand_walk(walk_mc)
    z = symz(augment(pt, walk).x)
    res = thin_subgraph_nearly(inst, z, walk)
    assert res.s21 <= 1 and res.s22 <= 7
    assert res.cert.mode == "exhaustive"
    assert res.union_cert.components <= 1
