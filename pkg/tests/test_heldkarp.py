"""Exact-rational cut LP: solver, separation, thinness measures."""
from fractions import Fraction

from vortour.gen import Profile, generate_instance
from vortour.graphs import Digraph, MetricClosure, Walk, edge_of
from vortour.heldkarp import (augment, measure_thinness, predicates, solve_lp,
                              symz, verify_cuts_exhaustive, z_cut)
from vortour.oracles import atsp_optimum

F = Fraction


def ring(n, cost=1):
    arcs = {}
    for i in range(n):
        arcs[(i, (i + 1) % n)] = F(cost)
        arcs[((i + 1) % n, i)] = F(cost)
    return Digraph(range(n), arcs)


def test_lp_on_a_ring_hits_the_tour_value():
    g = ring(5)
    pt = solve_lp(g)
    assert pt.objective == 5
    assert verify_cuts_exhaustive(g, pt.x) == []


def test_lp_never_exceeds_the_optimum():
    for seed in range(6):
        inst = generate_instance(seed, Profile(n=7))
        pt = solve_lp(inst.g)
        opt, walk = atsp_optimum(inst.g)
        assert walk is not None
        assert pt.objective <= opt
        assert verify_cuts_exhaustive(inst.g, pt.x) == []


def test_symz_adds_both_directions():
    x = {(0, 1): F(1, 3), (1, 0): F(1, 4), (1, 2): F(1)}
    z = symz(x)
    assert z[(0, 1)] == F(7, 12)
    assert z[(1, 2)] == 1


def test_augment_adds_one_unit_per_walk_hop():
    g = ring(4)
    pt = solve_lp(g)
    w = Walk((0, 1, 2, 3), closed=True)
    aug = augment(pt, w)
    for (u, v) in w.hops():
        assert aug.x[(u, v)] == pt.x.get((u, v), F(0)) + 1
    assert aug.objective == pt.objective + 4


def test_measure_thinness_on_a_path_in_a_cycle():
    vs = range(4)
    z = {edge_of(i, (i + 1) % 4): F(1) for i in range(4)}
    s = [(0, 1), (1, 2), (2, 3)]
    rep = measure_thinness(vs, z, s)
    # the cut {1,2} carries 2 of the 3 edges over z-weight 2
    assert rep.alpha_star == 1
    assert rep.exhaustive


def test_predicates_thick_and_dense():
    vs = range(3)
    z = {edge_of(0, 1): F(2), edge_of(1, 2): F(2), edge_of(0, 2): F(2)}
    w = Walk((0, 1, 2), closed=True)
    pred = predicates(vs, z, w, F(2))
    assert pred["is_thick"] and pred["is_dense"]
    z[edge_of(0, 1)] = F(1, 2)
    pred = predicates(vs, z, w, F(2))
    assert not pred["is_dense"]


def test_z_cut_sums_crossing_edges():
    z = {(0, 1): F(1), (1, 2): F(2), (0, 2): F(4)}
    assert z_cut(z, {0}) == 5
    assert z_cut(z, {0, 1}) == 6
