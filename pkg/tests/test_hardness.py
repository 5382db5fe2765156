"""Hardness reduction chain: gadgets, stages, solvers, certificates."""
import random

import pytest

from vortour.graphs import edge_of
from vortour.hardness import (CliqueInstance, EdgeBalancingInstance,
                              WalkInstance, biclique_to_edge_balancing,
                              build_gadget_Hs, build_gadget_HX,
                              clique_to_biclique, decide_atsp_threshold,
                              dense_nonaveraging_set, edge_balancing_to_walk,
                              enumerate_gadget_types, expected_types_Hs,
                              harden_chain, is_nonaveraging, nonaveraging_set,
                              solve_biclique, solve_clique,
                              solve_edge_balancing, solve_exactly_once_walk,
                              validate_path_decomposition, verify_balance,
                              verify_biclique, verify_chain, verify_clique,
                              verify_exactly_once_walk, walk_to_atsp)


def rnd_clique(rng, n, p):
    edges = {edge_of(u, v) for u in range(n) for v in range(u + 1, n)
             if rng.random() < p}
    return CliqueInstance(n, frozenset(edges))


def test_nonaveraging_sets():
    assert nonaveraging_set(2, 3) == (3, 9, 27)
    for k, n in [(1, 4), (2, 6), (3, 4)]:
        assert is_nonaveraging(nonaveraging_set(k, n), k)
        d = dense_nonaveraging_set(k, n)
        assert is_nonaveraging(d, k) and len(d) == n


def test_gadget_validation():
    for s in (1, 2, 3):
        g = build_gadget_Hs(s)
        assert g.validate() == []
    g = build_gadget_HX((1, 3))
    assert g.validate() == []


def test_gadget_type_enumeration_matches_the_law():
    g = build_gadget_Hs(2)
    assert enumerate_gadget_types(g) == expected_types_Hs(g, 2)


def test_clique_biclique_equivalence():
    rng = random.Random(7)
    for _ in range(6):
        ci = rnd_clique(rng, rng.randint(3, 6), rng.random())
        bi, cert = clique_to_biclique(ci, 2)
        wit = solve_biclique(bi)
        clq = solve_clique(ci, 2)
        assert (wit is None) == (clq is None)
        if wit is not None:
            assert verify_clique(ci, 2, cert.back(wit))
            assert verify_biclique(bi, cert.forward(clq))


def test_biclique_balancing_equivalence():
    rng = random.Random(11)
    for _ in range(8):
        n = rng.randint(2, 4)
        ci = rnd_clique(rng, n, rng.random())
        bi, _ = clique_to_biclique(ci, 2)
        eb, cert = biclique_to_edge_balancing(bi, dense_nonaveraging_set(2, n))
        chi = solve_edge_balancing(eb)
        clq = solve_clique(ci, 2)
        assert (chi is None) == (clq is None)
        if chi is not None:
            assert verify_balance(eb, chi)
            assert verify_biclique(bi, cert.back(chi))
            assert verify_balance(eb, cert.forward(solve_biclique(bi)))


def tiny_eb(yes=True):
    if yes:
        return EdgeBalancingInstance((0, 1), {(0, 1): (1, 2), (1, 0): (2, 3)})
    return EdgeBalancingInstance((0, 1), {(0, 1): (1,), (1, 0): (2,)})


@pytest.mark.parametrize("yes", [True, False])
def test_walk_stage_on_small_balancing_instances(yes):
    eb = tiny_eb(yes)
    assert (solve_edge_balancing(eb) is not None) == yes
    wi, cert = edge_balancing_to_walk(eb)
    assert validate_path_decomposition(wi) == []
    seq = solve_exactly_once_walk(wi)
    assert (seq is not None) == yes
    if seq is not None:
        assert verify_exactly_once_walk(wi, seq)
        assert verify_balance(eb, cert.back(seq))
        fseq = cert.forward(solve_edge_balancing(eb))
        assert verify_exactly_once_walk(wi, fseq)


@pytest.mark.parametrize("yes", [True, False])
def test_atsp_stage_on_small_balancing_instances(yes):
    eb = tiny_eb(yes)
    wi, _ = edge_balancing_to_walk(eb)
    ar, cert = walk_to_atsp(wi)
    got, tour = decide_atsp_threshold(ar)
    assert got == yes
    if got:
        assert verify_exactly_once_walk(wi, cert.back(tour))


def test_atsp_decision_through_the_bitmask_oracle():
    wi = WalkInstance(4, frozenset({(0, 1), (1, 2), (2, 0), (2, 3), (3, 0)}),
                      frozenset({1, 2, 3}))
    ar, _ = walk_to_atsp(wi)
    got, _ = decide_atsp_threshold(ar)
    assert got == (solve_exactly_once_walk(wi) is not None)


def test_chain_bundles_verify_end_to_end():
    rng = random.Random(3)
    for _ in range(10):
        ci = rnd_clique(rng, rng.randint(1, 6), rng.random())
        bundle = harden_chain(ci, 2)
        report = verify_chain(bundle)
        assert report["clique"] in (True, False)
        if bundle.atsp is None:
            assert bundle.skipped
