"""End-to-end tour pipeline: thinning, rounding, stitching, ledger."""
from fractions import Fraction

import pytest

from vortour.gen import Profile, generate_instance
from vortour.graphs import Digraph, MetricClosure, Walk
from vortour.pipeline import (PipelineError, approximate_atsp, stitch)

F = Fraction


def test_tour_ledger_decomposes_exactly():
    inst = generate_instance(0, Profile(n=8))
    res = approximate_atsp(inst, compare_oracle=True)
    lg = res.ledger
    assert res.cost == lg["walks_total"] + lg["stitch"]
    assert res.lp_objective == lg["lp_objective"] <= res.cost
    assert lg["ratio"] >= 1
    assert set(res.walk.seq) >= set(inst.g.vertices)


def test_tour_with_apex():
    inst = generate_instance(0, Profile(n=7, a=1))
    res = approximate_atsp(inst)
    assert set(res.walk.seq) >= set(inst.g.vertices)
    assert res.cost >= res.lp_objective


def test_stitch_joins_walks_and_reports_the_hop_cost():
    g = Digraph(range(4), {(0, 1): F(1), (1, 0): F(1), (2, 3): F(1),
                           (3, 2): F(1), (1, 2): F(5), (2, 1): F(5),
                           (3, 0): F(5), (0, 3): F(5)})
    w1 = Walk((0, 1), closed=True)
    w2 = Walk((2, 3), closed=True)
    joined, extra = stitch([w1, w2], g)
    assert set(joined.seq) == {0, 1, 2, 3}
    assert extra == 12         # cheapest hop over (6) and back (6)


def test_single_walk_needs_no_stitching():
    g = Digraph(range(2), {(0, 1): F(1), (1, 0): F(1)})
    w = Walk((0, 1), closed=True)
    joined, extra = stitch([w], g)
    assert joined is w and extra == 0


def test_pipeline_rejects_multi_vortex_input():
    from conftest import two_vortex_instance
    with pytest.raises(PipelineError):
        approximate_atsp(two_vortex_instance(0))
