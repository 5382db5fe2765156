"""Vortex walk dynamic program versus the brute-force oracle."""
from vortour.gen import Profile, generate_instance
from vortour.vortexdp import (optimal_vortex_walk,
                              optimal_vortex_walk_with_apices,
                              oracle_vortex_walk)


def test_relaxed_mode_matches_oracle():
    for seed in range(6):
        inst = generate_instance(seed, Profile(n=6))
        cost, walk = optimal_vortex_walk(inst)
        oracle, _ = oracle_vortex_walk(inst)
        assert cost == oracle, seed
        assert set(walk.seq) >= set(inst.vortex.vertices)


def test_strict_mode_is_a_sound_restriction():
    # the stricter merge rule can only lose solutions, never invent them
    for seed in range(4):
        inst = generate_instance(seed, Profile(n=6))
        strict, _ = optimal_vortex_walk(inst, mode="strict")
        oracle, _ = oracle_vortex_walk(inst)
        assert strict >= oracle, seed


def test_width_two_vortices():
    for seed in range(4):
        inst = generate_instance(seed, Profile(n=6, p=2))
        cost, _ = optimal_vortex_walk(inst)
        oracle, _ = oracle_vortex_walk(inst)
        assert cost == oracle, seed


def test_apex_enumeration():
    for seed in range(3):
        inst = generate_instance(seed, Profile(n=5, a=1))
        cost, _ = optimal_vortex_walk_with_apices(inst)
        oracle, _ = oracle_vortex_walk(inst)
        assert cost == oracle, seed


def test_apexless_call_agrees_with_plain_dp():
    inst = generate_instance(1, Profile(n=6))
    c1, _ = optimal_vortex_walk(inst)
    c2, _ = optimal_vortex_walk_with_apices(inst)
    assert c1 == c2
