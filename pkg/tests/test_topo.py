"""Topological transforms: normalization and vortex merging."""
from fractions import Fraction

from conftest import two_vortex_instance
from vortour.gen import Profile, generate_instance
from vortour.graphs import MetricClosure
from vortour.instances import trace_faces, validate
from vortour.topo import (cross_normalize, facially_normalize,
                          is_cross_normalized, is_facially_normalized,
                          merge_vortices)
from vortour.vortexdp import oracle_vortex_walk


def test_trace_faces_of_a_triangle():
    rotation = {0: (1, 2), 1: (2, 0), 2: (0, 1)}
    faces = trace_faces(rotation)
    assert len(faces) == 2      # inner and outer face
    assert all(len(f) == 3 for f in faces)


def test_facial_normalization_idempotent_and_valid():
    inst = generate_instance(0, Profile(n=7))
    out, _ = facially_normalize(inst)
    assert is_facially_normalized(out)
    assert validate(out) == []
    again, _ = facially_normalize(out)
    assert again.g.n == out.g.n


def test_facial_normalization_preserves_cost_and_pullback():
    inst = generate_instance(3, Profile(n=7))
    out, cert = facially_normalize(inst)
    c1, _ = oracle_vortex_walk(inst)
    c2, w2 = oracle_vortex_walk(out)
    assert c1 == c2
    full = MetricClosure(out.g).expand_walk(w2)
    back = cert.pull_back(full)
    assert (sum(out.g.arcs[h] for h in full.hops())
            == sum(inst.g.arcs[h] for h in back.hops()))


def test_cross_normalization_caps_planar_degree():
    inst = generate_instance(2, Profile(n=8))
    out, _ = cross_normalize(inst)
    assert is_cross_normalized(out)
    assert validate(out) == []
    face = set(out.vortex.face)
    for v in out.planar_vertices:
        if v not in face:
            assert len(out.rotation[v]) <= 4, v


def test_merge_two_vortices_into_one():
    inst = two_vortex_instance(0)
    merged = merge_vortices(inst)
    assert merged.k == 1
    assert merged.genus == inst.genus + 1
    assert validate(merged) == []
    # width grows by at most 2 over the widest input vortex
    assert merged.p <= inst.p + 2
    mc1, mc2 = MetricClosure(inst.g), MetricClosure(merged.g)
    for u in inst.g.vertices:
        for v in inst.g.vertices:
            assert mc1.dist(u, v) == mc2.dist(u, v)
