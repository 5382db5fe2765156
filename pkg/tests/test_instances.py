"""Instance model, generator, and serialization."""
import pytest

from vortour.gen import Profile, generate_instance
from vortour.instances import parse_instance, validate, write_instance


def test_generator_produces_valid_instances():
    for seed in range(5):
        inst = generate_instance(seed, Profile(n=7))
        assert validate(inst) == [], seed
        assert inst.k == 1 and inst.a == 0
        assert inst.p <= 1
        assert inst.g.strongly_connected()


def test_generator_respects_width_and_apex_counts():
    inst = generate_instance(0, Profile(n=7, p=2, a=1))
    assert validate(inst) == []
    assert inst.p <= 2 and inst.a == 1
    for apex in inst.apices:
        assert apex not in inst.planar_vertices
        assert apex not in inst.vortex.vertices


def test_generation_is_deterministic():
    a = write_instance(generate_instance(3, Profile(n=8)))
    b = write_instance(generate_instance(3, Profile(n=8)))
    assert a == b


def test_instance_serialization_roundtrip():
    inst = generate_instance(1, Profile(n=7, p=2, a=1))
    back = parse_instance(write_instance(inst))
    assert validate(back) == []
    assert back.g.vertices == inst.g.vertices
    assert back.g.arcs == inst.g.arcs
    assert back.rotation == inst.rotation
    assert back.vortices == inst.vortices
    assert back.apices == inst.apices


def test_metric_costs_obey_triangle_inequality():
    inst = generate_instance(2, Profile(n=7))
    g = inst.g
    from vortour.graphs import MetricClosure
    mc = MetricClosure(g)
    for (u, v), c in g.arcs.items():
        assert mc.dist(u, v) == c, (u, v)
