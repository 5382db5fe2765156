"""Seeded random instance generation.

The planar piece is a randomly triangulated polygon (the polygon is the
designated face) with optional interior vertices inserted into triangles;
the construction is purely combinatorial, so instances are deterministic
from the seed across platforms.  A vortex of width <= p is glued over the
face, apices are fully connected to the planar piece, and all arc costs are
made metric (each arc cost equals the shortest-path distance).
"""
from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, FrozenSet, List, Optional, Sequence, Set, Tuple

from .graphs import Arc, Digraph, MetricClosure, edge_of, is_finite
from .instances import NearlyEmbeddableInstance, Vortex, validate


@dataclass(frozen=True)
class Profile:
    n: int = 8                 # total vertex budget
    p: int = 1                 # vortex width bound
    a: int = 0                 # number of apices
    n_face: Optional[int] = None
    cost_lo: int = 1
    cost_hi: int = 20
    metric: bool = True


def _triangulate_polygon(poly: Sequence[int], rng: random.Random,
                         faces: List[Tuple[int, ...]]):
    """Random fan-free triangulation of a CCW polygon; appends CCW triangles."""
    if len(poly) == 3:
        faces.append(tuple(poly))
        return
    # split on a random diagonal (i, j) with j >= i+2 (non-adjacent)
    m = len(poly)
    i = rng.randrange(m)
    j = (i + rng.randrange(2, m - 1)) % m
    i, j = sorted((i, j))
    if (j - i) < 2 or (i + m - j) < 2:
        _triangulate_polygon(poly, rng, faces)  # resample
        return
    _triangulate_polygon(poly[i:j + 1], rng, faces)
    _triangulate_polygon(poly[j:] + poly[:i + 1], rng, faces)


def _rotation_from_faces(faces: List[Tuple[int, ...]]) -> Dict[int, Tuple[int, ...]]:
    """Rotation system whose traced faces are exactly the given cycles.

    Each directed edge must appear in exactly one face cycle; at vertex v a
    face (..., u, v, w, ...) contributes successor(u) = w around v.
    """
    succ: Dict[int, Dict[int, int]] = {}
    for f in faces:
        m = len(f)
        for i in range(m):
            u, v, w = f[i], f[(i + 1) % m], f[(i + 2) % m]
            succ.setdefault(v, {})[u] = w
    rotation: Dict[int, Tuple[int, ...]] = {}
    for v, nxt in succ.items():
        start = min(nxt)
        cyc = [start]
        while True:
            nv = nxt[cyc[-1]]
            if nv == start:
                break
            cyc.append(nv)
        if len(cyc) != len(nxt):
            raise ValueError(f"rotation at {v} is not a single cycle")
        rotation[v] = tuple(cyc)
    return rotation


def generate_instance(seed: int, profile: Profile = Profile()) -> NearlyEmbeddableInstance:
    # string seeding is deterministic across platforms and processes
    rng = random.Random(f"vortour-gen:{seed}:{profile.n}:{profile.p}:{profile.a}:{profile.n_face}")
    n, p, a = profile.n, profile.p, profile.a
    if n < 4 + a:
        raise ValueError("profile too small: need n >= 4 + a")

    n_face = profile.n_face or min(3 + rng.randint(1, 3), n - a - 1)
    n_face = max(3, min(n_face, n - a))
    budget = n - n_face - a
    n_vort = rng.randint(0, min(budget, p * n_face)) if budget > 0 else 0
    # pick the bag spans up front; a span may occupy 1-2 bags, so capacity
    # can run out before n_vort is reached -- the surplus becomes interior
    bag_load = [0] * n_face
    spans: List[List[int]] = []
    for _ in range(n_vort):
        starts = [i for i in range(n_face) if bag_load[i] < p]
        if not starts:
            break
        i0 = rng.choice(starts)
        span = [i0]
        if rng.random() < 0.5 and bag_load[(i0 + 1) % n_face] < p:
            span.append((i0 + 1) % n_face)
        for j in span:
            bag_load[j] += 1
        spans.append(span)
    n_vort = len(spans)
    n_int = budget - n_vort

    face = tuple(range(n_face))            # CCW polygon 0..n_face-1
    next_id = n_face

    # --- planar piece: triangulated polygon + inserted interior vertices
    inner: List[Tuple[int, ...]] = []
    _triangulate_polygon(list(face), rng, inner)
    interior_ids = []
    for _ in range(n_int):
        t = inner.pop(rng.randrange(len(inner)))
        u = next_id
        next_id += 1
        interior_ids.append(u)
        aa, bb, cc = t
        inner.extend([(aa, bb, u), (bb, cc, u), (cc, aa, u)])
    outer = tuple(reversed(face))          # outer boundary traced CW
    rotation = _rotation_from_faces(inner + [outer])
    planar = tuple(sorted(rotation))

    # --- vortex over the face
    vort_ids = list(range(next_id, next_id + n_vort))
    next_id += n_vort
    bags: Dict[int, Set[int]] = {fv: {fv} for fv in face}
    for z, span in zip(vort_ids, spans):
        for j in span:
            bags[face[j]].add(z)
    vortex_vertices = frozenset(face) | frozenset(vort_ids)

    # --- apices
    apex_ids = tuple(range(next_id, next_id + a))
    next_id += a

    cost = lambda: Fraction(rng.randint(profile.cost_lo, profile.cost_hi))
    arcs: Dict[Arc, Fraction] = {}

    def add_both(u, v):
        arcs[(u, v)] = cost()
        arcs[(v, u)] = cost()

    # planar embedding edges (face cycle + triangulation edges), both ways
    seen_e = set()
    for v, nbrs in rotation.items():
        for u in nbrs:
            e = edge_of(u, v)
            if e not in seen_e:
                seen_e.add(e)
                add_both(e[0], e[1])

    # vortex arcs: inside bags; every interior vortex vertex gets at least a
    # two-way link to one bag-mate so the graph stays strongly connected
    vortex_arcs: Set[Arc] = set()

    def add_vortex_arc(u, v):
        if u != v and (u, v) not in arcs:
            arcs[(u, v)] = cost()
            vortex_arcs.add((u, v))

    for z in vort_ids:
        mates = sorted({m for b in bags.values() if z in b for m in b} - {z})
        # anchor on a face vertex so every interior vertex reaches the piece
        anchor = rng.choice(sorted(fv for fv, b in bags.items() if z in b))
        add_vortex_arc(z, anchor)
        add_vortex_arc(anchor, z)
        for m in mates:
            if rng.random() < 0.5:
                add_vortex_arc(z, m)
            if rng.random() < 0.5:
                add_vortex_arc(m, z)
    # a few extra face-to-face vortex arcs inside shared bags
    for fv, b in bags.items():
        for u in sorted(b):
            for v in sorted(b):
                if u != v and (u, v) not in arcs and rng.random() < 0.15:
                    add_vortex_arc(u, v)

    # apices: two-way arcs to every planar vertex
    for ap in apex_ids:
        for v in planar:
            add_both(ap, v)

    vertices = list(range(next_id))
    g = Digraph(vertices, arcs)
    if profile.metric:
        g = metrify(g)

    vx = Vortex(face, vortex_vertices, frozenset(vortex_arcs),
                {fv: frozenset(b) for fv, b in bags.items()})
    inst = NearlyEmbeddableInstance(g, planar, rotation, (vx,), apex_ids)
    rep = validate(inst)
    if rep:
        raise AssertionError(f"generator produced invalid instance: {rep}")
    return inst


def metrify(g: Digraph) -> Digraph:
    """Replace every arc cost by the shortest-path distance of its endpoints."""
    mc = MetricClosure(g)
    arcs = {}
    for (u, v) in g.arcs:
        d = mc.dist(u, v)
        assert is_finite(d)
        arcs[(u, v)] = d
    return Digraph(g.vertices, arcs, dict(g.mult))
