"""Nearly-embeddable instance model: planar piece + face + vortex + apices.

The planar piece is represented by a rotation system (cyclic neighbor order
per vertex); the designated face is validated by face tracing.  Each vortex
carries its face, vertex set, arc set and a path decomposition with one bag
per face vertex.  Parameters (a, g, k, p) are recorded in the instance
header; algorithmic entry points reject g >= 1 explicitly.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Set, Tuple

from .graphs import (Arc, Digraph, Walk, edge_of, format_fraction,
                     parse_fraction)


@dataclass(frozen=True)
class Vortex:
    """A pathwidth-bounded subgraph glued along a face of the planar piece."""

    face: Tuple[int, ...]                  # cyclic vertex sequence
    vertices: FrozenSet[int]               # V(H), includes the face vertices
    arcs: FrozenSet[Arc]
    bags: Dict[int, FrozenSet[int]]        # face vertex -> bag

    def width(self) -> int:
        return max((len(b) - 1 for b in self.bags.values()), default=0)

    def interior(self) -> FrozenSet[int]:
        return self.vertices - frozenset(self.face)


@dataclass(frozen=True)
class NearlyEmbeddableInstance:
    g: Digraph
    planar_vertices: Tuple[int, ...]
    rotation: Dict[int, Tuple[int, ...]]   # cyclic neighbor order, planar piece
    vortices: Tuple[Vortex, ...]
    apices: Tuple[int, ...]
    genus: int = 0                         # bookkeeping only

    # -- parameters ------------------------------------------------------

    @property
    def a(self) -> int:
        return len(self.apices)

    @property
    def k(self) -> int:
        return len(self.vortices)

    @property
    def p(self) -> int:
        return max((vx.width() for vx in self.vortices), default=0)

    def params(self) -> Tuple[int, int, int, int]:
        return (self.a, self.genus, self.k, self.p)

    @property
    def vortex(self) -> Vortex:
        if len(self.vortices) != 1:
            raise ValueError(f"instance has k={len(self.vortices)} vortices, need 1")
        return self.vortices[0]

    def planar_edges(self) -> Set[Tuple[int, int]]:
        """Undirected embedding edges, from the rotation system."""
        out = set()
        for v, nbrs in self.rotation.items():
            for u in nbrs:
                out.add(edge_of(u, v))
        return out


# ---------------------------------------------------------------------------
# face tracing


def trace_faces(rotation: Dict[int, Tuple[int, ...]]) -> List[Tuple[int, ...]]:
    """All faces of the rotation system, as directed boundary cycles.

    Uses next(u,v) = (v, successor of u in rotation around v); each directed
    edge lies on exactly one traced face.
    """
    succ: Dict[Tuple[int, int], int] = {}
    for v, nbrs in rotation.items():
        d = len(nbrs)
        for i, u in enumerate(nbrs):
            succ[(v, u)] = nbrs[(i + 1) % d]
    faces = []
    seen: Set[Tuple[int, int]] = set()
    for (v, u) in sorted(succ):
        if (v, u) in seen:
            continue
        cycle = []
        edge = (v, u)
        while edge not in seen:
            seen.add(edge)
            cycle.append(edge[0])
            edge = (edge[1], succ[(edge[1], edge[0])])
        faces.append(tuple(cycle))
    return faces


def _same_cycle(a: Sequence[int], b: Sequence[int]) -> bool:
    """Equal as cyclic sequences (either orientation)."""
    if len(a) != len(b):
        return False
    da = tuple(a)
    for cand in (tuple(b), tuple(reversed(b))):
        for i in range(len(cand)):
            if cand[i:] + cand[:i] == da:
                return True
    return False


# ---------------------------------------------------------------------------
# validation


def validate(inst: NearlyEmbeddableInstance) -> List[str]:
    """Structural report: every violated invariant as one line; empty = valid."""
    rep: List[str] = []
    g = inst.g
    vset = set(g.vertices)
    planar = set(inst.planar_vertices)
    apices = set(inst.apices)

    if not planar <= vset:
        rep.append("planar vertices not in graph")
    if not apices <= vset:
        rep.append("apices not in graph")
    if apices & planar:
        rep.append("apices overlap the planar piece")

    # rotation system symmetric, covers exactly the planar piece
    if set(inst.rotation) != planar:
        rep.append("rotation system does not cover exactly the planar vertices")
    for v, nbrs in inst.rotation.items():
        if len(set(nbrs)) != len(nbrs):
            rep.append(f"rotation at {v} repeats a neighbor")
        for u in nbrs:
            if u not in inst.rotation or v not in inst.rotation.get(u, ()):
                rep.append(f"rotation not symmetric on edge {{{u},{v}}}")

    faces = trace_faces(inst.rotation) if not rep else []

    vortex_interiors: Set[int] = set()
    for vi, vx in enumerate(inst.vortices):
        tag = f"vortex {vi}"
        fset = set(vx.face)
        if len(fset) != len(vx.face):
            rep.append(f"{tag}: face repeats a vertex")
        if not fset <= planar:
            rep.append(f"{tag}: face not inside the planar piece")
        # with positive genus the vortex face may use handles, which the
        # planar rotation system cannot trace
        if faces and inst.genus == 0 and not any(_same_cycle(vx.face, f) for f in faces):
            rep.append(f"{tag}: face is not a face of the rotation system")
        if not fset <= vx.vertices:
            rep.append(f"{tag}: face vertices missing from the vortex")
        interior = vx.vertices - fset
        vortex_interiors |= interior
        if interior & planar:
            rep.append(f"{tag}: vortex interior overlaps the planar piece")
        if interior & apices:
            rep.append(f"{tag}: apices overlap the vortex interior")
        # bags: one per face vertex, contiguity, coverage, width
        if set(vx.bags) != fset:
            rep.append(f"{tag}: bags are not exactly one per face vertex")
        else:
            order = list(vx.face)
            positions: Dict[int, List[int]] = {}
            for i, fv in enumerate(order):
                if fv not in vx.bags[fv]:
                    rep.append(f"{tag}: face vertex {fv} missing from own bag")
                for z in vx.bags[fv]:
                    positions.setdefault(z, []).append(i)
            for z in vx.vertices:
                if z not in positions:
                    rep.append(f"{tag}: vortex vertex {z} in no bag")
            m = len(order)
            for z, pos in positions.items():
                if z not in vx.vertices:
                    rep.append(f"{tag}: bag member {z} not a vortex vertex")
                    continue
                # contiguous as a cyclic interval of face positions
                if not _contiguous_cyclic(sorted(set(pos)), m):
                    rep.append(f"{tag}: vertex {z} bag interval not contiguous")
            for (u, v) in vx.arcs:
                if (u, v) not in g.arcs:
                    rep.append(f"{tag}: vortex arc ({u},{v}) not in graph")
                if not any(u in b and v in b for b in vx.bags.values()):
                    rep.append(f"{tag}: arc ({u},{v}) not covered by any bag")

    # every arc of g must be classifiable
    planar_e = inst.planar_edges() if not rep else set()
    vortex_arcs = set().union(*[vx.arcs for vx in inst.vortices]) if inst.vortices else set()
    if planar_e:
        for (u, v) in g.arcs:
            if (u, v) in vortex_arcs:
                continue
            if u in apices or v in apices:
                continue
            if edge_of(u, v) in planar_e:
                continue
            rep.append(f"arc ({u},{v}) is neither embedded, vortex, nor apex")

    return rep


def _contiguous_cyclic(ps: List[int], m: int) -> bool:
    """Is the position set a contiguous interval on the cycle Z_m?"""
    if len(ps) == m:
        return True
    gaps = [(ps[(i + 1) % len(ps)] - ps[i]) % m for i in range(len(ps))]
    return sum(1 for gx in gaps if gx != 1) <= 1


# ---------------------------------------------------------------------------
# instance file format


def write_instance(inst: NearlyEmbeddableInstance) -> str:
    g = inst.g
    lines = [f"digraph {g.n} {sum(g.mult.values())}"]
    for v in g.vertices:
        lines.append(f"v {v}")
    for (u, v) in sorted(g.arcs):
        for _ in range(g.mult[(u, v)]):
            lines.append(f"a {u} {v} {format_fraction(g.arcs[(u, v)])}")
    lines.append("rotation")
    for v in sorted(inst.rotation):
        lines.append("r " + " ".join(str(x) for x in (v,) + tuple(inst.rotation[v])))
    for vx in inst.vortices:
        lines.append("face " + " ".join(str(x) for x in vx.face))
        lines.append("vortex " + " ".join(str(x) for x in sorted(vx.vertices)))
        for (u, v) in sorted(vx.arcs):
            lines.append(f"va {u} {v}")
        lines.append("bags")
        for fv in vx.face:
            members = " ".join(str(x) for x in sorted(vx.bags[fv]))
            lines.append(f"bag {fv} {members}")
    lines.append("apices" + ("" if not inst.apices else " " + " ".join(str(x) for x in inst.apices)))
    a, gen, k, p = inst.params()
    lines.append(f"params {a} {gen} {k} {p}")
    return "\n".join(lines) + "\n"


def parse_instance(text: str) -> NearlyEmbeddableInstance:
    lines = [s.strip() for s in text.splitlines() if s.strip() and not s.strip().startswith("#")]
    i = 0
    if not lines[i].startswith("digraph"):
        raise ValueError("missing digraph header")
    _, n_s, m_s = lines[i].split()
    i += 1
    vertices: List[int] = []
    arcs: Dict[Arc, Fraction] = {}
    mult: Dict[Arc, int] = {}
    while i < len(lines) and lines[i].split()[0] in ("v", "a"):
        parts = lines[i].split()
        if parts[0] == "v":
            vertices.append(int(parts[1]))
        else:
            u, v = int(parts[1]), int(parts[2])
            c = parse_fraction(parts[3])
            if (u, v) in arcs:
                mult[(u, v)] = mult.get((u, v), 1) + 1
            else:
                arcs[(u, v)] = c
        i += 1
    g = Digraph(vertices, arcs, mult)
    rotation: Dict[int, Tuple[int, ...]] = {}
    if i < len(lines) and lines[i] == "rotation":
        i += 1
        while i < len(lines) and lines[i].startswith("r "):
            parts = [int(x) for x in lines[i].split()[1:]]
            rotation[parts[0]] = tuple(parts[1:])
            i += 1
    vortices: List[Vortex] = []
    while i < len(lines) and lines[i].startswith("face"):
        face = tuple(int(x) for x in lines[i].split()[1:])
        i += 1
        vverts = frozenset(int(x) for x in lines[i].split()[1:])
        i += 1
        varcs: Set[Arc] = set()
        while i < len(lines) and lines[i].startswith("va "):
            parts = lines[i].split()
            varcs.add((int(parts[1]), int(parts[2])))
            i += 1
        bags: Dict[int, FrozenSet[int]] = {}
        if i < len(lines) and lines[i] == "bags":
            i += 1
            while i < len(lines) and lines[i].startswith("bag "):
                parts = [int(x) for x in lines[i].split()[1:]]
                bags[parts[0]] = frozenset(parts[1:])
                i += 1
        vortices.append(Vortex(face, vverts, frozenset(varcs), bags))
    apices: Tuple[int, ...] = ()
    if i < len(lines) and lines[i].startswith("apices"):
        apices = tuple(int(x) for x in lines[i].split()[1:])
        i += 1
    genus = 0
    if i < len(lines) and lines[i].startswith("params"):
        _, a_s, g_s, k_s, p_s = lines[i].split()
        genus = int(g_s)
        i += 1
    planar = tuple(sorted(rotation))
    return NearlyEmbeddableInstance(g, planar, rotation, tuple(vortices), apices, genus)
