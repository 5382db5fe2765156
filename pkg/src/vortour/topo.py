"""Instance transforms: facial/cross normalization and vortex merging.

Facial normalization replaces every face vertex that has several non-face
edges by a chain of copies linked with zero-cost two-way arcs, one copy per
outside neighbor, so that afterwards each face vertex touches at most one
non-face edge.  Cross normalization caps the degree of planar vertices off
the face at 4 via zero-cost trees (optionally expanding them into zero-cost
grids).  Vortex merging concatenates several vortices into one of roughly
double width, adding shortest-path linking arcs and counting one extra unit
of genus per merged pair.

Every transform is pure and returns a fresh instance; the normalizations
also return a certificate that pulls any walk back to the original graph at
exactly equal cost.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Set, Tuple

from .graphs import Arc, Digraph, MetricClosure, Walk
from .instances import (NearlyEmbeddableInstance, Vortex, _same_cycle,
                        trace_faces)

ZERO = Fraction(0)


@dataclass
class NormalizationCertificate:
    """Maps between an instance and its normalized form.

    `expanded` sends an original vertex to the tuple of vertices replacing
    it (itself if untouched); `origin` sends every new vertex back.  Pulling
    a walk back substitutes origins and collapses the resulting stutters;
    replacement arcs carry either the original cost or zero, so the cost is
    preserved exactly.
    """

    expanded: Dict[int, Tuple[int, ...]] = field(default_factory=dict)
    origin: Dict[int, int] = field(default_factory=dict)

    def pull_back(self, w: Walk) -> Walk:
        seq = [self.origin.get(v, v) for v in w.seq]
        out: List[int] = []
        for v in seq:
            if not out or out[-1] != v:
                out.append(v)
        if w.closed and len(out) > 1 and out[0] == out[-1]:
            out.pop()
        return Walk(tuple(out), w.closed)

    def compose(self, later: "NormalizationCertificate") -> "NormalizationCertificate":
        """Certificate of applying self first, then `later`."""
        origin = dict(self.origin)
        for v, o in later.origin.items():
            origin[v] = self.origin.get(o, o)
        expanded: Dict[int, Tuple[int, ...]] = {}
        for v, mids in self.expanded.items():
            out: List[int] = []
            for m in mids:
                out.extend(later.expanded.get(m, (m,)))
            expanded[v] = tuple(out)
        return NormalizationCertificate(expanded, origin)


def _identity_certificate(g: Digraph) -> NormalizationCertificate:
    return NormalizationCertificate({v: (v,) for v in g.vertices},
                                    {v: v for v in g.vertices})


def _traced_face(inst: NearlyEmbeddableInstance) -> Tuple[int, ...]:
    """The designated face as actually traced by the rotation system, so
    that consecutive (a, v, b) means succ_v(a) = b."""
    want = inst.vortex.face
    for f in trace_faces(inst.rotation):
        if _same_cycle(want, f):
            return f
    raise ValueError("designated face is not a face of the rotation system")


# ---------------------------------------------------------------------------
# facial normalization


def facially_normalize(inst: NearlyEmbeddableInstance
                       ) -> Tuple[NearlyEmbeddableInstance, NormalizationCertificate]:
    """Split every face vertex with several outside edges into a chain.

    The chain replaces the vertex on the face; each copy inherits exactly
    one outside neighbor, consecutive copies are joined by zero-cost
    two-way arcs, and the vortex bag of the old vertex is carried over to
    every copy.  Apex arcs are re-attached to all copies.  The certificate
    collapses each chain back to the original vertex.
    """
    if inst.k != 1:
        raise ValueError(f"facial normalization needs k=1, got k={inst.k}")
    if len(set(inst.vortex.face)) != len(inst.vortex.face):
        # the split of a repeated-vertex face into duplicated paths is not
        # needed for instances produced here, whose faces are simple cycles
        raise NotImplementedError("face is not a simple cycle")

    cert = _identity_certificate(inst.g)
    cur = inst
    # process face vertices of the *original* face one at a time; chains
    # introduced along the way are already normalized and never revisited
    for v in list(inst.vortex.face):
        cur2, cert2 = _split_face_vertex(cur, v)
        if cert2 is not None:
            cur = cur2
            cert = cert.compose(cert2)
    return cur, cert


def _outside_neighbors(inst: NearlyEmbeddableInstance, v: int) -> List[int]:
    """Neighbors of a face vertex via non-face, non-apex edges."""
    face = inst.vortex.face
    m = len(face)
    i = face.index(v)
    on_face = {face[(i - 1) % m], face[(i + 1) % m]}
    apices = set(inst.apices)
    nbrs = set()
    for (x, y) in inst.g.arcs:
        if x == v and y not in on_face and y not in apices:
            nbrs.add(y)
        if y == v and x not in on_face and x not in apices:
            nbrs.add(x)
    return sorted(nbrs)


def _split_face_vertex(inst: NearlyEmbeddableInstance, v: int
                       ) -> Tuple[NearlyEmbeddableInstance,
                                  Optional[NormalizationCertificate]]:
    outside = _outside_neighbors(inst, v)
    if len(outside) <= 1:
        return inst, None
    g = inst.g
    vx = inst.vortex
    traced = _traced_face(inst)
    m = len(traced)
    i = traced.index(v)
    a, b = traced[(i - 1) % m], traced[(i + 1) % m]

    # order the outside neighbors to match the embedding: starting the
    # rotation at a it reads (a, b, q1..qr) with the q's running from the b
    # side back to the a side, while the chain runs a -> b
    rot_v = list(inst.rotation[v])
    i0 = rot_v.index(a)
    rot_v = rot_v[i0:] + rot_v[:i0]
    assert rot_v[1] == b, "face trace out of step with the rotation"
    planar_out = rot_v[2:]
    rest = [u for u in outside if u not in planar_out]
    ordered = rest + list(reversed(planar_out))

    base = max(g.vertices) + 1
    chain = [base + j for j in range(len(ordered))]
    attach = dict(zip(chain, ordered))

    arcs: Dict[Arc, Fraction] = {}
    for (x, y), c in g.arcs.items():
        if v not in (x, y):
            arcs[(x, y)] = c
    apices = set(inst.apices)
    vortex_arcs = set(vx.arcs) - {ar for ar in vx.arcs if v in ar}
    new_vortex_arcs: Set[Arc] = set()
    for cv in chain:
        u = attach[cv]
        if (v, u) in g.arcs:
            arcs[(cv, u)] = g.arcs[(v, u)]
            if (v, u) in vx.arcs:
                new_vortex_arcs.add((cv, u))
        if (u, v) in g.arcs:
            arcs[(u, cv)] = g.arcs[(u, v)]
            if (u, v) in vx.arcs:
                new_vortex_arcs.add((u, cv))
    for j in range(len(chain) - 1):
        arcs[(chain[j], chain[j + 1])] = ZERO
        arcs[(chain[j + 1], chain[j])] = ZERO
    # face edges to the old neighbors move to the chain ends
    for (x, y) in ((a, v), (v, a)):
        if (x, y) in g.arcs:
            arcs[(chain[0], y) if x == v else (x, chain[0])] = g.arcs[(x, y)]
    for (x, y) in ((b, v), (v, b)):
        if (x, y) in g.arcs:
            arcs[(chain[-1], y) if x == v else (x, chain[-1])] = g.arcs[(x, y)]
    # apices reach every copy at the original cost
    for al in apices:
        if (al, v) in g.arcs:
            for cv in chain:
                arcs[(al, cv)] = g.arcs[(al, v)]
        if (v, al) in g.arcs:
            for cv in chain:
                arcs[(cv, al)] = g.arcs[(v, al)]

    # rotations: the chain is a path along the face, each link keeping the
    # face trace on the same side (arriving from the previous link, the
    # successor is the next link)
    rotation = {}
    for w, nbrs in inst.rotation.items():
        if w == v:
            continue
        if w == a:
            repl = chain[0]
        elif w == b:
            repl = chain[-1]
        elif w in planar_out:
            repl = _chain_of(attach, chain, w)
        else:
            repl = v  # v not a neighbor of w; nothing to replace
        rotation[w] = tuple(x if x != v else repl for x in nbrs)
    for j, cv in enumerate(chain):
        left = a if j == 0 else chain[j - 1]
        right = b if j == len(chain) - 1 else chain[j + 1]
        if attach[cv] in planar_out:
            rotation[cv] = (left, right, attach[cv])
        else:
            rotation[cv] = (left, right)

    # the stored face may run opposite to the traced orientation; insert the
    # chain so that it still reads a -> chain -> b in traced order
    iv = vx.face.index(v)
    ins = chain if vx.face[iv - 1] == a else list(reversed(chain))
    face = tuple(x for fv in vx.face
                 for x in (ins if fv == v else [fv]))
    carried = vx.bags[v] - {v}
    interior = vx.vertices - set(vx.face)
    bags = {fv: bag for fv, bag in vx.bags.items() if fv != v}
    for cv in chain:
        extra = {attach[cv]} if attach[cv] in interior else set()
        bags[cv] = frozenset({cv} | carried | extra)
    vertices = [w for w in g.vertices if w != v] + chain
    g2 = Digraph(vertices, arcs)
    vx2 = Vortex(face, (vx.vertices - {v}) | set(chain),
                 frozenset(vortex_arcs | new_vortex_arcs), bags)
    inst2 = NearlyEmbeddableInstance(g2, tuple(sorted(rotation)), rotation,
                                     (vx2,), inst.apices, inst.genus)
    cert = _identity_certificate(g)
    del cert.expanded[v]
    cert.expanded[v] = tuple(chain)
    del cert.origin[v]
    for cv in chain:
        cert.origin[cv] = v
    return inst2, cert


def _chain_of(attach: Dict[int, int], chain: List[int], u: int) -> int:
    for cv in chain:
        if attach[cv] == u:
            return cv
    raise KeyError(u)


def is_facially_normalized(inst: NearlyEmbeddableInstance) -> bool:
    face = inst.vortex.face
    if len(set(face)) != len(face):
        return False
    return all(len(_outside_neighbors(inst, v)) <= 1 for v in face)


# ---------------------------------------------------------------------------
# cross normalization


def cross_normalize(inst: NearlyEmbeddableInstance, expand_grids: bool = False
                    ) -> Tuple[NearlyEmbeddableInstance, NormalizationCertificate]:
    """Cap planar off-face degrees at 4 with zero-cost replacement trees.

    Each planar vertex off the face with degree above 4 becomes a caterpillar
    tree whose leaves take over its edges one each; spine and leaf edges cost
    zero both ways.  With `expand_grids`, every off-face planar vertex is
    instead replaced by a zero-cost grid of side 3n^2 whose boundary takes
    over the edges (the edge-once traversal construction); the grid variant
    trades a Theta(n^4) size blowup for that guarantee and is off by default.
    """
    cert = _identity_certificate(inst.g)
    cur = inst
    face_set = set(inst.vortex.face)
    targets = [v for v in inst.planar_vertices if v not in face_set]
    for v in targets:
        if expand_grids:
            cur2, c2 = _expand_grid(cur, v)
        else:
            if len(cur.rotation[v]) <= 4:
                continue
            cur2, c2 = _expand_tree(cur, v)
        cur = cur2
        cert = cert.compose(c2)
    return cur, cert


def _replace_planar_vertex(inst: NearlyEmbeddableInstance, v: int,
                           verts: List[int],
                           tree_arcs: List[Tuple[int, int]],
                           port: Dict[int, int],
                           rotation_patch: Dict[int, Tuple[int, ...]]
                           ) -> Tuple[NearlyEmbeddableInstance,
                                      NormalizationCertificate]:
    """Swap planar vertex v for a zero-cost structure.

    `port[u]` is the structure vertex taking over the edge {v,u}; apex arcs
    re-attach to every structure vertex.
    """
    g = inst.g
    arcs = {a: c for a, c in g.arcs.items() if v not in a}
    for (x, y) in tree_arcs:
        arcs[(x, y)] = ZERO
        arcs[(y, x)] = ZERO
    for u, pv in port.items():
        if (v, u) in g.arcs:
            arcs[(pv, u)] = g.arcs[(v, u)]
        if (u, v) in g.arcs:
            arcs[(u, pv)] = g.arcs[(u, v)]
    for al in inst.apices:
        if (al, v) in g.arcs:
            for w in verts:
                arcs[(al, w)] = g.arcs[(al, v)]
        if (v, al) in g.arcs:
            for w in verts:
                arcs[(w, al)] = g.arcs[(v, al)]
    rotation = {w: tuple(x if x != v else port[w] for x in nbrs)
                for w, nbrs in inst.rotation.items() if w != v}
    rotation.update(rotation_patch)
    g2 = Digraph([w for w in g.vertices if w != v] + verts, arcs)
    inst2 = NearlyEmbeddableInstance(g2, tuple(sorted(rotation)), rotation,
                                     inst.vortices, inst.apices, inst.genus)
    cert = _identity_certificate(g)
    del cert.expanded[v]
    del cert.origin[v]
    cert.expanded[v] = tuple(verts)
    for w in verts:
        cert.origin[w] = v
    return inst2, cert


def _expand_tree(inst: NearlyEmbeddableInstance, v: int
                 ) -> Tuple[NearlyEmbeddableInstance, NormalizationCertificate]:
    nbrs = list(inst.rotation[v])
    d = len(nbrs)
    base = max(inst.g.vertices) + 1
    leaves = [base + j for j in range(d)]
    n_spine = (d + 1) // 2
    spine = [base + d + j for j in range(n_spine)]
    port = {u: leaves[j] for j, u in enumerate(nbrs)}
    tree_arcs = [(spine[j], spine[j + 1]) for j in range(n_spine - 1)]
    rotation_patch: Dict[int, Tuple[int, ...]] = {}
    for j, s in enumerate(spine):
        mine = leaves[2 * j: 2 * j + 2]
        for lf in mine:
            tree_arcs.append((s, lf))
        rot: List[int] = []
        if j > 0:
            rot.append(spine[j - 1])
        rot.extend(mine)
        if j + 1 < n_spine:
            rot.append(spine[j + 1])
        rotation_patch[s] = tuple(rot)
    for j, lf in enumerate(leaves):
        rotation_patch[lf] = (spine[j // 2], nbrs[j])
    return _replace_planar_vertex(inst, v, leaves + spine, tree_arcs, port,
                                  rotation_patch)


def _expand_grid(inst: NearlyEmbeddableInstance, v: int
                 ) -> Tuple[NearlyEmbeddableInstance, NormalizationCertificate]:
    """Replace v by a zero-cost grid of side 3n^2, edges ported to the
    boundary so that their cyclic order is preserved."""
    n = inst.g.n
    side = 3 * n * n
    nbrs = list(inst.rotation[v])
    base = max(inst.g.vertices) + 1
    vid = {}
    verts = []
    for r in range(side):
        for c in range(side):
            w = base + r * side + c
            vid[(r, c)] = w
            verts.append(w)
    tree_arcs = []
    for r in range(side):
        for c in range(side):
            if r + 1 < side:
                tree_arcs.append((vid[(r, c)], vid[(r + 1, c)]))
            if c + 1 < side:
                tree_arcs.append((vid[(r, c)], vid[(r, c + 1)]))
    # boundary clockwise from the lower-left corner
    boundary = [vid[(r, 0)] for r in range(side)]
    boundary += [vid[(side - 1, c)] for c in range(1, side)]
    boundary += [vid[(r, side - 1)] for r in range(side - 2, -1, -1)]
    boundary += [vid[(0, c)] for c in range(side - 2, 0, -1)]
    step = max(1, len(boundary) // max(1, len(nbrs)))
    port = {u: boundary[j * step] for j, u in enumerate(nbrs)}
    rotation_patch: Dict[int, Tuple[int, ...]] = {}
    for r in range(side):
        for c in range(side):
            rot = []
            for (dr, dc) in ((-1, 0), (0, 1), (1, 0), (0, -1)):
                if (r + dr, c + dc) in vid:
                    rot.append(vid[(r + dr, c + dc)])
            w = vid[(r, c)]
            for u, pv in port.items():
                if pv == w:
                    rot.append(u)
            rotation_patch[w] = tuple(rot)
    return _replace_planar_vertex(inst, v, verts, tree_arcs, port,
                                  rotation_patch)


def is_cross_normalized(inst: NearlyEmbeddableInstance) -> bool:
    face_set = set(inst.vortex.face)
    return all(len(inst.rotation[v]) <= 4
               for v in inst.planar_vertices if v not in face_set)


# ---------------------------------------------------------------------------
# vortex merging


def merge_vortices(inst: NearlyEmbeddableInstance) -> NearlyEmbeddableInstance:
    """Concatenate all vortices into one, linking consecutive ones.

    Between vortex i and i+1, two-way linking arcs join the last two face
    vertices of i with the first two of i+1 at shortest-path cost, so every
    pairwise distance is preserved exactly.  The linked bags grow by at most
    two vertices (width <= 2p for p >= 2).  Each link would need a handle on
    the surface, so the genus record grows by k-1; downstream algorithms
    reject positive genus, this transform exists for the structural
    reduction k -> 1.
    """
    k = len(inst.vortices)
    if k < 2:
        raise ValueError(f"vortex merging needs k >= 2, got k={k}")
    mc = MetricClosure(inst.g)
    arcs = dict(inst.g.arcs)
    link_arcs: Set[Arc] = set()
    face: List[int] = []
    bags: Dict[int, Set[int]] = {}
    all_vertices: Set[int] = set()
    all_varcs: Set[Arc] = set()
    for vx in inst.vortices:
        if len(vx.face) < 3:
            raise ValueError("vortex face too short to pick two disjoint edges")
        face.extend(vx.face)
        for fv in vx.face:
            bags[fv] = set(vx.bags[fv])
        all_vertices |= vx.vertices
        all_varcs |= vx.arcs
    for i in range(k - 1):
        fa = inst.vortices[i].face
        fb = inst.vortices[i + 1].face
        z, z2 = fa[-2], fa[-1]          # last edge of vortex i
        w, w2 = fb[0], fb[1]            # first edge of vortex i+1
        for (x, y) in ((z, w), (w, z), (z2, w2), (w2, z2)):
            arcs[(x, y)] = mc.dist(x, y)
            link_arcs.add((x, y))
        # cover the links while keeping every bag interval contiguous
        bags[z2].add(z)
        bags[w].update((z, z2))
        bags[w2].add(z2)
    g2 = Digraph(inst.g.vertices, arcs)
    vx2 = Vortex(tuple(face), frozenset(all_vertices),
                 frozenset(all_varcs | link_arcs),
                 {fv: frozenset(b) for fv, b in bags.items()})
    return NearlyEmbeddableInstance(g2, inst.planar_vertices, inst.rotation,
                                    (vx2,), inst.apices,
                                    inst.genus + (k - 1))
