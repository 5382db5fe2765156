"""Held-Karp LP: cutting-plane solution, symmetrization, thinness measures.

The LP is  min sum c(a) x(a)  s.t.  x(delta+(v)) = x(delta-(v)) per vertex,
x(delta+(U)) >= 1 for every proper nonempty U, x >= 0.  Cut constraints are
added lazily via a min-cut separation oracle; pivoting is exact-rational.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, FrozenSet, List, Optional, Set, Tuple

from . import simplex
from .graphs import (Arc, CutSide, Digraph, Edge, INF, Ugraph, Walk, edge_of,
                     is_finite, iter_cut_sides, symmetrize)

ZERO = Fraction(0)
ONE = Fraction(1)

EXHAUSTIVE_CUT_LIMIT = 16  # n <= 16 -> all 2^n - 2 cuts are scanned


@dataclass
class LpPoint:
    """A feasible (usually optimal) Held-Karp point."""

    g: Digraph
    x: Dict[Arc, Fraction]
    objective: Fraction
    optimal: bool = True
    cuts: List[FrozenSet[int]] = field(default_factory=list)

    def value(self, a: Arc) -> Fraction:
        return self.x.get(a, ZERO)

    def cut_value_out(self, members: FrozenSet[int]) -> Fraction:
        return sum((v for a, v in self.x.items()
                    if a[0] in members and a[1] not in members), ZERO)


def symz(x: Dict[Arc, Fraction]) -> Dict[Edge, Fraction]:
    """Symmetrization z({u,v}) = x((u,v)) + x((v,u))."""
    z: Dict[Edge, Fraction] = {}
    for (u, v), val in x.items():
        e = edge_of(u, v)
        z[e] = z.get(e, ZERO) + val
    return z


def z_cut(z: Dict[Edge, Fraction], members) -> Fraction:
    return sum((val for (u, v), val in z.items()
                if (u in members) != (v in members)), ZERO)


# ---------------------------------------------------------------------------
# separation


def _min_cut(g: Digraph, cap: Dict[Arc, Fraction], s: int, t: int
             ) -> Tuple[Fraction, FrozenSet[int]]:
    """Max-flow / min-cut with rational capacities (BFS augmenting paths).
    Returns (cut value, source side U with s in U, t not in U)."""
    residual: Dict[Arc, Fraction] = {}
    adj: Dict[int, Set[int]] = {v: set() for v in g.vertices}
    for (u, v), c in cap.items():
        if c > 0:
            residual[(u, v)] = residual.get((u, v), ZERO) + c
            residual.setdefault((v, u), ZERO)
            adj[u].add(v)
            adj[v].add(u)
    flow = ZERO
    while True:
        # BFS for an augmenting path
        prev: Dict[int, int] = {s: s}
        q = deque([s])
        while q and t not in prev:
            u = q.popleft()
            for v in sorted(adj[u]):
                if v not in prev and residual.get((u, v), ZERO) > 0:
                    prev[v] = u
                    q.append(v)
        if t not in prev:
            side = frozenset(prev)
            return flow, side
        # bottleneck
        path = []
        v = t
        while v != s:
            path.append((prev[v], v))
            v = prev[v]
        aug = min(residual[a] for a in path)
        for (u, v) in path:
            residual[(u, v)] -= aug
            residual[(v, u)] = residual.get((v, u), ZERO) + aug
        flow += aug


def separate_all(g: Digraph, x: Dict[Arc, Fraction]) -> List[FrozenSet[int]]:
    """All violated cut sides found by the min-cut sweep (deduplicated).

    Min s-t cuts from the lowest-id root r to every other vertex and back
    cover all violated cuts: any U with x(delta+(U)) < 1 separates r from
    some v in one of the two directions.
    """
    if g.n < 2:
        return []
    r = g.vertices[0]
    found: List[FrozenSet[int]] = []
    seen: Set[FrozenSet[int]] = set()
    for v in g.vertices:
        if v == r:
            continue
        val, side = _min_cut(g, x, r, v)
        if val < 1 and side not in seen:
            seen.add(side)
            found.append(side)
        val, side = _min_cut(g, x, v, r)
        if val < 1 and side not in seen:
            seen.add(side)
            found.append(side)
    return found


def separate(g: Digraph, x: Dict[Arc, Fraction]) -> Optional[FrozenSet[int]]:
    """Some U with x(delta+(U)) < 1, or None if x satisfies all cuts."""
    found = separate_all(g, x)
    return found[0] if found else None


def verify_cuts_exhaustive(g: Digraph, x: Dict[Arc, Fraction]) -> List[FrozenSet[int]]:
    """All violated cut sides by scanning all 2^n - 2 subsets (guarded)."""
    if g.n > EXHAUSTIVE_CUT_LIMIT:
        raise ValueError(f"exhaustive cut scan guarded at n <= {EXHAUSTIVE_CUT_LIMIT}")
    bad = []
    for side in iter_cut_sides(g.vertices):
        val = sum((v for a, v in x.items()
                   if a[0] in side and a[1] not in side), ZERO)
        if val < 1:
            bad.append(side)
    return bad


# ---------------------------------------------------------------------------
# LP solve


def solve_lp(g: Digraph, cuts_log: Optional[List[FrozenSet[int]]] = None) -> LpPoint:
    """Optimal Held-Karp point by cutting planes.

    Starts from the conservation (degree) constraints only, then repeatedly
    adds the separation oracle's violated cut until none exists.
    """
    if g.n < 2:
        raise ValueError("need at least 2 vertices")
    if not g.strongly_connected():
        raise simplex.Infeasible("graph not strongly connected")
    arcs = sorted(g.arcs)
    idx = {a: j for j, a in enumerate(arcs)}
    c = [g.arcs[a] for a in arcs]
    A_eq: List[List[Fraction]] = []
    for v in g.vertices:
        row = [ZERO] * len(arcs)
        for a in arcs:
            if a[0] == v:
                row[idx[a]] += 1
            if a[1] == v:
                row[idx[a]] -= 1
        A_eq.append(row)
    b_eq = [ZERO] * len(A_eq)
    cut_rows: List[List[Fraction]] = []
    cut_sides: List[FrozenSet[int]] = []

    def add_cut(side: FrozenSet[int]):
        cut_sides.append(side)
        row = [ZERO] * len(arcs)
        for a in arcs:
            if a[0] in side and a[1] not in side:
                row[idx[a]] = ONE
        cut_rows.append(row)
        if cuts_log is not None:
            cuts_log.append(side)

    # singleton cuts are always required; seeding them saves solver rounds
    for v in g.vertices:
        add_cut(frozenset([v]))
        add_cut(frozenset(g.vertices) - {v})

    while True:
        x_vec, obj = simplex.solve_min(c, A_eq, b_eq, cut_rows, [ONE] * len(cut_rows))
        x = {a: x_vec[idx[a]] for a in arcs if x_vec[idx[a]] != 0}
        fresh = [s for s in separate_all(g, x) if s not in cut_sides]
        if not fresh:
            return LpPoint(g, x, obj, optimal=True, cuts=list(cut_sides))
        for side in fresh:
            add_cut(side)


def augment(pt: LpPoint, w: Walk) -> LpPoint:
    """W-augmentation: x'(a) = x(a) + 1 on every arc of the closed walk W.

    The walk must traverse actual arcs of the graph (expand metric hops
    first); adding a closed walk adds a circulation, so feasibility and all
    cut constraints are preserved.
    """
    g = pt.g
    x = dict(pt.x)
    add = ZERO
    for (u, v) in w.hops():
        if u == v:
            continue
        if (u, v) not in g.arcs:
            raise ValueError(f"walk hop ({u},{v}) is not an arc of the graph")
        x[(u, v)] = x.get((u, v), ZERO) + 1
        add += g.arcs[(u, v)]
    return LpPoint(g, x, pt.objective + add, optimal=False, cuts=list(pt.cuts))


# ---------------------------------------------------------------------------
# thinness / thickness / density


@dataclass
class ThinnessReport:
    alpha_star: object            # Fraction or INF
    witness: Optional[FrozenSet[int]]
    exhaustive: bool
    cost_ratio: Optional[Fraction] = None  # s* for (alpha,s)-thinness


def measure_thinness(vertices, z: Dict[Edge, Fraction], s_edges,
                     sample_cuts: Optional[List[FrozenSet[int]]] = None
                     ) -> ThinnessReport:
    """alpha* = max over cuts U of |E(s) cross U| / z(delta(U)).

    Exhaustive for n <= 16; larger instances must supply sample_cuts and the
    report is labeled non-exhaustive (a lower bound only).
    """
    vs = sorted(vertices)
    s_set = {edge_of(u, v) for (u, v) in s_edges}
    if len(vs) <= EXHAUSTIVE_CUT_LIMIT:
        cuts = iter_cut_sides(vs)
        exhaustive = True
    else:
        if sample_cuts is None:
            raise ValueError("n > 16 requires explicit sample cuts (sampled mode)")
        cuts = iter(sample_cuts)
        exhaustive = False
    alpha: object = ZERO
    witness = None
    for side in cuts:
        crossing = sum(1 for (u, v) in s_set if (u in side) != (v in side))
        if crossing == 0:
            continue
        zval = z_cut(z, side)
        if zval == 0:
            return ThinnessReport(INF, side, exhaustive)
        ratio = Fraction(crossing) / zval
        if alpha is ZERO or ratio > alpha:
            alpha = ratio
            witness = side
    return ThinnessReport(alpha, witness, exhaustive)


def cost_thinness(g: Digraph, s_edges, x: Dict[Arc, Fraction]) -> Fraction:
    """s* with c(E(S)) = s* . sum c(a) x(a)   ((alpha,s)-thin cost side)."""
    ug = symmetrize(g)
    total = sum((g.arcs[a] * v for a, v in x.items()), ZERO)
    cs = sum((ug.edges[edge_of(u, v)] for (u, v) in s_edges), ZERO)
    if total == 0:
        return ZERO if cs == 0 else INF
    return cs / total


def predicates(vertices, z: Dict[Edge, Fraction], w: Optional[Walk],
               eps: Fraction) -> Dict[str, bool]:
    """is_dense: z >= 1 on every hop-edge of W.  is_thick: every cut's
    z-weight >= eps (exhaustive at desk scale)."""
    is_dense = True
    if w is not None:
        for (u, v) in w.hops():
            if u == v:
                continue
            if z.get(edge_of(u, v), ZERO) < 1:
                is_dense = False
                break
    vs = sorted(vertices)
    if len(vs) > EXHAUSTIVE_CUT_LIMIT:
        raise ValueError("thickness check guarded at n <= 16")
    is_thick = all(z_cut(z, side) >= eps for side in iter_cut_sides(vs))
    return {"is_dense": is_dense, "is_thick": is_thick}
