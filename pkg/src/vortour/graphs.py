"""Directed/undirected multigraph substrate: costs, distances, cuts, walks.

Everything downstream (LP, vortex DP, thin constructions, hardness chain)
builds on the types here.  Costs are exact rationals throughout; unreachable
pairs are represented by the INF sentinel, never by a large number.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence, Tuple


class _Infinity:
    """Sentinel for unreachable distances.  Compares greater than any Fraction."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __lt__(self, other):
        return False

    def __le__(self, other):
        return other is self

    def __gt__(self, other):
        return other is not self

    def __ge__(self, other):
        return True

    def __add__(self, other):
        return self

    __radd__ = __add__

    def __mul__(self, other):
        return self

    __rmul__ = __mul__

    def __repr__(self):
        return "INF"


INF = _Infinity()


def is_finite(x) -> bool:
    return x is not INF


Arc = Tuple[int, int]
Edge = Tuple[int, int]  # undirected, stored as (min, max)


def edge_of(u: int, v: int) -> Edge:
    return (u, v) if u <= v else (v, u)


class Digraph:
    """Directed multigraph with nonnegative rational arc costs.

    ``arcs`` maps (u, v) -> cost; ``mult`` maps (u, v) -> multiplicity
    (defaults to 1, used by Eulerian utilities).  Instances are treated as
    immutable after construction.
    """

    def __init__(self, vertices: Iterable[int], arcs: Dict[Arc, Fraction],
                 mult: Optional[Dict[Arc, int]] = None):
        self.vertices: Tuple[int, ...] = tuple(sorted(set(vertices)))
        vset = set(self.vertices)
        self.arcs: Dict[Arc, Fraction] = {}
        for (u, v), c in arcs.items():
            if u not in vset or v not in vset:
                raise ValueError(f"arc ({u},{v}) has missing endpoint")
            c = Fraction(c)
            if c < 0:
                raise ValueError(f"arc ({u},{v}) has negative cost {c}")
            self.arcs[(u, v)] = c
        self.mult: Dict[Arc, int] = {a: 1 for a in self.arcs}
        if mult:
            for a, m in mult.items():
                if a not in self.arcs:
                    raise ValueError(f"multiplicity given for absent arc {a}")
                if m < 1:
                    raise ValueError("multiplicity must be >= 1")
                self.mult[a] = int(m)
        self._out: Dict[int, List[int]] = {v: [] for v in self.vertices}
        self._in: Dict[int, List[int]] = {v: [] for v in self.vertices}
        for (u, v) in sorted(self.arcs):
            self._out[u].append(v)
            self._in[v].append(u)

    # -- basic accessors -------------------------------------------------

    @property
    def n(self) -> int:
        return len(self.vertices)

    def out_neighbors(self, v: int) -> List[int]:
        return self._out[v]

    def in_neighbors(self, v: int) -> List[int]:
        return self._in[v]

    def cost(self, u: int, v: int) -> Fraction:
        return self.arcs[(u, v)]

    def has_arc(self, u: int, v: int) -> bool:
        return (u, v) in self.arcs

    def __repr__(self):
        return f"Digraph(n={self.n}, m={len(self.arcs)})"

    # -- derived structure ----------------------------------------------

    def strongly_connected(self) -> bool:
        if not self.vertices:
            return True
        for nbr in (self._out, self._in):
            seen = {self.vertices[0]}
            stack = [self.vertices[0]]
            while stack:
                u = stack.pop()
                for w in nbr[u]:
                    if w not in seen:
                        seen.add(w)
                        stack.append(w)
            if len(seen) != self.n:
                return False
        return True


class Ugraph:
    """Undirected shadow of a digraph: edge cost = min of the two arc costs."""

    def __init__(self, vertices: Iterable[int], edges: Dict[Edge, Fraction]):
        self.vertices: Tuple[int, ...] = tuple(sorted(set(vertices)))
        vset = set(self.vertices)
        self.edges: Dict[Edge, Fraction] = {}
        for (u, v), c in edges.items():
            if u not in vset or v not in vset:
                raise ValueError(f"edge {{{u},{v}}} has missing endpoint")
            self.edges[edge_of(u, v)] = Fraction(c)
        self._adj: Dict[int, List[int]] = {v: [] for v in self.vertices}
        for (u, v) in sorted(self.edges):
            self._adj[u].append(v)
            self._adj[v].append(u)

    @property
    def n(self) -> int:
        return len(self.vertices)

    def neighbors(self, v: int) -> List[int]:
        return self._adj[v]

    def __repr__(self):
        return f"Ugraph(n={self.n}, m={len(self.edges)})"


@dataclass(frozen=True)
class Walk:
    """A walk given by its vertex sequence.

    Consecutive vertices are joined by shortest paths of the ambient graph;
    the walk's cost is the sum of consecutive shortest-path distances.  A
    closed walk implicitly returns from the last vertex to the first.
    """

    seq: Tuple[int, ...]
    closed: bool = True

    def __post_init__(self):
        if not self.seq:
            raise ValueError("empty walk")

    def hops(self) -> List[Arc]:
        out = [(self.seq[i], self.seq[i + 1]) for i in range(len(self.seq) - 1)]
        if self.closed and len(self.seq) > 1:
            out.append((self.seq[-1], self.seq[0]))
        return out

    def vertices(self) -> frozenset:
        return frozenset(self.seq)


@dataclass(frozen=True)
class CutSide:
    """A proper nonempty vertex subset U, standing for the cut δ(U)."""

    members: frozenset

    @staticmethod
    def of(vertices: Iterable[int], ground: Iterable[int]) -> "CutSide":
        u = frozenset(vertices)
        g = frozenset(ground)
        if not u or not (u < g):
            raise ValueError("cut side must be a proper nonempty subset")
        return CutSide(u)


def iter_cut_sides(vertices: Sequence[int]):
    """All 2^n - 2 proper nonempty subsets, as frozensets (exhaustive mode)."""
    vs = list(vertices)
    for size in range(1, len(vs)):
        for combo in itertools.combinations(vs, size):
            yield frozenset(combo)


# ---------------------------------------------------------------------------
# operations


def symmetrize(g: Digraph) -> Ugraph:
    """Undirected shadow: edge {u,v} iff some arc exists; cost = min arc cost."""
    edges: Dict[Edge, Fraction] = {}
    for (u, v), c in g.arcs.items():
        e = edge_of(u, v)
        if e not in edges or c < edges[e]:
            edges[e] = c
    return Ugraph(g.vertices, edges)


class MetricClosure:
    """All-pairs shortest paths with lexicographic tie-breaking.

    Among all minimum-cost u->v paths the one with lexicographically smallest
    vertex-id sequence is selected, so every shortest path is unique and
    reconstructible.  Unreachable pairs have distance INF.
    """

    def __init__(self, g: Digraph):
        self.g = g
        self._dist: Dict[Arc, object] = {}
        self._path: Dict[Arc, Tuple[int, ...]] = {}
        for s in g.vertices:
            self._single_source(s)

    def _single_source(self, s: int):
        g = self.g
        # Dijkstra with (cost, path-sequence) keys; exact rationals, and the
        # path tuple itself is the lexicographic tie-breaker.
        import heapq

        best: Dict[int, Tuple[Fraction, Tuple[int, ...]]] = {s: (Fraction(0), (s,))}
        done = set()
        heap = [(Fraction(0), (s,))]
        while heap:
            cost, path = heapq.heappop(heap)
            v = path[-1]
            if v in done or best.get(v, (None, None))[1] != path:
                continue
            done.add(v)
            for w in g.out_neighbors(v):
                if w in done:
                    continue
                cand = (cost + g.cost(v, w), path + (w,))
                if w not in best or cand < best[w]:
                    best[w] = cand
                    heapq.heappush(heap, cand)
        for v in g.vertices:
            if v in best:
                self._dist[(s, v)] = best[v][0]
                self._path[(s, v)] = best[v][1]
            else:
                self._dist[(s, v)] = INF

    def dist(self, u: int, v: int):
        return self._dist[(u, v)]

    def path(self, u: int, v: int) -> Tuple[int, ...]:
        """Vertex sequence of the canonical shortest u->v path."""
        if (u, v) not in self._path:
            raise KeyError(f"{v} unreachable from {u}")
        return self._path[(u, v)]

    def walk_cost(self, w: Walk):
        total = Fraction(0)
        for (u, v) in w.hops():
            d = self.dist(u, v)
            if d is INF:
                return INF
            total += d
        return total

    def expand_walk(self, w: Walk) -> Walk:
        """Replace every hop by its canonical shortest path's vertex sequence."""
        if len(w.seq) == 1:
            return w
        seq: List[int] = [w.seq[0]]
        for (u, v) in w.hops():
            seq.extend(self.path(u, v)[1:])
        if w.closed:
            seq.pop()  # the return hop re-appends the start
            if not seq:
                seq = [w.seq[0]]
        return Walk(tuple(seq), closed=w.closed)


def metric_closure(g: Digraph) -> MetricClosure:
    return MetricClosure(g)


def cut_arcs(g: Digraph, u: CutSide, mode: str):
    """Arcs/edges crossing the cut: 'out' = δ⁺(U), 'in' = δ⁻(U), 'undirected'
    acts on the symmetrization."""
    mem = u.members
    if mode == "out":
        return {(a, b) for (a, b) in g.arcs if a in mem and b not in mem}
    if mode == "in":
        return {(a, b) for (a, b) in g.arcs if a not in mem and b in mem}
    if mode == "undirected":
        ug = symmetrize(g)
        return {e for e in ug.edges if (e[0] in mem) != (e[1] in mem)}
    raise ValueError(f"unknown mode {mode!r}")


def shortcut(w1: Walk, w2: Walk, v: int) -> Walk:
    """Splice two closed walks at a common vertex v into one closed walk.

    The result traverses w1 rotated to start at v, then w2 rotated likewise.
    The hop multiset (hence the cost) is preserved exactly.
    """
    if not (w1.closed and w2.closed):
        raise ValueError("shortcut requires closed walks")
    for w in (w1, w2):
        if v not in w.seq:
            raise ValueError(f"vertex {v} not on walk {w.seq}")

    def rotate(w: Walk) -> Tuple[int, ...]:
        i = w.seq.index(v)
        return w.seq[i:] + w.seq[:i]

    return Walk(rotate(w1) + rotate(w2), closed=True)


def euler_closed_walk(g: Digraph) -> Walk:
    """Closed walk using every arc exactly ``mult`` times (Hierholzer).

    Requires every vertex with positive degree to be balanced and the support
    to be connected.
    """
    remaining: Dict[int, List[int]] = {v: [] for v in g.vertices}
    indeg: Dict[int, int] = {v: 0 for v in g.vertices}
    outdeg: Dict[int, int] = {v: 0 for v in g.vertices}
    total = 0
    for (u, v), m in sorted(g.mult.items()):
        remaining[u].extend([v] * m)
        outdeg[u] += m
        indeg[v] += m
        total += m
    for v in g.vertices:
        if indeg[v] != outdeg[v]:
            raise ValueError(f"vertex {v} unbalanced: in={indeg[v]} out={outdeg[v]}")
    support = [v for v in g.vertices if outdeg[v] > 0]
    if not support:
        raise ValueError("no arcs")
    # connectivity of the support (underlying undirected)
    seen = {support[0]}
    stack = [support[0]]
    adj = {v: set() for v in g.vertices}
    for (u, v) in g.arcs:
        adj[u].add(v)
        adj[v].add(u)
    while stack:
        x = stack.pop()
        for y in adj[x]:
            if y not in seen:
                seen.add(y)
                stack.append(y)
    if any(v not in seen for v in support):
        raise ValueError("arc support is disconnected")

    for v in remaining:
        remaining[v].sort(reverse=True)  # pop() takes lowest id first
    start = support[0]
    circuit = [start]
    ptr = 0
    used = 0
    while used < total:
        if ptr >= len(circuit):
            raise ValueError("arc support is disconnected")
        if not remaining[circuit[ptr]]:
            ptr += 1
            continue
        # grow a sub-circuit from circuit[ptr]
        sub: List[int] = []
        v0 = circuit[ptr]
        v = v0
        while True:
            w = remaining[v].pop()
            used += 1
            sub.append(w)
            v = w
            if v == v0:
                break
        circuit = circuit[: ptr + 1] + sub + circuit[ptr + 1:]
    # circuit starts and ends at `start`; drop the duplicated final vertex
    assert circuit[0] == circuit[-1]
    return Walk(tuple(circuit[:-1]), closed=True)


# ---------------------------------------------------------------------------
# graph text format


def format_fraction(c: Fraction) -> str:
    return f"{c.numerator}/{c.denominator}"


def parse_fraction(s: str) -> Fraction:
    return Fraction(s)


def write_digraph(g: Digraph) -> str:
    lines = [f"digraph {g.n} {sum(g.mult.values())}"]
    for v in g.vertices:
        lines.append(f"v {v}")
    for (u, v) in sorted(g.arcs):
        for _ in range(g.mult[(u, v)]):
            lines.append(f"a {u} {v} {format_fraction(g.arcs[(u, v)])}")
    return "\n".join(lines) + "\n"


def parse_digraph(lines: Iterable[str]) -> Digraph:
    it = iter(lines)
    header = None
    for raw in it:
        s = raw.strip()
        if s and not s.startswith("#"):
            header = s
            break
    if header is None or not header.startswith("digraph"):
        raise ValueError("missing 'digraph n m' header")
    _, n_s, m_s = header.split()
    vertices: List[int] = []
    arcs: Dict[Arc, Fraction] = {}
    mult: Dict[Arc, int] = {}
    for raw in it:
        s = raw.strip()
        if not s or s.startswith("#"):
            continue
        parts = s.split()
        if parts[0] == "v":
            vertices.append(int(parts[1]))
        elif parts[0] == "a":
            u, v = int(parts[1]), int(parts[2])
            c = parse_fraction(parts[3])
            if (u, v) in arcs:
                if arcs[(u, v)] != c:
                    raise ValueError(f"parallel arcs ({u},{v}) with differing costs")
                mult[(u, v)] = mult.get((u, v), 1) + 1
            else:
                arcs[(u, v)] = c
        else:
            raise ValueError(f"unrecognized line: {s}")
    if len(vertices) != int(n_s):
        raise ValueError("vertex count mismatch")
    g = Digraph(vertices, arcs, mult)
    if sum(g.mult.values()) != int(m_s):
        raise ValueError("arc count mismatch")
    return g
