"""Dynamic program for a minimum closed walk through all vortex vertices.

Works over the metric closure: every walk is a vertex sequence whose hop
cost is the shortest-path distance, so a sub-walk "realized by a shortest
path" is simply a hop.  The table is indexed by face subpaths P and keys
(C, f_in, f_out, grip); keys are derived from solutions lazily, so only
reachable keys are ever materialized.

Leaf tables (single face edges) enumerate every partition of the boundary
B_u | B_v into vertex sequences, optionally extended by one "over-arch"
walk: a shortest-path hop between two face vertices, which is how a tour
segment that leaves the face strip through the planar piece and re-enters
far away is represented.  The key's grip component records the endpoint
pairs of walks not yet anchored in the boundary (at most one such walk per
side, at most two total -- the unbroken/broken grip discipline).

Merging re-pairs the walk hops at the shared bag B_w via the
lexicographically least bijection between incoming and outgoing hops; the
resulting collection's key is recomputed and the cheapest solution per key
is kept.  Over-arch walks are consumed by the same re-pairing once their
endpoints' bags come up as a shared bag.

Correctness gate: `optimal_vortex_walk` must equal the independent
bitmask-oracle `oracle_vortex_walk` (the tests sweep random instances).
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, FrozenSet, Iterator, List, Optional, Sequence, Set, Tuple

from .graphs import Digraph, INF, MetricClosure, Walk, is_finite
from .instances import NearlyEmbeddableInstance, Vortex
from .oracles import ORACLE_GUARD, optimal_tour

ZERO = Fraction(0)

# A walk inside the DP: vertex sequence + closed flag.  Closed walks wrap.
DpWalk = Tuple[Tuple[int, ...], bool]
# Grip component of a key: endpoint pairs of open walks that are not fully
# anchored in the boundary, sorted.  () = no grip, 1 pair = unbroken grip,
# 2 pairs = broken grip.
GripState = Tuple[Tuple[int, int], ...]

NO_GRIP: GripState = ()
MAX_GRIP_WALKS = 2


def walk_cost(mc: MetricClosure, w: DpWalk) -> Fraction:
    seq, closed = w
    total = ZERO
    for i in range(len(seq) - 1):
        total += mc.dist(seq[i], seq[i + 1])
    if closed and len(seq) > 1:
        total += mc.dist(seq[-1], seq[0])
    return total


def collection_cost(mc: MetricClosure, sol: Tuple[DpWalk, ...]) -> Fraction:
    return sum((walk_cost(mc, w) for w in sol), ZERO)


def walk_hops(w: DpWalk) -> List[Tuple[int, int]]:
    seq, closed = w
    hops = [(seq[i], seq[i + 1]) for i in range(len(seq) - 1)]
    if closed and len(seq) > 1:
        hops.append((seq[-1], seq[0]))
    return hops


# ---------------------------------------------------------------------------
# keys


def solution_key(sol: Tuple[DpWalk, ...], boundary: FrozenSet[int]
                 ) -> Optional[Tuple[FrozenSet[FrozenSet[int]], Tuple, GripState]]:
    """Derive (C, f, grip) of a collection, or None if it is dead.

    C is the partition of the boundary induced by weak connectivity of the
    union of all walks; f records (in-degree, out-degree) per boundary
    vertex; grip lists the endpoint pairs of open walks with an endpoint
    outside the boundary.  Dead collections: a boundary vertex unvisited, a
    weakly-connected component without a boundary or grip-walk vertex, or
    more than MAX_GRIP_WALKS unanchored walks.
    """
    parent: Dict[int, int] = {}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(x, y):
        rx, ry = find(x), find(y)
        if rx != ry:
            parent[rx] = ry

    fin: Dict[int, int] = {}
    fout: Dict[int, int] = {}
    grip: List[Tuple[int, int]] = []
    for w in sol:
        seq, closed = w
        for v in seq:
            parent.setdefault(v, v)
        for (x, y) in walk_hops(w):
            union(x, y)
            fin[y] = fin.get(y, 0) + 1
            fout[x] = fout.get(x, 0) + 1
        if not closed and (seq[0] not in boundary or seq[-1] not in boundary):
            grip.append((seq[0], seq[-1]))
    if len(grip) > MAX_GRIP_WALKS:
        return None
    if not boundary <= set(parent):
        return None
    anchored = set(boundary)
    for (a, b) in grip:
        anchored.add(a)
        anchored.add(b)
    comps: Dict[int, Set[int]] = {}
    for v in parent:
        comps.setdefault(find(v), set()).add(v)
    classes = []
    for comp in comps.values():
        if not comp & anchored:
            return None
        bnd = comp & boundary
        if bnd:
            classes.append(frozenset(bnd))
    C = frozenset(classes)
    f = tuple(sorted((v, fin.get(v, 0), fout.get(v, 0)) for v in boundary))
    return C, f, tuple(sorted(grip))


def compatible(sol: Tuple[DpWalk, ...], hp_vertices: FrozenSet[int],
               boundary: FrozenSet[int], key) -> bool:
    """Literal check of the compatibility conditions against a key.

    Coverage of the subpath's bag union; walk-endpoint discipline (open
    walks end in the boundary except for the declared grip walks, of which
    there are at most two); exact in/out degrees at boundary vertices; the
    partition matching weak connectivity of the union of walks.
    """
    C, f, grip = key
    visited = {v for (seq, _) in sol for v in seq}
    if not hp_vertices <= visited:                       # coverage
        return False
    derived = solution_key(sol, boundary)
    if derived is None:
        return False
    dC, df, dgrip = derived
    return dC == C and df == f and dgrip == grip


# ---------------------------------------------------------------------------
# leaf enumeration


def seq_partitions(items: Sequence[int]) -> Iterator[Tuple[Tuple[int, ...], ...]]:
    """All partitions of a set into nonempty ordered sequences."""
    if not items:
        yield ()
        return
    x = items[0]
    for part in seq_partitions(items[1:]):
        yield part + ((x,),)
        for wi, w in enumerate(part):
            for pos in range(len(w) + 1):
                yield part[:wi] + (w[:pos] + (x,) + w[pos:],) + part[wi + 1:]


# ---------------------------------------------------------------------------
# DP context


@dataclass
class DpContext:
    g: Digraph
    mc: MetricClosure
    face: Tuple[int, ...]
    bags: Dict[int, FrozenSet[int]]
    mode: str = "relaxed"       # 'relaxed' | 'strict' phase-1 degree check
    max_grip: int = MAX_GRIP_WALKS   # over-arch walk budget (0 disables)
    # optional cap on per-vertex in/out degree of table entries.  Costs are
    # metric, so visits beyond one standalone plus one per hop routed
    # through a vertex are rarely useful, but a cap below 2 is unsound
    # (pass-through visits are sometimes required); None = full search.
    degree_cap: Optional[int] = None

    def __post_init__(self):
        self.hverts = frozenset().union(*self.bags.values())

    def overarch_pairs(self) -> List[Tuple[int, int]]:
        """Irreducible over-arch hops: face vertex pairs whose shortest path
        avoids every other vortex vertex.  A hop whose realization passes
        through some vortex vertex z splits into (u,z)+(z,v) at equal cost,
        so it never needs an over-arch walk of its own."""
        m = self.m
        leaf_boundaries = [self.bags[self.face[i]] | self.bags[self.face[(i + 1) % m]]
                           for i in range(m)]
        out = []
        for u in self.face:
            for v in self.face:
                if u == v:
                    continue
                if any({u, v} <= b for b in leaf_boundaries):
                    continue    # some leaf already enumerates this hop
                path = self.mc.path(u, v)
                if path is None:
                    continue
                if not (set(path[1:-1]) & self.hverts):
                    out.append((u, v))
        return out

    @property
    def m(self) -> int:
        return len(self.face)

    def boundary(self, p) -> FrozenSet[int]:
        """B_u | B_v for an open subpath, B_anchor for the closed face."""
        if p[0] == "c":
            return self.bags[self.face[p[1]]]
        return self.bags[self.face[p[1]]] | self.bags[self.face[p[2]]]

    def positions(self, p) -> List[int]:
        if p[0] == "c":
            return list(range(self.m))
        i, j = p[1], p[2]
        e = (j - i) % self.m
        return [(i + t) % self.m for t in range(e + 1)]

    def hp_vertices(self, p) -> FrozenSet[int]:
        out: Set[int] = set()
        for t in self.positions(p):
            out |= self.bags[self.face[t]]
        return frozenset(out)

    def reachable_vertices(self, p) -> FrozenSet[int]:
        """Vertices whose bag interval is not strictly inside P: only these
        may still be spliced at a future shared bag, so only these may host
        a grip-walk endpoint."""
        if p[0] == "c":
            return self.boundary(p)
        inner = set(self.positions(p)[1:-1])
        out: Set[int] = set()
        for t in range(self.m):
            if t not in inner:
                out |= self.bags[self.face[t]]
        return frozenset(out)


def context_for(inst: NearlyEmbeddableInstance, mode: str = "relaxed",
                max_grip: int = MAX_GRIP_WALKS) -> DpContext:
    vx = inst.vortex
    return DpContext(inst.g, MetricClosure(inst.g), vx.face, dict(vx.bags),
                     mode=mode, max_grip=max_grip)


# table: P -> key -> (cost, solution); key = (C, f, grip)
Table = Dict[Tuple, Dict[Tuple, Tuple[Fraction, Tuple[DpWalk, ...]]]]


def _offer(table: Table, p, key, cost: Fraction, sol: Tuple[DpWalk, ...]):
    slot = table.setdefault(p, {})
    cur = slot.get(key)
    if cur is None or cost < cur[0] or (cost == cur[0] and sol < cur[1]):
        slot[key] = (cost, sol)


def dp_init(ctx: DpContext) -> Table:
    """Seed all subpaths with at most one edge.

    Every collection whose walks avoid the face edge is a set of shortest
    paths between boundary vertices, i.e. a partition of the boundary into
    metric vertex sequences.  With a positive grip budget, variants carrying
    one extra face-to-face shortest-path walk (the over-arch) are added; the
    extra walk may take over coverage of its endpoints when they belong to
    the boundary.
    """
    table: Table = {}
    m = ctx.m
    arches = ctx.overarch_pairs() if ctx.max_grip > 0 else []
    leaves = [("o", i, i) for i in range(m)]
    if m > 1:
        leaves += [("o", i, (i + 1) % m) for i in range(m)]
    for p in leaves:
        boundary = ctx.boundary(p)
        single_edge = p[1] != p[2]
        variants: List[Tuple[FrozenSet[int], Tuple[DpWalk, ...]]] = [
            (boundary, ())]
        if single_edge:
            for (du, dv) in arches:
                # anchor each over-arch at a leaf touching one of its ends
                if du not in boundary and dv not in boundary:
                    continue
                if {du, dv} <= boundary:
                    continue    # a local hop, already enumerated
                extra = (((du, dv), False),)
                covered = {du, dv} & boundary
                for drop in _subsets(sorted(covered)):
                    variants.append((boundary - drop, extra))
        for cover, extra in variants:
            for part in seq_partitions(sorted(cover)):
                sol = tuple(sorted(tuple((w, False) for w in part) + extra))
                key = solution_key(sol, boundary)
                if key is None:
                    continue
                if ctx.degree_cap is not None and \
                        any(fi > ctx.degree_cap or fo > ctx.degree_cap
                            for (_, fi, fo) in key[1]):
                    continue
                _offer(table, p, key, collection_cost(ctx.mc, sol), sol)
    return table


def _subsets(items):
    n = len(items)
    for mask in range(1 << n):
        yield frozenset(items[i] for i in range(n) if mask >> i & 1)


# ---------------------------------------------------------------------------
# merging


def _splice(sol1: Tuple[DpWalk, ...], sol2: Tuple[DpWalk, ...],
            bw: FrozenSet[int], boundary: FrozenSet[int], mode: str
            ) -> Optional[Tuple[DpWalk, ...]]:
    """Phase 1: re-pair walk hops at the shared bag B_w.

    Every hop of every walk keeps its endpoints; only the pairing "after
    arriving at a B_w visit, which hop do we leave on" is redefined, via the
    lexicographically least bijection between incoming and outgoing hops.
    In 'strict' mode the caller has already checked the side-wise degree
    condition; in 'relaxed' mode we only require total balance at B_w
    vertices outside the parent boundary (unpaired hops become walk
    endpoints, which the endpoint discipline then judges).
    """
    walks = list(sol1) + list(sol2)
    # tokens: (walk_idx, pos); hop id = the token it leaves from
    nexthop: Dict[Tuple[int, int], Optional[Tuple[int, int]]] = {}
    token_vertex: Dict[Tuple[int, int], int] = {}
    for wi, (seq, closed) in enumerate(walks):
        n = len(seq)
        for i, v in enumerate(seq):
            token_vertex[(wi, i)] = v
        for i in range(n - 1):
            nexthop[(wi, i)] = (wi, i)
        nexthop[(wi, n - 1)] = (wi, n - 1) if closed and n > 1 else None
    # arrival pairing: cont[token] = hop to take after arriving at token
    cont: Dict[Tuple[int, int], Optional[Tuple[int, int]]] = dict(nexthop)

    def hop_head(h):
        wi, i = h
        n = len(walks[wi][0])
        return (wi, (i + 1) % n)

    # index the hops and tokens incident to B_w once
    ins_at: Dict[int, List[Tuple[int, int]]] = {}
    outs_at: Dict[int, List[Tuple[int, int]]] = {}
    tokens_at: Dict[int, List[Tuple[int, int]]] = {}
    for wi, (seq, closed) in enumerate(walks):
        n = len(seq)
        for i in range(n):
            u = seq[i]
            if u not in bw:
                continue
            h = (wi, i)
            tokens_at.setdefault(u, []).append(h)
            if nexthop[h] is not None:
                outs_at.setdefault(u, []).append(h)
        for i in range(n if closed and n > 1 else n - 1):
            v = seq[(i + 1) % n]
            if v in bw:
                ins_at.setdefault(v, []).append((wi, i))
    for x in sorted(bw):
        ins = ins_at.get(x, [])     # hops whose head token is at x
        outs = outs_at.get(x, [])   # hops whose tail token is at x
        if len(ins) != len(outs) and x not in boundary:
            return None
        ins.sort()
        outs.sort()
        k = min(len(ins), len(outs))
        # clear every existing pairing at x, then re-pair positionally
        for tok in tokens_at.get(x, ()):
            cont[tok] = None
        for a in range(k):
            cont[hop_head(ins[a])] = outs[a]
    # rebuild walks by following hops through cont
    taken: Set[Tuple[int, int]] = set()
    out_walks: List[DpWalk] = []

    def follow(start_hop):
        chain = [start_hop]
        taken.add(start_hop)
        while True:
            head = hop_head(chain[-1])
            nxt = cont.get(head)
            if nxt is None or nxt in taken:
                return chain, nxt == start_hop
            chain.append(nxt)
            taken.add(nxt)

    all_hops = sorted(h for h, nh in nexthop.items() if nh is not None)
    continued = {cont[hop_head(h)] for h in all_hops
                 if cont.get(hop_head(h)) is not None}
    for h in all_hops:      # open chains start at hops that continue nothing
        if h in taken or h in continued:
            continue
        chain, _ = follow(h)
        seqv = [token_vertex[c] for c in chain] + [token_vertex[hop_head(chain[-1])]]
        out_walks.append((tuple(seqv), False))
    for h in all_hops:      # leftover hops form cycles
        if h in taken:
            continue
        chain, closed_walk = follow(h)
        assert closed_walk, "pairing must decompose leftover hops into cycles"
        out_walks.append((tuple(token_vertex[c] for c in chain), True))
    # singleton visits survive unless the vertex is already visited
    visited = {v for (seq, _) in out_walks for v in seq}
    for wi, (seq, closed) in enumerate(walks):
        if len(seq) == 1 and nexthop[(wi, 0)] is None:
            v = seq[0]
            if v not in visited:
                out_walks.append(((v,), False))
                visited.add(v)
    return tuple(sorted(out_walks))


def dp_merge(ctx: DpContext, p1, key1, val1, p2, key2, val2, parent
             ) -> List[Tuple[Tuple, Fraction, Tuple[DpWalk, ...]]]:
    """Merge two table entries; returns the (key, cost, solution) offers.

    Phase 1 re-pairs hops at B_w; the grip update and the connectivity and
    endpoint checks are folded into key recomputation: grips carry over
    unchanged when untouched by the shared bag, are consumed when the
    re-pairing anchors their endpoints, and merges whose grips could never
    be anchored again (endpoint buried inside the parent subpath) or exceed
    the grip budget are rejected.  An empty list is the 'nil' outcome.
    """
    bw = ctx.bags[ctx.face[p1[2]]]
    boundary = ctx.boundary(parent)
    cost1, sol1 = val1
    cost2, sol2 = val2
    if ctx.mode == "strict" or ctx.degree_cap is not None:
        d1 = {x: (fi, fo) for (x, fi, fo) in key1[1]}
        d2 = {x: (fi, fo) for (x, fi, fo) in key2[1]}
        if ctx.mode == "strict":
            for x in bw:
                if d1[x][0] != d2[x][1] or d2[x][0] != d1[x][1]:
                    return []
        if ctx.degree_cap is not None:
            for x in bw:
                if d1[x][0] + d2[x][0] > ctx.degree_cap or \
                   d1[x][1] + d2[x][1] > ctx.degree_cap:
                    return []
    merged = _splice(sol1, sol2, bw, boundary, ctx.mode)
    if merged is None:
        return []
    key = solution_key(merged, boundary)
    if key is None:
        return []
    if ctx.degree_cap is not None and \
            any(fi > ctx.degree_cap or fo > ctx.degree_cap
                for (_, fi, fo) in key[1]):
        return []
    grip = key[2]
    if len(grip) > ctx.max_grip:
        return []
    if grip:
        live = ctx.reachable_vertices(parent)
        for (a, b) in grip:
            if (a not in live and a not in boundary) or \
               (b not in live and b not in boundary):
                return []
    # splicing re-pairs hops but never adds or removes one (dropped duplicate
    # singletons have no hops), so costs simply add
    return [(key, cost1 + cost2, merged)]


# ---------------------------------------------------------------------------
# the full program


def run_dp(ctx: DpContext, all_splits: Optional[bool] = None) -> Table:
    """Fill the table bottom-up, then close the face at face[0].

    In relaxed mode the interior-bag balance condition holds for every split
    point of an optimal decomposition, so growing a single left-to-right
    spine (0,e-1) + (e-1,e) is complete and much cheaper.  Strict mode pins
    side-wise degrees at the split bag, which only some split points admit,
    so there every (i, t, e) split is merged.
    """
    if all_splits is None:
        all_splits = ctx.mode == "strict"
    table = dp_init(ctx)
    m = ctx.m
    if not all_splits:
        for p in list(table):
            _prune_dominated(table, p)
    if all_splits:
        for e in range(2, m):
            for i in range(m):
                parent = ("o", i, (i + e) % m)
                for t in range(1, e):
                    p1 = ("o", i, (i + t) % m)
                    p2 = ("o", (i + t) % m, (i + e) % m)
                    _merge_tables(ctx, table, p1, p2, parent)
        closed = ("c", 0)
        for t in range(1, m):
            _merge_tables(ctx, table, ("o", 0, t), ("o", t, 0), closed)
    else:
        for e in range(2, m):
            _merge_tables(ctx, table, ("o", 0, e - 1), ("o", e - 1, e),
                          ("o", 0, e))
            _prune_dominated(table, ("o", 0, e))
        _merge_tables(ctx, table, ("o", 0, m - 1), ("o", m - 1, 0), ("c", 0))
    return table


def _prune_dominated(table: Table, p) -> None:
    """Drop grip-free entries dominated by a coarser partition.

    With equal degree records, a coarser connectivity partition at no
    greater cost passes every later balance, connectivity and extraction
    check whenever the finer one does, so the finer entry cannot beat it.
    """
    entries = table.get(p)
    if not entries:
        return
    groups: Dict[Tuple, List] = {}
    for key in entries:
        C, f, grip = key
        if not grip:
            groups.setdefault(f, []).append(key)
    for f, keys in groups.items():
        if len(keys) < 2:
            continue
        keys.sort(key=lambda k: (entries[k][0], -max(len(c) for c in k[0])))
        kept: List[Tuple] = []
        for k in keys:
            ck = entries[k][0]
            for k2 in kept:
                if entries[k2][0] <= ck and \
                        all(any(cls <= big for big in k2[0]) for cls in k[0]):
                    del entries[k]
                    break
            else:
                kept.append(k)


def _merge_tables(ctx: DpContext, table: Table, p1, p2, parent):
    t1 = table.get(p1, {})
    t2 = table.get(p2, {})
    if not t1 or not t2:
        return
    bw = sorted(ctx.bags[ctx.face[p1[2]]])
    boundary = ctx.boundary(parent)
    # at the closed face only entries balanced at the anchor bag can ever be
    # extracted, so balance may be demanded everywhere
    closing = parent[0] == "c"
    bal2 = sorted(boundary) if closing else ()
    # bucket side 2 by the B_w degree signature phase 1 needs
    buckets: Dict[Tuple, List] = {}
    for key2, val2 in t2.items():
        d2 = {x: (fi, fo) for (x, fi, fo) in key2[1]}
        if ctx.mode == "strict":
            sig = tuple((d2[x][1], d2[x][0]) for x in bw)
        else:
            # balance is only mandatory off the parent boundary
            sig = tuple(d2[x][0] - d2[x][1] for x in bw if x not in boundary)
        sig += tuple(d2[x][0] - d2[x][1] for x in bal2 if x not in bw)
        buckets.setdefault(sig, []).append((key2, val2))
    for key1, val1 in t1.items():
        d1 = {x: (fi, fo) for (x, fi, fo) in key1[1]}
        if ctx.mode == "strict":
            sig = tuple((d1[x][0], d1[x][1]) for x in bw)
        else:
            sig = tuple(d1[x][1] - d1[x][0] for x in bw if x not in boundary)
        sig += tuple(d1[x][1] - d1[x][0] for x in bal2 if x not in bw)
        for key2, val2 in buckets.get(sig, []):
            if len(key1[2]) + len(key2[2]) > ctx.max_grip:
                continue
            for key, cost, sol in dp_merge(ctx, p1, key1, val1, p2, key2,
                                           val2, parent):
                _offer(table, parent, key, cost, sol)


# ---------------------------------------------------------------------------
# extraction


class VortexInfeasible(Exception):
    pass


def extract_tour(ctx: DpContext, table: Table) -> Tuple[Fraction, Walk]:
    """Pick the cheapest closed-face entry that can close up, and build the
    single closed walk: concatenate balanced open walks (an Euler pass over
    walk-arcs), then splice intersecting closed walks at shared vertices."""
    closed = ("c", 0)
    entries = table.get(closed, {})
    for key, (cost, sol) in sorted(entries.items(),
                                   key=lambda kv: (kv[1][0], kv[0])):
        C, f, grip = key
        if grip != NO_GRIP or len(C) != 1:
            continue
        if any(fi != fo for (_, fi, fo) in f):
            continue
        try:
            walk = _assemble(sol)
        except VortexInfeasible:
            continue
        assert walk_cost(ctx.mc, (walk.seq, True)) == cost
        return cost, walk
    raise VortexInfeasible("no closable table entry at the full face")


def _assemble(sol: Tuple[DpWalk, ...]) -> Walk:
    opens = sorted(w[0] for w in sol if not w[1] and len(w[0]) > 1)
    closeds = [list(w[0]) for w in sol if w[1]]
    singles = [w[0][0] for w in sol if not w[1] and len(w[0]) == 1]
    # Euler pass over the open walks seen as arcs start->end: balanced at
    # every endpoint, so they chain into closed walks.
    consumed = [False] * len(opens)
    by_start: Dict[int, List[int]] = {}
    for i, seq in enumerate(opens):
        by_start.setdefault(seq[0], []).append(i)
    for i in range(len(opens)):
        if consumed[i]:
            continue
        chain = list(opens[i])
        consumed[i] = True
        while True:
            cands = [j for j in by_start.get(chain[-1], []) if not consumed[j]]
            if not cands:
                break
            j = cands[0]
            consumed[j] = True
            chain.extend(opens[j][1:])
        if chain[0] != chain[-1]:
            raise VortexInfeasible("open walks do not close up")
        closeds.append(chain[:-1])
    if not closeds:
        if len(singles) == 1:
            return Walk((singles[0],), True)
        raise VortexInfeasible("no closed walk to extract")
    # splice closed walks at shared vertices until one remains
    main = closeds[0]
    rest = closeds[1:]
    progress = True
    while rest and progress:
        progress = False
        for k, other in enumerate(rest):
            share = set(main) & set(other)
            if share:
                x = min(share)
                oi = other.index(x)
                rot = other[oi:] + other[:oi]
                mi = main.index(x)
                main = main[:mi] + rot + main[mi:]
                del rest[k]
                progress = True
                break
    if rest:
        raise VortexInfeasible("closed walks do not intersect")
    return Walk(tuple(main), True)


# ---------------------------------------------------------------------------
# public entry points


def optimal_vortex_walk(inst: NearlyEmbeddableInstance, mode: str = "relaxed",
                        max_grip: int = MAX_GRIP_WALKS) -> Tuple[Fraction, Walk]:
    """Minimum-cost closed walk visiting all vortex vertices, (0,0,1,p) case."""
    if inst.genus != 0:
        raise ValueError("positive genus is not supported")
    if inst.apices:
        raise ValueError("use optimal_vortex_walk_with_apices for a > 0")
    vx = inst.vortex
    if len(vx.vertices) == 1:
        return ZERO, Walk((next(iter(vx.vertices)),), True)
    ctx = context_for(inst, mode=mode, max_grip=max_grip)
    table = run_dp(ctx)
    return extract_tour(ctx, table)


def optimal_vortex_walk_with_apices(inst: NearlyEmbeddableInstance,
                                    mode: str = "relaxed",
                                    max_grip: int = MAX_GRIP_WALKS
                                    ) -> Tuple[Fraction, Walk]:
    """Min over apex subsets A' of the planar DP on the graph where A' is
    re-added next to the face (arcs at shortest-path cost) and every bag is
    widened by A'."""
    if inst.genus != 0:
        raise ValueError("positive genus is not supported")
    if not inst.apices:
        return optimal_vortex_walk(inst, mode=mode, max_grip=max_grip)
    mc_full = MetricClosure(inst.g)
    best: Optional[Tuple[Fraction, Walk]] = None
    apices = list(inst.apices)
    for mask in range(1 << len(apices)):
        sub = [apices[i] for i in range(len(apices)) if mask >> i & 1]
        inst2 = _apex_subgraph(inst, sub, mc_full)
        cost, walk = optimal_vortex_walk(inst2, mode=mode, max_grip=max_grip)
        # realize the walk in the original graph and cost it there
        cost_g = walk_cost(mc_full, (walk.seq, True))
        if best is None or cost_g < best[0]:
            best = (cost_g, walk)
    return best


def _apex_subgraph(inst: NearlyEmbeddableInstance, sub: List[int],
                   mc_full: MetricClosure) -> NearlyEmbeddableInstance:
    """The instance with all apices removed and the chosen subset re-added
    as extra vortex members: arcs to/from every face vertex (and between the
    chosen apices) at original shortest-path cost, every bag widened."""
    vx = inst.vortex
    apices = set(inst.apices)
    keep = [v for v in inst.g.vertices if v not in apices or v in sub]
    arcs = {a: c for a, c in inst.g.arcs.items()
            if a[0] not in apices and a[1] not in apices}
    extra: Set[Tuple[int, int]] = set()
    for al in sub:
        for fv in vx.face:
            arcs[(al, fv)] = mc_full.dist(al, fv)
            arcs[(fv, al)] = mc_full.dist(fv, al)
            extra.add((al, fv))
            extra.add((fv, al))
        for al2 in sub:
            if al2 != al:
                arcs[(al, al2)] = mc_full.dist(al, al2)
                extra.add((al, al2))
    g2 = Digraph(keep, arcs)
    bags = {fv: b | frozenset(sub) for fv, b in vx.bags.items()}
    vx2 = Vortex(vx.face, vx.vertices | frozenset(sub),
                 vx.arcs | frozenset(extra), bags)
    return NearlyEmbeddableInstance(g2, inst.planar_vertices, inst.rotation,
                                    (vx2,), ())


def oracle_vortex_walk(inst: NearlyEmbeddableInstance,
                       guard: int = ORACLE_GUARD) -> Tuple[Fraction, Walk]:
    """Independent exact optimum: bitmask tour DP on the metric closure."""
    targets = sorted(inst.vortex.vertices)
    mc = MetricClosure(inst.g)
    cost, walk = optimal_tour(mc, targets, guard=guard)
    if not is_finite(cost) or walk is None:
        raise VortexInfeasible("vortex vertices not mutually reachable")
    return cost, walk
