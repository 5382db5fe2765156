"""End-to-end ATSP approximation for one-vortex instances.

The chain: exact Held-Karp LP -> vortex walk (dynamic program) -> walk
augmentation -> iterative re-thinning of the LP weights -> circulation
rounding into closed walks -> stitching the walks with an exact tour over
representatives.  Every stage feeds a cost ledger so the final number is
reproducible line by line.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, FrozenSet, List, Optional, Sequence, Set, Tuple

import networkx as nx

from .graphs import (Arc, Digraph, Edge, MetricClosure, Ugraph, Walk,
                     edge_of, euler_closed_walk, symmetrize)
from .heldkarp import (LpPoint, augment, cost_thinness, measure_thinness,
                       predicates, solve_lp, symz)
from .instances import NearlyEmbeddableInstance
from .oracles import ORACLE_GUARD, optimal_tour
from .thin import RibbonResult, ThinCertificate, thin_subgraph_nearly
from .vortexdp import optimal_vortex_walk_with_apices

ZERO = Fraction(0)
STITCH_GUARD = 12      # bitmask tour over at most this many representatives


class PipelineError(RuntimeError):
    pass


@dataclass
class TourResult:
    walk: Walk
    cost: Fraction                    # ledger cost: walk total + stitching
    lp_objective: Fraction
    certificates: List[ThinCertificate]
    ledger: Dict[str, Fraction] = field(default_factory=dict)


# ---------------------------------------------------------------------------
# iterative re-thinning


def _floor_frac(v: Fraction, n2: int) -> Fraction:
    return Fraction(math.floor(v * n2), n2)


def _undirected_cost(ug: Ugraph, edges) -> Fraction:
    return sum((ug.edges[e] for e in edges), ZERO)


def iterate_thin(inst: NearlyEmbeddableInstance, x: LpPoint, w: Walk
                 ) -> Tuple[RibbonResult, Dict[str, object]]:
    """Repeatedly build thin subgraphs while draining z, keep the cheapest.

    Starts from z0 = 3*floor(z*n^2)/n^2 and subtracts 1/n^2 on the edges of
    each round's subgraph; every intermediate weight must stay nonnegative,
    2-thick and walk-dense, which is asserted per round.
    """
    g = inst.g
    n2 = g.n * g.n
    aug = augment(x, w)
    z = symz(aug.x)
    ug = symmetrize(g)
    zi = {e: 3 * _floor_frac(v, n2) for e, v in z.items()}
    w_edge_set = {edge_of(u, v) for (u, v) in w.hops() if u != v}

    rounds: List[Tuple[Fraction, RibbonResult]] = []
    alpha: Optional[int] = None
    m = 1
    i = 0
    while i < m:
        pred = predicates(g.vertices, zi, w, Fraction(2))
        if min(zi.values()) < 0 or not pred["is_thick"] or not pred["is_dense"]:
            raise PipelineError(
                f"round {i}: weight invariant broken "
                f"(nonneg={min(zi.values()) >= 0}, {pred})")
        res = thin_subgraph_nearly(inst, zi, w)
        union = set(res.s_edges) | w_edge_set
        rounds.append((_undirected_cost(ug, res.s_edges), res))
        if alpha is None:
            a_star = res.union_cert.alpha_star
            alpha = max(1, math.ceil(a_star))
            m = max(1, n2 // alpha)
        for e in union:
            zi[e] = zi.get(e, ZERO) - Fraction(1, n2)
        i += 1
    cost, best = min(rounds, key=lambda t: t[0])
    info = {
        "rounds": len(rounds),
        "alpha": alpha,
        "best_cost": cost,
        "round_costs": [c for c, _ in rounds],
    }
    return best, info


# ---------------------------------------------------------------------------
# circulation rounding


def _orient(g: Digraph, edges) -> List[Arc]:
    """Pick the cheaper existing direction for each undirected edge."""
    out = []
    for (u, v) in sorted(edges):
        fw, bw = g.has_arc(u, v), g.has_arc(v, u)
        if fw and (not bw or g.arcs[(u, v)] <= g.arcs[(v, u)]):
            out.append((u, v))
        elif bw:
            out.append((v, u))
        else:
            raise PipelineError(f"edge {{{u},{v}}} has no arc in either direction")
    return out


def round_to_walks(g: Digraph, s_edges, x: Dict[Arc, Fraction],
                   alpha: Fraction, s_cost: Fraction) -> List[Walk]:
    """Turn a thin spanning subgraph into closed walks via a circulation.

    Each subgraph edge is oriented toward its cheaper arc and forced to
    carry at least one unit; all arcs get capacity ceil(2*alpha*x) on top.
    The minimum-cost integral circulation is Eulerian per component, and
    thinness makes it feasible.  Vertices untouched by the flow become
    singleton walks.
    """
    lower: Dict[Arc, int] = {a: 0 for a in g.arcs}
    for a in _orient(g, s_edges):
        lower[a] = 1
    upper = {a: lower[a] + math.ceil(2 * alpha * x.get(a, ZERO))
             for a in g.arcs}

    denom = 1
    for c in g.arcs.values():
        denom = denom * c.denominator // math.gcd(denom, c.denominator)
    h = nx.DiGraph()
    h.add_nodes_from(g.vertices, demand=0)
    for (u, v), c in g.arcs.items():
        cap = upper[(u, v)] - lower[(u, v)]
        h.add_edge(u, v, capacity=cap, weight=int(c * denom))
        if lower[(u, v)]:
            h.nodes[u]["demand"] += lower[(u, v)]
            h.nodes[v]["demand"] -= lower[(u, v)]
    try:
        flow = nx.min_cost_flow(h)
    except nx.NetworkXUnfeasible as exc:
        raise PipelineError(
            "circulation infeasible: thinness certificate defect") from exc

    mult: Dict[Arc, int] = {}
    for a in g.arcs:
        f = lower[a] + flow.get(a[0], {}).get(a[1], 0)
        if f > 0:
            mult[a] = f

    comps = _support_components(g.vertices, mult)
    walks: List[Walk] = []
    covered: Set[int] = set()
    for comp in comps:
        sub_arcs = {a: g.arcs[a] for a in mult if a[0] in comp}
        sub = Digraph(sorted(comp), sub_arcs,
                      {a: mult[a] for a in sub_arcs})
        walks.append(euler_closed_walk(sub))
        covered |= comp
    for v in sorted(set(g.vertices) - covered):
        walks.append(Walk((v,), closed=True))

    total = sum((g.arcs[a] * m for a, m in mult.items()), ZERO)
    objective = sum((g.arcs[a] * v for a, v in x.items()), ZERO)
    assert total <= (2 * alpha + s_cost) * objective, \
        "rounded walks exceed the (2*alpha + s)-bound"
    return walks


def _support_components(vertices, mult: Dict[Arc, int]) -> List[Set[int]]:
    adj: Dict[int, Set[int]] = {}
    for (u, v) in mult:
        adj.setdefault(u, set()).add(v)
        adj.setdefault(v, set()).add(u)
    seen: Set[int] = set()
    comps = []
    for s in sorted(adj):
        if s in seen:
            continue
        comp, stack = set(), [s]
        while stack:
            y = stack.pop()
            if y in comp:
                continue
            comp.add(y)
            stack.extend(adj[y])
        seen |= comp
        comps.append(comp)
    return comps


# ---------------------------------------------------------------------------
# stitching


def stitch(walks: Sequence[Walk], g: Digraph) -> Tuple[Walk, Fraction]:
    """Join closed walks into one closed walk spanning their union.

    One representative per walk; an exact bitmask tour over the
    representatives in the metric closure supplies the connections.  The
    result's ledger cost is exactly (sum of walk costs) + (stitch cost).
    """
    if not walks:
        raise ValueError("no walks to stitch")
    if len(walks) == 1:
        return walks[0], ZERO
    if len(walks) > STITCH_GUARD:
        raise PipelineError(f"{len(walks)} walks exceed the stitch guard")
    mc = MetricClosure(g)
    reps = [w.seq[0] for w in walks]
    tour_cost, tour = optimal_tour(mc, reps)
    if tour is None:
        raise PipelineError("representatives are not mutually reachable")
    by_rep = {w.seq[0]: w for w in walks}
    seq: List[int] = []
    for r in tour.seq:
        w = by_rep[r]
        i = w.seq.index(r)
        rot = w.seq[i:] + w.seq[:i]
        seq.extend(rot)
        if len(rot) > 1:
            seq.append(r)   # close the sub-walk before hopping onward
    return Walk(tuple(seq), closed=True), tour_cost


# ---------------------------------------------------------------------------
# the full chain


def approximate_atsp(inst: NearlyEmbeddableInstance,
                     compare_oracle: bool = False) -> TourResult:
    """Approximate ATSP on an (a,0,1,p) instance, with a full cost ledger."""
    if inst.genus != 0:
        raise PipelineError("positive genus is not supported")
    if inst.k != 1:
        raise PipelineError("exactly one vortex required (merge first; the "
                            "merged instance must still be planar)")
    g = inst.g
    pt = solve_lp(g)
    mc = MetricClosure(g)
    w_cost, w_mc = optimal_vortex_walk_with_apices(inst)
    w = mc.expand_walk(w_mc)
    aug = augment(pt, w)

    best, info = iterate_thin(inst, pt, w)
    t_edges = set(best.s_edges) | {edge_of(u, v) for (u, v) in w.hops()
                                   if u != v}
    z_aug = symz(aug.x)
    rep = measure_thinness(g.vertices, z_aug, t_edges)
    s_cost = cost_thinness(g, t_edges, aug.x)
    walks = round_to_walks(g, t_edges, aug.x, rep.alpha_star, s_cost)

    final, stitch_cost = stitch(walks, g)
    walk_total = sum((mc.walk_cost(wk) for wk in walks), ZERO)
    cost = walk_total + stitch_cost

    assert set(final.seq) >= set(g.vertices), "tour does not span the graph"
    assert cost >= pt.objective, "tour cheaper than the LP relaxation"
    ledger = {
        "lp_objective": pt.objective,
        "vortex_walk": w_cost,
        "augmented_objective": aug.objective,
        "thin_subgraph_cost": info["best_cost"],
        "thin_rounds": Fraction(info["rounds"]),
        "walks_total": walk_total,
        "stitch": stitch_cost,
        "final": cost,
    }
    if compare_oracle and g.n <= ORACLE_GUARD:
        opt, _ = optimal_tour(mc, list(g.vertices))
        ledger["oracle_opt"] = opt
        ledger["ratio"] = cost / opt if opt else ZERO
    return TourResult(final, cost, pt.objective,
                      [best.cert, best.union_cert], ledger)
