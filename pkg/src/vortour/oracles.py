"""Independent brute-force oracles.

A minimum-cost closed walk visiting a vertex set U equals the optimal tour
on U in the metric closure (first-visit shortcutting, triangle inequality),
so the exact optimum is a bitmask DP over subsets of U.  A factorial
permutation scan doubles as a second, independent oracle at very small sizes.
"""
from __future__ import annotations

import itertools
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from .graphs import Digraph, INF, MetricClosure, Walk, is_finite

ORACLE_GUARD = 18  # bitmask DP over subsets of U


def optimal_tour(mc: MetricClosure, targets: Sequence[int],
                 guard: int = ORACLE_GUARD) -> Tuple[object, Optional[Walk]]:
    """Exact minimum closed-walk cost visiting all of ``targets``.

    Returns (cost, walk-as-target-sequence).  Single-vertex convention: a
    walk of one vertex is closed with cost 0.  Returns (INF, None) if some
    target pair is mutually unreachable.
    """
    U = sorted(set(targets))
    k = len(U)
    if k == 0:
        raise ValueError("empty target set")
    if k > guard:
        raise ValueError(f"oracle guard exceeded: |U|={k} > {guard}")
    if k == 1:
        return Fraction(0), Walk((U[0],), closed=True)
    d = [[mc.dist(a, b) for b in U] for a in U]
    for row in d:
        for val in row:
            if not is_finite(val):
                return INF, None
    # Held-Karp bitmask DP, tours anchored at U[0]
    full = 1 << k
    NOVAL = None
    dp: List[List[Optional[Fraction]]] = [[NOVAL] * k for _ in range(full)]
    parent: Dict[Tuple[int, int], int] = {}
    dp[1][0] = Fraction(0)
    for mask in range(1, full):
        if not (mask & 1):
            continue
        row = dp[mask]
        for last in range(k):
            cur = row[last]
            if cur is NOVAL:
                continue
            for nxt in range(1, k):
                if mask & (1 << nxt):
                    continue
                nmask = mask | (1 << nxt)
                cand = cur + d[last][nxt]
                if dp[nmask][nxt] is NOVAL or cand < dp[nmask][nxt]:
                    dp[nmask][nxt] = cand
                    parent[(nmask, nxt)] = last
    best = None
    best_last = None
    for last in range(1, k):
        val = dp[full - 1][last]
        if val is not NOVAL:
            total = val + d[last][0]
            if best is None or total < best:
                best = total
                best_last = last
    assert best is not None
    order = [best_last]
    mask = full - 1
    while order[-1] != 0:
        last = order[-1]
        order.append(parent[(mask, last)])
        mask ^= (1 << last)
    order.reverse()
    seq = tuple(U[i] for i in order)
    return best, Walk(seq, closed=True)


def optimal_tour_bruteforce(mc: MetricClosure, targets: Sequence[int]
                            ) -> Tuple[object, Optional[Walk]]:
    """Second oracle: scan all (k-1)! cyclic orders.  Guarded at k <= 8."""
    U = sorted(set(targets))
    k = len(U)
    if k > 8:
        raise ValueError("permutation oracle guarded at |U| <= 8")
    if k == 1:
        return Fraction(0), Walk((U[0],), closed=True)
    best = INF
    best_seq = None
    for perm in itertools.permutations(U[1:]):
        seq = (U[0],) + perm
        cost = mc.walk_cost(Walk(seq, closed=True))
        if cost < best:
            best = cost
            best_seq = seq
    if best_seq is None:
        return INF, None
    return best, Walk(best_seq, closed=True)


def atsp_optimum(g: Digraph, guard: int = ORACLE_GUARD) -> Tuple[object, Optional[Walk]]:
    """Exact ATSP optimum (closed walk visiting every vertex) of a digraph."""
    mc = MetricClosure(g)
    return optimal_tour(mc, g.vertices, guard=guard)
