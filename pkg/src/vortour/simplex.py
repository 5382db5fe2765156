"""Dense two-phase primal simplex over exact rationals, Bland's rule.

Problem form: minimize c.x subject to A_eq x = b_eq, A_ge x >= b_ge, x >= 0.
Instances here are tiny (tens of rows/columns); a dense tableau with
Fraction entries is fast enough and removes every tolerance question.
"""
from __future__ import annotations

from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

ZERO = Fraction(0)
ONE = Fraction(1)


class Infeasible(Exception):
    pass


class Unbounded(Exception):
    pass


def _pivot(T: List[List[Fraction]], basis: List[int], row: int, col: int):
    piv = T[row][col]
    inv = ONE / piv
    T[row] = [a * inv for a in T[row]]
    prow = T[row]
    for i, r in enumerate(T):
        if i == row:
            continue
        f = r[col]
        if f != 0:
            T[i] = [a - f * b for a, b in zip(r, prow)]
    basis[row] = col


def _run(T: List[List[Fraction]], basis: List[int], ncols: int) -> None:
    """Optimize tableau in place.  Last row = objective (reduced costs), last
    column = rhs.  Bland's rule throughout."""
    while True:
        obj = T[-1]
        col = next((j for j in range(ncols) if obj[j] < 0), None)
        if col is None:
            return
        row = None
        best = None
        for i in range(len(T) - 1):
            a = T[i][col]
            if a > 0:
                ratio = T[i][-1] / a
                if best is None or ratio < best or (ratio == best and basis[i] < basis[row]):
                    best = ratio
                    row = i
        if row is None:
            raise Unbounded()
        _pivot(T, basis, row, col)


def solve_min(c: Sequence[Fraction],
              A_eq: Sequence[Sequence[Fraction]], b_eq: Sequence[Fraction],
              A_ge: Sequence[Sequence[Fraction]], b_ge: Sequence[Fraction],
              ) -> Tuple[List[Fraction], Fraction]:
    """Return (x, objective) at an optimal vertex; raises Infeasible/Unbounded."""
    nx = len(c)
    rows: List[List[Fraction]] = []
    rhs: List[Fraction] = []
    nsurplus = len(A_ge)
    for r, b in zip(A_eq, b_eq):
        rows.append([Fraction(a) for a in r] + [ZERO] * nsurplus)
        rhs.append(Fraction(b))
    for k, (r, b) in enumerate(zip(A_ge, b_ge)):
        row = [Fraction(a) for a in r] + [ZERO] * nsurplus
        row[nx + k] = Fraction(-1)
        rows.append(row)
        rhs.append(Fraction(b))
    m = len(rows)
    # flip rows to nonnegative rhs, then add artificials
    for i in range(m):
        if rhs[i] < 0:
            rows[i] = [-a for a in rows[i]]
            rhs[i] = -rhs[i]
    ncols = nx + nsurplus
    total = ncols + m  # + artificials
    T: List[List[Fraction]] = []
    basis: List[int] = []
    for i in range(m):
        row = rows[i] + [ZERO] * m + [rhs[i]]
        row[ncols + i] = ONE
        T.append(row)
        basis.append(ncols + i)
    # phase 1 objective: minimize sum of artificials
    obj = [ZERO] * (total + 1)
    for i in range(m):
        for j in range(total + 1):
            obj[j] -= T[i][j]
    T.append(obj)
    _run(T, basis, total)
    if T[-1][-1] != 0:
        raise Infeasible()
    # drive artificials out of the basis where possible
    for i in range(m):
        if basis[i] >= ncols:
            col = next((j for j in range(ncols) if T[i][j] != 0), None)
            if col is not None:
                _pivot(T, basis, i, col)
    # drop redundant all-zero artificial rows
    keep = [i for i in range(m) if basis[i] < ncols or any(T[i][j] != 0 for j in range(ncols))]
    T = [T[i] for i in keep]
    basis = [basis[i] for i in keep]
    # phase 2 objective
    obj = [ZERO] * (total + 1)
    for j in range(nx):
        obj[j] = Fraction(c[j])
    for i, bi in enumerate(basis):
        if obj[bi] != 0:
            f = obj[bi]
            obj = [a - f * b for a, b in zip(obj, T[i])]
    T.append(obj)
    # forbid re-entering artificial columns by ignoring them as candidates
    _run(T, basis, ncols)
    x = [ZERO] * nx
    for i, bi in enumerate(basis):
        if bi < nx:
            x[bi] = T[i][-1]
    objective = sum((Fraction(ci) * xi for ci, xi in zip(c, x)), ZERO)
    return x, objective
