"""Exact rational linear algebra: null spaces and a two-phase simplex.

Everything here works on lists of :class:`fractions.Fraction`.  The simplex
uses Bland's rule so pivoting is deterministic and cannot cycle.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence


def frac_str(q) -> str:
    """Canonical "num/den" string; integers keep the "/1" suffix."""
    q = Fraction(q)
    return f"{q.numerator}/{q.denominator}"


def parse_frac(text) -> Fraction:
    if isinstance(text, (int, Fraction)):
        return Fraction(text)
    return Fraction(str(text))


def rref(rows: Sequence[Sequence]) -> tuple[list[list[Fraction]], list[int]]:
    """Reduced row echelon form and the list of pivot columns."""
    mat = [[Fraction(v) for v in row] for row in rows]
    if not mat:
        return mat, []
    ncols = len(mat[0])
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(mat)) if mat[i][c] != 0), None)
        if piv is None:
            continue
        mat[r], mat[piv] = mat[piv], mat[r]
        inv = 1 / mat[r][c]
        mat[r] = [v * inv for v in mat[r]]
        for i in range(len(mat)):
            if i != r and mat[i][c] != 0:
                f = mat[i][c]
                mat[i] = [a - f * b for a, b in zip(mat[i], mat[r])]
        pivots.append(c)
        r += 1
        if r == len(mat):
            break
    return mat, pivots


def nullspace(rows: Sequence[Sequence]) -> list[list[Fraction]]:
    """Basis of ``{x : A x = 0}`` with one free variable set to 1 per vector."""
    mat, pivots = rref(rows)
    ncols = len(rows[0])
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        vec = [Fraction(0)] * ncols
        vec[f] = Fraction(1)
        for i, pc in enumerate(pivots):
            vec[pc] = -mat[i][f]
        basis.append(vec)
    return basis


def independent_rows(A_eq, b_eq):
    """Equivalent system with linearly independent rows, or None if inconsistent."""
    if not A_eq:
        return [], []
    n = len(A_eq[0])
    mat, pivots = rref([list(row) + [bi] for row, bi in zip(A_eq, b_eq)])
    if n in pivots:
        return None
    rows = [row for row in mat[:len(pivots)]]
    return [row[:n] for row in rows], [row[n] for row in rows]


@dataclass
class LPResult:
    status: str  # "optimal" | "infeasible" | "unbounded"
    x: list[Fraction] | None = None
    objective: Fraction | None = None


class _Tableau:
    def __init__(self, A, b, nvars):
        self.rows = [list(r) + [bi] for r, bi in zip(A, b)]
        self.nvars = nvars
        self.basis: list[int] = []
        self.obj: list[Fraction] | None = None

    def _eliminate(self, target, row, c):
        f = target[c]
        return [a - f * b if b else a for a, b in zip(target, row)]

    def pivot(self, r, c):
        row = self.rows[r]
        inv = 1 / row[c]
        row = [v * inv if v else v for v in row]
        self.rows[r] = row
        for i, other in enumerate(self.rows):
            if i != r and other[c] != 0:
                self.rows[i] = self._eliminate(other, row, c)
        if self.obj is not None and self.obj[c] != 0:
            self.obj = self._eliminate(self.obj, row, c)
        self.basis[r] = c

    def set_cost(self, cost):
        """Objective row holding reduced costs (last entry: minus the objective)."""
        obj = [Fraction(v) for v in cost] + [Fraction(0)]
        for r, bv in enumerate(self.basis):
            if obj[bv] != 0:
                obj = self._eliminate(obj, self.rows[r], bv)
        self.obj = obj

    def optimize(self, cost, allowed):
        """Minimize ``cost`` over columns in ``allowed`` with Bland's rule."""
        self.set_cost(cost)
        while True:
            red = self.obj
            entering = next((j for j in allowed if red[j] < 0), None)
            if entering is None:
                return "optimal"
            best = None
            for r, row in enumerate(self.rows):
                a = row[entering]
                if a > 0:
                    ratio = row[-1] / a
                    key = (ratio, self.basis[r])
                    if best is None or key < best[0]:
                        best = (key, r)
            if best is None:
                return "unbounded"
            self.pivot(best[1], entering)


def linprog_exact(cost: Sequence, A_eq: Sequence[Sequence], b_eq: Sequence) -> LPResult:
    """Minimize ``cost . x`` subject to ``A_eq x = b_eq`` and ``x >= 0``.

    Returns a basic (vertex) optimal solution in exact rationals.
    """
    n = len(cost)
    reduced = independent_rows(A_eq, b_eq)
    if reduced is None:
        return LPResult("infeasible")
    A, b = reduced
    for i in range(len(A)):
        if b[i] < 0:
            A[i] = [-v for v in A[i]]
            b[i] = -b[i]
    m = len(A)
    # phase 1: artificial columns n..n+m-1
    full = [row + [Fraction(int(i == r)) for i in range(m)] for r, row in enumerate(A)]
    tab = _Tableau(full, b, n)
    tab.basis = [n + r for r in range(m)]
    phase1 = [Fraction(0)] * n + [Fraction(1)] * m
    tab.optimize(phase1, list(range(n + m)))
    infeas = sum(tab.rows[r][-1] for r, bv in enumerate(tab.basis) if bv >= n)
    if infeas > 0:
        return LPResult("infeasible")
    # drive remaining artificials out of the basis, dropping redundant rows
    r = 0
    while r < len(tab.rows):
        if tab.basis[r] >= n:
            col = next((j for j in range(n) if tab.rows[r][j] != 0), None)
            if col is None:
                del tab.rows[r]
                del tab.basis[r]
                continue
            tab.pivot(r, col)
        r += 1
    tab.rows = [row[:n] + [row[-1]] for row in tab.rows]
    tab.obj = None
    cost_q = [Fraction(v) for v in cost]
    status = tab.optimize(cost_q, list(range(n)))
    if status == "unbounded":
        return LPResult("unbounded")
    x = [Fraction(0)] * n
    for r, bv in enumerate(tab.basis):
        x[bv] = tab.rows[r][-1]
    return LPResult("optimal", x, sum(c * v for c, v in zip(cost_q, x)))


def lexmin_point(A_eq, b_eq, nvars: int) -> list[Fraction] | None:
    """Lexicographically smallest point of ``{x >= 0 : A x = b}``, or None.

    Minimizes x[0], fixes it, then x[1], and so on.  The result is a
    vertex of the polytope.
    """
    reduced = independent_rows(A_eq, b_eq)
    if reduced is None:
        return None
    A, b = reduced
    x = None
    for i in range(nvars):
        cost = [0] * nvars
        cost[i] = 1
        res = linprog_exact(cost, A, b)
        if res.status == "infeasible":
            return None
        if res.status == "unbounded":
            raise ValueError("lexicographic minimum unbounded")
        x = res.x
        A.append([int(j == i) for j in range(nvars)])
        b.append(res.x[i])
    if x is None:
        res = linprog_exact([], A, b)
        return None if res.status == "infeasible" else res.x
    return x
