"""Small exact integer linear algebra: Smith normal form and congruence systems.

Matrices are lists of lists of Python ints.  Everything here is sized for
presentations with a handful of generators, so clarity wins over speed.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd
from typing import Sequence

Matrix = list[list[int]]


def identity(n: int) -> Matrix:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def matmul(a: Matrix, b: Matrix) -> Matrix:
    if not a:
        return []
    inner = len(b)
    cols = len(b[0]) if b else 0
    return [[sum(a[i][k] * b[k][j] for k in range(inner)) for j in range(cols)] for i in range(len(a))]


def transpose(a: Matrix, cols: int | None = None) -> Matrix:
    if not a:
        return [[] for _ in range(cols or 0)]
    return [list(r) for r in zip(*a)]


@dataclass
class SmithForm:
    """``U @ A @ V == D`` with ``D`` diagonal and ``D[i][i] | D[i+1][i+1]``."""

    D: Matrix
    U: Matrix
    V: Matrix
    Vinv: Matrix

    @property
    def diagonal(self) -> list[int]:
        return [self.D[i][i] for i in range(min(len(self.D), len(self.D[0]) if self.D else 0))]

    @property
    def rank(self) -> int:
        return sum(1 for d in self.diagonal if d != 0)


def smith_normal_form(A: Sequence[Sequence[int]], ncols: int | None = None) -> SmithForm:
    D = [list(map(int, row)) for row in A]
    m = len(D)
    n = len(D[0]) if m else (ncols or 0)
    U = identity(m)
    V = identity(n)
    Vinv = identity(n)

    def swap_rows(i: int, j: int) -> None:
        D[i], D[j] = D[j], D[i]
        U[i], U[j] = U[j], U[i]

    def swap_cols(i: int, j: int) -> None:
        for row in D:
            row[i], row[j] = row[j], row[i]
        for row in V:
            row[i], row[j] = row[j], row[i]
        Vinv[i], Vinv[j] = Vinv[j], Vinv[i]

    def add_row(dst: int, src: int, q: int) -> None:
        # row_dst += q * row_src
        D[dst] = [x + q * y for x, y in zip(D[dst], D[src])]
        U[dst] = [x + q * y for x, y in zip(U[dst], U[src])]

    def add_col(dst: int, src: int, q: int) -> None:
        # col_dst += q * col_src; the inverse update is row_src -= q * row_dst
        for row in D:
            row[dst] += q * row[src]
        for row in V:
            row[dst] += q * row[src]
        Vinv[src] = [x - q * y for x, y in zip(Vinv[src], Vinv[dst])]

    for t in range(min(m, n)):
        best = None
        for i in range(t, m):
            for j in range(t, n):
                if D[i][j] and (best is None or abs(D[i][j]) < abs(D[best[0]][best[1]])):
                    best = (i, j)
        if best is None:
            break
        swap_rows(t, best[0])
        swap_cols(t, best[1])
        while True:
            clean = True
            for i in range(t + 1, m):
                if D[i][t]:
                    add_row(i, t, -(D[i][t] // D[t][t]))
                    if D[i][t]:
                        swap_rows(t, i)
                        clean = False
            for j in range(t + 1, n):
                if D[t][j]:
                    add_col(j, t, -(D[t][j] // D[t][t]))
                    if D[t][j]:
                        swap_cols(t, j)
                        clean = False
            if not clean:
                continue
            bad = next(
                (i for i in range(t + 1, m) for j in range(t + 1, n) if D[i][j] % D[t][t]),
                None,
            )
            if bad is None:
                break
            add_row(t, bad, 1)
        if D[t][t] < 0:
            D[t] = [-x for x in D[t]]
            U[t] = [-x for x in U[t]]
    return SmithForm(D, U, V, Vinv)


@dataclass
class CongruenceSolution:
    """Solutions ``x0 + span(kernel)`` of ``B x = r (mod M)``, vectors reduced mod ``M``."""

    particular: list[int]
    kernel: list[list[int]]


def solve_congruences(
    B: Sequence[Sequence[int]], r: Sequence[int], M: int, nvars: int
) -> CongruenceSolution | None:
    """Solve the linear system ``B x == r (mod M)`` over ``Z/M``; None when inconsistent."""
    rows = [list(map(int, row)) for row in B]
    if not rows:
        return CongruenceSolution([0] * nvars, [[int(i == j) for j in range(nvars)] for i in range(nvars)])
    sf = smith_normal_form(rows)
    s = [sum(u * x for u, x in zip(urow, r)) % M for urow in sf.U]
    k = len(rows)
    y0 = [0] * nvars
    steps: list[int] = []
    for i in range(nvars):
        d = sf.D[i][i] if i < k else 0
        rhs = s[i] if i < k else 0
        g = gcd(d, M)
        if rhs % g:
            return None
        mod = M // g
        if mod > 1:
            y0[i] = (rhs // g) * pow(d // g, -1, mod) % mod
        steps.append(mod)
    for i in range(nvars, k):
        if s[i] % M:
            return None
    x0 = [sum(sf.V[j][i] * y0[i] for i in range(nvars)) % M for j in range(nvars)]
    kernel = []
    for i, step in enumerate(steps):
        if step % M == 0:
            continue
        kernel.append([sf.V[j][i] * step % M for j in range(nvars)])
    return CongruenceSolution(x0, kernel)


def integer_right_kernel(A: Sequence[Sequence[int]], ncols: int) -> list[list[int]]:
    """A Z-basis of ``{x in Z^ncols : A x = 0}``."""
    if not A:
        return identity(ncols)
    sf = smith_normal_form(A)
    rank = sf.rank
    return [[sf.V[j][i] for j in range(ncols)] for i in range(rank, ncols)]


def integer_left_kernel(A: Sequence[Sequence[int]]) -> list[list[int]]:
    """A Z-basis of ``{y : y A = 0}``."""
    sf = smith_normal_form(A)
    return [list(sf.U[i]) for i in range(sf.rank, len(A))]


def subgroup_basis(
    gens: Sequence[Sequence[int]], moduli: Sequence[int]
) -> list[tuple[list[int], int]]:
    """Independent generators of the subgroup of ``prod Z/m_i`` spanned by ``gens``.

    Returns ``[(vector, order), ...]`` with orders > 1 forming the invariant
    factors, so every element is uniquely ``sum t_k b_k`` with ``0 <= t_k < d_k``.
    """
    r = len(moduli)
    gens = [[int(x) % m for x, m in zip(g, moduli)] for g in gens]
    gens = [g for g in gens if any(g)]
    if not gens:
        return []
    stacked = gens + [[m if i == j else 0 for j in range(r)] for i, m in enumerate(moduli)]
    s = len(gens)
    rel = [row[:s] for row in integer_left_kernel(stacked)]
    if not rel:
        raise ValueError("subgroup of a finite group must be finite")
    sf = smith_normal_form(rel)
    diag = [sf.D[i][i] if i < len(rel) else 0 for i in range(s)]
    if any(d == 0 for d in diag):
        raise ValueError("relation lattice not of full rank")
    images = matmul(sf.Vinv, gens)
    out = []
    for k, d in enumerate(diag):
        if d > 1:
            out.append(([x % m for x, m in zip(images[k], moduli)], d))
    return out
