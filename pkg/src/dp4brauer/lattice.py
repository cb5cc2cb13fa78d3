"""Small exact integer/rational linear algebra: echelon forms, kernels, Smith form.

Matrices are lists of rows of Python ints (or Fractions where noted).
"""
from __future__ import annotations

from fractions import Fraction
from math import gcd, lcm
from typing import Sequence

Matrix = list[list[int]]


def _echelon(rows: Matrix, aug: Matrix | None = None) -> tuple[Matrix, Matrix | None, int]:
    """Integer row echelon form by unimodular row operations.

    ``aug`` (same number of rows) receives the same operations.  Returns the
    reduced rows, the transformed ``aug`` and the rank.
    """
    A = [list(r) for r in rows]
    T = [list(r) for r in aug] if aug is not None else None
    nrows = len(A)
    ncols = len(A[0]) if A else 0
    r0 = 0
    for col in range(ncols):
        while True:
            nz = [i for i in range(r0, nrows) if A[i][col] != 0]
            if not nz:
                break
            piv = min(nz, key=lambda i: abs(A[i][col]))
            A[r0], A[piv] = A[piv], A[r0]
            if T is not None:
                T[r0], T[piv] = T[piv], T[r0]
            done = True
            p = A[r0][col]
            for i in range(r0 + 1, nrows):
                if A[i][col]:
                    q = A[i][col] // p
                    A[i] = [x - q * y for x, y in zip(A[i], A[r0])]
                    if T is not None:
                        T[i] = [x - q * y for x, y in zip(T[i], T[r0])]
                    if A[i][col]:
                        done = False
            if done:
                break
        if r0 < nrows and A[r0][col] != 0:
            if A[r0][col] < 0:
                A[r0] = [-x for x in A[r0]]
                if T is not None:
                    T[r0] = [-x for x in T[r0]]
            r0 += 1
        if r0 == nrows:
            break
    return A, T, r0


def row_basis(rows: Matrix) -> Matrix:
    """Z-basis of the lattice spanned by ``rows`` (echelon rows, deterministic)."""
    A, _, rank = _echelon(rows)
    return A[:rank]


def integer_kernel(A: Matrix) -> Matrix:
    """Z-basis (as rows) of ``{x in Z^n : A x = 0}``."""
    if not A:
        raise ValueError("empty matrix")
    n = len(A[0])
    At = [list(col) for col in zip(*A)]
    ident = [[int(i == j) for j in range(n)] for i in range(n)]
    E, T, rank = _echelon(At, ident)
    return T[rank:]


def rank_q(rows: Sequence[Sequence]) -> int:
    return len(_rref_q(rows)[1])


def _integral_row(r: Sequence) -> list[int]:
    fr = [Fraction(x) for x in r]
    L = lcm(*(x.denominator for x in fr)) if fr else 1
    return [int(x * L) for x in fr]


def _primitive(r: list[int]) -> list[int]:
    g = gcd(*r)
    return [x // g for x in r] if g > 1 else r


def _rref_q(rows: Sequence[Sequence]) -> tuple[list[list[Fraction]], list[int]]:
    # Gauss-Jordan on integer rows (cleared denominators, gcd-reduced); divide out at the end
    A = [_integral_row(r) for r in rows]
    pivots = []
    r0 = 0
    ncols = len(A[0]) if A else 0
    for col in range(ncols):
        piv = next((i for i in range(r0, len(A)) if A[i][col] != 0), None)
        if piv is None:
            continue
        A[r0], A[piv] = A[piv], A[r0]
        prow = A[r0]
        p = prow[col]
        for i in range(len(A)):
            f = A[i][col]
            if i != r0 and f != 0:
                A[i] = _primitive([p * x - f * y for x, y in zip(A[i], prow)])
        pivots.append(col)
        r0 += 1
    R = [[Fraction(x, A[i][pivots[i]]) for x in A[i]] if i < r0 else [Fraction(0)] * ncols
         for i in range(len(A))]
    return R, pivots


def kernel_q(A: Sequence[Sequence]) -> list[list[Fraction]]:
    """Q-basis of the right kernel of ``A``."""
    n = len(A[0])
    R, pivots = _rref_q(A)
    out = []
    for free in (c for c in range(n) if c not in pivots):
        v = [Fraction(0)] * n
        v[free] = Fraction(1)
        for i, p in enumerate(pivots):
            v[p] = -R[i][free]
        out.append(v)
    return out


def coordinates(basis: Matrix, v: Sequence) -> list[Fraction]:
    """Rational ``y`` with ``sum y_i basis[i] = v``; raises if ``v`` is outside the span."""
    return coordinates_many(basis, [v])[0]


def coordinates_many(basis: Matrix, vectors: Sequence[Sequence]) -> list[list[Fraction]]:
    """``coordinates`` for several vectors with a single elimination."""
    k, m = len(basis), len(vectors)
    # columns are basis vectors, then the targets
    M = [[Fraction(basis[i][j]) for i in range(k)] + [Fraction(v[j]) for v in vectors]
         for j in range(len(vectors[0]))]
    R, pivots = _rref_q(M)
    if any(p >= k for p in pivots):
        raise ValueError("vector not in the span of the basis")
    if len(pivots) < k:
        raise ValueError("basis vectors are dependent")
    out = []
    for t in range(m):
        y = [Fraction(0)] * k
        for i, p in enumerate(pivots):
            y[p] = R[i][k + t]
        out.append(y)
    return out


def integer_coordinates(basis: Matrix, v: Sequence[int]) -> list[int]:
    y = coordinates(basis, v)
    if any(c.denominator != 1 for c in y):
        raise ValueError("vector is in the rational span but not in the lattice")
    return [int(c) for c in y]


def elementary_divisors(A: Matrix) -> list[int]:
    """Nonzero diagonal entries of the Smith normal form of ``A``."""
    M = [list(r) for r in A]
    if not M or not M[0]:
        return []
    m, n = len(M), len(M[0])

    def move_to_pivot(t, cells):
        _, pi, pj = min(cells)
        M[t], M[pi] = M[pi], M[t]
        for row in M:
            row[t], row[pj] = row[pj], row[t]

    out = []
    for t in range(min(m, n)):
        cells = [(abs(M[i][j]), i, j) for i in range(t, m) for j in range(t, n) if M[i][j]]
        if not cells:
            break
        move_to_pivot(t, cells)
        while True:
            p = M[t][t]
            for i in range(t + 1, m):
                if M[i][t]:
                    q = M[i][t] // p
                    M[i] = [x - q * y for x, y in zip(M[i], M[t])]
            for j in range(t + 1, n):
                if M[t][j]:
                    q = M[t][j] // p
                    for row in M:
                        row[j] -= q * row[t]
            rest = [(abs(M[i][t]), i, t) for i in range(t + 1, m) if M[i][t]] + \
                   [(abs(M[t][j]), t, j) for j in range(t + 1, n) if M[t][j]]
            if rest:
                move_to_pivot(t, rest)
                continue
            bad = next((i for i in range(t + 1, m) for j in range(t + 1, n) if M[i][j] % p), None)
            if bad is None:
                break
            M[t] = [x + y for x, y in zip(M[t], M[bad])]
        out.append(abs(M[t][t]))
    return out


def matmul(A: Sequence[Sequence], B: Sequence[Sequence]) -> list[list]:
    Bt = list(zip(*B))
    return [[sum(a * b for a, b in zip(row, col)) for col in Bt] for row in A]


def matvec(A: Sequence[Sequence], v: Sequence) -> list:
    return [sum(a * x for a, x in zip(row, v)) for row in A]
