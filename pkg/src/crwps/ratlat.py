"""Exact integer/rational arithmetic and integer lattice linear algebra.

Rationals are :class:`fractions.Fraction` (always in lowest terms, positive
denominator).  Integer matrices are :class:`IntMat`, an immutable row-major
container of Python ints, so nothing here can overflow.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from typing import Iterable, Sequence

Rat = Fraction

__all__ = [
    "Rat",
    "IntMat",
    "SnfResult",
    "HnfResult",
    "gcd_list",
    "lcm_list",
    "frac_part",
    "determinant",
    "rat_inverse",
    "smith_normal_form",
    "hermite_normal_form",
    "is_unimodular",
]


def gcd_list(xs: Iterable[int]) -> int:
    xs = list(xs)
    if not xs:
        raise ValueError("gcd of an empty list is undefined")
    if any(x < 0 for x in xs):
        raise ValueError("gcd_list expects nonnegative integers")
    return reduce(math.gcd, xs)


def lcm_list(xs: Iterable[int]) -> int:
    xs = list(xs)
    if not xs:
        raise ValueError("lcm of an empty list is undefined")
    if any(x <= 0 for x in xs):
        raise ValueError("lcm_list expects positive integers")
    return reduce(math.lcm, xs)


def frac_part(x: Fraction) -> Fraction:
    """x - floor(x), in [0, 1)."""
    return x - (x.numerator // x.denominator)


@dataclass(frozen=True)
class IntMat:
    rows: int
    cols: int
    entries: tuple[int, ...]

    def __post_init__(self):
        if self.rows * self.cols != len(self.entries):
            raise ValueError(
                f"{self.rows}x{self.cols} matrix needs {self.rows * self.cols} "
                f"entries, got {len(self.entries)}"
            )

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]]) -> IntMat:
        rows = [list(r) for r in rows]
        ncols = len(rows[0]) if rows else 0
        if any(len(r) != ncols for r in rows):
            raise ValueError("ragged rows")
        return cls(len(rows), ncols, tuple(int(x) for r in rows for x in r))

    @classmethod
    def identity(cls, n: int) -> IntMat:
        return cls.from_rows([[int(i == j) for j in range(n)] for i in range(n)])

    def __getitem__(self, ij: tuple[int, int]) -> int:
        i, j = ij
        return self.entries[i * self.cols + j]

    def row(self, i: int) -> tuple[int, ...]:
        return self.entries[i * self.cols:(i + 1) * self.cols]

    def tolist(self) -> list[list[int]]:
        return [list(self.row(i)) for i in range(self.rows)]

    def transpose(self) -> IntMat:
        return IntMat.from_rows(
            [[self[i, j] for i in range(self.rows)] for j in range(self.cols)])

    def __matmul__(self, other: IntMat) -> IntMat:
        if self.cols != other.rows:
            raise ValueError("shape mismatch")
        return IntMat.from_rows([
            [sum(self[i, k] * other[k, j] for k in range(self.cols))
             for j in range(other.cols)]
            for i in range(self.rows)
        ])

    def is_square(self) -> bool:
        return self.rows == self.cols


@dataclass(frozen=True)
class SnfResult:
    """``U @ A @ V == S`` with U, V unimodular and S diagonal."""
    U: IntMat
    S: IntMat
    V: IntMat

    @property
    def diagonal(self) -> list[int]:
        return [self.S[i, i] for i in range(min(self.S.rows, self.S.cols))]


@dataclass(frozen=True)
class HnfResult:
    """``U @ A == H`` with U unimodular and H in row Hermite normal form."""
    U: IntMat
    H: IntMat


def determinant(A: IntMat | Sequence[Sequence[int]]) -> int:
    """Fraction-free (Bareiss) determinant."""
    M = A.tolist() if isinstance(A, IntMat) else [list(r) for r in A]
    n = len(M)
    if any(len(r) != n for r in M):
        raise ValueError("determinant of a non-square matrix")
    if n == 0:
        return 1
    sign, prev = 1, 1
    for k in range(n - 1):
        if M[k][k] == 0:
            for i in range(k + 1, n):
                if M[i][k] != 0:
                    M[k], M[i] = M[i], M[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                M[i][j] = (M[i][j] * M[k][k] - M[i][k] * M[k][j]) // prev
        prev = M[k][k]
    return sign * M[n - 1][n - 1]


def is_unimodular(A: IntMat) -> bool:
    return A.is_square() and abs(determinant(A)) == 1


def rat_inverse(A: IntMat | Sequence[Sequence[int]]) -> list[list[Fraction]]:
    """Exact inverse over the rationals (Gauss-Jordan)."""
    M = A.tolist() if isinstance(A, IntMat) else [list(r) for r in A]
    n = len(M)
    if any(len(r) != n for r in M):
        raise ValueError("inverse of a non-square matrix")
    aug = [[Fraction(x) for x in M[i]] + [Fraction(int(i == j)) for j in range(n)]
           for i in range(n)]
    for c in range(n):
        p = next((r for r in range(c, n) if aug[r][c] != 0), None)
        if p is None:
            raise ZeroDivisionError("singular matrix: cone is not simplicial")
        aug[c], aug[p] = aug[p], aug[c]
        piv = aug[c][c]
        aug[c] = [x / piv for x in aug[c]]
        for r in range(n):
            if r != c and aug[r][c] != 0:
                f = aug[r][c]
                aug[r] = [x - f * y for x, y in zip(aug[r], aug[c])]
    return [row[n:] for row in aug]


def _swap_rows(M, i, j):
    M[i], M[j] = M[j], M[i]


def _swap_cols(M, i, j):
    for row in M:
        row[i], row[j] = row[j], row[i]


def _add_row(M, dst, src, k):
    # row[dst] += k * row[src]
    if k:
        M[dst] = [a + k * b for a, b in zip(M[dst], M[src])]


def _add_col(M, dst, src, k):
    if k:
        for row in M:
            row[dst] += k * row[src]


def _eye(n):
    return [[int(i == j) for j in range(n)] for i in range(n)]


def smith_normal_form(A: IntMat | Sequence[Sequence[int]]) -> SnfResult:
    """Smith normal form with transforms.

    Pivot is the smallest nonzero absolute value in the active block,
    ties broken row-major, so the output is reproducible.
    """
    if not isinstance(A, IntMat):
        A = IntMat.from_rows(A)
    m, n = A.rows, A.cols
    S = A.tolist()
    U = _eye(m)
    V = _eye(n)

    def smallest(cells):
        best = None
        for i, j in cells:
            x = S[i][j]
            if x and (best is None or abs(x) < abs(S[best[0]][best[1]])):
                best = (i, j)
        return best

    for t in range(min(m, n)):
        piv = smallest((i, j) for i in range(t, m) for j in range(t, n))
        if piv is None:
            break
        while True:
            i, j = piv
            if i != t:
                _swap_rows(S, i, t)
                _swap_rows(U, i, t)
            if j != t:
                _swap_cols(S, j, t)
                _swap_cols(V, j, t)
            p = S[t][t]
            for i in range(t + 1, m):
                q = S[i][t] // p
                _add_row(S, i, t, -q)
                _add_row(U, i, t, -q)
            for j in range(t + 1, n):
                q = S[t][j] // p
                _add_col(S, j, t, -q)
                _add_col(V, j, t, -q)
            piv = smallest([(i, t) for i in range(t + 1, m)]
                           + [(t, j) for j in range(t + 1, n)])
            if piv is not None:
                continue
            bad = next(((i, j) for i in range(t + 1, m) for j in range(t + 1, n)
                        if S[i][j] % p), None)
            if bad is None:
                break
            _add_row(S, t, bad[0], 1)
            _add_row(U, t, bad[0], 1)
            piv = (t, t)
        if S[t][t] < 0:
            S[t] = [-x for x in S[t]]
            U[t] = [-x for x in U[t]]
    return SnfResult(IntMat.from_rows(U), IntMat.from_rows(S), IntMat.from_rows(V))


def hermite_normal_form(A: IntMat | Sequence[Sequence[int]]) -> HnfResult:
    """Row-style Hermite normal form: H = U A upper echelon, pivots positive,
    entries above each pivot reduced into [0, pivot)."""
    if not isinstance(A, IntMat):
        A = IntMat.from_rows(A)
    m, n = A.rows, A.cols
    H = A.tolist()
    U = _eye(m)
    r = 0
    for c in range(n):
        if r == m:
            break
        while True:
            nz = [i for i in range(r, m) if H[i][c]]
            if not nz:
                break
            p = min(nz, key=lambda i: (abs(H[i][c]), i))
            if p != r:
                _swap_rows(H, p, r)
                _swap_rows(U, p, r)
            done = True
            for i in range(r + 1, m):
                q = H[i][c] // H[r][c]
                _add_row(H, i, r, -q)
                _add_row(U, i, r, -q)
                if H[i][c]:
                    done = False
            if done:
                break
        if H[r][c] == 0:
            continue
        if H[r][c] < 0:
            H[r] = [-x for x in H[r]]
            U[r] = [-x for x in U[r]]
        for i in range(r):
            q = H[i][c] // H[r][c]
            _add_row(H, i, r, -q)
            _add_row(U, i, r, -q)
        r += 1
    return HnfResult(IntMat.from_rows(U), IntMat.from_rows(H))
