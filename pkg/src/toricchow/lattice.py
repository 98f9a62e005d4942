"""Exact integer linear algebra.

Matrices are plain lists of rows of Python ints; sublattices of Z^n are
given by lists of generator vectors.  Nothing in this module touches
floating point.

Hermite normal form convention (fixed here, used everywhere): column
style, ``H = M @ W`` with ``W`` unimodular, ``H`` in lower column-echelon
form, positive pivots, and every entry to the left of a pivot reduced
into ``[0, pivot)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

Matrix = list[list[int]]
Vector = tuple[int, ...]


# -- small helpers ---------------------------------------------------------

def identity(n: int) -> Matrix:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def zeros(rows: int, cols: int) -> Matrix:
    return [[0] * cols for _ in range(rows)]


def transpose(M: Sequence[Sequence[int]], n_cols: int | None = None) -> Matrix:
    if not M:
        return [[] for _ in range(n_cols or 0)]
    return [list(col) for col in zip(*M)]


def matmul(A: Sequence[Sequence], B: Sequence[Sequence]) -> list[list]:
    Bt = list(zip(*B)) if B else []
    return [[sum(a * b for a, b in zip(row, col)) for col in Bt] for row in A]


def matvec(A: Sequence[Sequence], x: Sequence) -> list:
    return [sum(a * b for a, b in zip(row, x)) for row in A]


def dot(u: Sequence, v: Sequence):
    return sum(a * b for a, b in zip(u, v))


def columns_to_matrix(gens: Sequence[Sequence[int]], n: int) -> Matrix:
    """Stack generator vectors as the columns of an n-row matrix."""
    return [[int(g[i]) for g in gens] for i in range(n)]


def primitive(v: Sequence[int]) -> Vector:
    g = math.gcd(*v) if v else 0
    if g == 0:
        return tuple(v)
    return tuple(x // g for x in v)


def xgcd(a: int, b: int) -> tuple[int, int, int]:
    """Return (g, s, t) with s*a + t*b == g == gcd(a, b) >= 0."""
    s0, s1, t0, t1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        s0, s1 = s1, s0 - q * s1
        t0, t1 = t1, t0 - q * t1
    if a < 0:
        return -a, -s0, -t0
    return a, s0, t0


# -- rational elimination ---------------------------------------------------

def row_echelon(M: Sequence[Sequence]) -> tuple[list[list[Fraction]], list[int]]:
    """Reduced row echelon form over Q.  Returns (R, pivot columns)."""
    A = [[Fraction(x) for x in row] for row in M]
    pivots: list[int] = []
    if not A:
        return A, pivots
    n = len(A[0])
    r = 0
    for c in range(n):
        p = next((i for i in range(r, len(A)) if A[i][c] != 0), None)
        if p is None:
            continue
        A[r], A[p] = A[p], A[r]
        inv = 1 / A[r][c]
        A[r] = [x * inv for x in A[r]]
        for i in range(len(A)):
            if i != r and A[i][c] != 0:
                f = A[i][c]
                A[i] = [x - f * y for x, y in zip(A[i], A[r])]
        pivots.append(c)
        r += 1
        if r == len(A):
            break
    return A, pivots


def rank(M: Sequence[Sequence]) -> int:
    if not M or not M[0]:
        return 0
    return len(row_echelon(M)[1])


def det(M: Sequence[Sequence]) -> Fraction:
    """Determinant over Q by Gaussian elimination."""
    A = [[Fraction(x) for x in row] for row in M]
    n = len(A)
    d = Fraction(1)
    for c in range(n):
        p = next((i for i in range(c, n) if A[i][c] != 0), None)
        if p is None:
            return Fraction(0)
        if p != c:
            A[c], A[p] = A[p], A[c]
            d = -d
        d *= A[c][c]
        for i in range(c + 1, n):
            if A[i][c] != 0:
                f = A[i][c] / A[c][c]
                A[i] = [x - f * y for x, y in zip(A[i], A[c])]
    return d


def solve(A: Sequence[Sequence], b: Sequence) -> list[Fraction] | None:
    """One rational solution of A x = b, or None if inconsistent.

    Free variables are set to zero.
    """
    if not A:
        return None if any(b) else []
    n = len(A[0])
    aug = [list(row) + [bi] for row, bi in zip(A, b)]
    R, piv = row_echelon(aug)
    if n in piv:
        return None
    x = [Fraction(0)] * n
    for i, c in enumerate(piv):
        x[c] = R[i][n]
    return x


def rational_nullspace(M: Sequence[Sequence], n: int) -> list[list[Fraction]]:
    """Basis of {x in Q^n : M x = 0}."""
    if not M:
        return [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    R, piv = row_echelon(M)
    free = [c for c in range(n) if c not in piv]
    basis = []
    for f in free:
        x = [Fraction(0)] * n
        x[f] = Fraction(1)
        for i, c in enumerate(piv):
            x[c] = -R[i][f]
        basis.append(x)
    return basis


def clear_denominators(v: Sequence[Fraction]) -> Vector:
    """Smallest positive multiple of v that is an integer vector, made primitive."""
    den = 1
    for x in v:
        den = den * Fraction(x).denominator // math.gcd(den, Fraction(x).denominator)
    return primitive([int(Fraction(x) * den) for x in v])


# -- Smith normal form ----------------------------------------------------

@dataclass(frozen=True)
class SmithDecomposition:
    """``U @ M @ V == D`` with U, V unimodular and D diagonal."""

    U: Matrix
    D: Matrix
    V: Matrix

    @property
    def diagonal(self) -> list[int]:
        return [self.D[i][i] for i in range(min(len(self.D), len(self.V)))]

    @property
    def rank(self) -> int:
        return sum(1 for d in self.diagonal if d != 0)


def _snf(M: Sequence[Sequence[int]], n_cols: int | None, want_u: bool, want_v: bool):
    A = [list(map(int, row)) for row in M]
    m = len(A)
    n = len(A[0]) if A else (n_cols or 0)
    U = identity(m) if want_u else None
    V = identity(n) if want_v else None

    def swap_rows(i, j):
        A[i], A[j] = A[j], A[i]
        if U is not None:
            U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for row in A:
            row[i], row[j] = row[j], row[i]
        if V is not None:
            for row in V:
                row[i], row[j] = row[j], row[i]

    def add_row(dst, src, q):
        # row dst += q * row src
        ra, rs = A[dst], A[src]
        for k in range(n):
            if rs[k]:
                ra[k] += q * rs[k]
        if U is not None:
            ua, us = U[dst], U[src]
            for k in range(m):
                if us[k]:
                    ua[k] += q * us[k]

    def add_col(dst, src, q):
        for row in A:
            if row[src]:
                row[dst] += q * row[src]
        if V is not None:
            for row in V:
                if row[src]:
                    row[dst] += q * row[src]

    t = 0
    while t < min(m, n):
        best = None
        for i in range(t, m):
            row = A[i]
            for j in range(t, n):
                x = row[j]
                if x and (best is None or abs(x) < best[0]):
                    best = (abs(x), i, j)
                    if best[0] == 1:
                        break
            if best is not None and best[0] == 1:
                break
        if best is None:
            break
        _, i, j = best
        swap_rows(t, i)
        swap_cols(t, j)
        while True:
            clean = True
            p = A[t][t]
            for i in range(t + 1, m):
                if A[i][t]:
                    add_row(i, t, -(A[i][t] // p))
                    if A[i][t]:
                        swap_rows(t, i)
                        clean = False
                        break
            if not clean:
                continue
            p = A[t][t]
            for j in range(t + 1, n):
                if A[t][j]:
                    add_col(j, t, -(A[t][j] // p))
                    if A[t][j]:
                        swap_cols(t, j)
                        clean = False
                        break
            if not clean:
                continue
            p = A[t][t]
            bad = next((i for i in range(t + 1, m)
                        if any(A[i][j] % p for j in range(t + 1, n))), None)
            if bad is None:
                break
            add_row(t, bad, 1)
        if A[t][t] < 0:
            A[t] = [-x for x in A[t]]
            if U is not None:
                U[t] = [-x for x in U[t]]
        t += 1
    return U, A, V


def smith_normal_form(M: Sequence[Sequence[int]], n_cols: int | None = None) -> SmithDecomposition:
    """Smith normal form with transforms: ``U @ M @ V == D``.

    ``n_cols`` is only needed for matrices with zero rows.
    """
    U, D, V = _snf(M, n_cols, True, True)
    return SmithDecomposition(U, D, V)


def invariant_factors(M: Sequence[Sequence[int]]) -> list[int]:
    """Nonzero diagonal entries of the Smith form, d1 | d2 | ..."""
    _, D, _ = _snf(M, None, False, False)
    return [D[i][i] for i in range(min(len(D), len(D[0]) if D else 0)) if D[i][i]]


# -- Hermite normal form ----------------------------------------------------

def hermite_normal_form(M: Sequence[Sequence[int]], n_cols: int | None = None) -> tuple[Matrix, Matrix]:
    """Column-style HNF.  Returns (H, W) with ``H == M @ W``.

    Nonzero columns of H come first; each has its pivot (first nonzero
    entry, positive) strictly below the previous one.
    """
    H = [list(map(int, row)) for row in M]
    m = len(H)
    n = len(H[0]) if H else (n_cols or 0)
    W = identity(n)

    def col_op(a, b, p, q, r, s):
        # (col a, col b) <- (p*a + q*b, r*a + s*b)
        for X in (H, W):
            for row in X:
                x, y = row[a], row[b]
                if x or y:
                    row[a], row[b] = p * x + q * y, r * x + s * y

    k = 0
    for i in range(m):
        if k >= n:
            break
        for j in range(k + 1, n):
            b = H[i][j]
            if b == 0:
                continue
            a = H[i][k]
            g, s, t = xgcd(a, b)
            col_op(k, j, s, t, -b // g, a // g)
        p = H[i][k]
        if p == 0:
            continue
        if p < 0:
            for X in (H, W):
                for row in X:
                    row[k] = -row[k]
            p = -p
        for j in range(k):
            q = H[i][j] // p
            if q:
                for X in (H, W):
                    for row in X:
                        if row[k]:
                            row[j] -= q * row[k]
        k += 1
    return H, W


def lattice_hnf_basis(gens: Sequence[Sequence[int]], n: int) -> list[Vector]:
    """Canonical basis (HNF columns) of the lattice generated by ``gens``."""
    H, _ = hermite_normal_form(columns_to_matrix(gens, n), n_cols=len(gens))
    cols = transpose(H, len(gens)) if n else [[] for _ in gens]
    return [tuple(c) for c in cols if any(c)]


# -- lattices ---------------------------------------------------------------

@dataclass(frozen=True)
class GroupStructure:
    """A finitely generated abelian group Z^rank + sum Z/t_i."""

    rank: int
    torsion: tuple[int, ...] = field(default=())

    def __str__(self) -> str:
        parts = [f"Z^{self.rank}"] if self.rank else []
        parts += [f"Z/{t}" for t in self.torsion]
        return " + ".join(parts) if parts else "0"


def kernel_basis(M: Sequence[Sequence[int]], n_cols: int | None = None) -> list[Vector]:
    """Basis of the integer kernel {x in Z^n : M x = 0}.

    The returned vectors generate the full (saturated) kernel lattice.
    """
    n = len(M[0]) if M else (n_cols or 0)
    if not M:
        return [tuple(int(i == j) for i in range(n)) for j in range(n)]
    _, D, V = _snf(M, n, False, True)
    r = sum(1 for i in range(min(len(D), n)) if D[i][i])
    return [tuple(V[i][j] for i in range(n)) for j in range(r, n)]


def cokernel_structure(M: Sequence[Sequence[int]], n_rows: int | None = None) -> GroupStructure:
    """Structure of Z^rows / (column span of M)."""
    m = len(M) if M else (n_rows or 0)
    if not M or not M[0]:
        return GroupStructure(m, ())
    factors = invariant_factors(M)
    return GroupStructure(m - len(factors), tuple(d for d in factors if d > 1))


def lattice_index(n: int, gens: Sequence[Sequence[int]]) -> int | float:
    """Index of the lattice spanned by ``gens`` in Z^n; ``math.inf`` if not full rank."""
    if n == 0:
        return 1
    if len(gens) < n:
        return math.inf
    factors = invariant_factors(columns_to_matrix(gens, n))
    if len(factors) < n:
        return math.inf
    return math.prod(factors)


def saturate(gens: Sequence[Sequence[int]], n: int) -> list[Vector]:
    """Basis of (Q-span of gens) intersected with Z^n."""
    gens = [g for g in gens if any(g)]
    if not gens:
        return []
    dec = smith_normal_form(columns_to_matrix(gens, n))
    r = dec.rank
    Uinv = unimodular_inverse(dec.U)
    return [tuple(Uinv[i][j] for i in range(n)) for j in range(r)]


def unimodular_inverse(U: Sequence[Sequence[int]]) -> Matrix:
    n = len(U)
    aug = [list(row) + [int(i == j) for j in range(n)] for i, row in enumerate(U)]
    R, piv = row_echelon(aug)
    if piv[:n] != list(range(n)):
        raise ValueError("matrix is singular")
    inv = [[R[i][n + j] for j in range(n)] for i in range(n)]
    if any(x.denominator != 1 for row in inv for x in row):
        raise ValueError("matrix is not unimodular")
    return [[int(x) for x in row] for row in inv]


def orthogonal_lattice(gens: Sequence[Sequence[int]], n: int) -> list[Vector]:
    """Basis of {u in Z^n : <u, g> = 0 for all g}, e.g. M(sigma) from the rays of sigma."""
    return kernel_basis([list(g) for g in gens], n_cols=n) if gens else kernel_basis([], n)


def complement_basis(sub: Sequence[Sequence[int]], n: int) -> tuple[Matrix, Matrix]:
    """For a saturated sublattice S, return (P, Q).

    P is an (n - r) x n integer matrix whose rows give coordinates on
    Z^n / S; Q is n x (n - r) with P @ Q == I, a section of the
    projection.  Both come from one unimodular change of basis.
    """
    r = len(sub)
    if r == 0:
        return identity(n), identity(n)
    dec = smith_normal_form(columns_to_matrix(sub, n))
    if dec.diagonal[:r] != [1] * r or dec.rank != r:
        raise ValueError("sublattice is not saturated or generators are dependent")
    U = dec.U
    Uinv = unimodular_inverse(U)
    P = [list(U[i]) for i in range(r, n)]
    Q = [[Uinv[i][j] for j in range(r, n)] for i in range(n)]
    return P, Q
