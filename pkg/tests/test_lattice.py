import math

import pytest
from hypothesis import given, settings, strategies as st

from oracles import exhaustive_kernel_check, sympy_det, sympy_invariants
from toricchow.lattice import (
    GroupStructure, cokernel_structure, complement_basis, det, hermite_normal_form, invariant_factors,
    kernel_basis, lattice_index, matmul, orthogonal_lattice, primitive, rank, saturate,
    smith_normal_form, solve, unimodular_inverse, xgcd,
)

entries = st.integers(-6, 6)


def matrices(max_rows=4, max_cols=4):
    return st.integers(1, max_rows).flatmap(
        lambda r: st.integers(1, max_cols).flatmap(
            lambda c: st.lists(st.lists(entries, min_size=c, max_size=c), min_size=r, max_size=r)))


@given(matrices())
@settings(max_examples=150, deadline=None)
def test_smith_decomposition(M):
    dec = smith_normal_form(M)
    assert matmul(matmul(dec.U, M), dec.V) == dec.D
    assert abs(det(dec.U)) == 1 and abs(det(dec.V)) == 1
    diag = dec.diagonal
    for i, row in enumerate(dec.D):
        for j, x in enumerate(row):
            if i != j:
                assert x == 0
    nz = [d for d in diag if d]
    assert all(d > 0 for d in nz)
    assert all(b % a == 0 for a, b in zip(nz, nz[1:]))
    assert diag[:len(nz)] == nz  # zeros come last


@given(matrices())
@settings(max_examples=150, deadline=None)
def test_invariant_factors_against_sympy(M):
    assert invariant_factors(M) == sympy_invariants(M)


@given(matrices(3, 3))
@settings(max_examples=60, deadline=None)
def test_kernel_basis_generates(M):
    K = kernel_basis(M)
    assert len(K) == len(M[0]) - rank(M)
    for k in K:
        assert all(sum(a * b for a, b in zip(row, k)) == 0 for row in M)
    assert exhaustive_kernel_check(M, K, bound=2)


@given(matrices())
@settings(max_examples=100, deadline=None)
def test_hermite_form(M):
    H, W = hermite_normal_form(M)
    assert matmul(M, W) == H
    assert abs(det(W)) == 1
    last = -1
    for j in range(len(H[0])):
        col = [H[i][j] for i in range(len(H))]
        if not any(col):
            assert all(not any(H[i][jj] for i in range(len(H))) for jj in range(j, len(H[0])))
            break
        p = next(i for i, x in enumerate(col) if x)
        assert p > last and col[p] > 0
        last = p


@given(st.lists(st.lists(entries, min_size=3, max_size=3), min_size=3, max_size=5))
@settings(max_examples=100, deadline=None)
def test_lattice_index_matches_determinant(gens):
    idx = lattice_index(3, gens)
    if rank(gens) < 3:
        assert idx == math.inf
        return
    # gcd of maximal minors
    from itertools import combinations
    g = 0
    for sub in combinations(gens, 3):
        g = math.gcd(g, abs(sympy_det(list(sub))))
    assert idx == g


@given(st.lists(st.lists(entries, min_size=3, max_size=3), min_size=1, max_size=3))
@settings(max_examples=100, deadline=None)
def test_saturation_and_complement(gens):
    sat = saturate(gens, 3)
    assert len(sat) == rank(gens)
    if not sat:
        return
    # saturated: the basis extends to a unimodular matrix
    P, Q = complement_basis(sat, 3)
    assert matmul(P, Q) == [[int(i == j) for j in range(len(P))] for i in range(len(P))]
    for s in sat:
        assert all(sum(p * x for p, x in zip(row, s)) == 0 for row in P)
    for g in gens:
        assert solve([[s[i] for s in sat] for i in range(3)], g) is not None


def test_index_and_cokernel_examples():
    assert lattice_index(2, [(2, 0), (0, 3)]) == 6
    assert lattice_index(2, [(1, 1), (1, -1)]) == 2
    assert cokernel_structure([[2, 0], [0, 3]]) == GroupStructure(0, (6,))
    assert str(cokernel_structure([[2], [0]])) == "Z^1 + Z/2"
    assert str(GroupStructure(0)) == "0"


def test_small_helpers():
    assert primitive((4, -6, 0)) == (2, -3, 0)
    g, x, y = xgcd(12, 18)
    assert g == 6 and 12 * x + 18 * y == 6
    assert orthogonal_lattice([(1, 1, 0)], 3) and all(
        u[0] + u[1] == 0 for u in orthogonal_lattice([(1, 1, 0)], 3))
    assert unimodular_inverse([[2, 1], [1, 1]]) == [[1, -1], [-1, 2]]
    with pytest.raises(ValueError):
        unimodular_inverse([[2, 0], [0, 1]])
    with pytest.raises(ValueError):
        complement_basis([(2, 0)], 2)


def test_small_kernels_exhaustive():
    for M in ([[1, 2, 3]], [[2, 4, 6], [1, 1, 1]], [[0, 0, 0]]):
        assert exhaustive_kernel_check(M, kernel_basis(M))
