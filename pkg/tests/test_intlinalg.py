import random
from itertools import combinations
from math import gcd

import pytest

from dkhom.errors import CompositionNotZero, ShapeMismatch
from dkhom.intlinalg import (
    FgAbGroup,
    IntMatrix,
    cokernel,
    diagonal_of,
    hnf_rows,
    homology_group,
    kernel_basis,
    smith_normal_form,
    solve_matrix,
    split_quotient,
)


def snf_checks(m):
    u, d, v = smith_normal_form(m)
    assert u.mul(m).mul(v) == d
    diag = diagonal_of(d)
    for i in range(d.rows):
        for j in range(d.cols):
            if i != j:
                assert d.data[i][j] == 0
    nonzero = [x for x in diag if x]
    assert all(x > 0 for x in nonzero)
    for a, b in zip(nonzero, nonzero[1:]):
        assert b % a == 0
    assert abs(det(u)) == 1
    assert abs(det(v)) == 1
    return nonzero


def det(m):
    # exact integer determinant by fraction-free expansion (small sizes only)
    n = m.rows
    if n == 0:
        return 1
    if n == 1:
        return m.data[0][0]
    total = 0
    for j in range(n):
        a = m.data[0][j]
        if a:
            minor = m.submatrix(range(1, n), [k for k in range(n) if k != j])
            total += (-1) ** j * a * det(minor)
    return total


def test_snf_identity():
    ident = IntMatrix.identity(3)
    u, d, v = smith_normal_form(ident)
    assert d == ident and u == ident and v == ident


def test_snf_zero():
    z = IntMatrix.zeros(2, 3)
    _, d, _ = smith_normal_form(z)
    assert d.is_zero()


def test_snf_2x2_example():
    # oracle: d_1 = gcd of all entries, d_1*d_2 = |det| = 8
    m = IntMatrix.from_rows([[2, 4], [6, 8]])
    nonzero = snf_checks(m)
    entry_gcd = gcd(2, gcd(4, gcd(6, 8)))
    assert nonzero[0] == entry_gcd == 2
    assert nonzero[0] * nonzero[1] == abs(det(m)) == 8
    assert nonzero == [2, 4]


def test_snf_random_with_minor_gcd():
    rng = random.Random(7)
    for _ in range(60):
        rows = rng.randint(1, 6)
        cols = rng.randint(1, 6)
        m = IntMatrix(rows, cols,
                      [[rng.randint(-9, 9) for _ in range(cols)] for _ in range(rows)])
        nonzero = snf_checks(m)
        if rows <= 4 and cols <= 4:
            r = len(nonzero)
            if r:
                minors = []
                for ri in combinations(range(rows), r):
                    for ci in combinations(range(cols), r):
                        minors.append(det(m.submatrix(ri, ci)))
                g = 0
                for x in minors:
                    g = gcd(g, x)
                prod = 1
                for x in nonzero:
                    prod *= x
                assert prod == abs(g)


def test_kernel_basis_examples():
    # frozen expectations from the echelon oracle
    assert kernel_basis(IntMatrix.from_rows([[1, 0], [0, 1]])).cols == 0
    k = kernel_basis(IntMatrix.from_rows([[2, 0], [0, 0]]))
    assert k.cols == 1 and k.column(0) == [0, 1]
    k = kernel_basis(IntMatrix.from_rows([[1, 2], [1, 2]]))
    assert k.cols == 1 and k.column(0) in ([-2, 1], [2, -1])
    k = kernel_basis(IntMatrix.from_rows([[2, 2, 2], [3, 3, 3]]))
    assert k.cols == 2
    m = IntMatrix.from_rows([[2, 2, 2], [3, 3, 3]])
    for j in range(k.cols):
        assert all(x == 0 for x in m.mul_vec(k.column(j)))


def test_kernel_is_saturated():
    rng = random.Random(3)
    for _ in range(40):
        rows, cols = rng.randint(1, 5), rng.randint(1, 5)
        m = IntMatrix(rows, cols,
                      [[rng.randint(-4, 4) for _ in range(cols)] for _ in range(rows)])
        k = kernel_basis(m)
        for j in range(k.cols):
            assert all(x == 0 for x in m.mul_vec(k.column(j)))
        # saturation: the kernel basis extends to a basis of Z^cols
        if k.cols:
            _, d, _ = smith_normal_form(k)
            assert all(x == 1 for x in diagonal_of(d) if x)


def test_solve_matrix():
    m = IntMatrix.from_rows([[2, 0], [0, 3]])
    b = IntMatrix.from_rows([[4], [9]])
    x = solve_matrix(m, b)
    assert m.mul(x) == b
    assert solve_matrix(m, IntMatrix.from_rows([[1], [0]])) is None


def test_cokernel():
    m = IntMatrix.from_rows([[2, 0], [0, 3]])
    assert cokernel(m) == FgAbGroup(0, (6,))
    m = IntMatrix.from_rows([[2, 0], [0, 0]])
    assert cokernel(m) == FgAbGroup(1, (2,))


def test_homology_group_examples():
    z1 = IntMatrix.zeros(1, 1)
    assert homology_group(z1, z1) == FgAbGroup(1)
    # Z <-0- Z <-2- Z : oracle is the SNF of [2]
    assert homology_group(IntMatrix.from_rows([[0]]),
                          IntMatrix.from_rows([[2]])) == FgAbGroup(0, (2,))
    # injective differential kills the middle homology
    assert homology_group(IntMatrix.from_rows([[1]]),
                          IntMatrix.zeros(1, 0)) == FgAbGroup(0)


def test_homology_group_errors():
    with pytest.raises(ShapeMismatch):
        homology_group(IntMatrix.zeros(1, 2), IntMatrix.zeros(1, 1))
    with pytest.raises(CompositionNotZero):
        homology_group(IntMatrix.from_rows([[1]]), IntMatrix.from_rows([[1]]))


def random_unimodular(rng, n):
    m = [[1 if i == j else 0 for j in range(n)] for i in range(n)]
    for _ in range(3 * n):
        i, j = rng.randrange(n), rng.randrange(n)
        if i != j:
            q = rng.randint(-2, 2)
            for k in range(n):
                m[i][k] += q * m[j][k]
    return IntMatrix.from_rows(m)


def test_homology_invariant_under_middle_base_change():
    rng = random.Random(11)
    for _ in range(25):
        mid = rng.randint(1, 4)
        lo, hi = rng.randint(0, 3), rng.randint(0, 3)
        d_in = IntMatrix(mid, hi, [[rng.randint(-3, 3) for _ in range(hi)] for _ in range(mid)])
        # choose d_out with d_out * d_in = 0: rows of d_out from the left kernel
        k = kernel_basis(d_in.transpose())
        rows = []
        for _ in range(lo):
            row = [0] * mid
            for j in range(k.cols):
                c = rng.randint(-2, 2)
                if c:
                    col = k.column(j)
                    row = [a + c * b for a, b in zip(row, col)]
            rows.append(row)
        d_out = IntMatrix(lo, mid, rows) if lo else IntMatrix.zeros(0, mid)
        h = homology_group(d_out, d_in)
        p = random_unimodular(rng, mid)
        pinv = solve_matrix(p, IntMatrix.identity(mid))
        assert homology_group(d_out.mul(pinv), p.mul(d_in)) == h


def test_hnf_rows_canonical_on_coordinate_lattices():
    vecs = [(0, 1, 0, 0), (0, 0, 0, 1)]
    assert hnf_rows(vecs) == [(0, 1, 0, 0), (0, 0, 0, 1)]
    assert hnf_rows([(0, 2, 0), (0, 3, 0)]) == [(0, 1, 0)]


def test_split_quotient():
    gens = IntMatrix.from_rows([[1], [0], [0]])
    p, s = split_quotient(3, gens)
    assert p.mul(s) == IntMatrix.identity(2)
    assert p.mul(gens).is_zero()
    with pytest.raises(CompositionNotZero):
        split_quotient(2, IntMatrix.from_rows([[2], [0]]))


def test_fgabgroup_str_and_validation():
    assert str(FgAbGroup(0)) == "0"
    assert str(FgAbGroup(2, (2, 6))) == "Z^2 + Z/2 + Z/6"
    with pytest.raises(ValueError):
        FgAbGroup(0, (4, 6))
