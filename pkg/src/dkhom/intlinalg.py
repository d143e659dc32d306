"""Exact linear algebra over Z: Smith normal form, kernels, cokernels,
and finitely generated abelian groups as invariant factors.

Everything runs on Python ints, so there is no overflow; matrices are
dense, which is fine at desk scale.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd

from .errors import CompositionNotZero, ShapeMismatch


class IntMatrix:
    """Immutable dense integer matrix, row-major."""

    __slots__ = ("rows", "cols", "data")

    def __init__(self, rows, cols, data):
        data = tuple(tuple(int(x) for x in row) for row in data)
        if len(data) != rows or any(len(r) != cols for r in data):
            raise ShapeMismatch(f"expected {rows}x{cols}, got ragged data")
        self.rows = rows
        self.cols = cols
        self.data = data

    @classmethod
    def from_rows(cls, data):
        rows = len(data)
        cols = len(data[0]) if rows else 0
        return cls(rows, cols, data)

    @classmethod
    def from_flat(cls, rows, cols, entries):
        if len(entries) != rows * cols:
            raise ShapeMismatch("entries.len != rows*cols")
        return cls(rows, cols, [entries[i * cols:(i + 1) * cols] for i in range(rows)])

    @classmethod
    def zeros(cls, rows, cols):
        return cls(rows, cols, [[0] * cols for _ in range(rows)])

    @classmethod
    def identity(cls, n):
        return cls(n, n, [[1 if i == j else 0 for j in range(n)] for i in range(n)])

    @property
    def entries(self):
        """Row-major flat entry list (JSON form)."""
        return [x for row in self.data for x in row]

    def __eq__(self, other):
        return (isinstance(other, IntMatrix) and self.rows == other.rows
                and self.cols == other.cols and self.data == other.data)

    def __hash__(self):
        return hash((self.rows, self.cols, self.data))

    def __repr__(self):
        return f"IntMatrix({self.rows}x{self.cols})"

    def entry(self, i, j):
        return self.data[i][j]

    def is_zero(self):
        return all(x == 0 for row in self.data for x in row)

    def transpose(self):
        return IntMatrix(self.cols, self.rows,
                         [[self.data[i][j] for i in range(self.rows)] for j in range(self.cols)])

    def __neg__(self):
        return IntMatrix(self.rows, self.cols, [[-x for x in row] for row in self.data])

    def __add__(self, other):
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise ShapeMismatch("matrix addition shape mismatch")
        return IntMatrix(self.rows, self.cols,
                         [[a + b for a, b in zip(ra, rb)] for ra, rb in zip(self.data, other.data)])

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c):
        return IntMatrix(self.rows, self.cols, [[c * x for x in row] for row in self.data])

    def mul(self, other):
        """Matrix product, skipping zero entries of the left factor."""
        if self.cols != other.rows:
            raise ShapeMismatch(f"cannot multiply {self.rows}x{self.cols} by {other.rows}x{other.cols}")
        out = [[0] * other.cols for _ in range(self.rows)]
        odata = other.data
        for i, row in enumerate(self.data):
            oi = out[i]
            for k, a in enumerate(row):
                if a:
                    rk = odata[k]
                    for j, b in enumerate(rk):
                        if b:
                            oi[j] += a * b
        return IntMatrix(self.rows, other.cols, out)

    __mul__ = mul
    __matmul__ = mul

    def mul_vec(self, vec):
        if len(vec) != self.cols:
            raise ShapeMismatch("vector length mismatch")
        return [sum(a * v for a, v in zip(row, vec) if a) for row in self.data]

    def hstack(self, other):
        if self.rows != other.rows:
            raise ShapeMismatch("hstack row mismatch")
        return IntMatrix(self.rows, self.cols + other.cols,
                         [ra + rb for ra, rb in zip(self.data, other.data)])

    def vstack(self, other):
        if self.cols != other.cols:
            raise ShapeMismatch("vstack col mismatch")
        return IntMatrix(self.rows + other.rows, self.cols, self.data + other.data)

    def column(self, j):
        return [row[j] for row in self.data]

    def submatrix(self, row_idx, col_idx):
        return IntMatrix(len(row_idx), len(col_idx),
                         [[self.data[i][j] for j in col_idx] for i in row_idx])


@dataclass(frozen=True)
class FgAbGroup:
    """Finitely generated abelian group: free rank plus invariant factors.

    torsion is a divisibility chain d_1 | d_2 | ... with every d_i >= 2.
    """

    free_rank: int
    torsion: tuple = ()

    def __post_init__(self):
        if self.free_rank < 0:
            raise ValueError("negative free rank")
        tor = tuple(int(d) for d in self.torsion)
        for d in tor:
            if d < 2:
                raise ValueError(f"torsion entry {d} < 2")
        for a, b in zip(tor, tor[1:]):
            if b % a != 0:
                raise ValueError(f"broken divisibility chain {tor}")
        object.__setattr__(self, "torsion", tor)

    @property
    def is_trivial(self):
        return self.free_rank == 0 and not self.torsion

    @property
    def is_free(self):
        return not self.torsion

    def __str__(self):
        parts = []
        if self.free_rank == 1:
            parts.append("Z")
        elif self.free_rank > 1:
            parts.append(f"Z^{self.free_rank}")
        parts.extend(f"Z/{d}" for d in self.torsion)
        return " + ".join(parts) if parts else "0"

    def to_json(self):
        return {"free_rank": self.free_rank, "torsion": list(self.torsion)}


ZERO_GROUP = FgAbGroup(0)
Z = FgAbGroup(1)


def _min_abs_pivot(a, t, rows, cols):
    """Position of a minimal-absolute-value nonzero entry of a[t:, t:].

    The minimal pivot keeps intermediate coefficients small; ties break
    towards the top-left for determinism.
    """
    best = None
    best_val = None
    for i in range(t, rows):
        ai = a[i]
        for j in range(t, cols):
            v = ai[j]
            if v:
                av = abs(v)
                if best_val is None or av < best_val:
                    best, best_val = (i, j), av
                    if av == 1:
                        return best
    return best


def smith_normal_form(m):
    """Return (U, D, V) with U*m*V = D, U and V unimodular, D diagonal
    with positive entries satisfying d_1 | d_2 | ... .
    """
    rows, cols = m.rows, m.cols
    a = [list(r) for r in m.data]
    u = [[1 if i == j else 0 for j in range(rows)] for i in range(rows)]
    v = [[1 if i == j else 0 for j in range(cols)] for i in range(cols)]

    def swap_rows(i, k):
        a[i], a[k] = a[k], a[i]
        u[i], u[k] = u[k], u[i]

    def swap_cols(j, k):
        for r in a:
            r[j], r[k] = r[k], r[j]
        for r in v:
            r[j], r[k] = r[k], r[j]

    def add_row(dst, src, q):
        # row dst += q * row src
        asrc, adst = a[src], a[dst]
        for j in range(cols):
            if asrc[j]:
                adst[j] += q * asrc[j]
        usrc, udst = u[src], u[dst]
        for j in range(rows):
            if usrc[j]:
                udst[j] += q * usrc[j]

    def add_col(dst, src, q):
        for r in a:
            if r[src]:
                r[dst] += q * r[src]
        for r in v:
            if r[src]:
                r[dst] += q * r[src]

    t = 0
    while True:
        piv = _min_abs_pivot(a, t, rows, cols)
        if piv is None:
            break
        swap_rows(t, piv[0])
        swap_cols(t, piv[1])
        # clear row and column t; restart if a remainder shrinks the pivot
        dirty = False
        p = a[t][t]
        for i in range(t + 1, rows):
            if a[i][t]:
                q = a[i][t] // p
                add_row(i, t, -q)
                if a[i][t]:
                    dirty = True
        for j in range(t + 1, cols):
            if a[t][j]:
                q = a[t][j] // p
                add_col(j, t, -q)
                if a[t][j]:
                    dirty = True
        if dirty:
            continue
        # pull a non-divisible entry into row t and retry
        p = a[t][t]
        offender = None
        for i in range(t + 1, rows):
            ai = a[i]
            for j in range(t + 1, cols):
                if ai[j] % p:
                    offender = i
                    break
            if offender is not None:
                break
        if offender is not None:
            add_row(t, offender, 1)
            continue
        t += 1
        if t >= min(rows, cols):
            break

    rank = t
    # make diagonal positive
    for i in range(rank):
        if a[i][i] < 0:
            for j in range(cols):
                a[i][j] = -a[i][j]
            for j in range(rows):
                u[i][j] = -u[i][j]
    # enforce the divisibility chain with local 2x2 fixes
    changed = True
    while changed:
        changed = False
        for i in range(rank - 1):
            x, y = a[i][i], a[i + 1][i + 1]
            if y % x:
                changed = True
                g = gcd(x, y)
                lcm = x // g * y
                # diag(x, y) -> diag(g, lcm) via  col_i += col_{i+1}; then reduce
                add_col(i, i + 1, 1)
                # now column i is (x, y); clear with exact Bezout row/col ops
                _two_by_two(a, u, v, i, rows, cols)
                assert a[i][i] in (g, -g) and a[i + 1][i + 1] in (lcm, -lcm)
                if a[i][i] < 0:
                    for j in range(cols):
                        a[i][j] = -a[i][j]
                    for j in range(rows):
                        u[i][j] = -u[i][j]
                if a[i + 1][i + 1] < 0:
                    for j in range(cols):
                        a[i + 1][j] = -a[i + 1][j]
                    for j in range(rows):
                        u[i + 1][j] = -u[i + 1][j]
    return (IntMatrix.from_rows(u) if rows else IntMatrix(0, 0, []),
            IntMatrix(rows, cols, a),
            IntMatrix.from_rows(v) if cols else IntMatrix(0, 0, []))


def _two_by_two(a, u, v, i, rows, cols):
    """Rediagonalize the 2x2 block at (i, i) after a divisibility fix."""
    while a[i + 1][i] or a[i][i + 1]:
        # row step
        if a[i + 1][i]:
            x, y = a[i][i], a[i + 1][i]
            if x and y % x == 0:
                q = y // x
                for j in range(cols):
                    a[i + 1][j] -= q * a[i][j]
                for j in range(rows):
                    u[i + 1][j] -= q * u[i][j]
            else:
                a[i], a[i + 1] = a[i + 1], a[i]
                u[i], u[i + 1] = u[i + 1], u[i]
            continue
        # column step
        if a[i][i + 1]:
            x, y = a[i][i], a[i][i + 1]
            if x and y % x == 0:
                q = y // x
                for r in a:
                    r[i + 1] -= q * r[i]
                for r in v:
                    r[i + 1] -= q * r[i]
            else:
                for r in a:
                    r[i], r[i + 1] = r[i + 1], r[i]
                for r in v:
                    r[i], r[i + 1] = r[i + 1], r[i]


def diagonal_of(d):
    return [d.data[i][i] for i in range(min(d.rows, d.cols))]


def rank(m):
    _, d, _ = smith_normal_form(m)
    return sum(1 for x in diagonal_of(d) if x)


def column_echelon(m):
    """Column echelon form by unimodular column ops: returns (E, V) with
    m*V = E; the zero columns of E mark a kernel basis inside V.
    """
    rows, cols = m.rows, m.cols
    a = [list(r) for r in m.data]
    v = [[1 if i == j else 0 for j in range(cols)] for i in range(cols)]
    lead = 0
    for r in range(rows):
        if lead >= cols:
            break
        # gcd-eliminate across columns lead.. on row r
        while True:
            js = [j for j in range(lead, cols) if a[r][j]]
            if not js:
                break
            jmin = min(js, key=lambda j: abs(a[r][j]))
            if jmin != lead:
                for rr in a:
                    rr[lead], rr[jmin] = rr[jmin], rr[lead]
                for rr in v:
                    rr[lead], rr[jmin] = rr[jmin], rr[lead]
            p = a[r][lead]
            done = True
            for j in range(lead + 1, cols):
                if a[r][j]:
                    q = a[r][j] // p
                    if q:
                        for rr in a:
                            if rr[lead]:
                                rr[j] -= q * rr[lead]
                        for rr in v:
                            if rr[lead]:
                                rr[j] -= q * rr[lead]
                    if a[r][j]:
                        done = False
            if done:
                lead += 1
                break
    return IntMatrix(rows, cols, a), IntMatrix.from_rows(v) if cols else IntMatrix(0, 0, [])


def kernel_basis(m):
    """Basis of the integer kernel of m, as columns, in canonical (HNF) form.

    The kernel of an integer matrix is a saturated sublattice, so the basis
    is unique once put in Hermite form.
    """
    e, v = column_echelon(m)
    zero_cols = [j for j in range(m.cols) if all(e.data[i][j] == 0 for i in range(m.rows))]
    vecs = [v.column(j) for j in zero_cols]
    vecs = hnf_rows(vecs)
    if not vecs:
        return IntMatrix(m.cols, 0, [[] for _ in range(m.cols)])
    return IntMatrix.from_rows(vecs).transpose()


def hnf_rows(vectors):
    """Canonical row-Hermite basis of the lattice spanned by integer vectors.

    Pivots are positive, entries above each pivot are reduced into
    [0, pivot), rows sorted by pivot column. Standard basis vectors come
    out unchanged, which several callers rely on for canonical bases.
    """
    rows = [list(v) for v in vectors if any(v)]
    if not rows:
        return []
    ncols = len(rows[0])
    basis = []
    col = 0
    while rows and col < ncols:
        pool = [r for r in rows if r[col]]
        if not pool:
            col += 1
            continue
        while True:
            pool.sort(key=lambda r: abs(r[col]))
            piv = pool[0]
            done = True
            for r in pool[1:]:
                q = r[col] // piv[col]
                if q:
                    for j in range(col, ncols):
                        r[j] -= q * piv[j]
                if r[col]:
                    done = False
            pool = [piv] + [r for r in pool[1:] if r[col]]
            if done:
                break
        if piv[col] < 0:
            for j in range(ncols):
                piv[j] = -piv[j]
        basis.append(piv)
        rows = [r for r in rows if r is not piv and any(r)]
        col += 1
    # reduce above pivots
    for i in range(len(basis) - 1, -1, -1):
        pcol = next(j for j in range(ncols) if basis[i][j])
        p = basis[i][pcol]
        for k in range(i):
            q = basis[k][pcol] // p
            if q:
                for j in range(ncols):
                    basis[k][j] -= q * basis[i][j]
    return [tuple(r) for r in basis]


def solve_matrix(m, b):
    """Integer solution X of m*X = b, or None when no solution exists."""
    if m.rows != b.rows:
        raise ShapeMismatch("solve: row mismatch")
    u, d, v = smith_normal_form(m)
    ub = u.mul(b)
    r = min(m.rows, m.cols)
    y = [[0] * b.cols for _ in range(m.cols)]
    for i in range(m.rows):
        di = d.data[i][i] if i < r else 0
        for j in range(b.cols):
            t = ub.data[i][j]
            if di == 0:
                if t != 0:
                    return None
            else:
                if t % di:
                    return None
                if i < m.cols:
                    y[i][j] = t // di
    return v.mul(IntMatrix(m.cols, b.cols, y))


def in_column_span(m, vec):
    """Is vec in the integer column span of m?"""
    return solve_matrix(m, IntMatrix(len(vec), 1, [[x] for x in vec])) is not None


def cokernel(m):
    """Z^rows / (integer column span of m) as an FgAbGroup."""
    _, d, _ = smith_normal_form(m)
    diag = [x for x in diagonal_of(d) if x]
    torsion = sorted(x for x in diag if x > 1)
    return FgAbGroup(m.rows - len(diag), tuple(torsion))


def homology_group(d_n, d_n1):
    """ker(d_n) / im(d_n1) as invariant factors plus free rank.

    d_n goes out of the middle group, d_n1 comes into it; the composite
    must vanish.
    """
    if d_n.cols != d_n1.rows:
        raise ShapeMismatch(
            f"homology_group: d_n has {d_n.cols} columns but d_n1 has {d_n1.rows} rows")
    if not d_n.mul(d_n1).is_zero():
        raise CompositionNotZero("d_n * d_n1 != 0")
    k = kernel_basis(d_n)
    if k.cols == 0:
        return ZERO_GROUP
    # write the image inside kernel coordinates; solvable since d.d = 0
    coords = solve_matrix(k, d_n1)
    if coords is None:
        raise CompositionNotZero("image does not lie in the kernel lattice")
    return cokernel(coords)


def matrix_from_columns(cols, nrows):
    """Assemble a matrix from a list of column vectors."""
    if not cols:
        return IntMatrix(nrows, 0, [[] for _ in range(nrows)])
    return IntMatrix(nrows, len(cols), [[c[i] for c in cols] for i in range(nrows)])


def split_quotient(nrows, gens):
    """For a direct-summand sublattice spanned by gens (columns) inside
    Z^nrows, return (P, S): P projects onto a free complement basis,
    S sections it (P*S = I, P*gens = 0).

    Raises CompositionNotZero when the sublattice is not split (the
    quotient would have torsion).
    """
    if gens.cols == 0:
        ident = IntMatrix.identity(nrows)
        return ident, ident
    u, d, _ = smith_normal_form(gens)
    diag = [x for x in diagonal_of(d) if x]
    if any(x != 1 for x in diag):
        raise CompositionNotZero(f"sublattice is not a direct summand: invariants {diag}")
    r = len(diag)
    # rows r.. of u span the complement in transformed coordinates
    p = IntMatrix(nrows - r, nrows, [u.data[i] for i in range(r, nrows)])
    uinv = solve_matrix(u, IntMatrix.identity(nrows))
    s = IntMatrix(nrows, nrows - r, [[uinv.data[i][j] for j in range(r, nrows)] for i in range(nrows)])
    return p, s
