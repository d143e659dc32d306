"""Chain complexes of free f.g. Z-modules in non-negative degrees.

A complex truncated at degree D only certifies homology through D-1;
asking for degree D raises instead of silently answering wrong.
Double complexes store commuting squares; the Koszul sign appears only
when the total complex is formed.
"""

from __future__ import annotations

import json

from .errors import DegreeOutOfRange, NotAComplex, ShapeMismatch
from .intlinalg import FgAbGroup, IntMatrix, homology_group, kernel_basis


class ChainComplex:
    """ranks[n] for 0 <= n <= D; diffs[n-1] : degree n -> degree n-1."""

    __slots__ = ("ranks", "diffs")

    def __init__(self, ranks, diffs, validate=True):
        self.ranks = tuple(int(r) for r in ranks)
        self.diffs = tuple(diffs)
        if len(self.ranks) == 0:
            raise ShapeMismatch("a complex needs at least degree 0")
        if len(self.diffs) != len(self.ranks) - 1:
            raise ShapeMismatch(
                f"{len(self.ranks)} ranks need {len(self.ranks) - 1} differentials, got {len(self.diffs)}")
        for n, d in enumerate(self.diffs, start=1):
            if (d.rows, d.cols) != (self.ranks[n - 1], self.ranks[n]):
                raise ShapeMismatch(
                    f"diff {n} is {d.rows}x{d.cols}, expected {self.ranks[n-1]}x{self.ranks[n]}")
        if validate:
            for n in range(1, len(self.diffs)):
                prod = self.diffs[n - 1].mul(self.diffs[n])
                if not prod.is_zero():
                    wit = next((i, j) for i in range(prod.rows)
                               for j in range(prod.cols) if prod.data[i][j])
                    raise NotAComplex(n + 1, wit)

    @property
    def truncation_degree(self):
        return len(self.ranks) - 1

    def rank(self, n):
        return self.ranks[n] if 0 <= n <= self.truncation_degree else 0

    def diff(self, n):
        """Differential out of degree n (n >= 1)."""
        return self.diffs[n - 1]

    def __eq__(self, other):
        return (isinstance(other, ChainComplex) and self.ranks == other.ranks
                and self.diffs == other.diffs)

    def __repr__(self):
        return f"ChainComplex(ranks={list(self.ranks)})"

    def homology(self, n):
        if not 0 <= n <= self.truncation_degree - 1:
            raise DegreeOutOfRange(
                f"degree {n} not certified by truncation {self.truncation_degree}")
        d_out = self.diffs[n - 1] if n >= 1 else IntMatrix.zeros(0, self.ranks[0])
        d_in = self.diffs[n]
        return homology_group(d_out, d_in)

    def homology_list(self, upto=None):
        top = self.truncation_degree - 1 if upto is None else upto
        return [self.homology(n) for n in range(top + 1)]

    def is_exact_through(self, top):
        """H_0 = ... = H_top = 0?"""
        return all(self.homology(n).is_trivial for n in range(top + 1))

    def has_point_homology(self, top):
        hs = self.homology_list(top)
        return hs[0] == FgAbGroup(1) and all(h.is_trivial for h in hs[1:])

    def to_json(self):
        return {"ranks": list(self.ranks), "diffs": [d.entries for d in self.diffs]}

    @classmethod
    def from_json(cls, obj):
        ranks = obj["ranks"]
        diffs = [IntMatrix.from_flat(ranks[n - 1], ranks[n], flat)
                 for n, flat in enumerate(obj["diffs"], start=1)]
        return cls(ranks, diffs)

    def dumps(self):
        return json.dumps(self.to_json(), sort_keys=True)

    @classmethod
    def loads(cls, s):
        return cls.from_json(json.loads(s))


def make_complex(ranks, diffs):
    """Validated constructor; rejects shape errors and d.d != 0."""
    return ChainComplex(ranks, diffs)


def zero_complex(upto=0):
    return ChainComplex([0] * (upto + 1), [IntMatrix.zeros(0, 0)] * upto)


def concentrated(group_rank, degree=0, upto=None):
    """Z^rank concentrated in one degree, truncated at upto (default degree)."""
    top = degree if upto is None else upto
    ranks = [group_rank if n == degree else 0 for n in range(top + 1)]
    diffs = [IntMatrix.zeros(ranks[n - 1], ranks[n]) for n in range(1, top + 1)]
    return ChainComplex(ranks, diffs)


def tensor(c, d, upto=None):
    """Degreewise tensor with Koszul signs: d(x (x) y) = dx (x) y + (-1)^i x (x) dy.

    Basis of (C (x) D)_n ordered by (i, p, q) with i + j = n, i ascending,
    p a degree-i basis index of C and q a degree-j basis index of D.
    """
    top = c.truncation_degree + d.truncation_degree if upto is None else upto
    if top > c.truncation_degree + d.truncation_degree:
        raise DegreeOutOfRange("factors not truncated far enough for requested degree")

    def basis(n):
        out = []
        for i in range(max(0, n - d.truncation_degree), min(n, c.truncation_degree) + 1):
            j = n - i
            for p in range(c.ranks[i]):
                for q in range(d.ranks[j]):
                    out.append((i, p, q))
        return out

    bases = [basis(n) for n in range(top + 1)]
    index = [{b: k for k, b in enumerate(bs)} for bs in bases]
    ranks = [len(bs) for bs in bases]
    diffs = []
    for n in range(1, top + 1):
        rows = [[0] * ranks[n] for _ in range(ranks[n - 1])]
        tgt = index[n - 1]
        for col, (i, p, q) in enumerate(bases[n]):
            j = n - i
            if i >= 1:
                dc = c.diff(i)
                for pp in range(c.ranks[i - 1]):
                    a = dc.data[pp][p]
                    if a:
                        rows[tgt[(i - 1, pp, q)]][col] += a
            if j >= 1:
                dd = d.diff(j)
                sign = -1 if i % 2 else 1
                for qq in range(d.ranks[j - 1]):
                    a = dd.data[qq][q]
                    if a:
                        rows[tgt[(i, p, qq)]][col] += sign * a
        diffs.append(IntMatrix(ranks[n - 1], ranks[n], rows))
    return ChainComplex(ranks, diffs)


class DoubleComplex:
    """First-quadrant double complex with commuting squares.

    ranks[i][j]; d_h[i][j] : (i,j) -> (i-1,j); d_v[i][j] : (i,j) -> (i,j-1).
    """

    __slots__ = ("ranks", "d_h", "d_v", "max_i", "max_j")

    def __init__(self, ranks, d_h, d_v, validate=True):
        self.ranks = [list(map(int, row)) for row in ranks]
        self.max_i = len(self.ranks) - 1
        self.max_j = len(self.ranks[0]) - 1 if self.ranks else -1
        self.d_h = d_h
        self.d_v = d_v
        if validate:
            self._validate()

    def _validate(self):
        mi, mj = self.max_i, self.max_j
        for i in range(1, mi + 1):
            for j in range(mj + 1):
                m = self.d_h[i][j]
                if (m.rows, m.cols) != (self.ranks[i - 1][j], self.ranks[i][j]):
                    raise ShapeMismatch(f"d_h[{i}][{j}] shape")
        for i in range(mi + 1):
            for j in range(1, mj + 1):
                m = self.d_v[i][j]
                if (m.rows, m.cols) != (self.ranks[i][j - 1], self.ranks[i][j]):
                    raise ShapeMismatch(f"d_v[{i}][{j}] shape")
        for i in range(2, mi + 1):
            for j in range(mj + 1):
                if not self.d_h[i - 1][j].mul(self.d_h[i][j]).is_zero():
                    raise NotAComplex(i, msg=f"row {j} is not a complex at {i}")
        for i in range(mi + 1):
            for j in range(2, mj + 1):
                if not self.d_v[i][j - 1].mul(self.d_v[i][j]).is_zero():
                    raise NotAComplex(j, msg=f"column {i} is not a complex at {j}")
        for i in range(1, mi + 1):
            for j in range(1, mj + 1):
                left = self.d_h[i][j - 1].mul(self.d_v[i][j])
                right = self.d_v[i - 1][j].mul(self.d_h[i][j])
                if left != right:
                    raise NotAComplex((i, j), msg=f"square at ({i},{j}) does not commute")

    def row_complex(self, j):
        return ChainComplex([self.ranks[i][j] for i in range(self.max_i + 1)],
                            [self.d_h[i][j] for i in range(1, self.max_i + 1)])

    def column_complex(self, i):
        return ChainComplex([self.ranks[i][j] for j in range(self.max_j + 1)],
                            [self.d_v[i][j] for j in range(1, self.max_j + 1)])


def total_complex(dc):
    """Tot with d = d_h + (-1)^i d_v on the (i, j) summand.

    Anticommutation of the signed differential is what turns commuting
    squares into d.d = 0; this is re-validated on the output.
    """
    top = dc.max_i + dc.max_j
    bases = []
    for n in range(top + 1):
        bs = []
        for i in range(max(0, n - dc.max_j), min(n, dc.max_i) + 1):
            j = n - i
            for p in range(dc.ranks[i][j]):
                bs.append((i, j, p))
        bases.append(bs)
    index = [{b: k for k, b in enumerate(bs)} for bs in bases]
    ranks = [len(bs) for bs in bases]
    diffs = []
    for n in range(1, top + 1):
        rows = [[0] * ranks[n] for _ in range(ranks[n - 1])]
        tgt = index[n - 1]
        for col, (i, j, p) in enumerate(bases[n]):
            if i >= 1:
                m = dc.d_h[i][j]
                for pp in range(m.rows):
                    a = m.data[pp][p]
                    if a:
                        rows[tgt[(i - 1, j, pp)]][col] += a
            if j >= 1:
                m = dc.d_v[i][j]
                sign = -1 if i % 2 else 1
                for pp in range(m.rows):
                    a = m.data[pp][p]
                    if a:
                        rows[tgt[(i, j - 1, pp)]][col] += sign * a
        diffs.append(IntMatrix(ranks[n - 1], ranks[n], rows))
    return ChainComplex(ranks, diffs)


class ChainMap:
    """Degreewise map of complexes; degree range is the common truncation."""

    __slots__ = ("source", "target", "components")

    def __init__(self, source, target, components):
        self.source = source
        self.target = target
        self.components = tuple(components)
        top = min(source.truncation_degree, target.truncation_degree)
        if len(self.components) != top + 1:
            raise ShapeMismatch(f"need {top + 1} components, got {len(self.components)}")
        for n, f in enumerate(self.components):
            if (f.rows, f.cols) != (target.ranks[n], source.ranks[n]):
                raise ShapeMismatch(f"component {n} shape")

    @property
    def top_degree(self):
        return len(self.components) - 1

    def __eq__(self, other):
        return (isinstance(other, ChainMap) and self.source == other.source
                and self.target == other.target and self.components == other.components)


class ChainHomotopy:
    """components[n] : source degree n -> target degree n+1."""

    __slots__ = ("source", "target", "components")

    def __init__(self, source, target, components):
        self.source = source
        self.target = target
        self.components = tuple(components)
        for n, h in enumerate(self.components):
            if (h.rows, h.cols) != (target.rank(n + 1), source.ranks[n]):
                raise ShapeMismatch(f"homotopy component {n} shape")


def verify_chain_map(f):
    """First degree where f fails to commute with d, or None when OK."""
    for n in range(1, f.top_degree + 1):
        if f.components[n - 1].mul(f.source.diff(n)) != f.target.diff(n).mul(f.components[n]):
            return n
    return None


def verify_homotopy(h, f, g):
    """Check f_n - g_n = d_{n+1} h_n + h_{n-1} d_n degreewise.

    At n = 0 the identity degenerates to f_0 - g_0 = d_1 h_0. Returns the
    first failing degree, or None when all checkable degrees pass.
    """
    if f.source != g.source or f.target != g.target:
        raise ShapeMismatch("homotopy endpoints disagree")
    top = min(f.top_degree, g.top_degree, len(h.components) - 1,
              f.target.truncation_degree - 1)
    for n in range(top + 1):
        lhs = f.components[n] - g.components[n]
        rhs = f.target.diff(n + 1).mul(h.components[n])
        if n >= 1:
            rhs = rhs + h.components[n - 1].mul(f.source.diff(n))
        if lhs != rhs:
            return n
    return None


def chain_map_group(c, d, degree_bound):
    """Degree-0 chain maps c -> d vanishing above degree_bound.

    Solved as the integer kernel of the linearized commutation
    constraints; returns (FgAbGroup, basis of ChainMaps).
    """
    top = min(degree_bound, c.truncation_degree, d.truncation_degree)
    shapes = [(d.ranks[n], c.ranks[n]) for n in range(top + 1)]
    offsets = []
    total = 0
    for r, cc in shapes:
        offsets.append(total)
        total += r * cc
    rows = []
    max_con = min(c.truncation_degree, d.truncation_degree)
    for n in range(1, max_con + 1):
        # f_{n-1} d^c_n - d^d_n f_n = 0, with f_k = 0 above top
        dc = c.diff(n)
        dd = d.diff(n)
        if n - 1 > top:
            continue
        for i in range(d.ranks[n - 1]):
            for j in range(c.ranks[n]):
                row = [0] * total
                if n - 1 <= top:
                    r0, c0 = shapes[n - 1]
                    for k in range(c.ranks[n - 1]):
                        if dc.data[k][j]:
                            row[offsets[n - 1] + i * c0 + k] += dc.data[k][j]
                if n <= top:
                    r1, c1 = shapes[n]
                    for k in range(d.ranks[n]):
                        if dd.data[i][k]:
                            row[offsets[n] + k * c1 + j] -= dd.data[i][k]
                if any(row):
                    rows.append(row)
    if total == 0:
        return FgAbGroup(0), []
    mat = IntMatrix.from_rows(rows) if rows else IntMatrix.zeros(0, total)
    ker = kernel_basis(mat)
    basis = []
    full = min(c.truncation_degree, d.truncation_degree)
    for b in range(ker.cols):
        comps = []
        for n in range(full + 1):
            if n <= top:
                r, cc = shapes[n]
                off = offsets[n]
                comps.append(IntMatrix(
                    r, cc, [[ker.data[off + i * cc + j][b] for j in range(cc)] for i in range(r)]))
            else:
                comps.append(IntMatrix.zeros(d.ranks[n], c.ranks[n]))
        basis.append(ChainMap(c, d, comps))
    return FgAbGroup(ker.cols), basis
