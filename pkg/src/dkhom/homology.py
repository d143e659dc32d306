"""Homology of presheaves and of small categories through integrators,
the nerve route for finite categories, cohomology through finite-type
duals, hyperhomology of complexes of presheaves, and integrator
comparison.

Homology is only reported through truncation - 1; the tables carry the
validity window and whether the integrator used is verified, so raw
complexes of non-integrators (the cubical counterexample) stay labeled.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .chains import ChainComplex, DoubleComplex, chain_map_group, total_complex
from .errors import BaseMismatch, InfiniteCategory, NotFiniteType, ShapeMismatch
from .intlinalg import FgAbGroup, IntMatrix, homology_group, solve_matrix
from .presheaf import FunctionalPresheaf, constant_z
from .shapecat import chain_is_degenerate, nerve, nerve_face


def same_base(a, b):
    return a is b or a.name == b.name


@dataclass
class HomologyTable:
    degrees: list
    valid_through: int
    integrator_verified: bool
    label: str = ""
    per_degree_notes: dict = field(default_factory=dict)

    def to_json(self):
        return {
            "degrees": [{"n": n, "free_rank": g.free_rank, "torsion": list(g.torsion)}
                        for n, g in enumerate(self.degrees)],
            "valid_through": self.valid_through,
            "integrator_verified": self.integrator_verified,
            "label": self.label,
        }


def presheaf_complex(integ, x):
    """The complex computing H(A, X); returns (complex, verified flag).

    With an unverified integrator the complex is still built but must be
    treated as a raw complex, not homology.
    """
    if not same_base(integ.cat, x.base):
        raise BaseMismatch(f"{x.name} lives on {x.base.name}, not {integ.cat.name}")
    return integ.apply(x), integ.verified


def homology_table(integ, x, upto=None):
    c, verified = presheaf_complex(integ, x)
    top = c.truncation_degree - 1 if upto is None else upto
    groups = [c.homology(n) for n in range(top + 1)]
    return HomologyTable(groups, top, verified,
                         label="" if verified else "raw complex, not homology")


def category_homology(cat, integ, upto=None):
    """H(A, Z) as a list of groups, degrees 0..upto."""
    return homology_table(integ, constant_z(cat), upto).degrees


def nerve_homology(cat, upto):
    """Normalized chains on the nerve: nondegenerate chains with the
    alternating face sum (degenerate faces dropped)."""
    if not cat.is_finite:
        raise InfiniteCategory(f"{cat.name} is not finite")
    top = upto + 1
    bases = []
    for n in range(top + 1):
        if n == 0:
            bases.append(nerve(cat, 0))
        else:
            bases.append([c for c in nerve(cat, n)
                          if not chain_is_degenerate(cat, c)])
    ranks = [len(b) for b in bases]
    diffs = []
    for n in range(1, top + 1):
        idx = {c: i for i, c in enumerate(bases[n - 1])}
        rows = [[0] * ranks[n] for _ in range(ranks[n - 1])]
        for col, chain in enumerate(bases[n]):
            for i in range(n + 1):
                face = nerve_face(cat, chain, i)
                pos = idx.get(face)
                if pos is not None:
                    rows[pos][col] += -1 if i % 2 else 1
        diffs.append(IntMatrix(ranks[n - 1], ranks[n], rows))
    c = ChainComplex(ranks, diffs)
    return [c.homology(n) for n in range(upto + 1)]


def cohomology(integ, y, upto=None):
    """H^*(B, Y) for B the opposite of the integrator's base, via the
    finite-type dual cochain complex (+)_{i in I_n} Y(b_i)."""
    if not integ.is_free:
        raise NotFiniteType(f"{integ.flavor} integrator is not free of finite type")
    cat = integ.cat
    if not (hasattr(y.base, "inner") and same_base(y.base.inner, cat)):
        raise BaseMismatch("Y must live on the opposite of the integrator's base")
    opp = y.base
    degree = integ.degree if upto is None else upto + 1
    degree = min(degree, integ.degree)
    ranks = [sum(y.rank(obj) for _, obj in integ.index_sets[n])
             for n in range(degree + 1)]
    offsets = []
    for n in range(degree + 1):
        offs, t = [], 0
        for _, obj in integ.index_sets[n]:
            offs.append(t)
            t += y.rank(obj)
        offsets.append(offs)
    codiffs = []
    for n in range(1, degree + 1):
        # the cochain differential C^{n-1} -> C^n transposes the block
        # pattern of d_n, applying Y to each coefficient
        rows = [[0] * ranks[n - 1] for _ in range(ranks[n])]
        fm = integ.formal_diffs[n - 1]
        for (j, i), terms in fm.entries.items():
            # phi : a_j -> a_i in A is a morphism b_i -> b_j in B
            for coeff, phi in terms:
                block = y.matrix(Morphism_op(opp, phi))
                for r in range(block.rows):
                    row = rows[offsets[n][i] + r]
                    for c in range(block.cols):
                        if block.data[r][c]:
                            row[offsets[n - 1][j] + c] += coeff * block.data[r][c]
        codiffs.append(IntMatrix(ranks[n], ranks[n - 1], rows))
    top = degree - 1 if upto is None else min(upto, degree - 1)
    out = []
    for n in range(top + 1):
        d_out = codiffs[n] if n < degree else IntMatrix.zeros(0, ranks[n])
        d_in = codiffs[n - 1] if n >= 1 else IntMatrix.zeros(ranks[0], 0)
        out.append(homology_group(d_out, d_in))
    return out


def Morphism_op(opp_cat, phi):
    """phi : a -> b in A, as the morphism b -> a of the opposite."""
    from .shapecat import Morphism
    return Morphism(phi.target, phi.source, phi)


class PresheafComplex:
    """A complex of presheaves: entries X_j with maps X_j -> X_{j-1}
    given per object; naturality and d.d = 0 are validated objectwise."""

    def __init__(self, presheaves, maps):
        self.presheaves = list(presheaves)
        self.maps = list(maps)  # maps[j-1] : X_j -> X_{j-1}, obj -> IntMatrix
        if len(self.maps) != len(self.presheaves) - 1:
            raise ShapeMismatch("presheaf complex shape")

    def component(self, j, a):
        return self.maps[j - 1](a) if callable(self.maps[j - 1]) else self.maps[j - 1][a]

    def validate(self, max_dim=2):
        cat = self.presheaves[0].base
        objs = []
        for d in range(min(max_dim, cat.truncation) + 1):
            objs.extend(cat.objects(d))
        for j in range(1, len(self.presheaves)):
            hi, lo = self.presheaves[j], self.presheaves[j - 1]
            for a in objs:
                m = self.component(j, a)
                if (m.rows, m.cols) != (lo.rank(a), hi.rank(a)):
                    raise ShapeMismatch(f"component {j} at {a}")
            for _, g in cat.generator_list():
                if g.source in objs and g.target in objs:
                    lhs = self.component(j, g.source).mul(hi.matrix(g))
                    rhs = lo.matrix(g).mul(self.component(j, g.target))
                    if lhs != rhs:
                        raise ShapeMismatch(f"naturality fails at {g} in degree {j}")
        for j in range(2, len(self.presheaves)):
            for a in objs:
                if not self.component(j - 1, a).mul(self.component(j, a)).is_zero():
                    raise ShapeMismatch(f"d.d != 0 at {a} in degree {j}")
        return True


def hyperhomology(integ, pc, upto=None):
    """Tot of the double complex obtained by evaluating a free integrator
    on each entry of a complex of presheaves."""
    if not integ.is_free:
        raise NotFiniteType("hyperhomology implemented for free integrators")
    pc.validate()
    cols = [integ.apply(x) for x in pc.presheaves]
    max_i = integ.degree
    max_j = len(pc.presheaves) - 1
    ranks = [[cols[j].ranks[i] for j in range(max_j + 1)] for i in range(max_i + 1)]
    d_h = [[cols[j].diff(i) if i >= 1 else None for j in range(max_j + 1)]
           for i in range(max_i + 1)]

    def vertical(i, j):
        blocks = []
        for _, obj in integ.index_sets[i]:
            blocks.append(pc.component(j, obj))
        rows = sum(b.rows for b in blocks)
        colsn = sum(b.cols for b in blocks)
        out = [[0] * colsn for _ in range(rows)]
        ro = co = 0
        for b in blocks:
            for r in range(b.rows):
                for c in range(b.cols):
                    if b.data[r][c]:
                        out[ro + r][co + c] = b.data[r][c]
            ro += b.rows
            co += b.cols
        return IntMatrix(rows, colsn, out)

    d_v = [[vertical(i, j) if j >= 1 else None for j in range(max_j + 1)]
           for i in range(max_i + 1)]
    dc = DoubleComplex(ranks, d_h, d_v)
    tot = total_complex(dc)
    top = tot.truncation_degree - 1 if upto is None else upto
    return [tot.homology(n) for n in range(top + 1)]


@dataclass
class ComparisonReport:
    ok: bool
    per_degree: list

    def to_json(self):
        return {"ok": self.ok,
                "per_degree": [{"n": n, "left": str(a), "right": str(b),
                                "equal": a == b}
                               for n, (a, b) in enumerate(self.per_degree)]}


def compare_integrators(i1, i2, x, upto=None):
    """Homology groups of presheaf_complex under both integrators must
    agree degreewise."""
    c1, _ = presheaf_complex(i1, x)
    c2, _ = presheaf_complex(i2, x)
    top = min(c1.truncation_degree, c2.truncation_degree) - 1
    if upto is not None:
        top = min(top, upto)
    pairs = [(c1.homology(n), c2.homology(n)) for n in range(top + 1)]
    return ComparisonReport(all(a == b for a, b in pairs), pairs)


def right_adjoint_presheaf(integ, c, degree_bound=None):
    """L^*(C) : a -> Hom(L(a), C) with precomposition action."""
    bound = integ.degree if degree_bound is None else degree_bound
    cache = {}

    def data(a):
        got = cache.get(a)
        if got is None:
            grp, basis = chain_map_group(integ.complex_at(a), c, bound)
            got = cache[a] = (grp, basis)
        return got

    def rank(a):
        return data(a)[0].free_rank

    def vec(chmap):
        out = []
        for comp in chmap.components:
            out.extend(x for row in comp.data for x in row)
        return out

    def matrix(f):
        _, basis_src = data(f.source)
        _, basis_tgt = data(f.target)
        lf = integ.chain_map(f)
        if not basis_src:
            return IntMatrix.zeros(0, len(basis_tgt))
        cols = []
        bmat = IntMatrix.from_rows([vec(b) for b in basis_src]).transpose()
        for g in basis_tgt:
            comps = [g.components[k].mul(lf.components[k])
                     for k in range(len(g.components))]
            target = IntMatrix.from_rows([[x] for x in _flatten(comps)])
            sol = solve_matrix(bmat, target)
            assert sol is not None, "precomposed map leaves the lattice"
            cols.append([sol.data[i][0] for i in range(sol.rows)])
        if not cols:
            return IntMatrix.zeros(len(basis_src), 0)
        return IntMatrix.from_rows(cols).transpose()

    return FunctionalPresheaf(integ.cat, rank, matrix, name="L*(C)")


def _flatten(mats):
    out = []
    for m in mats:
        for row in m.data:
            out.extend(row)
    return out
