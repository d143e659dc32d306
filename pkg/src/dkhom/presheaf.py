"""Abelian presheaves with free finitely generated values.

matrix(f : a -> b) is the matrix of X(f) : X(b) -> X(a), of shape
rank(a) x rank(b). Presheaves are specified on generators (tables) or by
a closure (functional); composite matrices always agree with the
category's relations, which validate() checks.
"""

from __future__ import annotations

import json

from .errors import BaseMismatch, InvalidPresentation, ShapeMismatch
from .intlinalg import FgAbGroup, IntMatrix


class AbPresheaf:
    def __init__(self, base, name="X"):
        self.base = base
        self.name = name
        self._matrix_cache = {}

    def rank(self, a):
        raise NotImplementedError

    def matrix(self, f):
        got = self._matrix_cache.get(f)
        if got is None:
            got = self._matrix(f)
            if (got.rows, got.cols) != (self.rank(f.source), self.rank(f.target)):
                raise ShapeMismatch(
                    f"{self.name}({f}) must be {self.rank(f.source)}x{self.rank(f.target)}")
            self._matrix_cache[f] = got
        return got

    def _matrix(self, f):
        raise NotImplementedError

    def validate(self, max_dim=None):
        """X(id) = id and X(g after f) = X(f) X(g) for every generator g
        and composable morphism f within the truncation; a violation
        names the offending relation."""
        cat = self.base
        bound = cat.truncation if max_dim is None else max_dim
        objs = []
        for d in range(bound + 1):
            objs.extend(cat.objects(d))
        for a in objs:
            if self.matrix(cat.identity(a)) != IntMatrix.identity(self.rank(a)):
                raise InvalidPresentation(f"{self.name}(id_{a}) is not the identity")
        gens = [g for _, g in cat.generator_list()]
        objset = set(objs)
        for g in gens:
            if g.source not in objset or g.target not in objset:
                continue
            for a in objs:
                for f in cat.hom(a, g.source):
                    gf = cat.compose(g, f)
                    if self.matrix(gf) != self.matrix(f).mul(self.matrix(g)):
                        raise InvalidPresentation(
                            f"{self.name} breaks the relation ({g}) after ({f})")
        return True


class FunctionalPresheaf(AbPresheaf):
    def __init__(self, base, rank_fn, matrix_fn, name="X"):
        super().__init__(base, name)
        self._rank_fn = rank_fn
        self._matrix_fn = matrix_fn
        self._rank_cache = {}

    def rank(self, a):
        got = self._rank_cache.get(a)
        if got is None:
            got = self._rank_cache[a] = self._rank_fn(a)
        return got

    def _matrix(self, f):
        return self._matrix_fn(f)


def representable(cat, at):
    """Wh(at) : x -> Z^{Hom(x, at)}; the action is precomposition.

    Built on the representable set presheaf so normalizations can use
    the canonical cell basis.
    """
    from .shapecat import RepresentableSet
    x = FreeAbelianization(RepresentableSet(cat, at))
    x.name = f"Wh({cat.object_name(at)})"
    return x


def constant_z(cat):
    return FunctionalPresheaf(cat, lambda a: 1,
                              lambda f: IntMatrix.identity(1), name="Z")


def zero_presheaf(cat):
    return FunctionalPresheaf(cat, lambda a: 0,
                              lambda f: IntMatrix.zeros(0, 0), name="0")


class FreeAbelianization(AbPresheaf):
    """Z^F for a set presheaf F; keeps F around so normalizations can
    use the canonical cell basis."""

    def __init__(self, f):
        super().__init__(f.base, name=f"Z^({f.name})")
        self.set_presheaf = f

    def rank(self, a):
        return len(self.set_presheaf.elements(a))

    def _matrix(self, f):
        src = self.set_presheaf.elements(f.source)
        tgt = self.set_presheaf.elements(f.target)
        idx = {x: i for i, x in enumerate(src)}
        rows = [[0] * len(tgt) for _ in range(len(src))]
        for j, y in enumerate(tgt):
            rows[idx[self.set_presheaf.action(f, y)]][j] = 1
        return IntMatrix(len(src), len(tgt), rows)


def free_abelianization(f):
    return FreeAbelianization(f)


def restrict(x, u):
    """(u^* x)(a) = x(u a); composite matrices transport along u."""
    return FunctionalPresheaf(
        u.source,
        lambda a: x.rank(u.obj(a)),
        lambda f: x.matrix(u.mor(f)),
        name=f"{u.name}^*({x.name})",
    )


def direct_sum(x, y, name=None):
    if x.base is not y.base and x.base.name != y.base.name:
        raise BaseMismatch("direct sum needs a shared base")

    def rank(a):
        return x.rank(a) + y.rank(a)

    def matrix(f):
        mx, my = x.matrix(f), y.matrix(f)
        rows = []
        for i in range(mx.rows):
            rows.append(list(mx.data[i]) + [0] * my.cols)
        for i in range(my.rows):
            rows.append([0] * mx.cols + list(my.data[i]))
        return IntMatrix(mx.rows + my.rows, mx.cols + my.cols, rows)

    return FunctionalPresheaf(x.base, rank, matrix, name=name or f"{x.name}+{y.name}")


class TablePresheaf(AbPresheaf):
    """Presheaf given by per-object ranks and per-generator matrices;
    matrices of other morphisms are derived by generator closure, and
    every relation within the truncation is checked at load."""

    def __init__(self, base, ranks, gen_matrices, name="X"):
        super().__init__(base, name)
        self._ranks = dict(ranks)
        named = dict(base.generator_list())
        table = {}
        for a in base.all_objects():
            table[base.identity(a)] = IntMatrix.identity(self._ranks.get(a, 0))
        for gname, m in gen_matrices.items():
            if gname not in named:
                raise InvalidPresentation(f"unknown generator {gname}")
            g = named[gname]
            mat = m if isinstance(m, IntMatrix) else IntMatrix.from_rows(m)
            if (mat.rows, mat.cols) != (self._ranks.get(g.source, 0),
                                        self._ranks.get(g.target, 0)):
                raise InvalidPresentation(f"matrix for {gname} has wrong shape")
            table[g] = mat
        for gname, g in base.generator_list():
            if g not in table:
                raise InvalidPresentation(f"missing matrix for generator {gname}")
        self._table = table
        self._close()
        self._check_cover()

    def _close(self):
        base = self.base
        gens = [g for _, g in base.generator_list()]
        work = [m for m in self._table if not base.is_identity(m)]
        idx = 0
        while idx < len(work):
            f = work[idx]
            idx += 1
            mf = self._table[f]
            for g in gens:
                if g.source != f.target:
                    continue
                gf = base.compose(g, f)
                comp = mf.mul(self._table[g])
                old = self._table.get(gf)
                if old is None:
                    self._table[gf] = comp
                    work.append(gf)
                elif old != comp:
                    raise InvalidPresentation(
                        f"{self.name}: relation broken at ({g}) after ({f})")

    def _check_cover(self):
        base = self.base
        for a in base.all_objects():
            for b in base.all_objects():
                for f in base.hom(a, b):
                    if f not in self._table:
                        raise InvalidPresentation(
                            f"generators do not reach {f}")

    def rank(self, a):
        return self._ranks.get(a, 0)

    def _matrix(self, f):
        return self._table[f]

    def to_json(self, cat_spec=None):
        base = self.base
        return {
            "category": cat_spec or base.name,
            "truncation": base.truncation,
            "ranks": {base.object_name(a): self._ranks.get(a, 0)
                      for a in base.all_objects()},
            "generators": {name: [list(row) for row in self._table[g].data]
                           for name, g in base.generator_list()},
        }


def presheaf_from_json(base, obj, name="X"):
    ranks = {base.parse_object(k): v for k, v in obj["ranks"].items()}
    return TablePresheaf(base, ranks, obj["generators"], name=name)


def load_presheaf(base, path):
    with open(path) as fh:
        return presheaf_from_json(base, json.load(fh), name=path)


# ---------------------------------------------------------------------------
# formal sums of representables and their evaluation


class FormalSum:
    """A formal direct sum of representables, as a list of objects."""

    def __init__(self, objects):
        self.objects = list(objects)

    def __len__(self):
        return len(self.objects)

    def __iter__(self):
        return iter(self.objects)


class FormalMatrix:
    """Morphism of formal sums: entry (j, i) is a Z-linear combination of
    category morphisms row_objects[j] -> col_objects[i]."""

    def __init__(self, row_objects, col_objects, entries):
        self.row_objects = list(row_objects)
        self.col_objects = list(col_objects)
        self.entries = {k: list(v) for k, v in entries.items() if v}

    def check(self):
        for (j, i), terms in self.entries.items():
            for _, mor in terms:
                if mor.source != self.row_objects[j] or mor.target != self.col_objects[i]:
                    raise ShapeMismatch(f"formal entry ({j},{i}) has wrong endpoints")
        return True


def addinf_eval(x, l):
    """Evaluate a formal sum: the free group (+) x(a_i), with offsets."""
    offsets = []
    total = 0
    for a in l:
        offsets.append(total)
        total += x.rank(a)
    return FgAbGroup(total), offsets


def push_formal_matrix(x, fm):
    """Apply x linearly to every coefficient of a formal matrix,
    producing the block integer matrix of (+) x(a_i) -> (+) x(a_j)."""
    row_ranks = [x.rank(a) for a in fm.row_objects]
    col_ranks = [x.rank(a) for a in fm.col_objects]
    row_off = []
    t = 0
    for r in row_ranks:
        row_off.append(t)
        t += r
    nrows = t
    col_off = []
    t = 0
    for r in col_ranks:
        col_off.append(t)
        t += r
    ncols = t
    out = [[0] * ncols for _ in range(nrows)]
    for (j, i), terms in fm.entries.items():
        block = None
        for coeff, mor in terms:
            m = x.matrix(mor)
            block = m.scale(coeff) if block is None else block + m.scale(coeff)
        if block is None:
            continue
        for r in range(block.rows):
            row = out[row_off[j] + r]
            for c in range(block.cols):
                if block.data[r][c]:
                    row[col_off[i] + c] += block.data[r][c]
    return IntMatrix(nrows, ncols, out)
