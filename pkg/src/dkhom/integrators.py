"""Integrators: projective resolutions of the constant presheaf, built
from orientations (free case), normalization (simplicial, cubical,
reflexive-globular), nerves of slices (Bousfield-Kan), products, slices
along discrete fibrations, and the contraction homotopy on restricted
wreath categories.

A free integrator stores, per degree, a list of (label, object) index
entries and a formal differential whose entries are Z-combinations of
category morphisms; everything else (per-object complexes, chain maps,
evaluation on presheaves) is derived from that data.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

from .chains import ChainComplex, ChainMap, ChainHomotopy, concentrated, tensor
from .errors import InfiniteCategory, MissingSign, NotCatenary
from .intlinalg import IntMatrix, kernel_basis, solve_matrix
from .presheaf import FormalMatrix, push_formal_matrix, representable
from .shapecat import CubeCat, DeltaCat, GlobeCat, Morphism, SliceCat
from .wreath import WreathRestrictedCat, diag_into_theta


class Orientation:
    """A sign for every codimension-1 mono of a catenary category."""

    def __init__(self, cat, signs=None, name="standard"):
        self.cat = cat
        self.name = name
        self._signs = signs  # dict payload-key -> sign, or None for standard

    def sign(self, mor):
        if self._signs is None:
            return self.cat.face_sign(mor)
        key = mono_name(self.cat, mor)
        try:
            return self._signs[key]
        except KeyError:
            raise MissingSign(f"no sign for codim-1 mono {key}")

    @classmethod
    def standard(cls, cat):
        if not cat.is_catenary:
            raise NotCatenary(f"{cat.name} is not declared catenary")
        return cls(cat)

    @classmethod
    def from_dict(cls, cat, d, name="custom"):
        return cls(cat, signs=dict(d), name=name)

    def to_dict(self):
        out = {}
        for d in range(1, self.cat.truncation + 1):
            for a in self.cat.objects(d):
                for (mor, _) in self.cat.codim1_monos(a):
                    out[mono_name(self.cat, mor)] = self.sign(mor)
        return out


def mono_name(cat, mor):
    return f"{cat.object_name(mor.source)}>{cat.object_name(mor.target)}|{mor.payload}"


@dataclass
class VerifyReport:
    kind: str
    ok: bool
    per_object: dict = field(default_factory=dict)
    violations: list = field(default_factory=list)

    def to_json(self, cat=None):
        name = cat.object_name if cat else str
        return {
            "kind": self.kind,
            "ok": self.ok,
            "objects": {name(a): v for a, v in self.per_object.items()},
            "violations": [str(v) for v in self.violations],
        }


class Integrator:
    """Common interface: per-object complexes, per-morphism chain maps,
    and evaluation of presheaves (the left Kan extension)."""

    flavor = "explicit"
    is_free = False

    def __init__(self, cat, degree):
        self.cat = cat
        self.degree = degree
        self.status = {"orientation": None, "asphericity": None}

    @property
    def verified(self):
        return bool(self.status["orientation"]) and bool(self.status["asphericity"])

    def complex_at(self, a):
        raise NotImplementedError

    def chain_map(self, f):
        raise NotImplementedError

    def apply(self, x):
        """The complex computing H(A, X) when this integrator verifies."""
        raise NotImplementedError


class FreeIntegrator(Integrator):
    def __init__(self, cat, degree, index_sets, formal_diffs, flavor="free"):
        super().__init__(cat, degree)
        self.index_sets = index_sets    # per degree: list of (label, object)
        self.formal_diffs = formal_diffs  # formal_diffs[n-1] : degree n -> n-1
        self.flavor = flavor

    is_free = True

    def finite_type(self):
        return True

    def basis_at(self, a, k):
        out = []
        for pos, (label, obj) in enumerate(self.index_sets[k]):
            for u in self.cat.hom(obj, a):
                out.append((pos, u))
        return out

    def _entries_by_col(self, n):
        by_col = {}
        for (j, i), terms in self.formal_diffs[n - 1].entries.items():
            by_col.setdefault(i, []).append((j, terms))
        return by_col

    def complex_at(self, a, validate=False):
        bases = [self.basis_at(a, k) for k in range(self.degree + 1)]
        index = [{b: i for i, b in enumerate(bs)} for bs in bases]
        ranks = [len(bs) for bs in bases]
        diffs = []
        for n in range(1, self.degree + 1):
            rows = [[0] * ranks[n] for _ in range(ranks[n - 1])]
            by_col = self._entries_by_col(n)
            tgt = index[n - 1]
            for col, (pos, u) in enumerate(bases[n]):
                for j, terms in by_col.get(pos, ()):
                    for coeff, phi in terms:
                        rows[tgt[(j, self.cat.compose(u, phi))]][col] += coeff
            diffs.append(IntMatrix(ranks[n - 1], ranks[n], rows))
        return ChainComplex(ranks, diffs, validate=validate)

    def chain_map(self, f):
        src = self.complex_at(f.source)
        tgt = self.complex_at(f.target)
        comps = []
        for k in range(self.degree + 1):
            bs = self.basis_at(f.source, k)
            bt = {b: i for i, b in enumerate(self.basis_at(f.target, k))}
            rows = [[0] * len(bs) for _ in range(len(bt))]
            for col, (pos, u) in enumerate(bs):
                rows[bt[(pos, self.cat.compose(f, u))]][col] = 1
            comps.append(IntMatrix(len(bt), len(bs), rows))
        return ChainMap(src, tgt, comps)

    def apply(self, x):
        ranks = []
        for k in range(self.degree + 1):
            ranks.append(sum(x.rank(obj) for _, obj in self.index_sets[k]))
        diffs = [push_formal_matrix(x, self.formal_diffs[n - 1])
                 for n in range(1, self.degree + 1)]
        return ChainComplex(ranks, diffs, validate=False)


def free_integrator(cat, orientation, degree):
    """L_n = (+)_{dim a = n} Wh(a) with d = sum of signed codim-1 faces.

    Construction does not verify anything; run verify_orientation and
    verify_asphericity afterwards.
    """
    if not cat.is_catenary:
        raise NotCatenary(f"{cat.name} is not declared catenary")
    index_sets = [[(a, a) for a in cat.objects(k)] for k in range(degree + 1)]
    diffs = []
    for n in range(1, degree + 1):
        rows = index_sets[n - 1]
        cols = index_sets[n]
        rowpos = {label: i for i, (label, _) in enumerate(rows)}
        entries = {}
        for i, (_, a) in enumerate(cols):
            for (mor, src) in cat.codim1_monos(a):
                j = rowpos[src]
                entries.setdefault((j, i), []).append((orientation.sign(mor), mor))
        fm = FormalMatrix([o for _, o in rows], [o for _, o in cols], entries)
        diffs.append(fm)
    return FreeIntegrator(cat, degree, index_sets, diffs,
                          flavor="free-from-orientation")


def _run_per_object(objs, fn, threads):
    if threads and threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return dict(zip(objs, pool.map(fn, objs)))
    return {a: fn(a) for a in objs}


def verify_orientation(integ, objects=None, threads=1):
    """d.d = 0 in L(a) for every object; violations carry witnesses."""
    cat = integ.cat
    objs = objects if objects is not None else cat.all_objects()

    def check(a):
        c = integ.complex_at(a)
        bad = []
        for n in range(2, c.truncation_degree + 1):
            prod = c.diff(n - 1).mul(c.diff(n))
            if not prod.is_zero():
                wit = next((i, j) for i in range(prod.rows)
                           for j in range(prod.cols) if prod.data[i][j])
                bad.append((n, wit))
        return bad

    results = _run_per_object(objs, check, threads)
    violations = [(a, n, w) for a, bad in results.items() for (n, w) in bad]
    report = VerifyReport("orientation", not violations,
                          {a: not bad for a, bad in results.items()}, violations)
    integ.status["orientation"] = report.ok
    return report


def verify_asphericity(integ, objects=None, max_degree=None, threads=1):
    """H_0(L(a)) = Z and H_k(L(a)) = 0 for 1 <= k <= max_degree."""
    cat = integ.cat
    objs = objects if objects is not None else cat.all_objects()
    top = integ.degree - 1 if max_degree is None else max_degree

    def check(a):
        c = integ.complex_at(a)
        hs = [c.homology(n) for n in range(min(top, c.truncation_degree - 1) + 1)]
        ok = bool(hs) and hs[0].free_rank == 1 and not hs[0].torsion \
            and all(h.is_trivial for h in hs[1:])
        return ok, hs

    results = _run_per_object(objs, check, threads)
    violations = [(a, [str(h) for h in hs]) for a, (ok, hs) in results.items() if not ok]
    report = VerifyReport("asphericity", not violations,
                          {a: ok for a, (ok, hs) in results.items()}, violations)
    integ.status["asphericity"] = report.ok
    return report


def verified_free_integrator(cat, degree, orientation=None, threads=1):
    orientation = orientation or Orientation.standard(cat)
    integ = free_integrator(cat, orientation, degree)
    verify_orientation(integ, threads=threads)
    verify_asphericity(integ, threads=threads)
    return integ


# ---------------------------------------------------------------------------
# normalized integrators


class ExplicitIntegrator(Integrator):
    def __init__(self, cat, degree, complex_fn, chain_map_fn, apply_fn, flavor):
        super().__init__(cat, degree)
        self._complex_fn = complex_fn
        self._chain_map_fn = chain_map_fn
        self._apply_fn = apply_fn
        self.flavor = flavor
        self._cache = {}

    def complex_at(self, a):
        got = self._cache.get(a)
        if got is None:
            got = self._cache[a] = self._complex_fn(a)
        return got

    def chain_map(self, f):
        return self._chain_map_fn(f)

    def apply(self, x):
        return self._apply_fn(x)


def normalized_integrator(kind, degree, cat=None):
    """kind in {simplicial, cubical, cubical_connections,
    globular_reflexive}; returns the normalized integrator c."""
    if kind == "simplicial":
        cat = cat or DeltaCat(degree)
        return _c_delta(cat, degree)
    if kind == "cubical":
        cat = cat or CubeCat(degree)
        return _c_cube(cat, degree, connections=False)
    if kind == "cubical_connections":
        cat = cat or CubeCat(degree, connections=True)
        return _c_cube(cat, degree, connections=True)
    if kind == "globular_reflexive":
        cat = cat or GlobeCat(degree, reflexive=True)
        return _c_globe_ref(cat, degree)
    raise ValueError(f"unknown normalized integrator kind {kind!r}")


def _c_delta(cat, degree):
    """c(Delta_n): nondegenerate simplices with the alternating face sum;
    composites that fail to be monos are sent to zero."""

    def monos_into(k, n):
        return [m for m in cat.hom(k, n) if len(set(m.payload)) == k + 1]

    def complex_fn(n):
        bases = [monos_into(k, n) for k in range(degree + 1)]
        ranks = [len(b) for b in bases]
        diffs = []
        for k in range(1, degree + 1):
            idx = {m.payload: i for i, m in enumerate(bases[k - 1])}
            rows = [[0] * ranks[k] for _ in range(ranks[k - 1])]
            for col, m in enumerate(bases[k]):
                for i in range(k + 1):
                    comp = cat.compose(m, cat.coface(i, k))
                    rows[idx[comp.payload]][col] += -1 if i % 2 else 1
            diffs.append(IntMatrix(ranks[k - 1], ranks[k], rows))
        return ChainComplex(ranks, diffs, validate=False)

    def chain_map_fn(u):
        src = integ.complex_at(u.source)
        tgt = integ.complex_at(u.target)
        comps = []
        for k in range(degree + 1):
            bs = monos_into(k, u.source)
            bt = {m.payload: i for i, m in enumerate(monos_into(k, u.target))}
            rows = [[0] * len(bs) for _ in range(len(bt))]
            for col, m in enumerate(bs):
                comp = cat.compose(u, m)
                if len(set(comp.payload)) == k + 1:
                    rows[bt[comp.payload]][col] = 1
            comps.append(IntMatrix(len(bt), len(bs), rows))
        return ChainMap(src, tgt, comps)

    def apply_fn(x):
        from .doldkan import simplicial_CN
        return simplicial_CN(x, degree)

    integ = ExplicitIntegrator(cat, degree, complex_fn, chain_map_fn, apply_fn,
                               flavor="normalized-simplicial")
    return integ


def _cube_moore_matrices(cat, n, degree):
    """Alternating-sum differential of the representable at cube_n."""
    wh = representable(cat, n)
    diffs = []
    for k in range(1, degree + 1):
        m = None
        for i in range(1, k + 1):
            for eps in (0, 1):
                face = wh.matrix(cat.face(i, eps, k))
                sign = (-1 if i % 2 else 1) * (-1 if eps else 1)
                m = face.scale(sign) if m is None else m + face.scale(sign)
        diffs.append(m)
    return wh, diffs


def _c_cube(cat, degree, connections):
    section_bases = {}
    if connections:
        def complex_fn(n):
            """Kernel-intersection complex N(Wh(cube_n)): meet of ker d_{i,eps}
            over (i,eps) != (k,0), with the Moore differential restricted."""
            wh, moore = _cube_moore_matrices(cat, n, degree)
            bases = [IntMatrix.identity(wh.rank(0))]
            for k in range(1, degree + 1):
                basis = IntMatrix.identity(wh.rank(k))
                for i in range(1, k + 1):
                    for eps in (0, 1):
                        if (i, eps) == (k, 0):
                            continue
                        restricted = wh.matrix(cat.face(i, eps, k)).mul(basis)
                        inner = kernel_basis(restricted)
                        basis = basis.mul(inner)
                bases.append(basis)
            ranks = [b.cols for b in bases]
            diffs = []
            for k in range(1, degree + 1):
                image = moore[k - 1].mul(bases[k])
                m = solve_matrix(bases[k - 1], image)
                assert m is not None, "N is not a subcomplex"
                diffs.append(m)
            section_bases[n] = bases
            return ChainComplex(ranks, diffs, validate=False)
    else:
        def complex_fn(n):
            """Quotient of the representable by degeneracies: the basis is
            the maps with no degenerate direction."""
            keep = []
            for k in range(degree + 1):
                keep.append([m for m in cat.hom(k, n)
                             if not cat.degenerate_directions(m)])
            ranks = [len(b) for b in keep]
            diffs = []
            for k in range(1, degree + 1):
                idx = {m.payload: i for i, m in enumerate(keep[k - 1])}
                rows = [[0] * ranks[k] for _ in range(ranks[k - 1])]
                for col, m in enumerate(keep[k]):
                    for i in range(1, k + 1):
                        for eps in (0, 1):
                            comp = cat.compose(m, cat.face(i, eps, k))
                            pos = idx.get(comp.payload)
                            if pos is not None:
                                sign = (-1 if i % 2 else 1) * (-1 if eps else 1)
                                rows[pos][col] += sign
                diffs.append(IntMatrix(ranks[k - 1], ranks[k], rows))
            return ChainComplex(ranks, diffs, validate=False)

    def chain_map_fn(u):
        src = integ.complex_at(u.source)
        tgt = integ.complex_at(u.target)
        comps = []
        if connections:
            src_bases = section_bases[u.source]
            tgt_bases = section_bases[u.target]
            for k in range(degree + 1):
                # L(u) in hom bases, then restricted to the kernel bases
                hs = cat.hom(k, u.source)
                ht = {m.payload: i for i, m in enumerate(cat.hom(k, u.target))}
                rows = [[0] * len(hs) for _ in range(len(ht))]
                for col, m in enumerate(hs):
                    rows[ht[cat.compose(u, m).payload]][col] = 1
                lu = IntMatrix(len(ht), len(hs), rows)
                m = solve_matrix(tgt_bases[k], lu.mul(src_bases[k]))
                assert m is not None, "induced map does not preserve N"
                comps.append(m)
        else:
            for k in range(degree + 1):
                bs = [m for m in cat.hom(k, u.source) if not cat.degenerate_directions(m)]
                btl = [m for m in cat.hom(k, u.target) if not cat.degenerate_directions(m)]
                bt = {m.payload: i for i, m in enumerate(btl)}
                rows = [[0] * len(bs) for _ in range(len(btl))]
                for col, m in enumerate(bs):
                    comp = cat.compose(u, m)
                    pos = bt.get(comp.payload)
                    if pos is not None:
                        rows[pos][col] = 1
                comps.append(IntMatrix(len(btl), len(bs), rows))
        return ChainMap(src, tgt, comps)

    def apply_fn(x):
        from .doldkan import cubical_CN
        return cubical_CN(x, degree)

    integ = ExplicitIntegrator(cat, degree, complex_fn, chain_map_fn, apply_fn,
                               flavor="normalized-cubical" +
                               ("-connections" if connections else ""))
    return integ


def _c_globe_ref(cat, degree):
    """c(D_n): ranks 2, ..., 2, 1, 0 with differentials [-1 -1; 1 1],
    ending in [-1; 1]; the basis is (sigma-climb class, tau-climb class)."""

    def complex_fn(n):
        ranks = []
        for k in range(degree + 1):
            ranks.append(2 if k < n else (1 if k == n else 0))
        diffs = []
        for k in range(1, degree + 1):
            r0, r1 = ranks[k - 1], ranks[k]
            if r1 == 0:
                diffs.append(IntMatrix.zeros(r0, 0))
            elif r1 == 1:
                diffs.append(IntMatrix(2, 1, [[-1], [1]]))
            else:
                diffs.append(IntMatrix(2, 2, [[-1, -1], [1, 1]]))
        return ChainComplex(ranks, diffs, validate=False)

    def basis_at(n, k):
        # nondegenerate classes: pure climbs
        if k < n:
            return [(k, "sigma"), (k, "tau")]
        if k == n:
            return [(n, "id")]
        return []

    def chain_map_fn(u):
        src = integ.complex_at(u.source)
        tgt = integ.complex_at(u.target)
        comps = []
        for k in range(degree + 1):
            bs = basis_at(u.source, k)
            btl = basis_at(u.target, k)
            bt = {p: i for i, p in enumerate(btl)}
            rows = [[0] * len(bs) for _ in range(len(btl))]
            for col, payload in enumerate(bs):
                comp = cat.compose(u, Morphism(k, u.source, payload))
                pos = bt.get(comp.payload)
                if pos is not None:
                    rows[pos][col] = 1
            comps.append(IntMatrix(len(btl), len(bs), rows))
        return ChainMap(src, tgt, comps)

    def apply_fn(x):
        from .doldkan import bourn_B
        return bourn_B(x, degree)

    integ = ExplicitIntegrator(cat, degree, complex_fn, chain_map_fn, apply_fn,
                               flavor="normalized-globular-reflexive")
    return integ


# ---------------------------------------------------------------------------
# Bousfield-Kan


def bousfield_kan(cat, degree):
    """ell(a)_n = (+)_{a_0 -> ... -> a_n} Z^(a_n -> a); the differential
    is the alternating sum of nerve faces, composing the last morphism
    into the augmentation."""
    if not cat.is_finite:
        raise InfiniteCategory(
            f"{cat.name}: Bousfield-Kan needs all objects materialized")
    objs = cat.all_objects()
    chains = [[(("obj", a), a) for a in objs]]
    for n in range(1, degree + 1):
        prev = chains[-1]
        layer = []
        for label, end in prev:
            for b in objs:
                for g in cat.hom(end, b):
                    tail = () if label[0] == "obj" else label[1]
                    layer.append((("chain", tail + (g,)), b))
        chains.append(layer)
    diffs = []
    for n in range(1, degree + 1):
        rows = chains[n - 1]
        cols = chains[n]
        rowpos = {label: i for i, (label, _) in enumerate(rows)}
        entries = {}
        for i, (label, end) in enumerate(cols):
            seq = label[1]
            for k in range(n + 1):
                sign = -1 if k % 2 else 1
                if k == n:
                    face = seq[:-1]
                    flabel = ("chain", face) if face else ("obj", seq[0].source)
                    j = rowpos[flabel]
                    entries.setdefault((j, i), []).append((sign, seq[-1]))
                else:
                    if k == 0:
                        face = seq[1:]
                        start = seq[0].target
                    else:
                        face = seq[:k - 1] + (cat.compose(seq[k], seq[k - 1]),) + seq[k + 1:]
                        start = None
                    flabel = ("chain", face) if face else ("obj", start if start else seq[0].target)
                    j = rowpos[flabel]
                    entries.setdefault((j, i), []).append((sign, cat.identity(end)))
        fm = FormalMatrix([o for _, o in rows], [o for _, o in cols], entries)
        diffs.append(fm)
    return FreeIntegrator(cat, degree, chains, diffs, flavor="bousfield_kan")


# ---------------------------------------------------------------------------
# products and slices


def product_integrator(i1, i2, prod_cat=None, degree=None):
    """(c, d) -> L(c) (x) L(d); free inputs produce a free output with
    Koszul signs on the second factor."""
    if degree is None:
        degree = min(i1.degree, i2.degree)
    if not (i1.is_free and i2.is_free):
        raise NotImplementedError("product integrator needs free factors")
    from .shapecat import ProductCat
    cat = prod_cat or ProductCat(i1.cat, i2.cat)
    index_sets = []
    for n in range(degree + 1):
        layer = []
        for p in range(n + 1):
            q = n - p
            if p <= i1.degree and q <= i2.degree:
                for (l1, o1) in i1.index_sets[p]:
                    for (l2, o2) in i2.index_sets[q]:
                        layer.append((((p, l1), (q, l2)), (o1, o2)))
        index_sets.append(layer)
    pos1 = [{lab: k for k, (lab, _) in enumerate(layer)} for layer in i1.index_sets]
    pos2 = [{lab: k for k, (lab, _) in enumerate(layer)} for layer in i2.index_sets]
    bycol1 = [None] + [_group_by_col(i1.formal_diffs[n - 1]) for n in range(1, i1.degree + 1)]
    bycol2 = [None] + [_group_by_col(i2.formal_diffs[n - 1]) for n in range(1, i2.degree + 1)]
    diffs = []
    for n in range(1, degree + 1):
        rows = index_sets[n - 1]
        cols = index_sets[n]
        rowpos = {label: i for i, (label, _) in enumerate(rows)}
        entries = {}
        for i, (((p, l1), (q, l2)), (o1, o2)) in enumerate(cols):
            if p >= 1:
                for j1, terms in bycol1[p].get(pos1[p][l1], ()):
                    labj = i1.index_sets[p - 1][j1][0]
                    j = rowpos[((p - 1, labj), (q, l2))]
                    for coeff, phi in terms:
                        mor = Morphism((phi.source, o2), (o1, o2),
                                       (phi, i2.cat.identity(o2)))
                        entries.setdefault((j, i), []).append((coeff, mor))
            if q >= 1:
                sign = -1 if p % 2 else 1
                for j2, terms in bycol2[q].get(pos2[q][l2], ()):
                    labj = i2.index_sets[q - 1][j2][0]
                    j = rowpos[((p, l1), (q - 1, labj))]
                    for coeff, psi in terms:
                        mor = Morphism((o1, psi.source), (o1, o2),
                                       (i1.cat.identity(o1), psi))
                        entries.setdefault((j, i), []).append((sign * coeff, mor))
        fm = FormalMatrix([o for _, o in rows], [o for _, o in cols], entries)
        diffs.append(fm)
    return FreeIntegrator(cat, degree, index_sets, diffs, flavor="product")


def _group_by_col(fm):
    by_col = {}
    for (j, i), terms in fm.entries.items():
        by_col.setdefault(i, []).append((j, terms))
    return by_col


def slice_integrator(integ, f, slice_cat=None):
    """Transfer a free integrator along the discrete fibration A/F -> A:
    L(a, x) = L(a), which stays free with index entries split over the
    fibers."""
    if not integ.is_free:
        raise NotImplementedError("slice transfer implemented for free integrators")
    cat = slice_cat or SliceCat(integ.cat, f)
    degree = integ.degree
    index_sets = []
    for n in range(degree + 1):
        layer = []
        for (label, a) in integ.index_sets[n]:
            for x in f.elements(a):
                layer.append(((label, x), (a, x)))
        index_sets.append(layer)
    diffs = []
    for n in range(1, degree + 1):
        rows = index_sets[n - 1]
        cols = index_sets[n]
        rowpos = {lab: i for i, (lab, _) in enumerate(rows)}
        base_rows = integ.index_sets[n - 1]
        base_cols = integ.index_sets[n]
        base_pos = {lab: k for k, (lab, _) in enumerate(base_cols)}
        by_col = _group_by_col(integ.formal_diffs[n - 1])
        entries = {}
        for i, ((blabel, x), (a, _)) in enumerate(cols):
            for j0, terms in by_col.get(base_pos[blabel], ()):
                for coeff, phi in terms:
                    y = f.action(phi, x)
                    j = rowpos[(base_rows[j0][0], y)]
                    lifted = Morphism((phi.source, y), (a, x), phi)
                    entries.setdefault((j, i), []).append((coeff, lifted))
        fm = FormalMatrix([o for _, o in rows], [o for _, o in cols], entries)
        diffs.append(fm)
    return FreeIntegrator(cat, degree, index_sets, diffs, flavor="slice")


# ---------------------------------------------------------------------------
# the theta integrator (explicit; theta's combinatorics carries no
# orientation, so L is the unnormalized complex along the diagonal)


def theta_integrator(theta_cat, degree):
    diag = diag_into_theta(theta_cat, _theta_level(theta_cat))
    delta = diag.source
    diag_objects = [diag.obj(k) for k in range(degree + 1)]
    diag_faces = [[diag.mor(delta.coface(i, k)) for i in range(k + 1)]
                  for k in range(1, degree + 1)]

    def complex_fn(t):
        ranks = [len(theta_cat.hom(diag_objects[k], t)) for k in range(degree + 1)]
        diffs = []
        for k in range(1, degree + 1):
            src = theta_cat.hom(diag_objects[k], t)
            idx = {m.payload: i
                   for i, m in enumerate(theta_cat.hom(diag_objects[k - 1], t))}
            rows = [[0] * ranks[k] for _ in range(ranks[k - 1])]
            for col, u in enumerate(src):
                for i, face in enumerate(diag_faces[k - 1]):
                    comp = theta_cat.compose(u, face)
                    rows[idx[comp.payload]][col] += -1 if i % 2 else 1
            diffs.append(IntMatrix(ranks[k - 1], ranks[k], rows))
        return ChainComplex(ranks, diffs, validate=False)

    def chain_map_fn(g):
        src = integ.complex_at(g.source)
        tgt = integ.complex_at(g.target)
        comps = []
        for k in range(degree + 1):
            bs = theta_cat.hom(diag_objects[k], g.source)
            bt = {m.payload: i for i, m in enumerate(theta_cat.hom(diag_objects[k], g.target))}
            rows = [[0] * len(bs) for _ in range(len(bt))]
            for col, u in enumerate(bs):
                rows[bt[theta_cat.compose(g, u).payload]][col] = 1
            comps.append(IntMatrix(len(bt), len(bs), rows))
        return ChainMap(src, tgt, comps)

    def apply_fn(x):
        ranks = [x.rank(diag_objects[k]) for k in range(degree + 1)]
        diffs = []
        for k in range(1, degree + 1):
            m = None
            for i, face in enumerate(diag_faces[k - 1]):
                term = x.matrix(face).scale(-1 if i % 2 else 1)
                m = term if m is None else m + term
            diffs.append(m)
        return ChainComplex(ranks, diffs, validate=False)

    integ = ExplicitIntegrator(theta_cat, degree, complex_fn, chain_map_fn,
                               apply_fn, flavor="theta")
    return integ


def _theta_level(cat):
    from .wreath import WreathCat
    level = 0
    while isinstance(cat, WreathCat):
        level += 1
        cat = cat.inner
    return level


# ---------------------------------------------------------------------------
# the contraction homotopy on restricted wreath categories


def _min_vertex(cat, t):
    """The minimal 0-simplex sigma_0^T : pt -> T."""
    if isinstance(cat, WreathRestrictedCat):
        if t == "pt":
            return cat.identity("pt")
        return Morphism("pt", t, ("c", (0,)))
    # terminal base category
    return cat.identity(t)


def _min_const(cat, src, tgt):
    """Canonical constant morphism src -> tgt (through the bottom)."""
    if isinstance(cat, WreathRestrictedCat):
        n = 0 if src == "pt" else src[0]
        return Morphism(src, tgt, ("c", (0,) * (n + 1)))
    return cat.identity(src)


def _xi_h_basis(cat, u):
    """The contraction homotopy on a basis morphism u : S -> T of L(T),
    as a list of (coefficient, morphism) with sources one dimension up.

    Implements the three-case recursion; the non-natural section is the
    minimal-vertex choice at every level.
    """
    if not isinstance(cat, WreathRestrictedCat):
        return []
    inner = cat.inner
    bottom_a = cat.inner_bottom()
    t = u.target
    a = bottom_a if t == "pt" else t[1]
    x_a = _min_vertex(inner, a)
    s = u.source
    if s == "pt":
        v = u.payload[1][0]
        hphi = (0, v)
        if v == 0:
            return [(1, Morphism((1, bottom_a), t, ("c", hphi)))]
        return [(1, Morphism((1, bottom_a), t, ("nc", hphi, x_a)))]
    i, a_src = s
    phi = u.payload[1]
    psi = u.payload[2] if u.payload[0] == "nc" else _min_const(inner, a_src, a)
    sign = -1 if i % 2 else 1
    terms = []
    if a_src == bottom_a:
        hphi = (0,) + phi
        if len(set(hphi)) == 1:
            terms.append((1, Morphism((i + 1, bottom_a), t, ("c", hphi))))
        else:
            terms.append((1, Morphism((i + 1, bottom_a), t, ("nc", hphi, x_a))))
    for coeff, w in _xi_h_basis(inner, psi):
        src = (i, w.source)
        if len(set(phi)) == 1:
            mor = Morphism(src, t, ("c", phi))
        else:
            mor = Morphism(src, t, ("nc", phi, w))
        terms.append((sign * coeff, mor))
    return terms


def xi_contraction(integ, t):
    """(r, s, h) with r s = id on Z[0] and h a homotopy from s r to the
    identity of L(t), for a free integrator on a restricted wreath
    category."""
    cat = integ.cat
    if not isinstance(cat, WreathRestrictedCat):
        raise NotCatenary("xi_contraction lives on restricted wreath categories")
    degree = integ.degree
    l_t = integ.complex_at(t)
    point = concentrated(1, 0, upto=degree)
    bases = [integ.basis_at(t, k) for k in range(degree + 1)]
    index = [{b: i for i, b in enumerate(bs)} for bs in bases]
    # r: augmentation; s: minimal vertex
    r0 = IntMatrix(1, l_t.ranks[0], [[1] * l_t.ranks[0]])
    r = ChainMap(l_t, point, [r0] + [IntMatrix.zeros(0 if k else 1, l_t.ranks[k])
                                     for k in range(1, degree + 1)])
    minv = _min_vertex(cat, t)
    pos0 = None
    for i, (lab, mor) in enumerate(bases[0]):
        if mor == minv:
            pos0 = i
    s0 = IntMatrix(l_t.ranks[0], 1, [[1 if i == pos0 else 0]
                                     for i in range(l_t.ranks[0])])
    s = ChainMap(point, l_t, [s0] + [IntMatrix.zeros(l_t.ranks[k], 0 if k else 1)
                                     for k in range(1, degree + 1)])
    obj_pos = [{obj: pos for pos, (lab, obj) in enumerate(layer)}
               for layer in integ.index_sets]
    comps = []
    for k in range(degree):
        rows = [[0] * l_t.ranks[k] for _ in range(l_t.ranks[k + 1])]
        tgt = index[k + 1]
        for col, (lab, u) in enumerate(bases[k]):
            for coeff, mor in _xi_h_basis(cat, u):
                rows[tgt[(obj_pos[k + 1][mor.source], mor)]][col] += coeff
        comps.append(IntMatrix(l_t.ranks[k + 1], l_t.ranks[k], rows))
    comps.append(IntMatrix.zeros(0 if degree + 1 > l_t.truncation_degree
                                 else l_t.ranks[degree + 1], l_t.ranks[degree]))
    h = ChainHomotopy(l_t, l_t, comps)
    return r, s, h
