"""Truncated combinatorial shape categories.

Every category here exposes enumerable objects per dimension, finite
hom-sets with canonical payloads (structural equality = equality in the
category), composition, and, for the catenary ones, codimension-1 monos
with their standard signs. All enumerations stop at the truncation
dimension; anything needing objects beyond it fails loudly.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from itertools import combinations, combinations_with_replacement, product as iproduct

from .errors import (
    InfiniteCategory,
    InvalidPresentation,
    NotCatenary,
    NotComposable,
)


@dataclass(frozen=True)
class Morphism:
    source: object
    target: object
    payload: object

    def __repr__(self):
        return f"{self.payload}:{self.source}->{self.target}"


def _mkey(m):
    return repr(m.payload)


class ShapeCategory:
    """Base class; subclasses fill in dim/objects/_hom/compose/identity."""

    is_catenary = False
    is_finite = False

    def __init__(self, name, truncation):
        if truncation < 0:
            raise InvalidPresentation("truncation must be >= 0")
        self.name = name
        self.truncation = truncation
        self._hom_cache = {}

    # -- core interface ------------------------------------------------

    def dim(self, a):
        raise NotImplementedError

    def objects(self, d):
        raise NotImplementedError

    def _hom(self, a, b):
        raise NotImplementedError

    def compose(self, g, f):
        raise NotImplementedError

    def identity(self, a):
        raise NotImplementedError

    def generator_list(self):
        """Named generating morphisms within the truncation."""
        raise NotImplementedError(f"{self.name} has no generator list")

    # -- generic machinery ----------------------------------------------

    def all_objects(self):
        out = []
        for d in range(self.truncation + 1):
            out.extend(self.objects(d))
        return out

    def hom(self, a, b):
        key = (a, b)
        got = self._hom_cache.get(key)
        if got is None:
            got = tuple(sorted(self._hom(a, b), key=_mkey))
            seen = {m.payload for m in got}
            assert len(seen) == len(got), f"duplicate payloads in hom({a},{b})"
            self._hom_cache[key] = got
        return got

    def check_composable(self, g, f):
        if f.target != g.source:
            raise NotComposable(f"{f} then {g}")

    def is_identity(self, f):
        return f.source == f.target and f == self.identity(f.source)

    def is_iso(self, f):
        for g in self.hom(f.target, f.source):
            if (self.compose(g, f) == self.identity(f.source)
                    and self.compose(f, g) == self.identity(f.target)):
                return True
        return False

    def codim1_monos(self, a):
        raise NotCatenary(f"{self.name} has no declared catenary structure")

    def face_sign(self, f):
        """Standard orientation sign of a codimension-1 mono."""
        raise NotCatenary(f"{self.name} has no standard orientation")

    def mono_test_family(self, bound):
        out = []
        for d in range(min(bound, self.truncation) + 1):
            out.extend(self.objects(d))
        return out

    def is_mono(self, f, bound=None):
        """Brute-force mono test against all objects of dim <= bound.

        bound defaults to dim(source); subclasses with function payloads
        override with an exact injectivity shortcut.
        """
        if bound is None:
            bound = self.dim(f.source)
        if self.is_finite:
            family = self.all_objects()
        else:
            family = self.mono_test_family(bound)
        for u in family:
            seen = {}
            for g in self.hom(u, f.source):
                fg = self.compose(f, g)
                if fg in seen and seen[fg] != g:
                    return False
                seen[fg] = g
        return True

    def subobjects(self, a, enum_bound=None):
        """Monos into a grouped into subobject classes: (count, reps)."""
        if enum_bound is None:
            enum_bound = self.dim(a)
        monos = []
        for d in range(min(enum_bound, self.truncation) + 1):
            for s in self.objects(d):
                for f in self.hom(s, a):
                    if self.is_mono(f):
                        monos.append(f)
        reps = []
        for m in monos:
            placed = False
            for r in reps:
                if self.dim(r.source) != self.dim(m.source):
                    continue
                for f in self.hom(m.source, r.source):
                    if self.compose(r, f) == m and self.is_iso(f):
                        placed = True
                        break
                if placed:
                    break
            if not placed:
                reps.append(m)
        return len(reps), reps

    def spot_check(self, max_dim=2, max_pairs=200000):
        """Exhaustive identity/associativity check on small dimensions."""
        objs = []
        for d in range(min(max_dim, self.truncation) + 1):
            objs.extend(self.objects(d))
        for a in objs:
            ida = self.identity(a)
            assert ida.source == a and ida.target == a
        for a in objs:
            for b in objs:
                for f in self.hom(a, b):
                    assert self.compose(f, self.identity(a)) == f
                    assert self.compose(self.identity(b), f) == f
        budget = max_pairs
        for a in objs:
            for b in objs:
                for c in objs:
                    for d in objs:
                        homs = (self.hom(a, b), self.hom(b, c), self.hom(c, d))
                        budget -= len(homs[0]) * len(homs[1]) * len(homs[2])
                        if budget < 0:
                            return
                        for f in homs[0]:
                            for g in homs[1]:
                                gf = self.compose(g, f)
                                for h in homs[2]:
                                    assert self.compose(h, gf) == \
                                        self.compose(self.compose(h, g), f)

    def object_name(self, a):
        return str(a)

    def parse_object(self, s):
        raise NotImplementedError


# ---------------------------------------------------------------------------
# the simplex category and its mono subcategory


class DeltaCat(ShapeCategory):
    """Objects Delta_n = {0 < ... < n}; payload = image tuple of the
    monotone map."""

    is_catenary = True
    kind = "delta"

    def __init__(self, truncation):
        super().__init__("delta", truncation)

    def dim(self, a):
        return a

    def objects(self, d):
        return [d] if 0 <= d <= self.truncation else []

    def _hom(self, a, b):
        return [Morphism(a, b, t)
                for t in combinations_with_replacement(range(b + 1), a + 1)]

    def compose(self, g, f):
        self.check_composable(g, f)
        return Morphism(f.source, g.target, tuple(g.payload[v] for v in f.payload))

    def identity(self, a):
        return Morphism(a, a, tuple(range(a + 1)))

    def coface(self, i, n):
        """delta_i : Delta_{n-1} -> Delta_n, the injection missing i."""
        return Morphism(n - 1, n, tuple(v for v in range(n + 1) if v != i))

    def codegeneracy(self, i, n):
        """sigma_i : Delta_{n+1} -> Delta_n, repeating i."""
        return Morphism(n + 1, n, tuple(range(i + 1)) + tuple(range(i, n + 1)))

    def generator_list(self):
        gens = []
        for n in range(1, self.truncation + 1):
            for i in range(n + 1):
                gens.append((f"d{i}^{n}", self.coface(i, n)))
        for n in range(self.truncation):
            for i in range(n + 1):
                gens.append((f"s{i}^{n}", self.codegeneracy(i, n)))
        return gens

    def codim1_monos(self, a):
        if a == 0:
            return []
        return [(self.coface(i, a), a - 1) for i in range(a + 1)]

    def face_sign(self, f):
        missing = set(range(f.target + 1)) - set(f.payload)
        assert len(missing) == 1, f"{f} is not a coface"
        return -1 if missing.pop() % 2 else 1

    def is_mono(self, f, bound=None):
        return len(set(f.payload)) == len(f.payload)

    def epi_mono_factor(self, f):
        """f = mono . epi through the image object."""
        image = sorted(set(f.payload))
        k = len(image) - 1
        pos = {v: i for i, v in enumerate(image)}
        epi = Morphism(f.source, k, tuple(pos[v] for v in f.payload))
        mono = Morphism(k, f.target, tuple(image))
        return epi, mono

    def epis_onto(self, n):
        """All monotone surjections out of Delta_n, identity first."""
        out = [self.identity(n)]
        for i in range(n - 1, -1, -1):
            for m in self.hom(n, i):
                if set(m.payload) == set(range(i + 1)):
                    out.append(m)
        return out

    def parse_object(self, s):
        return int(s)


class DeltaMonoCat(DeltaCat):
    """The wide subcategory of injections; payload inherits from DeltaCat."""

    kind = "delta_mono"

    def __init__(self, truncation):
        ShapeCategory.__init__(self, "delta_mono", truncation)

    def _hom(self, a, b):
        return [Morphism(a, b, t) for t in combinations(range(b + 1), a + 1)]

    def generator_list(self):
        gens = []
        for n in range(1, self.truncation + 1):
            for i in range(n + 1):
                gens.append((f"d{i}^{n}", self.coface(i, n)))
        return gens


# ---------------------------------------------------------------------------
# globes


class GlobeCat(ShapeCategory):
    """Globe categories; payload (k, letter): drop to level k by kappa's,
    then climb with the given first letter ('id' means pure drop).

    Composition is (k2, l2) . (k1, l1) = (k1, l1) if k2 > k1 else (k2, l2),
    which encodes the coglobular and reflexivity relations.
    """

    is_catenary = True

    def __init__(self, truncation, reflexive=False):
        super().__init__("globe_ref" if reflexive else "globe", truncation)
        self.reflexive = reflexive
        self.kind = self.name

    def dim(self, a):
        return a

    def objects(self, d):
        return [d] if 0 <= d <= self.truncation else []

    def _hom(self, a, b):
        out = []
        if self.reflexive:
            for k in range(min(a, b) + 1):
                if k == b:
                    out.append(Morphism(a, b, (k, "id")))
                else:
                    out.append(Morphism(a, b, (k, "sigma")))
                    out.append(Morphism(a, b, (k, "tau")))
        else:
            if a < b:
                out = [Morphism(a, b, (a, "sigma")), Morphism(a, b, (a, "tau"))]
            elif a == b:
                out = [Morphism(a, b, (a, "id"))]
        return out

    def compose(self, g, f):
        self.check_composable(g, f)
        k1, l1 = f.payload
        k2, l2 = g.payload
        payload = (k1, l1) if k2 > k1 else (k2, l2)
        return Morphism(f.source, g.target, payload)

    def identity(self, a):
        return Morphism(a, a, (a, "id"))

    def sigma(self, n):
        """sigma_n : D_{n-1} -> D_n."""
        return Morphism(n - 1, n, (n - 1, "sigma"))

    def tau(self, n):
        return Morphism(n - 1, n, (n - 1, "tau"))

    def kappa(self, n):
        """kappa_n : D_{n+1} -> D_n (reflexive only)."""
        if not self.reflexive:
            raise InvalidPresentation("kappa lives in the reflexive globe category")
        return Morphism(n + 1, n, (n, "id"))

    def generator_list(self):
        gens = []
        for n in range(1, self.truncation + 1):
            gens.append((f"sigma^{n}", self.sigma(n)))
            gens.append((f"tau^{n}", self.tau(n)))
        if self.reflexive:
            for n in range(self.truncation):
                gens.append((f"kappa^{n}", self.kappa(n)))
        return gens

    def codim1_monos(self, a):
        if a == 0:
            return []
        return [(self.sigma(a), a - 1), (self.tau(a), a - 1)]

    def face_sign(self, f):
        # d = t - s: precomposition by tau counts +, by sigma counts -
        letter = f.payload[1]
        assert letter in ("sigma", "tau")
        return 1 if letter == "tau" else -1

    def is_mono(self, f, bound=None):
        return f.payload[0] == f.source

    def parse_object(self, s):
        return int(s)


# ---------------------------------------------------------------------------
# cubes


class CubeCat(ShapeCategory):
    """Cube categories; payload = full function table on {0,1}^m.

    Vertices of the m-cube are bitmasks (bit l is coordinate x_{l+1});
    hom-sets are the closure of the generators under composition, which
    is well defined since both categories sit inside posets.
    """

    is_catenary = True

    def __init__(self, truncation, connections=False):
        super().__init__("cube_c" if connections else "cube", truncation)
        self.connections = connections
        self.kind = self.name
        self._closure = {}
        self._closed_dim = -1

    def dim(self, a):
        return a

    def objects(self, d):
        return [d] if 0 <= d <= self.truncation else []

    # generator tables ---------------------------------------------------

    @staticmethod
    def _face_table(i, eps, n):
        # delta_{i,eps}^n : cube_{n-1} -> cube_n, insert eps at slot i
        out = []
        lowmask = (1 << (i - 1)) - 1
        for v in range(1 << (n - 1)):
            low = v & lowmask
            high = v >> (i - 1)
            out.append(low | (eps << (i - 1)) | (high << i))
        return tuple(out)

    @staticmethod
    def _degeneracy_table(i, n):
        # sigma_i^n : cube_{n+1} -> cube_n, delete coordinate i
        out = []
        lowmask = (1 << (i - 1)) - 1
        for v in range(1 << (n + 1)):
            low = v & lowmask
            high = v >> i
            out.append(low | (high << (i - 1)))
        return tuple(out)

    @staticmethod
    def _connection_table(i, n):
        # gamma_i^n : cube_{n+1} -> cube_n, sup of coordinates i, i+1
        out = []
        lowmask = (1 << (i - 1)) - 1
        for v in range(1 << (n + 1)):
            low = v & lowmask
            bi = (v >> (i - 1)) & 1
            bi1 = (v >> i) & 1
            high = v >> (i + 1)
            out.append(low | ((bi | bi1) << (i - 1)) | (high << i))
        return tuple(out)

    def face(self, i, eps, n):
        return Morphism(n - 1, n, self._face_table(i, eps, n))

    def degeneracy(self, i, n):
        return Morphism(n + 1, n, self._degeneracy_table(i, n))

    def connection(self, i, n):
        if not self.connections:
            raise InvalidPresentation("connections live in cube_c")
        return Morphism(n + 1, n, self._connection_table(i, n))

    def identity(self, a):
        return Morphism(a, a, tuple(range(1 << a)))

    def compose(self, g, f):
        self.check_composable(g, f)
        gt = g.payload
        return Morphism(f.source, g.target, tuple(gt[v] for v in f.payload))

    def _gen_tables(self, max_dim):
        gens = []
        for n in range(1, max_dim + 1):
            for i in range(1, n + 1):
                for eps in (0, 1):
                    gens.append((n - 1, n, self._face_table(i, eps, n)))
        for n in range(max_dim):
            for i in range(1, n + 2):
                gens.append((n + 1, n, self._degeneracy_table(i, n)))
            if self.connections and n >= 1:
                for i in range(1, n + 1):
                    gens.append((n + 1, n, self._connection_table(i, n)))
        return gens

    def _ensure_closure(self, max_dim):
        """Worklist closure of generator composites, memoized per (m, n).

        Every map factors through dimensions <= max(m, n), so closing the
        grid up to max_dim is complete for it.
        """
        if max_dim <= self._closed_dim:
            return
        homs = {(m, n): set() for m in range(max_dim + 1) for n in range(max_dim + 1)}
        work = []
        for m in range(max_dim + 1):
            t = tuple(range(1 << m))
            homs[(m, m)].add(t)
            work.append((m, m, t))
        by_source = {}
        for (sm, sn, table) in self._gen_tables(max_dim):
            by_source.setdefault(sn, []).append((sm, sn, table))
        gens_from = {}
        for (sm, sn, table) in self._gen_tables(max_dim):
            gens_from.setdefault(sm, []).append((sn, table))
        while work:
            m, n, table = work.pop()
            for (p, gt) in gens_from.get(n, []):
                new = tuple(gt[v] for v in table)
                bucket = homs[(m, p)]
                if new not in bucket:
                    bucket.add(new)
                    work.append((m, p, new))
        self._closure = homs
        self._closed_dim = max_dim

    def closure_is_stable(self, max_dim):
        """One more full composition round adds nothing new."""
        self._ensure_closure(max_dim)
        for (m, k), fs in self._closure.items():
            for (k2, n), gs in self._closure.items():
                if k != k2:
                    continue
                for f in fs:
                    for g in gs:
                        if tuple(g[v] for v in f) not in self._closure[(m, n)]:
                            return False
        return True

    def _hom(self, a, b):
        self._ensure_closure(max(a, b))
        return [Morphism(a, b, t) for t in self._closure[(a, b)]]

    def generator_list(self):
        gens = []
        for n in range(1, self.truncation + 1):
            for i in range(1, n + 1):
                for eps in (0, 1):
                    gens.append((f"d{i}{eps}^{n}", self.face(i, eps, n)))
        for n in range(self.truncation):
            for i in range(1, n + 2):
                gens.append((f"s{i}^{n}", self.degeneracy(i, n)))
            if self.connections and n >= 1:
                for i in range(1, n + 1):
                    gens.append((f"g{i}^{n}", self.connection(i, n)))
        return gens

    def codim1_monos(self, a):
        if a == 0:
            return []
        return [(self.face(i, eps, a), a - 1)
                for i in range(1, a + 1) for eps in (0, 1)]

    def face_sign(self, f):
        for i in range(1, f.target + 1):
            for eps in (0, 1):
                if f.payload == self._face_table(i, eps, f.target):
                    return -1 if (i + eps) % 2 else 1
        raise NotCatenary(f"{f} is not a cube face")

    def is_mono(self, f, bound=None):
        return len(set(f.payload)) == len(f.payload)

    def degenerate_directions(self, f):
        """Indices i such that f factors through sigma_i (table is
        independent of coordinate i)."""
        m = f.source
        out = []
        for i in range(1, m + 1):
            bit = 1 << (i - 1)
            if all(f.payload[v] == f.payload[v | bit] for v in range(1 << m) if not v & bit):
                out.append(i)
        return out

    def connection_directions(self, f):
        """Indices i such that f factors through gamma_i (depends on
        (x_i, x_{i+1}) only through their sup)."""
        m = f.source
        out = []
        for i in range(1, m):
            bi, bi1 = 1 << (i - 1), 1 << i
            ok = True
            for v in range(1 << m):
                if not v & bi and not v & bi1:
                    a = f.payload[v | bi]
                    b = f.payload[v | bi1]
                    c = f.payload[v | bi | bi1]
                    if not (a == b == c):
                        ok = False
                        break
            if ok:
                out.append(i)
        return out

    def parse_object(self, s):
        return int(s)


# ---------------------------------------------------------------------------
# products, opposites, finite categories, slices


class ProductCat(ShapeCategory):
    """Product category; payload = pair of component morphisms."""

    def __init__(self, c1, c2, truncation=None):
        self.c1 = c1
        self.c2 = c2
        if truncation is None:
            truncation = c1.truncation + c2.truncation
        super().__init__(f"prod:{c1.name},{c2.name}", truncation)
        self.is_catenary = c1.is_catenary and c2.is_catenary
        self.is_finite = c1.is_finite and c2.is_finite
        self.kind = "prod"

    def dim(self, a):
        return self.c1.dim(a[0]) + self.c2.dim(a[1])

    def objects(self, d):
        out = []
        for d1 in range(d + 1):
            for a in self.c1.objects(d1):
                for b in self.c2.objects(d - d1):
                    out.append((a, b))
        return out

    def _hom(self, a, b):
        return [Morphism(a, b, (f, g))
                for f in self.c1.hom(a[0], b[0]) for g in self.c2.hom(a[1], b[1])]

    def compose(self, g, f):
        self.check_composable(g, f)
        return Morphism(f.source, g.target,
                        (self.c1.compose(g.payload[0], f.payload[0]),
                         self.c2.compose(g.payload[1], f.payload[1])))

    def identity(self, a):
        return Morphism(a, a, (self.c1.identity(a[0]), self.c2.identity(a[1])))

    def generator_list(self):
        gens = []
        for name, g in self.c1.generator_list():
            for b in self.c2.all_objects():
                if self.c1.dim(g.source) + self.c2.dim(b) <= self.truncation \
                        and self.c1.dim(g.target) + self.c2.dim(b) <= self.truncation:
                    gens.append((f"({name},id@{self.c2.object_name(b)})",
                                 Morphism((g.source, b), (g.target, b),
                                          (g, self.c2.identity(b)))))
        for name, g in self.c2.generator_list():
            for a in self.c1.all_objects():
                if self.c1.dim(a) + self.c2.dim(g.source) <= self.truncation \
                        and self.c1.dim(a) + self.c2.dim(g.target) <= self.truncation:
                    gens.append((f"(id@{self.c1.object_name(a)},{name})",
                                 Morphism((a, g.source), (a, g.target),
                                          (self.c1.identity(a), g))))
        return gens

    def codim1_monos(self, ab):
        if not self.is_catenary:
            raise NotCatenary(self.name)
        a, b = ab
        out = []
        for (f, src) in self.c1.codim1_monos(a):
            out.append((Morphism((src, b), ab, (f, self.c2.identity(b))), (src, b)))
        for (g, src) in self.c2.codim1_monos(b):
            out.append((Morphism((a, src), ab, (self.c1.identity(a), g)), (a, src)))
        return out

    def face_sign(self, f):
        """Product orientation: sg(phi, id) = sg(phi),
        sg(id@a, psi) = (-1)^{dim a} sg(psi)."""
        f1, f2 = f.payload
        if self.c2.is_identity(f2):
            return self.c1.face_sign(f1)
        if self.c1.is_identity(f1):
            sign = self.c2.face_sign(f2)
            return -sign if self.c1.dim(f1.source) % 2 else sign
        raise NotCatenary(f"{f} is not a product codim-1 mono")

    def is_mono(self, f, bound=None):
        return (self.c1.is_mono(f.payload[0], bound)
                and self.c2.is_mono(f.payload[1], bound))

    def parse_object(self, s):
        p1, p2 = s.split(",")
        return (self.c1.parse_object(p1), self.c2.parse_object(p2))

    def object_name(self, a):
        return f"{self.c1.object_name(a[0])},{self.c2.object_name(a[1])}"


class OppositeCat(ShapeCategory):
    """Opposite category; payload = the underlying morphism."""

    def __init__(self, inner):
        self.inner = inner
        super().__init__(f"op:{inner.name}", inner.truncation)
        self.is_finite = inner.is_finite
        self.kind = "op"

    def dim(self, a):
        return self.inner.dim(a)

    def objects(self, d):
        return self.inner.objects(d)

    def _hom(self, a, b):
        return [Morphism(a, b, m) for m in self.inner.hom(b, a)]

    def compose(self, g, f):
        self.check_composable(g, f)
        return Morphism(f.source, g.target, self.inner.compose(f.payload, g.payload))

    def identity(self, a):
        return Morphism(a, a, self.inner.identity(a))

    def generator_list(self):
        return [(f"op:{name}", Morphism(g.target, g.source, g))
                for name, g in self.inner.generator_list()]

    def parse_object(self, s):
        return self.inner.parse_object(s)

    def object_name(self, a):
        return self.inner.object_name(a)


class FiniteCat(ShapeCategory):
    """Explicitly presented finite category; payload = morphism label.

    Composition given as a table {(g, f): g after f}; identities are
    added automatically. Raises InvalidPresentation on broken axioms.
    """

    is_finite = True

    def __init__(self, name, objects, morphisms, comp, dims=None):
        """morphisms: {label: (source, target)} for non-identities;
        comp: {(glabel, flabel): label}."""
        self._objects = list(objects)
        self._dims = dict(dims) if dims else {a: 0 for a in self._objects}
        trunc = max(self._dims.values(), default=0)
        super().__init__(name, trunc)
        self._mor = {}
        for a in self._objects:
            self._mor[f"id_{a}"] = (a, a)
        for label, (s, t) in morphisms.items():
            if s not in self._objects or t not in self._objects:
                raise InvalidPresentation(f"morphism {label} has unknown endpoint")
            if label in self._mor:
                raise InvalidPresentation(f"duplicate label {label}")
            self._mor[label] = (s, t)
        self._comp = {}
        for (g, f), h in comp.items():
            self._comp[(g, f)] = h
        for label, (s, t) in self._mor.items():
            self._comp[(label, f"id_{s}")] = label
            self._comp[(f"id_{t}", label)] = label
        self._validate()
        self.kind = "finite"

    def _validate(self):
        for (g, f), h in self._comp.items():
            for lbl in (g, f, h):
                if lbl not in self._mor:
                    raise InvalidPresentation(f"unknown label {lbl} in composition table")
            if self._mor[f][1] != self._mor[g][0]:
                raise InvalidPresentation(f"({g}, {f}) not composable")
            if (self._mor[h][0], self._mor[h][1]) != (self._mor[f][0], self._mor[g][1]):
                raise InvalidPresentation(f"composite {h} has wrong endpoints")
        labels = list(self._mor)
        for f in labels:
            for g in labels:
                if self._mor[f][1] == self._mor[g][0] and (g, f) not in self._comp:
                    raise InvalidPresentation(f"missing composite ({g}, {f})")
        for f in labels:
            for g in labels:
                if self._mor[f][1] != self._mor[g][0]:
                    continue
                gf = self._comp[(g, f)]
                for h in labels:
                    if self._mor[g][1] != self._mor[h][0]:
                        continue
                    if self._comp[(h, gf)] != self._comp[(self._comp[(h, g)], f)]:
                        raise InvalidPresentation(
                            f"associativity fails on ({h}, {g}, {f})")

    def dim(self, a):
        return self._dims[a]

    def objects(self, d):
        return [a for a in self._objects if self._dims[a] == d]

    def _hom(self, a, b):
        return [Morphism(a, b, lbl) for lbl, (s, t) in self._mor.items()
                if s == a and t == b]

    def compose(self, g, f):
        self.check_composable(g, f)
        return Morphism(f.source, g.target, self._comp[(g.payload, f.payload)])

    def identity(self, a):
        return Morphism(a, a, f"id_{a}")

    def generator_list(self):
        return [(lbl, Morphism(s, t, lbl)) for lbl, (s, t) in self._mor.items()
                if not lbl.startswith("id_")]

    def parse_object(self, s):
        return s


def terminal_category():
    return FiniteCat("terminal", ["*"], {}, {})


def poset_category():
    """The poset 0 < 1."""
    return FiniteCat("poset01", ["0", "1"], {"u": ("0", "1")}, {})


def parallel_pair_category():
    """Free category on two parallel arrows x => y."""
    return FiniteCat("parallel_pair", ["x", "y"],
                     {"f": ("x", "y"), "g": ("x", "y")}, {})


class SliceCat(ShapeCategory):
    """Category of elements A/F: objects (a, x in F(a)); a morphism
    (a,x) -> (a',x') is phi: a -> a' with x = F(phi)(x'). The projection
    is a discrete fibration; dim(a, x) = dim a."""

    def __init__(self, base, f):
        self.base = base
        self.presheaf = f
        super().__init__(f"slice:{base.name}:{f.name}", base.truncation)
        self.is_catenary = base.is_catenary
        self.is_finite = base.is_finite
        self.kind = "slice"

    def dim(self, ax):
        return self.base.dim(ax[0])

    def objects(self, d):
        return [(a, x) for a in self.base.objects(d)
                for x in self.presheaf.elements(a)]

    def _hom(self, ax, by):
        a, x = ax
        b, y = by
        return [Morphism(ax, by, phi) for phi in self.base.hom(a, b)
                if self.presheaf.action(phi, y) == x]

    def compose(self, g, f):
        self.check_composable(g, f)
        return Morphism(f.source, g.target, self.base.compose(g.payload, f.payload))

    def identity(self, ax):
        return Morphism(ax, ax, self.base.identity(ax[0]))

    def lift(self, phi, x):
        """The unique lift of phi : a' -> a ending at (a, x)."""
        src = (phi.source, self.presheaf.action(phi, x))
        return Morphism(src, (phi.target, x), phi)

    def generator_list(self):
        gens = []
        for name, g in self.base.generator_list():
            for x in self.presheaf.elements(g.target):
                lifted = self.lift(g, x)
                gens.append((f"{name}@{x}", lifted))
        return gens

    def codim1_monos(self, ax):
        a, x = ax
        return [(self.lift(phi, x), (phi.source, self.presheaf.action(phi, x)))
                for (phi, _) in self.base.codim1_monos(a)]

    def face_sign(self, f):
        return self.base.face_sign(f.payload)

    def is_mono(self, f, bound=None):
        return self.base.is_mono(f.payload, bound)

    def object_name(self, ax):
        return f"{self.base.object_name(ax[0])}@{ax[1]}"


# ---------------------------------------------------------------------------
# set presheaves


class SetPresheaf:
    """Finite set presheaf on a truncated shape category."""

    def __init__(self, base, name="F"):
        self.base = base
        self.name = name

    def elements(self, a):
        raise NotImplementedError

    def action(self, f, x):
        raise NotImplementedError

    def size(self, a):
        return len(self.elements(a))

    def validate(self):
        """Contravariant functoriality on identities and all composable
        generator-after-morphism pairs within the truncation."""
        cat = self.base
        for a in cat.all_objects():
            for x in self.elements(a):
                assert self.action(cat.identity(a), x) == x, f"identity fails at {a}"
        gens = [g for _, g in cat.generator_list()]
        objs = set(cat.all_objects())
        for g in gens:
            for a in objs:
                for f in cat.hom(a, g.source):
                    gf = cat.compose(g, f)
                    for x in self.elements(g.target):
                        lhs = self.action(gf, x)
                        rhs = self.action(f, self.action(g, x))
                        assert lhs == rhs, f"functoriality fails on {g} after {f}"
        return True


class TerminalSet(SetPresheaf):
    def __init__(self, base):
        super().__init__(base, "terminal")

    def elements(self, a):
        return ("*",)

    def action(self, f, x):
        return "*"


class EmptySet(SetPresheaf):
    def __init__(self, base):
        super().__init__(base, "empty")

    def elements(self, a):
        return ()

    def action(self, f, x):
        raise KeyError("empty presheaf has no elements")


class RepresentableSet(SetPresheaf):
    """hom(-, a): elements at x are the morphisms x -> a."""

    def __init__(self, base, a):
        super().__init__(base, f"y({base.object_name(a)})")
        self.at = a

    def elements(self, x):
        return self.base.hom(x, self.at)

    def action(self, f, u):
        return self.base.compose(u, f)


class CircleSet(SetPresheaf):
    """The simplicial circle: one vertex, one nondegenerate edge.

    The n-simplices are the basepoint '*' plus the nonconstant monotone
    maps [n] -> [1], encoded by their number k of leading zeros.
    """

    def __init__(self, base):
        if base.kind != "delta":
            raise InvalidPresentation("the circle lives over delta")
        super().__init__(base, "circle")

    def elements(self, n):
        return ("*",) + tuple(range(1, n + 1))

    def action(self, f, x):
        n = f.source
        if x == "*":
            return "*"
        k = x  # element k of S^1_m is the map with k zeros: 0..0 1..1
        zeros = sum(1 for v in f.payload if v < k)
        if zeros == 0 or zeros == n + 1:
            return "*"
        return zeros


class SubFunctor(SetPresheaf):
    """Subpresheaf of a disjoint union of representables, generated by a
    set of cells and closed under the contravariant action."""

    def __init__(self, base, cells, name="sub"):
        """cells: iterable of (tag, morphism u : x -> a_tag)."""
        super().__init__(base, name)
        closure = {a: set() for a in base.all_objects()}
        work = list(cells)
        for tag, u in work:
            closure[u.source].add((tag, u))
        idx = 0
        while idx < len(work):
            tag, u = work[idx]
            idx += 1
            for b in base.all_objects():
                for f in base.hom(b, u.source):
                    v = (tag, base.compose(u, f))
                    if v not in closure[b]:
                        closure[b].add(v)
                        work.append(v)
        self._elems = {a: tuple(sorted(closure[a], key=lambda c: (c[0], _mkey(c[1]))))
                       for a in closure}

    def elements(self, a):
        return self._elems.get(a, ())

    def action(self, f, x):
        tag, u = x
        return (tag, self.base.compose(u, f))


def boundary_set(base, n):
    """The boundary of the n-simplex as a subfunctor of y(Delta_n)."""
    cells = [(0, f) for (f, _) in base.codim1_monos(n)]
    return SubFunctor(base, cells, name=f"boundary{n}")


class TableSet(SetPresheaf):
    """Set presheaf given by element counts and generator action tables;
    actions of other morphisms are derived by a generator closure."""

    def __init__(self, base, counts, gen_actions, name="table"):
        super().__init__(base, name)
        self._counts = dict(counts)
        self._table = {}
        for a in base.all_objects():
            ident = base.identity(a)
            self._table[ident] = tuple(range(self._counts.get(a, 0)))
        named = dict(base.generator_list())
        for gname, arr in gen_actions.items():
            g = named[gname]
            if len(arr) != self._counts.get(g.target, 0):
                raise InvalidPresentation(f"action {gname} has wrong length")
            if any(not 0 <= v < self._counts.get(g.source, 0) for v in arr):
                raise InvalidPresentation(f"action {gname} out of range")
            self._table[g] = tuple(arr)
        for gname, g in base.generator_list():
            if g not in self._table:
                raise InvalidPresentation(f"missing action for generator {gname}")
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
            tf = self._table[f]
            for g in gens:
                if g.source != f.target:
                    continue
                gf = base.compose(g, f)
                tg = self._table[g]
                # contravariant: act by g first, then by f
                comp = tuple(tf[v] for v in tg)
                old = self._table.get(gf)
                if old is None:
                    self._table[gf] = comp
                    work.append(gf)
                elif old != comp:
                    raise InvalidPresentation(
                        f"relation broken: {gf} has two different actions")

    def _check_cover(self):
        base = self.base
        for a in base.all_objects():
            for b in base.all_objects():
                for f in base.hom(a, b):
                    if f not in self._table:
                        raise InvalidPresentation(
                            f"generators do not reach {f}; cannot derive its action")

    def elements(self, a):
        return tuple(range(self._counts.get(a, 0)))

    def action(self, f, x):
        return self._table[f][x]

    def to_json(self, cat_spec=None):
        base = self.base
        return {
            "category": cat_spec or base.name,
            "truncation": base.truncation,
            "elements": {base.object_name(a): self._counts.get(a, 0)
                         for a in base.all_objects()},
            "actions": {name: list(self._table[g])
                        for name, g in base.generator_list()},
        }


def set_presheaf_from_json(base, obj, name="table"):
    counts = {base.parse_object(k): v for k, v in obj["elements"].items()}
    return TableSet(base, counts, obj["actions"], name=name)


def load_set_presheaf(base, path):
    with open(path) as fh:
        return set_presheaf_from_json(base, json.load(fh), name=path)


# ---------------------------------------------------------------------------
# nerves


def nerve(cat, n):
    """All length-n composable chains of a finite category (identities
    allowed); a 0-chain is an object."""
    if not cat.is_finite:
        raise InfiniteCategory(f"{cat.name} is not a finite category")
    if n == 0:
        return [(a,) for a in cat.all_objects()]
    chains = [(f,) for a in cat.all_objects() for b in cat.all_objects()
              for f in cat.hom(a, b)]
    for _ in range(n - 1):
        chains = [c + (g,) for c in chains
                  for b in cat.all_objects() for g in cat.hom(c[-1].target, b)]
    return chains


def nerve_face(cat, chain, i):
    """Face d_i of an n-chain: drop an end or compose at i."""
    n = len(chain)
    if chain and isinstance(chain[0], Morphism):
        if i == 0:
            return chain[1:] if n > 1 else (chain[0].target,)
        if i == n:
            return chain[:-1] if n > 1 else (chain[0].source,)
        return chain[:i - 1] + (cat.compose(chain[i], chain[i - 1]),) + chain[i + 1:]
    raise ValueError("faces of 0-chains do not exist")


def nerve_degeneracy(cat, chain, i):
    if chain and not isinstance(chain[0], Morphism):
        return (cat.identity(chain[0]),)
    objs = [chain[0].source] + [f.target for f in chain]
    return chain[:i] + (cat.identity(objs[i]),) + chain[i:]


def chain_is_degenerate(cat, chain):
    return any(isinstance(f, Morphism) and cat.is_identity(f) for f in chain)


# ---------------------------------------------------------------------------
# category spec grammar


def make_category(spec, truncation, presheaf_loader=None):
    """Build a category from the CLI grammar:

    delta, delta^N, delta_mono, globe, globe_ref, cube, cube_c,
    theta<N>, xi<N>, slice:<cat>:<presheaf>, op:<cat>, prod:<cat>,<cat>,
    finite:<terminal|poset01|parallel_pair>.
    """
    spec = spec.strip()
    if spec == "delta":
        return DeltaCat(truncation)
    if spec == "delta_mono":
        return DeltaMonoCat(truncation)
    if spec.startswith("delta^"):
        n = int(spec[len("delta^"):])
        if n < 1:
            raise InvalidPresentation("delta^N needs N >= 1")
        cat = DeltaCat(truncation)
        for _ in range(n - 1):
            cat = ProductCat(DeltaCat(truncation), cat, truncation)
        return cat
    if spec == "globe":
        return GlobeCat(truncation)
    if spec == "globe_ref":
        return GlobeCat(truncation, reflexive=True)
    if spec == "cube":
        return CubeCat(truncation)
    if spec == "cube_c":
        return CubeCat(truncation, connections=True)
    if spec.startswith("theta"):
        from .wreath import theta
        return theta(int(spec[len("theta"):]), truncation)
    if spec.startswith("xi"):
        from .wreath import xi
        return xi(int(spec[len("xi"):]), truncation)
    if spec.startswith("op:"):
        return OppositeCat(make_category(spec[3:], truncation, presheaf_loader))
    if spec.startswith("prod:"):
        left, right = spec[len("prod:"):].split(",", 1)
        return ProductCat(make_category(left, truncation, presheaf_loader),
                          make_category(right, truncation, presheaf_loader),
                          truncation)
    if spec.startswith("slice:"):
        _, inner, pname = spec.split(":", 2)
        base = make_category(inner, truncation, presheaf_loader)
        return SliceCat(base, builtin_set_presheaf(base, pname, presheaf_loader))
    if spec.startswith("finite:"):
        name = spec[len("finite:"):]
        builders = {"terminal": terminal_category, "poset01": poset_category,
                    "parallel_pair": parallel_pair_category}
        if name not in builders:
            raise InvalidPresentation(f"unknown finite category {name}")
        return builders[name]()
    raise InvalidPresentation(f"unknown category spec {spec!r}")


def builtin_set_presheaf(base, name, loader=None):
    if name == "terminal":
        return TerminalSet(base)
    if name == "empty":
        return EmptySet(base)
    if name == "circle":
        return CircleSet(base)
    if name.startswith("boundary"):
        return boundary_set(base, int(name[len("boundary"):]))
    if name.startswith("rep"):
        return RepresentableSet(base, base.parse_object(name[3:]))
    if loader is not None:
        return loader(base, name)
    return load_set_presheaf(base, name)
