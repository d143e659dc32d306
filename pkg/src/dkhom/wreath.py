"""Wreath products of the simplex category: the full wreath building the
cell categories theta_n, the restricted wreath building xi_n, the
canonical functors from powers of delta, and planar-tree bookkeeping.

Full-wreath objects are pairs (width, components); a morphism is a base
monotone map phi together with one fiber morphism per element of each
window (phi(i-1), phi(i)]. Empty windows store no fibers, which makes
the constant-base identification structural.

Restricted-wreath objects are the bottom object "pt" and pairs (n, a)
with n >= 1; payloads are ('nc', phi, psi) with phi non-constant, or
('c', phi) with phi constant and no fiber data.
"""

from __future__ import annotations

from itertools import product as iproduct

from .errors import InvalidPresentation, NotCatenary
from .shapecat import (
    DeltaCat,
    FiniteCat,
    Morphism,
    ShapeCategory,
    terminal_category,
)


def _monotone_maps(n, m):
    """Payloads of monotone maps [n] -> [m]."""
    from itertools import combinations_with_replacement
    return combinations_with_replacement(range(m + 1), n + 1)


def _is_constant(phi):
    return len(set(phi)) == 1


class WreathCat(ShapeCategory):
    """The wreath product of delta with a shape category A."""

    def __init__(self, inner, truncation, name=None):
        self.inner = inner
        super().__init__(name or f"delta_wr_{inner.name}", truncation)
        self.kind = "wreath"

    # objects ----------------------------------------------------------

    def dim(self, obj):
        """Heuristic dimension width + sum of component dimensions; used
        for enumeration bounds only."""
        k, comps = obj
        return k + sum(self.inner.dim(a) for a in comps)

    def objects(self, d):
        out = []
        for k in range(d + 1):
            rest = d - k
            if k == 0:
                if rest == 0:
                    out.append((0, ()))
                continue
            for comps in self._component_lists(k, rest):
                out.append((k, comps))
        return out

    def _component_lists(self, k, total):
        if k == 0:
            return [()] if total == 0 else []
        out = []
        for d0 in range(total + 1):
            for a in self.inner.objects(d0):
                for rest in self._component_lists(k - 1, total - d0):
                    out.append((a,) + rest)
        return out

    # morphisms ----------------------------------------------------------

    def _windows(self, phi, n):
        return [range(phi[i - 1] + 1, phi[i] + 1) for i in range(1, n + 1)]

    def _hom(self, s, t):
        n, comps = s
        m, comps2 = t
        out = []
        for phi in _monotone_maps(n, m):
            slot_choices = []
            ok = True
            for i in range(1, n + 1):
                for j in range(phi[i - 1] + 1, phi[i] + 1):
                    homs = self.inner.hom(comps[i - 1], comps2[j - 1])
                    if not homs:
                        ok = False
                        break
                    slot_choices.append(homs)
                if not ok:
                    break
            if not ok:
                continue
            for pick in iproduct(*slot_choices):
                fibers = []
                idx = 0
                for i in range(1, n + 1):
                    width = phi[i] - phi[i - 1]
                    fibers.append(tuple(pick[idx:idx + width]))
                    idx += width
                out.append(Morphism(s, t, (phi, tuple(fibers))))
        return out

    def compose(self, g, f):
        self.check_composable(g, f)
        phi, fib = f.payload
        phi2, fib2 = g.payload
        n = f.source[0]
        comp_phi = tuple(phi2[v] for v in phi)
        fibers = []
        for i in range(1, n + 1):
            window = []
            for j2 in range(comp_phi[i - 1] + 1, comp_phi[i] + 1):
                # unique i' with phi(i-1) < i' <= phi(i), phi2(i'-1) < j2 <= phi2(i')
                ip = next(p for p in range(phi[i - 1] + 1, phi[i] + 1)
                          if phi2[p - 1] < j2 <= phi2[p])
                inner_g = fib2[ip - 1][j2 - phi2[ip - 1] - 1]
                inner_f = fib[i - 1][ip - phi[i - 1] - 1]
                window.append(self.inner.compose(inner_g, inner_f))
            fibers.append(tuple(window))
        return Morphism(f.source, g.target, (comp_phi, tuple(fibers)))

    def identity(self, obj):
        k, comps = obj
        return Morphism(obj, obj, (tuple(range(k + 1)),
                                   tuple((self.inner.identity(a),) for a in comps)))

    # naming ------------------------------------------------------------

    def object_name(self, obj):
        k, comps = obj
        if all(self._is_bottom(a) for a in comps):
            return str(k)
        return f"{k};({','.join(self.inner.object_name(a) for a in comps)})"

    def _is_bottom(self, a):
        return self.inner.dim(a) == 0 and a == self.inner_bottom()

    def inner_bottom(self):
        bots = self.inner.objects(0)
        if len(bots) != 1:
            raise InvalidPresentation(f"{self.inner.name} has no unique bottom object")
        return bots[0]

    def bottom(self):
        return (0, ())

    def embed_delta(self, n):
        """The canonical copy of Delta_n."""
        return (n, (self.inner_bottom(),) * n)

    def parse_object(self, s):
        return parse_wreath_object(self, s)


def parse_wreath_object(cat, s):
    """Grammar: "2;(1,1)" for [Delta_2;(a_1,a_2)], nested recursively;
    a bare number is the canonical copy of that simplex."""
    s = s.strip()
    if ";" not in s:
        n = int(s)
        if isinstance(cat, WreathCat):
            return cat.embed_delta(n)
        if isinstance(cat, WreathRestrictedCat):
            return cat.embed_delta(n)
        return cat.parse_object(s)
    head, rest = s.split(";", 1)
    n = int(head)
    rest = rest.strip()
    if not (rest.startswith("(") and rest.endswith(")")):
        raise InvalidPresentation(f"bad object spec {s!r}")
    parts = _split_commas(rest[1:-1])
    if isinstance(cat, WreathRestrictedCat):
        if len(parts) != 1:
            raise InvalidPresentation("restricted wreath objects have one component")
        if n == 0:
            return cat.bottom()
        inner = parse_wreath_object(cat.inner, parts[0]) if not cat.inner.is_finite \
            else cat.inner_bottom()
        return cat.normalize_object(n, inner)
    comps = []
    for p in parts:
        comps.append(parse_wreath_object(cat.inner, p) if not cat.inner.is_finite
                     else cat.inner_bottom())
    if len(comps) != n:
        raise InvalidPresentation(f"{s!r}: width {n} but {len(comps)} components")
    return (n, tuple(comps))


def _split_commas(s):
    parts, depth, cur = [], 0, []
    for ch in s:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if ch == "," and depth == 0:
            parts.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    if cur or parts:
        parts.append("".join(cur))
    return [p.strip() for p in parts]


class WreathRestrictedCat(ShapeCategory):
    """The restricted wreath product generated by the image of the
    diagonal functor from delta x A."""

    def __init__(self, inner, truncation, name=None):
        self.inner = inner
        super().__init__(name or f"delta_rwr_{inner.name}", truncation)
        bots = inner.objects(0)
        if len(bots) != 1:
            raise InvalidPresentation(f"{inner.name} has no unique bottom object")
        self._inner_bottom = bots[0]
        self.is_catenary = inner.is_catenary or inner.is_finite
        self.kind = "wreath_restricted"
        self.delta = DeltaCat(truncation)

    def bottom(self):
        return "pt"

    def inner_bottom(self):
        return self._inner_bottom

    def normalize_object(self, n, a):
        if n == 0:
            return "pt"
        return (n, a)

    def embed_delta(self, n):
        if n == 0:
            return "pt"
        return (n, self.inner_bottom())

    def dim(self, obj):
        if obj == "pt":
            return 0
        n, a = obj
        return n + self.inner.dim(a)

    def objects(self, d):
        if d == 0:
            return ["pt"]
        out = []
        for n in range(1, d + 1):
            for a in self.inner.objects(d - n):
                out.append((n, a))
        return out

    def _base_dims(self, s, t):
        n = 0 if s == "pt" else s[0]
        m = 0 if t == "pt" else t[0]
        return n, m

    def _hom(self, s, t):
        n, m = self._base_dims(s, t)
        out = []
        for phi in _monotone_maps(n, m):
            if _is_constant(phi):
                out.append(Morphism(s, t, ("c", phi)))
        if s != "pt" and t != "pt":
            for phi in _monotone_maps(n, m):
                if not _is_constant(phi):
                    for psi in self.inner.hom(s[1], t[1]):
                        out.append(Morphism(s, t, ("nc", phi, psi)))
        return out

    def compose(self, g, f):
        self.check_composable(g, f)
        phi = f.payload[1]
        phi2 = g.payload[1]
        base = tuple(phi2[v] for v in phi)
        if f.payload[0] == "nc" and g.payload[0] == "nc" and not _is_constant(base):
            return Morphism(f.source, g.target,
                            ("nc", base, self.inner.compose(g.payload[2], f.payload[2])))
        return Morphism(f.source, g.target, ("c", base))

    def identity(self, obj):
        if obj == "pt":
            return Morphism(obj, obj, ("c", (0,)))
        n, a = obj
        return Morphism(obj, obj, ("nc", tuple(range(n + 1)), self.inner.identity(a)))

    # catenary structure --------------------------------------------------

    def codim1_monos(self, obj):
        if obj == "pt":
            return []
        n, a = obj
        bottom = self.inner_bottom()
        delta = self.delta
        out = []
        if self.inner.dim(a) == 0:
            # the canonical copy of Delta_n: cofaces only
            for k in range(n + 1):
                phi = delta.coface(k, n).payload
                if n == 1:
                    out.append((Morphism("pt", obj, ("c", phi)), "pt"))
                else:
                    src = (n - 1, a)
                    out.append((Morphism(src, obj, ("nc", phi, self.inner.identity(a))), src))
            return out
        if n >= 2:
            for k in range(n + 1):
                phi = delta.coface(k, n).payload
                src = (n - 1, a)
                out.append((Morphism(src, obj, ("nc", phi, self.inner.identity(a))), src))
        for (psi, psrc) in self.inner.codim1_monos(a):
            src = (n, psrc)
            out.append((Morphism(src, obj, ("nc", tuple(range(n + 1)), psi)), src))
        return out

    def face_sign(self, f):
        """Koszul signs: sg(delta_k wr id) = (-1)^k,
        sg(id_{Delta_i} wr psi) = (-1)^i sg(psi)."""
        if f.payload[0] == "c":
            # a coface Delta_0 -> Delta_1 constant at v misses vertex 1 - v
            (v,) = set(f.payload[1])
            return 1 if (1 - v) % 2 == 0 else -1
        _, phi, psi = f.payload
        src_width = f.source[0]
        tgt_width = f.target[0]
        if src_width == tgt_width:
            # id_{Delta_n} wr psi
            sign = self.inner.face_sign(psi)
            return -sign if src_width % 2 else sign
        missing = set(range(tgt_width + 1)) - set(phi)
        assert len(missing) == 1, f"{f} is not a codim-1 mono"
        return -1 if missing.pop() % 2 else 1

    def is_mono(self, f, bound=None):
        if f.payload[0] == "c":
            return f.source == "pt"
        _, phi, psi = f.payload
        return len(set(phi)) == len(phi) and self.inner.is_mono(psi, bound)

    def object_name(self, obj):
        if obj == "pt":
            return "0"
        n, a = obj
        if self.inner.dim(a) == 0:
            return str(n)
        return f"{n};({self.inner.object_name(a)})"

    def parse_object(self, s):
        return parse_wreath_object(self, s)

    def normal_form(self, obj):
        """Flat tuple of widths (i_1, ..., i_k), empty for the bottom."""
        if obj == "pt":
            return ()
        n, a = obj
        if isinstance(self.inner, WreathRestrictedCat):
            return (n,) + self.inner.normal_form(a)
        return (n,)


def theta(n, truncation):
    """theta_0 is the terminal category; theta_{k+1} wreathes delta
    around theta_k."""
    if n < 0:
        raise InvalidPresentation("theta level must be >= 0")
    cat = terminal_category()
    for k in range(n):
        cat = WreathCat(cat, truncation, name=f"theta{k + 1}")
    return cat


def xi(n, truncation):
    if n < 0:
        raise InvalidPresentation("xi level must be >= 0")
    cat = terminal_category()
    for k in range(n):
        cat = WreathRestrictedCat(cat, truncation, name=f"xi{k + 1}")
    return cat


def wreath(inner, truncation):
    """Generic wreath of delta around a shape category."""
    return WreathCat(inner, truncation)


def wreath_restricted(inner, truncation):
    return WreathRestrictedCat(inner, truncation)


# ---------------------------------------------------------------------------
# functors from powers of delta


class Functor:
    """Concrete functor between shape categories."""

    def __init__(self, source, target, obj_map, mor_map, name="F"):
        self.source = source
        self.target = target
        self._obj = obj_map
        self._mor = mor_map
        self.name = name

    def obj(self, a):
        return self._obj(a)

    def mor(self, f):
        return self._mor(f)

    def check(self, max_dim=2):
        src = self.source
        objs = []
        for d in range(min(max_dim, src.truncation) + 1):
            objs.extend(src.objects(d))
        for a in objs:
            assert self.mor(src.identity(a)) == self.target.identity(self.obj(a))
        for a in objs:
            for b in objs:
                for f in src.hom(a, b):
                    mf = self.mor(f)
                    assert mf.source == self.obj(a) and mf.target == self.obj(b)
                    for c in objs:
                        for g in src.hom(b, c):
                            assert self.mor(src.compose(g, f)) == \
                                self.target.compose(self.mor(g), mf)
        return True


def mu(delta_cat, inner, wreath_cat):
    """mu_A : delta x A -> delta wr A, (Delta_n, a) -> [Delta_n; (a,..,a)]."""

    def obj(pair):
        n, a = pair
        return (n, (a,) * n)

    def mor(f):
        phi, psi = f.payload
        n = f.source[0]
        fibers = []
        for i in range(1, n + 1):
            width = phi.payload[i] - phi.payload[i - 1]
            fibers.append((psi,) * width)
        return Morphism(obj(f.source), obj(f.target),
                        (phi.payload, tuple(fibers)))

    return Functor(None, wreath_cat, obj, mor, name="mu")


def mu_prime(rw_cat):
    """mu'_A : delta x A -> restricted wreath, on objects and morphism pairs."""

    def obj(pair):
        n, a = pair
        return rw_cat.normalize_object(n, a)

    def mor_pair(phi_payload, psi, src_pair, tgt_pair):
        s = obj(src_pair)
        t = obj(tgt_pair)
        if _is_constant(phi_payload) or s == "pt":
            return Morphism(s, t, ("c", phi_payload))
        return Morphism(s, t, ("nc", phi_payload, psi))

    return obj, mor_pair


def m_functor(level_cat, objs):
    """m_n on objects: nested wreath of a tuple of simplex widths."""
    if not isinstance(level_cat, WreathCat):
        return level_cat.objects(0)[0]
    if not objs:
        return level_cat.bottom()
    head, rest = objs[0], objs[1:]
    inner_obj = m_functor(level_cat.inner, rest)
    return (head, (inner_obj,) * head)


def m_functor_mor(level_cat, payloads, src, tgt):
    """m_n on morphisms: payloads is a tuple of delta map payloads."""
    if not isinstance(level_cat, WreathCat):
        return level_cat.identity(level_cat.objects(0)[0])
    s = m_functor(level_cat, src)
    t = m_functor(level_cat, tgt)
    phi = payloads[0] if payloads else (0,)
    inner = m_functor_mor(level_cat.inner, payloads[1:], src[1:], tgt[1:])
    n = s[0]
    fibers = []
    for i in range(1, n + 1):
        width = phi[i] - phi[i - 1]
        fibers.append((inner,) * width)
    return Morphism(s, t, (phi, tuple(fibers)))


def m_prime_functor(level_cat, objs):
    """m'_n on objects, with the zero-entry collapse built in."""
    if not isinstance(level_cat, WreathRestrictedCat):
        return level_cat.objects(0)[0]
    if not objs or objs[0] == 0:
        return level_cat.bottom()
    return level_cat.normalize_object(objs[0], m_prime_functor(level_cat.inner, objs[1:]))


def m_prime_functor_mor(level_cat, payloads, src, tgt):
    if not isinstance(level_cat, WreathRestrictedCat):
        return level_cat.identity(level_cat.objects(0)[0])
    s = m_prime_functor(level_cat, src)
    t = m_prime_functor(level_cat, tgt)
    phi = payloads[0] if payloads else (0,)
    if s == "pt" or _is_constant(phi):
        return Morphism(s, t, ("c", phi))
    psi = m_prime_functor_mor(level_cat.inner, payloads[1:], src[1:], tgt[1:])
    return Morphism(s, t, ("nc", phi, psi))


def diag_into_xi(level_cat, n_levels):
    """m'_n o diag : delta -> xi_n as a Functor over a delta source."""
    delta = DeltaCat(level_cat.truncation)

    def obj(i):
        return m_prime_functor(level_cat, (i,) * n_levels)

    def mor(f):
        return m_prime_functor_mor(level_cat, (f.payload,) * n_levels,
                                   (f.source,) * n_levels, (f.target,) * n_levels)

    return Functor(delta, level_cat, obj, mor, name="m'diag")


def diag_into_theta(level_cat, n_levels):
    delta = DeltaCat(level_cat.truncation)

    def obj(i):
        return m_functor(level_cat, (i,) * n_levels)

    def mor(f):
        return m_functor_mor(level_cat, (f.payload,) * n_levels,
                             (f.source,) * n_levels, (f.target,) * n_levels)

    return Functor(delta, level_cat, obj, mor, name="mdiag")


# ---------------------------------------------------------------------------
# planar trees and dimension tables


def tree_of(cat, obj):
    """Planar tree of a nested wreath object: a node is a tuple of child
    subtrees; components of width 0 contribute childless nodes."""
    if isinstance(cat, WreathCat):
        k, comps = obj
        return tuple(tree_of(cat.inner, a) for a in comps)
    if isinstance(cat, WreathRestrictedCat):
        if obj == "pt":
            return ()
        n, a = obj
        return tuple(tree_of(cat.inner, a) for _ in range(n))
    return ()


def dimension_table(tree):
    """Leaf heights over meet heights, reading the tree left to right.

    Leaves are childless nodes other than a childless root; the meet of
    consecutive leaves is their deepest common ancestor.
    """
    leaves = []

    def walk(node, height, path):
        if not node:
            if height > 0:
                leaves.append((height, tuple(path)))
            return
        for idx, child in enumerate(node):
            walk(child, height + 1, path + [idx])

    walk(tree, 0, [])
    tops = [h for h, _ in leaves]
    meets = []
    for (h1, p1), (h2, p2) in zip(leaves, leaves[1:]):
        m = 0
        for a, b in zip(p1, p2):
            if a == b:
                m += 1
            else:
                break
        meets.append(m)
    return tuple(tops), tuple(meets)
