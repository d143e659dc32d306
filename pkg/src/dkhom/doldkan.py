"""The three strict Dold-Kan correspondences and their cross-checks:
simplicial (Moore complex, degeneracy subcomplex, normalized quotient,
kernel-intersection subcomplex, and the inverse), cubical with
connections (Brown-Higgins), reflexive globular (Bourn), plus the
Eilenberg-Zilber comparison and the Whitehead counterexample graph.

Quotient complexes use the canonical nondegenerate basis whenever the
presheaf carries a cell basis; otherwise the quotient is presented by a
split projection computed from Smith normal form, and both paths give
equal homology (the test suite checks this on overlapping cases).
"""

from __future__ import annotations

import random
from itertools import product as iproduct

from .chains import ChainComplex, DoubleComplex, total_complex
from .errors import BaseMismatch, ShapeMismatch
from .intlinalg import (
    IntMatrix,
    hnf_rows,
    kernel_basis,
    matrix_from_columns,
    solve_matrix,
    split_quotient,
)
from .presheaf import (
    FreeAbelianization,
    FunctionalPresheaf,
    constant_z,
    free_abelianization,
    representable,
    restrict,
)
from .shapecat import CubeCat, DeltaCat, GlobeCat, Morphism, SubFunctor


# ---------------------------------------------------------------------------
# simplicial


def _require_kind(x, kind):
    if getattr(x.base, "kind", None) != kind:
        raise BaseMismatch(f"{x.name} lives on {x.base.name}, expected {kind}")


def simplicial_C(x, degree):
    """The Moore (unnormalized) complex: degree k group X_k with the
    alternating face sum."""
    _require_kind(x, "delta")
    cat = x.base
    ranks = [x.rank(k) for k in range(degree + 1)]
    diffs = []
    for k in range(1, degree + 1):
        m = None
        for i in range(k + 1):
            term = x.matrix(cat.coface(i, k)).scale(-1 if i % 2 else 1)
            m = term if m is None else m + term
        diffs.append(m)
    return ChainComplex(ranks, diffs, validate=False)


def _degeneracy_generators(x, k, gens):
    """Columns generating the degenerate subgroup of X_k."""
    cols = []
    for g in gens(k):
        m = x.matrix(g)
        for j in range(m.cols):
            cols.append(m.column(j))
    return cols


def _sub_complex(moore, gen_cols):
    """Subcomplex spanned by generator columns: lattice bases per degree
    plus the restricted differential; raises if not closed under d."""
    bases = []
    for k in range(moore.truncation_degree + 1):
        rows = hnf_rows(gen_cols[k])
        bases.append(matrix_from_columns([list(r) for r in rows], moore.ranks[k]))
    ranks = [b.cols for b in bases]
    diffs = []
    for k in range(1, moore.truncation_degree + 1):
        image = moore.diff(k).mul(bases[k])
        m = solve_matrix(bases[k - 1], image)
        if m is None:
            raise ShapeMismatch("generators do not span a subcomplex")
        diffs.append(m)
    return ChainComplex(ranks, diffs, validate=False), bases


def simplicial_D(x, degree):
    """The degeneracy subcomplex DX of the Moore complex; returns
    (complex, lattice bases)."""
    _require_kind(x, "delta")
    cat = x.base
    moore = simplicial_C(x, degree)

    def gens(k):
        return [cat.codegeneracy(i, k - 1) for i in range(k)] if k else []

    cols = [_degeneracy_generators(x, k, gens) for k in range(degree + 1)]
    return _sub_complex(moore, cols)


def _canonical_degenerate_indices(x, obj, gens):
    """Indices of cells in the image of some degeneracy action (only for
    presheaves carrying a cell basis)."""
    f = x.set_presheaf
    elems = f.elements(obj)
    idx = {e: i for i, e in enumerate(elems)}
    out = set()
    for g in gens:
        # the action of g : a -> b carries cells of F(b) into F(a) = F(obj)
        for y in f.elements(g.target):
            out.add(idx[f.action(g, y)])
    return out


def _quotient_complex(moore, x, degree, degen_gens_at):
    """Quotient of the Moore complex by the span of degeneracy images.

    Cell-basis presheaves keep the nondegenerate cells as an explicit
    basis; otherwise a split projection presents the quotient.
    """
    if isinstance(x, FreeAbelianization):
        keep = []
        for k in range(degree + 1):
            degen = _canonical_degenerate_indices(x, _obj_of(x, k), degen_gens_at(k))
            keep.append([i for i in range(moore.ranks[k]) if i not in degen])
        ranks = [len(kp) for kp in keep]
        diffs = []
        for k in range(1, degree + 1):
            m = moore.diff(k)
            diffs.append(m.submatrix(keep[k - 1], keep[k]))
        return ChainComplex(ranks, diffs, validate=False)
    projections = []
    sections = []
    for k in range(degree + 1):
        cols = _degeneracy_generators(x, k, lambda _k: degen_gens_at(k))
        rows = hnf_rows(cols)
        standard = {r.index(1) for r in rows
                    if sum(map(abs, r)) == 1 and max(r) == 1}
        if len(standard) == len(rows):
            # coordinate sublattice: keep the complementary coordinates
            keep = [i for i in range(moore.ranks[k]) if i not in standard]
            p = IntMatrix(len(keep), moore.ranks[k],
                          [[1 if j == i else 0 for j in range(moore.ranks[k])]
                           for i in keep])
            s = p.transpose()
        else:
            gens = matrix_from_columns([list(r) for r in rows], moore.ranks[k])
            p, s = split_quotient(moore.ranks[k], gens)
        projections.append(p)
        sections.append(s)
    ranks = [p.rows for p in projections]
    diffs = [projections[k - 1].mul(moore.diff(k)).mul(sections[k])
             for k in range(1, degree + 1)]
    return ChainComplex(ranks, diffs, validate=False)


def _obj_of(x, k):
    # shape categories here index objects by their dimension
    return k


def simplicial_CN(x, degree):
    """C_N X = CX / DX."""
    _require_kind(x, "delta")
    cat = x.base
    moore = simplicial_C(x, degree)
    return _quotient_complex(
        moore, x, degree,
        lambda k: [cat.codegeneracy(i, k - 1) for i in range(k)] if k else [])


def simplicial_N(x, degree):
    """(NX)_k = intersection of ker d_i for 1 <= i <= k, with the Moore
    differential restricted; returns (complex, kernel bases)."""
    _require_kind(x, "delta")
    cat = x.base
    moore = simplicial_C(x, degree)
    bases = [IntMatrix.identity(x.rank(0))]
    for k in range(1, degree + 1):
        basis = IntMatrix.identity(x.rank(k))
        for i in range(1, k + 1):
            restricted = x.matrix(cat.coface(i, k)).mul(basis)
            basis = basis.mul(kernel_basis(restricted))
        bases.append(basis)
    ranks = [b.cols for b in bases]
    diffs = []
    for k in range(1, degree + 1):
        image = moore.diff(k).mul(bases[k])
        m = solve_matrix(bases[k - 1], image)
        assert m is not None, "N is not a subcomplex"
        diffs.append(m)
    return ChainComplex(ranks, diffs, validate=False), bases


def n_to_cn_iso(x, degree):
    """The composite NX -> CX -> C_N X, degreewise; each component must
    be a square unimodular matrix (Prop-level regression)."""
    _require_kind(x, "delta")
    cat = x.base
    _, bases = simplicial_N(x, degree)
    comps = []
    if isinstance(x, FreeAbelianization):
        for k in range(degree + 1):
            degen = _canonical_degenerate_indices(
                x, k, [cat.codegeneracy(i, k - 1) for i in range(k)] if k else [])
            keep = [i for i in range(x.rank(k)) if i not in degen]
            comps.append(bases[k].submatrix(keep, range(bases[k].cols)))
        return comps
    for k in range(degree + 1):
        cols = _degeneracy_generators(
            x, k, lambda _k: [cat.codegeneracy(i, k - 1) for i in range(k)] if k else [])
        rows = hnf_rows(cols)
        gens = matrix_from_columns([list(r) for r in rows], x.rank(k))
        p, _ = split_quotient(x.rank(k), gens)
        comps.append(p.mul(bases[k]))
    return comps


def simplicial_Gamma(c, degree):
    """The inverse equivalence: Gamma(C)_n sums C_i over the epis out of
    Delta_n, with the epi-mono-factorization action."""
    cat = DeltaCat(degree)

    def epis(n):
        return cat.epis_onto(n)

    def rank(n):
        return sum(c.rank(e.target) for e in epis(n))

    def matrix(u):
        # contravariant: Gamma(C)(u) : Gamma(C)_m -> Gamma(C)_n for u : n -> m
        n, m = u.source, u.target
        col_epis = epis(m)
        row_epis = epis(n)
        row_off = {}
        t = 0
        for e in row_epis:
            row_off[e.payload] = t
            t += c.rank(e.target)
        nrows = t
        out = [[0] * rank(m) for _ in range(nrows)]
        co = 0
        for e in col_epis:
            i = e.target
            comp = cat.compose(e, u)
            epi, mono = cat.epi_mono_factor(comp)
            j = epi.target
            block = None
            if j == i:
                block = IntMatrix.identity(c.rank(i))
            elif (j == i - 1 and i <= c.truncation_degree
                    and mono.payload == cat.coface(0, i).payload):
                block = c.diff(i)
            if block is not None:
                ro = row_off[epi.payload]
                for r in range(block.rows):
                    for cc in range(block.cols):
                        if block.data[r][cc]:
                            out[ro + r][co + cc] = block.data[r][cc]
            co += c.rank(i)
        return IntMatrix(nrows, rank(m), out)

    return FunctionalPresheaf(cat, rank, matrix, name="Gamma(C)")


def moore_pi(x, n, degree=None):
    """pi_n of the underlying simplicial set, computed as H_n(NX)."""
    top = n + 1 if degree is None else degree
    nx, _ = simplicial_N(x, top)
    return nx.homology(n)


# ---------------------------------------------------------------------------
# cubical with connections


def cubical_C(x, degree):
    """Unnormalized cubical complex with d = sum (-1)^i (d_{i,0} - d_{i,1})."""
    cat = x.base
    ranks = [x.rank(k) for k in range(degree + 1)]
    diffs = []
    for k in range(1, degree + 1):
        m = None
        for i in range(1, k + 1):
            for eps in (0, 1):
                sign = (-1 if i % 2 else 1) * (-1 if eps else 1)
                term = x.matrix(cat.face(i, eps, k)).scale(sign)
                m = term if m is None else m + term
        diffs.append(m)
    return ChainComplex(ranks, diffs, validate=False)


def _cube_sigma_gens(cat, k):
    return [cat.degeneracy(i, k - 1) for i in range(1, k + 1)] if k else []


def _cube_gamma_gens(cat, k):
    if k < 2 or not cat.connections:
        return []
    return [cat.connection(i, k - 1) for i in range(1, k)]


def cubical_Dsigma(x, degree):
    """Degeneracy subcomplex; returns (complex, lattice bases)."""
    cat = x.base
    moore = cubical_C(x, degree)
    cols = [_degeneracy_generators(x, k, lambda k=k: _cube_sigma_gens(cat, k))
            for k in range(degree + 1)]
    return _sub_complex(moore, cols)


def cubical_Dgamma(x, degree):
    """Connection subcomplex; returns (complex, lattice bases)."""
    cat = x.base
    moore = cubical_C(x, degree)
    cols = [_degeneracy_generators(x, k, lambda k=k: _cube_gamma_gens(cat, k))
            for k in range(degree + 1)]
    return _sub_complex(moore, cols)


def cubical_CN(x, degree):
    """Quotient by degeneracies, and by connections when the base has
    them: C_N^cube X."""
    cat = x.base
    moore = cubical_C(x, degree)
    return _quotient_complex(
        moore, x, degree,
        lambda k: _cube_sigma_gens(cat, k) + _cube_gamma_gens(cat, k))


def cubical_CN_sigma_only(x, degree):
    """Quotient by the degeneracies alone (the comparison quotient)."""
    cat = x.base
    moore = cubical_C(x, degree)
    return _quotient_complex(moore, x, degree,
                             lambda k: _cube_sigma_gens(cat, k))


def cubical_N(x, degree):
    """Kernel-intersection complex: meet of ker d_{i,eps} over
    (i,eps) != (k,0); returns (complex, kernel bases)."""
    cat = x.base
    moore = cubical_C(x, degree)
    bases = [IntMatrix.identity(x.rank(0))]
    for k in range(1, degree + 1):
        basis = IntMatrix.identity(x.rank(k))
        for i in range(1, k + 1):
            for eps in (0, 1):
                if (i, eps) == (k, 0):
                    continue
                restricted = x.matrix(cat.face(i, eps, k)).mul(basis)
                basis = basis.mul(kernel_basis(restricted))
        bases.append(basis)
    ranks = [b.cols for b in bases]
    diffs = []
    for k in range(1, degree + 1):
        image = moore.diff(k).mul(bases[k])
        m = solve_matrix(bases[k - 1], image)
        assert m is not None, "N_cube is not a subcomplex"
        diffs.append(m)
    return ChainComplex(ranks, diffs, validate=False), bases


def brown_higgins_rank_check(x, degree):
    """L = N (+) D degreewise, with D the subgroup generated by the
    degeneracy and connection images together.

    The two images can overlap (a constant degenerate tower lies in
    both), so the degenerate part is their sum, not their external
    direct sum; the check is that the union of bases of N and D is a
    basis of the whole group.
    """
    from .intlinalg import diagonal_of, smith_normal_form
    cat = x.base
    _, n_bases = cubical_N(x, degree)
    for k in range(degree + 1):
        cols = _degeneracy_generators(
            x, k, lambda k=k: _cube_sigma_gens(cat, k) + _cube_gamma_gens(cat, k))
        rows = hnf_rows(cols)
        d_basis = matrix_from_columns([list(r) for r in rows], x.rank(k))
        if n_bases[k].cols + d_basis.cols != x.rank(k):
            return False
        stacked = n_bases[k].hstack(d_basis)
        _, diag, _ = smith_normal_form(stacked)
        if [v for v in diagonal_of(diag) if v] != [1] * x.rank(k):
            return False
    return True


# ---------------------------------------------------------------------------
# reflexive globular (Bourn)


def bourn_B(x, degree):
    """B(X)_n = X_n / k(X_{n-1}) with d = t - s."""
    _require_kind(x, "globe_ref")
    cat = x.base
    ranks = [x.rank(k) for k in range(degree + 1)]
    diffs = []
    for k in range(1, degree + 1):
        diffs.append(x.matrix(cat.tau(k)) - x.matrix(cat.sigma(k)))
    moore = ChainComplex(ranks, diffs, validate=False)
    return _quotient_complex(moore, x, degree,
                             lambda k: [cat.kappa(k - 1)] if k else [])


def unnormalized_globular(x, degree):
    """The t - s complex without the quotient: the negative control that
    does not compute homology on reflexive globes."""
    cat = x.base
    ranks = [x.rank(k) for k in range(degree + 1)]
    diffs = [x.matrix(cat.tau(k)) - x.matrix(cat.sigma(k))
             for k in range(1, degree + 1)]
    return ChainComplex(ranks, diffs, validate=False)


def bourn_Binv(c, degree):
    """X_n = C_n + ... + C_0, s = projection, t = projection + d,
    k = inclusion."""
    cat = GlobeCat(degree, reflexive=True)

    def pieces(n):
        return [i for i in range(min(n, c.truncation_degree) + 1)]

    def rank(n):
        return sum(c.rank(i) for i in pieces(n))

    def block_offsets(n):
        offs = {}
        t = 0
        for i in reversed(pieces(n)):  # store as C_n + ... + C_0
            offs[i] = t
            t += c.rank(i)
        return offs, t

    def s_matrix(n):
        # X_n -> X_{n-1}: drop the C_n coordinate
        offs_hi, thi = block_offsets(n)
        offs_lo, tlo = block_offsets(n - 1)
        out = [[0] * thi for _ in range(tlo)]
        for i in pieces(n - 1):
            for r in range(c.rank(i)):
                out[offs_lo[i] + r][offs_hi[i] + r] = 1
        return IntMatrix(tlo, thi, out)

    def t_matrix(n):
        out = s_matrix(n)
        rows = [list(r) for r in out.data]
        offs_hi, _ = block_offsets(n)
        offs_lo, _ = block_offsets(n - 1)
        if n <= c.truncation_degree and c.rank(n):
            d = c.diff(n)
            for r in range(d.rows):
                for cc in range(d.cols):
                    if d.data[r][cc]:
                        rows[offs_lo[n - 1] + r][offs_hi[n] + cc] += d.data[r][cc]
        return IntMatrix(out.rows, out.cols, rows)

    def k_matrix(n):
        # X_n -> X_{n+1}: include
        offs_lo, tlo = block_offsets(n)
        offs_hi, thi = block_offsets(n + 1)
        out = [[0] * tlo for _ in range(thi)]
        for i in pieces(n):
            for r in range(c.rank(i)):
                out[offs_hi[i] + r][offs_lo[i] + r] = 1
        return IntMatrix(thi, tlo, out)

    def matrix(f):
        # normal form: drop to level k by kappas, then climb with the
        # given first letter (letters above the first do not matter; use
        # sigma). X(f) = X(drop) X(climb) : X_n -> X_i.
        k, letter = f.payload
        i, n = f.source, f.target
        m = IntMatrix.identity(rank(n))
        level = n
        while level > k + 1:
            m = s_matrix(level).mul(m)
            level -= 1
        if letter == "sigma":
            m = s_matrix(level).mul(m)
            level -= 1
        elif letter == "tau":
            m = t_matrix(level).mul(m)
            level -= 1
        while level < i:
            m = k_matrix(level).mul(m)
            level += 1
        return m

    return FunctionalPresheaf(cat, rank, matrix, name="Binv(C)")


def whitehead_graph_check(x, window, exact_through=5):
    """Build the Maltsiniotis graph of a reflexive globular abelian group
    on the lattice points with coordinates in [-window, window].

    Returns (vertices, edges, cycle_rank, homology_trivial). A positive
    cycle rank on the restriction certifies, by the spanning-forest
    argument, a nontrivial fundamental group of the full graph.
    """
    _require_kind(x, "globe_ref")
    cat = x.base

    def points(rank):
        return list(iproduct(range(-window, window + 1), repeat=rank))

    r0, r1, r2 = x.rank(0), x.rank(1), x.rank(2)
    verts = points(r0)
    k0 = x.matrix(cat.kappa(0))
    degenerate = {tuple(k0.mul_vec(list(v))) for v in verts}
    edges = [e for e in points(r1) if e not in degenerate]
    edge_set = set(edges)
    # identify s(u) ~ t(u) for 2-cells u in the window
    parent = {e: e for e in edges}

    def find(e):
        while parent[e] != e:
            parent[e] = parent[parent[e]]
            e = parent[e]
        return e

    def union(a, b):
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[ra] = rb

    s2 = x.matrix(cat.sigma(2))
    t2 = x.matrix(cat.tau(2))
    for u in points(r2):
        a = tuple(s2.mul_vec(list(u)))
        b = tuple(t2.mul_vec(list(u)))
        if a in edge_set and b in edge_set and a != b:
            union(a, b)
    classes = {find(e) for e in edges}
    n_edges = len(classes)
    # endpoints through s_1, t_1 (class-invariant by the globular relations)
    s1 = x.matrix(cat.sigma(1))
    t1 = x.matrix(cat.tau(1))
    vparent = {v: v for v in verts}

    def vfind(v):
        while vparent[v] != v:
            vparent[v] = vparent[vparent[v]]
            v = vparent[v]
        return v

    def vunion(a, b):
        ra, rb = vfind(a), vfind(b)
        if ra != rb:
            vparent[ra] = rb

    for e in classes:
        a = tuple(s1.mul_vec(list(e)))
        b = tuple(t1.mul_vec(list(e)))
        if a in vparent and b in vparent:
            vunion(a, b)
    components = len({vfind(v) for v in verts})
    cycle_rank = n_edges - len(verts) + components
    b_complex = bourn_B(x, exact_through + 1)
    trivial = b_complex.is_exact_through(exact_through)
    return len(verts), n_edges, cycle_rank, trivial


# ---------------------------------------------------------------------------
# Eilenberg-Zilber


def eilenberg_zilber_check(x, degree):
    """Homology of Tot of the columnwise-normalized double complex
    against homology of C_N applied to the diagonal restriction."""
    prod = x.base
    if getattr(prod, "kind", None) != "prod":
        raise BaseMismatch("Eilenberg-Zilber check needs a bisimplicial group")
    c1, c2 = prod.c1, prod.c2

    def face1(p, i, q):
        return Morphism((p - 1, q), (p, q), (c1.coface(i, p), c2.identity(q)))

    def face2(p, q, j):
        return Morphism((p, q - 1), (p, q), (c1.identity(p), c2.coface(j, q)))

    # kernel bases in the first variable, per column q
    bases = {}
    for q in range(degree + 1):
        bases[(0, q)] = IntMatrix.identity(x.rank((0, q)))
        for p in range(1, degree + 1):
            basis = IntMatrix.identity(x.rank((p, q)))
            for i in range(1, p + 1):
                restricted = x.matrix(face1(p, i, q)).mul(basis)
                basis = basis.mul(kernel_basis(restricted))
            bases[(p, q)] = basis
    ranks = [[bases[(p, q)].cols for q in range(degree + 1)]
             for p in range(degree + 1)]

    def horiz(p, q):
        m = None
        for i in range(p + 1):
            term = x.matrix(face1(p, i, q)).scale(-1 if i % 2 else 1)
            m = term if m is None else m + term
        out = solve_matrix(bases[(p - 1, q)], m.mul(bases[(p, q)]))
        assert out is not None
        return out

    def vert(p, q):
        m = None
        for j in range(q + 1):
            term = x.matrix(face2(p, q, j)).scale(-1 if j % 2 else 1)
            m = term if m is None else m + term
        out = solve_matrix(bases[(p, q - 1)], m.mul(bases[(p, q)]))
        assert out is not None
        return out

    d_h = [[horiz(p, q) if p >= 1 else None for q in range(degree + 1)]
           for p in range(degree + 1)]
    d_v = [[vert(p, q) if q >= 1 else None for q in range(degree + 1)]
           for p in range(degree + 1)]
    tot = total_complex(DoubleComplex(ranks, d_h, d_v))

    from .wreath import Functor
    diag = Functor(c1, prod, lambda n: (n, n),
                   lambda f: Morphism((f.source, f.source), (f.target, f.target),
                                      (f, f)), name="diag")
    diag_side, _ = simplicial_N(restrict(x, diag), degree)
    top = degree - 1
    left = [tot.homology(n) for n in range(top + 1)]
    right = [diag_side.homology(n) for n in range(top + 1)]
    return left, right, left == right


# ---------------------------------------------------------------------------
# random generators (seeded; used by the roundtrip suites and the CLI)


def random_free_complex(rng, max_degree=5, max_rank=3):
    """Random free complex with d.d = 0 by construction (each new
    differential factors through the previous kernel)."""
    top = rng.randint(1, max_degree)
    ranks = [rng.randint(0, max_rank) for _ in range(top + 1)]
    if all(r == 0 for r in ranks):
        ranks[0] = 1
    diffs = []
    prev = None
    for n in range(1, top + 1):
        if prev is None:
            m = IntMatrix(ranks[n - 1], ranks[n],
                          [[rng.randint(-2, 2) for _ in range(ranks[n])]
                           for _ in range(ranks[n - 1])])
        else:
            k = kernel_basis(prev)
            coeff = IntMatrix(k.cols, ranks[n],
                              [[rng.randint(-2, 2) for _ in range(ranks[n])]
                               for _ in range(k.cols)])
            m = k.mul(coeff)
        diffs.append(m)
        prev = m
    return ChainComplex(ranks, diffs)


def random_subfunctor(rng, cat, max_cells=3, max_reps=2):
    """Random subpresheaf of a sum of representables, generated by a few
    random cells."""
    reps = []
    objs = cat.all_objects()
    for tag in range(rng.randint(1, max_reps)):
        reps.append((tag, objs[rng.randrange(len(objs))]))
    cells = []
    for _ in range(rng.randint(1, max_cells)):
        tag, at = reps[rng.randrange(len(reps))]
        srcs = objs
        src = srcs[rng.randrange(len(srcs))]
        hom = cat.hom(src, at)
        if hom:
            cells.append((tag, hom[rng.randrange(len(hom))]))
    if not cells:
        tag, at = reps[0]
        cells.append((tag, cat.identity(at)))
    return SubFunctor(cat, cells, name="rand")


def random_simplicial_abelian(rng, degree):
    """Free abelianization of a random simplicial set, sometimes summed
    with the image of a random complex under Gamma."""
    cat = DeltaCat(degree)
    x = free_abelianization(random_subfunctor(rng, cat))
    if rng.random() < 0.5:
        from .presheaf import direct_sum
        g = simplicial_Gamma(random_free_complex(rng, max_degree=min(3, degree)), degree)
        return direct_sum(x, g)
    return x


def random_cubical_abelian(rng, degree):
    cat = CubeCat(degree, connections=True)
    return free_abelianization(random_subfunctor(rng, cat, max_cells=2, max_reps=1))


def random_bisimplicial_abelian(rng, degree):
    from .shapecat import ProductCat
    cat = ProductCat(DeltaCat(degree), DeltaCat(degree), degree * 2)
    return free_abelianization(random_subfunctor(rng, cat, max_cells=2, max_reps=1))


def random_globular_abelian(rng, degree):
    cat = GlobeCat(degree, reflexive=True)
    x = free_abelianization(random_subfunctor(rng, cat))
    if rng.random() < 0.5:
        from .presheaf import direct_sum
        return direct_sum(x, bourn_Binv(random_free_complex(rng, max_degree=degree), degree))
    return x


# ---------------------------------------------------------------------------
# roundtrip drivers


def roundtrip_simplicial(rng, degree=5, max_rank=3):
    """N(Gamma(C)) = C with equal differential matrices."""
    c = random_free_complex(rng, max_degree=degree, max_rank=max_rank)
    g = simplicial_Gamma(c, degree)
    n, _ = simplicial_N(g, degree)
    if list(n.ranks[:c.truncation_degree + 1]) != list(c.ranks):
        return False
    if any(r != 0 for r in n.ranks[c.truncation_degree + 1:]):
        return False
    for k in range(1, c.truncation_degree + 1):
        if n.diff(k) != c.diff(k):
            return False
    return True


def roundtrip_bourn(rng, degree=5, max_rank=3):
    """B(Binv(C)) = C and Binv(B(Binv C)) = Binv C on matrices."""
    c = random_free_complex(rng, max_degree=degree, max_rank=max_rank)
    x = bourn_Binv(c, degree)
    b = bourn_B(x, degree)
    if list(b.ranks[:c.truncation_degree + 1]) != list(c.ranks):
        return False
    if any(r != 0 for r in b.ranks[c.truncation_degree + 1:]):
        return False
    for k in range(1, c.truncation_degree + 1):
        if b.diff(k) != c.diff(k):
            return False
    # second direction as matrix identity of the re-expanded presheaf
    x2 = bourn_Binv(b, degree)
    cat = x.base
    for n in range(degree + 1):
        if x.rank(n) != x2.rank(n):
            return False
    for _, g in cat.generator_list():
        if x.matrix(g) != x2.matrix(g):
            return False
    return True
