import pytest

from dkhom.errors import InfiniteCategory, InvalidPresentation, NotCatenary
from dkhom.shapecat import (
    CircleSet,
    CubeCat,
    DeltaCat,
    DeltaMonoCat,
    EmptySet,
    GlobeCat,
    OppositeCat,
    ProductCat,
    SliceCat,
    TerminalSet,
    boundary_set,
    make_category,
    nerve,
    nerve_degeneracy,
    nerve_face,
    parallel_pair_category,
    poset_category,
    set_presheaf_from_json,
    terminal_category,
)


BUILTINS = [
    DeltaCat(3),
    DeltaMonoCat(3),
    GlobeCat(4),
    GlobeCat(4, reflexive=True),
    CubeCat(2),
    CubeCat(2, connections=True),
    ProductCat(DeltaCat(2), DeltaCat(2), 3),
    poset_category(),
    parallel_pair_category(),
]


@pytest.mark.parametrize("cat", BUILTINS, ids=lambda c: c.name)
def test_axioms_spot_check(cat):
    cat.spot_check(2)


@pytest.mark.parametrize("cat", BUILTINS, ids=lambda c: c.name)
def test_hom_canonicity_no_duplicates(cat):
    objs = [a for d in range(min(2, cat.truncation) + 1) for a in cat.objects(d)]
    for a in objs:
        for b in objs:
            homs = cat.hom(a, b)
            assert len({f.payload for f in homs}) == len(homs)
            ids = [f for f in cat.hom(a, a) if cat.is_identity(f)]
            assert len(ids) == 1


def test_delta_hom_count():
    d = DeltaCat(2)
    assert len(d.hom(1, 2)) == 6
    # the opposite direction has C(4,3) = 4 monotone maps
    assert len(d.hom(2, 1)) == 4


def test_globe_hom_closed_forms():
    g = GlobeCat(6)
    for i in range(7):
        for n in range(7):
            expect = 2 if i < n else (1 if i == n else 0)
            assert len(g.hom(i, n)) == expect
    assert {f.payload for f in g.hom(1, 3)} == {(1, "sigma"), (1, "tau")}


def test_globe_reflexive_hom_closed_forms():
    g = GlobeCat(6, reflexive=True)
    for i in range(7):
        for n in range(7):
            expect = 2 * i + 2 if i < n else 2 * n + 1
            assert len(g.hom(i, n)) == expect
    assert len(g.hom(1, 2)) == 4
    assert len(g.hom(3, 1)) == 3


def test_globe_relations():
    g = GlobeCat(4)
    # sigma . tau = tau . tau (coglobular relations)
    assert g.compose(g.sigma(2), g.tau(1)) == g.compose(g.tau(2), g.tau(1))
    gr = GlobeCat(4, reflexive=True)
    assert gr.compose(gr.kappa(1), gr.sigma(2)) == gr.identity(1)
    assert gr.compose(gr.kappa(1), gr.tau(2)) == gr.identity(1)


def test_cube_hom_counts():
    c = CubeCat(3, connections=True)
    assert len(c.hom(1, 1)) == 3  # id and the two constants
    cc = CubeCat(3)
    # without connections there are fewer maps
    assert len(cc.hom(2, 2)) < len(c.hom(2, 2))


def test_cube_closure_fixed_point():
    for connections in (False, True):
        c = CubeCat(3, connections=connections)
        assert c.closure_is_stable(3)


def test_cube_tables_are_monotone():
    c = CubeCat(2, connections=True)
    for m in range(3):
        for n in range(3):
            for f in c.hom(m, n):
                for v in range(1 << m):
                    for w in range(1 << m):
                        if v & w == v:  # v <= w bitwise
                            assert f.payload[v] & f.payload[w] == f.payload[v]


def test_delta_mono_no_downward_maps():
    dm = DeltaMonoCat(3)
    assert len(dm.hom(2, 1)) == 0
    assert len(dm.hom(1, 2)) == 3


def test_is_mono_examples():
    d = DeltaCat(3)
    assert d.is_mono(d.identity(2))
    assert d.is_mono(d.coface(0, 1))
    assert not d.is_mono(d.codegeneracy(0, 0))
    gr = GlobeCat(3, reflexive=True)
    assert not gr.is_mono(gr.kappa(0))
    assert gr.is_mono(gr.sigma(1))
    # brute-force agrees with the payload shortcut on small homs
    for a in range(3):
        for b in range(3):
            for f in gr.hom(a, b):
                brute = super(GlobeCat, gr).is_mono(f)
                assert brute == gr.is_mono(f), f


def test_codim1_monos():
    d = DeltaCat(3)
    faces = d.codim1_monos(2)
    assert len(faces) == 3
    assert [d.face_sign(f) for f, _ in faces] == [1, -1, 1]
    assert d.codim1_monos(0) == []
    c = CubeCat(2)
    assert len(c.codim1_monos(2)) == 4
    signs = sorted(c.face_sign(f) for f, _ in c.codim1_monos(2))
    assert signs == [-1, -1, 1, 1]
    pp = parallel_pair_category()
    with pytest.raises(NotCatenary):
        pp.codim1_monos("x")


def test_subobjects_dim0():
    d = DeltaCat(2)
    count, reps = d.subobjects(0)
    assert count == 1


def test_slice_category_circle():
    d = DeltaCat(3)
    s = SliceCat(d, CircleSet(d))
    assert len(s.objects(0)) == 1
    assert len(s.objects(1)) == 2  # the edge and the degenerate loop
    s.spot_check(2)
    # discrete fibration: unique lifts
    for (a, x) in s.objects(1) + s.objects(2):
        for f in d.hom(0, a):
            lifts = [g for (b, y) in s.objects(0)
                     for g in s.hom((b, y), (a, x)) if g.payload == f]
            assert len(lifts) == 1


def test_slice_terminal_is_base():
    d = DeltaCat(2)
    s = SliceCat(d, TerminalSet(d))
    for k in range(3):
        assert len(s.objects(k)) == len(d.objects(k))
        for (a, x) in s.objects(k):
            for (b, y) in s.objects(min(k + 1, 2)):
                assert len(s.hom((a, x), (b, y))) == len(d.hom(a, b))


def test_slice_empty():
    d = DeltaCat(2)
    s = SliceCat(d, EmptySet(d))
    assert all(not s.objects(k) for k in range(3))


def test_circle_is_functorial():
    d = DeltaCat(3)
    CircleSet(d).validate()
    assert [len(CircleSet(d).elements(n)) for n in range(4)] == [1, 2, 3, 4]


def test_boundary_set():
    d = DeltaCat(3)
    b = boundary_set(d, 2)
    b.validate()
    # 3 vertices, 3 nondegenerate edges + 3 degenerate, no interior
    assert len(b.elements(0)) == 3
    assert len(b.elements(1)) == 6
    assert all(len(set(u.payload)) <= 2 for _, u in b.elements(2))


def test_nerve():
    p = poset_category()
    assert len(nerve(p, 0)) == 2
    assert len(nerve(p, 1)) == 3
    pp = parallel_pair_category()
    assert len(nerve(pp, 1)) == 4
    t = terminal_category()
    assert all(len(nerve(t, n)) == 1 for n in range(4))
    with pytest.raises(InfiniteCategory):
        nerve(DeltaCat(2), 1)


def test_nerve_faces_and_degeneracies():
    p = poset_category()
    u = p.hom("0", "1")[0]
    chain = (u,)
    assert nerve_face(p, chain, 0) == ("1",)
    assert nerve_face(p, chain, 1) == ("0",)
    two = (p.identity("0"), u)
    assert nerve_face(p, two, 1) == (u,)
    assert nerve_degeneracy(p, chain, 0) == (p.identity("0"), u)


def test_finite_cat_validation():
    with pytest.raises(InvalidPresentation):
        # missing composite g.f
        from dkhom.shapecat import FiniteCat
        FiniteCat("bad", ["x", "y", "z"],
                  {"f": ("x", "y"), "g": ("y", "z")}, {})


def test_make_category_grammar():
    for spec in ["delta", "delta_mono", "delta^2", "globe", "globe_ref",
                 "cube", "cube_c", "theta1", "theta2", "xi2", "op:delta",
                 "prod:delta,globe", "slice:delta:circle", "finite:terminal"]:
        cat = make_category(spec, 2)
        cat.spot_check(1)
    with pytest.raises(InvalidPresentation):
        make_category("frobnicate", 2)


def test_opposite_cat():
    d = DeltaCat(2)
    op = OppositeCat(d)
    op.spot_check(2)
    assert len(op.hom(2, 1)) == len(d.hom(1, 2))


def test_set_presheaf_json_roundtrip():
    d = DeltaCat(2)
    circle = CircleSet(d)
    # tabulate the circle and reload it
    counts = {n: len(circle.elements(n)) for n in range(3)}
    elems = {n: list(circle.elements(n)) for n in range(3)}
    actions = {}
    for name, g in d.generator_list():
        table = []
        for y in circle.elements(g.target):
            table.append(elems[g.source].index(circle.action(g, y)))
        actions[name] = table
    obj = {"category": "delta", "truncation": 2,
           "elements": {str(k): v for k, v in counts.items()},
           "actions": actions}
    loaded = set_presheaf_from_json(d, obj)
    loaded.validate()
    for n in range(3):
        assert len(loaded.elements(n)) == counts[n]
    assert loaded.to_json("delta")["elements"] == obj["elements"]
