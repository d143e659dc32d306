import random

import pytest

from dkhom.errors import InvalidPresentation
from dkhom.intlinalg import FgAbGroup, IntMatrix
from dkhom.presheaf import (
    FormalMatrix,
    FormalSum,
    TablePresheaf,
    addinf_eval,
    constant_z,
    direct_sum,
    free_abelianization,
    presheaf_from_json,
    push_formal_matrix,
    representable,
    restrict,
    zero_presheaf,
)
from dkhom.shapecat import (
    CircleSet,
    DeltaCat,
    EmptySet,
    GlobeCat,
    ProductCat,
    TerminalSet,
)
from dkhom.wreath import diag_into_xi, xi


def test_representable_delta0():
    d = DeltaCat(4)
    wh = representable(d, 0)
    assert all(wh.rank(n) == 1 for n in range(5))
    wh.validate()


def test_representable_globe_ranks():
    g = GlobeCat(3)
    wh = representable(g, 2)
    assert [wh.rank(n) for n in range(4)] == [2, 2, 1, 0]
    wh.validate()


def test_representable_contains_identity():
    d = DeltaCat(3)
    for a in range(4):
        assert representable(d, a).rank(a) >= 1


def test_constant_z():
    d = DeltaCat(3)
    cz = constant_z(d)
    assert all(cz.rank(n) == 1 for n in range(4))
    for _, g in d.generator_list():
        assert cz.matrix(g) == IntMatrix.identity(1)
    # equals the free abelianization of the terminal set presheaf
    t = free_abelianization(TerminalSet(d))
    for _, g in d.generator_list():
        assert t.matrix(g) == cz.matrix(g)


def test_free_abelianization_circle():
    d = DeltaCat(3)
    x = free_abelianization(CircleSet(d))
    assert [x.rank(n) for n in range(4)] == [1, 2, 3, 4]
    x.validate()
    z = free_abelianization(EmptySet(d))
    assert all(z.rank(n) == 0 for n in range(4))


def test_restrict_identity():
    d = DeltaCat(3)
    x = representable(d, 2)
    from dkhom.wreath import Functor
    ident = Functor(d, d, lambda a: a, lambda f: f, name="id")
    y = restrict(x, ident)
    for n in range(4):
        assert y.rank(n) == x.rank(n)
    for _, g in d.generator_list():
        assert y.matrix(g) == x.matrix(g)


def test_restrict_along_diag():
    d = DeltaCat(3)
    prod = ProductCat(DeltaCat(3), DeltaCat(3), 6)
    from dkhom.wreath import Functor
    from dkhom.shapecat import Morphism
    diag = Functor(d, prod, lambda n: (n, n),
                   lambda f: Morphism((f.source, f.source),
                                      (f.target, f.target), (f, f)))
    wh = representable(prod, (1, 1))
    pulled = restrict(wh, diag)
    for n in range(4):
        assert pulled.rank(n) == len(d.hom(n, 1)) ** 2
    pulled.validate(max_dim=2)


def test_restrict_constant_through_m_prime_diag():
    x2 = xi(2, 3)
    dg = diag_into_xi(x2, 2)
    cz = restrict(constant_z(x2), dg)
    assert all(cz.rank(n) == 1 for n in range(4))
    for _, g in dg.source.generator_list():
        assert cz.matrix(g) == IntMatrix.identity(1)


def test_restrict_functorial_composition():
    d = DeltaCat(2)
    prod = ProductCat(DeltaCat(2), DeltaCat(2), 4)
    from dkhom.wreath import Functor
    from dkhom.shapecat import Morphism
    diag = Functor(d, prod, lambda n: (n, n),
                   lambda f: Morphism((f.source, f.source),
                                      (f.target, f.target), (f, f)))
    swap = Functor(prod, prod, lambda ab: (ab[1], ab[0]),
                   lambda f: Morphism((f.source[1], f.source[0]),
                                      (f.target[1], f.target[0]),
                                      (f.payload[1], f.payload[0])))
    x = representable(prod, (2, 1))
    comp = Functor(d, prod, lambda n: swap.obj(diag.obj(n)),
                   lambda f: swap.mor(diag.mor(f)))
    one = restrict(restrict(x, swap), diag)
    two = restrict(x, comp)
    for _, g in d.generator_list():
        assert one.matrix(g) == two.matrix(g)


def test_addinf_eval_yoneda():
    d = DeltaCat(3)
    rng = random.Random(4)
    for _ in range(10):
        a = rng.randrange(4)
        x = representable(d, rng.randrange(4))
        grp, offsets = addinf_eval(x, FormalSum([a]))
        assert grp == FgAbGroup(x.rank(a))
        assert offsets == [0]
    assert addinf_eval(constant_z(d), FormalSum([]))[0] == FgAbGroup(0)


def test_push_formal_matrix_augmentation():
    # applying the constant presheaf sends a formal coefficient to the
    # sum of its coefficients
    d = DeltaCat(3)
    cz = constant_z(d)
    fm = FormalMatrix([1], [2], {(0, 0): [(1, d.coface(0, 2)),
                                          (-1, d.coface(1, 2)),
                                          (1, d.coface(2, 2))]})
    fm.check()
    m = push_formal_matrix(cz, fm)
    assert m == IntMatrix.from_rows([[1]])  # 1 - 1 + 1


def test_push_formal_matrix_blocks():
    d = DeltaCat(2)
    x = representable(d, 1)
    fm = FormalMatrix([0, 0], [1], {(0, 0): [(1, d.coface(0, 1))],
                                    (1, 0): [(-1, d.coface(1, 1))]})
    m = push_formal_matrix(x, fm)
    assert m.rows == 2 * x.rank(0) and m.cols == x.rank(1)


def test_table_presheaf_validation_names_relation():
    g = GlobeCat(2)
    # sigma_2 sigma_1 = tau_2 sigma_1 forces the two composite matrices to
    # agree; 1 != 2 breaks it
    ranks = {0: 1, 1: 1, 2: 1}
    mats = {"sigma^1": [[1]], "tau^1": [[1]], "sigma^2": [[1]], "tau^2": [[2]]}
    with pytest.raises(InvalidPresentation):
        TablePresheaf(g, ranks, mats)
    # with X_2 = 0 the level-2 relations are vacuous and the table loads
    TablePresheaf(g, {0: 1, 1: 1, 2: 0},
                  {"sigma^1": [[1]], "tau^1": [[2]],
                   "sigma^2": [[]], "tau^2": [[]]}).validate()


def test_table_presheaf_json_roundtrip():
    g = GlobeCat(2)
    ranks = {0: 1, 1: 2, 2: 0}
    mats = {"sigma^1": [[1, 0]], "tau^1": [[1, 0]],
            "sigma^2": [[], []], "tau^2": [[], []]}
    x = TablePresheaf(g, ranks, mats, name="X")
    x.validate()
    data = x.to_json("globe")
    y = presheaf_from_json(g, data)
    for n in range(3):
        assert y.rank(n) == x.rank(n)
    for _, gen in g.generator_list():
        assert y.matrix(gen) == x.matrix(gen)


def test_direct_sum_and_zero():
    d = DeltaCat(2)
    x = representable(d, 1)
    z = zero_presheaf(d)
    s = direct_sum(x, constant_z(d))
    assert s.rank(1) == x.rank(1) + 1
    s.validate(max_dim=2)
    assert direct_sum(x, z).rank(2) == x.rank(2)
