import random

import pytest

from cdo.ring import (
    MaskViolation,
    NotInvertible,
    Q,
    RingElem,
    RingError,
    RingHom,
    RingMatrix,
    RingSpec,
    binom,
    matrix_trace_product,
    parse_elem,
)
from cdo.sampling import rand_elem, rand_monomial_matrix


QX = RingSpec(["x"])
QXY = RingSpec(["x", "y"])
QZ_L = RingSpec(["z"], [True])
TORUS2 = RingSpec(["z", "w"], [True, True])


def test_binomial_values():
    assert binom(5, 2) == 10
    assert binom(-1, 3) == -1
    assert binom(-3, 2) == 6
    assert binom(4, 0) == 1
    assert binom(2, 5) == 0
    assert binom(3, -1) == 0


def test_binomial_negation_identity():
    # binom(-a-1, b) = (-1)^b binom(a+b, b)
    for a in range(0, 6):
        for b in range(0, 6):
            assert binom(-a - 1, b) == (-1) ** b * binom(a + b, b)


def test_difference_of_squares():
    x = QX.gen(0)
    assert (x + 1) * (x - 1) == x * x - 1


def test_laurent_unit_inverse():
    z = QZ_L.gen(0)
    zinv = QZ_L.monomial([-1])
    assert zinv * z == QZ_L.one()


def test_rational_coefficient_addition():
    x = QX.gen(0)
    assert x.scale(Q(1, 2)) + x.scale(Q(1, 2)) == x


def test_mask_violation():
    with pytest.raises(MaskViolation):
        QX.monomial([-1])


def test_canonical_form_cancellation():
    rng = random.Random(7)
    for _ in range(30):
        a = rand_elem(QXY, rng, 3, 3)
        assert (a - a).is_zero()
        assert a - a == QXY.zero()


def test_parse_roundtrip():
    s = "1/2*x^2*y - 3*y + 4"
    a = parse_elem(QXY, s)
    x, y = QXY.gens()
    assert a == x * x * y.scale(Q(1, 2)) - y.scale(3) + 4


def test_hom_monomial_substitution():
    # w -> z^{-1} sends w^2 + 1 to z^{-2} + 1
    QW = RingSpec(["w"], [True])
    f = RingHom(QW, QZ_L, [QZ_L.monomial([-1])])
    w = QW.gen(0)
    assert f(w * w + 1) == QZ_L.monomial([-2]) + 1


def test_hom_identity_and_product_substitution():
    f = RingHom.identity(QX)
    x = QX.gen(0)
    assert f(x * x) == x * x
    UV = RingSpec(["u", "v"])
    zw = TORUS2
    g = RingHom.by_name(UV, zw, {"u": "z", "v": "z*w"})
    u, v = UV.gens()
    z, w = zw.gens()
    assert g(u * v) == z * z * w


def test_hom_requires_unit_images():
    with pytest.raises(MaskViolation):
        RingHom(QZ_L, QX, [QX.gen(0)])


def test_hom_functoriality_random():
    rng = random.Random(3)
    UV = RingSpec(["u", "v"], [True, False])
    f = RingHom.by_name(UV, TORUS2, {"u": "z^-1", "v": "z*w+1"})
    g = RingHom.by_name(TORUS2, QZ_L, {"z": "z", "w": "z^2"})
    gf = g.compose(f)
    for _ in range(20):
        a = rand_elem(UV, rng, 2, 3)
        assert gf(a) == g(f(a))


def test_matrix_inverse_example():
    z = QZ_L.gen(0)
    m = RingMatrix(QZ_L, [[z, QZ_L.zero()], [QZ_L.one(), QZ_L.one()]])
    minv = m.inverse()
    assert minv.entries[0][0] == QZ_L.monomial([-1])
    assert minv.entries[1][0] == QZ_L.monomial([-1], -1)
    assert (m * minv).is_identity()
    assert (minv * m).is_identity()


def test_matrix_identity_inverse():
    m = RingMatrix.identity(QXY, 3)
    assert m.inverse() == m


def test_matrix_not_invertible_over_polynomial_ring():
    x = QX.gen(0)
    m = RingMatrix(QX, [[x, QX.zero()], [QX.zero(), x]])
    with pytest.raises(NotInvertible):
        m.inverse()


def test_trace_product_examples():
    one, zero = QX.one(), QX.zero()
    a = RingMatrix(QX, [[zero, one], [zero, zero]])
    b = RingMatrix(QX, [[zero, zero], [one, zero]])
    assert matrix_trace_product([a, b]) == one
    assert matrix_trace_product([], ring=QX, size=2) == QX.const(2)
    z = QZ_L.gen(0)
    m1 = RingMatrix(QZ_L, [[z, QZ_L.zero()], [QZ_L.zero(), QZ_L.one()]])
    m2 = RingMatrix(QZ_L, [[QZ_L.monomial([-1]), QZ_L.zero()], [QZ_L.zero(), QZ_L.one()]])
    assert matrix_trace_product([m1, m2]) == QZ_L.const(2)


def test_matrix_inverse_random_roundtrip():
    rng = random.Random(11)
    for n in (2, 3):
        for _ in range(10):
            m = rand_monomial_matrix(TORUS2, rng, n)
            assert (m * m.inverse()).is_identity()


def test_det_multiplicativity_random():
    rng = random.Random(13)
    for n in (2, 3):
        for _ in range(10):
            a = rand_monomial_matrix(TORUS2, rng, n)
            b = rand_monomial_matrix(TORUS2, rng, n)
            assert (a * b).det() == a.det() * b.det()


def test_mixed_ring_arith_is_an_error():
    with pytest.raises(RingError):
        QX.gen(0) + QXY.gen(0)
