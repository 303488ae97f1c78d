import random

from cdo.conformal import ConfElem, ConformalAlgebra, bracket_check, conf_axiom_check
from cdo.geometry import OneForm, VectorField
from cdo.ring import Q, RingSpec, binom
from cdo.valgebroid import Frame, canonical_algebroid

QX = RingSpec(["x"])
QXY = RingSpec(["x", "y"])
TORUS1 = RingSpec(["x"], [True])


def make_ca(spec):
    return ConformalAlgebra(canonical_algebroid(Frame.coordinate(spec)))


def test_product_examples_weight_one():
    CA = make_ca(QX)
    x = QX.gen(0)
    tau = CA.frame_field(0)
    # d/dx (0) x = 1
    assert CA.product(tau, 0, CA.scalar(x)) == CA.scalar(QX.one())
    # d/dx (1) (x dx) = x
    xdx = CA.form(OneForm.dx(QX, 0).mul(x))
    assert CA.product(tau, 1, xdx) == CA.scalar(x)


def test_product_example_shifted_form():
    # d/dx (1) D1[x dx] = 2 dx stored at D0
    CA = make_ca(QX)
    x = QX.gen(0)
    tau = CA.frame_field(0)
    y = CA.form(OneForm.dx(QX, 0).mul(x), dp=1)
    got = CA.product(tau, 1, y)
    assert got == CA.form(OneForm.dx(QX, 0).scale(2))


def test_divided_power_rules():
    CA = make_ca(QX)
    x = QX.gen(0)
    elem = CA.scalar(x)
    # D0 = identity
    assert CA.divided_power(0, elem) == elem
    # D1(x) = dx as a D0 form part
    assert CA.divided_power(1, elem) == CA.form(OneForm.dx(QX, 0))
    # D1 D1 (dx) = 2 D2(dx)
    w = CA.form(OneForm.dx(QX, 0))
    assert CA.divided_power(1, CA.divided_power(1, w)) \
        == CA.form(OneForm.dx(QX, 0), dp=2).scale(2)
    # negative divided powers vanish
    assert CA.divided_power(-1, w).is_zero()


def test_bracket_examples():
    CA = make_ca(QX)
    x = QX.gen(0)
    tau = CA.frame_field(0)
    # [d/dx, x] = 0 since D1(1) = 0
    assert CA.lie_bracket(tau, CA.scalar(x)).is_zero()
    # [x d/dx, d/dx] = -D1 d/dx
    xdx = CA.field(VectorField.coordinate(QX, 0).mul(x))
    got = CA.lie_bracket(xdx, tau)
    assert got == CA.frame_field(0, dp=1).scale(-1)
    # [x, y dx] = 0: scalar against form
    ydx = CA.form(OneForm.dx(QXY, 0).mul(QXY.gen(1)))
    CA2 = make_ca(QXY)
    assert CA2.lie_bracket(CA2.scalar(QXY.gen(0)), ydx).is_zero()


def test_truncation_products_match_algebroid():
    # tau_(0)tau' = [tau,tau'] - c + 1/2 D <tau,tau'>, tau_(1)tau' = <tau,tau'>
    CA = make_ca(TORUS1)
    A = CA.algebroid
    rng = random.Random(3)
    from cdo.sampling import rand_frame_field

    for _ in range(8):
        t1 = rand_frame_field(A.frame, rng, 2)
        t2 = rand_frame_field(A.frame, rng, 2)
        x1, x2 = CA.field(t1), CA.field(t2)
        from cdo.geometry import vf_bracket

        want = CA.field(vf_bracket(t1, t2)) - CA.form(A.c(t1, t2)) \
            + CA.divided_power(1, CA.scalar(A.pair_tt(t1, t2))).scale(Q(1, 2))
        assert CA.product(x1, 0, x2) == want
        assert CA.product(x1, 1, x2) == CA.scalar(A.pair_tt(t1, t2))


def test_conf_axiom_suite():
    for spec in (QX, QXY):
        CA = make_ca(spec)
        rep = conf_axiom_check(CA, samples=4, degree_bound=2, weight_bound=2, seed=9)
        assert rep.ok, rep.summary()


def test_bracket_suite():
    CA = make_ca(QXY)
    rep = bracket_check(CA, samples=4, degree_bound=2, weight_bound=2, seed=4)
    assert rep.ok, rep.summary()


def test_printing_format():
    CA = make_ca(QX)
    x = QX.gen(0)
    e = CA.scalar(x) + CA.frame_field(0, dp=1) + CA.form(OneForm.dx(QX, 0).mul(x))
    s = str(e)
    assert "D1[" in s and "D0[" in s and s.startswith("x")
