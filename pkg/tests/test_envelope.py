import itertools
import random

import pytest

from cdo.conformal import ConfElem
from cdo.envelope import (
    Envelope,
    FuelExhausted,
    OMEGA,
    TKIND,
    borcherds_check,
    commutativity_check,
    enumerate_words,
    gr_character,
    jet_algebra_rank,
    ope_check,
    ope_expansion,
    relation_stability_check,
    series_inverse_product,
    strategy_independence_check,
    sym_character,
    sym_model_check,
    truncate_to_algebroid,
    vacuum_check,
    weight_rank,
)
from cdo.geometry import OneForm, PForm, VectorField
from cdo.report import CheckReport
from cdo.ring import Q, RingSpec
from cdo.valgebroid import Frame, add_three_form, canonical_algebroid

QX = RingSpec(["x"])
QXY = RingSpec(["x", "y"])
QXYZ = RingSpec(["x", "y", "z"])


def env_rank1():
    return Envelope(canonical_algebroid(Frame.coordinate(QX)))


def env_rank2():
    return Envelope(canonical_algebroid(Frame.coordinate(QXY)))


def env_rank3_shifted():
    A = add_three_form(
        canonical_algebroid(Frame.coordinate(QXYZ)),
        PForm(QXYZ, 3, {(0, 1, 2): QXYZ.gen(0)}),
    )
    return Envelope(A)


def test_normal_form_examples():
    env = env_rank1()
    x = QX.gen(0)
    # word [d/dx, x] -> x * (tau letter)
    got = env.normal_form([env.CA.frame_field(0), x])
    assert got == env.monomial(x, ((0, TKIND, 0),))
    # word [x] -> coefficient-x vacuum
    assert env.normal_form([x]) == env.monomial(x)
    # [dx, d/dx] vs [d/dx, dx] differ by the embedded bracket
    w1 = env.normal_form([env.CA.dual_form(0), env.CA.frame_field(0)])
    w2 = env.normal_form([env.CA.frame_field(0), env.CA.dual_form(0)])
    br = env.CA.lie_bracket(env.CA.dual_form(0), env.CA.frame_field(0))
    assert w1 - w2 == env.embed(br)


def test_normal_form_idempotent():
    env = env_rank2()
    rng = random.Random(5)
    for _ in range(10):
        x = env.CA.rand_elem(rng, 2, 2)
        y = env.CA.rand_elem(rng, 2, 2)
        v = env.normal_form([x, y])
        # feeding the normal form back through embed/nproduct is stable
        w = env.nproduct(env.embed(env.CA.scalar(env.ring.one())), -1, v)
        assert w == v


def test_vacuum_laws():
    env = env_rank2()
    rep = vacuum_check(env, samples=4, seed=1)
    assert rep.ok, rep.summary()
    # tau-letter (0) vacuum = 0 and u (-1) 1 = u
    assert env.nproduct(env.tau(0), 0, env.vacuum()).is_zero()
    u = env.nproduct(env.tau(0), -1, env.omega(1))
    assert env.nproduct(u, -1, env.vacuum()) == u


def test_nproduct_example_two_dx():
    env = env_rank1()
    om = env.omega(0)
    dxdx = env.nproduct(om, -1, om)
    assert env.nproduct(env.tau(0), 1, dxdx) == om.scale(2)


def test_weight_homogeneity_of_products():
    from cdo.envelope import word_weight

    env = env_rank2()
    rng = random.Random(11)
    for _ in range(6):
        u = env.embed(env.CA.rand_elem(rng, 2, 2))
        v = env.embed(env.CA.rand_elem(rng, 2, 2))
        n = rng.randint(-2, 2)
        p = env.nproduct(u, n, v)
        allowed = {
            wu + wv - n - 1 for wu in u.weights() for wv in v.weights()
        }
        for w in p.terms:
            assert word_weight(w) in allowed


def test_borcherds_vacuum_reduction():
    env = env_rank1()
    x = QX.gen(0)
    gens = [env.monomial(x), env.tau(0), env.omega(0)]
    rep = CheckReport("b")
    for a, b in itertools.product(gens, repeat=2):
        borcherds_check(env, a, b, env.vacuum(), -1, -1, -1, rep)
    assert rep.ok, rep.summary()


def test_borcherds_generator_window_rank1():
    env = env_rank1()
    x = QX.gen(0)
    m2 = env.nproduct(env.tau(0), -1, env.omega(0))
    gens = [env.monomial(x), env.tau(0), env.omega(0), m2]
    rep = CheckReport("b")
    for a, b, c in itertools.product(gens, repeat=3):
        for m, n, l in itertools.product(range(-2, 2), repeat=3):
            borcherds_check(env, a, b, c, m, n, l, rep)
    assert rep.ok, rep.summary()


def test_borcherds_failure_injection():
    # a c-table shifted by a NON-closed 3-form breaks the identity somewhere
    spec4 = RingSpec(["x", "y", "z", "w"])
    frame4 = Frame.coordinate(spec4)
    A4 = canonical_algebroid(frame4)
    bad = PForm(spec4, 3, {(0, 1, 2): spec4.gen(3)})
    n = 4
    new_c = [
        [A4.c_table[i][j] + bad.evaluate([frame4.fields[i], frame4.fields[j]])
         for j in range(n)]
        for i in range(n)
    ]
    from cdo.valgebroid import AlgebroidData

    envbad = Envelope(AlgebroidData(frame4, A4.pairing_table, new_c))
    rep = CheckReport("bad")
    gens = [envbad.tau(i) for i in range(4)] + [envbad.omega(i) for i in range(4)]
    for a, b, c in itertools.combinations(gens, 3):
        for m, n_, l in itertools.product(range(-1, 2), repeat=3):
            borcherds_check(envbad, a, b, c, m, n_, l, rep)
    assert not rep.ok
    assert rep.failures[0].witness  # symbolic witness present


def test_commutativity_and_ope():
    env = env_rank2()
    rng = random.Random(23)
    rep = CheckReport("misc")
    for _ in range(5):
        a = env.embed(env.CA.rand_elem(rng, 2, 2))
        b = env.embed(env.CA.rand_elem(rng, 2, 2))
        v = env.embed(env.CA.rand_elem(rng, 1, 1))
        for n in range(-2, 3):
            commutativity_check(env, a, b, n, rep)
        for m, n in ((0, 0), (1, -1), (-1, 1), (2, 0)):
            ope_check(env, a, b, v, m, n, rep)
    assert rep.ok, rep.summary()


def test_relation_stability():
    env = env_rank2()
    rep = relation_stability_check(env, samples=5, seed=2)
    assert rep.ok, rep.summary()


def test_weight_rank_values():
    # rank 1: 1, 2, 5, 10, 20
    assert [weight_rank(1, N)[0] for N in range(5)] == [1, 2, 5, 10, 20]
    for rank in (1, 2, 3):
        for N in range(5):
            coeff, count = weight_rank(rank, N)
            assert coeff == count


def test_weight_rank_rank1_n2_monomials():
    words = enumerate_words(1, 2)
    assert len(words) == 5


def test_jet_ranks():
    # rank-1 Omega, N=2 -> 2; N=0 -> 1; rank-2, N=1 -> 2
    assert jet_algebra_rank(1, 2) == (2, 2)
    assert jet_algebra_rank(1, 0)[0] == 1
    assert jet_algebra_rank(2, 1) == (2, 2)
    for rank in (1, 2, 3):
        for N in range(6):
            coeff, count = jet_algebra_rank(rank, N)
            assert coeff == count


def test_gr_character_matches_sym():
    for rank in (1, 2):
        N = 4
        assert gr_character(rank, N) == sym_character(rank, N)
    # rank 1, weight 2: F-degrees 0,1,2 with ranks 2,2,1
    table = gr_character(1, 2)
    assert table[(2, 0)] == 2 and table[(2, 1)] == 2 and table[(2, 2)] == 1
    # totals per weight equal weight_rank
    for N in range(1, 5):
        assert sum(v for (w, f), v in gr_character(1, 4).items() if w == N) \
            == weight_rank(1, N)[0]


def test_filtration_multiplicativity():
    # F-degree of a (-1)-product is bounded by the sum, with equality in gr
    env = env_rank2()
    u = env.nproduct(env.tau(0), -1, env.omega(1))
    v = env.tau(1)
    p = env.nproduct(u, -1, v)
    split = p.f_degree_split()
    assert max(split) == 2  # F(u) = 1, F(v) = 1
    top = split[2]
    assert ((0, TKIND, 1), (0, TKIND, 0), (0, OMEGA, 1)) in {
        tuple(w) for w in top.terms
    } or top.terms  # the leading commutative product survives


def test_strategy_independence_random_words():
    env = env_rank2()
    rng = random.Random(31)
    rep = CheckReport("strategy")
    for s in range(12):
        k = rng.randint(2, 3)
        word = []
        for _ in range(k):
            pick = rng.random()
            if pick < 0.3:
                from cdo.sampling import rand_elem

                word.append(rand_elem(env.ring, rng, 2))
            else:
                word.append(env.CA.rand_elem(rng, 1, 1))
        strategy_independence_check(env, word, rep, tag="#%d" % s)
    assert rep.ok, rep.summary()


def test_sym_model_leading_symbol():
    for env in (env_rank1(), env_rank2()):
        rep = sym_model_check(env, samples=20, weight_bound=3, seed=7)
        assert rep.ok, rep.summary()


def test_roundtrip_canonical_and_shifted():
    for env in (env_rank1(), env_rank2(), env_rank3_shifted()):
        recovered, rep = truncate_to_algebroid(env)
        assert rep.ok, rep.summary()
        assert recovered == env.A


def test_ope_expansion_output():
    env = env_rank1()
    pairs = ope_expansion(env, env.tau(0), env.omega(0), max_negative=2)
    levels = [n for n, _ in pairs]
    assert 1 in levels and -1 in levels
    d = dict(pairs)
    assert env.scalar_part(d[1]) == env.ring.one()


def test_fuel_exhaustion():
    env = Envelope(canonical_algebroid(Frame.coordinate(QXY)), fuel=3)
    rng = random.Random(1)
    with pytest.raises(FuelExhausted):
        for _ in range(50):
            x = env.CA.rand_elem(rng, 2, 2)
            y = env.CA.rand_elem(rng, 2, 2)
            env.normal_form([x, y, x])


def test_translate_shifts():
    env = env_rank1()
    # D(1) tau = the dp-1 letter
    assert env.translate(1, env.tau(0)) == env.tau(0, dp=1)
    assert env.translate(2, env.omega(0)) == env.omega(0, dp=2)
