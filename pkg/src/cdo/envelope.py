"""The vertex envelope of a vertex algebroid: chiral differential operators.

Elements are kept in PBW normal form: an A-linear combination of monomials

    a . x_{L_1} . x_{L_2} . ... . x_{L_m},        L_1 >= L_2 >= ... >= L_m,

where each letter L is a divided-power translate D(i) of a frame field
(T-letter) or of a dual-frame form (Omega-letter), the product dot is the
(-1)-product associated to the right, and the coefficient sits leftmost.
Letters are ordered weight-major (then Omega < T, then frame index), so
coefficients absorb leftward through the straightening relations.

All n-products are computed by structural recursion on normal forms:

* negative products reduce to (-1)-products of divided-power letters,
* a letter crosses a letter via the conformal Lie bracket,
* a letter crosses a coefficient via its positive conformal products,
* coefficients recombine through the quasi-associativity corrections,

with every correction strictly smaller in (weight of the right factor,
word length).  A configurable fuel bound guards the recursion; exhaustion
raises FuelExhausted carrying the stuck word.
"""

from __future__ import annotations

import itertools

from .conformal import ConfElem, ConformalAlgebra
from .geometry import OneForm, VectorField, d_elem
from .report import CheckReport
from .ring import Q, QONE, RingElem, RingError, binom
from .valgebroid import AlgebroidData

OMEGA, TKIND = 0, 1  # letter kinds; a letter is (dp, kind, frame index)


def letter_weight(L) -> int:
    return L[0] + 1


def word_weight(w) -> int:
    return sum(L[0] + 1 for L in w)


class FuelExhausted(RingError):
    """The rewriting engine ran out of fuel; carries the stuck word."""


class PbwElem:
    """A normal-form element: map from letter words to ring coefficients."""

    __slots__ = ("env", "terms", "_key")

    def __init__(self, env: "Envelope", terms: dict):
        self.env = env
        self.terms = terms
        self._key = None

    def is_zero(self):
        return not self.terms

    def max_weight(self) -> int:
        return max((word_weight(w) for w in self.terms), default=0)

    def weights(self):
        return {word_weight(w) for w in self.terms}

    def __add__(self, other):
        if not other.terms:
            return self
        if not self.terms:
            return other
        terms = dict(self.terms)
        for w, c in other.terms.items():
            s = terms.get(w)
            s = c if s is None else s + c
            if s.is_zero():
                terms.pop(w, None)
            else:
                terms[w] = s
        return PbwElem(self.env, terms)

    def __sub__(self, other):
        return self + other.scale(-1)

    def __neg__(self):
        return self.scale(-1)

    def scale(self, q):
        q = Q(q)
        if q == 0:
            return self.env.zero()
        return PbwElem(self.env, {w: c.scale(q) for w, c in self.terms.items()})

    def __eq__(self, other):
        return isinstance(other, PbwElem) and self.terms == other.terms

    def __hash__(self):
        return hash(self.cache_key())

    def cache_key(self):
        if self._key is None:
            self._key = tuple(sorted(
                (w, c.key()) for w, c in self.terms.items()
            ))
        return self._key

    def f_degree_split(self):
        """Split into {F-degree: PbwElem}; F counts T-letters per monomial."""
        out = {}
        for w, c in self.terms.items():
            f = sum(1 for L in w if L[1] == TKIND)
            out.setdefault(f, {})[w] = c
        return {f: PbwElem(self.env, t) for f, t in sorted(out.items())}

    def __str__(self):
        if not self.terms:
            return "0"
        env = self.env
        bits = []
        for w in sorted(self.terms, key=lambda w: (word_weight(w), w)):
            c = self.terms[w]
            label = ".".join(env.letter_name(L) for L in w) if w else "1"
            bits.append("(%s)%s" % (c, label))
        return " + ".join(bits)

    __repr__ = __str__


class Envelope:
    """Product engine for the vertex envelope of a frame-presented algebroid."""

    def __init__(self, algebroid: AlgebroidData, fuel: int = 10_000_000):
        self.A = algebroid
        self.CA = ConformalAlgebra(algebroid)
        self.ring = algebroid.ring
        self.rank = algebroid.rank
        self.fuel_limit = fuel
        self._fuel = fuel
        self._letter_conf = {}
        self._ins_cache = {}
        self._lact_cache = {}
        self._aact_cache = {}
        self._np_cache = {}
        self._confprod_cache = {}

    # -- bookkeeping ------------------------------------------------------------

    def reset_fuel(self):
        self._fuel = self.fuel_limit

    def _burn(self, w):
        self._fuel -= 1
        if self._fuel <= 0:
            raise FuelExhausted("rewriting fuel exhausted at word %r" % (w,))

    def letter_name(self, L) -> str:
        dp, kind, idx = L
        base = ("w%d" if kind == OMEGA else "t%d") % idx
        return base if dp == 0 else "D%d%s" % (dp, base)

    def letter_conf(self, L) -> ConfElem:
        out = self._letter_conf.get(L)
        if out is None:
            dp, kind, idx = L
            if kind == TKIND:
                out = self.CA.frame_field(idx, dp)
            else:
                out = self.CA.dual_form(idx, dp)
            self._letter_conf[L] = out
        return out

    def _conf_prod_letters(self, L1, p, L2) -> ConfElem:
        key = (L1, p, L2)
        out = self._confprod_cache.get(key)
        if out is None:
            out = self.CA.product(self.letter_conf(L1), p, self.letter_conf(L2))
            self._confprod_cache[key] = out
        return out

    # -- constructors -------------------------------------------------------------

    def zero(self) -> PbwElem:
        return PbwElem(self, {})

    def vacuum(self) -> PbwElem:
        return PbwElem(self, {(): self.ring.one()})

    def monomial(self, coeff: RingElem, word=()) -> PbwElem:
        if coeff.is_zero():
            return self.zero()
        return PbwElem(self, {tuple(word): coeff})

    def letter(self, kind, idx, dp=0) -> PbwElem:
        return self.monomial(self.ring.one(), ((dp, kind, idx),))

    def tau(self, idx, dp=0) -> PbwElem:
        return self.letter(TKIND, idx, dp)

    def omega(self, idx, dp=0) -> PbwElem:
        return self.letter(OMEGA, idx, dp)

    # -- primitive operations -----------------------------------------------------
    #
    # ins(L, v)        : x_L (-1) v
    # a_mul(a, v)      : a (-1) v
    # l_act(L, n, v)   : x_L (n) v, n >= 0
    # a_act(a, n, v)   : a (n) v,   n >= 0
    # conf_act(x, n, v): x (n) v for a C-element x and any integer n

    def ins(self, L, v: PbwElem) -> PbwElem:
        out = self.zero()
        dp, kind, idx = L
        for w, b in v.terms.items():
            base = self._ins_word(L, w)
            if b.is_constant():
                out = out + base.scale(b.const_value())
            else:
                out = out + self.a_mul_elem(b, base)
                if kind == TKIND:
                    tb = self.A.frame.fields[idx]
                    g = _vf_apply(tb, b)
                    if not g.is_zero():
                        out = out + self.dpa(g, dp + 1, self.monomial(self.ring.one(), w))
        return out

    def _ins_word(self, L, w) -> PbwElem:
        key = (L, w)
        out = self._ins_cache.get(key)
        if out is not None:
            return out
        self._burn(w)
        if not w or L >= w[0]:
            out = self.monomial(self.ring.one(), (L,) + w)
        else:
            y, u = w[0], w[1:]
            head = self.ins(y, self._ins_word(L, u))
            br = self.CA.lie_bracket(self.letter_conf(L), self.letter_conf(y))
            out = head + self.conf_act(br, -1, self.monomial(self.ring.one(), u))
        self._ins_cache[key] = out
        return out

    def a_mul_elem(self, a: RingElem, v: PbwElem) -> PbwElem:
        if a.is_zero():
            return self.zero()
        if a.is_constant():
            return v.scale(a.const_value())
        out = self.zero()
        for w, b in v.terms.items():
            if b.is_constant():
                out = out + self.monomial(a.scale(b.const_value()), w)
                continue
            out = out + self.monomial(a * b, w)
            pure = self.monomial(self.ring.one(), w)
            wt = word_weight(w)
            for j in range(0, wt):
                t1 = self.a_act(b, j, pure)
                if not t1.is_zero():
                    out = out - self.dpa(a, j + 1, t1)
                t2 = self.a_act(a, j, pure)
                if not t2.is_zero():
                    out = out - self.dpa(b, j + 1, t2)
        return out

    def dpa(self, a: RingElem, j: int, v: PbwElem) -> PbwElem:
        """(D(j)a) (-1) v for a weight-0 element a."""
        if a.is_zero() or v.is_zero():
            return self.zero()
        if j == 0:
            return self.a_mul_elem(a, v)
        da = d_elem(a)
        if da.is_zero():
            return self.zero()
        x = ConfElem(self.ring, None, None, {j - 1: da.scale(Q(1, j))})
        return self.conf_act(x, -1, v)

    def a_act(self, a: RingElem, n: int, v: PbwElem) -> PbwElem:
        if a.is_zero():
            return self.zero()
        if a.is_constant():
            return self.zero()  # constants act by q * vacuum projections, zero for n >= 0
        out = self.zero()
        for w, b in v.terms.items():
            inner = self._a_act_word(a, n, w)
            if inner.is_zero():
                continue
            out = out + self.a_mul_elem(b, inner)
        return out

    def _a_act_word(self, a: RingElem, n: int, w) -> PbwElem:
        if word_weight(w) - n - 1 < 0:
            return self.zero()
        key = (a, n, w)
        out = self._aact_cache.get(key)
        if out is not None:
            return out
        self._burn(w)
        if not w:
            out = self.zero()
        else:
            y, u = w[0], w[1:]
            out = self.ins(y, self._a_act_word(a, n, u))
            uelem = self.monomial(self.ring.one(), u)
            for p in range(0, n + 1):
                c = binom(n, p)
                if c == 0:
                    continue
                xp = self.CA.product(self.CA.scalar(a), p, self.letter_conf(y))
                if xp.is_zero():
                    continue
                out = out + self.conf_act(xp, n - p - 1, uelem).scale(c)
        self._aact_cache[key] = out
        return out

    def l_act(self, L, n: int, v: PbwElem) -> PbwElem:
        out = self.zero()
        dp, kind, idx = L
        for w, b in v.terms.items():
            inner = self._l_act_word(L, n, w)
            if not inner.is_zero():
                out = out + self.a_mul_elem(b, inner)
            if kind == TKIND and dp <= n and not b.is_constant():
                c = binom(n, dp) * (1 if dp % 2 == 0 else -1)
                g = _vf_apply(self.A.frame.fields[idx], b)
                if not g.is_zero() and c != 0:
                    out = out + self.conf_act(
                        self.CA.scalar(g), n - dp - 1,
                        self.monomial(self.ring.one(), w),
                    ).scale(c)
        return out

    def _l_act_word(self, L, n: int, w) -> PbwElem:
        if letter_weight(L) + word_weight(w) - n - 1 < 0:
            return self.zero()
        key = (L, n, w)
        out = self._lact_cache.get(key)
        if out is not None:
            return out
        self._burn(w)
        if not w:
            out = self.zero()
        else:
            y, u = w[0], w[1:]
            out = self.ins(y, self._l_act_word(L, n, u))
            uelem = self.monomial(self.ring.one(), u)
            for p in range(0, n + 1):
                c = binom(n, p)
                if c == 0:
                    continue
                xp = self._conf_prod_letters(L, p, y)
                if xp.is_zero():
                    continue
                out = out + self.conf_act(xp, n - p - 1, uelem).scale(c)
        self._lact_cache[key] = out
        return out

    def letter_op(self, kind, idx, t: int, v: PbwElem) -> PbwElem:
        """The dp-0 letter field e_{(t)} at any level t."""
        if t >= 0:
            return self.l_act((0, kind, idx), t, v)
        return self.ins((-t - 1, kind, idx), v)

    def gen_nprod(self, kind, idx, f: RingElem, m: int, v: PbwElem) -> PbwElem:
        """(f . e)_(m) v for a frame/dual generator e with coefficient f,
        through the quasi-associativity expansion of (f (-1) e)_(m)."""
        out = self.zero()
        wt = v.max_weight()
        jmax = max(-m - 1, wt - m)
        for j in range(0, jmax + 1):
            t = self.letter_op(kind, idx, m + j, v)
            if not t.is_zero():
                out = out + self.dpa(f, j, t)
        for j in range(0, wt):
            t = self.a_act(f, j, v)
            if not t.is_zero():
                out = out + self.letter_op(kind, idx, m - 1 - j, t)
        return out

    def conf_act(self, x: ConfElem, n: int, v: PbwElem) -> PbwElem:
        """x_(n) v for any C-element and any integer level."""
        if v.is_zero() or x.is_zero():
            return self.zero()
        out = self.zero()
        a = x.a_part
        if not a.is_zero():
            if n >= 0:
                out = out + self.a_act(a, n, v)
            else:
                out = out + self.dpa(a, -n - 1, v)
        frame = self.A.frame
        for i, vec in x.t_parts.items():
            coef0 = binom(n, i) * (1 if i % 2 == 0 else -1)
            if coef0 == 0:
                continue
            m = n - i
            for s, f in enumerate(frame.decompose(vec)):
                if f.is_zero():
                    continue
                if f.is_constant():
                    term = self.letter_op(TKIND, s, m, v).scale(f.const_value())
                else:
                    term = self.gen_nprod(TKIND, s, f, m, v)
                out = out + term.scale(coef0)
        for i, form in x.o_parts.items():
            coef0 = binom(n, i) * (1 if i % 2 == 0 else -1)
            if coef0 == 0:
                continue
            m = n - i
            for s, f in enumerate(frame.decompose_form(form)):
                if f.is_zero():
                    continue
                if f.is_constant():
                    term = self.letter_op(OMEGA, s, m, v).scale(f.const_value())
                else:
                    term = self.gen_nprod(OMEGA, s, f, m, v)
                out = out + term.scale(coef0)
        return out

    # -- public API -----------------------------------------------------------------

    def embed(self, x: ConfElem) -> PbwElem:
        """The image of a C-element in the envelope, in normal form."""
        return self.conf_act(x, -1, self.vacuum())

    def normal_form(self, word) -> PbwElem:
        """Normalize a word of C-elements / ring elements, multiplied by
        successive (-1)-products associated to the right."""
        out = self.vacuum()
        for g in reversed(list(word)):
            if isinstance(g, RingElem):
                g = self.CA.scalar(g)
            out = self.conf_act(g, -1, out)
        return out

    def _word_nprod(self, w, n: int, V: PbwElem) -> PbwElem:
        if not w:
            return V if n == -1 else self.zero()
        key = (w, n, V.cache_key())
        out = self._np_cache.get(key)
        if out is not None:
            return out
        self._burn(w)
        y, u = w[0], w[1:]
        dp, kind, idx = y
        acc = self.zero()
        wtu, wtv = word_weight(u), V.max_weight()
        jmax = max(-n - 1, wtu + wtv - n - 1)
        for j in range(0, jmax + 1):
            t = self._word_nprod(u, n + j, V)
            if t.is_zero():
                continue
            c = binom(dp + j, dp)
            acc = acc + self.ins((dp + j, kind, idx), t).scale(c)
        for j in range(0, letter_weight(y) + wtv):
            t = self.l_act(y, j, V)
            if t.is_zero():
                continue
            acc = acc + self._word_nprod(u, n - 1 - j, t)
        self._np_cache[key] = acc
        return acc

    def nproduct(self, Uel: PbwElem, n: int, V: PbwElem) -> PbwElem:
        """The n-th product of two normal forms, any integer n."""
        out = self.zero()
        for w, b in Uel.terms.items():
            if b.is_constant():
                q = b.const_value()
                out = out + self._word_nprod(w, n, V).scale(q)
                continue
            wtw, wtv = word_weight(w), V.max_weight()
            jmax = max(-n - 1, wtw + wtv - n - 1)
            for j in range(0, jmax + 1):
                t = self._word_nprod(w, n + j, V)
                if not t.is_zero():
                    out = out + self.dpa(b, j, t)
            for j in range(0, wtv):
                t = self.a_act(b, j, V)
                if not t.is_zero():
                    out = out + self._word_nprod(w, n - 1 - j, t)
        return out

    def translate(self, j: int, v: PbwElem) -> PbwElem:
        """D(j) v = v_(-1-j) vacuum."""
        if j == 0:
            return v
        return self.nproduct(v, -1 - j, self.vacuum())

    # -- extraction helpers -------------------------------------------------------

    def scalar_part(self, v: PbwElem) -> RingElem:
        """The coefficient of the vacuum monomial (weight-0 component)."""
        return v.terms.get((), self.ring.zero())

    def to_one_form(self, v: PbwElem) -> OneForm:
        """Interpret a combination of dp-0 Omega-letters as a 1-form."""
        out = OneForm.zero(self.ring)
        dual = self.A.frame.dual_forms()
        for w, c in v.terms.items():
            if len(w) != 1 or w[0][0] != 0 or w[0][1] != OMEGA:
                raise RingError("not a pure weight-1 form element: %s" % v)
            out = out + dual[w[0][2]].mul(c)
        return out


def _vf_apply(t, a):
    from .geometry import vf_apply

    return vf_apply(t, a)


# -- characters and counts ------------------------------------------------------


def series_inverse_product(exponents, N: int):
    """Coefficients up to q^N of prod_{i>=1} (1-q^i)^(-exponents(i)) with
    exponents a function of i (constant int allowed)."""
    coeffs = [0] * (N + 1)
    coeffs[0] = 1
    for i in range(1, N + 1):
        e = exponents(i) if callable(exponents) else exponents
        for _ in range(e):
            # multiply by 1/(1 - q^i): prefix-sum with stride i
            for k in range(i, N + 1):
                coeffs[k] += coeffs[k - i]
    return coeffs


def enumerate_words(rank: int, weight: int, kinds=(OMEGA, TKIND)):
    """All normal-form letter words of the given total weight."""
    letters = []
    for dp in range(weight):
        for kind in kinds:
            for idx in range(rank):
                letters.append((dp, kind, idx))
    letters.sort(reverse=True)
    out = []

    def rec(pos, remaining, acc):
        if remaining == 0:
            out.append(tuple(acc))
            return
        for k in range(pos, len(letters)):
            L = letters[k]
            wl = letter_weight(L)
            if wl > remaining:
                continue
            acc.append(L)
            rec(k, remaining - wl, acc)
            acc.pop()

    rec(0, weight, [])
    return out


def weight_rank(rank: int, N: int):
    """(generating-function coefficient, direct monomial count) at weight N
    for a rank-`rank` algebroid: coefficient of q^N in prod (1-q^i)^(-2 rank)."""
    if N < 0:
        raise RingError("weight must be nonnegative")
    coeff = series_inverse_product(2 * rank, N)[N]
    count = len(enumerate_words(rank, N)) if N > 0 else 1
    return coeff, count


def jet_algebra_rank(rank_omega: int, N: int):
    """(generating-function coefficient, Sym-model monomial count) for the
    weight-N component of the jet algebra of an abelian algebroid with free
    Omega of the given rank."""
    if N < 0:
        raise RingError("weight must be nonnegative")
    coeff = series_inverse_product(rank_omega, N)[N]
    count = len(enumerate_words(rank_omega, N, kinds=(OMEGA,))) if N > 0 else 1
    return coeff, count


def gr_character(rank: int, N: int):
    """Bigraded character {(weight, F-degree): rank} for weights <= N, from
    PBW monomial enumeration; F counts T-letters."""
    table = {(0, 0): 1}
    for wgt in range(1, N + 1):
        for w in enumerate_words(rank, wgt):
            f = sum(1 for L in w if L[1] == TKIND)
            table[(wgt, f)] = table.get((wgt, f), 0) + 1
    return table


def sym_character(rank: int, N: int):
    """The same bigraded character from the symmetric-algebra side: the
    coefficient of t^f q^w in prod_{i>=1} (1-t q^i)^{-rank} (1-q^i)^{-rank},
    truncated at q^N.  Returned as {(weight, F-degree): rank}."""
    maxf = N  # an F-degree f needs weight >= f
    coeffs = [[0] * (N + 1) for _ in range(maxf + 1)]
    coeffs[0][0] = 1
    # multiplying a truncated series S by 1/(1 - t^a q^i) is the in-place
    # ascending recurrence R[f][w] = S[f][w] + R[f-a][w-i]
    for i in range(1, N + 1):
        for _ in range(rank):
            for f in range(maxf + 1):  # 1/(1 - q^i)
                row = coeffs[f]
                for k in range(i, N + 1):
                    row[k] += row[k - i]
            for f in range(1, maxf + 1):  # 1/(1 - t q^i)
                prev = coeffs[f - 1]
                row = coeffs[f]
                for k in range(i, N + 1):
                    row[k] += prev[k - i]
    table = {}
    for f in range(maxf + 1):
        for w in range(N + 1):
            if coeffs[f][w]:
                table[(w, f)] = coeffs[f][w]
    return table


# -- identity suites ---------------------------------------------------------------


def vacuum_check(env: Envelope, samples=5, seed=0) -> CheckReport:
    """The vacuum laws: 1_(n) a = delta a, a_(-1) 1 = a, a_(n) 1 = 0."""
    import random

    rep = CheckReport("vacuum")
    rng = random.Random(seed)
    one = env.vacuum()
    for s in range(samples):
        x = env.CA.rand_elem(rng, 2, 2)
        v = env.embed(x)
        rep.check_zero("a(-1)1=a[#%d]" % s, env.nproduct(v, -1, one) - v)
        for n in range(0, v.max_weight() + 2):
            rep.check_zero("a(%d)1=0[#%d]" % (n, s), env.nproduct(v, n, one))
        rep.check_zero("1(-1)a=a[#%d]" % s, env.nproduct(one, -1, v) - v)
        rep.check_zero("1(0)a=0[#%d]" % s, env.nproduct(one, 0, v))
    return rep


def borcherds_check(env: Envelope, a: PbwElem, b: PbwElem, c: PbwElem,
                    m: int, n: int, l: int, rep: CheckReport | None = None,
                    ident: str | None = None) -> CheckReport:
    """The Borcherds identity at indices (m, n, l), exactly:

    sum_j C(m,j) (a_(n+j) b)_(m+l-j) c
      = sum_j (-1)^j C(n,j) { a_(m+n-j) b_(l+j) c - (-1)^n b_(n+l-j) a_(m+j) c }.
    """
    if rep is None:
        rep = CheckReport("borcherds")
    wa, wb, wc = a.max_weight(), b.max_weight(), c.max_weight()
    lhs = env.zero()
    jmax = wa + wb - n - 1
    if m >= 0:
        jmax = min(jmax, m)
    for j in range(0, max(jmax, -1) + 1):
        coef = binom(m, j)
        if coef == 0:
            continue
        ab = env.nproduct(a, n + j, b)
        if ab.is_zero():
            continue
        lhs = lhs + env.nproduct(ab, m + l - j, c).scale(coef)
    rhs = env.zero()
    j1 = wb + wc - l - 1
    j2 = wa + wc - m - 1
    if n >= 0:
        j1 = min(j1, n)
        j2 = min(j2, n)
    for j in range(0, max(j1, -1) + 1):
        coef = binom(n, j) * (1 if j % 2 == 0 else -1)
        if coef == 0:
            continue
        bc = env.nproduct(b, l + j, c)
        if bc.is_zero():
            continue
        rhs = rhs + env.nproduct(a, m + n - j, bc).scale(coef)
    sgn = 1 if n % 2 == 0 else -1
    for j in range(0, max(j2, -1) + 1):
        coef = binom(n, j) * (1 if j % 2 == 0 else -1)
        if coef == 0:
            continue
        ac = env.nproduct(a, m + j, c)
        if ac.is_zero():
            continue
        rhs = rhs - env.nproduct(b, n + l - j, ac).scale(coef * sgn)
    rep.check_zero(ident or "borcherds[m=%d,n=%d,l=%d]" % (m, n, l), lhs - rhs)
    return rep


def commutativity_check(env: Envelope, a: PbwElem, b: PbwElem, n: int,
                        rep: CheckReport | None = None) -> CheckReport:
    """(0.5.9): a_(n) b = (-1)^{n+1} sum_j (-1)^j D(j) (b_(n+j) a)."""
    if rep is None:
        rep = CheckReport("commutativity")
    lhs = env.nproduct(a, n, b)
    rhs = env.zero()
    jmax = a.max_weight() + b.max_weight() - n
    for j in range(0, max(jmax, 0) + 1):
        t = env.nproduct(b, n + j, a)
        if t.is_zero():
            continue
        term = env.translate(j, t)
        rhs = rhs + (term if j % 2 == 0 else -term)
    rhs = rhs.scale(1 if (n + 1) % 2 == 0 else -1)
    rep.check_zero("comm[n=%d]" % n, lhs - rhs)
    return rep


def ope_check(env: Envelope, a: PbwElem, b: PbwElem, v: PbwElem,
              m: int, n: int, rep: CheckReport | None = None) -> CheckReport:
    """(0.5.12): [a_(m), b_(n)] v = sum_j C(m,j) (a_(j)b)_(m+n-j) v."""
    if rep is None:
        rep = CheckReport("ope")
    lhs = env.nproduct(a, m, env.nproduct(b, n, v)) \
        - env.nproduct(b, n, env.nproduct(a, m, v))
    rhs = env.zero()
    jmax = a.max_weight() + b.max_weight() - 1
    if m >= 0:
        jmax = min(jmax, m)
    for j in range(0, max(jmax, -1) + 1):
        coef = binom(m, j)
        if coef == 0:
            continue
        ab = env.nproduct(a, j, b)
        if ab.is_zero():
            continue
        rhs = rhs + env.nproduct(ab, m + n - j, v).scale(coef)
    rep.check_zero("ope[m=%d,n=%d]" % (m, n), lhs - rhs)
    return rep


def relation_stability_check(env: Envelope, samples=5, seed=0) -> CheckReport:
    """The straightening relations normalize to zero and stay zero under all
    operations: normal_form(a . tau - (a tau) + gamma(a, tau)) = 0."""
    import random

    from . import sampling

    rep = CheckReport("relations")
    rng = random.Random(seed)
    A = env.A
    for s in range(samples):
        a = sampling.rand_elem(env.ring, rng, 2)
        t = sampling.rand_frame_field(A.frame, rng, 2)
        tau = env.CA.field(t)
        lhs = env.normal_form([a, tau])
        rhs = env.embed(env.CA.field(t.mul(a))) - env.embed(env.CA.form(A.gamma(a, t)))
        rep.check_zero("r(a,tau)[#%d]" % s, lhs - rhs)
        w = sampling.rand_one_form(env.ring, rng, 2)
        lhs2 = env.normal_form([a, env.CA.form(w)])
        rhs2 = env.embed(env.CA.form(w.mul(a)))
        rep.check_zero("r(a,omega)[#%d]" % s, lhs2 - rhs2)
    return rep


def strategy_independence_check(env: Envelope, word, rep: CheckReport | None = None,
                                tag: str = "") -> CheckReport:
    """Normalize one word along structurally different routes and compare.

    Route A folds generators through the structural recursion; route B embeds
    every generator first and folds with the generic n-product; route C splits
    the word at each position, normalizes the tail, and joins with n-products;
    route D swaps an adjacent pair and corrects by the conformal Lie bracket.
    """
    if rep is None:
        rep = CheckReport("strategy")
    word = [env.CA.scalar(g) if isinstance(g, RingElem) else g for g in word]
    base = env.normal_form(word)

    out_b = env.vacuum()
    for g in reversed(word):
        out_b = env.nproduct(env.embed(g), -1, out_b)
    rep.check_zero("embed-fold%s" % tag, base - out_b)

    for k in range(1, len(word)):
        tail = env.normal_form(word[k:])
        out_c = tail
        for g in reversed(word[:k]):
            out_c = env.nproduct(env.embed(g), -1, out_c)
        rep.check_zero("split@%d%s" % (k, tag), base - out_c)

    for k in range(len(word) - 1):
        swapped = word[:k] + [word[k + 1], word[k]] + word[k + 2:]
        br = env.CA.lie_bracket(word[k], word[k + 1])
        bracket_word = word[:k] + [br] + word[k + 2:]
        lhs = base - env.normal_form(swapped)
        rep.check_zero(
            "swap@%d%s" % (k, tag), lhs - env.normal_form(bracket_word)
        )
    return rep


def sym_model_check(env: Envelope, samples=30, weight_bound=4, seed=0) -> CheckReport:
    """The leading-symbol identity of the symmetric model: a normal word
    (coefficient, then letters in order) normalizes to exactly itself."""
    import random

    rep = CheckReport("sym-model")
    rng = random.Random(seed)
    words = [w for wgt in range(0, weight_bound + 1)
             for w in enumerate_words(env.rank, wgt)] + [()]
    from . import sampling

    for s in range(samples):
        w = words[rng.randrange(len(words))]
        a = sampling.rand_nonzero_elem(env.ring, rng, 2)
        atoms = [a] + [env.letter_conf(L) for L in w]
        got = env.normal_form(atoms)
        rep.check_zero("symbol[#%d]" % s, got - env.monomial(a, w))
    return rep


def ope_expansion(env: Envelope, u: PbwElem, v: PbwElem, max_negative: int = 2):
    """The singular-plus-regular expansion of u(z)v: pairs (n, u_(n) v) for
    n >= -max_negative, up to the weight bound where products vanish."""
    out = []
    for n in range(-max_negative, u.max_weight() + v.max_weight()):
        p = env.nproduct(u, n, v)
        if not p.is_zero():
            out.append((n, p))
    return out


# -- truncation round trip -----------------------------------------------------------


def truncate_to_algebroid(env: Envelope):
    """Recompute the algebroid tables from envelope products through the
    canonical splitting and compare with the source exactly."""
    rep = CheckReport("roundtrip")
    A = env.A
    n = env.rank
    taus = [env.tau(i) for i in range(n)]
    half = Q(1, 2)
    pair_rec = [[None] * n for _ in range(n)]
    c_rec = [[None] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            pair_rec[i][j] = env.scalar_part(env.nproduct(taus[i], 1, taus[j]))
            # c(tau_i, tau_j) = s([t_i,t_j]) - [s(t_i), s(t_j)]; frame brackets vanish
            comm = env.nproduct(taus[i], 0, taus[j]) - env.nproduct(taus[j], 0, taus[i])
            c_elem = comm.scale(-half)
            c_rec[i][j] = env.to_one_form(c_elem)
            rep.check_zero(
                "pair[%d%d]" % (i, j), pair_rec[i][j] - A.pairing_table[i][j]
            )
            rep.check_zero("c[%d%d]" % (i, j), c_rec[i][j] - A.c_table[i][j])
    # gamma recovery on random elements: s(a tau) - a . s(tau) = gamma(a, tau)
    import random

    from . import sampling

    rng = random.Random(17)
    for s in range(4):
        a = sampling.rand_elem(env.ring, rng, 2)
        t = sampling.rand_frame_field(A.frame, rng, 2)
        lhs = env.embed(env.CA.field(t.mul(a))) \
            - env.a_mul_elem(a, env.embed(env.CA.field(t)))
        rhs = env.embed(env.CA.form(A.gamma(a, t)))
        rep.check_zero("gamma[#%d]" % s, lhs - rhs)
    recovered = AlgebroidData(A.frame, pair_rec, c_rec)
    return recovered, rep
