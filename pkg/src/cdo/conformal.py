"""The graded conformal algebra attached to a vertex algebroid.

Elements live in  A  +  sum_i D(i)T  +  sum_i D(i)Omega,  where D(i) is the
i-th divided-power translation and a D(i)T / D(i)Omega part has conformal
weight i+1.  Over the rationals, divided powers of weight-0 elements reduce
into the form part (D(j)a = (1/j) D(j-1) da for j >= 1), so the reduced
shape above is exhaustive and the divided-power bookkeeping is confined to
``divided_power``.  Negative divided powers are zero by convention.

The nonnegative products are the explicit algebroid formulas

    a   (n) D(i)t = -D(i-n) t(a)
    t   (n) D(i)a =  D(i-n) t(a)
    w   (n) D(i)t = -D(i-n) t(w) + (i+1) D(i-n+1) <w,t>
    t   (n) D(i)w =  D(i-n) t(w) +   n   D(i-n+1) <t,w>
    t   (n) D(i)t' = D(i-n){[t,t'] - c(t,t')} + (i+n+1)/2 D(i-n+1) <t,t'>

with everything among A and Omega parts vanishing, extended bilinearly and
through divided powers on the left by (D(j)x)_(n) = (-1)^j C(n,j) x_(n-j).
"""

from __future__ import annotations

import random

from .geometry import OneForm, VectorField, d_elem, lie_derivative, pairing, vf_apply, vf_bracket
from .report import CheckReport
from .ring import Q, RingElem, RingError, binom
from .valgebroid import AlgebroidData
from . import sampling


class ConfElem:
    """Graded element: scalar part + divided-power field and form parts."""

    __slots__ = ("ring", "a_part", "t_parts", "o_parts")

    def __init__(self, ring, a_part=None, t_parts=None, o_parts=None):
        self.ring = ring
        self.a_part = a_part if a_part is not None else ring.zero()
        self.t_parts = {i: v for i, v in (t_parts or {}).items() if not v.is_zero()}
        self.o_parts = {i: w for i, w in (o_parts or {}).items() if not w.is_zero()}

    def is_zero(self):
        return self.a_part.is_zero() and not self.t_parts and not self.o_parts

    def max_weight(self) -> int:
        w = 0 if self.a_part.is_zero() else 0
        for i in self.t_parts:
            w = max(w, i + 1)
        for i in self.o_parts:
            w = max(w, i + 1)
        return w

    def weights(self):
        out = set()
        if not self.a_part.is_zero():
            out.add(0)
        out.update(i + 1 for i in self.t_parts)
        out.update(i + 1 for i in self.o_parts)
        return out

    def weight_piece(self, w: int) -> "ConfElem":
        if w == 0:
            return ConfElem(self.ring, self.a_part)
        return ConfElem(
            self.ring,
            None,
            {w - 1: self.t_parts[w - 1]} if w - 1 in self.t_parts else None,
            {w - 1: self.o_parts[w - 1]} if w - 1 in self.o_parts else None,
        )

    def __add__(self, other):
        t = dict(self.t_parts)
        for i, v in other.t_parts.items():
            t[i] = t[i] + v if i in t else v
        o = dict(self.o_parts)
        for i, w in other.o_parts.items():
            o[i] = o[i] + w if i in o else w
        return ConfElem(self.ring, self.a_part + other.a_part, t, o)

    def __sub__(self, other):
        return self + other.scale(-1)

    def __neg__(self):
        return self.scale(-1)

    def scale(self, q):
        return ConfElem(
            self.ring,
            self.a_part.scale(q),
            {i: v.scale(q) for i, v in self.t_parts.items()},
            {i: w.scale(q) for i, w in self.o_parts.items()},
        )

    def __eq__(self, other):
        return (
            isinstance(other, ConfElem)
            and self.ring == other.ring
            and self.a_part == other.a_part
            and self.t_parts == other.t_parts
            and self.o_parts == other.o_parts
        )

    def __hash__(self):
        return hash((
            "conf", self.a_part,
            frozenset(self.t_parts.items()), frozenset(self.o_parts.items()),
        ))

    def __str__(self):
        bits = []
        if not self.a_part.is_zero():
            bits.append(str(self.a_part))
        for i in sorted(self.t_parts):
            bits.append("D%d[%s]" % (i, self.t_parts[i]))
        for i in sorted(self.o_parts):
            bits.append("D%d[%s]" % (i, self.o_parts[i]))
        return " + ".join(bits) if bits else "0"

    __repr__ = __str__


class ConformalAlgebra:
    """Product structure on ConfElems over a fixed algebroid."""

    def __init__(self, algebroid: AlgebroidData):
        self.algebroid = algebroid
        self.ring = algebroid.ring

    # -- constructors ---------------------------------------------------------

    def zero(self):
        return ConfElem(self.ring)

    def scalar(self, a) -> ConfElem:
        if isinstance(a, (int,)):
            a = self.ring.const(a)
        return ConfElem(self.ring, a)

    def field(self, v: VectorField, dp: int = 0) -> ConfElem:
        return ConfElem(self.ring, None, {dp: v})

    def form(self, w: OneForm, dp: int = 0) -> ConfElem:
        return ConfElem(self.ring, None, None, {dp: w})

    def frame_field(self, s: int, dp: int = 0) -> ConfElem:
        return self.field(self.algebroid.frame.fields[s], dp)

    def dual_form(self, r: int, dp: int = 0) -> ConfElem:
        return self.form(self.algebroid.frame.dual_forms()[r], dp)

    # -- divided powers ---------------------------------------------------------

    def _dp_scalar(self, k: int, g: RingElem) -> ConfElem:
        """D(k) of a weight-0 element; lands in the form part for k >= 1."""
        if g.is_zero() or k < 0:
            return self.zero()
        if k == 0:
            return ConfElem(self.ring, g)
        return ConfElem(self.ring, None, None, {k - 1: d_elem(g).scale(Q(1, k))})

    def divided_power(self, j: int, x: ConfElem) -> ConfElem:
        if j < 0:
            return self.zero()
        if j == 0:
            return x
        out = self._dp_scalar(j, x.a_part)
        t = {}
        for i, v in x.t_parts.items():
            t[i + j] = v.scale(binom(i + j, i))
        o = dict(out.o_parts)
        for i, w in x.o_parts.items():
            key = i + j
            w = w.scale(binom(i + j, i))
            o[key] = o[key] + w if key in o else w
        return ConfElem(self.ring, out.a_part, t, o)

    # -- products ------------------------------------------------------------------

    def _dp_field(self, k: int, v: VectorField) -> ConfElem:
        if k < 0 or v.is_zero():
            return self.zero()
        return ConfElem(self.ring, None, {k: v})

    def _dp_form(self, k: int, w: OneForm) -> ConfElem:
        if k < 0 or w.is_zero():
            return self.zero()
        return ConfElem(self.ring, None, None, {k: w})

    def _prod_scalar_left(self, a: RingElem, m: int, y: ConfElem) -> ConfElem:
        out = self.zero()
        for i, nu in y.t_parts.items():
            out = out - self._dp_scalar(i - m, vf_apply(nu, a))
        return out

    def _prod_field_left(self, mu: VectorField, m: int, y: ConfElem) -> ConfElem:
        A = self.algebroid
        out = self.zero()
        if not y.a_part.is_zero() and m == 0:
            out = out + self.scalar(vf_apply(mu, y.a_part))
        for i, nu in y.t_parts.items():
            br = vf_bracket(mu, nu)
            cc = A.c(mu, nu)
            out = out + self._dp_field(i - m, br) - self._dp_form(i - m, cc)
            pr = A.pair_tt(mu, nu)
            if not pr.is_zero():
                out = out + self._dp_scalar(i - m + 1, pr.scale(Q(i + m + 1, 2)))
        for i, w in y.o_parts.items():
            out = out + self._dp_form(i - m, lie_derivative(mu, w))
            if m:
                pr = pairing(mu, w)
                if not pr.is_zero():
                    out = out + self._dp_scalar(i - m + 1, pr.scale(m))
        return out

    def _prod_form_left(self, eta: OneForm, m: int, y: ConfElem) -> ConfElem:
        out = self.zero()
        for i, nu in y.t_parts.items():
            out = out - self._dp_form(i - m, lie_derivative(nu, eta))
            pr = pairing(nu, eta)
            if not pr.is_zero():
                out = out + self._dp_scalar(i - m + 1, pr.scale(i + 1))
        return out

    def product(self, x: ConfElem, n: int, y: ConfElem) -> ConfElem:
        """The n-th product, n >= 0."""
        if n < 0:
            raise RingError("conformal products are defined for n >= 0")
        out = self.zero()
        if not x.a_part.is_zero():
            out = out + self._prod_scalar_left(x.a_part, n, y)
        for j, mu in x.t_parts.items():
            m = n - j
            if m < 0:
                continue
            coef = binom(n, j) * (1 if j % 2 == 0 else -1)
            if coef == 0:
                continue
            term = self._prod_field_left(mu, m, y)
            out = out + term.scale(coef)
        for j, eta in x.o_parts.items():
            m = n - j
            if m < 0:
                continue
            coef = binom(n, j) * (1 if j % 2 == 0 else -1)
            if coef == 0:
                continue
            term = self._prod_form_left(eta, m, y)
            out = out + term.scale(coef)
        return out

    def lie_bracket(self, x: ConfElem, y: ConfElem) -> ConfElem:
        """[x, y] = sum_j (-1)^j D(j+1) (x_(j) y)."""
        out = self.zero()
        jmax = x.max_weight() + y.max_weight()
        for j in range(jmax + 1):
            p = self.product(x, j, y)
            if p.is_zero():
                continue
            term = self.divided_power(j + 1, p)
            out = out + (term if j % 2 == 0 else -term)
        return out

    # -- sampling and the axiom suite -----------------------------------------

    def rand_elem(self, rng: random.Random, degree_bound=2, weight_bound=2) -> ConfElem:
        t_parts, o_parts = {}, {}
        for i in range(weight_bound):
            if rng.random() < 0.6:
                t_parts[i] = sampling.rand_frame_field(
                    self.algebroid.frame, rng, degree_bound
                )
            if rng.random() < 0.6:
                o_parts[i] = sampling.rand_one_form(self.ring, rng, degree_bound)
        return ConfElem(
            self.ring, sampling.rand_elem(self.ring, rng, degree_bound),
            t_parts, o_parts,
        )


def conf_product(CA: ConformalAlgebra, x, n, y):
    return CA.product(x, n, y)


def divided_power(CA: ConformalAlgebra, j, x):
    return CA.divided_power(j, x)


def conf_lie_bracket(CA: ConformalAlgebra, x, y):
    return CA.lie_bracket(x, y)


def conf_axiom_check(CA: ConformalAlgebra, samples=20, degree_bound=2,
                     weight_bound=2, seed=0) -> CheckReport:
    """Verify the conformal axioms and their derived identities on seeded
    random elements of bounded weight and coefficient degree."""
    rep = CheckReport("conformal-axioms")
    rng = random.Random(seed)
    for s in range(samples):
        x = CA.rand_elem(rng, degree_bound, weight_bound)
        y = CA.rand_elem(rng, degree_bound, weight_bound)
        z = CA.rand_elem(rng, degree_bound, weight_bound)
        wx, wy = x.max_weight(), y.max_weight()

        # (0.4.1) on a sample of (i, j)
        for i, j in ((1, 1), (1, 2), (2, 1)):
            lhs = CA.divided_power(i, CA.divided_power(j, x))
            rhs = CA.divided_power(i + j, x).scale(binom(i + j, i))
            rep.check_zero("0.4.1[%d,%d #%d]" % (i, j, s), lhs - rhs)

        # (0.4.2): (D(i)x)_(n) y = (-1)^i C(n,i) x_(n-i) y
        for i in (1, 2):
            for n in range(0, wx + wy + i + 1):
                lhs = CA.product(CA.divided_power(i, x), n, y)
                if n - i >= 0:
                    rhs = CA.product(x, n - i, y).scale(
                        binom(n, i) * (1 if i % 2 == 0 else -1)
                    )
                else:
                    rhs = CA.zero()
                rep.check_zero("0.4.2[i=%d,n=%d #%d]" % (i, n, s), lhs - rhs)

        # (0.4.3): x_(n) y = (-1)^{n+1} sum_j (-1)^j D(j) (y_(n+j) x)
        for n in range(0, wx + wy + 1):
            rhs = CA.zero()
            for j in range(0, wx + wy - n + 1):
                p = CA.product(y, n + j, x)
                if p.is_zero():
                    continue
                term = CA.divided_power(j, p)
                rhs = rhs + (term if j % 2 == 0 else -term)
            rhs = rhs.scale(1 if (n + 1) % 2 == 0 else -1)
            rep.check_zero("0.4.3[n=%d #%d]" % (n, s), CA.product(x, n, y) - rhs)

        # (0.4.4): x_(m) y_(n) z = y_(n) x_(m) z + sum_j C(m,j) (x_(j)y)_(m+n-j) z
        for m, n in ((0, 0), (0, 1), (1, 0), (1, 1), (2, 1)):
            lhs = CA.product(x, m, CA.product(y, n, z))
            rhs = CA.product(y, n, CA.product(x, m, z))
            for j in range(0, m + 1):
                p = CA.product(x, j, y)
                if p.is_zero():
                    continue
                rhs = rhs + CA.product(p, m + n - j, z).scale(binom(m, j))
            rep.check_zero("0.4.4[m=%d,n=%d #%d]" % (m, n, s), lhs - rhs)

        # (0.4.5): (x_(m)y)_(n)z = sum_j (-1)^j C(m,j)
        #            { x_(m-j) y_(n+j) z - (-1)^m y_(m+n-j) x_(j) z }
        for m, n in ((1, 0), (1, 1), (2, 0)):
            lhs = CA.product(CA.product(x, m, y), n, z)
            rhs = CA.zero()
            for j in range(0, m + 1):
                sgn = 1 if j % 2 == 0 else -1
                t1 = CA.product(x, m - j, CA.product(y, n + j, z))
                t2 = CA.product(y, m + n - j, CA.product(x, j, z))
                term = t1 - (t2 if m % 2 == 0 else t2.scale(-1))
                rhs = rhs + term.scale(binom(m, j) * sgn)
            rep.check_zero("0.4.5[m=%d,n=%d #%d]" % (m, n, s), lhs - rhs)

        # (0.4.6): D(j)(x_(n)y) = sum_p (D(p)x)_(n) D(j-p)y
        for j, n in ((1, 0), (1, 1), (2, 1)):
            lhs = CA.divided_power(j, CA.product(x, n, y))
            rhs = CA.zero()
            for p in range(0, j + 1):
                rhs = rhs + CA.product(
                    CA.divided_power(p, x), n, CA.divided_power(j - p, y)
                )
            rep.check_zero("0.4.6[j=%d,n=%d #%d]" % (j, n, s), lhs - rhs)

        # (0.4.7): x_(n) D(j)y = sum_p C(n,p) D(j-p)(x_(n-p) y)
        for j, n in ((1, 1), (2, 1), (1, 2)):
            lhs = CA.product(x, n, CA.divided_power(j, y))
            rhs = CA.zero()
            for p in range(0, min(j, n) + 1):
                q = CA.product(x, n - p, y)
                if q.is_zero():
                    continue
                rhs = rhs + CA.divided_power(j - p, q).scale(binom(n, p))
            rep.check_zero("0.4.7[j=%d,n=%d #%d]" % (j, n, s), lhs - rhs)

        # weight homogeneity of products on homogeneous pieces
        for wpx in x.weights():
            for wpy in y.weights():
                for n in range(0, wpx + wpy + 1):
                    p = CA.product(x.weight_piece(wpx), n, y.weight_piece(wpy))
                    want = wpx + wpy - n - 1
                    ok = all(w == want for w in p.weights())
                    rep.record("weight[%d,%d,n=%d #%d]" % (wpx, wpy, n, s), ok,
                               None if ok else p)
    return rep


def bracket_check(CA: ConformalAlgebra, samples=20, degree_bound=2,
                  weight_bound=2, seed=1) -> CheckReport:
    """Skew symmetry and Jacobi for the conformal Lie bracket."""
    rep = CheckReport("conformal-bracket")
    rng = random.Random(seed)
    for s in range(samples):
        x = CA.rand_elem(rng, degree_bound, weight_bound)
        y = CA.rand_elem(rng, degree_bound, weight_bound)
        z = CA.rand_elem(rng, degree_bound, weight_bound)
        rep.check_zero("skew[#%d]" % s, CA.lie_bracket(x, y) + CA.lie_bracket(y, x))
        jac = CA.lie_bracket(x, CA.lie_bracket(y, z)) \
            - CA.lie_bracket(CA.lie_bracket(x, y), z) \
            - CA.lie_bracket(y, CA.lie_bracket(x, z))
        rep.check_zero("jacobi[#%d]" % s, jac)
    return rep
