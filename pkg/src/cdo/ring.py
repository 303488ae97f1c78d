"""Exact arithmetic foundation.

Multivariate polynomial rings over the rationals with a per-variable
*Laurent mask*: a variable flagged invertible may carry negative exponents
(modelling localization at a coordinate), a plain variable may not.  All
values are immutable and canonical: no zero coefficients are stored, so
equal ring elements compare equal as Python objects.

Rationals are exact (gmpy2.mpq when available, fractions.Fraction
otherwise; the two are hash-compatible).
"""

from __future__ import annotations

import itertools

try:
    from gmpy2 import mpq as Q
except ImportError:  # pragma: no cover
    from fractions import Fraction as Q

QZERO = Q(0)
QONE = Q(1)


def binom(a: int, b: int):
    """Binomial coefficient a(a-1)...(a-b+1)/b! for any integer a; 0 if b < 0."""
    if b < 0:
        return QZERO
    num = 1
    den = 1
    for i in range(b):
        num *= a - i
        den *= i + 1
    return Q(num, den)


class RingError(Exception):
    """Usage error in the ring layer (mismatched rings, bad constructions)."""


class MaskViolation(RingError):
    """A negative exponent appeared on a non-invertible variable."""


class NotInvertible(RingError):
    """Inversion of a non-unit was requested."""


class RingSpec:
    """An ordered list of variable names plus a per-variable Laurent mask.

    ``laurent_mask[i]`` is True when the i-th variable is invertible.
    """

    __slots__ = ("variables", "laurent_mask", "_zero", "_one", "_gens")

    def __init__(self, variables, laurent_mask=None):
        variables = tuple(variables)
        if len(set(variables)) != len(variables):
            raise RingError("duplicate variable names: %r" % (variables,))
        if laurent_mask is None:
            laurent_mask = (False,) * len(variables)
        laurent_mask = tuple(bool(b) for b in laurent_mask)
        if len(laurent_mask) != len(variables):
            raise RingError("mask length != variable count")
        self.variables = variables
        self.laurent_mask = laurent_mask
        self._zero = None
        self._one = None
        self._gens = None

    @property
    def nvars(self) -> int:
        return len(self.variables)

    def __eq__(self, other):
        return (
            isinstance(other, RingSpec)
            and self.variables == other.variables
            and self.laurent_mask == other.laurent_mask
        )

    def __hash__(self):
        return hash((self.variables, self.laurent_mask))

    def __repr__(self):
        vs = ", ".join(
            v + ("^+-1" if inv else "")
            for v, inv in zip(self.variables, self.laurent_mask)
        )
        return "QQ[%s]" % vs

    def zero(self) -> "RingElem":
        if self._zero is None:
            self._zero = RingElem(self, {})
        return self._zero

    def one(self) -> "RingElem":
        if self._one is None:
            self._one = self.const(1)
        return self._one

    def const(self, q) -> "RingElem":
        q = Q(q)
        if q == 0:
            return self.zero()
        return RingElem(self, {(0,) * self.nvars: q})

    def gen(self, i: int) -> "RingElem":
        e = [0] * self.nvars
        e[i] = 1
        return RingElem(self, {tuple(e): QONE})

    def gens(self):
        if self._gens is None:
            self._gens = tuple(self.gen(i) for i in range(self.nvars))
        return self._gens

    def monomial(self, exps, coeff=1) -> "RingElem":
        coeff = Q(coeff)
        if coeff == 0:
            return self.zero()
        return RingElem(self, {tuple(exps): coeff})

    def var_index(self, name: str) -> int:
        try:
            return self.variables.index(name)
        except ValueError:
            raise RingError("unknown variable %r in %r" % (name, self)) from None

    def check_exponents(self, exps):
        for e, inv in zip(exps, self.laurent_mask):
            if e < 0 and not inv:
                raise MaskViolation(
                    "negative exponent %r not allowed in %r" % (exps, self)
                )

    def to_dict(self):
        return {
            "variables": list(self.variables),
            "invertible": [v for v, m in zip(self.variables, self.laurent_mask) if m],
        }

    @classmethod
    def from_dict(cls, d) -> "RingSpec":
        variables = list(d["variables"])
        inv = set(d.get("invertible", []))
        return cls(variables, [v in inv for v in variables])


def _grlex_key(exps):
    return (sum(exps), tuple(-e for e in exps))


class RingElem:
    """An exact element of a RingSpec: a map exponent-vector -> rational."""

    __slots__ = ("ring", "terms", "_hash")

    def __init__(self, ring: RingSpec, terms: dict, _checked=False):
        self.ring = ring
        if not _checked:
            clean = {}
            for exps, q in terms.items():
                q = Q(q)
                if q == 0:
                    continue
                exps = tuple(int(e) for e in exps)
                if len(exps) != ring.nvars:
                    raise RingError("exponent vector of wrong length")
                ring.check_exponents(exps)
                clean[exps] = q
            terms = clean
        self.terms = terms
        self._hash = None

    # -- structure ---------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        if not self.terms:
            return True
        if len(self.terms) > 1:
            return False
        (exps,) = self.terms
        return not any(exps)

    def const_value(self):
        """The rational value of a constant element."""
        if not self.terms:
            return QZERO
        (exps, q), = self.terms.items()
        if any(exps):
            raise RingError("not a constant: %s" % self)
        return q

    def is_unit(self) -> bool:
        """Units are single monomials supported on invertible variables."""
        if len(self.terms) != 1:
            return False
        (exps,) = self.terms
        return all(
            e == 0 or inv for e, inv in zip(exps, self.ring.laurent_mask)
        )

    def inv_unit(self) -> "RingElem":
        if not self.is_unit():
            raise NotInvertible("not a unit: %s" % self)
        (exps, q), = self.terms.items()
        return RingElem(
            self.ring, {tuple(-e for e in exps): 1 / Q(q)}, _checked=True
        )

    # -- arithmetic ---------------------------------------------------------

    def _need_same_ring(self, other):
        if self.ring != other.ring:
            raise RingError("mixed rings: %r vs %r" % (self.ring, other.ring))

    def __add__(self, other):
        if isinstance(other, (int, type(QONE))):
            other = self.ring.const(other)
        self._need_same_ring(other)
        if not other.terms:
            return self
        if not self.terms:
            return other
        terms = dict(self.terms)
        for exps, q in other.terms.items():
            s = terms.get(exps, QZERO) + q
            if s == 0:
                terms.pop(exps, None)
            else:
                terms[exps] = s
        return RingElem(self.ring, terms, _checked=True)

    __radd__ = __add__

    def __neg__(self):
        return RingElem(
            self.ring, {e: -q for e, q in self.terms.items()}, _checked=True
        )

    def __sub__(self, other):
        if isinstance(other, (int, type(QONE))):
            other = self.ring.const(other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, type(QONE))):
            return self.scale(other)
        self._need_same_ring(other)
        if not self.terms or not other.terms:
            return self.ring.zero()
        terms = {}
        for e1, q1 in self.terms.items():
            for e2, q2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                s = terms.get(e, QZERO) + q1 * q2
                if s == 0:
                    terms.pop(e, None)
                else:
                    terms[e] = s
        return RingElem(self.ring, terms, _checked=True)

    def __rmul__(self, other):
        if isinstance(other, (int, type(QONE))):
            return self.scale(other)
        return NotImplemented

    def scale(self, q) -> "RingElem":
        q = Q(q)
        if q == 0:
            return self.ring.zero()
        return RingElem(
            self.ring, {e: c * q for e, c in self.terms.items()}, _checked=True
        )

    def __pow__(self, n: int):
        n = int(n)
        if n < 0:
            return self.inv_unit() ** (-n)
        out = self.ring.one()
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def div_unit(self, unit: "RingElem") -> "RingElem":
        return self * unit.inv_unit()

    def diff(self, i: int) -> "RingElem":
        """Partial derivative with respect to the i-th variable."""
        terms = {}
        for exps, q in self.terms.items():
            e = exps[i]
            if e == 0:
                continue
            ne = list(exps)
            ne[i] = e - 1
            ne = tuple(ne)
            s = terms.get(ne, QZERO) + q * e
            if s == 0:
                terms.pop(ne, None)
            else:
                terms[ne] = s
        return RingElem(self.ring, terms, _checked=True)

    # -- identity -----------------------------------------------------------

    def __eq__(self, other):
        if not isinstance(other, RingElem):
            if isinstance(other, int):
                return self.is_constant() and self.const_value() == other
            return NotImplemented
        return self.ring == other.ring and self.terms == other.terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(
                (self.ring, frozenset(self.terms.items()))
            )
        return self._hash

    def __bool__(self):
        return bool(self.terms)

    def key(self):
        """Canonical immutable form, usable as a dict key."""
        return tuple(sorted(self.terms.items(), key=lambda t: _grlex_key(t[0])))

    # -- printing -----------------------------------------------------------

    def __str__(self):
        if not self.terms:
            return "0"
        bits = []
        for exps, q in sorted(self.terms.items(), key=lambda t: _grlex_key(t[0])):
            factors = []
            for name, e in zip(self.ring.variables, exps):
                if e == 1:
                    factors.append(name)
                elif e != 0:
                    factors.append("%s^%d" % (name, e))
            if not factors:
                bits.append(str(q))
            elif q == 1:
                bits.append("*".join(factors))
            elif q == -1:
                bits.append("-" + "*".join(factors))
            else:
                bits.append(str(q) + "*" + "*".join(factors))
        out = bits[0]
        for b in bits[1:]:
            out += ("+" + b) if not b.startswith("-") else b
        return out

    __repr__ = __str__


class RingHom:
    """Substitution homomorphism determined by per-variable images.

    The image of an invertible source variable must be a unit of the
    target, so substitution can never leave the Laurent mask.
    """

    __slots__ = ("source", "target", "images")

    def __init__(self, source: RingSpec, target: RingSpec, images):
        images = tuple(images)
        if len(images) != source.nvars:
            raise RingError("need one image per source variable")
        for img, inv in zip(images, source.laurent_mask):
            if img.ring != target:
                raise RingError("image not in target ring")
            if inv and not img.is_unit():
                raise MaskViolation(
                    "invertible variable must map to a unit, got %s" % img
                )
        self.source = source
        self.target = target
        self.images = images

    @classmethod
    def identity(cls, spec: RingSpec) -> "RingHom":
        return cls(spec, spec, spec.gens())

    @classmethod
    def by_name(cls, source: RingSpec, target: RingSpec, mapping: dict) -> "RingHom":
        """Build a hom from a {source var name: target expression string} dict."""
        images = [parse_elem(target, mapping[v]) for v in source.variables]
        return cls(source, target, images)

    def __call__(self, a: RingElem) -> RingElem:
        if a.ring != self.source:
            raise RingError("element not in source ring")
        out = self.target.zero()
        for exps, q in a.terms.items():
            term = self.target.const(q)
            for img, e in zip(self.images, exps):
                if e:
                    term = term * img ** e
            out = out + term
        return out

    def compose(self, inner: "RingHom") -> "RingHom":
        """self after inner (source of inner, target of self)."""
        if inner.target != self.source:
            raise RingError("homs not composable")
        return RingHom(inner.source, self.target, [self(img) for img in inner.images])

    def is_identity(self) -> bool:
        return self.source == self.target and self.images == self.source.gens()


class RingMatrix:
    """Rectangular matrix with RingElem entries over a single RingSpec."""

    __slots__ = ("ring", "rows", "cols", "entries")

    def __init__(self, ring: RingSpec, entries):
        entries = tuple(tuple(row) for row in entries)
        if entries:
            ncols = len(entries[0])
            for row in entries:
                if len(row) != ncols:
                    raise RingError("ragged matrix")
                for x in row:
                    if x.ring != ring:
                        raise RingError("matrix entry in wrong ring")
        else:
            ncols = 0
        self.ring = ring
        self.rows = len(entries)
        self.cols = ncols
        self.entries = entries

    @classmethod
    def identity(cls, ring: RingSpec, n: int) -> "RingMatrix":
        one, zero = ring.one(), ring.zero()
        return cls(ring, [[one if i == j else zero for j in range(n)] for i in range(n)])

    @classmethod
    def from_rows(cls, ring, rows):
        return cls(ring, rows)

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i][j]

    def __eq__(self, other):
        return (
            isinstance(other, RingMatrix)
            and self.ring == other.ring
            and self.entries == other.entries
        )

    def __hash__(self):
        return hash((self.ring, self.entries))

    def __mul__(self, other: "RingMatrix") -> "RingMatrix":
        if self.cols != other.rows:
            raise RingError("dimension mismatch %dx%d * %dx%d"
                            % (self.rows, self.cols, other.rows, other.cols))
        rows = []
        for i in range(self.rows):
            row = []
            for j in range(other.cols):
                s = self.ring.zero()
                for k in range(self.cols):
                    s = s + self.entries[i][k] * other.entries[k][j]
                row.append(s)
            rows.append(row)
        return RingMatrix(self.ring, rows)

    def __add__(self, other: "RingMatrix") -> "RingMatrix":
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise RingError("dimension mismatch in matrix sum")
        return RingMatrix(
            self.ring,
            [
                [a + b for a, b in zip(r1, r2)]
                for r1, r2 in zip(self.entries, other.entries)
            ],
        )

    def __sub__(self, other):
        return self + other.scale(-1)

    def scale(self, q) -> "RingMatrix":
        return RingMatrix(
            self.ring, [[x.scale(q) for x in row] for row in self.entries]
        )

    def transpose(self) -> "RingMatrix":
        return RingMatrix(
            self.ring,
            [[self.entries[i][j] for i in range(self.rows)] for j in range(self.cols)],
        )

    def map(self, f) -> "RingMatrix":
        """Apply a RingHom (or any elementwise function) to every entry."""
        target = f.target if isinstance(f, RingHom) else self.ring
        return RingMatrix(target, [[f(x) for x in row] for row in self.entries])

    def diff(self, i: int) -> "RingMatrix":
        return RingMatrix(
            self.ring, [[x.diff(i) for x in row] for row in self.entries]
        )

    def det(self) -> RingElem:
        if self.rows != self.cols:
            raise RingError("determinant of a non-square matrix")
        n = self.rows
        if n == 0:
            return self.ring.one()
        # cofactor expansion; matrices here are small (frame rank <= ~4)
        if n == 1:
            return self.entries[0][0]
        out = self.ring.zero()
        for j in range(n):
            a = self.entries[0][j]
            if a.is_zero():
                continue
            minor = RingMatrix(
                self.ring,
                [
                    [row[k] for k in range(n) if k != j]
                    for row in self.entries[1:]
                ],
            )
            term = a * minor.det()
            out = out + (term if j % 2 == 0 else -term)
        return out

    def inverse(self) -> "RingMatrix":
        """Exact inverse via adjugate / determinant; requires a unit determinant."""
        if self.rows != self.cols:
            raise RingError("inverse of a non-square matrix")
        d = self.det()
        if not d.is_unit():
            raise NotInvertible("determinant is not a unit: %s" % d)
        n = self.rows
        dinv = d.inv_unit()
        if n == 1:
            return RingMatrix(self.ring, [[dinv]])
        cof = [[None] * n for _ in range(n)]
        for i in range(n):
            for j in range(n):
                minor = RingMatrix(
                    self.ring,
                    [
                        [self.entries[r][c] for c in range(n) if c != j]
                        for r in range(n) if r != i
                    ],
                )
                m = minor.det()
                cof[j][i] = (m if (i + j) % 2 == 0 else -m) * dinv
        return RingMatrix(self.ring, cof)

    def trace(self) -> RingElem:
        if self.rows != self.cols:
            raise RingError("trace of a non-square matrix")
        s = self.ring.zero()
        for i in range(self.rows):
            s = s + self.entries[i][i]
        return s

    def is_identity(self) -> bool:
        return self == RingMatrix.identity(self.ring, self.rows)

    def __str__(self):
        return "[" + "; ".join(
            ", ".join(str(x) for x in row) for row in self.entries
        ) + "]"

    __repr__ = __str__


def matrix_trace_product(ms, *, ring: RingSpec | None = None, size: int | None = None) -> RingElem:
    """Trace of the ordered product of a chain of matrices.

    The empty chain is the identity: its trace is the context size, which
    must then be supplied together with the ring.
    """
    ms = list(ms)
    if not ms:
        if ring is None or size is None:
            raise RingError("empty chain needs an explicit ring and size")
        return ring.const(size)
    prod = ms[0]
    for m in ms[1:]:
        prod = prod * m
    return prod.trace()


# -- small expression parser -------------------------------------------------
#
# Accepts integers, rationals p/q, variable names, +, -, *, ^ and parentheses.
# Used by scenario configs and tests; exponents may be negative.

def parse_elem(spec: RingSpec, text) -> RingElem:
    if isinstance(text, RingElem):
        if text.ring != spec:
            raise RingError("parsed element belongs to another ring")
        return text
    if isinstance(text, int):
        return spec.const(text)
    tokens = _tokenize(str(text))
    elem, pos = _parse_sum(spec, tokens, 0)
    if pos != len(tokens):
        raise RingError("trailing input in %r" % text)
    return elem


def _tokenize(s):
    tokens = []
    i = 0
    while i < len(s):
        c = s[i]
        if c.isspace():
            i += 1
        elif c in "+-*^()":
            tokens.append(c)
            i += 1
        elif c.isdigit():
            j = i
            while j < len(s) and s[j].isdigit():
                j += 1
            if j < len(s) and s[j] == "/":
                k = j + 1
                while k < len(s) and s[k].isdigit():
                    k += 1
                tokens.append(Q(int(s[i:j]), int(s[j + 1:k])))
                i = k
            else:
                tokens.append(Q(int(s[i:j])))
                i = j
        elif c.isalpha() or c == "_":
            j = i
            while j < len(s) and (s[j].isalnum() or s[j] == "_"):
                j += 1
            tokens.append(s[i:j])
            i = j
        else:
            raise RingError("bad character %r" % c)
    return tokens


def _parse_sum(spec, toks, pos):
    sign = 1
    while pos < len(toks) and toks[pos] in ("+", "-"):
        if toks[pos] == "-":
            sign = -sign
        pos += 1
    out, pos = _parse_product(spec, toks, pos)
    out = out.scale(sign)
    while pos < len(toks) and toks[pos] in ("+", "-"):
        sign = 1
        while pos < len(toks) and toks[pos] in ("+", "-"):
            if toks[pos] == "-":
                sign = -sign
            pos += 1
        nxt, pos = _parse_product(spec, toks, pos)
        out = out + nxt.scale(sign)
    return out, pos


def _parse_product(spec, toks, pos):
    out, pos = _parse_power(spec, toks, pos)
    while pos < len(toks) and (
        toks[pos] == "*" or isinstance(toks[pos], str) and toks[pos] not in "+-*^()"
        or toks[pos] == "("
    ):
        if toks[pos] == "*":
            pos += 1
        nxt, pos = _parse_power(spec, toks, pos)
        out = out * nxt
    return out, pos


def _parse_power(spec, toks, pos):
    base, pos = _parse_atom(spec, toks, pos)
    if pos < len(toks) and toks[pos] == "^":
        pos += 1
        sign = 1
        if pos < len(toks) and toks[pos] == "-":
            sign = -1
            pos += 1
        e = toks[pos]
        if not isinstance(e, type(QONE)) or e.denominator != 1:
            raise RingError("exponent must be an integer")
        pos += 1
        base = base ** (sign * int(e.numerator))
    return base, pos


def _parse_atom(spec, toks, pos):
    if pos >= len(toks):
        raise RingError("unexpected end of expression")
    t = toks[pos]
    if t == "(":
        inner, pos = _parse_sum(spec, toks, pos + 1)
        if pos >= len(toks) or toks[pos] != ")":
            raise RingError("missing )")
        return inner, pos + 1
    if isinstance(t, str):
        return spec.gen(spec.var_index(t)), pos + 1
    return spec.const(t), pos + 1
