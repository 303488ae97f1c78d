"""Free-module calculus of vector fields and differential forms.

Everything lives in a fixed coordinate frame: a vector field is a coefficient
vector over d/dx_i, a 1-form over dx_i, and a p-form is a fully antisymmetric
rank-p coefficient tensor stored on strictly increasing multi-indices.

Convention for the p-form <-> polylinear-map identification (used throughout
the algebroid and characteristic-class layers): a degree-p form h, viewed as a
map on p-1 vector fields with values in 1-forms, contracts its *first* p-1
tensor slots against the fields; the last slot is the form index,

    h(v_1, ..., v_{p-1})_j = sum H[i_1, ..., i_{p-1}, j] v_1[i_1] ... v_{p-1}[i_{p-1}]

and contraction by a field fills the leading slot.

The differential follows the convention d(a) = -da in degree 0 (a sign baked
into the degree-0 part of the de Rham-Chevalley complex used here); in degrees
>= 1 it agrees with the classical exterior differential of the coefficient
tensor.  ``d_classical`` is the uniform classical differential, used by the
trace-form machinery.
"""

from __future__ import annotations

import itertools

from .ring import Q, QONE, QZERO, RingElem, RingError, RingHom, RingMatrix, RingSpec

DEGREE_CAP = 4  # the complex is implemented through Omega^4 (outputs of d on Omega^3)


def _sort_index(idx):
    """Sort an index tuple, returning (sorted tuple, sign); sign 0 on repeats."""
    idx = tuple(idx)
    if len(set(idx)) != len(idx):
        return idx, 0
    perm = sorted(range(len(idx)), key=lambda k: idx[k])
    sign = 1
    seen = [False] * len(idx)
    for start in range(len(idx)):
        if seen[start]:
            continue
        # cycle length parity
        length = 0
        k = start
        while not seen[k]:
            seen[k] = True
            k = perm[k]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return tuple(sorted(idx)), sign


class VectorField:
    """sum coeffs[i] * d/dx_i over a RingSpec."""

    __slots__ = ("ring", "coeffs")

    def __init__(self, ring: RingSpec, coeffs):
        coeffs = tuple(coeffs)
        if len(coeffs) != ring.nvars:
            raise RingError("vector field needs one coefficient per variable")
        for c in coeffs:
            if c.ring != ring:
                raise RingError("coefficient in wrong ring")
        self.ring = ring
        self.coeffs = coeffs

    @classmethod
    def zero(cls, ring):
        z = ring.zero()
        return cls(ring, (z,) * ring.nvars)

    @classmethod
    def coordinate(cls, ring, i):
        return cls(ring, tuple(
            ring.one() if j == i else ring.zero() for j in range(ring.nvars)
        ))

    def is_zero(self):
        return all(c.is_zero() for c in self.coeffs)

    def __add__(self, other):
        return VectorField(self.ring, tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))

    def __sub__(self, other):
        return VectorField(self.ring, tuple(a - b for a, b in zip(self.coeffs, other.coeffs)))

    def __neg__(self):
        return VectorField(self.ring, tuple(-a for a in self.coeffs))

    def scale(self, q):
        return VectorField(self.ring, tuple(c.scale(q) for c in self.coeffs))

    def mul(self, a: RingElem):
        return VectorField(self.ring, tuple(a * c for c in self.coeffs))

    def map(self, f: RingHom):
        return VectorField(f.target, tuple(f(c) for c in self.coeffs))

    def __eq__(self, other):
        return isinstance(other, VectorField) and self.coeffs == other.coeffs \
            and self.ring == other.ring

    def __hash__(self):
        return hash(("vf", self.ring, self.coeffs))

    def __str__(self):
        bits = [
            "(%s)d_%s" % (c, v)
            for c, v in zip(self.coeffs, self.ring.variables)
            if not c.is_zero()
        ]
        return " + ".join(bits) if bits else "0"

    __repr__ = __str__


class OneForm:
    """sum coeffs[i] * dx_i over a RingSpec."""

    __slots__ = ("ring", "coeffs")

    def __init__(self, ring: RingSpec, coeffs):
        coeffs = tuple(coeffs)
        if len(coeffs) != ring.nvars:
            raise RingError("one-form needs one coefficient per variable")
        for c in coeffs:
            if c.ring != ring:
                raise RingError("coefficient in wrong ring")
        self.ring = ring
        self.coeffs = coeffs

    @classmethod
    def zero(cls, ring):
        z = ring.zero()
        return cls(ring, (z,) * ring.nvars)

    @classmethod
    def dx(cls, ring, i):
        return cls(ring, tuple(
            ring.one() if j == i else ring.zero() for j in range(ring.nvars)
        ))

    def is_zero(self):
        return all(c.is_zero() for c in self.coeffs)

    def __add__(self, other):
        return OneForm(self.ring, tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))

    def __sub__(self, other):
        return OneForm(self.ring, tuple(a - b for a, b in zip(self.coeffs, other.coeffs)))

    def __neg__(self):
        return OneForm(self.ring, tuple(-a for a in self.coeffs))

    def scale(self, q):
        return OneForm(self.ring, tuple(c.scale(q) for c in self.coeffs))

    def mul(self, a: RingElem):
        return OneForm(self.ring, tuple(a * c for c in self.coeffs))

    def map(self, f: RingHom):
        return OneForm(f.target, tuple(f(c) for c in self.coeffs))

    def __eq__(self, other):
        return isinstance(other, OneForm) and self.coeffs == other.coeffs \
            and self.ring == other.ring

    def __hash__(self):
        return hash(("of", self.ring, self.coeffs))

    def __str__(self):
        bits = [
            "(%s)d%s" % (c, v)
            for c, v in zip(self.coeffs, self.ring.variables)
            if not c.is_zero()
        ]
        return " + ".join(bits) if bits else "0"

    __repr__ = __str__


def d_elem(a: RingElem) -> OneForm:
    """The classical differential da as a 1-form (no sign)."""
    return OneForm(a.ring, tuple(a.diff(i) for i in range(a.ring.nvars)))


def vf_apply(tau: VectorField, a: RingElem) -> RingElem:
    out = a.ring.zero()
    for i, c in enumerate(tau.coeffs):
        if not c.is_zero():
            out = out + c * a.diff(i)
    return out


def vf_bracket(tau: VectorField, nu: VectorField) -> VectorField:
    ring = tau.ring
    coeffs = []
    for i in range(ring.nvars):
        coeffs.append(vf_apply(tau, nu.coeffs[i]) - vf_apply(nu, tau.coeffs[i]))
    return VectorField(ring, coeffs)


def pairing(tau: VectorField, omega: OneForm) -> RingElem:
    out = tau.ring.zero()
    for a, b in zip(tau.coeffs, omega.coeffs):
        out = out + a * b
    return out


def lie_derivative(tau: VectorField, omega: OneForm) -> OneForm:
    """Action of a field on a 1-form: tau(a db) = tau(a) db + a d(tau(b))."""
    ring = tau.ring
    coeffs = []
    for j in range(ring.nvars):
        c = vf_apply(tau, omega.coeffs[j])
        for k in range(ring.nvars):
            c = c + omega.coeffs[k] * tau.coeffs[k].diff(j)
        coeffs.append(c)
    return OneForm(ring, coeffs)


class PForm:
    """Fully antisymmetric degree-p coefficient tensor, p = 0 .. DEGREE_CAP.

    Stored on strictly increasing index tuples; degree 0 is a scalar
    (empty index), degree 1 matches OneForm componentwise.
    """

    __slots__ = ("ring", "degree", "comps")

    def __init__(self, ring: RingSpec, degree: int, comps: dict | None = None):
        if degree < 0 or degree > DEGREE_CAP:
            raise RingError("form degree %d outside the implemented range" % degree)
        self.ring = ring
        self.degree = degree
        clean = {}
        for idx, val in (comps or {}).items():
            idx, sign = _sort_index(idx)
            if sign == 0 or val.is_zero():
                continue
            if len(idx) != degree or any(i < 0 or i >= ring.nvars for i in idx):
                raise RingError("bad index %r for degree %d" % (idx, degree))
            v = val if sign == 1 else -val
            prev = clean.get(idx)
            v = v if prev is None else prev + v
            if v.is_zero():
                clean.pop(idx, None)
            else:
                clean[idx] = v
        self.comps = clean

    # -- constructors / coercions -------------------------------------------

    @classmethod
    def zero(cls, ring, degree):
        return cls(ring, degree, {})

    @classmethod
    def from_scalar(cls, a: RingElem):
        return cls(a.ring, 0, {(): a})

    @classmethod
    def from_one_form(cls, w: OneForm):
        return cls(w.ring, 1, {(i,): c for i, c in enumerate(w.coeffs)})

    def to_scalar(self) -> RingElem:
        if self.degree != 0:
            raise RingError("not a scalar")
        return self.comps.get((), self.ring.zero())

    def to_one_form(self) -> OneForm:
        if self.degree != 1:
            raise RingError("not a one-form")
        z = self.ring.zero()
        return OneForm(self.ring, tuple(
            self.comps.get((i,), z) for i in range(self.ring.nvars)
        ))

    # -- access ---------------------------------------------------------------

    def entry(self, idx) -> RingElem:
        idx, sign = _sort_index(idx)
        if sign == 0:
            return self.ring.zero()
        v = self.comps.get(idx)
        if v is None:
            return self.ring.zero()
        return v if sign == 1 else -v

    def is_zero(self):
        return not self.comps

    # -- linear structure -------------------------------------------------------

    def _like(self, comps):
        out = PForm(self.ring, self.degree, {})
        out.comps = {k: v for k, v in comps.items() if not v.is_zero()}
        return out

    def __add__(self, other):
        if self.degree != other.degree or self.ring != other.ring:
            raise RingError("form mismatch in sum")
        comps = dict(self.comps)
        for k, v in other.comps.items():
            s = comps.get(k)
            s = v if s is None else s + v
            if s.is_zero():
                comps.pop(k, None)
            else:
                comps[k] = s
        return self._like(comps)

    def __sub__(self, other):
        return self + other.scale(-1)

    def __neg__(self):
        return self.scale(-1)

    def scale(self, q):
        return self._like({k: v.scale(q) for k, v in self.comps.items()})

    def mul(self, a: RingElem):
        return self._like({k: a * v for k, v in self.comps.items()})

    def map(self, f: RingHom):
        out = PForm(f.target, self.degree, {})
        out.comps = {
            k: w for k, w in ((k, f(v)) for k, v in self.comps.items())
            if not w.is_zero()
        }
        return out

    def __eq__(self, other):
        return (
            isinstance(other, PForm)
            and self.degree == other.degree
            and self.ring == other.ring
            and self.comps == other.comps
        )

    def __hash__(self):
        return hash(("pf", self.ring, self.degree, frozenset(self.comps.items())))

    # -- the polylinear-map interpretation ---------------------------------------

    def evaluate(self, fields) -> OneForm:
        """Evaluate on degree-1 fields, contracting the leading slots."""
        fields = list(fields)
        if len(fields) != self.degree - 1:
            raise RingError("degree-%d form takes %d fields" % (self.degree, self.degree - 1))
        out = self
        for v in fields:
            out = contraction(v, out)
        return out.to_one_form()

    def __str__(self):
        if not self.comps:
            return "0"
        names = self.ring.variables
        bits = []
        for idx in sorted(self.comps):
            label = "^".join("d%s" % names[i] for i in idx) if idx else "1"
            bits.append("(%s)%s" % (self.comps[idx], label))
        return " + ".join(bits)

    __repr__ = __str__


def contraction(tau: VectorField, h: PForm) -> PForm:
    """Fill the leading slot of a form of degree >= 1 with a field."""
    if h.degree < 1:
        raise RingError("cannot contract a degree-0 form")
    out = {}
    for idx, val in h.comps.items():
        for pos, i in enumerate(idx):
            c = tau.coeffs[i]
            if c.is_zero():
                continue
            rest = idx[:pos] + idx[pos + 1:]
            term = c * val
            if pos % 2 == 1:
                term = -term
            s = out.get(rest)
            s = term if s is None else s + term
            out[rest] = s
    res = PForm(h.ring, h.degree - 1, {})
    res.comps = {k: v for k, v in out.items() if not v.is_zero()}
    return res


def wedge(a: PForm, b: PForm) -> PForm:
    """Exterior product in the shuffle convention (no factorial denominators)."""
    if a.ring != b.ring:
        raise RingError("wedge over different rings")
    deg = a.degree + b.degree
    if deg > DEGREE_CAP:
        raise RingError("wedge degree %d above the implemented bound" % deg)
    out = {}
    for ia, va in a.comps.items():
        sa = set(ia)
        for ib, vb in b.comps.items():
            if sa & set(ib):
                continue
            idx, sign = _sort_index(ia + ib)
            term = va * vb
            if sign == -1:
                term = -term
            s = out.get(idx)
            s = term if s is None else s + term
            out[idx] = s
    res = PForm(a.ring, deg, {})
    res.comps = {k: v for k, v in out.items() if not v.is_zero()}
    return res


def _coerce_form(h) -> PForm:
    if isinstance(h, PForm):
        return h
    if isinstance(h, OneForm):
        return PForm.from_one_form(h)
    if isinstance(h, RingElem):
        return PForm.from_scalar(h)
    raise RingError("not a form: %r" % (h,))


def d_classical(h) -> PForm:
    """Classical exterior differential of the coefficient tensor."""
    h = _coerce_form(h)
    if h.degree >= DEGREE_CAP:
        raise RingError("d on degree %d is above the implemented bound" % h.degree)
    # (dH)[K] = sum_t (-1)^t d_{K_t} H[K minus K_t]; contribution of d_j H[idx]
    # lands at K = idx + {j} with sign (-1)^(position of j in sorted K)
    out = {}
    for idx, val in h.comps.items():
        for j in range(h.ring.nvars):
            if j in idx:
                continue
            term = val.diff(j)
            if term.is_zero():
                continue
            pos = sum(1 for i in idx if i < j)
            nidx = tuple(sorted(idx + (j,)))
            if pos % 2 == 1:
                term = -term
            s = out.get(nidx)
            s = term if s is None else s + term
            out[nidx] = s
    res = PForm(h.ring, h.degree + 1, {})
    res.comps = {k: v for k, v in out.items() if not v.is_zero()}
    return res


def d_dr(h) -> PForm:
    """Differential of the de Rham-Chevalley complex.

    Degree 0 carries the sign convention d(a) = -da; on degrees >= 1 the
    coordinate tensor of the complex differential coincides with the
    classical one (coordinate fields commute, and the pairing correction
    reproduces exactly the missing exterior-derivative term).
    """
    h = _coerce_form(h)
    if h.degree == 0:
        return d_classical(h).scale(-1)
    return d_classical(h)


def d_lie(h: PForm, fields) -> OneForm:
    """The Lie part of the complex differential, evaluated on fields.

    d_lie h(t_1,...,t_p) = sum_q (-1)^{q+1} t_q(h(...no q...))
                         + sum_{q<r} (-1)^{q+r} h([t_q,t_r], ...no q,r...).
    """
    fields = list(fields)
    p = len(fields)
    ring = h.ring
    out = OneForm.zero(ring)
    for q in range(p):
        rest = fields[:q] + fields[q + 1:]
        val = h.evaluate(rest)
        term = lie_derivative(fields[q], val)
        out = out + (term if q % 2 == 0 else -term)
    for q in range(p):
        for r in range(q + 1, p):
            br = vf_bracket(fields[q], fields[r])
            if br.is_zero():
                continue
            rest = [br] + [fields[k] for k in range(p) if k != q and k != r]
            term = h.evaluate(rest)
            # 1-based sign (-1)^{p+q} of (1.3.2) reads (-1)^{q+r} in 0-based indices
            out = out + (-term if (q + r) % 2 == 1 else term)
    return out


def lie_pform(tau: VectorField, h: PForm) -> PForm:
    """Action of a field on a p-form:
    tau(h)(t_1,..) = tau(h(t_1,..)) - sum h(..,[tau,t_q],..)."""
    ring = h.ring
    n = ring.nvars
    if h.degree == 0:
        return PForm.from_scalar(vf_apply(tau, h.to_scalar()))
    out = {}
    coords = [VectorField.coordinate(ring, i) for i in range(n)]
    for idx in itertools.combinations(range(n), h.degree - 1):
        slot_fields = [coords[i] for i in idx]
        val = lie_derivative(tau, h.evaluate(slot_fields))
        for q in range(len(idx)):
            fields2 = list(slot_fields)
            fields2[q] = vf_bracket(tau, coords[idx[q]])
            val = val - h.evaluate(fields2)
        for j in range(n):
            c = val.coeffs[j]
            if c.is_zero():
                continue
            full, sign = _sort_index(idx + (j,))
            if sign == 0:
                continue
            term = c if sign == 1 else -c
            s = out.get(full)
            s = term if s is None else s + term
            out[full] = s
    # each increasing tuple is hit once per choice of which slot is the form
    # index, so entries come out multiplied by the degree
    res = PForm(ring, h.degree, {})
    inv = Q(1, h.degree)
    res.comps = {
        k: w for k, w in ((k, v.scale(inv)) for k, v in out.items())
        if not w.is_zero()
    }
    return res


def transport_form(f: RingHom, h) -> PForm:
    """Image of a form under a substitution hom: coefficients map through f
    and each dx_i becomes d(f(x_i)), i.e. the coefficient tensor is pushed
    through exterior powers of the Jacobian of the variable images."""
    h = _coerce_form(h)
    if h.ring != f.source:
        raise RingError("form not over the hom's source")
    tgt = f.target
    if h.degree == 0:
        return PForm.from_scalar(f(h.to_scalar()))
    n_src, n_tgt = f.source.nvars, tgt.nvars
    jac = [[f.images[i].diff(j) for j in range(n_tgt)] for i in range(n_src)]
    out = {}
    for idx, val in h.comps.items():
        fval = f(val)
        if fval.is_zero():
            continue
        for kdx in itertools.combinations(range(n_tgt), h.degree):
            # minor determinant of the Jacobian on rows idx, columns kdx
            rows = [[jac[i][k] for k in kdx] for i in idx]
            det = RingMatrix(tgt, rows).det()
            if det.is_zero():
                continue
            term = fval * det
            s = out.get(kdx)
            s = term if s is None else s + term
            out[kdx] = s
    res = PForm(tgt, h.degree, {})
    res.comps = {k: v for k, v in out.items() if not v.is_zero()}
    return res


class ExtLieAlgebroid:
    """The tangent extended Lie algebroid of a coordinate ring: free modules
    of fields and forms with the standard pairing and differential."""

    __slots__ = ("ring",)

    def __init__(self, ring: RingSpec):
        self.ring = ring

    def coordinate_fields(self):
        return [VectorField.coordinate(self.ring, i) for i in range(self.ring.nvars)]

    def coordinate_forms(self):
        return [OneForm.dx(self.ring, i) for i in range(self.ring.nvars)]

    def __eq__(self, other):
        return isinstance(other, ExtLieAlgebroid) and self.ring == other.ring

    def __repr__(self):
        return "ExtLieAlgebroid(%r)" % (self.ring,)
