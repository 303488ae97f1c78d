"""Vertex algebroids presented by abelian frames.

An algebroid here is a septuple (A, T, Omega, d, gamma, <,>, c) in which T and
Omega are the free modules of vector fields and 1-forms of a coordinate ring,
presented by an abelian frame on which gamma vanishes and the pairing and
c-tables are explicit.  The three anomaly operations are never stored beyond
the frame tables: they are recomputed on arbitrary arguments through the
unique frame extension formulas, which is exactly the class of objects the
frame/torseur constructions produce (canonical algebroids, shifts by closed
3-forms, pushforwards along frame changes, and localizations).

Identity checking is exact; randomized suites are seeded and report symbolic
witnesses on failure.
"""

from __future__ import annotations

import itertools
import random

from .geometry import (
    OneForm,
    PForm,
    VectorField,
    contraction,
    d_dr,
    d_elem,
    lie_derivative,
    pairing,
    vf_apply,
    vf_bracket,
)
from .report import CheckReport
from .ring import Q, RingElem, RingError, RingHom, RingMatrix, RingSpec
from . import sampling


class Frame:
    """An A-basis of the module of vector fields, given by an invertible
    coordinate matrix (row i = coefficients of the i-th frame field)."""

    __slots__ = ("ring", "fields", "coordinate_matrix", "abelian", "_inv", "_dual")

    def __init__(self, ring: RingSpec, fields):
        fields = tuple(fields)
        if not fields or len(fields) != ring.nvars:
            raise RingError("frame must have rank equal to the variable count")
        for t in fields:
            if t.ring != ring:
                raise RingError("frame field over the wrong ring")
        self.ring = ring
        self.fields = fields
        self.coordinate_matrix = RingMatrix(ring, [t.coeffs for t in fields])
        det = self.coordinate_matrix.det()
        if not det.is_unit():
            raise RingError("frame coordinate matrix has non-unit determinant %s" % det)
        self.abelian = all(
            vf_bracket(a, b).is_zero()
            for a, b in itertools.combinations(fields, 2)
        )
        self._inv = None
        self._dual = None

    @classmethod
    def coordinate(cls, ring: RingSpec) -> "Frame":
        return cls(ring, [VectorField.coordinate(ring, i) for i in range(ring.nvars)])

    @classmethod
    def from_matrix(cls, ring: RingSpec, m: RingMatrix) -> "Frame":
        return cls(ring, [VectorField(ring, row) for row in m.entries])

    @property
    def rank(self) -> int:
        return len(self.fields)

    def inverse_matrix(self) -> RingMatrix:
        if self._inv is None:
            self._inv = self.coordinate_matrix.inverse()
        return self._inv

    def dual_forms(self):
        """The dual basis of 1-forms: <tau_i, omega_j> = delta_ij."""
        if self._dual is None:
            winv = self.inverse_matrix()
            # omega_j has dx-coefficients given by column j of the inverse
            self._dual = tuple(
                OneForm(self.ring, [winv[(b, j)] for b in range(self.ring.nvars)])
                for j in range(self.rank)
            )
        return self._dual

    def decompose(self, v: VectorField):
        """Coefficients f_i with v = sum f_i tau_i (row vector times inverse)."""
        winv = self.inverse_matrix()
        out = []
        for i in range(self.rank):
            c = self.ring.zero()
            for b in range(self.ring.nvars):
                c = c + v.coeffs[b] * winv[(b, i)]
            out.append(c)
        return out

    def decompose_form(self, w: OneForm):
        """Coefficients g_j with w = sum g_j omega_j; g_j = <tau_j, w>."""
        return [pairing(t, w) for t in self.fields]

    def __eq__(self, other):
        return isinstance(other, Frame) and self.ring == other.ring \
            and self.fields == other.fields

    def __hash__(self):
        return hash(("frame", self.ring, self.fields))

    def __repr__(self):
        return "Frame[%s]" % ", ".join(str(t) for t in self.fields)


class CVector:
    """A weight-1 element: vector-field part plus 1-form part."""

    __slots__ = ("t_part", "o_part")

    def __init__(self, t_part: VectorField | None = None, o_part: OneForm | None = None,
                 ring: RingSpec | None = None):
        if t_part is None:
            t_part = VectorField.zero(ring or o_part.ring)
        if o_part is None:
            o_part = OneForm.zero(ring or t_part.ring)
        self.t_part = t_part
        self.o_part = o_part

    @property
    def ring(self):
        return self.t_part.ring

    def __add__(self, other):
        return CVector(self.t_part + other.t_part, self.o_part + other.o_part)

    def __repr__(self):
        return "CVector(%s ; %s)" % (self.t_part, self.o_part)


class AlgebroidData:
    """A vertex algebroid determined by an abelian frame, a symmetric pairing
    table and a skew c-table (gamma vanishes on A x frame by construction)."""

    __slots__ = ("frame", "pairing_table", "c_table")

    def __init__(self, frame: Frame, pairing_table, c_table):
        if not frame.abelian:
            raise RingError("algebroid frames must be abelian")
        n = frame.rank
        pairing_table = tuple(tuple(row) for row in pairing_table)
        c_table = tuple(tuple(row) for row in c_table)
        if len(pairing_table) != n or any(len(r) != n for r in pairing_table):
            raise RingError("pairing table must be %dx%d" % (n, n))
        if len(c_table) != n or any(len(r) != n for r in c_table):
            raise RingError("c table must be %dx%d" % (n, n))
        for i in range(n):
            for j in range(n):
                if pairing_table[i][j] != pairing_table[j][i]:
                    raise RingError("pairing table is not symmetric at (%d,%d)" % (i, j))
                if not (c_table[i][j] + c_table[j][i]).is_zero():
                    raise RingError("c table is not skew at (%d,%d)" % (i, j))
        self.frame = frame
        self.pairing_table = pairing_table
        self.c_table = c_table

    @property
    def ring(self) -> RingSpec:
        return self.frame.ring

    @property
    def rank(self) -> int:
        return self.frame.rank

    def is_canonical(self) -> bool:
        return all(
            p.is_zero() and c.is_zero()
            for prow, crow in zip(self.pairing_table, self.c_table)
            for p, c in zip(prow, crow)
        )

    def __eq__(self, other):
        return (
            isinstance(other, AlgebroidData)
            and self.frame == other.frame
            and self.pairing_table == other.pairing_table
            and self.c_table == other.c_table
        )

    # -- the anomaly operations, extended from the frame ----------------------

    def gamma(self, a: RingElem, v: VectorField) -> OneForm:
        """gamma(a, sum f_i tau_i) = sum ( -tau_i(a) df_i - tau_i(f_i) da )."""
        da = d_elem(a)
        out = OneForm.zero(self.ring)
        for f, tau in zip(self.frame.decompose(v), self.frame.fields):
            if f.is_zero():
                continue
            out = out - d_elem(f).mul(vf_apply(tau, a)) - da.mul(vf_apply(tau, f))
        return out

    def pair_tt(self, u: VectorField, v: VectorField) -> RingElem:
        fu = self.frame.decompose(u)
        fv = self.frame.decompose(v)
        out = self.ring.zero()
        for i, ti in enumerate(self.frame.fields):
            f = fu[i]
            if f.is_zero():
                continue
            for j, tj in enumerate(self.frame.fields):
                g = fv[j]
                if g.is_zero():
                    continue
                out = out + f * g * self.pairing_table[i][j] \
                    - f * vf_apply(tj, vf_apply(ti, g)) \
                    - g * vf_apply(ti, vf_apply(tj, f)) \
                    - vf_apply(ti, g) * vf_apply(tj, f)
        return out

    def pair(self, x: CVector, y: CVector) -> RingElem:
        """Full symmetric weight-1 pairing; zero on Omega x Omega."""
        return (
            self.pair_tt(x.t_part, y.t_part)
            + pairing(x.t_part, y.o_part)
            + pairing(y.t_part, x.o_part)
        )

    def c(self, u: VectorField, v: VectorField) -> OneForm:
        fu = self.frame.decompose(u)
        fv = self.frame.decompose(v)
        out = OneForm.zero(self.ring)
        half = Q(1, 2)
        for i, ti in enumerate(self.frame.fields):
            f = fu[i]
            if f.is_zero():
                continue
            for j, tj in enumerate(self.frame.fields):
                g = fv[j]
                if g.is_zero():
                    continue
                out = out + self.c_table[i][j].mul(f * g)
                p = self.pairing_table[i][j]
                if not p.is_zero():
                    out = out + (d_elem(g).mul(f) - d_elem(f).mul(g)).mul(p).scale(half)
                tig = vf_apply(ti, g)
                tjf = vf_apply(tj, f)
                out = out + (d_elem(tjf).mul(tig) - d_elem(tig).mul(tjf)).scale(half)
                out = out + d_elem(g * vf_apply(ti, tjf) - f * vf_apply(tj, tig)).scale(half)
        return out

    def three_form_gap(self, other: "AlgebroidData") -> PForm:
        """The 3-form c_self - c_other of two algebroids over one frame."""
        if self.frame != other.frame:
            raise RingError("algebroids not over the same frame")
        return _pform_from_frame_table(
            self.frame,
            [
                [self.c_table[i][j] - other.c_table[i][j] for j in range(self.rank)]
                for i in range(self.rank)
            ],
        )

    def map_tables(self, f, new_frame: Frame) -> "AlgebroidData":
        return AlgebroidData(
            new_frame,
            [[f(p) for p in row] for row in self.pairing_table],
            [[w.map(f) for w in row] for row in self.c_table],
        )

    def __repr__(self):
        return "AlgebroidData(frame=%r, pairing=%s, c=%s)" % (
            self.frame,
            [[str(p) for p in row] for row in self.pairing_table],
            [[str(w) for w in row] for row in self.c_table],
        )


def canonical_algebroid(frame: Frame) -> AlgebroidData:
    """The algebroid with vanishing tables on an abelian frame."""
    if not frame.abelian:
        raise RingError("canonical algebroid requires an abelian frame")
    n = frame.rank
    z = frame.ring.zero()
    zf = OneForm.zero(frame.ring)
    return AlgebroidData(
        frame, [[z] * n for _ in range(n)], [[zf] * n for _ in range(n)]
    )


def _pform_from_frame_table(frame: Frame, table) -> PForm:
    """Assemble the 3-form h with h(tau_i, tau_j) = table[i][j] (a OneForm
    valued skew table over the frame), as a coordinate tensor."""
    ring = frame.ring
    n = frame.rank
    winv = frame.inverse_matrix()
    tensor = {}
    for a, b, cc in itertools.product(range(n), repeat=3):
        val = ring.zero()
        for i in range(n):
            wa = winv[(a, i)]
            if wa.is_zero():
                continue
            for j in range(n):
                wb = winv[(b, j)]
                if wb.is_zero():
                    continue
                w = table[i][j]
                val = val + wa * wb * w.coeffs[cc]
        if not val.is_zero():
            tensor[(a, b, cc)] = val
    return pform_from_tensor(ring, 3, tensor)


def pform_from_tensor(ring: RingSpec, degree: int, tensor: dict) -> PForm:
    """Build a PForm from a full tensor dict, verifying antisymmetry."""
    comps = {}
    for idx, val in tensor.items():
        key = tuple(sorted(idx))
        if len(set(idx)) != len(idx):
            if not val.is_zero():
                raise RingError("tensor not alternating: repeated index %r carries %s"
                                % (idx, val))
            continue
        if key == tuple(idx):
            comps[key] = val
    out = PForm(ring, degree, comps)
    for idx, val in tensor.items():
        if out.entry(idx) != val:
            raise RingError("tensor not antisymmetric at %r" % (idx,))
    return out


def add_three_form(A: AlgebroidData, omega: PForm) -> AlgebroidData:
    """Torseur action: shift the c-table by a closed 3-form."""
    if omega.degree != 3 or omega.ring != A.ring:
        raise RingError("torseur shifts need a degree-3 form over the base ring")
    if not d_dr(omega).is_zero():
        raise RingError("torseur shifts require a closed 3-form; d = %s" % d_dr(omega))
    n = A.rank
    new_c = [
        [
            A.c_table[i][j] + omega.evaluate([A.frame.fields[i], A.frame.fields[j]])
            for j in range(n)
        ]
        for i in range(n)
    ]
    return AlgebroidData(A.frame, A.pairing_table, new_c)


def restrict(A: AlgebroidData, f: RingHom) -> AlgebroidData:
    """Localization along a mask-loosening hom (same variables, same frame)."""
    src, tgt = f.source, f.target
    if src.variables != tgt.variables or f.images != tgt.gens():
        raise RingError("restrict expects an identity-on-variables localization")
    for s_inv, t_inv in zip(src.laurent_mask, tgt.laurent_mask):
        if s_inv and not t_inv:
            raise RingError("restriction must loosen the Laurent mask, not tighten it")
    new_frame = Frame.from_matrix(tgt, A.frame.coordinate_matrix.map(f))
    return A.map_tables(f, new_frame)


# -- axiom suites -------------------------------------------------------------


def d_lie_c(A: AlgebroidData, t1, t2, t3) -> OneForm:
    """Chevalley differential of the c-operation on a field triple."""
    out = lie_derivative(t1, A.c(t2, t3)) \
        - lie_derivative(t2, A.c(t1, t3)) \
        + lie_derivative(t3, A.c(t1, t2))
    out = out - A.c(vf_bracket(t1, t2), t3) \
        + A.c(vf_bracket(t1, t3), t2) \
        - A.c(vf_bracket(t2, t3), t1)
    return out


def _axiom_a1(A, a, b, v):
    lhs = A.gamma(a, v.mul(b))
    rhs = A.gamma(a * b, v) - A.gamma(b, v).mul(a) \
        - d_elem(b).mul(vf_apply(v, a)) - d_elem(a).mul(vf_apply(v, b))
    return lhs - rhs


def _axiom_a2(A, a, t1, t2):
    lhs = A.pair_tt(t1.mul(a), t2)
    rhs = a * A.pair_tt(t1, t2) + pairing(t2, A.gamma(a, t1)) \
        - vf_apply(t1, vf_apply(t2, a))
    return lhs - rhs


def _axiom_a3(A, a, t1, t2):
    half = Q(1, 2)
    lhs = A.c(t1.mul(a), t2)
    g1 = A.gamma(a, t1)
    rhs = A.c(t1, t2).mul(a) \
        + A.gamma(a, vf_bracket(t1, t2)) \
        - A.gamma(vf_apply(t2, a), t1) \
        + lie_derivative(t2, g1) \
        - d_elem(a).mul(A.pair_tt(t1, t2)).scale(half) \
        + d_elem(vf_apply(t1, vf_apply(t2, a))).scale(half) \
        - d_elem(pairing(t2, g1)).scale(half)
    return lhs - rhs


def _axiom_a4(A, t1, t2, t3):
    half = Q(1, 2)
    lhs = A.pair_tt(vf_bracket(t1, t2), t3) + A.pair_tt(t2, vf_bracket(t1, t3))
    rhs = vf_apply(t1, A.pair_tt(t2, t3)) \
        - vf_apply(t2, A.pair_tt(t1, t3)).scale(half) \
        - vf_apply(t3, A.pair_tt(t1, t2)).scale(half) \
        + pairing(t2, A.c(t1, t3)) + pairing(t3, A.c(t1, t2))
    return lhs - rhs


def _axiom_a5_direct(A, t1, t2, t3):
    half = Q(1, 2)
    lhs = d_lie_c(A, t1, t2, t3)
    inner = A.pair_tt(vf_bracket(t1, t2), t3) \
        + A.pair_tt(vf_bracket(t1, t3), t2) \
        - A.pair_tt(vf_bracket(t2, t3), t1) \
        - vf_apply(t1, A.pair_tt(t2, t3)) \
        + vf_apply(t2, A.pair_tt(t1, t3)) \
        - pairing(t3, A.c(t1, t2)).scale(2)
    return lhs + d_elem(inner).scale(half)


def _axiom_a5_ter(A, t1, t2, t3):
    half = Q(1, 2)
    lhs = d_lie_c(A, t1, t2, t3).scale(3)
    inner = A.ring.zero()
    for (x, y, z) in ((t1, t2, t3), (t2, t3, t1), (t3, t1, t2)):
        inner = inner + A.pair_tt(x, vf_bracket(y, z)).scale(half) \
            + pairing(x, A.c(y, z))
    return lhs - d_elem(inner)


def axiom_check(A: AlgebroidData, degree_bound: int = 3, samples: int = 25,
                seed: int = 0, a5_form: str = "ter") -> CheckReport:
    """Verify the algebroid axioms: exhaustively on frame triples, then on
    seeded random frame combinations with bounded-degree coefficients."""
    rep = CheckReport("axioms")
    fields = A.frame.fields
    n = len(fields)
    a5 = _axiom_a5_ter if a5_form == "ter" else _axiom_a5_direct

    for i, j, k in itertools.product(range(n), repeat=3):
        t1, t2, t3 = fields[i], fields[j], fields[k]
        rep.check_zero("A4[frame %d%d%d]" % (i, j, k), _axiom_a4(A, t1, t2, t3))
        rep.check_zero("A5[frame %d%d%d]" % (i, j, k), a5(A, t1, t2, t3))

    rng = random.Random(seed)
    ring = A.ring
    for s in range(samples):
        a = sampling.rand_elem(ring, rng, degree_bound)
        b = sampling.rand_elem(ring, rng, degree_bound)
        t1 = sampling.rand_frame_field(A.frame, rng, degree_bound)
        t2 = sampling.rand_frame_field(A.frame, rng, degree_bound)
        t3 = sampling.rand_frame_field(A.frame, rng, degree_bound)
        rep.check_zero("A1[#%d]" % s, _axiom_a1(A, a, b, t1))
        rep.check_zero("A2[#%d]" % s, _axiom_a2(A, a, t1, t2))
        rep.check_zero("A3[#%d]" % s, _axiom_a3(A, a, t1, t2))
        rep.check_zero("A4[#%d]" % s, _axiom_a4(A, t1, t2, t3))
        rep.check_zero("A5[#%d]" % s, a5(A, t1, t2, t3))
    return rep


# -- morphisms ----------------------------------------------------------------


class AlgebroidMorphism:
    """Quadruple (g_A, g_T, g_Omega, h) between frame-presented algebroids.

    g_T is recorded as a matrix over the target ring: the i-th source frame
    field maps to sum_j g_T[i][j] (target frame field j).  h is recorded by
    its values on the source frame; on a general field it is extended by the
    unique rule compatible with the two gamma operations.  g_Omega is the
    module map induced by g_A on coefficient forms.
    """

    __slots__ = ("g_A", "source", "target", "g_T_matrix", "h_frame")

    def __init__(self, g_A: RingHom, source: AlgebroidData, target: AlgebroidData,
                 g_T_matrix: RingMatrix, h_frame):
        h_frame = tuple(h_frame)
        if g_A.source != source.ring or g_A.target != target.ring:
            raise RingError("g_A does not match source/target rings")
        if g_T_matrix.ring != target.ring or g_T_matrix.rows != source.rank \
                or g_T_matrix.cols != target.rank:
            raise RingError("bad g_T matrix shape or ring")
        if len(h_frame) != source.rank or any(w.ring != target.ring for w in h_frame):
            raise RingError("h must give one target 1-form per source frame field")
        self.g_A = g_A
        self.source = source
        self.target = target
        self.g_T_matrix = g_T_matrix
        self.h_frame = h_frame

    @classmethod
    def identity(cls, A: AlgebroidData) -> "AlgebroidMorphism":
        return cls(
            RingHom.identity(A.ring), A, A,
            RingMatrix.identity(A.ring, A.rank),
            [OneForm.zero(A.ring)] * A.rank,
        )

    @classmethod
    def twist(cls, A: AlgebroidData, target: AlgebroidData, h_frame) -> "AlgebroidMorphism":
        """Same-ring morphism (Id, Id, Id, h) between algebroids over one
        extended Lie algebroid; frames may differ."""
        if A.ring != target.ring:
            raise RingError("twist morphisms keep the base ring fixed")
        m = A.frame.coordinate_matrix * target.frame.inverse_matrix()
        return cls(RingHom.identity(A.ring), A, target, m, h_frame)

    # -- the three component maps ---------------------------------------------

    def apply_T(self, v: VectorField) -> VectorField:
        """g_T of a source field: map coefficients and re-express."""
        out = VectorField.zero(self.target.ring)
        coeffs = self.source.frame.decompose(v)
        for i, f in enumerate(coeffs):
            if f.is_zero():
                continue
            gf = self.g_A(f)
            for j in range(self.target.rank):
                m = self.g_T_matrix[(i, j)]
                if m.is_zero():
                    continue
                out = out + self.target.frame.fields[j].mul(gf * m)
        return out

    def apply_Omega(self, w: OneForm) -> OneForm:
        """g_Omega( sum a_i dx_i ) = sum g_A(a_i) d(g_A(x_i))."""
        out = OneForm.zero(self.target.ring)
        for i, a in enumerate(w.coeffs):
            if a.is_zero():
                continue
            out = out + d_elem(self.g_A.images[i]).mul(self.g_A(a))
        return out

    def apply_h(self, v: VectorField) -> OneForm:
        """Extension of h off the frame:
        h(a tau) = g_A(a) h(tau) - gamma'(g_A(a), g_T tau) + g_Omega(gamma(a, tau)),
        and gamma(a, tau_i) = 0 on the source frame."""
        out = OneForm.zero(self.target.ring)
        coeffs = self.source.frame.decompose(v)
        for i, f in enumerate(coeffs):
            if f.is_zero():
                continue
            gf = self.g_A(f)
            out = out + self.h_frame[i].mul(gf)
            gtau = self.apply_T(self.source.frame.fields[i])
            out = out - self.target.gamma(gf, gtau)
        return out

    def g_T_invertible(self) -> bool:
        try:
            self.g_T_matrix.inverse()
            return True
        except RingError:
            return False

    # -- validity ---------------------------------------------------------------

    def validate(self, level: str = "algebroid", samples: int = 5, seed: int = 0,
                 degree_bound: int = 2) -> CheckReport:
        """Check the morphism conditions on the source frame (sufficient by
        uniqueness of extensions); level 'prealgebroid' skips the c condition."""
        rep = CheckReport("morphism")
        src, tgt = self.source, self.target
        half = Q(1, 2)
        rng = random.Random(seed)
        for s in range(samples):
            a = sampling.rand_elem(src.ring, rng, degree_bound)
            for i, tau in enumerate(src.frame.fields):
                lhs = self.g_A(vf_apply(tau, a))
                rhs = vf_apply(self.apply_T(tau), self.g_A(a))
                rep.check_zero("3.5T[deriv #%d tau%d]" % (s, i), lhs - rhs)
        for i, ti in enumerate(src.frame.fields):
            gti = self.apply_T(ti)
            hi = self.h_frame[i]
            for j, tj in enumerate(src.frame.fields):
                gtj = self.apply_T(tj)
                hj = self.h_frame[j]
                lhs = self.g_A(src.pairing_table[i][j])
                rhs = tgt.pair_tt(gti, gtj) + pairing(gti, hj) + pairing(gtj, hi)
                rep.check_zero("3.5pair[%d%d]" % (i, j), lhs - rhs)
                if level == "algebroid":
                    lhs_c = self.apply_Omega(src.c_table[i][j])
                    rhs_c = tgt.c(gti, gtj) \
                        + d_elem(pairing(gti, hj)).scale(half) \
                        - d_elem(pairing(gtj, hi)).scale(half) \
                        - lie_derivative(gti, hj) + lie_derivative(gtj, hi)
                    # + h([tau_i, tau_j]) = 0 on an abelian source frame
                    rep.check_zero("3.5c[%d%d]" % (i, j), lhs_c - rhs_c)
        return rep

    def __repr__(self):
        return "AlgebroidMorphism(g_T=%s, h=%s)" % (
            self.g_T_matrix, [str(w) for w in self.h_frame]
        )


def compose_morphisms(g2: AlgebroidMorphism, g1: AlgebroidMorphism) -> AlgebroidMorphism:
    """g2 after g1: (g2_A g1_A, g2_T g1_T, g2_O g1_O, g2_O h1 + h2 g1_T)."""
    if g1.target is not g2.source and g1.target != g2.source:
        raise RingError("morphisms not composable")
    g_A = g2.g_A.compose(g1.g_A)
    m = g1.g_T_matrix.map(g2.g_A) * g2.g_T_matrix
    h = []
    for i, tau in enumerate(g1.source.frame.fields):
        w = g2.apply_Omega(g1.h_frame[i]) + g2.apply_h(g1.apply_T(tau))
        h.append(w)
    return AlgebroidMorphism(g_A, g1.source, g2.target, m, h)


def pushforward(g: AlgebroidMorphism, check: bool = True) -> AlgebroidData:
    """Unique algebroid over the target prealgebroid making g a morphism:
    its c is forced by the (3.5c) condition read backwards.

    The source must carry an algebroid structure and g must be a valid
    prealgebroid morphism with invertible g_T over a fixed base ring.
    """
    if not g.g_A.is_identity():
        raise RingError("pushforward is implemented over a fixed base ring")
    if not g.g_T_invertible():
        raise RingError("pushforward needs an invertible g_T")
    if check:
        pre = g.validate(level="prealgebroid")
        if not pre.ok:
            raise RingError("not a prealgebroid morphism:\n" + pre.summary())
    src, tgt = g.source, g.target
    half = Q(1, 2)
    n = tgt.rank
    ninv = g.g_T_matrix.inverse()
    # source fields sigma_a with g_T(sigma_a) = target frame field a
    sigmas = []
    for a in range(n):
        v = VectorField.zero(src.ring)
        for i in range(src.rank):
            coef = ninv[(a, i)]
            if not coef.is_zero():
                v = v + src.frame.fields[i].mul(coef)
        sigmas.append(v)
    z = OneForm.zero(tgt.ring)
    new_c = [[z] * n for _ in range(n)]
    for a in range(n):
        for b in range(a + 1, n):
            s1, s2 = sigmas[a], sigmas[b]
            h1, h2 = g.apply_h(s1), g.apply_h(s2)
            t1 = tgt.frame.fields[a]
            t2 = tgt.frame.fields[b]
            w = g.apply_Omega(src.c(s1, s2)) \
                - d_elem(pairing(t1, h2)).scale(half) \
                + d_elem(pairing(t2, h1)).scale(half) \
                + lie_derivative(t1, h2) - lie_derivative(t2, h1) \
                - g.apply_h(vf_bracket(s1, s2))
            new_c[a][b] = w
            new_c[b][a] = -w
    return AlgebroidData(tgt.frame, tgt.pairing_table, new_c)


def frame_twist(frame_a: Frame, frame_b: Frame):
    """The canonical twist h for the morphism from the frame_b-canonical to
    the frame_a-canonical presentation of one extended Lie algebroid:

        <tau^B_i, h(tau^B_j)> = -1/2 <tau^B_i, tau^B_j>_(canonical on frame_a),

    returned as the list of 1-forms h(tau^B_j)."""
    if frame_a.ring != frame_b.ring:
        raise RingError("frames over different rings")
    if not (frame_a.abelian and frame_b.abelian):
        raise RingError("frame twists need abelian frames")
    can_a = canonical_algebroid(frame_a)
    n = frame_b.rank
    dual_b = frame_b.dual_forms()
    half = Q(-1, 2)
    out = []
    for j in range(n):
        w = OneForm.zero(frame_b.ring)
        for i in range(n):
            coef = can_a.pair_tt(frame_b.fields[i], frame_b.fields[j]).scale(half)
            if not coef.is_zero():
                w = w + dual_b[i].mul(coef)
        out.append(w)
    return out


def twist_morphism(frame_a: Frame, frame_b: Frame) -> AlgebroidMorphism:
    """The prealgebroid morphism (Id, Id, Id, h_{a,b}) from the canonical
    algebroid on frame_b to the canonical algebroid on frame_a."""
    h = frame_twist(frame_a, frame_b)
    return AlgebroidMorphism.twist(
        canonical_algebroid(frame_b), canonical_algebroid(frame_a), h
    )


def beta_coordinate_form(frame_a: Frame, frame_b: Frame) -> PForm:
    """The Chern-Simons 3-form of a frame change, from the coordinate formula

    beta(tau'_i, tau'_j) = 1/2 { tau_u(phi^{jp}) tau_p(phi^{iq}) tau_q(phi^{ru})
                                 - (i <-> j) } omega'_r

    with tau'_i = phi^{ij} tau_j (frame_b over frame_a)."""
    ring = frame_a.ring
    n = frame_a.rank
    phi = frame_b.coordinate_matrix * frame_a.inverse_matrix()
    tau = frame_a.fields
    half = Q(1, 2)

    def tder(u, elem):
        return vf_apply(tau[u], elem)

    table = [[None] * n for _ in range(n)]
    dual_b = frame_b.dual_forms()
    for i in range(n):
        for j in range(n):
            w = OneForm.zero(ring)
            for r in range(n):
                acc = ring.zero()
                for u, p, q in itertools.product(range(n), repeat=3):
                    term = tder(u, phi[(j, p)]) * tder(p, phi[(i, q)]) * tder(q, phi[(r, u)]) \
                        - tder(u, phi[(i, p)]) * tder(p, phi[(j, q)]) * tder(q, phi[(r, u)])
                    acc = acc + term
                acc = acc.scale(half)
                if not acc.is_zero():
                    w = w + dual_b[r].mul(acc)
            table[i][j] = w
    return _pform_from_frame_table(frame_b, table)


def magic_check(frame_a: Frame, frame_b: Frame) -> CheckReport:
    """The magic lemma as an executable fact: the frame-change 3-form is
    closed, and the canonical algebroid on frame_a equals the pushforward of
    the canonical algebroid on frame_b shifted by that form."""
    rep = CheckReport("magic")
    g = twist_morphism(frame_a, frame_b)
    val = g.validate(level="prealgebroid")
    rep.record("twist-valid", val.ok, None if val.ok else val.summary())
    beta = beta_coordinate_form(frame_a, frame_b)
    rep.check_zero("beta-closed", d_dr(beta))
    pushed = pushforward(g, check=False)
    shifted = add_three_form(pushed, beta)
    target = canonical_algebroid(frame_a)
    for i in range(frame_a.rank):
        for j in range(frame_a.rank):
            rep.check_zero(
                "pair[%d%d]" % (i, j),
                shifted.pairing_table[i][j] - target.pairing_table[i][j],
            )
            rep.check_zero(
                "c[%d%d]" % (i, j),
                shifted.c_table[i][j] - target.c_table[i][j],
            )
    return rep


def closed_two_form_map(frame: Frame, h: PForm):
    """Turn a 2-form into the A-linear map T -> Omega it induces (leading
    slot contraction), returned as values on the frame."""
    return [h.evaluate([t]) for t in frame.fields]
