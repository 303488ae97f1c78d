"""Atiyah and Chern-Simons cocycles; Cech machinery on finite chart covers.

Two computation styles coexist:

* the frame-theoretic trace formulas of the torseur analysis (used for the
  emitted obstruction cocycle): for a frame change tau' = phi tau and a
  second change tau'' = psi tau',

      alpha(psi, phi)(t''_i) = 1/2 tr{ t''_i(psi^-1) psi phi t''_r(phi^-1)
                                       - (i <-> r) } w''_r
      beta(phi)(t'_i, t'_j)  = 1/2 tr{ t'_i(phi^-1) phi t'_j(phi^-1) phi
                                       t'_r(phi^-1) phi - (i <-> j) } w'_r

  with d(alpha(psi,phi)) = beta(phi) + beta(psi) - beta(psi phi) and the
  group-cocycle identity in three matrices;

* plain wedge-trace forms in the transition matrices (the classical
  "Atiyah-Chern-Simons" shape), used by the gauge-identity suite; the two
  styles are compared on shared data and any constant mismatch is reported,
  never silently reconciled.

Transition data follows the classical components convention: sections
satisfy v_i = g_ij v_j, so g_ii = 1 and g_ij g_jk = g_ik, and the frame
change from chart i to chart j is the transpose F_ij = g_ij^t (then
F_jk F_ij = F_ik, the composition order the trace formulas expect).
"""

from __future__ import annotations

import itertools

from .geometry import (
    OneForm,
    PForm,
    VectorField,
    d_classical,
    d_dr,
    transport_form,
    vf_apply,
    wedge,
)
from .report import CheckReport
from .ring import Q, RingElem, RingError, RingHom, RingMatrix, RingSpec
from .valgebroid import Frame, canonical_algebroid, pform_from_tensor, twist_morphism


# -- matrices of differential forms ----------------------------------------------


class FormMatrix:
    """Square matrix with uniform-degree PForm entries; products wedge."""

    __slots__ = ("ring", "degree", "entries")

    def __init__(self, ring: RingSpec, degree: int, entries):
        self.ring = ring
        self.degree = degree
        self.entries = tuple(tuple(row) for row in entries)

    @classmethod
    def differential(cls, m: RingMatrix) -> "FormMatrix":
        """Entrywise classical differential of a scalar matrix."""
        return cls(m.ring, 1, [
            [d_classical(PForm.from_scalar(x)) for x in row] for row in m.entries
        ])

    @classmethod
    def from_scalar_matrix(cls, m: RingMatrix) -> "FormMatrix":
        return cls(m.ring, 0, [
            [PForm.from_scalar(x) for x in row] for row in m.entries
        ])

    def __mul__(self, other: "FormMatrix") -> "FormMatrix":
        n = len(self.entries)
        deg = self.degree + other.degree
        rows = []
        for i in range(n):
            row = []
            for j in range(len(other.entries[0])):
                acc = PForm.zero(self.ring, deg)
                for k in range(len(other.entries)):
                    acc = acc + wedge(self.entries[i][k], other.entries[k][j])
                row.append(acc)
            rows.append(row)
        return FormMatrix(self.ring, deg, rows)

    def __add__(self, other):
        return FormMatrix(self.ring, self.degree, [
            [a + b for a, b in zip(r1, r2)]
            for r1, r2 in zip(self.entries, other.entries)
        ])

    def __sub__(self, other):
        return self + other.scale(-1)

    def scale(self, q):
        return FormMatrix(self.ring, self.degree, [
            [x.scale(q) for x in row] for row in self.entries
        ])

    def trace(self) -> PForm:
        acc = PForm.zero(self.ring, self.degree)
        for i in range(len(self.entries)):
            acc = acc + self.entries[i][i]
        return acc


def log_derivative(m: RingMatrix) -> FormMatrix:
    """m^{-1} dm as a matrix of 1-forms."""
    minv = FormMatrix.from_scalar_matrix(m.inverse())
    return minv * FormMatrix.differential(m)


# -- frame-theoretic cocycles (the torseur formulas) --------------------------------


def _frame_of_change(frame: Frame, phi: RingMatrix) -> Frame:
    """The frame with tau'_i = phi^{ij} tau_j."""
    return Frame.from_matrix(frame.ring, phi * frame.coordinate_matrix)


def atiyah_alpha(psi: RingMatrix, phi: RingMatrix, frame: Frame) -> PForm:
    """The 2-form discrepancy of the chain of frame changes phi then psi."""
    ring = frame.ring
    n = frame.rank
    prime2 = _frame_of_change(frame, psi * phi)
    taus2 = prime2.fields
    phinv, psinv = phi.inverse(), psi.inverse()
    psiphi = psi * phi

    def tder(t: VectorField, m: RingMatrix) -> RingMatrix:
        return RingMatrix(ring, [
            [vf_apply(t, x) for x in row] for row in m.entries
        ])

    half = Q(1, 2)
    raw = [[None] * n for _ in range(n)]
    dpsi = [tder(t, psinv) for t in taus2]
    dphi = [tder(t, phinv) for t in taus2]
    for i in range(n):
        for r in range(n):
            raw[i][r] = (dpsi[i] * psiphi * dphi[r]).trace()
    table = [[(raw[i][r] - raw[r][i]).scale(half) for r in range(n)] for i in range(n)]
    winv = prime2.inverse_matrix()
    tensor = {}
    for a, b in itertools.product(range(ring.nvars), repeat=2):
        acc = ring.zero()
        for i in range(n):
            wa = winv[(a, i)]
            if wa.is_zero():
                continue
            for r in range(n):
                wb = winv[(b, r)]
                if not wb.is_zero():
                    acc = acc + wa * table[i][r] * wb
        if not acc.is_zero():
            tensor[(a, b)] = acc
    return pform_from_tensor(ring, 2, tensor)


def atiyah_alpha_table(psi: RingMatrix, phi: RingMatrix, frame: Frame):
    """The raw (i, r) trace table of the alpha formula, before symmetrizing;
    exposes the alpha_1 = -alpha_2^t skewness to the checks."""
    ring = frame.ring
    n = frame.rank
    prime2 = _frame_of_change(frame, psi * phi)
    phinv, psinv = phi.inverse(), psi.inverse()
    psiphi = psi * phi
    out = [[None] * n for _ in range(n)]
    for i in range(n):
        ti = prime2.fields[i]
        di = RingMatrix(ring, [[vf_apply(ti, x) for x in row] for row in psinv.entries])
        for r in range(n):
            tr_ = prime2.fields[r]
            dr = RingMatrix(ring, [[vf_apply(tr_, x) for x in row] for row in phinv.entries])
            out[i][r] = (di * psiphi * dr).trace()
    return out


def cs_beta(phi: RingMatrix, frame: Frame) -> PForm:
    """The Chern-Simons 3-form of one frame change."""
    ring = frame.ring
    n = frame.rank
    prime = _frame_of_change(frame, phi)
    taus = prime.fields
    phinv = phi.inverse()
    dphi = [
        RingMatrix(ring, [[vf_apply(t, x) for x in row] for row in phinv.entries]) * phi
        for t in taus
    ]
    half = Q(1, 2)
    winv = prime.inverse_matrix()
    tensor = {}
    nv = ring.nvars
    table = [[[None] * n for _ in range(n)] for _ in range(n)]
    for i in range(n):
        for j in range(n):
            for r in range(n):
                table[i][j][r] = (
                    (dphi[i] * dphi[j] * dphi[r]).trace()
                    - (dphi[j] * dphi[i] * dphi[r]).trace()
                ).scale(half)
    for a, b, c in itertools.product(range(nv), repeat=3):
        acc = ring.zero()
        for i in range(n):
            wa = winv[(a, i)]
            if wa.is_zero():
                continue
            for j in range(n):
                wb = winv[(b, j)]
                if wb.is_zero():
                    continue
                for r in range(n):
                    wc = winv[(c, r)]
                    if not wc.is_zero():
                        acc = acc + wa * wb * table[i][j][r] * wc
        if not acc.is_zero():
            tensor[(a, b, c)] = acc
    return pform_from_tensor(ring, 3, tensor)


def alpha_via_twists(psi: RingMatrix, phi: RingMatrix, frame: Frame):
    """The same discrepancy from the torseur side: the failure of the three
    canonical frame twists to compose, evaluated on the final frame.

    Returns the list of 1-forms (h_{g,g'} + h_{g',g''} - h_{g,g''})(tau''_i).
    """
    f0 = frame
    f1 = _frame_of_change(frame, phi)
    f2 = _frame_of_change(frame, psi * phi)
    g01 = twist_morphism(f0, f1)
    g12 = twist_morphism(f1, f2)
    g02 = twist_morphism(f0, f2)
    out = []
    for t in f2.fields:
        out.append(g01.apply_h(t) + g12.apply_h(t) - g02.apply_h(t))
    return out


def cocycle_checks(phi: RingMatrix, psi: RingMatrix, chi: RingMatrix,
                   frame: Frame) -> CheckReport:
    """The group-cocycle identity in three changes and the d(alpha) = sum of
    betas identity in two."""
    rep = CheckReport("cocycle")
    lhs = atiyah_alpha(psi, chi, frame) \
        - atiyah_alpha(phi * psi, chi, frame) \
        + atiyah_alpha(phi, psi * chi, frame) \
        - atiyah_alpha(phi, psi, frame)
    rep.check_zero("group-cocycle", lhs)
    da = d_dr(atiyah_alpha(psi, phi, frame))
    rhs = cs_beta(phi, frame) + cs_beta(psi, frame) - cs_beta(psi * phi, frame)
    rep.check_zero("dalpha-betas", da - rhs)
    rep.check_zero("beta-closed", d_dr(cs_beta(phi, frame)))
    # skewness of the raw table: alpha_1^{ir} = -alpha_2^{ri}
    table = atiyah_alpha_table(psi, phi, frame)
    a2 = atiyah_alpha(psi, phi, frame)
    prime2 = _frame_of_change(frame, psi * phi)
    for i in range(frame.rank):
        for r in range(frame.rank):
            skew = (table[i][r] - table[r][i]).scale(Q(1, 2))
            want = a2.evaluate([prime2.fields[i]])
            # full alpha evaluated pairs with the dual basis; compare entry
            from .geometry import pairing

            rep.check_zero(
                "skew[%d%d]" % (i, r),
                skew - pairing(prime2.fields[r], want),
            )
    return rep


# -- classical wedge-trace cocycles ---------------------------------------------------


def alpha_trace(g_ij: RingMatrix, g_jk: RingMatrix) -> PForm:
    """tr( g_ij^{-1} dg_ij ^ dg_jk g_jk^{-1} ), the classical Atiyah shape."""
    a = log_derivative(g_ij)
    b = FormMatrix.differential(g_jk) * FormMatrix.from_scalar_matrix(g_jk.inverse())
    return (a * b).trace()


def beta_trace(g: RingMatrix) -> PForm:
    """(1/3) tr( (dg g^{-1})^3 )."""
    a = FormMatrix.differential(g) * FormMatrix.from_scalar_matrix(g.inverse())
    return (a * a * a).trace().scale(Q(1, 3))


def gamma_trace(g: RingMatrix) -> PForm:
    """(1/3) tr( (g^{-1} dg)^3 )."""
    a = log_derivative(g)
    return (a * a * a).trace().scale(Q(1, 3))


def eta_trace(h_ij: RingMatrix, phi_i: RingMatrix, phi_j: RingMatrix) -> PForm:
    """The regauging 2-form
    tr{ h^{-1}dh phi_j^{-1}dphi_j - phi_i^{-1}dphi_i dh h^{-1}
        + h^{-1} phi_i^{-1}dphi_i h phi_j^{-1}dphi_j }."""
    dh = FormMatrix.differential(h_ij)
    hinv = FormMatrix.from_scalar_matrix(h_ij.inverse())
    hmat = FormMatrix.from_scalar_matrix(h_ij)
    li = log_derivative(phi_i)
    lj = log_derivative(phi_j)
    t1 = ((hinv * dh) * lj).trace()
    t2 = (li * (dh * hinv)).trace()
    t3 = (((hinv * li) * hmat) * lj).trace()
    return t1 - t2 + t3


# -- covers and transition data ---------------------------------------------------------


class Cover:
    """A finite chart cover with explicit overlap rings.

    rings maps a frozenset of chart indices to the RingSpec of that overlap
    (singletons are the charts); restrictions maps (small, big) index-set
    pairs to the RingHom localizing small-overlap data into the big overlap.
    """

    def __init__(self, charts, rings, restrictions):
        self.charts = list(charts)
        self.rings = {frozenset(k): v for k, v in rings.items()}
        for i, spec in enumerate(self.charts):
            self.rings.setdefault(frozenset([i]), spec)
        self.restrictions = {
            (frozenset(a), frozenset(b)): f for (a, b), f in restrictions.items()
        }

    @property
    def n(self):
        return len(self.charts)

    def ring(self, idxs) -> RingSpec:
        key = frozenset(idxs)
        if key not in self.rings:
            raise RingError("no overlap ring for %r" % sorted(idxs))
        return self.rings[key]

    def to_overlap(self, small, big) -> RingHom:
        small, big = frozenset(small), frozenset(big)
        if small == big:
            return RingHom.identity(self.rings[small])
        key = (small, big)
        if key not in self.restrictions:
            raise RingError("no restriction from %r to %r" % (sorted(small), sorted(big)))
        return self.restrictions[key]

    def validate(self) -> CheckReport:
        """Restriction homs compose consistently chart -> pair -> bigger."""
        rep = CheckReport("cover")
        for (small, big), f in self.restrictions.items():
            for (s2, b2), g in self.restrictions.items():
                if b2 == small:
                    direct = self.restrictions.get((s2, big))
                    if direct is None:
                        continue
                    comp = f.compose(g)
                    ok = all(
                        comp(x) == direct(x) for x in self.rings[s2].gens()
                    )
                    rep.record(
                        "compose[%s->%s->%s]" % (sorted(s2), sorted(small), sorted(big)),
                        ok,
                    )
        return rep


class TransitionData:
    """Per ordered pair (i, j) an invertible matrix over the pair ring, in
    the components convention v_i = g_ij v_j."""

    def __init__(self, cover: Cover, matrices: dict):
        self.cover = cover
        self.matrices = dict(matrices)
        for (i, j), m in self.matrices.items():
            if m.ring != cover.ring([i, j]):
                raise RingError("transition (%d,%d) over the wrong ring" % (i, j))

    @property
    def rank(self):
        return next(iter(self.matrices.values())).rows

    def g(self, i, j) -> RingMatrix:
        if i == j:
            raise RingError("diagonal transitions are implicit identities")
        return self.matrices[(i, j)]

    def frame_change(self, i, j, over=None) -> RingMatrix:
        """F_ij = g_ij^t, the frame change from chart i to chart j, optionally
        transported into a larger overlap."""
        m = self.g(i, j).transpose()
        if over is not None:
            m = m.map(self.cover.to_overlap([i, j], over))
        return m

    def validate(self) -> CheckReport:
        rep = CheckReport("transitions")
        cov = self.cover
        n = cov.n
        for (i, j), m in self.matrices.items():
            back = self.matrices.get((j, i))
            if back is None:
                rep.record("inverse[%d%d]" % (i, j), False, "missing reverse matrix")
                continue
            rep.record("inverse[%d%d]" % (i, j), (m * back).is_identity(),
                       "g_ij g_ji != 1")
        for i, j, k in itertools.permutations(range(n), 3):
            key = frozenset([i, j, k])
            if key not in cov.rings:
                continue
            gij = self.g(i, j).map(cov.to_overlap([i, j], key))
            gjk = self.g(j, k).map(cov.to_overlap([j, k], key))
            gik = self.g(i, k).map(cov.to_overlap([i, k], key))
            rep.record(
                "cocycle[%d%d%d]" % (i, j, k),
                gij * gjk == gik,
                "g_ij g_jk != g_ik",
            )
        return rep

    def direct_sum(self, other: "TransitionData") -> "TransitionData":
        if self.cover is not other.cover and self.cover.rings != other.cover.rings:
            raise RingError("direct sums need a common cover")
        out = {}
        for (i, j), m in self.matrices.items():
            m2 = other.matrices[(i, j)]
            ring = m.ring
            z = ring.zero()
            r1, r2 = m.rows, m2.rows
            rows = []
            for a in range(r1 + r2):
                row = []
                for b in range(r1 + r2):
                    if a < r1 and b < r1:
                        row.append(m.entries[a][b])
                    elif a >= r1 and b >= r1:
                        row.append(m2.entries[a - r1][b - r1])
                    else:
                        row.append(z)
                rows.append(row)
            out[(i, j)] = RingMatrix(ring, rows)
        return TransitionData(self.cover, out)


class CechElement:
    """A Cech cochain of differential forms on a cover."""

    def __init__(self, cech_degree: int, form_degree: int, comps: dict):
        self.cech_degree = cech_degree
        self.form_degree = form_degree
        self.comps = dict(comps)

    def __eq__(self, other):
        return (
            isinstance(other, CechElement)
            and self.cech_degree == other.cech_degree
            and self.form_degree == other.form_degree
            and self.comps == other.comps
        )

    def __add__(self, other):
        out = dict(self.comps)
        for k, v in other.comps.items():
            out[k] = out[k] + v if k in out else v
        return CechElement(self.cech_degree, self.form_degree, out)

    def is_zero(self):
        return all(v.is_zero() for v in self.comps.values())

    def to_dict(self):
        return {
            "cech_degree": self.cech_degree,
            "form_degree": self.form_degree,
            "components": {
                ",".join(map(str, k)): str(v) for k, v in sorted(self.comps.items())
            },
        }


def ch2_cocycle(t: TransitionData):
    """The obstruction cocycle of transition data: per-triple 2-forms and
    per-pair closed 3-forms, with all consistency checks run.

    Emits the doubled representative (the pair normalized so that its class
    is twice the degree-2 Chern character); returns (alpha, beta, report).
    """
    cov = t.cover
    n = cov.n
    rep = t.validate()
    if not rep.ok:
        raise RingError("transition data fails its cocycle conditions:\n" + rep.summary())
    alpha_comps = {}
    beta_comps = {}
    pairs = [(i, j) for i in range(n) for j in range(n) if i != j]
    for (i, j) in pairs:
        ring = cov.ring([i, j])
        frame = Frame.coordinate(ring)
        beta_comps[(i, j)] = cs_beta(t.frame_change(i, j), frame)
        rep.check_zero("beta-closed[%d%d]" % (i, j), d_dr(beta_comps[(i, j)]))
    triples = [
        (i, j, k)
        for i, j, k in itertools.product(range(n), repeat=3)
        if len({i, j, k}) == 3
    ]
    for (i, j, k) in triples:
        key = [i, j, k]
        ring = cov.ring(key)
        frame = Frame.coordinate(ring)
        phi = t.frame_change(i, j, over=key)
        psi = t.frame_change(j, k, over=key)
        alpha_comps[(i, j, k)] = atiyah_alpha(psi, phi, frame)
        # d alpha_{ijk} = beta_jk - beta_ik + beta_ij on the triple ring
        delta = transport_form(cov.to_overlap([j, k], key), beta_comps[(j, k)]) \
            - transport_form(cov.to_overlap([i, k], key), beta_comps[(i, k)]) \
            + transport_form(cov.to_overlap([i, j], key), beta_comps[(i, j)])
        rep.check_zero(
            "dalpha=dCechBeta[%d%d%d]" % (i, j, k),
            d_dr(alpha_comps[(i, j, k)]) - delta,
        )

    def alpha_at(i, j, k, over):
        """alpha_{ijk} over the given index set, zero when indices repeat
        with an identity change."""
        ring = cov.ring(over)
        frame = Frame.coordinate(ring)
        phi = t.frame_change(i, j, over=over) if i != j else RingMatrix.identity(ring, t.rank)
        psi = t.frame_change(j, k, over=over) if j != k else RingMatrix.identity(ring, t.rank)
        return atiyah_alpha(psi, phi, frame)

    for quad in itertools.product(range(n), repeat=4):
        key = set(quad)
        if len(key) < 3 or frozenset(key) not in cov.rings:
            continue
        i, j, k, l = quad
        total = alpha_at(j, k, l, key) - alpha_at(i, k, l, key) \
            + alpha_at(i, j, l, key) - alpha_at(i, j, k, key)
        rep.check_zero("deltaAlpha[%d%d%d%d]" % quad, total)

    alpha = CechElement(2, 2, alpha_comps)
    beta = CechElement(1, 3, beta_comps)
    return alpha, beta, rep


def compare_normative_with_trace(t: TransitionData) -> CheckReport:
    """Report how the wedge-trace cocycle shape relates to the frame-theoretic
    one on this data: for each component, either a proportionality constant
    or a mismatch flag (informational; the frame formulas are normative)."""
    rep = CheckReport("trace-vs-frame")
    cov = t.cover
    n = cov.n
    for i, j, k in itertools.permutations(range(n), 3):
        key = frozenset([i, j, k])
        if key not in cov.rings:
            continue
        ring = cov.ring(key)
        frame = Frame.coordinate(ring)
        phi = t.frame_change(i, j, over=key)
        psi = t.frame_change(j, k, over=key)
        a_frame = atiyah_alpha(psi, phi, frame)
        gij = t.g(i, j).map(cov.to_overlap([i, j], key))
        gjk = t.g(j, k).map(cov.to_overlap([j, k], key))
        a_tr = alpha_trace(gij, gjk)
        ratio = _proportionality(a_tr, a_frame)
        rep.record(
            "alpha[%d%d%d]" % (i, j, k), ratio is not None,
            None if ratio is not None else
            "trace form is not proportional to the frame form",
        )
        if ratio is not None and not rep.items[-1].witness:
            rep.items[-1].witness = "trace = %s * frame" % ratio
    for (i, j) in [(i, j) for i in range(n) for j in range(n) if i != j]:
        ring = cov.ring([i, j])
        frame = Frame.coordinate(ring)
        b_frame = cs_beta(t.frame_change(i, j), frame)
        b_tr = beta_trace(t.g(i, j))
        ratio = _proportionality(b_tr, b_frame)
        rep.record(
            "beta[%d%d]" % (i, j), ratio is not None,
            None if ratio is not None else
            "trace form is not proportional to the frame form",
        )
        if ratio is not None and not rep.items[-1].witness:
            rep.items[-1].witness = "trace = %s * frame" % ratio
    return rep


def _proportionality(a: PForm, b: PForm):
    """The constant c with a = c b, when one exists (None otherwise)."""
    if b.is_zero():
        return Q(0) if a.is_zero() else None
    if a.is_zero():
        return Q(0)
    key = next(iter(b.comps))
    av, bv = a.comps.get(key), b.comps[key]
    if av is None:
        return None
    # candidate from leading monomials
    (be, bq), = list(bv.terms.items())[:1]
    aq = av.terms.get(be)
    if aq is None:
        return None
    c = aq / bq
    return c if a == b.scale(c) else None


def gauge_compare(g: TransitionData, h: TransitionData, phis) -> CheckReport:
    """Regauging identities: with g_ij = phi_i h_ij phi_j^{-1},

        alpha(g) - alpha(h) = dCech eta        (pairwise 2-forms eta)
        dDR eta = beta(g) - beta(h) - dCech gamma

    in the wedge-trace normalization; returns the witness (eta, gamma) in
    the report metadata."""
    rep = CheckReport("gauge")
    cov = g.cover
    n = cov.n
    # precondition: the relation between g, h and the regauging
    for (i, j), gm in g.matrices.items():
        ring = cov.ring([i, j])
        fi = cov.to_overlap([i], [i, j])
        fj = cov.to_overlap([j], [i, j])
        pi = phis[i].map(fi)
        pj = phis[j].map(fj)
        rel = pi * h.matrices[(i, j)] * pj.inverse()
        rep.record("relation[%d%d]" % (i, j), rel == gm,
                   None if rel == gm else "g != phi h phi^{-1}")
    if not rep.ok:
        return rep
    etas = {}
    gammas = {}
    for (i, j) in g.matrices:
        ring = cov.ring([i, j])
        pi = phis[i].map(cov.to_overlap([i], [i, j]))
        pj = phis[j].map(cov.to_overlap([j], [i, j]))
        etas[(i, j)] = eta_trace(h.matrices[(i, j)], pi, pj)
    for i in range(n):
        gammas[i] = gamma_trace(phis[i])
    # (7.6.3) on triples
    for i, j, k in itertools.permutations(range(n), 3):
        key = frozenset([i, j, k])
        if key not in cov.rings:
            continue
        gij = g.g(i, j).map(cov.to_overlap([i, j], key))
        gjk = g.g(j, k).map(cov.to_overlap([j, k], key))
        hij = h.g(i, j).map(cov.to_overlap([i, j], key))
        hjk = h.g(j, k).map(cov.to_overlap([j, k], key))
        lhs = alpha_trace(gij, gjk) - alpha_trace(hij, hjk)
        rhs = transport_form(cov.to_overlap([j, k], key), etas[(j, k)]) \
            - transport_form(cov.to_overlap([i, k], key), etas[(i, k)]) \
            + transport_form(cov.to_overlap([i, j], key), etas[(i, j)])
        rep.check_zero("7.6.3[%d%d%d]" % (i, j, k), lhs - rhs)
    # (7.6.5) on pairs
    for (i, j) in g.matrices:
        key = [i, j]
        lhs = d_dr(etas[(i, j)])
        gi = transport_form(cov.to_overlap([i], key), gammas[i])
        gj = transport_form(cov.to_overlap([j], key), gammas[j])
        rhs = beta_trace(g.g(i, j)) - beta_trace(h.g(i, j)) - (gj - gi)
        rep.check_zero("7.6.5[%d%d]" % (i, j), lhs - rhs)
    return rep


def block_additivity(g1: TransitionData, g2: TransitionData) -> CheckReport:
    """The obstruction cocycle of a direct sum is the sum of the cocycles."""
    rep = CheckReport("block-additivity")
    total = g1.direct_sum(g2)
    a_sum, b_sum, r_sum = ch2_cocycle(total)
    a1, b1, r1 = ch2_cocycle(g1)
    a2, b2, r2 = ch2_cocycle(g2)
    for r in (r_sum, r1, r2):
        rep.record("consistency[%s]" % r.name, r.ok, None if r.ok else r.summary())
    want_a = a1 + a2
    want_b = b1 + b2
    for k in b_sum.comps:
        rep.check_zero("beta-add[%s]" % (k,), b_sum.comps[k] - want_b.comps[k])
    for k in a_sum.comps:
        rep.check_zero("alpha-add[%s]" % (k,), a_sum.comps[k] - want_a.comps[k])
    return rep
