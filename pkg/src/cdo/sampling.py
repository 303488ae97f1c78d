"""Seeded random generators for identity suites.

The identities being checked are polynomial in their inputs, so exact
equality on enough random points of bounded degree is strong evidence;
frame-level checks stay exhaustive.  Everything is driven by an explicit
random.Random so reports are reproducible.
"""

from __future__ import annotations

import random

from .geometry import OneForm, PForm, VectorField
from .ring import Q, RingElem, RingSpec


def rand_elem(spec: RingSpec, rng: random.Random, degree_bound: int = 3,
              terms: int = 2, allow_zero: bool = True) -> RingElem:
    out = spec.zero()
    nterms = rng.randint(0 if allow_zero else 1, terms)
    for _ in range(nterms):
        exps = []
        for inv in spec.laurent_mask:
            lo = -degree_bound if inv else 0
            exps.append(rng.randint(lo, degree_bound))
        coeff = Q(rng.choice([-3, -2, -1, 1, 2, 3]), rng.choice([1, 1, 2]))
        out = out + spec.monomial(exps, coeff)
    return out


def rand_nonzero_elem(spec, rng, degree_bound=3, terms=2):
    for _ in range(50):
        a = rand_elem(spec, rng, degree_bound, terms, allow_zero=False)
        if not a.is_zero():
            return a
    return spec.one()


def rand_field(spec: RingSpec, rng: random.Random, degree_bound=3) -> VectorField:
    return VectorField(
        spec, [rand_elem(spec, rng, degree_bound, 1) for _ in range(spec.nvars)]
    )


def rand_frame_field(frame, rng, degree_bound=3) -> VectorField:
    """Random A-combination of frame fields (never identically zero)."""
    out = VectorField.zero(frame.ring)
    for tau in frame.fields:
        f = rand_elem(frame.ring, rng, degree_bound, 1)
        out = out + tau.mul(f)
    if out.is_zero():
        return frame.fields[rng.randrange(len(frame.fields))]
    return out


def rand_one_form(spec, rng, degree_bound=3) -> OneForm:
    return OneForm(
        spec, [rand_elem(spec, rng, degree_bound, 1) for _ in range(spec.nvars)]
    )


def rand_pform(spec, rng, degree, degree_bound=3) -> PForm:
    import itertools

    comps = {}
    for idx in itertools.combinations(range(spec.nvars), degree):
        comps[idx] = rand_elem(spec, rng, degree_bound, 1)
    return PForm(spec, degree, comps)


def rand_monomial_unit(spec: RingSpec, rng: random.Random, degree_bound=2) -> RingElem:
    """A random unit: a nonzero rational times invertible-variable powers."""
    exps = []
    for inv in spec.laurent_mask:
        exps.append(rng.randint(-degree_bound, degree_bound) if inv else 0)
    coeff = Q(rng.choice([-2, -1, 1, 2]))
    return spec.monomial(exps, coeff)


def rand_monomial_matrix(spec: RingSpec, rng: random.Random, n: int,
                         degree_bound=2):
    """Random invertible generalized-permutation matrix over a torus ring."""
    from .ring import RingMatrix

    perm = list(range(n))
    rng.shuffle(perm)
    z = spec.zero()
    rows = []
    for i in range(n):
        row = [z] * n
        row[perm[i]] = rand_monomial_unit(spec, rng, degree_bound)
        rows.append(row)
    return RingMatrix(spec, rows)
