"""Exact symbolic computation with vertex algebroids and chiral differential operators.

The package is organized in layers:

* ``ring``       -- exact rationals, multivariate Laurent-constrained polynomial
                    rings, substitution homomorphisms, matrices.
* ``geometry``   -- vector fields, differential forms and the de Rham-Chevalley
                    complex of a free coordinate frame.
* ``valgebroid`` -- vertex algebroids presented by abelian frames: extension of
                    the anomaly operations, axiom suites, torseur action by
                    closed 3-forms, morphisms and pushforwards.
* ``charclass``  -- Atiyah / Chern-Simons cocycles of frame changes and of
                    transition data on finite chart covers; gauge identities.
* ``conformal``  -- the graded conformal algebra attached to a vertex
                    algebroid, with divided-power translations.
* ``envelope``   -- the vertex envelope (algebra of chiral differential
                    operators): PBW normal forms, n-products for all n,
                    Borcherds checking, characters, jet algebra.
* ``cli``        -- scenario configs, geometric presets, check orchestration.

All arithmetic is exact; every identity check is a strict equality of
canonical forms.
"""

__version__ = "0.1.0"
