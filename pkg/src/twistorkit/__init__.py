"""Computational tools for twistor spaces of hyperkähler manifolds.

Modules: ``bundles`` (vector bundles on the projective line), ``lie``
(twistor Lie algebras), ``quotients`` (quotient arithmetic), ``glt``
(generalized Legendre transform), ``monopole`` (charge-2 monopole action)
and ``cli``.
"""

from .bundles import BundleOnP1, LaurentPolynomial, LineBundleSection, splitting_type
from .glt import GLTProblem, Term
from .lie import TwistorLieAlgebra
from .monopole import RationalMapPoint

__version__ = "0.1.0"

__all__ = [
    "BundleOnP1",
    "GLTProblem",
    "LaurentPolynomial",
    "LineBundleSection",
    "RationalMapPoint",
    "Term",
    "TwistorLieAlgebra",
    "splitting_type",
]
