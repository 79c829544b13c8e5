"""Linearization of fourth-order ODEs to u''' = 0 by fiber-preserving tangent transformations."""

from tanlin.expr import (
    Expression,
    ParseError,
    UnknownIdentifierError,
    is_zero,
    normalize,
    parse,
    partial,
    poly_coefficients,
    substitute,
    total_derivative,
)
from tanlin.rational import NotPolynomialError, RationalFunction, ZeroDenominatorError

__version__ = "0.1.0"
