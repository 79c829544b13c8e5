"""Hypothesis strategies for random expressions over the jet alphabet."""

from fractions import Fraction

from hypothesis import strategies as st

from tanlin.expr import Const, Expression, Var
from tanlin.rational import ZeroDenominatorError

VARS = ("x", "y", "p", "y2", "y3")

constants = st.builds(
    lambda n, d: Const(Fraction(n, d)), st.integers(-5, 5), st.integers(1, 4)
)
leaves = st.one_of(constants, st.sampled_from(VARS).map(Var))


def _safe(op):
    """Apply ``op``; constant-zero divisors fall back to the numerator."""

    def run(args):
        try:
            return op(*args)
        except ZeroDenominatorError:
            return args[0]

    return run


def _extend(children):
    return st.one_of(
        st.tuples(children, children).map(_safe(lambda a, b: a + b)),
        st.tuples(children, children).map(_safe(lambda a, b: a - b)),
        st.tuples(children, children).map(_safe(lambda a, b: a * b)),
        st.tuples(children, children).map(_safe(lambda a, b: a / b)),
        st.tuples(children, st.integers(-2, 3)).map(_safe(lambda a, e: a**e)),
    )


expressions = st.recursive(leaves, _extend, max_leaves=6)
polynomial_like = st.recursive(
    leaves,
    lambda c: st.one_of(
        st.tuples(c, c).map(lambda ab: ab[0] + ab[1]),
        st.tuples(c, c).map(lambda ab: ab[0] * ab[1]),
    ),
    max_leaves=5,
)

rationals = st.builds(Fraction, st.integers(-7, 7), st.integers(1, 5))
points = st.fixed_dictionaries({v: st.builds(Fraction, st.integers(-40, 40), st.integers(1, 13)) for v in VARS})


def is_expression(e) -> bool:
    return isinstance(e, Expression)


# -- transformations -------------------------------------------------------------

_coeffs = st.sampled_from([Fraction(1), Fraction(-1), Fraction(2), Fraction(-3), Fraction(1, 2)])


def _monomial(names):
    return st.builds(
        lambda c, es: " * ".join([f"({c})"] + [f"{n}^({e})" for n, e in zip(names, es)]),
        _coeffs,
        st.tuples(*(st.integers(-2, 2) for _ in names)),
    )


def _poly(names, max_terms=2):
    return st.lists(_monomial(names), min_size=1, max_size=max_terms).map(" + ".join)


phis = st.sampled_from(["x", "x^2", "x^3", "1/x", "x + x^3/3", "2*x - x^2"])
fiber_parts = st.tuples(phis, _poly(("x", "y")), st.one_of(st.just("0"), _poly(("x", "y"))))
case_a_psis = _poly(("x", "y", "p")).filter(lambda s: "p^(2)" in s or "p^(-" in s)
