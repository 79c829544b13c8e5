"""Fourth-order equations y4 = f(x, y, p, y2, y3) and their candidate linearizable shapes.

An equation linearizable to u''' = 0 by t = phi(x, y, p), u = psi(x, y, p)
takes one of two shapes.  When phi does not depend on p it is

    y4 + (A1*y2 + A0)*y3 + B3*y2^3 + B2*y2^2 + B1*y2 + B0 = 0        (the "form8" shape)

with A_i, B_j functions of (x, y, p).  Otherwise the right-hand side has a
simple pole ``1/(y2 + r)`` whose residue carries a ``-3*y3^2`` term
(the "form9" shape); only detection is offered for it.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

from tanlin.expr import Expression, normalize, parse
from tanlin.rational import RationalFunction

JET_HIGHER = ("y2", "y3", "y4")
FORM8_NAMES = ("A1", "A0", "B3", "B2", "B1", "B0")


class OdeParseError(ValueError):
    """The equation text is not a fourth-order equation solvable for y4."""


@dataclass(frozen=True)
class OdeInput:
    lhs: Expression
    rhs: Expression
    resolved: RationalFunction  # f in y4 = f(x, y, p, y2, y3)
    text: str = ""


@dataclass(frozen=True)
class Form8Coefficients:
    A1: RationalFunction
    A0: RationalFunction
    B3: RationalFunction
    B2: RationalFunction
    B1: RationalFunction
    B0: RationalFunction

    def __post_init__(self):
        for name in FORM8_NAMES:
            if not getattr(self, name).free_of(*JET_HIGHER):
                raise ValueError(f"{name} must not depend on y2, y3 or y4")

    @classmethod
    def from_values(cls, **values: Union[str, int, RationalFunction, Expression]) -> "Form8Coefficients":
        """Build from any mix of text, numbers and rational functions; omitted entries are 0."""
        from tanlin.expr import as_rational

        return cls(**{n: as_rational(values.get(n, 0)) for n in FORM8_NAMES})

    def as_dict(self) -> dict[str, RationalFunction]:
        return {n: getattr(self, n) for n in FORM8_NAMES}

    def lhs(self) -> RationalFunction:
        """y4 + (A1*y2 + A0)*y3 + B3*y2^3 + B2*y2^2 + B1*y2 + B0."""
        y2, y3, y4 = (RationalFunction.variable(n) for n in JET_HIGHER)
        return (
            y4
            + (self.A1 * y2 + self.A0) * y3
            + self.B3 * y2**3
            + self.B2 * y2**2
            + self.B1 * y2
            + self.B0
        )

    def resolved(self) -> RationalFunction:
        """f with y4 = f."""
        return RationalFunction.variable("y4") - self.lhs()

    def equation_text(self) -> str:
        """Polynomial equation (denominators cleared) in the canonical printed form."""
        lhs = self.lhs()
        numer = RationalFunction(lhs.num)
        return f"{numer} = 0"


@dataclass(frozen=True)
class Form8:
    coefficients: Form8Coefficients
    tag: str = "form8"


@dataclass(frozen=True)
class Form9Detected:
    r: RationalFunction
    tag: str = "form9"


@dataclass(frozen=True)
class NeitherForm:
    reason: str
    tag: str = "neither"


FormTag = Union[Form8, Form9Detected, NeitherForm]


def parse_ode(text: str) -> OdeInput:
    """Parse ``lhs = rhs`` and solve it for y4 (the equation may carry any nonzero factor)."""
    if text.count("=") != 1:
        raise OdeParseError("equation must contain exactly one '='")
    left, right = text.split("=")
    lhs, rhs = parse(left.strip() or "0"), parse(right.strip() or "0")
    return resolve(lhs, rhs, text)


def resolve(lhs: Expression, rhs: Expression, text: str = "") -> OdeInput:
    total = normalize(lhs) - normalize(rhs)
    numer = RationalFunction(total.num)
    degree = numer.degree("y4")
    if degree < 1:
        raise OdeParseError("equation does not contain y4")
    if degree > 1:
        raise OdeParseError("equation is nonlinear in y4")
    c0, c1 = numer.coefficients("y4")
    if c1.is_zero():
        raise OdeParseError("coefficient of y4 vanishes identically")
    return OdeInput(lhs=lhs, rhs=rhs, resolved=-c0 / c1, text=text)


def _polynomial_coefficients(r: RationalFunction, name: str, max_degree: int):
    """Coefficients of ``r`` in ``name`` if it is a polynomial of at most ``max_degree``; else None."""
    if r.den.degree(r.ring.gens[r.names.index(name)]) > 0:
        return None
    coeffs = r.coefficients(name)
    if len(coeffs) > max_degree + 1:
        return None
    zero = RationalFunction.constant(0)
    return coeffs + [zero] * (max_degree + 1 - len(coeffs))


def _try_form8(f: RationalFunction) -> Form8Coefficients | None:
    neg_f = -f
    by_y3 = _polynomial_coefficients(neg_f, "y3", 1)
    if by_y3 is None:
        return None
    free, linear = by_y3
    lin = _polynomial_coefficients(linear, "y2", 1)
    rest = _polynomial_coefficients(free, "y2", 3)
    if lin is None or rest is None:
        return None
    a0, a1 = lin
    b0, b1, b2, b3 = rest
    if not all(c.free_of(*JET_HIGHER) for c in (a0, a1, b0, b1, b2, b3)):
        return None
    return Form8Coefficients(A1=a1, A0=a0, B3=b3, B2=b2, B1=b1, B0=b0)


def _try_form9(f: RationalFunction) -> RationalFunction | None:
    neg_f = -f
    if not (neg_f.free_of("y4") and RationalFunction(neg_f.den).free_of("y3")):
        return None
    den = RationalFunction(neg_f.den)
    den_coeffs = _polynomial_coefficients(den, "y2", 1)
    if den_coeffs is None:
        return None
    d0, d1 = den_coeffs
    if d1.is_zero() or not d0.free_of(*JET_HIGHER) or not d1.free_of(*JET_HIGHER):
        return None
    bracket = RationalFunction(neg_f.num) / d1
    by_y3 = _polynomial_coefficients(bracket, "y3", 2)
    if by_y3 is None or by_y3[2] != RationalFunction.constant(-3):
        return None
    c_part = _polynomial_coefficients(by_y3[1], "y2", 2)
    d_part = _polynomial_coefficients(by_y3[0], "y2", 5)
    if c_part is None or d_part is None:
        return None
    if not all(c.free_of(*JET_HIGHER) for c in c_part + d_part):
        return None
    return d0 / d1


def classify_form(ode: OdeInput) -> FormTag:
    """Decide which candidate shape the equation has; exactly one tag is returned."""
    f = ode.resolved
    coeffs = _try_form8(f)
    if coeffs is not None:
        return Form8(coeffs)
    r = _try_form9(f)
    if r is not None:
        return Form9Detected(r)
    return NeitherForm("right-hand side is neither of the two linearizable shapes")


def extract_form8(ode: OdeInput) -> Form8Coefficients:
    tag = classify_form(ode)
    if not isinstance(tag, Form8):
        raise ValueError("equation is not polynomial of the form8 shape in y2, y3")
    return tag.coefficients
