"""Expression trees over the jet variables x, y, p (= y'), y2, y3, y4.

Trees are immutable.  Arithmetic on them builds new trees with light local
simplification (flattening, constant folding, dropping 0 and 1); anything
deeper goes through :func:`normalize`, which yields a canonical
:class:`~tanlin.rational.RationalFunction`.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Union

from tanlin.rational import (
    ALPHABET,
    NotPolynomialError,
    RationalFunction,
    ZeroDenominatorError,
)

__all__ = [
    "ALIASES",
    "ALPHABET",
    "Add",
    "Const",
    "Div",
    "Expression",
    "Mul",
    "NotPolynomialError",
    "ParseError",
    "Pow",
    "UnknownIdentifierError",
    "Var",
    "ZeroDenominatorError",
    "from_rational",
    "is_zero",
    "normalize",
    "parse",
    "partial",
    "poly_coefficients",
    "substitute",
    "total_derivative",
]

ALIASES = {
    "y1": "p",
    "y'": "p",
    "y''": "y2",
    "y'''": "y3",
    "y''''": "y4",
}

Operand = Union["Expression", int, Fraction]


class Expression:
    """Base class of expression nodes."""

    __slots__ = ()

    def __add__(self, other: Operand):
        return add(self, _wrap(other))

    def __radd__(self, other: Operand):
        return add(_wrap(other), self)

    def __sub__(self, other: Operand):
        return add(self, neg(_wrap(other)))

    def __rsub__(self, other: Operand):
        return add(_wrap(other), neg(self))

    def __mul__(self, other: Operand):
        return mul(self, _wrap(other))

    def __rmul__(self, other: Operand):
        return mul(_wrap(other), self)

    def __truediv__(self, other: Operand):
        return div(self, _wrap(other))

    def __rtruediv__(self, other: Operand):
        return div(_wrap(other), self)

    def __pow__(self, exponent: int):
        return power(self, exponent)

    def __neg__(self):
        return neg(self)

    def free_variables(self) -> frozenset[str]:
        raise NotImplementedError

    def evaluate(self, env: Mapping[str, Fraction]) -> Fraction:
        """Exact evaluation; raises ZeroDenominatorError on a vanishing divisor."""
        raise NotImplementedError

    def __str__(self):
        return _format(self, 0)


@dataclass(frozen=True, eq=True, repr=True)
class Const(Expression):
    value: Fraction

    def free_variables(self):
        return frozenset()

    def evaluate(self, env):
        return self.value


@dataclass(frozen=True, eq=True, repr=True)
class Var(Expression):
    name: str

    def free_variables(self):
        return frozenset((self.name,))

    def evaluate(self, env):
        return Fraction(env[self.name])


@dataclass(frozen=True, eq=True, repr=True)
class Add(Expression):
    terms: tuple[Expression, ...]

    def free_variables(self):
        return frozenset().union(*(t.free_variables() for t in self.terms))

    def evaluate(self, env):
        return sum((t.evaluate(env) for t in self.terms), Fraction(0))


@dataclass(frozen=True, eq=True, repr=True)
class Mul(Expression):
    factors: tuple[Expression, ...]

    def free_variables(self):
        return frozenset().union(*(f.free_variables() for f in self.factors))

    def evaluate(self, env):
        out = Fraction(1)
        for f in self.factors:
            out *= f.evaluate(env)
        return out


@dataclass(frozen=True, eq=True, repr=True)
class Div(Expression):
    num: Expression
    den: Expression

    def free_variables(self):
        return self.num.free_variables() | self.den.free_variables()

    def evaluate(self, env):
        d = self.den.evaluate(env)
        if d == 0:
            raise ZeroDenominatorError("denominator vanishes at the evaluation point")
        return self.num.evaluate(env) / d


@dataclass(frozen=True, eq=True, repr=True)
class Pow(Expression):
    base: Expression
    exponent: int

    def free_variables(self):
        return self.base.free_variables()

    def evaluate(self, env):
        b = self.base.evaluate(env)
        if b == 0 and self.exponent < 0:
            raise ZeroDenominatorError("negative power of zero")
        return b**self.exponent


ZERO = Const(Fraction(0))
ONE = Const(Fraction(1))


def _wrap(value: Operand) -> Expression:
    if isinstance(value, Expression):
        return value
    if isinstance(value, (int, Fraction)):
        return Const(Fraction(value))
    raise TypeError(f"cannot use {type(value).__name__} in an expression")


# -- smart constructors -----------------------------------------------------


def add(*terms: Expression) -> Expression:
    flat: list[Expression] = []
    const = Fraction(0)
    for t in terms:
        for s in t.terms if isinstance(t, Add) else (t,):
            if isinstance(s, Const):
                const += s.value
            else:
                flat.append(s)
    if const:
        flat.append(Const(const))
    if not flat:
        return ZERO
    if len(flat) == 1:
        return flat[0]
    return Add(tuple(flat))


def mul(*factors: Expression) -> Expression:
    flat: list[Expression] = []
    const = Fraction(1)
    for f in factors:
        for s in f.factors if isinstance(f, Mul) else (f,):
            if isinstance(s, Const):
                const *= s.value
            else:
                flat.append(s)
    if const == 0:
        return ZERO
    if const != 1:
        flat.insert(0, Const(const))
    if not flat:
        return ONE
    if len(flat) == 1:
        return flat[0]
    return Mul(tuple(flat))


def neg(e: Expression) -> Expression:
    return mul(Const(Fraction(-1)), e)


def div(num: Expression, den: Expression) -> Expression:
    if isinstance(den, Const):
        if den.value == 0:
            raise ZeroDenominatorError("division by the constant 0")
        return mul(Const(1 / den.value), num)
    if num == ZERO:
        return ZERO
    return Div(num, den)


def power(base: Expression, exponent: int) -> Expression:
    if not isinstance(exponent, int):
        raise TypeError("only integer exponents are supported")
    if exponent == 0:
        return ONE
    if exponent == 1:
        return base
    if isinstance(base, Const):
        if base.value == 0 and exponent < 0:
            raise ZeroDenominatorError("negative power of zero")
        return Const(base.value**exponent)
    return Pow(base, exponent)


# -- parsing ----------------------------------------------------------------


class ParseError(ValueError):
    """Malformed expression text; ``offset`` is the 0-based character position."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"syntax error at offset {offset}: {message}")
        self.offset = offset


class UnknownIdentifierError(ParseError):
    def __init__(self, name: str, offset: int):
        ValueError.__init__(self, f"unknown identifier {name!r} at offset {offset}")
        self.offset = offset
        self.name = name


_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z0-9_]*'*)|(\*\*|[-+*/^()]))")


def _tokenize(text: str):
    pos = 0
    tokens = []
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            if text[pos:].strip() == "":
                break
            raise ParseError(f"unexpected character {text[pos]!r}", pos)
        start = m.start(m.lastindex)
        if m.group(1) is not None:
            tokens.append(("num", m.group(1), start))
        elif m.group(2) is not None:
            tokens.append(("id", m.group(2), start))
        else:
            op = m.group(3)
            tokens.append(("op", "^" if op == "**" else op, start))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str, names: tuple[str, ...]):
        self.tokens = _tokenize(text)
        self.i = 0
        self.names = names

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect_op(self, op):
        kind, val, pos = self.take()
        if kind != "op" or val != op:
            raise ParseError(f"expected {op!r}", pos)

    def parse(self) -> Expression:
        e = self.sum()
        kind, val, pos = self.peek()
        if kind != "end":
            raise ParseError(f"unexpected {val!r}", pos)
        return e

    def sum(self):
        e = self.product()
        while self.peek()[0] == "op" and self.peek()[1] in "+-":
            op = self.take()[1]
            rhs = self.product()
            e = e + rhs if op == "+" else e - rhs
        return e

    def product(self):
        e = self.unary()
        while self.peek()[0] == "op" and self.peek()[1] in "*/":
            op, pos = self.take()[1:]
            rhs = self.unary()
            if op == "*":
                e = e * rhs
            else:
                if rhs == ZERO:
                    raise ParseError("division by the literal 0", pos)
                e = div(e, rhs)
        return e

    def unary(self):
        kind, val, _ = self.peek()
        if kind == "op" and val in "+-":
            self.take()
            operand = self.unary()
            return neg(operand) if val == "-" else operand
        return self.power()

    def power(self):
        e = self.primary()
        while self.peek()[0] == "op" and self.peek()[1] == "^":
            self.take()
            pos = self.peek()[2]
            sign = 1
            while self.peek()[0] == "op" and self.peek()[1] in "+-":
                if self.take()[1] == "-":
                    sign = -sign
            exponent = self.primary()
            if not isinstance(exponent, Const) or exponent.value.denominator != 1:
                raise ParseError("exponent must be an integer constant", pos)
            e = power(e, sign * int(exponent.value))
        return e

    def primary(self):
        kind, val, pos = self.take()
        if kind == "num":
            return Const(Fraction(int(val)))
        if kind == "id":
            name = ALIASES.get(val, val)
            if name not in self.names:
                raise UnknownIdentifierError(val, pos)
            return Var(name)
        if kind == "op" and val == "(":
            e = self.sum()
            self.expect_op(")")
            return e
        if kind == "end":
            raise ParseError("unexpected end of input", pos)
        raise ParseError(f"unexpected {val!r}", pos)


def parse(text: str, names: tuple[str, ...] = ALPHABET) -> Expression:
    """Parse ``text`` with precedence ``^`` > unary minus > ``* /`` > ``+ -``.

    All binary operators associate to the left, ``^`` included; exponents must
    be integer constants.  ``y1`` and ``y'`` are accepted for ``p``, and
    ``y''``, ``y'''``, ``y''''`` for ``y2``, ``y3``, ``y4``.
    """
    return _Parser(text, names).parse()


# -- printing ---------------------------------------------------------------

_PREC_SUM, _PREC_PRODUCT, _PREC_UNARY, _PREC_POWER, _PREC_ATOM = 1, 2, 3, 4, 5


def _const_str(v: Fraction) -> tuple[str, int]:
    if v.denominator == 1:
        return (str(v.numerator), _PREC_ATOM if v >= 0 else _PREC_UNARY)
    return (f"{v.numerator}/{v.denominator}", _PREC_PRODUCT)


def _format(e: Expression, ctx: int) -> str:
    text, prec = _format_prec(e)
    return f"({text})" if prec < ctx else text


def _format_prec(e: Expression) -> tuple[str, int]:
    if isinstance(e, Const):
        return _const_str(e.value)
    if isinstance(e, Var):
        return e.name, _PREC_ATOM
    if isinstance(e, Add):
        out = _format(e.terms[0], _PREC_SUM)
        for t in e.terms[1:]:
            if isinstance(t, Mul) and isinstance(t.factors[0], Const) and t.factors[0].value < 0:
                out += " - " + _format(mul(Const(-t.factors[0].value), *t.factors[1:]), _PREC_PRODUCT + 1)
            elif isinstance(t, Const) and t.value < 0:
                out += " - " + _format(Const(-t.value), _PREC_PRODUCT + 1)
            else:
                out += " + " + _format(t, _PREC_SUM + 1)
        return out, _PREC_SUM
    if isinstance(e, Mul):
        first = e.factors[0]
        if isinstance(first, Const) and first.value == -1:
            return "-" + _format(mul(*e.factors[1:]), _PREC_POWER), _PREC_UNARY
        return "*".join(_format(f, _PREC_PRODUCT + (i > 0)) for i, f in enumerate(e.factors)), _PREC_PRODUCT
    if isinstance(e, Div):
        return f"{_format(e.num, _PREC_PRODUCT)}/{_format(e.den, _PREC_PRODUCT + 1)}", _PREC_PRODUCT
    if isinstance(e, Pow):
        exp = str(e.exponent) if e.exponent >= 0 else f"({e.exponent})"
        return f"{_format(e.base, _PREC_ATOM)}^{exp}", _PREC_POWER
    raise TypeError(type(e))


# -- calculus ---------------------------------------------------------------


def partial(e: Expression, v: str) -> Expression:
    """Symbolic partial derivative of ``e`` with respect to the variable ``v``."""
    if isinstance(e, Const):
        return ZERO
    if isinstance(e, Var):
        return ONE if e.name == v else ZERO
    if v not in e.free_variables():
        return ZERO
    if isinstance(e, Add):
        return add(*(partial(t, v) for t in e.terms))
    if isinstance(e, Mul):
        terms = []
        for i, f in enumerate(e.factors):
            df = partial(f, v)
            if df != ZERO:
                terms.append(mul(*e.factors[:i], df, *e.factors[i + 1:]))
        return add(*terms)
    if isinstance(e, Div):
        dn, dd = partial(e.num, v), partial(e.den, v)
        if dd == ZERO:
            return div(dn, e.den)
        return div(add(mul(dn, e.den), neg(mul(e.num, dd))), power(e.den, 2))
    if isinstance(e, Pow):
        return mul(Const(Fraction(e.exponent)), power(e.base, e.exponent - 1), partial(e.base, v))
    raise TypeError(type(e))


_D_IMAGE = {"x": ONE, "y": Var("p"), "p": Var("y2"), "y2": Var("y3"), "y3": Var("y4")}


def total_derivative(e: Expression) -> Expression:
    """Apply D = d/dx + p d/dy + y2 d/dp + y3 d/dy2 + y4 d/dy3."""
    if "y4" in e.free_variables():
        raise ValueError("total derivative of an expression containing y4 needs y5")
    return add(*(mul(image, partial(e, v)) for v, image in _D_IMAGE.items()))


def substitute(e: Expression, bindings: Mapping[str, Expression]) -> Expression:
    """Replace variables simultaneously (each occurrence sees the original bindings)."""
    if not bindings:
        return e
    if isinstance(e, Const):
        return e
    if isinstance(e, Var):
        return _wrap(bindings[e.name]) if e.name in bindings else e
    if isinstance(e, Add):
        return add(*(substitute(t, bindings) for t in e.terms))
    if isinstance(e, Mul):
        return mul(*(substitute(f, bindings) for f in e.factors))
    if isinstance(e, Div):
        return div(substitute(e.num, bindings), substitute(e.den, bindings))
    if isinstance(e, Pow):
        return power(substitute(e.base, bindings), e.exponent)
    raise TypeError(type(e))


# -- canonical form ---------------------------------------------------------


def normalize(e: Expression, names: tuple[str, ...] = ALPHABET) -> RationalFunction:
    """Expand ``e`` into a single canonical fraction of polynomials."""
    if isinstance(e, Const):
        return RationalFunction.constant(e.value, names)
    if isinstance(e, Var):
        return RationalFunction.variable(e.name, names)
    if isinstance(e, Add):
        out = RationalFunction.constant(0, names)
        for t in e.terms:
            out = out + normalize(t, names)
        return out
    if isinstance(e, Mul):
        out = RationalFunction.constant(1, names)
        for f in e.factors:
            out = out * normalize(f, names)
        return out
    if isinstance(e, Div):
        return normalize(e.num, names) / normalize(e.den, names)
    if isinstance(e, Pow):
        return normalize(e.base, names) ** e.exponent
    raise TypeError(type(e))


def is_zero(e: Expression) -> bool:
    return normalize(e).is_zero()


def from_rational(r: RationalFunction) -> Expression:
    """Expression tree for a canonical rational function (numerator over denominator)."""
    names = r.names

    def poly_expr(poly) -> Expression:
        terms = []
        for monom, coeff in poly.items():
            factors = [Const(Fraction(int(coeff)))]
            factors += [power(Var(n), k) for n, k in zip(names, monom) if k]
            terms.append(mul(*factors))
        return add(*terms)

    return div(poly_expr(r.num), poly_expr(r.den))


def poly_coefficients(e: Expression, v: str) -> list[Expression]:
    """Coefficients [c0, ..., cd] of ``e`` as a polynomial in ``v``; trailing zeros trimmed."""
    return [from_rational(c) for c in normalize(e).coefficients(v)]


def as_rational(value: Union[Expression, RationalFunction, str, int, Fraction]) -> RationalFunction:
    """Accept any of the user-facing encodings and return the canonical form."""
    if isinstance(value, RationalFunction):
        return value
    if isinstance(value, str):
        return normalize(parse(value))
    if isinstance(value, (int, Fraction)):
        return RationalFunction.constant(value)
    return normalize(value)

