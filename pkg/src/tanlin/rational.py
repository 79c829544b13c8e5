"""Canonical rational functions over Q in a fixed, ordered set of variables.

A :class:`RationalFunction` is a reduced quotient ``num/den`` of sparse integer
polynomials.  Every constructor brings the pair to canonical form:

* common factors cancelled (multivariate GCD),
* integer coefficients, with the joint content of ``num`` and ``den`` equal to 1,
* the leading coefficient of ``den`` positive under graded-lex order in which
  later variables are more significant (``x < y < p < y2 < y3 < y4``).

Canonical forms are unique, so two equal rational functions print identically
and hash identically.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import gcd, lcm
from typing import Iterable, Mapping, Sequence

from sympy.polys.domains import ZZ
from sympy.polys.orderings import grlex
from sympy.polys.rings import PolyElement, PolyRing

ALPHABET: tuple[str, ...] = ("x", "y", "p", "y2", "y3", "y4")

# D acts on the jet coordinates as x -> 1, y -> p, p -> y2, y2 -> y3, y3 -> y4.
_JET_SUCCESSOR = {"y": "p", "p": "y2", "y2": "y3", "y3": "y4"}


class ZeroDenominatorError(ZeroDivisionError):
    """Raised when a quotient has the zero polynomial as denominator."""


class NotPolynomialError(ValueError):
    """Raised when a coefficient split is requested in a variable that occurs in a denominator."""


@lru_cache(maxsize=None)
def polynomial_ring(names: tuple[str, ...] = ALPHABET) -> PolyRing:
    return PolyRing(names, ZZ, grlex)


def _monomial_key(monom: tuple[int, ...]) -> tuple:
    return (sum(monom), monom[::-1])


def _leading(poly: PolyElement):
    monom = max(poly.keys(), key=_monomial_key)
    return monom, poly[monom]


def _canonical(num: PolyElement, den: PolyElement) -> tuple[PolyElement, PolyElement]:
    if not den:
        raise ZeroDenominatorError("division by the zero polynomial")
    ring = num.ring
    if not num:
        return ring.zero, ring.one
    if den.is_ground:
        c = den.LC
        g = gcd(int(c), *(int(v) for v in num.values()))
        num = num.quo_ground(g)
        den = ring.ground_new(c // g)
    elif num != den:
        num, den = num.cancel(den)
        g = gcd(*(int(v) for v in num.values()), *(int(v) for v in den.values()))
        if g != 1:
            num, den = num.quo_ground(g), den.quo_ground(g)
    else:
        return ring.one, ring.one
    if _leading(den)[1] < 0:
        num, den = -num, -den
    return num, den


def _fraction_parts(value) -> tuple[int, int]:
    value = Fraction(value)
    return value.numerator, value.denominator


class RationalFunction:
    """An immutable element of Q(x, y, p, y2, y3, y4) (or of a larger variable set)."""

    __slots__ = ("num", "den")

    def __init__(self, num: PolyElement, den: PolyElement | None = None, *, _canonical_form=False):
        if den is None:
            den = num.ring.one
        if not _canonical_form:
            num, den = _canonical(num, den)
        object.__setattr__(self, "num", num)
        object.__setattr__(self, "den", den)

    def __setattr__(self, name, value):
        raise AttributeError("RationalFunction is immutable")

    # -- construction -------------------------------------------------
    @classmethod
    def constant(cls, value, names: tuple[str, ...] = ALPHABET) -> "RationalFunction":
        ring = polynomial_ring(names)
        n, d = _fraction_parts(value)
        return cls(ring.ground_new(n), ring.ground_new(d))

    @classmethod
    def variable(cls, name: str, names: tuple[str, ...] = ALPHABET) -> "RationalFunction":
        ring = polynomial_ring(names)
        if name not in names:
            raise KeyError(f"unknown variable {name!r}")
        return cls(ring.gens[names.index(name)], ring.one, _canonical_form=True)

    @property
    def ring(self) -> PolyRing:
        return self.num.ring

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(str(s) for s in self.ring.symbols)

    def _coerce(self, other) -> "RationalFunction":
        if isinstance(other, RationalFunction):
            if other.ring is not self.ring:
                raise TypeError("rational functions live over different variable sets")
            return other
        if isinstance(other, (int, Fraction)):
            n, d = _fraction_parts(other)
            return RationalFunction(self.ring.ground_new(n), self.ring.ground_new(d))
        return NotImplemented

    def lift(self, names: tuple[str, ...]) -> "RationalFunction":
        """Re-express in a variable set containing every variable this function uses."""
        ring = polynomial_ring(names)
        if ring is self.ring:
            return self
        return RationalFunction(self.num.set_ring(ring), self.den.set_ring(ring))

    # -- arithmetic ---------------------------------------------------
    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if self.den == other.den:
            return RationalFunction(self.num + other.num, self.den)
        return RationalFunction(self.num * other.den + other.num * self.den, self.den * other.den)

    __radd__ = __add__

    def __neg__(self):
        return RationalFunction(-self.num, self.den, _canonical_form=True)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other + (-self)

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return RationalFunction(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if not other.num:
            raise ZeroDenominatorError("division by a rational function that is identically zero")
        return RationalFunction(self.num * other.den, self.den * other.num)

    def __rtruediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other / self

    def __pow__(self, exponent: int):
        if not isinstance(exponent, int):
            raise TypeError("only integer powers are supported")
        if exponent >= 0:
            return RationalFunction(self.num**exponent, self.den**exponent, _canonical_form=True)
        if not self.num:
            raise ZeroDenominatorError("negative power of zero")
        return RationalFunction(self.den ** (-exponent), self.num ** (-exponent))

    # -- comparison ---------------------------------------------------
    def is_zero(self) -> bool:
        return not self.num

    def __bool__(self):
        return bool(self.num)

    def __eq__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self.num * other.den == other.num * self.den

    def __hash__(self):
        return hash((self.num, self.den))

    # -- calculus -----------------------------------------------------
    def diff(self, name: str) -> "RationalFunction":
        """Partial derivative with respect to the variable ``name``."""
        if name not in self.names:
            raise KeyError(f"unknown variable {name!r}")
        i = self.names.index(name)
        gen = self.ring.gens[i]
        if self.den.degree(gen) <= 0:
            return RationalFunction(self.num.diff(gen), self.den)
        return RationalFunction(
            self.num.diff(gen) * self.den - self.num * self.den.diff(gen), self.den**2
        )

    def total_derivative(self) -> "RationalFunction":
        """Total x-derivative along a curve y(x): d/dx + p d/dy + y2 d/dp + y3 d/dy2 + y4 d/dy3."""
        if self.depends_on("y4"):
            raise ValueError("total derivative of an expression containing y4 needs y5")
        result = self.diff("x")
        for name, successor in _JET_SUCCESSOR.items():
            if name in self.names and self.depends_on(name):
                result = result + self.diff(name) * RationalFunction.variable(successor, self.names)
        return result

    # -- structure ----------------------------------------------------
    def depends_on(self, name: str) -> bool:
        if name not in self.names:
            return False
        gen = self.ring.gens[self.names.index(name)]
        return self.num.degree(gen) > 0 or self.den.degree(gen) > 0

    def free_of(self, *names: str) -> bool:
        return not any(self.depends_on(n) for n in names)

    @property
    def variables(self) -> tuple[str, ...]:
        return tuple(n for n in self.names if self.depends_on(n))

    def is_constant(self) -> bool:
        return self.num.is_ground and self.den.is_ground

    def coefficients(self, name: str) -> list["RationalFunction"]:
        """Coefficients ``[c0, c1, ..., cd]`` of this function as a polynomial in ``name``."""
        i = self.names.index(name)
        gen = self.ring.gens[i]
        if self.den.degree(gen) > 0:
            raise NotPolynomialError(f"denominator depends on {name}")
        if not self.num:
            return []
        buckets: dict[int, dict] = {}
        for monom, coeff in self.num.items():
            stripped = monom[:i] + (0,) + monom[i + 1:]
            buckets.setdefault(monom[i], {})[stripped] = coeff
        degree = max(buckets)
        out = []
        for k in range(degree + 1):
            terms = buckets.get(k)
            poly = self.ring.from_dict(terms) if terms else self.ring.zero
            out.append(RationalFunction(poly, self.den))
        return out

    def degree(self, name: str) -> int:
        """Degree of the numerator in ``name`` (-1 for the zero function)."""
        if not self.num:
            return -1
        return self.num.degree(self.ring.gens[self.names.index(name)])

    def subs(self, bindings: Mapping[str, "RationalFunction"], names: Sequence[str] | None = None):
        """Simultaneous substitution; the result lives over ``names`` (default: this function's variables)."""
        target = tuple(names) if names is not None else self.names
        values: list[RationalFunction] = []
        for n in self.names:
            if n in bindings:
                values.append(bindings[n].lift(target))
            else:
                values.append(RationalFunction.variable(n, target))
        return _eval_poly(self.num, values, target) / _eval_poly(self.den, values, target)

    def evaluate(self, point: Mapping[str, object]) -> Fraction:
        """Exact value at a point; missing variables must not occur."""
        vals = [Fraction(point[n]) if self.depends_on(n) else Fraction(0) for n in self.names]
        den = _eval_number(self.den, vals)
        if den == 0:
            raise ZeroDenominatorError("denominator vanishes at the evaluation point")
        return _eval_number(self.num, vals) / den

    def compile(self, args: Sequence[str] | None = None):
        """Return a float-valued Python callable taking ``args`` positionally."""
        args = tuple(args) if args is not None else self.names
        missing = [n for n in self.variables if n not in args]
        if missing:
            raise ValueError(f"variables {missing} are not arguments")
        src_num = _poly_source(self.num, self.names)
        src_den = _poly_source(self.den, self.names)
        code = f"lambda {', '.join(args) or '*_'}: ({src_num}) / ({src_den})"
        return eval(code, {"__builtins__": {}})

    # -- printing -----------------------------------------------------
    def __str__(self):
        num = poly_to_str(self.num, self.names)
        if self.den == self.ring.one:
            return num
        den = poly_to_str(self.den, self.names)
        if len(self.num) > 1:
            num = f"({num})"
        if len(self.den) > 1 or _needs_parens_as_divisor(self.den):
            den = f"({den})"
        return f"{num}/{den}"

    def __repr__(self):
        return f"RationalFunction({self})"


def _needs_parens_as_divisor(poly: PolyElement) -> bool:
    ((monom, coeff),) = poly.items()
    factors = sum(1 for e in monom if e) + (coeff != 1)
    return factors > 1


def _sorted_terms(poly: PolyElement):
    return sorted(poly.items(), key=lambda t: _monomial_key(t[0]), reverse=True)


def _monomial_str(monom, names) -> str:
    parts = []
    for n, e in zip(names, monom):
        if e == 1:
            parts.append(n)
        elif e:
            parts.append(f"{n}^{e}")
    return "*".join(parts)


def poly_to_str(poly: PolyElement, names: Sequence[str]) -> str:
    if not poly:
        return "0"
    out = []
    for i, (monom, coeff) in enumerate(_sorted_terms(poly)):
        coeff = int(coeff)
        mono = _monomial_str(monom, names)
        mag = abs(coeff)
        if not mono:
            body = str(mag)
        elif mag == 1:
            body = mono
        else:
            body = f"{mag}*{mono}"
        if i == 0:
            out.append(("-" if coeff < 0 else "") + body)
        else:
            out.append((" - " if coeff < 0 else " + ") + body)
    return "".join(out)


def _poly_source(poly: PolyElement, names: Sequence[str]) -> str:
    if not poly:
        return "0.0"
    terms = []
    for monom, coeff in poly.items():
        factors = [f"{float(int(coeff))!r}"]
        for n, e in zip(names, monom):
            if e == 1:
                factors.append(n)
            elif e:
                factors.append(f"{n}**{e}")
        terms.append("*".join(factors))
    return " + ".join(terms)


def _eval_number(poly: PolyElement, vals: list[Fraction]) -> Fraction:
    total = Fraction(0)
    for monom, coeff in poly.items():
        term = Fraction(int(coeff))
        for v, e in zip(vals, monom):
            if e:
                term *= v**e
        total += term
    return total


def _eval_poly(poly: PolyElement, values: list[RationalFunction], names) -> RationalFunction:
    ring = polynomial_ring(tuple(names))
    total = RationalFunction(ring.zero, ring.one, _canonical_form=True)
    powers: dict[tuple[int, int], RationalFunction] = {}
    for monom, coeff in poly.items():
        term = RationalFunction(ring.ground_new(int(coeff)), ring.one, _canonical_form=True)
        for i, e in enumerate(monom):
            if e:
                key = (i, e)
                if key not in powers:
                    powers[key] = values[i] ** e
                term = term * powers[key]
        total = total + term
    return total


def constant(value, names: tuple[str, ...] = ALPHABET) -> RationalFunction:
    return RationalFunction.constant(value, names)


def variables(names: Iterable[str] = ALPHABET) -> tuple[RationalFunction, ...]:
    names = tuple(names)
    return tuple(RationalFunction.variable(n, names) for n in names)
