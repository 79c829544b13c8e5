"""Derived quantities of a form8 equation used by the linearization test.

All values are exact rational functions.  Optional members are ``None`` when
the quantity is undefined for the equation at hand (wrong branch, or a guard
such as mu5 != 0 fails).
"""

from __future__ import annotations

from dataclasses import dataclass, fields, replace
from typing import Optional

from tanlin.ode_form import JET_HIGHER, Form8Coefficients
from tanlin.rational import RationalFunction
from tanlin.transform import derivative as d

RF = RationalFunction
P = RationalFunction.variable("p")

# Names of the structural conditions of the A1 = 0 branch, in report order.
STRUCTURAL = ("suff:09", "suff:11", "suff:10", "suff:12", "suff:13", "suff:14", "suff:15")


class InvariantError(ValueError):
    pass


@dataclass(frozen=True)
class DerivedInvariants:
    delta: RF
    fiber_gate: RF
    mu1: RF
    mu2: RF
    mu3: Optional[RF] = None
    mu4: Optional[RF] = None
    a00: Optional[RF] = None
    b10: Optional[RF] = None
    b00: Optional[RF] = None
    b01: Optional[RF] = None
    b02: Optional[RF] = None
    mu5: Optional[RF] = None
    mu6: Optional[RF] = None
    mu7: Optional[RF] = None
    mu8: Optional[RF] = None
    mu9: Optional[RF] = None
    mu10: Optional[RF] = None
    mu11: Optional[RF] = None
    # (name, residual) for each structural condition of the A1 = 0 branch
    structural: tuple[tuple[str, RF], ...] = ()

    def values(self) -> dict[str, RF]:
        """Populated scalar members by name."""
        return {
            f.name: getattr(self, f.name)
            for f in fields(self)
            if f.name != "structural" and getattr(self, f.name) is not None
        }

    @property
    def structure_ok(self) -> bool:
        return bool(self.structural) and all(r.is_zero() for _, r in self.structural)


def _first_nonzero(*residuals: RF) -> RF:
    for r in residuals:
        if not r.is_zero():
            return r
    return residuals[0]


def _check_free(name: str, value: RF, *, p_free: bool = False):
    banned = JET_HIGHER + (("p",) if p_free else ())
    if not value.free_of(*banned):
        raise InvariantError(f"{name} depends on {', '.join(v for v in banned if value.depends_on(v))}")


def compute_base(c: Form8Coefficients) -> DerivedInvariants:
    A1, A0, B3, B2 = c.A1, c.A0, c.B3, c.B2
    delta = 20 * A1.diff("p") + 7 * A1**2 - 60 * B3
    gate = 3 * A1.diff("p") + A1**2 - 9 * B3
    mu1 = (3 * A0.diff("p") + A0 * A1 - 3 * B2) / 3
    mu2 = 3 * A1.diff("x") + 3 * A1.diff("y") * P + A0 * A1 - 3 * B2 + 9 * mu1
    for name, v in (("delta", delta), ("fiber_gate", gate), ("mu1", mu1), ("mu2", mu2)):
        _check_free(name, v)
    return DerivedInvariants(delta=delta, fiber_gate=gate, mu1=mu1, mu2=mu2)


def compute_case_a(c: Form8Coefficients, base: DerivedInvariants) -> tuple[RF, RF]:
    """mu3 and mu4 of the A1 != 0 branch."""
    A1, A0, B2, B1, B0 = c.A1, c.A0, c.B2, c.B1, c.B0
    if A1.is_zero():
        raise InvariantError("mu3 and mu4 are defined only for A1 != 0")
    mu1, mu2 = base.mu1, base.mu2
    p = P

    mu3 = (
        -9 * A0.diff("y") * A1
        + 3 * B1.diff("p") * A1
        - 3 * B2.diff("x") * A1
        - 3 * B2.diff("y") * A1 * p
        + 9 * mu1.diff("x") * A1
        + 9 * mu1.diff("y") * A1 * p
        - A0 * A1 * B2
        - 6 * A0 * A1 * mu1
        + A1**2 * B1
        + B2 * mu2
        - 3 * mu1 * mu2
    ) / (2 * A1**2)

    A0x, A0y = A0.diff("x"), A0.diff("y")
    m1x, m1y = mu1.diff("x"), mu1.diff("y")
    mu4 = (
        6 * d(A0, "xy") * A1 * p**2
        + 6 * d(A0, "xx") * A1 * p
        + 7 * A0x * A0 * A1 * p
        - 6 * A0x * A1 * mu1 * p**2
        - 4 * A0x * mu2 * p
        - 4 * d(A0, "yy") * A1 * p**3
        + 5 * A0y * A0 * A1 * p**2
        - 14 * A0y * A1 * mu1 * p**3
        - 2 * A0y * mu2 * p**2
        - 6 * B1.diff("x") * A1 * p
        + 12 * d(mu1, "xy") * A1 * p**3
        - 6 * m1x * A0 * A1 * p**2
        + 24 * m1x * A1 * mu1 * p**3
        + 12 * d(mu1, "yy") * A1 * p**4
        - 6 * m1y * A0 * A1 * p**3
        + 24 * m1y * A1 * mu1 * p**4
        - 4 * m1y * mu2 * p**3
        + 12 * mu3.diff("x") * A1 * p
        + A0**3 * A1 * p
        - 2 * A0**2 * A1 * mu1 * p**2
        - A0**2 * mu2 * p
        - 3 * A0 * A1 * B1 * p
        + 6 * A0 * A1 * mu3 * p
        + 2 * A0 * mu1 * mu2 * p**2
        + 4 * A1 * B0
        + 6 * A1 * B1 * mu1 * p**2
        - 12 * A1 * mu1 * mu3 * p**2
        + 2 * B1 * mu2 * p
        - 4 * mu1**2 * mu2 * p**3
        - 12 * mu2 * mu3 * p
    ) / (2 * A1)
    _check_free("mu3", mu3)
    _check_free("mu4", mu4)
    return mu3, mu4


def split_a1_zero(c: Form8Coefficients, base: DerivedInvariants) -> DerivedInvariants:
    """Peel the p-dependence off A0, B1 and B0 when A1 = 0.

    The functions A00, B10, B00, B01, B02 are always returned; they are
    functions of (x, y) alone exactly when the matching structural residual
    vanishes.
    """
    if not c.A1.is_zero():
        raise InvariantError("the structural split applies only when A1 = 0")
    A0, B3, B2, B1, B0 = c.A0, c.B3, c.B2, c.B1, c.B0
    p = P
    B2x, B2y = B2.diff("x"), B2.diff("y")

    a00 = A0 - 4 * p * B2 / 3
    A00y = a00.diff("y")
    b10 = B1 - (9 * A00y * p + 6 * B2y * p**2 + 3 * a00 * B2 * p + 2 * B2**2 * p**2) / 3
    rest = B0 - (
        27 * d(a00, "yy") * p**3
        + 18 * A00y * B2 * p**3
        + 9 * d(B2, "yy") * p**4
        + 9 * B2y * a00 * p**3
        + 9 * B2y * B2 * p**4
        + 3 * a00 * B2**2 * p**3
        + B2**3 * p**4
    ) / 27
    b02 = d(rest, "pp") / 2
    b01 = rest.diff("p") - 2 * b02 * p
    b00 = rest - b01 * p - b02 * p**2

    structural = (
        ("suff:09", base.mu2),
        ("suff:11", base.mu1 - B2 / 3),
        ("suff:10", _first_nonzero(B3, A0.diff("p") - 4 * B2 / 3)),
        ("suff:12", _first_nonzero(a00.diff("p"), B2.diff("p"))),
        ("suff:13", b10.diff("p")),
        ("suff:14", d(rest, "ppp")),
        ("suff:15", b10.diff("y") - (3 * b02 - b10 * B2) / 3),
    )
    out = replace(base, a00=a00, b10=b10, b00=b00, b01=b01, b02=b02, structural=structural)
    if out.structure_ok:
        for name in ("a00", "b10", "b00", "b01", "b02"):
            _check_free(name, getattr(out, name), p_free=True)
    return out


def compute_mu5_to_mu11(c: Form8Coefficients, inv: DerivedInvariants) -> DerivedInvariants:
    """mu5..mu11, each populated only where its defining guard holds."""
    if not inv.structure_ok:
        raise InvariantError("mu5..mu11 need A1 = 0 and every structural condition satisfied")
    B2 = c.B2
    A00, B10, B00, B01, B02 = inv.a00, inv.b10, inv.b00, inv.b01, inv.b02
    A00x = A00.diff("x")
    B2x = B2.diff("x")
    B10x = B10.diff("x")

    mu5 = 3 * (-3 * A00.diff("y") + 4 * B2x)
    mu6 = None
    if not mu5.is_zero():
        mu6 = (6 * d(B2, "xx") + 3 * B2x * A00 - 3 * B02 + B10 * B2 - mu5.diff("x")) / mu5

    mu7 = -4 * d(A00, "xx") - 6 * A00x * A00 + 8 * B10x - A00**3 + 4 * A00 * B10 - 8 * B01
    mu7x = mu7.diff("x")
    mu8 = (
        3456 * A00x**2
        + 1728 * A00x * A00**2
        - 8448 * A00x * B10
        - 38400 * B00.diff("y")
        + 15360 * B01.diff("x")
        - 3840 * d(B10, "xx")
        - 1920 * B10x * A00
        - 1320 * mu7x
        + 216 * A00**4
        - 2112 * A00**2 * B10
        + 3840 * A00 * B01
        + 855 * A00 * mu7
        - 12800 * B00 * B2
        + 3456 * B10**2
    )
    mu9 = (
        1503 * A00x * mu7
        - 360 * d(mu7, "xx")
        + 1575 * mu7x * A00
        - mu8.diff("x")
        - 1278 * A00**2 * mu7
        + 2 * A00 * mu8
        - 792 * B10 * mu7
    )

    mu10 = mu11 = None
    if not mu7.is_zero():
        mu10 = (
            -6191640 * A00x * mu7**2
            - 2520 * mu7x * mu8
            + 2520 * mu8.diff("x") * mu7
            + 1131165 * A00**2 * mu7**2
            - 1890 * A00 * mu7 * mu8
            + 952560 * B10 * mu7**2
            - 630 * mu7 * mu9
            + mu8**2
        )
        if not mu10.is_zero():
            mu11 = eq12_remainder(A00, B10, B01, mu7, mu8, mu9) / (8 * mu10)

    out = replace(inv, mu5=mu5, mu6=mu6, mu7=mu7, mu8=mu8, mu9=mu9, mu10=mu10, mu11=mu11)
    for name, value in out.values().items():
        if name.startswith("mu") and name not in ("mu1", "mu2", "mu3", "mu4"):
            _check_free(name, value, p_free=True)
    return out


def eq12_remainder(A00, B10, B01, mu7, mu8, mu9) -> RF:
    """Right-hand side of the identity that defines 8*mu10*mu11.

    With mu10 = 0 the same expression must vanish; divided by 3810240*mu7^2
    and rearranged it is the B10_x condition of the mu10 = 0 sub-case.
    """
    A00x = A00.diff("x")
    return (
        3333960 * A00x * A00 * mu7**2
        + 7560 * A00x * mu7 * mu8
        - 3810240 * B10.diff("x") * mu7**2
        + 2520 * mu7.diff("x") * mu9
        - 2520 * mu9.diff("x") * mu7
        - 952560 * A00**3 * mu7**2
        + 793800 * A00 * B10 * mu7**2
        + 2835 * A00 * mu7 * mu9
        + 2540160 * B01 * mu7**2
        - 2520 * B10 * mu7 * mu8
        - 952560 * mu7**3
        - mu8 * mu9
    )


def compute_invariants(c: Form8Coefficients) -> DerivedInvariants:
    """Everything that is defined for ``c``: the base four, then the A1 != 0 or A1 = 0 tower."""
    inv = compute_base(c)
    if not c.A1.is_zero():
        mu3, mu4 = compute_case_a(c, inv)
        return replace(inv, mu3=mu3, mu4=mu4)
    inv = split_a1_zero(c, inv)
    if inv.structure_ok:
        inv = compute_mu5_to_mu11(c, inv)
    return inv
