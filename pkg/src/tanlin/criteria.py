"""Case dispatch and sufficient conditions for linearization by t = phi(x).

Each condition is stored once, in :data:`CONDITIONS`, as a function returning
``lhs - rhs`` of the published identity.  A condition holds when that residual
is identically zero.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Callable

from tanlin.invariants import STRUCTURAL, DerivedInvariants, eq12_remainder
from tanlin.ode_form import Form8Coefficients
from tanlin.rational import RationalFunction
from tanlin.transform import derivative as d

RF = RationalFunction
P = RationalFunction.variable("p")


class CaseTag(str, enum.Enum):
    A = "A"
    B = "B"
    C = "C"
    D = "D"
    E = "E"
    F = "F"
    GATE_FAILED = "GateFailed"
    STRUCTURE_FAILED = "StructureFailed"
    NOT_FORM8 = "NotForm8"

    @property
    def linearizing_case(self) -> bool:
        return self.value in "ABCDEF"


@dataclass(frozen=True)
class Condition:
    name: str
    residual: RF
    passed: bool

    def to_dict(self) -> dict:
        return {"name": self.name, "passed": self.passed, "residual": str(self.residual)}


@dataclass(frozen=True)
class CriteriaReport:
    case: CaseTag
    conditions: tuple[Condition, ...]
    verdict: bool
    notes: tuple[str, ...] = field(default=())

    @property
    def failing(self) -> list[str]:
        return [c.name for c in self.conditions if not c.passed]

    def to_dict(self) -> dict:
        return {
            "case": self.case.value,
            "verdict": self.verdict,
            "conditions": [c.to_dict() for c in self.conditions],
            "notes": list(self.notes),
        }


# -- A1 != 0 ---------------------------------------------------------------


def _suff01(c, v):
    A1, A0 = c.A1, c.A0
    mu1, mu2 = v.mu1, v.mu2
    rhs = (
        A0.diff("y") * A1**2
        + A1.diff("y") * mu2
        - 3 * mu1.diff("x") * A1**2
        - 3 * mu1.diff("y") * A1**2 * P
    ) / A1
    return mu2.diff("y") - rhs


def _suff02(c, v):
    return v.mu1.diff("p") - c.A1.diff("y") / 3


def _suff03(c, v):
    A1, A0, B3, B2 = c.A1, c.A0, c.B3, c.B2
    rhs = (
        6 * A1.diff("y") * A1
        + 9 * B3.diff("x") * A1
        + 9 * B3.diff("y") * A1 * P
        + 3 * A0 * A1 * B3
        - A1**2 * B2
        + 6 * A1**2 * v.mu1
        - 3 * B3 * v.mu2
    ) / (3 * A1)
    return B2.diff("p") - rhs


def _suff04(c, v):
    # both mu3_y and mu3_p must vanish; report the first that does not
    my, mp = v.mu3.diff("y"), v.mu3.diff("p")
    return my if not my.is_zero() else mp


def _suff06(c, v):
    A1, A0, B2, B1 = c.A1, c.A0, c.B2, c.B1
    mu1, mu2, mu3 = v.mu1, v.mu2, v.mu3
    p = P
    rhs = (
        -3 * A0.diff("x") * A1**2
        - 9 * A0.diff("y") * A1**2 * p
        - 6 * A1.diff("y") * mu2 * p
        + 18 * mu1.diff("x") * A1**2 * p
        + 18 * mu1.diff("y") * A1**2 * p**2
        - A0**2 * A1**2
        - 3 * A0 * A1 * mu2
        + 3 * A1**2 * B1
        - 6 * A1**2 * mu3
        + 6 * B2 * mu2
        - 18 * mu1 * mu2
        + 4 * mu2**2
    ) / (6 * A1)
    return mu2.diff("x") - rhs


def _suff07(c, v):
    A1, A0, B1, B0 = c.A1, c.A0, c.B1, c.B0
    mu1, mu2, mu3, mu4 = v.mu1, v.mu2, v.mu3, v.mu4
    p = P
    A0x, A0y = A0.diff("x"), A0.diff("y")
    m1x, m1y = mu1.diff("x"), mu1.diff("y")
    rhs = (
        -18 * A0x * A1 * mu1 * p**2
        - 6 * A0y * A0 * A1 * p**2
        + 18 * A0y * A1 * mu1 * p**3
        + 6 * A0y * mu2 * p**2
        + 12 * B0.diff("p") * A1 * p
        + 6 * B1.diff("x") * A1 * p
        - 6 * B1.diff("y") * A1 * p**2
        + 36 * d(mu1, "xy") * A1 * p**3
        - 18 * m1x * A0 * A1 * p**2
        + 72 * m1x * A1 * mu1 * p**3
        + 6 * d(mu1, "yy") * A1 * p**4
        + 12 * m1y * A0 * A1 * p**3
        - 18 * m1y * A1 * mu1 * p**4
        - 12 * m1y * mu2 * p**3
        + 6 * mu3.diff("x") * A1 * p
        - 15 * mu4.diff("p") * A1 * p
        - 6 * A0**2 * A1 * mu1 * p**2
        + 2 * A0 * A1 * B1 * p
        + 30 * A0 * A1 * mu1**2 * p**3
        + 8 * A0 * A1 * mu3 * p
        + 6 * A0 * mu1 * mu2 * p**2
        + 4 * A1**2 * B0 * p
        - 5 * A1**2 * mu4 * p
        - 18 * A1 * B0
        - 12 * A1 * B1 * mu1 * p**2
        - 30 * A1 * mu1**3 * p**4
        - 36 * A1 * mu1 * mu3 * p**2
        + 9 * A1 * mu4
        - 2 * B1 * mu2 * p
        - 12 * mu1**2 * mu2 * p**3
        + 4 * mu2 * mu3 * p
    ) / (18 * A1 * p**2)
    return d(A0, "xy") - rhs


def _suff08(c, v):
    A1, A0, B2, B1, B0 = c.A1, c.A0, c.B2, c.B1, c.B0
    mu1, mu2, mu3, mu4 = v.mu1, v.mu2, v.mu3, v.mu4
    p = P
    A1y = A1.diff("y")
    B0p = B0.diff("p")
    m1x, m1y, m1yy = mu1.diff("x"), mu1.diff("y"), d(mu1, "yy")
    m4p = mu4.diff("p")
    rhs = (
        12 * A0.diff("x") * A1 * mu3
        + 24 * A0.diff("y") * A1 * mu3 * p
        - 2 * A1y * A1 * B0 * p
        + A1y * A1 * mu4 * p
        - 6 * d(B0, "px") * A1
        - 12 * d(B0, "py") * A1 * p
        - 2 * B0p * A0 * A1
        - 6 * B0p * A1 * mu1 * p
        + 2 * B0p * mu2
        - 2 * B0.diff("x") * A1**2
        - 4 * B0.diff("y") * A1**2 * p
        + 18 * B0.diff("y") * A1
        + 6 * d(B1, "xy") * A1 * p
        + 6 * B1.diff("x") * A1 * mu1 * p
        + 6 * d(B1, "yy") * A1 * p**2
        + 2 * B1.diff("y") * A0 * A1 * p
        + 6 * B1.diff("y") * A1 * mu1 * p**2
        - 2 * B1.diff("y") * mu2 * p
        - 12 * d(mu1, "xyy") * A1 * p**3
        - 36 * d(mu1, "xy") * A1 * mu1 * p**3
        - 36 * m1x * m1y * A1 * p**3
        + 6 * m1x * A1 * B1 * p
        - 36 * m1x * A1 * mu1**2 * p**3
        - 36 * m1x * A1 * mu3 * p
        - 4 * m1yy * A0 * A1 * p**3
        - 12 * m1yy * A1 * mu1 * p**4
        + 4 * m1yy * mu2 * p**3
        - 18 * m1y**2 * A1 * p**4
        - 12 * m1y * A0 * A1 * mu1 * p**3
        + 6 * m1y * A1 * B1 * p**2
        - 24 * m1y * A1 * mu3 * p**2
        + 12 * m1y * mu1 * mu2 * p**3
        - 6 * mu3.diff("x") * mu2
        + 3 * d(mu4, "px") * A1
        + 6 * d(mu4, "py") * A1 * p
        + m4p * A0 * A1
        + 3 * m4p * A1 * mu1 * p
        - m4p * mu2
        + mu4.diff("x") * A1**2
        + 2 * mu4.diff("y") * A1**2 * p
        + 4 * A0**2 * A1 * mu3
        + 2 * A0 * A1 * B1 * mu1 * p
        - 4 * A0 * A1 * mu1**3 * p**3
        - 4 * A0 * mu2 * mu3
        - 2 * A1**2 * B0 * mu1 * p
        + A1**2 * mu1 * mu4 * p
        - 2 * A1 * B0 * B2
        + 24 * A1 * B0 * mu1
        - 12 * A1 * B1 * mu3
        + A1 * B2 * mu4
        + 6 * A1 * mu1**4 * p**4
        + 12 * A1 * mu1**2 * mu3 * p**2
        - 3 * A1 * mu1 * mu4
        + 24 * A1 * mu3**2
        - 2 * B1 * mu1 * mu2 * p
        + 4 * mu1**3 * mu2 * p**3
        + 12 * mu1 * mu2 * mu3 * p
    ) / (6 * A1 * p**4)
    return d(mu1, "yyy") - rhs


# -- A1 = 0, mu5 != 0 ---------------------------------------------------------


def _suff16(c, v):
    return 3 * v.mu6.diff("y") - c.B2.diff("x")


def _suff17(c, v):
    A00, B10, B01, mu6 = v.a00, v.b10, v.b01, v.mu6
    A00x, m6x = A00.diff("x"), mu6.diff("x")
    rhs = (
        3 * d(A00, "xx")
        - 6 * A00x * A00
        + 21 * A00x * mu6
        + B10.diff("x")
        + 15 * m6x * A00
        - 60 * m6x * mu6
        - 6 * A00**2 * mu6
        + 2 * A00 * B10
        + 30 * A00 * mu6**2
        - 2 * B01
        - 4 * B10 * mu6
        - 40 * mu6**3
    ) / 10
    return d(mu6, "xx") - rhs


def _suff26(c, v):
    B2 = c.B2
    A00, B10, B01, B02, mu5, mu6 = v.a00, v.b10, v.b01, v.b02, v.mu5, v.mu6
    A00x, m5x, m6x, m6y = A00.diff("x"), mu5.diff("x"), mu6.diff("x"), mu6.diff("y")
    rhs = (
        -36 * A00x * m6y
        + 6 * A00x * mu5
        - 18 * B01.diff("y")
        + 12 * B02.diff("x")
        - 4 * B10.diff("x") * B2
        + m5x * A00
        - 8 * m5x * mu6
        - 14 * m6x * mu5
        - 9 * m6y * A00**2
        + 24 * m6y * B10
        + 3 * A00 * B02
        - A00 * B10 * B2
        + 7 * A00 * mu5 * mu6
        - 2 * B10 * mu5
        - 18 * mu5 * mu6**2
    ) / 2
    return d(mu5, "xx") - rhs


def _suff19(c, v):
    B2 = c.B2
    A00, B10, B00, B01, mu6 = v.a00, v.b10, v.b00, v.b01, v.mu6
    A00x, A00xx = A00.diff("x"), d(A00, "xx")
    B10x, m6x = B10.diff("x"), mu6.diff("x")
    return (
        -9 * A00xx * A00
        - 18 * A00xx * mu6
        + 72 * A00x**2
        - 432 * A00x * m6x
        - 18 * A00x * A00**2
        + 189 * A00x * A00 * mu6
        - 24 * A00x * B10
        - 432 * A00x * mu6**2
        + 60 * B00.diff("y")
        - 36 * B01.diff("x")
        + 18 * d(B10, "xx")
        + 9 * B10x * A00
        + 36 * B10x * mu6
        + 540 * m6x**2
        + 27 * m6x * A00**2
        - 540 * m6x * A00 * mu6
        + 108 * m6x * B10
        + 1080 * m6x * mu6**2
        - 18 * A00**3 * mu6
        + 6 * A00**2 * B10
        + 162 * A00**2 * mu6**2
        - 6 * A00 * B01
        - 36 * A00 * B10 * mu6
        - 540 * A00 * mu6**3
        + 20 * B00 * B2
        - 36 * B01 * mu6
        + 108 * B10 * mu6**2
        + 540 * mu6**4
        - 6 * d(A00, "xxx")
    )


# -- A1 = 0, mu5 = 0 -------------------------------------------------------


def _suff20(c, v):
    B2 = c.B2
    A00, B10, B01, B02 = v.a00, v.b10, v.b01, v.b02
    B2x = B2.diff("x")
    rhs = (
        -12 * A00.diff("x") * B2x
        + 12 * B02.diff("x")
        - 4 * B10.diff("x") * B2
        - 3 * B2x * A00**2
        + 8 * B2x * B10
        + 3 * A00 * B02
        - A00 * B10 * B2
    ) / 18
    return B01.diff("y") - rhs


def _suff21(c, v):
    B2 = c.B2
    A00, B10, B00, B01, B02 = v.a00, v.b10, v.b00, v.b01, v.b02
    A00x, B2x, B10x = A00.diff("x"), B2.diff("x"), B10.diff("x")
    rhs = (
        36 * d(A00, "xx") * B2x
        - 18 * A00x * B2x * A00
        + 36 * A00x * B02
        - 12 * A00x * B10 * B2
        + 216 * d(B00, "yy")
        + 72 * B00.diff("y") * B2
        - 18 * B02.diff("x") * A00
        + 12 * d(B10, "xx") * B2
        + 24 * B10x * B2x
        + 6 * B10x * A00 * B2
        - 9 * B2x * A00**3
        + 36 * B2x * A00 * B10
        - 72 * B2x * B01
        + 72 * B2.diff("y") * B00
        + 9 * A00**2 * B02
        - 3 * A00**2 * B10 * B2
        - 30 * B02 * B10
        + 10 * B10**2 * B2
    )
    return 36 * d(B02, "xx") - rhs


def _suff22(c, v):
    A00, B10, B01 = v.a00, v.b10, v.b01
    mu7, mu8, mu9 = v.mu7, v.mu8, v.mu9
    A00x = A00.diff("x")
    rhs = (
        3333960 * A00x * A00 * mu7**2
        + 7560 * A00x * mu7 * mu8
        + 2520 * mu7.diff("x") * mu9
        - 2520 * mu9.diff("x") * mu7
        - 952560 * A00**3 * mu7**2
        + 793800 * A00 * B10 * mu7**2
        + 2835 * A00 * mu7 * mu9
        + 2540160 * B01 * mu7**2
        - 2520 * B10 * mu7 * mu8
        - 952560 * mu7**3
        - mu8 * mu9
    ) / (3810240 * mu7**2)
    return B10.diff("x") - rhs


def _suff23(c, v):
    return 3 * v.mu11.diff("y") + c.B2.diff("x")


def _suff24(c, v):
    A00, B10 = v.a00, v.b10
    mu7, mu8, mu9, mu11 = v.mu7, v.mu8, v.mu9, v.mu11
    return (
        -7560 * A00.diff("x") * mu7
        + 7560 * A00 * mu11 * mu7
        + 2520 * B10 * mu7
        + 40320 * mu11**2 * mu7
        + 8 * mu11 * mu8
        + mu9
        - 20160 * mu7 * mu11.diff("x")
    )


def _suff25(c, v):
    A00, B10, B01, mu8 = v.a00, v.b10, v.b01, v.mu8
    A00x, m8x = A00.diff("x"), mu8.diff("x")
    rhs = (
        48 * A00x * m8x * mu8**2
        + 96 * A00x * A00 * mu8**3
        - 128 * B10.diff("x") * mu8**3
        + 300 * d(mu8, "xx") * m8x * mu8
        - 225 * m8x**3
        + 12 * m8x * A00**2 * mu8**2
        - 32 * m8x * B10 * mu8**2
        + 24 * A00**3 * mu8**3
        - 96 * A00 * B10 * mu8**3
        + 192 * B01 * mu8**3
    ) / (80 * mu8**2)
    return d(mu8, "xxx") - rhs


Residual = Callable[[Form8Coefficients, DerivedInvariants], RF]

CONDITIONS: dict[str, Residual] = {
    "suff:01": _suff01,
    "suff:02": _suff02,
    "suff:03": _suff03,
    "suff:04": _suff04,
    "suff:06": _suff06,
    "suff:07": _suff07,
    "suff:08": _suff08,
    "suff:16": _suff16,
    "suff:17": _suff17,
    "suff:26": _suff26,
    "suff:19": _suff19,
    "suff:20": _suff20,
    "suff:21": _suff21,
    "suff:22": _suff22,
    "suff:23": _suff23,
    "suff:24": _suff24,
    "suff:25": _suff25,
}

CASE_CONDITIONS: dict[CaseTag, tuple[str, ...]] = {
    CaseTag.A: ("suff:01", "suff:02", "suff:03", "suff:04", "suff:06", "suff:07", "suff:08"),
    CaseTag.B: STRUCTURAL + ("suff:16", "suff:17", "suff:26", "suff:19"),
    CaseTag.C: STRUCTURAL + ("suff:20", "suff:21", "suff:23", "suff:24"),
    CaseTag.D: STRUCTURAL + ("suff:20", "suff:21", "suff:22"),
    CaseTag.E: STRUCTURAL + ("suff:20", "suff:21", "suff:25"),
    CaseTag.F: STRUCTURAL + ("suff:20", "suff:21"),
}

CASE_A_NOTE = (
    "case A: the determining system is involutive only together with "
    "(psi_py)_x = (psi_xy)_p, which is not reduced to a coefficient condition"
)
GATE_NOTE = (
    "fiber-preserving branch excluded (3*A1_p + A1^2 - 9*B3 != 0); the equation may still be "
    "linearizable by a transformation with phi depending on y"
)
NEGATIVE_NOTE = "verdict false means: not covered by these sufficient conditions"


def dispatch(c: Form8Coefficients, inv: DerivedInvariants) -> CaseTag:
    if not inv.fiber_gate.is_zero():
        return CaseTag.GATE_FAILED
    if not c.A1.is_zero():
        return CaseTag.A
    if not inv.structure_ok:
        return CaseTag.STRUCTURE_FAILED
    if not inv.mu5.is_zero():
        return CaseTag.B
    if not inv.mu7.is_zero():
        return CaseTag.C if not inv.mu10.is_zero() else CaseTag.D
    if not inv.mu8.is_zero():
        return CaseTag.E
    return CaseTag.F


def _entry(name: str, residual: RF) -> Condition:
    return Condition(name, residual, residual.is_zero())


def check(c: Form8Coefficients, inv: DerivedInvariants, case: CaseTag) -> CriteriaReport:
    """Evaluate every condition attached to ``case`` as an exact zero test."""
    notes: list[str] = []
    if case is CaseTag.GATE_FAILED:
        entries = [_entry("fiber_gate", inv.fiber_gate)]
        notes.append(GATE_NOTE)
    elif case is CaseTag.STRUCTURE_FAILED:
        entries = [_entry(name, r) for name, r in inv.structural]
    elif case is CaseTag.NOT_FORM8:
        entries = []
    else:
        structural = dict(inv.structural)
        entries = []
        for name in CASE_CONDITIONS[case]:
            residual = structural[name] if name in structural else CONDITIONS[name](c, inv)
            entries.append(_entry(name, residual))
        if case is CaseTag.A:
            notes.append(CASE_A_NOTE)
    verdict = case.linearizing_case and all(e.passed for e in entries)
    if not verdict:
        notes.append(NEGATIVE_NOTE)
    return CriteriaReport(case=case, conditions=tuple(entries), verdict=verdict, notes=tuple(notes))


def eq12_residual(inv: DerivedInvariants) -> RF:
    """Left side of the mu10 = 0 compatibility identity in the unsolved form; used in tests."""
    return eq12_remainder(inv.a00, inv.b10, inv.b01, inv.mu7, inv.mu8, inv.mu9)
