"""Determining systems for the linearizing transformation and a bounded ansatz solver.

A relation is a pair of builders ``lhs(J, K)``, ``rhs(J, K)`` where ``J``
carries the jets of the unknowns (``phi_xx``, ``psi1_y``, ...) and ``K`` the
coefficient functions of the equation.  Evaluating them with symbolic jets
gives the printable system; evaluating them with the jets of a concrete
candidate gives a residual that must vanish identically.
"""

from __future__ import annotations

import itertools
import time
from dataclasses import dataclass, field
from fractions import Fraction
from types import SimpleNamespace
from typing import Callable, Iterator, Optional

from tanlin.criteria import CaseTag, check
from tanlin.invariants import DerivedInvariants
from tanlin.ode_form import FORM8_NAMES, Form8Coefficients
from tanlin.rational import ALPHABET, RationalFunction
from tanlin.transform import TangentTransformation, TransformationError, derivative, verify_linearization

RF = RationalFunction

PHI_JETS = ("phi_x", "phi_xx", "phi_xxx")
FIBER_JETS = PHI_JETS + (
    "psi", "psi1", "psi0", "psi1_x", "psi1_y", "psi1_xx", "psi1_xxx", "psi0_x", "psi0_y", "psi0_xx", "psi0_xxx",
)
CASE_A_JETS = PHI_JETS + ("psi_p", "psi_pp", "psi_px", "psi_x", "psi_y", "psi_xx", "psi_xxx")
JET_NAMES = tuple(dict.fromkeys(FIBER_JETS + CASE_A_JETS))
SYMBOLIC_NAMES = ALPHABET + JET_NAMES

Builder = Callable[[SimpleNamespace, SimpleNamespace], RF]


class ConstructionError(ValueError):
    pass


@dataclass(frozen=True)
class RelationSpec:
    name: str
    lhs: Builder
    rhs: Builder


@dataclass(frozen=True)
class Relation:
    name: str
    lhs: RF
    rhs: RF
    spec: RelationSpec
    unknowns: frozenset  # subset of {"phi", "psi", "psi1", "psi0"}

    def __str__(self):
        return f"{self.lhs} = {self.rhs}"


@dataclass(frozen=True)
class DeterminingSystem:
    case: CaseTag
    relations: tuple[Relation, ...]
    coefficients: Form8Coefficients
    invariants: DerivedInvariants

    def lines(self) -> list[str]:
        return [f"{r.name}: {r}" for r in self.relations]

    def relation(self, name: str) -> Relation:
        for r in self.relations:
            if r.name == name:
                return r
        raise KeyError(name)

    def residuals(self, tr: TangentTransformation) -> dict[str, RF]:
        """Each relation evaluated at the jets of ``tr`` (lhs - rhs)."""
        jets = jets_of(tr, self.case)
        k = _coefficient_namespace(self.coefficients, self.invariants)
        out = {}
        for r in self.relations:
            out[r.name] = _evaluate(r.spec, jets, k)
        return out


@dataclass(frozen=True)
class AnsatzConfig:
    exponent_range: tuple[int, int] = (-3, 3)
    max_phi_degree: int = 3
    coefficient_candidates: tuple[Fraction, ...] = tuple(
        Fraction(n, d) * s for n, d in ((1, 1), (2, 1), (3, 1), (1, 2), (1, 3)) for s in (1, -1)
    )
    timeout: Optional[float] = None

    def __post_init__(self):
        lo, hi = self.exponent_range
        if lo > hi:
            raise ValueError("exponent range is empty")
        if not self.coefficient_candidates:
            raise ValueError("coefficient candidates must be nonempty")
        if self.max_phi_degree < 1:
            raise ValueError("phi degree bound must be at least 1")


@dataclass(frozen=True)
class AnsatzResult:
    transformation: Optional[TangentTransformation]
    status: str  # "found", "exhausted" or "timeout"
    candidates_tried: int = 0


# -- relation tables --------------------------------------------------------


def _tran07(J, K):
    return K.B2 * J.psi1 / 3


TRAN = {
    # case A
    "tran:02": RelationSpec(
        "tran:02",
        lambda J, K: J.phi_xxx,
        lambda J, K: (3 * J.phi_xx**2 + 2 * J.phi_x**2 * K.mu3) / (2 * J.phi_x),
    ),
    "tran:03": RelationSpec(
        "tran:03",
        lambda J, K: J.psi_xxx,
        lambda J, K: (
            -3 * J.phi_xx**2 * J.psi_x
            + 6 * J.phi_xx * J.phi_x * J.psi_xx
            + J.phi_x**2 * J.psi_p * K.mu4
            + 2 * J.phi_x**2 * J.psi_x * K.mu3
        )
        / (2 * J.phi_x**2),
    ),
    "tran:04": RelationSpec("tran:04", lambda J, K: J.psi_pp, lambda J, K: J.psi_p * K.A1 / 3),
    "tran:05": RelationSpec(
        "tran:05",
        lambda J, K: J.psi_px,
        lambda J, K: (
            3 * J.phi_xx * J.psi_p * K.A1
            + J.phi_x * J.psi_p * (K.A0 * K.A1 - 3 * K.A1 * K.mu1 * K.p - K.mu2)
        )
        / (3 * J.phi_x * K.A1),
    ),
    "tran:01": RelationSpec("tran:01", lambda J, K: J.psi_y, lambda J, K: J.psi_p * K.mu2 / K.A1),
    # common to the A1 = 0 cases
    "tran:06": RelationSpec("tran:06", lambda J, K: J.psi, lambda J, K: J.psi1 * K.p + J.psi0),
    "tran:07": RelationSpec("tran:07", lambda J, K: J.psi1_y, _tran07),
    # mu5 != 0
    "tran:08": RelationSpec(
        "tran:08",
        lambda J, K: J.phi_xx,
        lambda J, K: (J.phi_x * J.psi1_x - J.phi_x * K.mu6 * J.psi1) / J.psi1,
    ),
    "tran:09": RelationSpec(
        "tran:09",
        lambda J, K: J.psi1_xx,
        lambda J, K: (
            3 * J.psi1_x**2
            - 2 * J.psi1_x * K.mu6 * J.psi1
            + J.psi1**2 * (-3 * K.A00x + 8 * K.mu6x - 3 * K.A00 * K.mu6 + K.B10 + 7 * K.mu6**2)
        )
        / (2 * J.psi1),
    ),
    "tran:10": RelationSpec("tran:10", lambda J, K: J.psi0_y, lambda J, K: J.psi1 * (K.A00 - 3 * K.mu6)),
    "tran:11": RelationSpec(
        "tran:11",
        lambda J, K: J.psi0_xxx,
        lambda J, K: (
            6 * J.psi0_xx * J.psi1_x * J.psi1
            - 6 * J.psi0_xx * K.mu6 * J.psi1**2
            - 3 * J.psi0_x * J.psi1_x**2
            + 6 * J.psi0_x * J.psi1_x * K.mu6 * J.psi1
            + J.psi0_x * J.psi1**2 * (-3 * K.A00x + 6 * K.mu6x - 3 * K.A00 * K.mu6 + K.B10 + 3 * K.mu6**2)
            + 2 * K.B00 * J.psi1**3
        )
        / (2 * J.psi1**2),
    ),
    # mu5 = 0, mu7 != 0, mu10 != 0
    "tran:13": RelationSpec(
        "tran:13",
        lambda J, K: J.phi_xx,
        lambda J, K: (J.phi_x * J.psi1_x + J.phi_x * K.mu11 * J.psi1) / J.psi1,
    ),
    "tran:14": RelationSpec("tran:14", lambda J, K: J.psi0_y, lambda J, K: J.psi1 * (K.A00 + 3 * K.mu11)),
    "tran:15": RelationSpec(
        "tran:15",
        lambda J, K: J.psi0_xxx,
        lambda J, K: (
            20160 * J.psi0_xx * J.psi1_x * K.mu7 * J.psi1
            + 20160 * J.psi0_xx * K.mu11 * K.mu7 * J.psi1**2
            - 10080 * J.psi0_x * J.psi1_x**2 * K.mu7
            - 20160 * J.psi0_x * J.psi1_x * K.mu11 * K.mu7 * J.psi1
            + J.psi0_x
            * J.psi1**2
            * (
                -2520 * K.A00x * K.mu7
                + 2520 * K.A00 * K.mu11 * K.mu7
                + 840 * K.B10 * K.mu7
                - 30240 * K.mu11**2 * K.mu7
                - 8 * K.mu11 * K.mu8
                - K.mu9
            )
            + 6720 * K.B00 * K.mu7 * J.psi1**3
        )
        / (6720 * K.mu7 * J.psi1**2),
    ),
    # mu5 = 0, mu7 != 0, mu10 = 0
    "tran:16": RelationSpec(
        "tran:16",
        lambda J, K: J.psi0_y,
        lambda J, K: (3 * J.phi_xx * J.psi1 - 3 * J.phi_x * J.psi1_x + J.phi_x * K.A00 * J.psi1) / J.phi_x,
    ),
    "tran:17": RelationSpec(
        "tran:17",
        lambda J, K: J.psi0_xxx,
        lambda J, K: (
            -30240 * J.phi_xx**2 * J.psi0_x * K.mu7 * J.psi1**2
            + 20160 * J.phi_xx * J.phi_x * J.psi0_xx * K.mu7 * J.psi1**2
            + 40320 * J.phi_xx * J.phi_x * J.psi0_x * J.psi1_x * K.mu7 * J.psi1
            + 8 * J.phi_xx * J.phi_x * J.psi0_x * J.psi1**2 * (315 * K.A00 * K.mu7 - K.mu8)
            - 20160 * J.phi_x**2 * J.psi0_x * J.psi1_x**2 * K.mu7
            + 8 * J.phi_x**2 * J.psi0_x * J.psi1_x * J.psi1 * (-315 * K.A00 * K.mu7 + K.mu8)
            + J.phi_x**2 * J.psi0_x * J.psi1**2 * (-2520 * K.A00x * K.mu7 + 840 * K.B10 * K.mu7 - K.mu9)
            + 6720 * J.phi_x**2 * K.B00 * K.mu7 * J.psi1**3
        )
        / (6720 * J.phi_x**2 * K.mu7 * J.psi1**2),
    ),
    "tran:18": RelationSpec(
        "tran:18",
        lambda J, K: J.phi_xxx,
        lambda J, K: (
            -10080 * J.phi_xx**2 * K.mu7 * J.psi1**2
            + 40320 * J.phi_xx * J.phi_x * J.psi1_x * K.mu7 * J.psi1
            + 8 * J.phi_xx * J.phi_x * J.psi1**2 * (315 * K.A00 * K.mu7 - K.mu8)
            - 20160 * J.phi_x**2 * J.psi1_x**2 * K.mu7
            + 8 * J.phi_x**2 * J.psi1_x * J.psi1 * (-315 * K.A00 * K.mu7 + K.mu8)
            + J.phi_x**2 * J.psi1**2 * (-2520 * K.A00x * K.mu7 + 840 * K.B10 * K.mu7 - K.mu9)
        )
        / (6720 * J.phi_x * K.mu7 * J.psi1**2),
    ),
    # mu5 = 0, mu7 = 0, mu8 != 0
    "tran:20": RelationSpec(
        "tran:20",
        lambda J, K: J.psi1_xx,
        lambda J, K: (
            192 * J.psi1_x**2 * K.mu8**2
            + 16 * J.psi1_x * K.mu8 * J.psi1 * (K.mu8x - 2 * K.A00 * K.mu8)
            + J.psi1**2
            * (
                -64 * K.A00x * K.mu8**2
                - 64 * K.mu8xx * K.mu8
                + 71 * K.mu8x**2
                - 4 * K.mu8x * K.A00 * K.mu8
                - 20 * K.A00**2 * K.mu8**2
                + 64 * K.B10 * K.mu8**2
            )
        )
        / (128 * K.mu8**2 * J.psi1),
    ),
    "tran:21": RelationSpec(
        "tran:21",
        lambda J, K: J.psi0_y,
        lambda J, K: J.psi1 * (3 * K.mu8x + 2 * K.A00 * K.mu8) / (8 * K.mu8),
    ),
    "tran:22": RelationSpec(
        "tran:22",
        lambda J, K: J.psi0_xxx,
        lambda J, K: (
            384 * J.psi0_xx * J.psi1_x * K.mu8**2 * J.psi1
            + 48 * J.psi0_xx * K.mu8 * J.psi1**2 * (K.mu8x - 2 * K.A00 * K.mu8)
            - 192 * J.psi0_x * J.psi1_x**2 * K.mu8**2
            + 48 * J.psi0_x * J.psi1_x * K.mu8 * J.psi1 * (-K.mu8x + 2 * K.A00 * K.mu8)
            + J.psi0_x
            * J.psi1**2
            * (
                -96 * K.A00x * K.mu8**2
                - 48 * K.mu8xx * K.mu8
                + 51 * K.mu8x**2
                + 12 * K.mu8x * K.A00 * K.mu8
                - 36 * K.A00**2 * K.mu8**2
                + 64 * K.B10 * K.mu8**2
            )
            + 128 * K.B00 * K.mu8**2 * J.psi1**3
        )
        / (128 * K.mu8**2 * J.psi1**2),
    ),
    "tran:19": RelationSpec(
        "tran:19",
        lambda J, K: J.phi_xx,
        lambda J, K: (8 * J.phi_x * J.psi1_x * K.mu8 + J.phi_x * J.psi1 * (K.mu8x - 2 * K.A00 * K.mu8))
        / (8 * K.mu8 * J.psi1),
    ),
    # mu5 = 0, mu7 = 0, mu8 = 0
    "tran:24": RelationSpec(
        "tran:24",
        lambda J, K: J.psi0_xxx,
        lambda J, K: (
            -9 * J.phi_xx**2 * J.psi0_x * J.psi1
            + 24 * J.phi_xx * J.phi_x * J.psi0_xx * J.psi1
            - 12 * J.phi_xx * J.phi_x * J.psi0_x * J.psi1_x
            + 3 * J.phi_xx * J.phi_x * J.psi0_x * K.A00 * J.psi1
            + 6 * J.phi_x**2 * J.psi0_x * J.psi1_xx
            - 3 * J.phi_x**2 * J.psi0_x * J.psi1_x * K.A00
            + J.phi_x**2 * J.psi0_x * J.psi1 * (-3 * K.A00x + K.B10)
            + 8 * J.phi_x**2 * K.B00 * J.psi1**2
        )
        / (8 * J.phi_x**2 * J.psi1),
    ),
    "tran:25": RelationSpec(
        "tran:25",
        lambda J, K: J.psi1_xxx,
        lambda J, K: (
            90 * J.phi_xx**3 * J.psi1**2
            - 540 * J.phi_xx**2 * J.phi_x * J.psi1_x * J.psi1
            + 135 * J.phi_xx**2 * J.phi_x * K.A00 * J.psi1**2
            + 420 * J.phi_xx * J.phi_x**2 * J.psi1_xx * J.psi1
            + 240 * J.phi_xx * J.phi_x**2 * J.psi1_x**2
            - 330 * J.phi_xx * J.phi_x**2 * J.psi1_x * K.A00 * J.psi1
            + 3 * J.phi_xx * J.phi_x**2 * J.psi1**2 * (-14 * K.A00x + 19 * K.A00**2 - 14 * K.B10)
            - 120 * J.phi_x**3 * J.psi1_xx * J.psi1_x
            + 90 * J.phi_x**3 * J.psi1_xx * K.A00 * J.psi1
            + 60 * J.phi_x**3 * J.psi1_x**2 * K.A00
            + J.phi_x**3 * J.psi1_x * J.psi1 * (12 * K.A00x - 57 * K.A00**2 + 52 * K.B10)
            + J.phi_x**3
            * J.psi1**2
            * (-21 * K.A00x * K.A00 + 24 * K.B10x + 6 * K.A00**3 - 5 * K.A00 * K.B10 - 16 * K.B01)
        )
        / (80 * J.phi_x**3 * J.psi1),
    ),
    "tran:26": RelationSpec(
        "tran:26",
        lambda J, K: J.phi_xxx,
        lambda J, K: (
            15 * J.phi_xx**2 * J.psi1
            - 12 * J.phi_xx * J.phi_x * J.psi1_x
            + 3 * J.phi_xx * J.phi_x * K.A00 * J.psi1
            + 6 * J.phi_x**2 * J.psi1_xx
            - 3 * J.phi_x**2 * J.psi1_x * K.A00
            + J.phi_x**2 * J.psi1 * (-3 * K.A00x + K.B10)
        )
        / (8 * J.phi_x * J.psi1),
    ),
}
# the psi1_xx relation of the mu10 != 0 and mu10 = 0 sub-cases is the same formula
_PSI1_XX_MU7 = lambda J, K: (  # noqa: E731
    -22680 * J.phi_xx**2 * K.mu7 * J.psi1**2
    + 50400 * J.phi_xx * J.phi_x * J.psi1_x * K.mu7 * J.psi1
    - 8 * J.phi_xx * J.phi_x * K.mu8 * J.psi1**2
    - 20160 * J.phi_x**2 * J.psi1_x**2 * K.mu7
    + 8 * J.phi_x**2 * J.psi1_x * K.mu8 * J.psi1
    - J.phi_x**2 * K.mu9 * J.psi1**2
) / (5040 * J.phi_x**2 * K.mu7 * J.psi1)
TRAN["tran:12"] = RelationSpec("tran:12", lambda J, K: J.psi1_xx, _PSI1_XX_MU7)
TRAN["tran:27"] = RelationSpec("tran:27", lambda J, K: J.psi1_xx, _PSI1_XX_MU7)
TRAN["tran:23"] = RelationSpec("tran:23", TRAN["tran:16"].lhs, TRAN["tran:16"].rhs)

CASE_RELATIONS: dict[CaseTag, tuple[str, ...]] = {
    CaseTag.A: ("tran:02", "tran:03", "tran:04", "tran:05", "tran:01"),
    CaseTag.B: ("tran:06", "tran:07", "tran:08", "tran:09", "tran:10", "tran:11"),
    CaseTag.C: ("tran:06", "tran:07", "tran:13", "tran:14", "tran:15", "tran:12"),
    CaseTag.D: ("tran:06", "tran:07", "tran:16", "tran:17", "tran:18", "tran:27"),
    CaseTag.E: ("tran:06", "tran:07", "tran:20", "tran:21", "tran:22", "tran:19"),
    CaseTag.F: ("tran:06", "tran:07", "tran:23", "tran:24", "tran:25", "tran:26"),
}

# which unknown each jet belongs to; used to stage the ansatz search
_JET_OWNER = {name: name.split("_")[0] for name in JET_NAMES}


# -- evaluation helpers -----------------------------------------------------


def _coefficient_namespace(c: Form8Coefficients, inv: DerivedInvariants, names=ALPHABET) -> SimpleNamespace:
    values: dict[str, Optional[RF]] = {n: getattr(c, n) for n in FORM8_NAMES}
    for key, value in inv.values().items():
        values[{"a00": "A00", "b10": "B10", "b00": "B00", "b01": "B01", "b02": "B02"}.get(key, key)] = value
    for base, spec in (("A00", "x"), ("B10", "x"), ("mu6", "x"), ("mu8", "x"), ("mu8", "xx")):
        if values.get(base) is not None:
            values[base + spec] = derivative(values[base], spec)
    if names != ALPHABET:
        values = {k: v.lift(names) for k, v in values.items() if v is not None}
    values["p"] = RF.variable("p", names)
    return SimpleNamespace(**values)


def _evaluate(spec: RelationSpec, J, K) -> RF:
    return spec.lhs(J, K) - spec.rhs(J, K)


def _symbolic_jets() -> SimpleNamespace:
    return SimpleNamespace(**{n: RF.variable(n, SYMBOLIC_NAMES) for n in JET_NAMES})


def jets_of(tr: TangentTransformation, case: CaseTag) -> SimpleNamespace:
    """Jets of a concrete transformation in the naming used by the relations."""
    phi = tr.phi
    ns = SimpleNamespace(
        phi_x=phi.diff("x"), phi_xx=derivative(phi, "xx"), phi_xxx=derivative(phi, "xxx"), psi=tr.psi
    )
    if case is CaseTag.A:
        psi = tr.psi
        for spec in ("p", "pp", "px", "x", "y", "xx", "xxx"):
            setattr(ns, "psi_" + spec, derivative(psi, spec))
        return ns
    if tr.psi1 is not None:
        psi1, psi0 = tr.psi1, tr.psi0
    else:
        psi1 = tr.psi.diff("p")
        psi0 = tr.psi - psi1 * RF.variable("p")
    ns.psi1, ns.psi0 = psi1, psi0
    for spec in ("x", "y", "xx", "xxx"):
        setattr(ns, "psi1_" + spec, derivative(psi1, spec))
    for spec in ("x", "y", "xx", "xxx"):
        setattr(ns, "psi0_" + spec, derivative(psi0, spec))
    return ns


def _unknowns(r: RF) -> frozenset:
    owners = set()
    for name in r.variables:
        if name in _JET_OWNER:
            owners.add(_JET_OWNER[name])
    return frozenset(owners)


# -- public API -------------------------------------------------------------


def emit_system(c: Form8Coefficients, inv: DerivedInvariants, case: CaseTag) -> DeterminingSystem:
    """Instantiate the determining system of ``case`` with the equation's coefficients."""
    if case not in CASE_RELATIONS:
        raise ConstructionError(f"no determining system for case {case.value}")
    report = check(c, inv, case)
    if not report.verdict:
        failing = ", ".join(report.failing) or case.value
        raise ConstructionError(f"sufficient conditions do not hold ({failing})")
    J = _symbolic_jets()
    K = _coefficient_namespace(c, inv, SYMBOLIC_NAMES)
    relations = []
    for name in CASE_RELATIONS[case]:
        spec = TRAN[name]
        lhs, rhs = spec.lhs(J, K), spec.rhs(J, K)
        unknowns = _unknowns(lhs) | _unknowns(rhs)
        relations.append(Relation(name, lhs, rhs, spec, unknowns))
    return DeterminingSystem(case, tuple(relations), c, inv)


def _graded(lo: int, hi: int, arity: int) -> list[tuple[int, ...]]:
    """Exponent tuples ordered by total absolute value, then lexicographically."""
    pts = itertools.product(range(lo, hi + 1), repeat=arity)
    return sorted(pts, key=lambda e: (sum(abs(v) for v in e), e))


def _coefficients(cfg: AnsatzConfig) -> list[Fraction]:
    out = [Fraction(1)]
    out += [Fraction(c) for c in cfg.coefficient_candidates if Fraction(c) != 1]
    return list(dict.fromkeys(out))


def phi_candidates(cfg: AnsatzConfig) -> Iterator[RF]:
    """x, x^2, x^3, other powers, then x plus one higher term, then cubic polynomials."""
    x = RF.variable("x")
    seen = set()

    def fresh(f):
        if f.is_constant() or f in seen:
            return False
        seen.add(f)
        return True

    for k in (1, 2, 3):
        if fresh(x**k):
            yield x**k
    lo, hi = cfg.exponent_range
    for k in sorted(range(lo, hi + 1), key=lambda v: (abs(v), v)):
        if k != 0 and fresh(x**k):
            yield x**k
    coeffs = _coefficients(cfg)
    for k in range(2, cfg.max_phi_degree + 1):
        for a in coeffs:
            f = x + a * x**k
            if fresh(f):
                yield f
    if cfg.max_phi_degree >= 3:
        for a, b in itertools.product(coeffs, repeat=2):
            f = x + a * x**2 + b * x**3
            if fresh(f):
                yield f


def monomial_candidates(cfg: AnsatzConfig, names: tuple[str, ...], *, with_coefficients: bool) -> Iterator[RF]:
    lo, hi = cfg.exponent_range
    gens = [RF.variable(n) for n in names]
    coeffs = _coefficients(cfg) if with_coefficients else [Fraction(1)]
    for exps in _graded(lo, hi, len(names)):
        base = RF.constant(1)
        for g, e in zip(gens, exps):
            base = base * g**e
        for c in coeffs:
            yield c * base


class _Timer:
    def __init__(self, timeout):
        self.deadline = None if timeout is None else time.monotonic() + timeout

    def expired(self) -> bool:
        return self.deadline is not None and time.monotonic() > self.deadline


def _holds(relations, J, K) -> bool:
    for r in relations:
        try:
            if not _evaluate(r.spec, J, K).is_zero():
                return False
        except ZeroDivisionError:
            return False
    return True


def _stage(system: DeterminingSystem, allowed: set) -> list[Relation]:
    return [r for r in system.relations if r.unknowns <= allowed]


def solve_by_ansatz(system: DeterminingSystem, cfg: AnsatzConfig | None = None) -> AnsatzResult:
    """Search the candidate lattice in a fixed order; the first verified candidate wins.

    phi is the outermost loop so the simplest time change is preferred.  The
    psi (or psi1) candidates are first filtered by the relations that do not
    involve phi at all.
    """
    cfg = cfg or AnsatzConfig()
    timer = _Timer(cfg.timeout)
    K = _coefficient_namespace(system.coefficients, system.invariants)
    x = RF.variable("x")
    tried = 0

    if system.case is CaseTag.A:
        unknown, family = "psi", monomial_candidates(cfg, ("x", "y", "p"), with_coefficients=False)

        def build(phi, psi, _=None):
            return TangentTransformation(phi, psi)

        tails = [None]
    else:
        unknown, family = "psi1", monomial_candidates(cfg, ("x", "y"), with_coefficients=False)

        def build(phi, psi1, psi0=0):
            return TangentTransformation.fiber_linear(phi, psi1, psi0)

        tails = [RF.constant(0)] + list(monomial_candidates(cfg, ("x", "y"), with_coefficients=True))

    first = _stage(system, {unknown})
    second = [r for r in _stage(system, {unknown, "phi"}) if r not in first]
    rest = [r for r in system.relations if r not in first and r not in second]

    survivors = []
    for cand in family:
        if timer.expired():
            return AnsatzResult(None, "timeout", tried)
        tried += 1
        if system.case is CaseTag.A and derivative(cand, "pp").is_zero():
            continue  # A1 != 0 forces psi_pp != 0
        try:
            probe = build(x, cand)
        except TransformationError:
            continue
        if _holds(first, jets_of(probe, system.case), K):
            survivors.append(cand)

    for phi in phi_candidates(cfg):
        for cand in survivors:
            if timer.expired():
                return AnsatzResult(None, "timeout", tried)
            tried += 1
            try:
                probe = build(phi, cand)
            except TransformationError:
                continue
            if not _holds(second, jets_of(probe, system.case), K):
                continue
            for tail in tails:
                if timer.expired():
                    return AnsatzResult(None, "timeout", tried)
                tried += 1
                tr = probe if tail is None or tail.is_zero() else build(phi, cand, tail)
                if _holds(rest, jets_of(tr, system.case), K) and verify_linearization(system.coefficients, tr)[0]:
                    return AnsatzResult(tr, "found", tried)
    return AnsatzResult(None, "exhausted", tried)
