import pytest
from hypothesis import given, settings

from strategies import fiber_parts
from tanlin.construct import (
    SYMBOLIC_NAMES,
    AnsatzConfig,
    ConstructionError,
    emit_system,
    monomial_candidates,
    phi_candidates,
    solve_by_ansatz,
)
from tanlin.criteria import CaseTag, dispatch
from tanlin.expr import as_rational
from tanlin.invariants import compute_invariants
from tanlin.ode_form import Form8Coefficients
from tanlin.rational import RationalFunction
from tanlin.transform import TangentTransformation, generate_ode, verify_linearization

CASE_NAMES = {
    "A": ["tran:02", "tran:03", "tran:04", "tran:05", "tran:01"],
    "B": ["tran:06", "tran:07", "tran:08", "tran:09", "tran:10", "tran:11"],
    "C": ["tran:06", "tran:07", "tran:13", "tran:14", "tran:15", "tran:12"],
    "D": ["tran:06", "tran:07", "tran:16", "tran:17", "tran:18", "tran:27"],
    "E": ["tran:06", "tran:07", "tran:20", "tran:21", "tran:22", "tran:19"],
    "F": ["tran:06", "tran:07", "tran:23", "tran:24", "tran:25", "tran:26"],
}


def system_for(c):
    inv = compute_invariants(c)
    return emit_system(c, inv, dispatch(c, inv))


def _sym(text):
    # parse over the jet alphabet by building from variables
    env = {n: RationalFunction.variable(n, SYMBOLIC_NAMES) for n in SYMBOLIC_NAMES}
    return eval(text.replace("^", "**"), {"__builtins__": {}}, env)


def test_example1_system(example1):
    s = system_for(example1)
    assert s.case is CaseTag.C
    assert [r.name for r in s.relations] == CASE_NAMES["C"]
    r = s.relation("tran:07")
    assert r.lhs == _sym("psi1_y") and r.rhs == _sym("psi1/y")
    # mu11 = -1/x enters the phi_xx relation
    assert s.relation("tran:13").rhs == _sym("phi_x*psi1_x/psi1 - phi_x/x")


def test_example2_system(example2):
    s = system_for(example2)
    assert [r.name for r in s.relations] == CASE_NAMES["F"]
    assert s.relation("tran:07").rhs == _sym("-psi1/y")
    rhs = s.relation("tran:26").rhs
    zero = RationalFunction.constant(0, SYMBOLIC_NAMES)
    reduced = rhs.subs({"psi1_x": zero, "psi1_xx": zero}, SYMBOLIC_NAMES)
    assert reduced == _sym("15*phi_xx^2/(8*phi_x)")


def test_quiet_system():
    s = system_for(Form8Coefficients.from_values())
    assert s.relation("tran:07").rhs.is_zero()
    assert s.relation("tran:23").lhs == _sym("psi0_y")


def test_lines_are_printable(example1):
    lines = system_for(example1).lines()
    assert lines[0] == "tran:06: psi = p*psi1 + psi0"
    assert all(line.startswith("tran:") for line in lines)


def test_emit_refuses_false_verdict(example1):
    bad = Form8Coefficients(**{**example1.as_dict(), "B0": example1.B0 + 1})
    inv = compute_invariants(bad)
    with pytest.raises(ConstructionError):
        emit_system(bad, inv, dispatch(bad, inv))


@pytest.mark.parametrize(
    "case_coeffs, phi, psi",
    [
        ("example1", "x", "x*y*p"),
        ("example2", "x", "p/y"),
    ],
)
def test_emitted_system_fidelity(case_coeffs, phi, psi, request):
    c = request.getfixturevalue(case_coeffs)
    s = system_for(c)
    tr = TangentTransformation.parse(phi, psi)
    assert all(r.is_zero() for r in s.residuals(tr).values())


@settings(max_examples=20)
@given(fiber_parts)
def test_emitted_system_holds_at_source(parts):
    tr = TangentTransformation.fiber_linear(*parts)
    s = system_for(generate_ode(tr).coefficients)
    assert [r.name for r in s.relations] == CASE_NAMES[s.case.value]
    bad = {k: str(v) for k, v in s.residuals(tr).items() if not v.is_zero()}
    assert not bad


@pytest.mark.parametrize("phi, psi", [("x", "p^2"), ("x^2", "x*y*p^3"), ("x + x^3/3", "p^2/y + x")])
def test_case_a_system_holds_at_source(phi, psi):
    tr = TangentTransformation.parse(phi, psi)
    s = system_for(generate_ode(tr).coefficients)
    assert s.case is CaseTag.A
    assert [r.name for r in s.relations] == CASE_NAMES["A"]
    assert all(r.is_zero() for r in s.residuals(tr).values())


@pytest.mark.parametrize(
    "equation, expected",
    [
        ("example1", ("x", "x*y*p")),
        ("example2", ("x", "p/y")),
        ("quiet", ("x", "p")),
    ],
)
def test_ansatz_examples(equation, expected, request):
    c = Form8Coefficients.from_values() if equation == "quiet" else request.getfixturevalue(equation)
    result = solve_by_ansatz(system_for(c))
    assert result.status == "found"
    tr = result.transformation
    assert (tr.phi, tr.psi) == (as_rational(expected[0]), as_rational(expected[1]))
    assert verify_linearization(c, tr)[0]


@pytest.mark.parametrize("psi", ["p^2", "x*p^3"])
def test_ansatz_case_a(psi):
    c = generate_ode(TangentTransformation.parse("x", psi)).coefficients
    result = solve_by_ansatz(system_for(c))
    assert result.status == "found"
    assert verify_linearization(c, result.transformation)[0]


def test_ansatz_is_deterministic(example1):
    s = system_for(example1)
    first, second = solve_by_ansatz(s), solve_by_ansatz(s)
    assert first == second


def test_ansatz_timeout(example1):
    result = solve_by_ansatz(system_for(example1), AnsatzConfig(timeout=0.0))
    assert result.status == "timeout" and result.transformation is None


def test_unsolvable_lattice_is_reported_not_forced():
    # y4 = y passes the case E conditions but its system has no lattice solution
    c = Form8Coefficients.from_values(B0="-y")
    s = system_for(c)
    assert s.case is CaseTag.E
    result = solve_by_ansatz(s, AnsatzConfig(exponent_range=(-2, 2)))
    assert result.status == "exhausted" and result.transformation is None


def test_enumeration_order():
    cfg = AnsatzConfig()
    assert [str(p) for p in list(phi_candidates(cfg))[:3]] == ["x", "x^2", "x^3"]
    monos = [str(m) for m in list(monomial_candidates(cfg, ("x", "y"), with_coefficients=False))[:5]]
    assert monos[0] == "1"
    assert set(monos[1:5]) == {"x", "y", "1/x", "1/y"}


@pytest.mark.parametrize(
    "kwargs", [dict(exponent_range=(2, 1)), dict(coefficient_candidates=()), dict(max_phi_degree=0)]
)
def test_config_validation(kwargs):
    with pytest.raises(ValueError):
        AnsatzConfig(**kwargs)
