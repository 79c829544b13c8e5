import json

import pytest
from hypothesis import given, settings

from strategies import fiber_parts
from tanlin.criteria import CASE_CONDITIONS, CaseTag, check, dispatch
from tanlin.expr import as_rational
from tanlin.invariants import STRUCTURAL, compute_invariants
from tanlin.ode_form import Form8Coefficients, extract_form8, parse_ode
from tanlin.transform import TangentTransformation, generate_ode


def classify(c):
    inv = compute_invariants(c)
    case = dispatch(c, inv)
    return case, check(c, inv, case)


def test_example1_is_case_c(example1):
    case, report = classify(example1)
    assert case is CaseTag.C
    assert report.verdict and not report.failing
    assert [c.name for c in report.conditions] == list(STRUCTURAL) + ["suff:20", "suff:21", "suff:23", "suff:24"]


def test_example2_is_case_f(example2):
    case, report = classify(example2)
    assert case is CaseTag.F and report.verdict


def test_quiet_equation_is_case_f():
    case, report = classify(Form8Coefficients.from_values())
    assert case is CaseTag.F and report.verdict


def test_perturbed_b1_is_rejected(example1):
    c = Form8Coefficients(**{**example1.as_dict(), "B1": example1.B1 + 1})
    case, report = classify(c)
    assert not report.verdict
    assert report.failing
    assert any("not covered" in n for n in report.notes)


def test_gate_failure_is_not_a_negative_claim():
    c = Form8Coefficients.from_values(B3="1")
    case, report = classify(c)
    assert case is CaseTag.GATE_FAILED
    assert not report.verdict
    assert report.failing == ["fiber_gate"]
    assert any("phi depending on y" in n for n in report.notes)


def test_case_a_report_shape_and_note():
    tr = TangentTransformation.parse("x^2", "p^2 + x*y")
    case, report = classify(generate_ode(tr).coefficients)
    assert case is CaseTag.A and report.verdict
    assert len(report.conditions) == 7
    assert any("involutive" in n for n in report.notes)


@pytest.mark.parametrize(
    "case, extra", [("A", 7), ("B", 4), ("C", 4), ("D", 3), ("E", 3), ("F", 2)]
)
def test_report_completeness(case, extra):
    tag = CaseTag(case)
    expected = extra if tag is CaseTag.A else len(STRUCTURAL) + extra
    assert len(CASE_CONDITIONS[tag]) == expected


def test_report_to_json(example1):
    _, report = classify(example1)
    doc = json.loads(json.dumps(report.to_dict()))
    assert doc["case"] == "C" and doc["verdict"] is True
    assert all(c["residual"] == "0" for c in doc["conditions"])


def test_failing_residuals_print_canonically(example1):
    c = Form8Coefficients(**{**example1.as_dict(), "B0": example1.B0 + 1})
    _, report = classify(c)
    bad = [x for x in report.to_dict()["conditions"] if not x["passed"]]
    assert bad and all(as_rational(x["residual"]) == as_rational(x["residual"]) for x in bad)
    assert all(str(as_rational(x["residual"])) == x["residual"] for x in bad)


@pytest.mark.parametrize("name", ["A1", "A0", "B3", "B2", "B1", "B0"])
def test_single_coefficient_perturbation_flips_verdict(example1, name):
    values = example1.as_dict()
    values[name] = values[name] + 1
    _, report = classify(Form8Coefficients(**values))
    assert not report.verdict and report.failing


@pytest.mark.parametrize(
    "phi, psi, case",
    [
        ("x", "x*y*p", "C"),
        ("x", "p/y", "F"),
        ("x", "p", "F"),
        ("x", "p + y^2", "B"),
        ("x^2", "x^2*y*p", "D"),
        ("x", "x^2*y*p", "E"),
    ],
)
def test_known_sources(phi, psi, case):
    tag, report = classify(generate_ode(TangentTransformation.parse(phi, psi)).coefficients)
    assert report.verdict
    assert tag.value == case


@settings(max_examples=25)
@given(fiber_parts)
def test_generated_equations_pass(parts):
    phi, psi1, psi0 = parts
    tr = TangentTransformation.fiber_linear(phi, psi1, psi0)
    case, report = classify(generate_ode(tr).coefficients)
    assert case in {CaseTag.B, CaseTag.C, CaseTag.D, CaseTag.E, CaseTag.F}
    assert report.verdict, report.failing


SCALES = ["x", "y^2 + 1", "x*p - 3", "1/(y + p^2)"]


@pytest.mark.parametrize("scale", SCALES)
def test_scaling_invariance(scale):
    base = "x*y*y4 + (4*x*p + 3*y)*y3 + 3*x*y2^2 + 9*p*y2 + 1"
    a = extract_form8(parse_ode(f"{base} = 0"))
    b = extract_form8(parse_ode(f"({scale})*({base}) = 0"))
    ca, ra = classify(a)
    cb, rb = classify(b)
    assert ca is cb and ra.verdict == rb.verdict
