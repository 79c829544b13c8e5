import pytest
from hypothesis import given, settings

from strategies import case_a_psis, fiber_parts, phis
from tanlin.expr import as_rational
from tanlin.ode_form import Form8Coefficients
from tanlin.transform import (
    TangentTransformation,
    TransformationError,
    appendix_coefficients,
    closed_form_coefficients,
    generate_ode,
    third_derivative_numerator,
    verify_linearization,
)


def gen(phi, psi):
    return generate_ode(TangentTransformation.parse(phi, psi)).coefficients


def test_example1_generated(example1):
    assert gen("x", "x*y*p") == example1


def test_example2_generated(example2):
    assert gen("x", "p/y") == example2


def test_identity_gives_quiet_equation():
    assert gen("x", "p") == Form8Coefficients.from_values()


def test_p_squared_by_hand():
    # u''' = 2*p*y4 + 6*y2*y3
    c = gen("x", "p^2")
    assert c.A1 == as_rational("3/p") and c.A0.is_zero() and c.B0.is_zero()


@pytest.mark.parametrize(
    "phi, psi, message",
    [
        ("1", "p", "invertible"),
        ("x", "x*y", "contact"),
        ("x*p", "p", "phi"),
        ("x", "y2", "x, y, p"),
    ],
)
def test_invalid_transformations(phi, psi, message):
    with pytest.raises(TransformationError, match=message):
        TangentTransformation.parse(phi, psi)


def test_fiber_linear_requires_nonzero_psi1():
    with pytest.raises(TransformationError):
        TangentTransformation.fiber_linear("x", "0", "y")
    with pytest.raises(TransformationError):
        TangentTransformation.fiber_linear("x", "p", "y")


def test_verify_examples(example1):
    ok, residual = verify_linearization(example1, TangentTransformation.parse("x", "x*y*p"))
    assert ok and residual.is_zero()
    ok, residual = verify_linearization(example1, TangentTransformation.parse("x", "y*p"))
    assert not ok and not residual.is_zero()
    ok, _ = verify_linearization(Form8Coefficients.from_values(), TangentTransformation.parse("x", "p"))
    assert ok


def test_appendix_guard():
    with pytest.raises(TransformationError, match="psi_pp"):
        appendix_coefficients(TangentTransformation.parse("x", "y*p + x"))


def test_appendix_literal_a1_for_p_squared():
    # the published A1 cancels to 3 here; the generator gives 3/p
    tr = TangentTransformation.parse("x", "p^2")
    assert appendix_coefficients(tr).A1 == as_rational("3")
    assert generate_ode(tr).coefficients.A1 == as_rational("3/p")


def test_appendix_accepts_phi_depending_on_y():
    tr = TangentTransformation.parse("x + y", "p^2 + x")
    appendix_coefficients(tr)
    generate_ode(tr)


def test_closed_form_requires_phi_of_x():
    with pytest.raises(TransformationError):
        closed_form_coefficients(TangentTransformation.parse("x + y", "p^2"))


@settings(max_examples=30)
@given(phis, case_a_psis)
def test_closed_form_matches_generator(phi, psi):
    try:
        tr = TangentTransformation.parse(phi, psi)
    except TransformationError:
        return
    assert closed_form_coefficients(tr) == generate_ode(tr).coefficients


@settings(max_examples=30)
@given(fiber_parts)
def test_round_trip_fiber_linear(parts):
    tr = TangentTransformation.fiber_linear(*parts)
    c = generate_ode(tr).coefficients
    assert verify_linearization(c, tr)[0]
    assert closed_form_coefficients(tr) == c


@settings(max_examples=30)
@given(phis, case_a_psis)
def test_numerator_affine_in_y4(phi, psi):
    try:
        tr = TangentTransformation.parse(phi, psi)
    except TransformationError:
        return
    c0, c1 = third_derivative_numerator(tr)
    assert c0.free_of("y4") and c1.free_of("y4") and not c1.is_zero()
    assert verify_linearization(generate_ode(tr).coefficients, tr)[0]
