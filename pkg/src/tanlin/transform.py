"""Tangent transformations t = phi, u = psi and the equations they linearize.

Forward direction only: given (phi, psi), push u''' = 0 back to the
y-variables through u' = D(psi)/D(phi), u'' = D(u')/D(phi),
u''' = D(u'')/D(phi), and read off the fourth-order equation.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from tanlin.expr import as_rational
from tanlin.ode_form import Form8, Form8Coefficients, OdeInput, classify_form
from tanlin.rational import RationalFunction


class TransformationError(ValueError):
    """The pair (phi, psi) violates an invertibility or non-contact requirement."""


def derivative(f: RationalFunction, spec: str) -> RationalFunction:
    """Repeated partial derivative; ``spec`` is a string such as ``"xxy"`` or ``"pp"``."""
    for v in spec:
        f = f.diff(v)
    return f


@dataclass(frozen=True)
class TangentTransformation:
    """t = phi(x, y, p), u = psi(x, y, p), optionally with psi = psi1*p + psi0."""

    phi: RationalFunction
    psi: RationalFunction
    psi1: Optional[RationalFunction] = None
    psi0: Optional[RationalFunction] = None

    def __post_init__(self):
        for name in ("phi", "psi"):
            if not getattr(self, name).free_of("y2", "y3", "y4"):
                raise TransformationError(f"{name} may depend on x, y, p only")
        if self.phi.depends_on("p"):
            raise TransformationError("phi depending on p leads to the form9 shape, which is not handled")
        if (self.psi1 is None) != (self.psi0 is None):
            raise TransformationError("psi1 and psi0 must be given together")
        if self.psi1 is not None:
            if self.psi1.depends_on("p") or self.psi0.depends_on("p"):
                raise TransformationError("psi1, psi0 must be functions of (x, y)")
            if self.psi1.is_zero():
                raise TransformationError("psi1 must not vanish")
            p = RationalFunction.variable("p")
            if self.psi != self.psi1 * p + self.psi0:
                raise TransformationError("psi differs from psi1*p + psi0")
        d_phi = self.phi.diff("x") + RationalFunction.variable("p") * self.phi.diff("y")
        if d_phi.is_zero():
            raise TransformationError("phi_x + p*phi_y vanishes: t = phi is not invertible")
        if (self.psi.diff("p") * d_phi).is_zero():
            raise TransformationError("psi_p*(phi_x + p*phi_y) vanishes: transformation is a contact one")

    @classmethod
    def parse(cls, phi: str, psi: str) -> "TangentTransformation":
        return cls(as_rational(phi), as_rational(psi))

    @classmethod
    def fiber_linear(cls, phi, psi1, psi0) -> "TangentTransformation":
        phi, psi1, psi0 = as_rational(phi), as_rational(psi1), as_rational(psi0)
        psi = psi1 * RationalFunction.variable("p") + psi0
        return cls(phi, psi, psi1, psi0)

    @property
    def fiber_preserving(self) -> bool:
        return self.phi.free_of("y", "p")

    def __str__(self):
        return f"t = {self.phi}, u = {self.psi}"


@dataclass(frozen=True)
class GeneratedOde:
    coefficients: Form8Coefficients
    source: TangentTransformation


def transformed_derivatives(phi: RationalFunction, psi: RationalFunction):
    """(u', u'', u''') as functions of x, y, p, y2, y3, y4."""
    d_phi = phi.total_derivative()
    u1 = psi.total_derivative() / d_phi
    u2 = u1.total_derivative() / d_phi
    u3 = u2.total_derivative() / d_phi
    return u1, u2, u3


def third_derivative_numerator(tr: TangentTransformation) -> tuple[RationalFunction, RationalFunction]:
    """Split the numerator of u''' as ``c1*y4 + c0``; returns (c0, c1)."""
    _, _, u3 = transformed_derivatives(tr.phi, tr.psi)
    numer = RationalFunction(u3.num)
    coeffs = numer.coefficients("y4")
    if len(coeffs) != 2 or coeffs[1].is_zero():
        raise TransformationError("u''' numerator is not affine in y4 with nonzero slope")
    return coeffs[0], coeffs[1]


def generate_ode(tr: TangentTransformation) -> GeneratedOde:
    """The form8 equation mapped to u''' = 0 by ``tr``."""
    c0, c1 = third_derivative_numerator(tr)
    f = -c0 / c1
    tag = classify_form(OdeInput(lhs=None, rhs=None, resolved=f))
    if not isinstance(tag, Form8):
        raise AssertionError("a transformation with phi_p = 0 produced an equation outside the form8 shape")
    return GeneratedOde(tag.coefficients, tr)


def verify_linearization(c: Form8Coefficients, tr: TangentTransformation) -> tuple[bool, RationalFunction]:
    """Substitute y4 from the equation into the u''' numerator; zero residual means ``tr`` linearizes it."""
    c0, c1 = third_derivative_numerator(tr)
    residual = c0 + c1 * c.resolved()
    return residual.is_zero(), residual


def appendix_coefficients(tr: TangentTransformation) -> Form8Coefficients:
    """Published closed-form coefficients in terms of phi(x, y) and psi(x, y, p), verbatim.

    Every published denominator carries psi_pp, so psi_pp = 0 is rejected.
    These expressions do not agree with :func:`generate_ode`: already for
    phi = x, psi = p^2 they give A1 = 3 while u''' = 2*p*y4 + 6*y2*y3 forces
    A1 = 3/p.  :func:`closed_form_coefficients` is the working closed form.
    """
    phi, psi = tr.phi, tr.psi
    if derivative(psi, "pp").is_zero():
        raise TransformationError("psi_pp vanishes identically; closed-form coefficients need psi_pp != 0")
    p = RationalFunction.variable("p")

    fx, fy = phi.diff("x"), phi.diff("y")
    fxx, fxy, fyy = derivative(phi, "xx"), derivative(phi, "xy"), derivative(phi, "yy")
    fxxx, fxxy = derivative(phi, "xxx"), derivative(phi, "xxy")
    fxyy, fyyy = derivative(phi, "xyy"), derivative(phi, "yyy")

    sx, sy = psi.diff("x"), psi.diff("y")
    sxx, sxy, syy = derivative(psi, "xx"), derivative(psi, "xy"), derivative(psi, "yy")
    sxxx, sxxy = derivative(psi, "xxx"), derivative(psi, "xxy")
    sxyy, syyy = derivative(psi, "xyy"), derivative(psi, "yyy")
    sp, spp, sppp = psi.diff("p"), derivative(psi, "pp"), derivative(psi, "ppp")
    spx, spy = derivative(psi, "px"), derivative(psi, "py")
    sppx, sppy = derivative(psi, "ppx"), derivative(psi, "ppy")
    spxx, spxy, spyy = derivative(psi, "pxx"), derivative(psi, "pxy"), derivative(psi, "pyy")

    k = fx + fy * p
    den1 = k * spp
    den2 = k**2 * spp

    a1 = ((3 * spp * p - 4 * spp) * fy + 3 * fx * spp) / den1

    a0 = (
        -(3 * fxx + fyy * p**2 + 2 * fxy * p) * spp
        - (3 * spy * p + sy + 3 * spx) * fx
        - (3 * spy * p**2 - sx + 3 * spx * p) * fy
    ) / den1

    b3 = (
        ((2 * sppp * p - 3 * spp) * fy + fx * sppp) * fx
        - (3 * (spp * p - spp) - sppp * p**2) * fy**2
    ) / den2

    b2 = (
        -3
        * (
            ((spp * p - 2 * spp) * fy + fx * spp) * fxx
            + (spp * p - spp) * fyy * fy * p**2
            + ((2 * spp * p + spp) * fx + (2 * spp * p - 3 * spp) * fy * p) * fxy
            - (sppx + sppy * p + spy) * fx**2
            - ((2 * sppy * p**2 - sy + 2 * sppx * p - 2 * spx) * fy - (spp * p + spp) * fyy * p) * fx
            - (sppy * p**3 + sx + sppx * p**2 - spy * p**2 - 2 * spx * p) * fy**2
        )
    ) / den2

    phi_chain = (fyyy * fy - 3 * fyy**2) * p**4 - 3 * fxx**2 - 12 * fxy**2 * p**2 + (
        fxxx + 3 * fxxy * p + 3 * fxyy * p**2
    ) * (fx + fy * p)

    b1 = (
        -(phi_chain * spp)
        + 3 * (2 * spy * p**2 - sx + 2 * spx * p) * fyy * fy * p**2
        - 3 * (sxy + syy * p + spyy * p**2 + spxx + 2 * spxy * p) * fx**2
        + 3 * (sxy * p + sxx - spyy * p**3 - spxx * p - 2 * spxy * p**2) * fy**2 * p
        + 3
        * (
            (2 * spy * p + sy + 2 * spx) * fx
            - 2 * fyy * spp * p**2
            - (2 * sx + sy * p - 2 * spy * p**2 - 2 * spx * p) * fy
        )
        * fxx
        + 3
        * (
            ((sx + 3 * sy * p + 4 * spy * p**2 + 4 * spx * p) * fx - 4 * fxx + fyy * p**2) * spp * p
            - (3 * sx + sy * p - 4 * spy * p**2 - 4 * spx * p) * fy * p
        )
        * fxy
        + (
            3 * (sxx - syy * p**2 - 2 * spyy * p**3 - 2 * spxx * p - 4 * spxy * p**2) * fy
            + (3 * (sx + 2 * sy * p + 2 * spy * p**2 + 2 * spx * p) * fyy + fyyy * spp * p**2) * p
        )
        * fx
    ) / den2

    grad = sx + sy * p
    hess = sxx + syy * p**2 + 2 * sxy * p
    third = (3 * sxxy + syyy * p**2) * p + sxxx + 3 * sxyy * p**2
    b0 = (
        -(phi_chain * grad)
        + 3 * hess * fyy * fy * p**3
        + 3 * (hess * (fx + fy * p) - 2 * grad * fyy * p**2) * fxx
        + 6 * (hess * (fx + fy * p) - 2 * fxx + fyy * p**2) * grad * fxy * p
        - third * (fx**2 + fy**2 * p**2)
        - (2 * third * fy - (3 * hess * fyy + grad * fyyy * p) * p) * fx * p
    ) / den2

    return Form8Coefficients(A1=a1, A0=a0, B3=b3, B2=b2, B1=b1, B0=b0)


def closed_form_coefficients(tr: TangentTransformation) -> Form8Coefficients:
    """Coefficients for phi = phi(x) expanded by hand, independent of :func:`generate_ode`.

    With r1 = phi_xx/phi_x, r2 = phi_xxx/phi_x, Dt = d/dx + p*d/dy,
    T1 = 2*psi_px + 2*p*psi_py + psi_y and T0 = psi_xx + 2*p*psi_xy + p^2*psi_yy,
    phi_x^3 times the numerator of u''' is

        psi_p*y4 + 3*psi_pp*y2*y3 + (Dt psi_p + T1 - 3*r1*psi_p)*y3 + psi_ppp*y2^3
        + (Dt psi_pp + dT1/dp - 3*r1*psi_pp)*y2^2
        + (Dt T1 + dT0/dp - 3*r1*T1 - (r2 - 3*r1^2)*psi_p)*y2
        + Dt T0 - 3*r1*T0 - (r2 - 3*r1^2)*Dt psi
    """
    if not tr.fiber_preserving:
        raise TransformationError("closed form is written for phi = phi(x)")
    phi, psi = tr.phi, tr.psi
    p = RationalFunction.variable("p")

    def dt(g):
        return g.diff("x") + p * g.diff("y")

    r1 = derivative(phi, "xx") / phi.diff("x")
    r2 = derivative(phi, "xxx") / phi.diff("x")
    sp, spp = psi.diff("p"), derivative(psi, "pp")
    t1 = 2 * derivative(psi, "px") + 2 * p * derivative(psi, "py") + psi.diff("y")
    t0 = derivative(psi, "xx") + 2 * p * derivative(psi, "xy") + p**2 * derivative(psi, "yy")
    shift = r2 - 3 * r1**2
    return Form8Coefficients(
        A1=3 * spp / sp,
        A0=(dt(sp) + t1) / sp - 3 * r1,
        B3=derivative(psi, "ppp") / sp,
        B2=(dt(spp) + t1.diff("p") - 3 * r1 * spp) / sp,
        B1=(dt(t1) + t0.diff("p") - 3 * r1 * t1) / sp - shift,
        B0=(dt(t0) - 3 * r1 * t0 - shift * dt(psi)) / sp,
    )
