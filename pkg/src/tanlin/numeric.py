"""Numerical falsifier: integrate the equation and test that u(t) is quadratic.

If t = phi(x), u = psi(x, y, p) maps the equation to u''' = 0, then along any
solution u is a quadratic polynomial in t.  A fixed-step RK4 trajectory is
mapped through the transformation and fitted by least squares; the relative
misfit should be at the level of the integration error.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional

import numpy as np

from tanlin.ode_form import Form8Coefficients
from tanlin.rational import RationalFunction
from tanlin.transform import TangentTransformation

STATE = ("x", "y", "p", "y2", "y3")
SINGULAR = 1e-8


class NumericError(RuntimeError):
    pass


@dataclass(frozen=True)
class NumericConfig:
    start: tuple = (Fraction(1), Fraction(1), Fraction(1), Fraction(0), Fraction(0))
    h: Fraction = Fraction(1, 1024)
    steps: int = 512
    tolerance: float = 1e-6

    def __post_init__(self):
        if len(self.start) != 5:
            raise ValueError("start point is (x0, y0, y'0, y''0, y'''0)")
        if not self.h > 0:
            raise ValueError("step size must be positive")
        if self.steps < 16:
            raise ValueError("at least 16 steps are required")

    def refined(self) -> "NumericConfig":
        """Half the step over the same interval."""
        return NumericConfig(self.start, self.h / 2, self.steps * 2, self.tolerance)


@dataclass(frozen=True)
class NumericReport:
    residual: float
    passed: bool
    steps_taken: int
    t_range: tuple[float, float]
    fit: tuple[float, float, float]  # a, b, c of a*t^2 + b*t + c
    truncated: bool = False
    warnings: tuple[str, ...] = field(default=())

    def to_dict(self) -> dict:
        return {
            "residual": self.residual,
            "passed": self.passed,
            "steps_taken": self.steps_taken,
            "t_range": list(self.t_range),
            "fit": list(self.fit),
            "truncated": self.truncated,
            "warnings": list(self.warnings),
        }


class _Guarded:
    """Float evaluator of a rational function that also reports its denominator."""

    def __init__(self, r: RationalFunction, args):
        self.num = RationalFunction(r.num).compile(args)
        self.den = RationalFunction(r.den).compile(args)

    def __call__(self, *vals) -> tuple[float, float]:
        d = self.den(*vals)
        if not math.isfinite(d) or abs(d) < SINGULAR:
            return math.nan, d
        return self.num(*vals) / d, d


def _rk4_step(rhs: Callable, s: np.ndarray, h: float) -> np.ndarray:
    k1 = rhs(s)
    k2 = rhs(s + h / 2 * k1)
    k3 = rhs(s + h / 2 * k2)
    k4 = rhs(s + h * k3)
    return s + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)


def integrate_and_fit(c: Form8Coefficients, tr: TangentTransformation, cfg: NumericConfig | None = None) -> NumericReport:
    cfg = cfg or NumericConfig()
    f = _Guarded(c.resolved(), STATE)
    phi = _Guarded(tr.phi, STATE[:3])
    psi = _Guarded(tr.psi, STATE[:3])
    h = float(cfg.h)

    def rhs(s):
        val, _ = f(*s)
        return np.array([1.0, s[2], s[3], s[4], val])

    def sample(s) -> Optional[tuple[float, float, tuple]]:
        t, dt = phi(*s[:3])
        u, du = psi(*s[:3])
        val, df = f(*s)
        if not (math.isfinite(t) and math.isfinite(u) and math.isfinite(val)):
            return None
        return t, u, (np.sign(dt), np.sign(du), np.sign(df))

    state = np.array([float(v) for v in cfg.start])
    first = sample(state)
    if first is None:
        raise NumericError("start point lies on a singularity of the equation or the transformation")
    ts, us = [first[0]], [first[1]]
    signs = first[2]
    truncated = False
    warnings = []
    for i in range(cfg.steps):
        nxt = _rk4_step(rhs, state, h)
        point = sample(nxt) if np.all(np.isfinite(nxt)) else None
        # a denominator changing sign between steps means a pole was stepped over
        if point is not None and point[2] != signs:
            point = None
        if point is None:
            if i < cfg.steps // 4:
                raise NumericError(f"singularity after {i} steps (before a quarter of the run)")
            truncated = True
            warnings.append(f"trajectory truncated at step {i}: a denominator vanished or changed sign")
            break
        state = nxt
        ts.append(point[0])
        us.append(point[1])

    t = np.array(ts)
    u = np.array(us)
    center, scale = t.mean(), np.ptp(t)
    if not scale > 0:
        raise NumericError("t does not vary along the trajectory; quadratic fit is degenerate")
    tau = (t - center) / scale
    design = np.vander(tau, 3)
    coef, _, rank, _ = np.linalg.lstsq(design, u, rcond=None)
    if rank < 3:
        raise NumericError("quadratic fit is rank deficient")
    misfit = np.max(np.abs(u - design @ coef))
    residual = float(misfit / max(1.0, float(np.max(np.abs(u)))))
    # back to a*t^2 + b*t + c in the original variable
    a2, a1, a0 = coef
    a = a2 / scale**2
    b = a1 / scale - 2 * a2 * center / scale**2
    c0 = a0 - a1 * center / scale + a2 * center**2 / scale**2
    return NumericReport(
        residual=residual,
        passed=residual < cfg.tolerance,
        steps_taken=len(ts) - 1,
        t_range=(float(t.min()), float(t.max())),
        fit=(float(a), float(b), float(c0)),
        truncated=truncated,
        warnings=tuple(warnings),
    )


def convergence_ratio(c: Form8Coefficients, tr: TangentTransformation, cfg: NumericConfig | None = None) -> float:
    """Residual at step h divided by the residual at h/2 over the same interval."""
    cfg = cfg or NumericConfig()
    coarse = integrate_and_fit(c, tr, cfg).residual
    fine = integrate_and_fit(c, tr, cfg.refined()).residual
    return coarse / fine if fine > 0 else math.inf
