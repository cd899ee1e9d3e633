"""The period integral L(alpha, theta) and its root theta_tilde(alpha).

The surface closes into an annulus exactly when

    L(alpha, theta) = alpha G(U) + C beta(U) = 0,

where L has the printed integral form over x in [-1, 1] with a 1/sqrt(1-x^2)
endpoint factor.  Substituting x = sin t turns it into a smooth integrand
over t in [-pi/2, pi/2], which adaptive Gauss-Kronrod handles quickly and
with a trustworthy error estimate.  L is negative at theta = 0, increasing
in theta, and tends to +infinity at the admissibility boundary, so the root
is unique and plain bisection is safe.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad

from .errors import BracketError, DomainError
from .profile import AnnulusParams, theta_plus

DEFAULT_QUAD_TOL = 1e-12
DEFAULT_ROOT_TOL = 1e-11


@dataclass(frozen=True)
class PeriodIntegrals:
    """Values of the period integral and its diagnostic decompositions."""

    L: float
    quadrature_error_estimate: float
    converged: bool
    L1: float | None = None
    L2: float | None = None
    I1: float | None = None
    I2: float | None = None
    I3: float | None = None


def _sqrtP(params: AnnulusParams, x):
    return np.sqrt(params.alpha ** 2 + params.cos2theta * x * x
                   - params.C ** 2 * x ** 4)


def _L_integrand(params: AnnulusParams, t):
    """L integrand in the t variable (x = sin t); smooth on [-pi/2, pi/2]."""
    a, C, c2t = params.alpha, params.C, params.cos2theta
    x = np.sin(t)
    sq = _sqrtP(params, x)
    return (2.0 * a * C ** 2 * x * x - a * c2t + C ** 2 * x * x * sq) \
        / (sq * (a + sq))


def _quad(f, tol):
    # full_output silences the roundoff IntegrationWarning near machine
    # precision; the returned error estimate is still honored downstream.
    res = quad(f, -math.pi / 2, math.pi / 2, epsabs=tol, epsrel=1e-13,
               limit=200, full_output=1)
    return res[0], res[1]


def L_integral(params: AnnulusParams, tol: float = DEFAULT_QUAD_TOL,
               split: bool = False) -> PeriodIntegrals:
    """Evaluate L(alpha, theta); optionally also the L1 + L2 split.

    A quadrature that cannot reach tol is reported with converged=False and
    the estimated error, never silently.
    """
    if not params.in_omega:
        raise DomainError(
            f"(alpha={params.alpha}, theta={params.theta}) outside the "
            f"admissible set; L is only defined there")
    L, err = _quad(lambda t: _L_integrand(params, t), tol)
    L1 = L2 = None
    if split:
        a, C = params.alpha, params.C

        def f1(t):
            x = np.sin(t)
            sq = _sqrtP(params, x)
            return -2.0 * a * C ** 2 / (a + sq) * np.cos(t) ** 2 / sq

        def f2(t):
            x = np.sin(t)
            sq = _sqrtP(params, x)
            return (2.0 * a * C ** 2 - a * params.cos2theta
                    + C ** 2 * x * x * sq) / (sq * (a + sq))

        L1, e1 = _quad(f1, tol)
        L2, e2 = _quad(f2, tol)
        err = max(err, e1, e2)
    return PeriodIntegrals(L=L, quadrature_error_estimate=err,
                           converged=err <= max(tol, 1e-14) * 10,
                           L1=L1, L2=L2)


def appendix_I_decomposition(alpha: float, theta: float,
                             tol: float = DEFAULT_QUAD_TOL) -> PeriodIntegrals:
    """The three asymptotic integrals with alpha L = I1 - cos(2 theta) I2 + I3.

    Asserts the printed lower bound
    I2 >= pi alpha^2 / (sqrt(alpha^2 + 1) (alpha + sqrt(alpha^2 + 1))),
    which only uses P <= alpha^2 + 1 on [-1, 1].
    """
    params = AnnulusParams(alpha, theta)
    if not params.in_omega:
        raise DomainError(f"(alpha={alpha}, theta={theta}) outside the "
                          f"admissible set")
    a, C = params.alpha, params.C

    def f1(t):
        x = np.sin(t)
        sq = _sqrtP(params, x)
        return 2.0 * a ** 2 * C ** 2 * x * x / (sq * (a + sq))

    def f2(t):
        x = np.sin(t)
        sq = _sqrtP(params, x)
        return a ** 2 / (sq * (a + sq))

    def f3(t):
        x = np.sin(t)
        sq = _sqrtP(params, x)
        return a * C ** 2 * x * x / (a + sq)

    I1, e1 = _quad(f1, tol)
    I2, e2 = _quad(f2, tol)
    I3, e3 = _quad(f3, tol)
    L, eL = _quad(lambda t: _L_integrand(params, t), tol)
    err = max(e1, e2, e3, eL)
    s = math.sqrt(a * a + 1.0)
    bound = math.pi * a * a / (s * (a + s))
    if I2 < bound - 10 * max(tol, e2):
        raise BracketError(
            f"I2 = {I2} fell below its printed lower bound {bound}; this "
            f"contradicts P <= alpha^2 + 1 and indicates a quadrature bug")
    return PeriodIntegrals(L=L, quadrature_error_estimate=err,
                           converged=err <= max(tol, 1e-14) * 10,
                           I1=I1, I2=I2, I3=I3)


def find_theta_tilde(alpha: float, tol: float = DEFAULT_ROOT_TOL) -> float:
    """The unique theta in (0, min(theta_plus, pi/4)) where L vanishes.

    Plain bisection on a sign-checked bracket: guaranteed by monotonicity of
    L in theta and immune to quadrature noise near the root.  The returned
    value satisfies |L(alpha, theta)| <= tol.
    """
    if alpha <= 0:
        raise DomainError(f"alpha must be positive, got {alpha}")
    if tol <= 0:
        raise DomainError(f"tol must be positive, got {tol}")
    qtol = min(DEFAULT_QUAD_TOL, tol / 10.0)

    def Lval(theta):
        return L_integral(AnnulusParams(alpha, theta), tol=qtol).L

    lo = 0.0
    hi = min(theta_plus(alpha) - 1e-9, math.pi / 4)
    flo, fhi = Lval(lo), Lval(hi)
    if not (flo < 0.0 < fhi):
        raise BracketError(
            f"L must change sign on [0, {hi}] for alpha={alpha}; got "
            f"L(0)={flo}, L({hi})={fhi}")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid == lo or mid == hi:
            break
        fm = Lval(mid)
        if abs(fm) <= 0.1 * tol and hi - lo < 1e-9:
            return mid
        if fm < 0.0:
            lo = mid
        else:
            hi = mid
    root = 0.5 * (lo + hi)
    resid = Lval(root)
    if abs(resid) > tol:
        raise BracketError(
            f"bisection stalled: |L(alpha, theta)| = {abs(resid)} > {tol} "
            f"at theta = {root}")
    return root
