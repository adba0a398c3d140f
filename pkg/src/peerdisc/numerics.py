"""Special functions, semi-infinite quadrature and bracketed root finding.

Nothing in here knows about wireless networks. The heavy lifting is delegated
to scipy (QUADPACK for quadrature, Brent's method for roots); this module adds
the variable substitution, domain checks and result bookkeeping around them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

from scipy import integrate, optimize, special

from .exceptions import BracketError, ConvergenceError, DomainError, IntegrationError

__all__ = [
    "Interval",
    "RootResult",
    "ln_gamma",
    "erfcx",
    "erfc",
    "pochhammer_falling",
    "find_root",
    "integrate_semiinf",
]

QUAD_RTOL = 1e-9
QUAD_LIMIT = 400
ROOT_MAXITER = 200


@dataclass(frozen=True)
class Interval:
    lo: float
    hi: float

    def __post_init__(self):
        if not (math.isfinite(self.lo) and math.isfinite(self.hi)):
            raise DomainError(f"interval bounds must be finite, got [{self.lo}, {self.hi}]")
        if not self.lo < self.hi:
            raise DomainError(f"interval requires lo < hi, got [{self.lo}, {self.hi}]")

    @property
    def width(self) -> float:
        return self.hi - self.lo


@dataclass(frozen=True)
class RootResult:
    x: float
    residual: float
    iterations: int


def ln_gamma(x: float) -> float:
    """Natural logarithm of the Gamma function for ``x > 0``."""
    if not x > 0:
        raise DomainError(f"ln_gamma requires x > 0, got {x}")
    return math.lgamma(x)


def erfcx(t: float) -> float:
    """Scaled complementary error function ``exp(t**2) * erfc(t)`` for ``t >= 0``.

    Stays finite for every representable ``t``; behaves like ``1/(t*sqrt(pi))``
    for large arguments.
    """
    if not t >= 0:
        raise DomainError(f"erfcx is only defined here for t >= 0, got {t}")
    return float(special.erfcx(t))


def erfc(t: float) -> float:
    """Plain complementary error function (underflows to 0 for t > ~27)."""
    return float(special.erfc(t))


def pochhammer_falling(x: float, k: int) -> float:
    """Falling factorial ``x (x-1) ... (x-k+1)``; the empty product is 1."""
    if k < 0:
        raise DomainError(f"falling factorial order must be >= 0, got {k}")
    out = 1.0
    for i in range(k):
        out *= x - i
    return out


def find_root(f: Callable[[float], float], bracket: Interval, tol: float = 1e-12) -> RootResult:
    """Root of ``f`` inside ``bracket`` by Brent's method.

    ``f(lo)`` and ``f(hi)`` must have opposite signs. The returned root either
    has ``|f(x)| <= tol`` or is pinned by a sign change over a window of width
    ``tol``.
    """
    flo, fhi = f(bracket.lo), f(bracket.hi)
    if flo == 0.0:
        return RootResult(bracket.lo, 0.0, 0)
    if fhi == 0.0:
        return RootResult(bracket.hi, 0.0, 0)
    if not flo * fhi < 0:
        raise BracketError(
            f"no sign change on [{bracket.lo}, {bracket.hi}]: f(lo)={flo}, f(hi)={fhi}"
        )
    xtol = max(tol * 1e-2, 1e-300)
    try:
        x, info = optimize.brentq(
            f, bracket.lo, bracket.hi, xtol=xtol, maxiter=ROOT_MAXITER, full_output=True,
            disp=False,
        )
    except RuntimeError as exc:  # pragma: no cover - brentq raises only with disp=True
        raise ConvergenceError(str(exc)) from exc
    if not info.converged:
        raise ConvergenceError(
            f"root finder stopped after {info.iterations} iterations ({info.flag})"
        )
    residual = f(x)
    if abs(residual) > tol:
        # accept only if a sign change is confirmed within a tol-wide window
        a = max(bracket.lo, x - tol / 2)
        b = min(bracket.hi, x + tol / 2)
        if f(a) * f(b) > 0:
            raise ConvergenceError(f"residual {residual:g} exceeds tolerance {tol:g} at x={x}")
    return RootResult(float(x), float(residual), int(info.iterations))


def integrate_semiinf(
    f: Callable[[float], float],
    transform_scale: float = 1.0,
    rtol: float = QUAD_RTOL,
) -> tuple[float, float]:
    """Integrate ``f`` over ``(0, inf)``.

    The half line is mapped onto ``(0, 1)`` with ``r = scale * s / (1 - s)`` so
    that ``s = 1/2`` lands on ``r = scale``; pick ``scale`` near the bulk of
    the integrand. Returns ``(value, abserr)``.

    Raises :class:`IntegrationError` (carrying the best estimate) if QUADPACK
    reports that the subdivision limit or roundoff stopped it early.
    """
    if not transform_scale > 0 or not math.isfinite(transform_scale):
        raise DomainError(f"transform_scale must be positive and finite, got {transform_scale}")
    c = float(transform_scale)

    def mapped(s):
        if s >= 1.0:
            return 0.0
        u = 1.0 - s
        return f(c * s / u) * c / (u * u)

    res = integrate.quad(mapped, 0.0, 1.0, epsabs=0.0, epsrel=rtol, limit=QUAD_LIMIT,
                         full_output=1)
    value, abserr = res[0], res[1]
    if len(res) > 3 and not _acceptable(value, abserr, rtol):
        raise IntegrationError(f"quadrature did not converge: {res[3]}", value, abserr)
    return float(value), float(abserr)


def _acceptable(value, abserr, rtol):
    # QUADPACK warns about roundoff even when the achieved error is tiny
    return abserr <= max(100 * rtol * abs(value), 1e-300)
