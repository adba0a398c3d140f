"""Mean number of discovered peers, E{S}, for the multichannel random hello protocol.

Every ``es_*`` function takes the same three value objects: the node
:class:`NetworkModel`, the :class:`ChannelModel` and the protocol
:class:`DiscoveryParams`. Lognormal shadowing on the channel is folded in by
replacing the node density with the effective density
``lambda * E[theta**(2/alpha)]`` before evaluating, so the formulas below only
ever see the unshadowed model.
"""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass
from functools import lru_cache

from .exceptions import CapabilityError, DomainError, IntegrationError, RegimeError
from .numerics import erfcx, integrate_semiinf, ln_gamma, pochhammer_falling

__all__ = [
    "ChannelModel",
    "DiscoveryParams",
    "NetworkModel",
    "EsBounds",
    "delta_s",
    "delta_i",
    "delta_s_tilde",
    "es_zero_noise",
    "es_rayleigh_noise",
    "es_rayleigh_noise_limit",
    "es_bounds",
    "es_general",
    "kappa",
    "lognormal_moment",
    "effective_density",
    "analytical_report",
]

GENERAL_M_CAP = 6
TILDE_M_CAP = 12
GENERAL_RTOL = 1e-10


@dataclass(frozen=True)
class ChannelModel:
    """Path loss, Nakagami fading, normalized noise and lognormal shadowing.

    ``sigma2`` is the noise power divided by the transmit power (linear), i.e.
    the reciprocal of the SNR at unit distance. Non-integer fading parameters
    are allowed so that the simulator can use them; the analytical routines
    check for integers themselves.
    """

    alpha: float = 4.0
    m_s: float = 1
    m_i: float = 1
    sigma2: float = 0.0
    shadow_chi_db: float = 0.0

    def __post_init__(self):
        if not (self.alpha > 2 and math.isfinite(self.alpha)):
            raise DomainError(f"path loss exponent must exceed 2, got {self.alpha}")
        for name in ("m_s", "m_i"):
            m = getattr(self, name)
            if not (m >= 0.5 and math.isfinite(m)):
                raise DomainError(f"{name} must be >= 0.5, got {m}")
        if not (self.sigma2 >= 0 and math.isfinite(self.sigma2)):
            raise DomainError(f"sigma2 must be finite and >= 0, got {self.sigma2}")
        if not (self.shadow_chi_db >= 0 and math.isfinite(self.shadow_chi_db)):
            raise DomainError(f"shadow_chi_db must be >= 0, got {self.shadow_chi_db}")

    @property
    def snr_db(self) -> float:
        return math.inf if self.sigma2 == 0 else -10 * math.log10(self.sigma2)

    @property
    def integer_fading(self) -> bool:
        return float(self.m_s).is_integer() and float(self.m_i).is_integer()


@dataclass(frozen=True)
class DiscoveryParams:
    """Resource blocks per slot ``M``, linear SINR threshold ``xi``, transmit probability ``rho``."""

    M: float = 4.0
    xi: float = 1.0
    rho: float = 0.5

    def __post_init__(self):
        if not (self.M > 0 and math.isfinite(self.M)):
            raise DomainError(f"M must be positive, got {self.M}")
        if not (self.xi > 0 and math.isfinite(self.xi)):
            raise DomainError(f"xi must be positive, got {self.xi}")
        if not 0 < self.rho < 1:
            raise DomainError(f"rho must lie in (0, 1), got {self.rho}")


@dataclass(frozen=True)
class NetworkModel:
    lam: float = 4.0

    def __post_init__(self):
        if not (self.lam > 0 and math.isfinite(self.lam)):
            raise DomainError(f"node density must be positive, got {self.lam}")


@dataclass(frozen=True)
class EsBounds:
    lower: float
    upper: float
    kappa: float


# --- fading constants -------------------------------------------------------

def delta_s(m: float, alpha: float) -> float:
    """``m^(-2/a) G(m+2/a) / (G(1+2/a) G(m))``; equals 1 at m = 1."""
    d = 2.0 / alpha
    return math.exp(-d * math.log(m) + ln_gamma(m + d) - ln_gamma(1 + d) - ln_gamma(m))


def delta_i(m: float, alpha: float) -> float:
    """``m^(-2/a) G(1-2/a) G(m+2/a) / G(m)``; blows up as alpha -> 2."""
    if not alpha > 2:
        raise DomainError(f"alpha must exceed 2, got {alpha}")
    d = 2.0 / alpha
    return math.exp(-d * math.log(m) + ln_gamma(1 - d) + ln_gamma(m + d) - ln_gamma(m))


def delta_s_tilde(m: int, alpha: float) -> float:
    """Triple-sum form of :func:`delta_s` obtained from the derivative expansion.

    Evaluated term by term, so it is an independent route to the same number.
    """
    m = _as_int(m, "m")
    if not 1 <= m <= TILDE_M_CAP:
        raise CapabilityError(f"delta_s_tilde supports 1 <= m <= {TILDE_M_CAP}, got {m}")
    d = 2.0 / alpha
    terms = []
    for k in range(m):
        kfact = math.factorial(k)
        for l in range(k + 1):
            for j in range(l + 1):
                sign = -1.0 if (k + l + j) % 2 else 1.0
                terms.append(sign * math.comb(l, j) * pochhammer_falling(d * (l - j), k) / kfact)
    return m ** (-d) * math.fsum(terms)


# --- shadowing --------------------------------------------------------------

def lognormal_moment(chi_db: float, alpha: float) -> float:
    """``E[theta^(2/alpha)]`` for lognormal shadowing with dB spread ``chi_db``."""
    if chi_db < 0:
        raise DomainError(f"chi_db must be >= 0, got {chi_db}")
    return math.exp(0.5 * (math.log(10) / 5 * chi_db / alpha) ** 2)


def effective_density(net: NetworkModel, ch: ChannelModel, moment: float) -> NetworkModel:
    """Density of the displaced PPP that absorbs i.i.d. shadowing with the given moment."""
    if not (math.isfinite(moment) and moment >= 0):
        raise DomainError(f"shadowing moment must be finite and >= 0, got {moment}")
    return NetworkModel(net.lam * moment)


def _unshadowed(net: NetworkModel, ch: ChannelModel) -> NetworkModel:
    if ch.shadow_chi_db == 0:
        return net
    return effective_density(net, ch, lognormal_moment(ch.shadow_chi_db, ch.alpha))


# --- closed forms -----------------------------------------------------------

def es_zero_noise(ch: ChannelModel, dp: DiscoveryParams) -> float:
    """Interference-limited E{S} for integer Nakagami parameters.

    Does not depend on the node density, and with ``m_s == m_i`` not on the
    fading parameter either.
    """
    if ch.sigma2 != 0:
        raise RegimeError("es_zero_noise requires sigma2 = 0")
    _require_integer_fading(ch)
    a = ch.alpha
    if ch.m_s == ch.m_i:
        x = 2 * math.pi / a
        ratio = math.sin(x) / x
    else:
        ratio = delta_s(ch.m_s, a) / delta_i(ch.m_i, a)
    return ratio * dp.M * (1 - dp.rho) / dp.xi ** (2 / a)


def es_rayleigh_noise(net: NetworkModel, ch: ChannelModel, dp: DiscoveryParams) -> float:
    """E{S} for Rayleigh fading, alpha = 4 and positive noise (erfc closed form).

    The ``exp(t^2) erfc(t)`` product goes through the scaled function so the
    result stays finite when ``t`` is large.
    """
    _require_rayleigh_noise(ch)
    lam = _unshadowed(net, ch).lam
    sigma = math.sqrt(ch.sigma2)
    rho = dp.rho
    scale = lam * math.pi ** 1.5 * rho * (1 - rho) / (2 * math.sqrt(dp.xi) * sigma)
    t = lam * math.pi ** 2 * rho / (4 * dp.M * sigma)
    return scale * erfcx(t)


def es_rayleigh_noise_limit(net: NetworkModel, ch: ChannelModel, dp: DiscoveryParams) -> float:
    """Saturation value of :func:`es_rayleigh_noise` as M grows without bound."""
    _require_rayleigh_noise(ch)
    lam = _unshadowed(net, ch).lam
    return lam * math.pi ** 1.5 * dp.rho * (1 - dp.rho) / (2 * math.sqrt(dp.xi * ch.sigma2))


def kappa(net: NetworkModel, M: float, sigma2: float) -> float:
    """Interference-to-noise dominance ``lambda^2 pi^4 / (8 M^2 sigma2)``."""
    if not sigma2 > 0:
        raise DomainError(f"kappa requires sigma2 > 0, got {sigma2}")
    return net.lam ** 2 * math.pi ** 4 / (8 * M ** 2 * sigma2)


def es_bounds(net: NetworkModel, ch: ChannelModel, dp: DiscoveryParams) -> EsBounds:
    """Fractional lower and zero-noise upper bound around :func:`es_rayleigh_noise`."""
    _require_rayleigh_noise(ch)
    k = kappa(_unshadowed(net, ch), dp.M, ch.sigma2)
    upper = 2 / math.pi * dp.M * (1 - dp.rho) / math.sqrt(dp.xi)
    kr2 = k * dp.rho ** 2
    return EsBounds(lower=upper * kr2 / (1 + kr2), upper=upper, kappa=k)


# --- general Nakagami integral ----------------------------------------------

def es_general(net: NetworkModel, ch: ChannelModel, dp: DiscoveryParams) -> float:
    """E{S} for integer Nakagami fading with arbitrary noise, by quadrature.

    The k-th derivatives of the interference Laplace transform times the noise
    term are expanded into exact monomials, which collapses the whole sum into
    one integrand ``r * exp(-A r^2 - B r^alpha) * poly(r)``.
    """
    _require_integer_fading(ch)
    m_s, m_i = int(ch.m_s), int(ch.m_i)
    if max(m_s, m_i) > GENERAL_M_CAP:
        raise CapabilityError(f"es_general supports fading parameters up to {GENERAL_M_CAP}")
    lam = _unshadowed(net, ch).lam
    alpha, s2, rho = ch.alpha, ch.sigma2, dp.rho
    a = lam * rho / dp.M * math.pi * delta_i(m_i, alpha)
    zeta_scale = m_s * dp.xi
    A = a * zeta_scale ** (2 / alpha)
    B = s2 * zeta_scale

    poly = _radial_polynomial(m_s, alpha, a, s2, zeta_scale)

    def integrand(r):
        if r == 0.0:
            return 0.0
        damp = math.exp(-A * r * r - B * r ** alpha)
        if damp == 0.0:
            return 0.0
        return r * damp * math.fsum(c * r ** e for e, c in poly)

    knee = A ** -0.5
    if B > 0:
        knee = min(knee, B ** (-1 / alpha))
    try:
        value, _ = integrate_semiinf(integrand, knee, rtol=GENERAL_RTOL)
    except IntegrationError as exc:
        raise IntegrationError(
            f"general E{{S}} integral did not converge: {exc}", exc.value, exc.abserr
        ) from exc
    return 2 * math.pi * lam * rho * (1 - rho) * value


def laplace_derivative_terms(k: int, alpha: float, a: float, s2: float) -> dict:
    """k-th derivative of ``exp(-a z^(2/alpha) - s2 z)`` divided by that exponential.

    Returned as ``{(p, q): c}`` meaning ``sum c * z^((2/alpha) p + q - k)``,
    assembled with the derivative-of-exponential identity
    ``d^k e^f = e^f sum_l 1/l! sum_j (-1)^j C(l,j) f^j d^k(f^(l-j))``.
    """
    d = 2.0 / alpha
    f = {(1, 0): -a}
    if s2 > 0:
        f[(0, 1)] = -s2
    powers = [{(0, 0): 1.0}]
    for _ in range(k):
        powers.append(_poly_mul(powers[-1], f))
    out = defaultdict(float)
    for l in range(k + 1):
        for j in range(l + 1):
            # d^k of f^(l-j): exact monomial derivatives
            deriv = {key: c * pochhammer_falling(d * key[0] + key[1], k)
                     for key, c in powers[l - j].items()}
            coeff = (-1) ** j * math.comb(l, j) / math.factorial(l)
            for key, c in _poly_mul(powers[j], deriv).items():
                out[key] += coeff * c
    return dict(out)


@lru_cache(maxsize=256)
def _radial_polynomial(m_s, alpha, a, s2, zeta_scale):
    # (-m_s xi)^k r^(k alpha) zeta^(-k) = (-1)^k once zeta = m_s xi r^alpha
    d = 2.0 / alpha
    acc = defaultdict(float)
    for k in range(m_s):
        sign = -1.0 if k % 2 else 1.0
        for (p, q), c in laplace_derivative_terms(k, alpha, a, s2).items():
            acc[(p, q)] += sign / math.factorial(k) * c * zeta_scale ** (d * p + q)
    return tuple((2 * p + alpha * q, c) for (p, q), c in sorted(acc.items()) if c != 0.0)


def _poly_mul(x, y):
    out = defaultdict(float)
    for (p1, q1), c1 in x.items():
        for (p2, q2), c2 in y.items():
            out[(p1 + p2, q1 + q2)] += c1 * c2
    return out


# --- dispatch ----------------------------------------------------------------

def analytical_report(net: NetworkModel, ch: ChannelModel, dp: DiscoveryParams) -> dict:
    """Every analytical E{S} route that applies to the given scenario.

    Keys: ``regime`` (label), ``closed_form`` and ``closed_form_name`` (or
    None), ``general`` (or None with ``general_error``), ``lower``/``upper``/
    ``kappa`` when the erfc bounds apply, ``effective_lambda``.
    """
    out = {
        "regime": regime_of(ch),
        "effective_lambda": _unshadowed(net, ch).lam,
        "closed_form": None,
        "closed_form_name": None,
        "general": None,
        "general_error": None,
        "lower": None,
        "upper": None,
        "kappa": None,
    }
    if not ch.integer_fading:
        out["general_error"] = "non-integer fading parameter (simulation only)"
        return out
    if ch.sigma2 == 0:
        out["closed_form"] = es_zero_noise(ch, dp)
        out["closed_form_name"] = "zero_noise"
    elif _is_rayleigh_alpha4(ch):
        out["closed_form"] = es_rayleigh_noise(net, ch, dp)
        out["closed_form_name"] = "rayleigh_noise"
        b = es_bounds(net, ch, dp)
        out.update(lower=b.lower, upper=b.upper, kappa=b.kappa)
    try:
        out["general"] = es_general(net, ch, dp)
    except (CapabilityError, IntegrationError) as exc:
        out["general_error"] = str(exc)
    return out


def regime_of(ch: ChannelModel) -> str:
    if ch.sigma2 == 0:
        return "interference-limited"
    if _is_rayleigh_alpha4(ch):
        return "rayleigh-alpha4-noise"
    return "general-noise"


def _is_rayleigh_alpha4(ch):
    return ch.alpha == 4 and ch.m_s == 1 and ch.m_i == 1


def _require_rayleigh_noise(ch):
    if not _is_rayleigh_alpha4(ch):
        raise RegimeError(
            f"erfc closed form needs alpha=4 and m_s=m_i=1, got alpha={ch.alpha}, "
            f"m_s={ch.m_s}, m_i={ch.m_i}"
        )
    if not ch.sigma2 > 0:
        raise RegimeError("erfc closed form needs sigma2 > 0")


def _require_integer_fading(ch):
    if not ch.integer_fading:
        raise RegimeError(
            f"analytical E{{S}} needs integer fading parameters, got m_s={ch.m_s}, m_i={ch.m_i}"
        )


def _as_int(v, name):
    if float(v) != int(v):
        raise DomainError(f"{name} must be an integer, got {v}")
    return int(v)
