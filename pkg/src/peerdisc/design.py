"""Parameter design rules: SINR threshold, RB count, transmit probability, power."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .analysis import ChannelModel, NetworkModel, delta_i, delta_s, kappa
from .exceptions import DomainError, RegimeError
from .numerics import Interval, find_root

__all__ = [
    "RateModel",
    "PowerDesign",
    "u_xi",
    "optimal_xi",
    "m_from_xi",
    "es_vs_xi",
    "kappa",
    "u_rho",
    "f_rho",
    "suboptimal_rho",
    "rho_policy",
    "design_power",
]

ROOT_TOL = 1e-12
RHO_EPS = 1e-12
DEFAULT_C = 100.0


@dataclass(frozen=True)
class RateModel:
    """SNR-gap rate model: ``M = beta * ln(1 + xi/delta)``."""

    beta: float = 10.0
    delta: float = 1.0

    def __post_init__(self):
        if not self.beta > 0:
            raise DomainError(f"beta must be positive, got {self.beta}")
        if not self.delta > 0:
            raise DomainError(f"delta must be positive, got {self.delta}")


@dataclass(frozen=True)
class PowerDesign:
    c: float
    p_hat: float
    snr_db: float


def u_xi(x: float, alpha: float, delta: float) -> float:
    y = x / delta
    return alpha / 2 * y - (1 + y) * math.log1p(y)


def optimal_xi(alpha: float, delta: float) -> float:
    """SINR threshold maximizing zero-noise E{S} when M follows the rate model.

    Unique positive root of ``u_xi``; ``u_xi`` is positive just above 0 and
    negative at ``delta * e^alpha``.
    """
    if not alpha > 2:
        raise DomainError(f"alpha must exceed 2, got {alpha}")
    if not delta > 0:
        raise DomainError(f"delta must be positive, got {delta}")
    bracket = Interval(delta * 1e-6, delta * math.exp(alpha))
    return find_root(lambda x: u_xi(x, alpha, delta), bracket, ROOT_TOL).x


def m_from_xi(rm: RateModel, xi: float) -> float:
    if not xi > 0:
        raise DomainError(f"xi must be positive, got {xi}")
    return rm.beta * math.log1p(xi / rm.delta)


def es_vs_xi(ch: ChannelModel, rm: RateModel, rho: float, xi: float) -> float:
    """Zero-noise E{S} with M tied to xi through the rate model."""
    if ch.sigma2 != 0:
        raise RegimeError("es_vs_xi is the interference-limited form; sigma2 must be 0")
    a = ch.alpha
    if ch.m_s == ch.m_i:
        ratio = math.sin(2 * math.pi / a) / (2 * math.pi / a)
    else:
        ratio = delta_s(ch.m_s, a) / delta_i(ch.m_i, a)
    return ratio * (1 - rho) * m_from_xi(rm, xi) / xi ** (2 / a)


def u_rho(x: float, kappa_: float) -> float:
    return -kappa_ * x ** 3 - 3 * x + 2


def f_rho(x: float, kappa_: float) -> float:
    """Lower-bound shape in rho: ``x^2 (1-x) / (1 + kappa x^2)``."""
    return x * x * (1 - x) / (1 + kappa_ * x * x)


def suboptimal_rho(kappa_: float) -> float:
    """Transmit probability maximizing the erfc lower bound; 2/3 as kappa -> 0."""
    if not kappa_ > 0:
        raise DomainError(f"kappa must be positive, got {kappa_}")
    root = find_root(lambda x: u_rho(x, kappa_), Interval(RHO_EPS, 1 - RHO_EPS), ROOT_TOL)
    return root.x


def rho_policy(kappa_: float) -> float:
    return min(suboptimal_rho(kappa_), 0.5)


def design_power(
    c: float, net: NetworkModel, rho: float, M: float, noise_power: float = 1.0
) -> PowerDesign:
    """Smallest transmit power that makes ``kappa * rho^2`` equal to ``c``.

    ``p_hat`` is in the units of ``noise_power``; ``snr_db`` is the implied
    unit-distance SNR ``p_hat / noise_power``.
    """
    if not c > 1:
        raise DomainError(f"dominance factor c must exceed 1, got {c}")
    if not noise_power > 0:
        raise DomainError(f"noise power must be positive, got {noise_power}")
    density = net.lam * rho / M
    p_hat = 8 * c / math.pi ** 4 / density ** 2 * noise_power
    return PowerDesign(c=c, p_hat=p_hat, snr_db=10 * math.log10(p_hat / noise_power))
