import math

import mpmath
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from peerdisc.analysis import (
    ChannelModel,
    DiscoveryParams,
    NetworkModel,
    analytical_report,
    delta_i,
    delta_s,
    delta_s_tilde,
    effective_density,
    es_bounds,
    es_general,
    es_rayleigh_noise,
    es_rayleigh_noise_limit,
    es_zero_noise,
    kappa,
    laplace_derivative_terms,
    lognormal_moment,
    regime_of,
)
from peerdisc.exceptions import CapabilityError, DomainError, RegimeError

mpmath.mp.dps = 30
ALPHAS = (2.5, 3.0, 4.0, 6.0)


def gamma_ratio(m, alpha, with_gamma1=True):
    """delta_s / delta_i written out with mpmath gamma (independent oracle)."""
    d = mpmath.mpf(2) / alpha
    m = mpmath.mpf(m)
    core = m ** (-d) * mpmath.gamma(m + d) / mpmath.gamma(m)
    return float(core / mpmath.gamma(1 + d)) if with_gamma1 else float(core * mpmath.gamma(1 - d))


# --- value objects ---------------------------------------------------------------

def test_channel_validation():
    with pytest.raises(DomainError):
        ChannelModel(alpha=2.0)
    with pytest.raises(DomainError):
        ChannelModel(m_s=0.4)
    with pytest.raises(DomainError):
        ChannelModel(sigma2=-1)
    with pytest.raises(DomainError):
        ChannelModel(shadow_chi_db=-1)
    assert ChannelModel(m_s=2.7, m_i=2.7).integer_fading is False


@pytest.mark.parametrize("kw", [dict(M=0), dict(xi=0), dict(rho=0), dict(rho=1)])
def test_params_validation(kw):
    with pytest.raises(DomainError):
        DiscoveryParams(**kw)


def test_network_validation():
    with pytest.raises(DomainError):
        NetworkModel(0)


# --- fading constants ---------------------------------------------------------------

def test_delta_s_points():
    assert delta_s(1, 4) == pytest.approx(1.0, abs=1e-15)
    # 4^(-1/2) G(4.5) / (G(1.5) G(4)) = 0.5 * 13.125 / 6
    assert delta_s(4, 4) == pytest.approx(1.09375, rel=1e-13)
    assert delta_s(2, 3) == pytest.approx(gamma_ratio(2, 3), rel=1e-13)


@pytest.mark.parametrize("m", [1, 2, 3, 4, 7])
@pytest.mark.parametrize("alpha", ALPHAS)
def test_delta_s_against_mpmath(m, alpha):
    assert delta_s(m, alpha) == pytest.approx(gamma_ratio(m, alpha), rel=1e-12)


def test_delta_i_points():
    assert delta_i(1, 4) == pytest.approx(math.pi / 2, rel=1e-14)
    assert delta_i(3, 4) == pytest.approx(gamma_ratio(3, 4, with_gamma1=False), rel=1e-13)


def test_delta_i_grows_near_two():
    vals = [delta_i(1, 2 + eps) for eps in (1e-1, 1e-2, 1e-3, 1e-4)]
    assert all(math.isfinite(v) for v in vals)
    assert all(b > a for a, b in zip(vals, vals[1:]))


@pytest.mark.parametrize("m", range(1, 9))
@pytest.mark.parametrize("alpha", ALPHAS)
def test_delta_s_tilde_identity(m, alpha):
    assert delta_s_tilde(m, alpha) == pytest.approx(delta_s(m, alpha), rel=1e-9)


def test_delta_s_tilde_examples():
    assert delta_s_tilde(1, 4) == 1.0
    assert delta_s_tilde(4, 4) == pytest.approx(1.09375, rel=1e-12)
    assert delta_s_tilde(6, 3.3) == pytest.approx(delta_s(6, 3.3), rel=1e-9)


def test_delta_s_tilde_capability():
    with pytest.raises(CapabilityError):
        delta_s_tilde(13, 4)
    with pytest.raises(CapabilityError):
        delta_s_tilde(0, 4)


# --- zero noise -------------------------------------------------------------------

def test_es_zero_noise_points():
    dp = DiscoveryParams(M=4, xi=1, rho=0.5)
    assert es_zero_noise(ChannelModel(), dp) == pytest.approx(4 / math.pi, rel=1e-14)
    assert es_zero_noise(ChannelModel(m_s=4, m_i=4), dp) == pytest.approx(4 / math.pi, rel=1e-13)
    assert es_zero_noise(ChannelModel(), DiscoveryParams(4, 1, 1 - 1e-12)) < 1e-11


def test_es_zero_noise_mixed_fading_uses_delta_ratio():
    ch = ChannelModel(alpha=3.0, m_s=2, m_i=3)
    dp = DiscoveryParams(M=8, xi=2.0, rho=0.3)
    expected = delta_s(2, 3) / delta_i(3, 3) * 8 * 0.7 / 2 ** (2 / 3)
    assert es_zero_noise(ch, dp) == pytest.approx(expected, rel=1e-13)


def test_es_zero_noise_regime_errors():
    with pytest.raises(RegimeError):
        es_zero_noise(ChannelModel(sigma2=0.1), DiscoveryParams())
    with pytest.raises(RegimeError):
        es_zero_noise(ChannelModel(m_s=2.7, m_i=2.7), DiscoveryParams())


def test_zero_noise_m_independent():
    dp = DiscoveryParams(M=6, xi=1.7, rho=0.35)
    vals = [es_zero_noise(ChannelModel(alpha=3.0, m_s=m, m_i=m), dp) for m in (1, 2, 3, 4)]
    assert max(vals) - min(vals) <= 1e-13 * vals[0]


def test_zero_noise_alpha_increasing():
    dp = DiscoveryParams(M=4, xi=1, rho=0.5)
    vals = [es_zero_noise(ChannelModel(alpha=a), dp) for a in ALPHAS]
    assert all(b > a for a, b in zip(vals, vals[1:]))


def test_zero_noise_invariant_to_shadowing():
    dp = DiscoveryParams()
    base = es_zero_noise(ChannelModel(), dp)
    for chi in (6.0, 12.0):
        assert es_zero_noise(ChannelModel(shadow_chi_db=chi), dp) == base


# --- general integral -------------------------------------------------------------

@pytest.mark.parametrize("m", [1, 2, 3, 4])
@pytest.mark.parametrize("alpha", ALPHAS)
def test_general_matches_zero_noise(m, alpha):
    ch = ChannelModel(alpha=alpha, m_s=m, m_i=m)
    dp = DiscoveryParams(M=4, xi=1.3, rho=0.4)
    assert es_general(NetworkModel(4), ch, dp) == pytest.approx(es_zero_noise(ch, dp), rel=1e-6)


@pytest.mark.parametrize("lam", [1.0, 4.0, 16.0])
def test_general_lambda_independent_without_noise(lam):
    ch = ChannelModel(alpha=3.0, m_s=2, m_i=2)
    dp = DiscoveryParams(M=4, xi=1, rho=0.5)
    assert es_general(NetworkModel(lam), ch, dp) == pytest.approx(es_zero_noise(ch, dp), rel=1e-6)


def test_general_mixed_fading_zero_noise():
    ch = ChannelModel(alpha=4.0, m_s=3, m_i=1)
    dp = DiscoveryParams(M=4, xi=1, rho=0.5)
    assert es_general(NetworkModel(4), ch, dp) == pytest.approx(es_zero_noise(ch, dp), rel=1e-6)


def test_general_capability_and_regime():
    with pytest.raises(CapabilityError):
        es_general(NetworkModel(4), ChannelModel(m_s=7, m_i=7), DiscoveryParams())
    with pytest.raises(RegimeError):
        es_general(NetworkModel(4), ChannelModel(m_s=2.5, m_i=2.5), DiscoveryParams())


@pytest.mark.parametrize("k", range(0, 6))
@pytest.mark.parametrize("alpha, a, s2", [(4.0, 0.7, 0.0), (3.0, 1.3, 0.4), (2.5, 0.2, 2.0)])
def test_laplace_derivative_terms_against_mpmath(k, alpha, a, s2):
    d = 2.0 / alpha
    z0 = 0.83
    terms = laplace_derivative_terms(k, alpha, a, s2)
    ours = sum(c * z0 ** (d * p + q - k) for (p, q), c in terms.items())
    f = lambda z: mpmath.exp(-a * z ** d - s2 * z)  # noqa: E731
    ref = float(mpmath.diff(f, z0, k) / f(z0))
    assert ours == pytest.approx(ref, rel=1e-9, abs=1e-12)


# --- Rayleigh, alpha = 4, with noise ------------------------------------------------------

def test_rayleigh_noise_reference_point():
    net, ch = NetworkModel(4), ChannelModel(sigma2=10 ** -0.5)
    val = es_rayleigh_noise(net, ch, DiscoveryParams(M=1000, xi=1, rho=0.5))
    assert val == pytest.approx(4.902375, rel=1e-6)


def test_rayleigh_noise_against_mpmath():
    lam, rho, M, xi, s2 = 4.0, 0.3, 7.0, 1.5, 0.2
    sig = mpmath.sqrt(s2)
    arg = lam * mpmath.pi ** 2 * rho / (4 * M * sig)
    ref = (lam * mpmath.pi ** 1.5 * rho * (1 - rho) / (2 * mpmath.sqrt(xi * s2))
           * mpmath.exp(arg ** 2) * mpmath.erfc(arg))
    val = es_rayleigh_noise(NetworkModel(lam), ChannelModel(sigma2=s2), DiscoveryParams(M, xi, rho))
    assert val == pytest.approx(float(ref), rel=1e-12)


def test_rayleigh_noise_regime_errors():
    net, dp = NetworkModel(4), DiscoveryParams()
    for ch in (ChannelModel(alpha=3, sigma2=0.1), ChannelModel(m_s=2, m_i=2, sigma2=0.1),
               ChannelModel(sigma2=0.0)):
        with pytest.raises(RegimeError):
            es_rayleigh_noise(net, ch, dp)


def test_rayleigh_noise_m_saturation():
    net, ch = NetworkModel(4), ChannelModel(sigma2=10 ** -0.5)
    dp = DiscoveryParams(M=1e6, xi=1, rho=0.5)
    limit = 4 * math.pi ** 1.5 * 0.25 / (2 * math.sqrt(10 ** -0.5))
    assert es_rayleigh_noise_limit(net, ch, dp) == pytest.approx(limit, rel=1e-14)
    assert es_rayleigh_noise(net, ch, dp) == pytest.approx(limit, rel=1e-3)


def test_rayleigh_noise_approaches_zero_noise():
    dp = DiscoveryParams(M=4, xi=1, rho=0.5)
    target = es_zero_noise(ChannelModel(), dp)
    vals = [es_rayleigh_noise(NetworkModel(4), ChannelModel(sigma2=s), dp)
            for s in (1e-2, 1e-4, 1e-6, 1e-8)]
    gaps = [target - v for v in vals]
    assert all(g > 0 for g in gaps)
    assert all(b < a for a, b in zip(gaps, gaps[1:]))
    assert gaps[-1] < 1e-3 * target


def test_rayleigh_noise_increases_with_lambda():
    ch, dp = ChannelModel(sigma2=0.3), DiscoveryParams(M=4, xi=1, rho=0.3)
    vals = [es_rayleigh_noise(NetworkModel(l), ch, dp) for l in np.geomspace(0.1, 100, 20)]
    assert all(b > a for a, b in zip(vals, vals[1:]))


@pytest.mark.parametrize("s2", np.geomspace(1e-3, 10, 10))
@pytest.mark.parametrize("M", [1.0, 4.0, 16.0, 300.0, 2e4])
def test_general_matches_rayleigh_noise(s2, M):
    net, ch = NetworkModel(4), ChannelModel(sigma2=s2)
    dp = DiscoveryParams(M=M, xi=1.0, rho=0.5)
    assert es_general(net, ch, dp) == pytest.approx(es_rayleigh_noise(net, ch, dp), rel=1e-6)


# --- bounds --------------------------------------------------------------------

def test_kappa_reference():
    assert kappa(NetworkModel(4), 4, 0.1) == pytest.approx(16 * math.pi ** 4 / (8 * 16 * 0.1))
    assert kappa(NetworkModel(4), 4, 0.1) == pytest.approx(121.76, abs=0.01)


@given(
    lam=st.floats(0.1, 50), M=st.floats(1, 200), s2=st.floats(1e-3, 10),
    rho=st.floats(0.01, 0.99), xi=st.floats(0.1, 20),
)
def test_bounds_sandwich(lam, M, s2, rho, xi):
    net, ch, dp = NetworkModel(lam), ChannelModel(sigma2=s2), DiscoveryParams(M, xi, rho)
    b = es_bounds(net, ch, dp)
    exact = es_rayleigh_noise(net, ch, dp)
    assert 0 <= b.lower < exact < b.upper
    assert b.kappa > 0


def test_bounds_tight_for_large_kappa_rho2():
    net, ch = NetworkModel(400), ChannelModel(sigma2=1e-3)
    b = es_bounds(net, ch, DiscoveryParams(4, 1, 0.5))
    assert b.lower / b.upper > 0.9999


# --- shadowing --------------------------------------------------------------------

def test_lognormal_moment_values():
    assert lognormal_moment(0, 3.7) == 1.0
    assert lognormal_moment(12, 4) == pytest.approx(2.597, abs=5e-4)
    assert lognormal_moment(12, 4) == pytest.approx(math.exp(0.5 * (math.log(10) / 5 * 3) ** 2))


@given(st.floats(0.01, 20), st.floats(2.1, 8))
def test_lognormal_moment_exceeds_one(chi, alpha):
    assert lognormal_moment(chi, alpha) > 1


def test_effective_density():
    net, ch = NetworkModel(4), ChannelModel(alpha=4, shadow_chi_db=12)
    assert effective_density(net, ch, 1.0).lam == 4
    assert effective_density(net, ch, lognormal_moment(12, 4)).lam == pytest.approx(10.39, abs=0.01)
    with pytest.raises(DomainError):
        effective_density(net, ch, math.inf)


def test_shadowing_is_density_substitution_with_noise():
    dp = DiscoveryParams(4, 1, 0.3)
    shadowed = es_rayleigh_noise(NetworkModel(4), ChannelModel(sigma2=0.2, shadow_chi_db=12), dp)
    direct = es_rayleigh_noise(NetworkModel(4 * lognormal_moment(12, 4)),
                               ChannelModel(sigma2=0.2), dp)
    assert shadowed == pytest.approx(direct, rel=1e-14)
    assert shadowed > es_rayleigh_noise(NetworkModel(4), ChannelModel(sigma2=0.2), dp)


# --- dispatch ---------------------------------------------------------------------

def test_report_routing():
    net, dp = NetworkModel(4), DiscoveryParams()
    rep = analytical_report(net, ChannelModel(), dp)
    assert rep["regime"] == "interference-limited" and rep["closed_form_name"] == "zero_noise"
    assert rep["general"] == pytest.approx(rep["closed_form"], rel=1e-6)
    rep = analytical_report(net, ChannelModel(alpha=3, sigma2=0.1), dp)
    assert rep["closed_form"] is None and rep["general"] is not None and rep["kappa"] is None
    rep = analytical_report(net, ChannelModel(sigma2=0.1), dp)
    assert rep["lower"] < rep["closed_form"] < rep["upper"]
    rep = analytical_report(net, ChannelModel(m_s=2.7, m_i=2.7), dp)
    assert rep["general"] is None and "non-integer" in rep["general_error"]
    assert regime_of(ChannelModel(sigma2=0.1)) == "rayleigh-alpha4-noise"
