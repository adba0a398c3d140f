"""Mean number of discovered peers for multichannel random-hello discovery on a PPP."""

from .analysis import (
    ChannelModel,
    DiscoveryParams,
    EsBounds,
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
    lognormal_moment,
)
from .config import Scenario, SweepSpec, load_config, parse_config
from .design import (
    PowerDesign,
    RateModel,
    design_power,
    m_from_xi,
    optimal_xi,
    rho_policy,
    suboptimal_rho,
)
from .estimators import AnalyticalDiscovery, MonteCarloDiscovery
from .exceptions import (
    BracketError,
    CapabilityError,
    ConfigError,
    ConvergenceError,
    DomainError,
    IntegrationError,
    PeerDiscError,
    RegimeError,
)
from .simulator import Estimate, SimConfig, estimate_es

__version__ = "0.1.0"
