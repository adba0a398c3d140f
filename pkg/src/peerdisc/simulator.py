"""Monte Carlo estimate of the mean number of discovered peers.

One trial drops a PPP on a disk of radius ``R`` around a receiving node at
the origin, lets every node transmit with probability ``rho`` on a uniformly
chosen RB, and counts the transmitters inside ``R/2`` whose SINR at the origin
exceeds ``xi``. Interferers come from the whole disk, so targets near the
edge of the counting region still see a full ring of interference; the mean
interference from beyond ``R`` is added as a constant (``far_field``).

Each trial draws from its own Philox stream keyed by ``seed`` with the trial
index in the counter, so estimates are bit-identical whatever the chunking
or number of workers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .analysis import ChannelModel, DiscoveryParams, NetworkModel, delta_i
from .exceptions import ConfigError, DomainError

__all__ = [
    "SimConfig",
    "Estimate",
    "TrialOutcome",
    "default_radius",
    "trial_rng",
    "sample_ppp",
    "sample_nakagami_power",
    "sample_lognormal_shadow",
    "run_trial",
    "simulate_counts",
    "estimate_es",
    "far_field_interference",
]

MIN_EXPECTED_NODES = 10.0
MAX_DEFAULT_RADIUS = 50.0
CHUNK = 512
_U64 = 2 ** 64

# counter word 3 selects the stream within a trial
_DISK_STREAM = 0
_ANNULUS_STREAM = 1


@dataclass(frozen=True)
class SimConfig:
    net: NetworkModel
    ch: ChannelModel
    dp: DiscoveryParams
    window_radius: float
    trials: int = 20_000
    seed: int = 20140101
    far_field: bool = True

    def __post_init__(self):
        if not (self.window_radius > 0 and math.isfinite(self.window_radius)):
            raise ConfigError(f"must be positive, got {self.window_radius}", "window_radius")
        if int(self.trials) != self.trials or self.trials < 1:
            raise ConfigError(f"must be an integer >= 1, got {self.trials}", "trials")
        if int(self.seed) != self.seed or not 0 <= self.seed < _U64:
            raise ConfigError(f"must be an unsigned 64-bit integer, got {self.seed}", "seed")
        if not float(self.dp.M).is_integer():
            raise ConfigError(f"simulation needs an integer RB count, got {self.dp.M}", "M")
        expected = self.net.lam * math.pi * self.window_radius ** 2
        if expected < MIN_EXPECTED_NODES:
            raise ConfigError(
                f"window holds only {expected:.2f} nodes on average (need >= "
                f"{MIN_EXPECTED_NODES:g}); enlarge the radius", "window_radius"
            )

    @classmethod
    def with_default_radius(cls, net, ch, dp, trials=20_000, seed=20140101):
        return cls(net, ch, dp, default_radius(net, ch, dp), trials, seed)


@dataclass(frozen=True)
class Estimate:
    mean: float
    stderr: float
    trials: int
    truncation_flag: bool = False


@dataclass(frozen=True)
class TrialOutcome:
    discovered_count: int
    node_count: int


def default_radius(net: NetworkModel, ch: ChannelModel, dp: DiscoveryParams) -> float:
    """Window radius large enough that targets beyond ``R/2`` are negligible.

    A target at effective distance ``r`` survives interference with
    probability about ``exp(-A r^2)``; noise adds a hard-ish link range set by
    a 1e-4 fading tail. Shadowing stretches physical distances by
    ``theta^(1/alpha)``, covered up to 2.5 standard deviations. ``R`` is twice
    the target reach, at least 15 mean node spacings, capped at 50.
    """
    spacing = net.lam ** -0.5
    chi, a = ch.shadow_chi_db, ch.alpha
    lam_eff = net.lam * math.exp(0.5 * (math.log(10) / 5 * chi / a) ** 2)
    A = lam_eff * dp.rho / dp.M * math.pi * delta_i(ch.m_i, a) * (ch.m_s * dp.xi) ** (2 / a)
    reach = math.sqrt(14 / A) * 10 ** (2.5 * chi / (10 * a))
    if ch.sigma2 > 0:
        fade_tail = -math.log(1e-4) / ch.m_s + 3 / math.sqrt(ch.m_s)
        link = (fade_tail * 10 ** (2.5 * chi / 10) / (ch.sigma2 * dp.xi)) ** (1 / a)
        reach = min(reach, link)
    return min(max(15 * spacing, 2 * reach), MAX_DEFAULT_RADIUS)


def far_field_interference(cfg: SimConfig, radius: float) -> float:
    """Mean co-channel interference from transmitters beyond ``radius`` (Campbell)."""
    ch = cfg.ch
    density = cfg.net.lam * cfg.dp.rho / cfg.dp.M
    mean_shadow = math.exp(0.5 * (math.log(10) / 10 * ch.shadow_chi_db) ** 2)
    return density * mean_shadow * 2 * math.pi * radius ** (2 - ch.alpha) / (ch.alpha - 2)


def trial_rng(seed: int, index: int, stream: int = _DISK_STREAM) -> np.random.Generator:
    """Independent generator for ``(seed, trial index, stream)``."""
    return np.random.Generator(np.random.Philox(key=int(seed), counter=[0, 0, int(index), stream]))


def sample_ppp(lam: float, radius: float, rng: np.random.Generator) -> np.ndarray:
    """Homogeneous PPP on the disk of given radius centred at the origin, shape ``(n, 2)``."""
    if lam < 0 or radius <= 0:
        raise DomainError("need lam >= 0 and radius > 0")
    n = rng.poisson(lam * math.pi * radius ** 2)
    r = radius * np.sqrt(rng.random(n))
    theta = 2 * math.pi * rng.random(n)
    return np.column_stack((r * np.cos(theta), r * np.sin(theta)))


def sample_nakagami_power(m: float, rng: np.random.Generator, size=None):
    """Unit-mean Gamma(m) power gain of a Nakagami-m channel (``m >= 0.5``)."""
    if not m >= 0.5:
        raise DomainError(f"Nakagami parameter must be >= 0.5, got {m}")
    return rng.gamma(m, 1.0 / m, size)


def sample_lognormal_shadow(chi_db: float, rng: np.random.Generator, size=None):
    """Linear shadowing gain ``10^(theta/10)`` with ``theta ~ N(0, chi_db^2)``."""
    if chi_db < 0:
        raise DomainError(f"chi_db must be >= 0, got {chi_db}")
    if chi_db == 0:
        return 1.0 if size is None else np.ones(size)
    return 10.0 ** (rng.normal(0.0, chi_db, size) / 10.0)


def _draw_transmitters(cfg, rng, r_in, r_out):
    """Transmitting nodes on the annulus ``r_in <= r < r_out`` (a disk when r_in = 0).

    Returns ``(node_count, radius, rb, signal, interference)`` where signal and
    interference are received powers at the origin before noise.
    """
    ch, dp = cfg.ch, cfg.dp
    area = math.pi * (r_out ** 2 - r_in ** 2)
    n = int(rng.poisson(cfg.net.lam * area))
    n_tx = int(rng.binomial(n, dp.rho))
    r = np.sqrt(r_in ** 2 + (r_out ** 2 - r_in ** 2) * rng.random(n_tx))
    rb = rng.integers(0, int(dp.M), n_tx)
    h = sample_nakagami_power(ch.m_s, rng, n_tx)
    g = h if ch.m_i == ch.m_s else sample_nakagami_power(ch.m_i, rng, n_tx)
    path = r ** -ch.alpha
    if ch.shadow_chi_db > 0:
        path = path * sample_lognormal_shadow(ch.shadow_chi_db, rng, n_tx)
    return n, r, rb, h * path, g * path


def _count_discovered(cfg, trial_ids, n_trials, r, rb, sig, intf, outer):
    M = int(cfg.dp.M)
    key = trial_ids * M + rb
    totals = np.bincount(key, weights=intf, minlength=n_trials * M)
    others = np.maximum(totals[key] - intf, 0.0)
    floor = cfg.ch.sigma2 + (far_field_interference(cfg, outer) if cfg.far_field else 0.0)
    with np.errstate(divide="ignore"):
        sinr = sig / (others + floor)
    hit = (r < outer / 2) & (sinr > cfg.dp.xi)
    return np.bincount(trial_ids[hit], minlength=n_trials)


def _simulate_chunk(cfg, start, stop, radius, annulus_to=None):
    parts = []
    node_counts = []
    for t in range(start, stop):
        rng = trial_rng(cfg.seed, t)
        n, *arrays = _draw_transmitters(cfg, rng, 0.0, radius)
        if annulus_to is not None:
            n2, *extra = _draw_transmitters(cfg, trial_rng(cfg.seed, t, _ANNULUS_STREAM),
                                            radius, annulus_to)
            n += n2
            arrays = [np.concatenate(pair) for pair in zip(arrays, extra)]
        parts.append(arrays)
        node_counts.append(n)
    sizes = [len(p[0]) for p in parts]
    trial_ids = np.repeat(np.arange(stop - start), sizes)
    r, rb, sig, intf = (np.concatenate([p[i] for p in parts]) for i in range(4))
    outer = radius if annulus_to is None else annulus_to
    counts = _count_discovered(cfg, trial_ids, stop - start, r, rb, sig, intf, outer)
    return counts, np.asarray(node_counts)


def run_trial(cfg: SimConfig, index: int = 0) -> TrialOutcome:
    """Single trial ``index`` of the configuration (same draws as inside :func:`estimate_es`)."""
    counts, nodes = _simulate_chunk(cfg, index, index + 1, cfg.window_radius)
    return TrialOutcome(int(counts[0]), int(nodes[0]))


def simulate_counts(cfg: SimConfig, n_jobs: int | None = None, trials: int | None = None,
                    doubled: bool = False) -> np.ndarray:
    """Per-trial discovered counts for trials ``0 .. trials-1``.

    With ``doubled`` the window is extended to ``2R`` by superposing an
    independent annulus, so the inner disk draws are shared with the plain run.
    """
    trials = cfg.trials if trials is None else trials
    bounds = [(s, min(s + CHUNK, trials)) for s in range(0, trials, CHUNK)]
    R = cfg.window_radius
    extra = 2 * R if doubled else None
    if n_jobs in (None, 1) or len(bounds) == 1:
        results = [_simulate_chunk(cfg, a, b, R, extra) for a, b in bounds]
    else:
        from joblib import Parallel, delayed

        results = Parallel(n_jobs=n_jobs)(
            delayed(_simulate_chunk)(cfg, a, b, R, extra) for a, b in bounds
        )
    return np.concatenate([c for c, _ in results])


def estimate_es(cfg: SimConfig, n_jobs: int | None = None, check_truncation: bool = True
                ) -> Estimate:
    """Monte Carlo E{S} with standard error.

    The receive-mode probability ``1 - rho`` of the typical node is applied as
    a factor rather than sampled. When ``check_truncation`` is set, the first
    10% of trials are rerun on a doubled window; if the paired mean moves by
    more than one standard error the estimate is flagged.
    """
    counts = simulate_counts(cfg, n_jobs)
    scale = 1.0 - cfg.dp.rho
    n = len(counts)
    mean = scale * counts.mean()
    stderr = scale * counts.std(ddof=1) / math.sqrt(n) if n > 1 else 0.0
    flag = False
    if check_truncation:
        sub = max(1, n // 10)
        wide = simulate_counts(cfg, n_jobs, trials=sub, doubled=True)
        shift = scale * abs(wide.mean() - counts[:sub].mean())
        flag = bool(shift > stderr)
    return Estimate(float(mean), float(stderr), n, flag)


def with_radius(cfg: SimConfig, radius: float) -> SimConfig:
    return replace(cfg, window_radius=radius)
