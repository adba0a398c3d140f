"""Scenario and sweep configuration files.

The format is INI (``configparser``): flat ``key = value`` pairs grouped in
sections. Quantities usually quoted in dB may be given in dB::

    [network]
    lambda = 4

    [channel]
    alpha = 4
    m = 1            ; or m_s / m_i separately
    snr_db = 5       ; or sigma2 = 0.316..., snr_db = inf for no noise
    chi_db = 0

    [discovery]
    M = 4            ; or M = rate  (M = beta * ln(1 + xi/delta))
    xi_db = 0        ; or xi = 1
    rho = 0.5

    [design]
    beta = 10
    delta_db = 0     ; or delta = 1
    c = 100

    [simulation]
    trials = 20000
    seed = 20140101
    radius = auto

    [sweep]
    variable = rho
    grid = 0.1, 0.2, 0.3   ; or start / stop / num / spacing = lin|log
    outputs = analysis, simulation, bounds

Everything is stored linear internally; conversion happens here.
"""

from __future__ import annotations

import configparser
import math
from dataclasses import dataclass, field, replace

import numpy as np

from .analysis import ChannelModel, DiscoveryParams, NetworkModel
from .design import RateModel, m_from_xi
from .exceptions import ConfigError, PeerDiscError

__all__ = [
    "DEFAULT_SEED",
    "DEFAULT_TRIALS",
    "Scenario",
    "SweepSpec",
    "SWEEP_VARIABLES",
    "SWEEP_OUTPUTS",
    "parse_config",
    "load_config",
    "dump_config",
    "db_to_linear",
    "linear_to_db",
]

DEFAULT_SEED = 20140101
DEFAULT_TRIALS = 20_000

SWEEP_VARIABLES = ("M", "xi_db", "rho", "snr_db", "chi_db", "alpha", "m", "lambda")
SWEEP_OUTPUTS = ("analysis", "simulation", "bounds", "design_markers")

_KNOWN = {
    "network": {"lambda"},
    "channel": {"alpha", "m", "m_s", "m_i", "snr_db", "sigma2", "chi_db"},
    "discovery": {"m", "xi", "xi_db", "rho"},
    "design": {"beta", "delta", "delta_db", "c"},
    "simulation": {"trials", "seed", "radius"},
    "sweep": {"variable", "grid", "start", "stop", "num", "spacing", "outputs"},
}


def db_to_linear(x_db: float) -> float:
    return 10.0 ** (x_db / 10.0)


def linear_to_db(x: float) -> float:
    return 10.0 * math.log10(x) if x > 0 else -math.inf


@dataclass(frozen=True)
class Scenario:
    """Complete parameter set for one evaluation point (all linear scale)."""

    lam: float = 4.0
    alpha: float = 4.0
    m_s: float = 1
    m_i: float = 1
    sigma2: float = 0.0
    chi_db: float = 0.0
    M: float = 4.0
    xi: float = 1.0
    rho: float = 0.5
    beta: float = 10.0
    delta: float = 1.0
    c: float = 100.0
    rb_from_rate: bool = False
    trials: int = DEFAULT_TRIALS
    seed: int = DEFAULT_SEED
    radius: float | None = None

    def network(self) -> NetworkModel:
        return _wrap(NetworkModel, "network.lambda", self.lam)

    def channel(self) -> ChannelModel:
        return _wrap(ChannelModel, "channel", self.alpha, self.m_s, self.m_i, self.sigma2,
                     self.chi_db)

    def rate_model(self) -> RateModel:
        return _wrap(RateModel, "design", self.beta, self.delta)

    def rb_count(self) -> float:
        if self.rb_from_rate:
            return m_from_xi(self.rate_model(), self.xi)
        return self.M

    def params(self) -> DiscoveryParams:
        return _wrap(DiscoveryParams, "discovery", self.rb_count(), self.xi, self.rho)

    @property
    def snr_db(self) -> float:
        return math.inf if self.sigma2 == 0 else -linear_to_db(self.sigma2)

    def with_value(self, variable: str, value: float) -> "Scenario":
        """Copy with one sweep variable set (dB variables take dB values)."""
        if variable == "M":
            return replace(self, M=value, rb_from_rate=False)
        if variable == "xi_db":
            return replace(self, xi=db_to_linear(value))
        if variable == "snr_db":
            return replace(self, sigma2=0.0 if math.isinf(value) else db_to_linear(-value))
        if variable == "m":
            return replace(self, m_s=value, m_i=value)
        if variable == "lambda":
            return replace(self, lam=value)
        if variable in ("rho", "chi_db", "alpha"):
            return replace(self, **{variable: value})
        raise ConfigError(f"unknown sweep variable {variable!r}", "sweep.variable")

    def value_of(self, variable: str) -> float:
        return {
            "M": self.rb_count(),
            "xi_db": linear_to_db(self.xi),
            "snr_db": self.snr_db,
            "m": self.m_s,
            "lambda": self.lam,
            "rho": self.rho,
            "chi_db": self.chi_db,
            "alpha": self.alpha,
        }[variable]

    def validate(self) -> "Scenario":
        for name, key, ok, rule in _FIELD_RULES:
            v = getattr(self, name)
            if not (isinstance(v, (int, float)) and ok(v)):
                raise ConfigError(f"{rule}, got {v!r}", key)
        self.params()
        if int(self.trials) != self.trials or self.trials < 1:
            raise ConfigError(f"must be an integer >= 1, got {self.trials}", "simulation.trials")
        if int(self.seed) != self.seed or not 0 <= self.seed < 2 ** 64:
            raise ConfigError(f"must be an unsigned 64-bit integer, got {self.seed}",
                              "simulation.seed")
        if self.radius is not None and not self.radius > 0:
            raise ConfigError(f"must be positive, got {self.radius}", "simulation.radius")
        if not self.c > 1:
            raise ConfigError(f"must exceed 1, got {self.c}", "design.c")
        return self


_FIELD_RULES = (
    ("lam", "network.lambda", lambda v: 0 < v < math.inf, "must be positive"),
    ("alpha", "channel.alpha", lambda v: 2 < v < math.inf, "must exceed 2"),
    ("m_s", "channel.m_s", lambda v: 0.5 <= v < math.inf, "must be >= 0.5"),
    ("m_i", "channel.m_i", lambda v: 0.5 <= v < math.inf, "must be >= 0.5"),
    ("sigma2", "channel.sigma2", lambda v: 0 <= v < math.inf, "must be finite and >= 0"),
    ("chi_db", "channel.chi_db", lambda v: 0 <= v < math.inf, "must be >= 0"),
    ("M", "discovery.M", lambda v: 0 < v < math.inf, "must be positive"),
    ("xi", "discovery.xi", lambda v: 0 < v < math.inf, "must be positive"),
    ("rho", "discovery.rho", lambda v: 0 < v < 1, "must lie in (0, 1)"),
    ("beta", "design.beta", lambda v: 0 < v < math.inf, "must be positive"),
    ("delta", "design.delta", lambda v: 0 < v < math.inf, "must be positive"),
)


@dataclass(frozen=True)
class SweepSpec:
    variable: str
    grid: tuple
    outputs: frozenset = field(default_factory=lambda: frozenset({"analysis"}))

    def __post_init__(self):
        if self.variable not in SWEEP_VARIABLES:
            raise ConfigError(
                f"must be one of {', '.join(SWEEP_VARIABLES)}, got {self.variable!r}",
                "sweep.variable",
            )
        grid = tuple(float(g) for g in self.grid)
        object.__setattr__(self, "grid", grid)
        if len(grid) < 2:
            raise ConfigError("needs at least 2 points", "sweep.grid")
        if any(b <= a for a, b in zip(grid, grid[1:])):
            raise ConfigError("must be strictly increasing", "sweep.grid")
        bad = [g for g in grid if not _in_domain(self.variable, g)]
        if bad:
            raise ConfigError(f"values outside the domain of {self.variable}: {bad}", "sweep.grid")
        outputs = frozenset(self.outputs)
        unknown = outputs - set(SWEEP_OUTPUTS)
        if unknown or not outputs:
            raise ConfigError(
                f"choose from {', '.join(SWEEP_OUTPUTS)}; got {sorted(outputs)}", "sweep.outputs"
            )
        object.__setattr__(self, "outputs", outputs)


def _in_domain(variable, v):
    if variable == "snr_db":
        return not math.isnan(v)
    if not math.isfinite(v):
        return False
    return {
        "M": v > 0,
        "rho": 0 < v < 1,
        "alpha": v > 2,
        "m": v >= 0.5,
        "lambda": v > 0,
        "chi_db": v >= 0,
        "xi_db": True,
    }[variable]


def _wrap(cls, field_name, *args):
    try:
        return cls(*args)
    except ConfigError:
        raise
    except PeerDiscError as exc:
        raise ConfigError(str(exc), field_name) from exc


# --- parsing -----------------------------------------------------------------

def parse_config(text: str) -> tuple[Scenario, SweepSpec | None]:
    """Parse INI text into a validated scenario and an optional sweep."""
    cp = configparser.ConfigParser(inline_comment_prefixes=(";", "#"))
    cp.optionxform = str.lower
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"cannot parse config: {exc}") from exc
    for section in cp.sections():
        if section not in _KNOWN:
            raise ConfigError("unknown section", section)
        for key in cp[section]:
            if key not in _KNOWN[section]:
                raise ConfigError("unknown key", f"{section}.{key}")

    values = {}

    def num(section, key, conv=float):
        raw = cp.get(section, key, fallback=None)
        if raw is None:
            return None
        try:
            return conv(raw.strip())
        except ValueError:
            raise ConfigError(f"not a number: {raw!r}", f"{section}.{key}") from None

    lam = num("network", "lambda")
    if lam is not None:
        values["lam"] = lam

    if cp.has_section("channel"):
        for key in ("alpha", "chi_db"):
            v = num("channel", key)
            if v is not None:
                values[key] = v
        m = num("channel", "m")
        if m is not None:
            values["m_s"] = values["m_i"] = m
        for key in ("m_s", "m_i"):
            v = num("channel", key)
            if v is not None:
                values[key] = v
        snr_db, sigma2 = num("channel", "snr_db"), num("channel", "sigma2")
        if snr_db is not None and sigma2 is not None:
            raise ConfigError("give either snr_db or sigma2, not both", "channel.snr_db")
        if snr_db is not None:
            if math.isnan(snr_db) or snr_db == -math.inf:
                raise ConfigError(f"invalid SNR {snr_db}", "channel.snr_db")
            values["sigma2"] = 0.0 if snr_db == math.inf else db_to_linear(-snr_db)
        if sigma2 is not None:
            values["sigma2"] = sigma2

    if cp.has_section("discovery"):
        raw_m = cp.get("discovery", "m", fallback=None)
        if raw_m is not None:
            if raw_m.strip().lower() == "rate":
                values["rb_from_rate"] = True
            else:
                values["M"] = num("discovery", "m")
        xi, xi_db = num("discovery", "xi"), num("discovery", "xi_db")
        if xi is not None and xi_db is not None:
            raise ConfigError("give either xi or xi_db, not both", "discovery.xi")
        if xi_db is not None:
            values["xi"] = db_to_linear(xi_db)
        if xi is not None:
            values["xi"] = xi
        rho = num("discovery", "rho")
        if rho is not None:
            values["rho"] = rho

    if cp.has_section("design"):
        for key in ("beta", "c"):
            v = num("design", key)
            if v is not None:
                values[key] = v
        d, d_db = num("design", "delta"), num("design", "delta_db")
        if d is not None and d_db is not None:
            raise ConfigError("give either delta or delta_db, not both", "design.delta")
        if d_db is not None:
            values["delta"] = db_to_linear(d_db)
        if d is not None:
            values["delta"] = d

    if cp.has_section("simulation"):
        for key, conv in (("trials", int), ("seed", int)):
            v = num("simulation", key, conv)
            if v is not None:
                values[key] = v
        raw_r = cp.get("simulation", "radius", fallback=None)
        if raw_r is not None and raw_r.strip().lower() != "auto":
            values["radius"] = num("simulation", "radius")

    scenario = Scenario(**values).validate()
    sweep = _parse_sweep(cp) if cp.has_section("sweep") else None
    return scenario, sweep


def _parse_sweep(cp) -> SweepSpec:
    sec = cp["sweep"]
    if "variable" not in sec:
        raise ConfigError("missing", "sweep.variable")
    variable = sec["variable"].strip()
    if variable.lower() == "m" and variable != "m":
        variable = "M"
    if "grid" in sec:
        try:
            grid = [float(tok) for tok in sec["grid"].split(",") if tok.strip()]
        except ValueError:
            raise ConfigError(f"not a number list: {sec['grid']!r}", "sweep.grid") from None
    else:
        try:
            start, stop = float(sec["start"]), float(sec["stop"])
            num = int(sec.get("num", "11"))
        except (KeyError, ValueError) as exc:
            raise ConfigError(f"need grid or start/stop/num ({exc})", "sweep.grid") from None
        spacing = sec.get("spacing", "lin").strip().lower()
        if spacing == "log":
            if start <= 0 or stop <= 0:
                raise ConfigError("log spacing needs positive start/stop", "sweep.spacing")
            grid = list(np.geomspace(start, stop, num))
        elif spacing == "lin":
            grid = list(np.linspace(start, stop, num))
        else:
            raise ConfigError(f"must be lin or log, got {spacing!r}", "sweep.spacing")
    outputs = [tok.strip() for tok in sec.get("outputs", "analysis").split(",") if tok.strip()]
    return SweepSpec(variable, tuple(grid), frozenset(outputs))


def load_config(path) -> tuple[Scenario, SweepSpec | None]:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc.strerror}", "config") from None
    return parse_config(text)


def dump_config(scenario: Scenario, sweep: SweepSpec | None = None) -> str:
    """Canonical INI text; ``parse_config(dump_config(s)) == (s, sweep)``."""
    s = scenario
    lines = [
        "[network]",
        f"lambda = {s.lam!r}",
        "",
        "[channel]",
        f"alpha = {s.alpha!r}",
        f"m_s = {s.m_s!r}",
        f"m_i = {s.m_i!r}",
        f"sigma2 = {s.sigma2!r}",
        f"chi_db = {s.chi_db!r}",
        "",
        "[discovery]",
        f"M = {'rate' if s.rb_from_rate else repr(s.M)}",
        f"xi = {s.xi!r}",
        f"rho = {s.rho!r}",
        "",
        "[design]",
        f"beta = {s.beta!r}",
        f"delta = {s.delta!r}",
        f"c = {s.c!r}",
        "",
        "[simulation]",
        f"trials = {s.trials}",
        f"seed = {s.seed}",
        f"radius = {'auto' if s.radius is None else repr(s.radius)}",
    ]
    if sweep is not None:
        lines += [
            "",
            "[sweep]",
            f"variable = {sweep.variable}",
            "grid = " + ", ".join(repr(g) for g in sweep.grid),
            "outputs = " + ", ".join(o for o in SWEEP_OUTPUTS if o in sweep.outputs),
        ]
    return "\n".join(lines) + "\n"

