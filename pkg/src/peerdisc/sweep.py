"""Parameter sweeps: one row per (series, grid point) with analysis, bounds and MC columns."""

from __future__ import annotations

import csv
import logging
import math
from dataclasses import dataclass, field, replace

import numpy as np

from . import analysis
from .config import Scenario, SweepSpec, db_to_linear, linear_to_db
from .design import design_power, optimal_xi, suboptimal_rho
from .exceptions import PeerDiscError
from .simulator import SimConfig, default_radius, estimate_es

__all__ = [
    "COLUMNS",
    "SweepResult",
    "apply_overrides",
    "derive_seed",
    "evaluate_point",
    "run_sweep",
    "write_csv",
    "write_markers_csv",
]

log = logging.getLogger(__name__)

# the swept variable's column is inserted after "series"
COLUMNS = (
    "series", None, "M", "es_closed", "es_general", "bound_lower", "bound_upper",
    "mc_mean", "mc_stderr", "trials", "truncation_flag", "error",
)
MARKER_COLUMNS = ("series", "marker", "x", "es")


@dataclass
class SweepResult:
    variable: str
    rows: list = field(default_factory=list)
    markers: list = field(default_factory=list)
    series: list = field(default_factory=list)

    @property
    def columns(self) -> tuple:
        return tuple(self.variable if c is None else c for c in COLUMNS)


def derive_seed(seed: int, *index: int) -> int:
    """Independent 64-bit seed for a sweep point, stable across runs."""
    return int(np.random.SeedSequence([int(seed), *index]).generate_state(1, np.uint64)[0])


def apply_overrides(scenario: Scenario, overrides: dict) -> Scenario:
    """Apply sweep-style keys (``snr_db``, ``xi_db``, ``m`` ...) or raw scenario fields."""
    for key, value in overrides.items():
        if key == "delta_db":
            scenario = replace(scenario, delta=db_to_linear(value))
        elif key in ("M", "xi_db", "rho", "snr_db", "chi_db", "alpha", "m", "lambda"):
            scenario = scenario.with_value(key, value)
        else:
            scenario = replace(scenario, **{key: value})
    return scenario.validate()


def evaluate_point(scenario: Scenario, outputs, seed: int, n_jobs=None) -> dict:
    """Analysis, bounds and simulation columns for one scenario."""
    net, ch, dp = scenario.network(), scenario.channel(), scenario.params()
    row = {"M": dp.M, "error": ""}
    errors = []
    if "analysis" in outputs or "bounds" in outputs:
        rep = analysis.analytical_report(net, ch, dp)
        if "analysis" in outputs:
            row["es_closed"] = rep["closed_form"]
            row["es_general"] = rep["general"]
            if rep["general_error"]:
                errors.append(rep["general_error"])
        if "bounds" in outputs:
            row["bound_lower"] = rep["lower"]
            row["bound_upper"] = rep["upper"]
    if "simulation" in outputs:
        try:
            radius = scenario.radius or default_radius(net, ch, dp)
            cfg = SimConfig(net, ch, dp, radius, scenario.trials, seed)
            est = estimate_es(cfg, n_jobs=n_jobs)
            row.update(mc_mean=est.mean, mc_stderr=est.stderr, trials=est.trials,
                       truncation_flag=est.truncation_flag)
        except PeerDiscError as exc:
            log.warning("simulation failed at %s: %s", scenario, exc)
            errors.append(f"simulation: {exc}")
    row["error"] = "; ".join(errors)
    return row


def run_sweep(base: Scenario, spec: SweepSpec, series=None, n_jobs=None,
              progress=None) -> SweepResult:
    """Evaluate ``spec`` over every series (label, overrides) built on ``base``.

    Rows come out ordered by series then grid index. Each simulated point has
    its own seed derived from ``base.seed`` and its position.
    """
    series = series or [("base", {})]
    result = SweepResult(spec.variable)
    for si, (label, overrides) in enumerate(series):
        scen = apply_overrides(base, overrides)
        result.series.append(label)
        for gi, x in enumerate(spec.grid):
            point = scen.with_value(spec.variable, x)
            row = {"series": label, spec.variable: x}
            try:
                point.validate()
                row.update(evaluate_point(point, spec.outputs, derive_seed(base.seed, si, gi),
                                          n_jobs))
            except PeerDiscError as exc:
                row["error"] = str(exc)
            result.rows.append(row)
            if progress:
                progress(label, x, row)
        if "design_markers" in spec.outputs:
            result.markers.extend(_markers(label, scen, spec))
    return result


def _markers(label, scen, spec):
    """Design points drawn on top of a series, evaluated with the analysis."""
    var = spec.variable
    out = []
    try:
        ch = scen.channel()
        # shadowing enters the design rules through the effective density
        net = analysis.effective_density(
            scen.network(), ch, analysis.lognormal_moment(ch.shadow_chi_db, ch.alpha))
        if var == "xi_db" and ch.sigma2 == 0 and scen.rb_from_rate:
            out.append(("xi_star", linear_to_db(optimal_xi(scen.alpha, scen.delta))))
        elif var == "rho" and ch.sigma2 > 0:
            k = analysis.kappa(net, scen.rb_count(), ch.sigma2)
            out.append(("rho_hat", suboptimal_rho(k)))
        elif var == "snr_db":
            p = design_power(scen.c, net, scen.rho, scen.rb_count(), 1.0)
            out.append(("snr_hat", p.snr_db))
    except PeerDiscError as exc:
        log.warning("no design marker for %s: %s", label, exc)
        return []
    rows = []
    for name, x in out:
        y = math.nan
        try:
            point = scen.with_value(var, x)
            rep = analysis.analytical_report(point.network(), point.channel(), point.params())
            y = rep["closed_form"] if rep["closed_form"] is not None else rep["general"]
        except PeerDiscError as exc:
            log.warning("marker %s not evaluated: %s", name, exc)
        rows.append({"series": label, "marker": name, "x": x, "es": y})
    return rows


def _fmt(v):
    if v is None:
        return ""
    if isinstance(v, bool):
        return "1" if v else "0"
    if isinstance(v, float):
        return "" if math.isnan(v) else repr(v)
    return str(v)


def _unit_comments(variable):
    return [
        "# columns: E{S} values (es_*, bound_*, mc_*) are mean discovered peers per slot",
        "# columns ending in _db are decibels; M is resource blocks per slot (real-valued "
        "when tied to xi by the rate model)",
        f"# swept variable: {variable}",
    ]


def write_csv(result: SweepResult, path, title: str | None = None) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        if title:
            fh.write(f"# {title}\n")
        for line in _unit_comments(result.variable):
            fh.write(line + "\n")
        writer = csv.writer(fh)
        writer.writerow(result.columns)
        for row in result.rows:
            writer.writerow([_fmt(row.get(c)) for c in result.columns])


def write_markers_csv(result: SweepResult, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        fh.write(f"# design markers; x is in units of {result.variable}\n")
        writer = csv.writer(fh)
        writer.writerow(MARKER_COLUMNS)
        for m in result.markers:
            writer.writerow([_fmt(m[c]) for c in MARKER_COLUMNS])
