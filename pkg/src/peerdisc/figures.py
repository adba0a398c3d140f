"""Presets that regenerate the published E{S} figures at desk scale."""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .config import Scenario, SweepSpec
from .exceptions import ConfigError
from .sweep import SweepResult, run_sweep

__all__ = ["FigurePreset", "FIGURES", "DESK_TRIALS", "get_preset", "run_figure"]

DESK_TRIALS = 2000

_ALL = frozenset({"analysis", "simulation", "bounds", "design_markers"})


@dataclass(frozen=True)
class FigurePreset:
    id: str
    title: str
    base_scenario: Scenario
    sweep: SweepSpec
    series: tuple = field(default_factory=tuple)
    xlabel: str = ""
    logx: bool = False


def _spec(variable, grid, outputs):
    return SweepSpec(variable, tuple(grid), frozenset(outputs))


def _build():
    base = Scenario(lam=4.0, alpha=4.0, xi=1.0, trials=DESK_TRIALS)
    presets = [
        FigurePreset(
            "fig3", "E{S} vs M, no noise (xi = 0 dB, rho = 0.5)",
            replace(base, rho=0.5),
            _spec("M", (1, 2, 4, 8, 16), {"analysis", "simulation"}),
            tuple((f"alpha={a:g}, m={m:g}", {"alpha": a, "m": m})
                  for a in (3.0, 4.0) for m in (1.0, 2.7, 4.0)),
            "M (RBs per slot)",
        ),
        FigurePreset(
            "fig4", "E{S} vs M, snr = 5 dB (xi = 0 dB, rho = 0.5)",
            replace(base, rho=0.5).with_value("snr_db", 5.0),
            _spec("M", (1, 2, 4, 8, 16, 32, 64), {"analysis", "simulation"}),
            tuple((f"alpha={a:g}, m={m:g}", {"alpha": a, "m": m})
                  for a, m in ((4.0, 1.0), (4.0, 2.0), (3.0, 1.0), (3.0, 2.0))),
            "M (RBs per slot)", True,
        ),
        FigurePreset(
            "fig5", "E{S} vs xi with M = beta ln(1 + xi/delta) (rho = 0.5, beta = 10)",
            replace(base, rho=0.5, rb_from_rate=True, beta=10.0),
            _spec("xi_db", np.linspace(-10, 20, 31), {"analysis", "design_markers"}),
            tuple((f"alpha={a:g}, delta={d:g} dB, {lab}",
                   {"alpha": a, "delta_db": d, "snr_db": s})
                  for s, lab in ((np.inf, "no noise"), (10.0, "snr=10 dB"))
                  for a in (3.0, 4.0) for d in (3.0, 6.0)),
            "xi (dB)",
        ),
        FigurePreset(
            "fig6", "E{S} vs rho (alpha = 4, xi = 0 dB)",
            base,
            _spec("rho", np.round(np.linspace(0.05, 0.95, 19), 10), _ALL),
            tuple((f"M={M:g}, snr={s:g} dB", {"M": M, "snr_db": s})
                  for M in (4.0, 16.0) for s in (10.0, 20.0)),
            "rho",
        ),
        FigurePreset(
            "fig7", "E{S} vs snr (alpha = 4, xi = 0 dB, rho = 0.2)",
            replace(base, rho=0.2, c=100.0),
            _spec("snr_db", np.linspace(-10, 30, 17), _ALL),
            tuple((f"M={M:g}", {"M": M}) for M in (1.0, 4.0, 16.0)),
            "snr (dB)",
        ),
        FigurePreset(
            "fig8", "E{S} vs shadowing chi (M = 4, xi = 0 dB, rho = 0.2)",
            replace(base, rho=0.2, M=4.0),
            _spec("chi_db", (0, 2, 4, 6, 8, 10, 12), {"analysis", "simulation"}),
            (
                ("no noise, alpha=4", {"alpha": 4.0, "snr_db": np.inf}),
                ("no noise, alpha=3", {"alpha": 3.0, "snr_db": np.inf}),
                ("snr=5 dB, alpha=4, m=1", {"alpha": 4.0, "snr_db": 5.0}),
                ("snr=5 dB, alpha=3, m=1", {"alpha": 3.0, "snr_db": 5.0}),
                ("snr=5 dB, alpha=4, m=2", {"alpha": 4.0, "snr_db": 5.0, "m": 2.0}),
            ),
            "chi (dB)",
        ),
        FigurePreset(
            "fig9a", "Shadowing and the xi design (rho = 0.5, beta = 10, m = 1)",
            replace(base, rho=0.5, rb_from_rate=True, beta=10.0),
            _spec("xi_db", np.linspace(-10, 20, 31), {"analysis", "design_markers"}),
            tuple((f"chi={c:g} dB, {lab}", {"chi_db": c, "snr_db": s})
                  for s, lab in ((np.inf, "no noise"), (10.0, "snr=10 dB"))
                  for c in (0.0, 6.0, 12.0)),
            "xi (dB)",
        ),
        FigurePreset(
            "fig9b", "Shadowing and the rho design (M = 4, xi = 0 dB, m = 1)",
            replace(base, M=4.0),
            _spec("rho", np.round(np.linspace(0.05, 0.95, 19), 10), _ALL),
            tuple((f"chi={c:g} dB, snr={s:g} dB", {"chi_db": c, "snr_db": s})
                  for c in (0.0, 12.0) for s in (10.0, 20.0)),
            "rho",
        ),
    ]
    return {p.id: p for p in presets}


FIGURES = _build()


def get_preset(fig_id: str) -> FigurePreset:
    try:
        return FIGURES[fig_id]
    except KeyError:
        raise ConfigError(
            f"unknown figure {fig_id!r}; choose from {', '.join(FIGURES)}", "figure"
        ) from None


def run_figure(fig_id: str, trials=None, seed=None, radius=None, n_jobs=None,
               progress=None) -> tuple[FigurePreset, SweepResult]:
    """Evaluate a preset; ``trials``/``seed``/``radius`` override the defaults."""
    preset = get_preset(fig_id)
    base = preset.base_scenario
    overrides = {k: v for k, v in (("trials", trials), ("seed", seed), ("radius", radius))
                 if v is not None}
    if overrides:
        base = replace(base, **overrides).validate()
    result = run_sweep(base, preset.sweep, list(preset.series), n_jobs=n_jobs, progress=progress)
    return preset, result
