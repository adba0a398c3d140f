import csv
import math
import xml.etree.ElementTree as ET

import numpy as np
import pytest

from peerdisc.config import Scenario, SweepSpec
from peerdisc.design import optimal_xi, suboptimal_rho
from peerdisc.figures import FIGURES, get_preset, run_figure
from peerdisc.exceptions import ConfigError
from peerdisc.svg import nice_ticks, render_sweep
from peerdisc.sweep import derive_seed, run_sweep, write_csv, write_markers_csv


def spec(var, grid, *outputs):
    return SweepSpec(var, tuple(grid), frozenset(outputs or {"analysis"}))


def read_csv(path):
    lines = path.read_text().splitlines()
    comments = [l for l in lines if l.startswith("#")]
    rows = list(csv.reader(l for l in lines if not l.startswith("#")))
    return comments, rows[0], rows[1:]


def test_csv_schema_and_units(tmp_path):
    res = run_sweep(Scenario(sigma2=0.1, trials=300),
                    spec("rho", (0.2, 0.5), "analysis", "bounds", "simulation"))
    write_csv(res, tmp_path / "s.csv", title="t")
    comments, header, rows = read_csv(tmp_path / "s.csv")
    assert header == ["series", "rho", "M", "es_closed", "es_general", "bound_lower",
                      "bound_upper", "mc_mean", "mc_stderr", "trials", "truncation_flag", "error"]
    assert any("_db" in c for c in comments) and len(rows) == 2
    assert [float(r[1]) for r in rows] == [0.2, 0.5]
    assert all(float(r[7]) > 0 and r[9] == "300" for r in rows)


def test_rho_sweep_shapes():
    grid = np.linspace(0.02, 0.98, 49)
    noisy = run_sweep(Scenario(sigma2=0.1), spec("rho", grid))
    vals = [r["es_closed"] for r in noisy.rows]
    peak = int(np.argmax(vals))
    assert 0 < peak < len(vals) - 1
    quiet = run_sweep(Scenario(), spec("rho", grid))
    vals = [r["es_closed"] for r in quiet.rows]
    assert all(b < a for a, b in zip(vals, vals[1:]))


def test_m_sweep_saturates():
    res = run_sweep(Scenario(sigma2=10 ** -0.5), spec("M", (1, 4, 16, 64, 256, 1e4, 1e6)))
    vals = [r["es_closed"] for r in res.rows]
    assert all(b > a for a, b in zip(vals, vals[1:]))
    limit = 4 * math.pi ** 1.5 * 0.25 / (2 * math.sqrt(10 ** -0.5))
    assert vals[-1] == pytest.approx(limit, rel=1e-3)


def test_simulation_failure_is_recorded_per_row():
    base = Scenario(rb_from_rate=True, trials=200)
    res = run_sweep(base, spec("xi_db", (0.0, 3.0), "analysis", "simulation"))
    assert all("simulation" in r["error"] for r in res.rows)
    assert all(r["es_closed"] > 0 for r in res.rows)


def test_markers():
    res = run_sweep(Scenario(rb_from_rate=True), spec("xi_db", np.linspace(-5, 15, 81),
                                                      "analysis", "design_markers"))
    (mk,) = res.markers
    assert mk["x"] == pytest.approx(10 * math.log10(optimal_xi(4, 1)))
    best = max(r["es_closed"] for r in res.rows)
    assert mk["es"] >= best
    res = run_sweep(Scenario(sigma2=0.1), spec("rho", (0.1, 0.5), "design_markers"))
    assert res.markers[0]["x"] == pytest.approx(0.22208582, rel=1e-6)
    assert res.markers[0]["x"] == pytest.approx(suboptimal_rho(121.76136), rel=1e-5)


def test_seeds_are_independent_and_stable():
    assert derive_seed(1, 0, 0) == derive_seed(1, 0, 0)
    assert len({derive_seed(1, i, j) for i in range(5) for j in range(5)}) == 25


def test_svg_and_marker_csv(tmp_path):
    res = run_sweep(Scenario(sigma2=0.1, trials=200),
                    spec("rho", (0.1, 0.3, 0.6), "analysis", "bounds", "simulation",
                         "design_markers"),
                    [("a", {"M": 4}), ("b", {"M": 16})])
    render_sweep(res, tmp_path / "f.svg", "title & <x>", logx=True)
    root = ET.parse(tmp_path / "f.svg").getroot()
    assert root.tag.endswith("svg")
    write_markers_csv(res, tmp_path / "m.csv")
    _, header, rows = read_csv(tmp_path / "m.csv")
    assert header == ["series", "marker", "x", "es"] and len(rows) == 2


def test_nice_ticks():
    t = nice_ticks(0, 1)
    assert t[0] == 0 and t[-1] == 1 and len(t) >= 3


def test_presets_match_captions():
    assert set(FIGURES) == {"fig3", "fig4", "fig5", "fig6", "fig7", "fig8", "fig9a", "fig9b"}
    f6 = get_preset("fig6").base_scenario
    assert (f6.alpha, f6.xi) == (4.0, 1.0)
    f7 = get_preset("fig7").base_scenario
    assert (f7.alpha, f7.xi, f7.rho) == (4.0, 1.0, 0.2)
    f8 = get_preset("fig8").base_scenario
    assert (f8.M, f8.xi, f8.rho) == (4.0, 1.0, 0.2)
    assert get_preset("fig5").base_scenario.rho == 0.5
    with pytest.raises(ConfigError):
        get_preset("fig10")


def test_fig5_marker_at_maximum():
    _, res = run_figure("fig5")
    for mk in res.markers:
        rows = [r for r in res.rows if r["series"] == mk["series"]]
        assert mk["es"] >= max(r["es_closed"] for r in rows)
        assert "no noise" in mk["series"]


def test_fig9a_shadowing_trends():
    _, res = run_figure("fig9a")
    by = {s: [r["es_closed"] or r["es_general"] for r in res.rows if r["series"] == s]
          for s in res.series}
    for i in range(len(by["chi=0 dB, no noise"])):
        quiet = [by[f"chi={c} dB, no noise"][i] for c in (0, 6, 12)]
        noisy = [by[f"chi={c} dB, snr=10 dB"][i] for c in (0, 6, 12)]
        assert max(quiet) - min(quiet) < 1e-12 * quiet[0]
        assert noisy[0] < noisy[1] < noisy[2]
