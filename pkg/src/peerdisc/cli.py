"""Command line front end.

    peerdisc analyze  --config scen.ini [--method auto|zero-noise|rayleigh-noise|general]
    peerdisc design   --config scen.ini
    peerdisc simulate --config scen.ini [--trials N] [--seed S] [--radius R]
    peerdisc sweep    --config sweep.ini [--variable V --grid a,b,c] [--svg]
    peerdisc figure   fig6 [--trials N] [--out DIR]

Exit status: 0 ok, 2 configuration error, 3 numerical failure, 4 regime error.
"""

from __future__ import annotations

import argparse
import logging
import math
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np
from scipy.optimize import minimize_scalar

from . import analysis, design
from .config import Scenario, SweepSpec, linear_to_db, load_config
from .exceptions import ConfigError, PeerDiscError
from .figures import FIGURES, run_figure
from .simulator import SimConfig, default_radius, estimate_es
from .svg import render_sweep
from .sweep import run_sweep, write_csv, write_markers_csv

log = logging.getLogger("peerdisc")

XI_SEARCH_DB = (-10.0, 30.0, 401)


def _common(p: argparse.ArgumentParser, sim=True):
    p.add_argument("--config", metavar="PATH", help="scenario INI file (defaults if omitted)")
    p.add_argument("--out", metavar="DIR", help="write CSV (and SVG) files here")
    p.add_argument("-v", "--verbose", action="store_true")
    if sim:
        p.add_argument("--trials", type=int, metavar="N")
        p.add_argument("--seed", type=int, metavar="U64")
        p.add_argument("--radius", type=float, metavar="R", help="simulation window radius")
        p.add_argument("--jobs", type=int, metavar="N", help="worker processes for trials")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="peerdisc", description="Mean discovered peers of random-hello discovery on a PPP."
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="analytical E{S}, general integral and bounds")
    _common(p, sim=False)
    p.add_argument("--method", choices=("auto", "zero-noise", "rayleigh-noise", "general"),
                   default="auto")

    p = sub.add_parser("design", help="xi*, M(xi*), rho-hat and the power rule")
    _common(p, sim=False)

    p = sub.add_parser("simulate", help="Monte Carlo E{S} for one scenario")
    _common(p)

    p = sub.add_parser("sweep", help="sweep one variable (config [sweep] section)")
    _common(p)
    p.add_argument("--variable", help="override sweep.variable")
    p.add_argument("--grid", help="override sweep.grid (comma list)")
    p.add_argument("--outputs", help="override sweep.outputs (comma list)")
    p.add_argument("--svg", action="store_true", help="also write an SVG chart")

    p = sub.add_parser("figure", help="regenerate a figure preset (CSV + SVG)")
    p.add_argument("id", choices=sorted(FIGURES))
    p.add_argument("--out", metavar="DIR", default=".")
    p.add_argument("--trials", type=int, metavar="N")
    p.add_argument("--seed", type=int, metavar="U64")
    p.add_argument("--radius", type=float, metavar="R")
    p.add_argument("--jobs", type=int, metavar="N")
    p.add_argument("--svg", action="store_true", help="accepted for symmetry; SVG is always written")
    p.add_argument("-v", "--verbose", action="store_true")
    return parser


def _load(args) -> tuple[Scenario, SweepSpec | None]:
    if args.config:
        scen, sweep = load_config(args.config)
    else:
        scen, sweep = Scenario(), None
    over = {}
    for key in ("trials", "seed", "radius"):
        v = getattr(args, key, None)
        if v is not None:
            over[key] = v
    if over:
        scen = replace(scen, **over).validate()
    return scen, sweep


def _fmt(v):
    if v is None:
        return "-"
    if isinstance(v, float):
        return f"{v:.10g}"
    return str(v)


def _print_table(rows, out=None):
    out = out or sys.stdout
    width = max(len(k) for k, *_ in rows)
    for key, value, note in rows:
        line = f"{key:<{width}}  {_fmt(value)}"
        out.write(line + (f"    [{note}]" if note else "") + "\n")


def _outdir(args) -> Path | None:
    if not getattr(args, "out", None):
        return None
    d = Path(args.out)
    d.mkdir(parents=True, exist_ok=True)
    return d


def cmd_analyze(args) -> int:
    scen, _ = _load(args)
    net, ch, dp = scen.network(), scen.channel(), scen.params()
    rows = [
        ("regime", analysis.regime_of(ch), ""),
        ("lambda", net.lam, ""),
        ("M", dp.M, "rate model" if scen.rb_from_rate else ""),
        ("xi_db", linear_to_db(dp.xi), ""),
        ("rho", dp.rho, ""),
        ("snr_db", scen.snr_db, ""),
    ]
    if args.method == "auto":
        rep = analysis.analytical_report(net, ch, dp)
        rows.append(("effective_lambda", rep["effective_lambda"],
                     "shadowing folded into density" if ch.shadow_chi_db > 0 else ""))
        if rep["closed_form"] is not None:
            rows.append((f"es_{rep['closed_form_name']}", rep["closed_form"], "closed form"))
        rows.append(("es_general", rep["general"], rep["general_error"] or "general integral"))
        if rep["kappa"] is not None:
            rows += [("kappa", rep["kappa"], ""),
                     ("bound_lower", rep["lower"], "Rayleigh, alpha=4"),
                     ("bound_upper", rep["upper"], "zero-noise limit")]
    else:
        fn = {"zero-noise": lambda: analysis.es_zero_noise(ch, dp),
              "rayleigh-noise": lambda: analysis.es_rayleigh_noise(net, ch, dp),
              "general": lambda: analysis.es_general(net, ch, dp)}[args.method]
        rows.append((f"es_{args.method.replace('-', '_')}", fn(), args.method))
    _print_table(rows)
    return 0


def _xi_grid_search(scen: Scenario):
    """Best threshold on a log grid when noise rules out the closed-form optimum."""
    lo, hi, n = XI_SEARCH_DB

    def es_at(xdb):
        s = scen.with_value("xi_db", float(xdb))
        rep = analysis.analytical_report(s.network(), s.channel(), s.params())
        es = rep["closed_form"] if rep["closed_form"] is not None else rep["general"]
        return -math.inf if es is None else es

    grid = np.linspace(lo, hi, n)
    values = [es_at(x) for x in grid]
    i = int(np.argmax(values))
    step = grid[1] - grid[0]
    res = minimize_scalar(lambda x: -es_at(x), method="bounded",
                          bounds=(max(lo, grid[i] - step), min(hi, grid[i] + step)),
                          options={"xatol": 1e-6})
    if res.success and -res.fun >= values[i]:
        return -res.fun, float(res.x)
    return values[i], float(grid[i])


def cmd_design(args) -> int:
    scen, _ = _load(args)
    ch = scen.channel()
    rm = scen.rate_model()
    rows = []
    if ch.sigma2 == 0:
        xi_star = design.optimal_xi(scen.alpha, scen.delta)
        rows += [("xi_star_db", linear_to_db(xi_star), "sigma2=0 optimum"),
                 ("xi_star", xi_star, ""),
                 ("M_at_xi_star", design.m_from_xi(rm, xi_star), f"beta={rm.beta:g}")]
        rows.append(("es_at_xi_star", design.es_vs_xi(ch, rm, scen.rho, xi_star), ""))
    else:
        es, xdb = _xi_grid_search(replace(scen, rb_from_rate=True))
        rows += [("xi_grid_best_db", xdb, "grid search + refine, sigma2>0"),
                 ("M_at_xi_grid_best", design.m_from_xi(rm, 10 ** (xdb / 10)), ""),
                 ("es_at_xi_grid_best", es, "")]
        rows.append(("xi_star_db", linear_to_db(design.optimal_xi(scen.alpha, scen.delta)),
                     "sigma2=0 optimum, for reference"))
    net = analysis.effective_density(
        scen.network(), ch, analysis.lognormal_moment(ch.shadow_chi_db, ch.alpha))
    M = scen.rb_count()
    if ch.sigma2 > 0:
        k = analysis.kappa(net, M, ch.sigma2)
        rho_hat = design.suboptimal_rho(k)
        note = ("maximizes the Rayleigh lower bound" if analysis.regime_of(ch)
                == "rayleigh-alpha4-noise" else "Rayleigh/alpha=4 rule, heuristic here")
        rows += [("kappa", k, ""), ("rho_hat", rho_hat, note),
                 ("rho_policy", min(rho_hat, 0.5), "min(rho_hat, 0.5)")]
    else:
        rows.append(("rho_hat", None, "sigma2=0: E{S} grows as rho decreases"))
    pd = design.design_power(scen.c, net, scen.rho, M, 1.0)
    rows += [("c", pd.c, "kappa rho^2 target"), ("p_hat", pd.p_hat, "units of noise power"),
             ("p_hat_snr_db", pd.snr_db, "unit-distance snr")]
    _print_table(rows)
    return 0


def cmd_simulate(args) -> int:
    scen, _ = _load(args)
    net, ch, dp = scen.network(), scen.channel(), scen.params()
    radius = scen.radius or default_radius(net, ch, dp)
    cfg = SimConfig(net, ch, dp, radius, scen.trials, scen.seed)
    est = estimate_es(cfg, n_jobs=args.jobs)
    rep = analysis.analytical_report(net, ch, dp)
    ref = rep["closed_form"] if rep["closed_form"] is not None else rep["general"]
    z = (est.mean - ref) / est.stderr if ref is not None and est.stderr > 0 else None
    rows = [("mc_mean", est.mean, ""), ("mc_stderr", est.stderr, ""),
            ("trials", est.trials, ""), ("seed", scen.seed, ""),
            ("window_radius", radius, "default" if scen.radius is None else "given"),
            ("truncation_flag", est.truncation_flag, "doubling R moved the mean > 1 stderr"
             if est.truncation_flag else ""),
            ("analysis", ref, rep["closed_form_name"] or ("general" if ref is not None
                                                          else rep["general_error"])),
            ("z_score", z, "")]
    _print_table(rows)
    d = _outdir(args)
    if d:
        with open(d / "simulate.csv", "w", encoding="utf-8") as fh:
            fh.write("# E{S} in mean discovered peers per slot\n")
            fh.write("mc_mean,mc_stderr,trials,seed,window_radius,truncation_flag,analysis\n")
            fh.write(f"{est.mean!r},{est.stderr!r},{est.trials},{scen.seed},{radius!r},"
                     f"{int(est.truncation_flag)},{'' if ref is None else repr(ref)}\n")
    return 0


def _progress(label, x, row):
    log.info("%s  at %g: %s", label, x, row.get("error") or "ok")


def cmd_sweep(args) -> int:
    scen, spec = _load(args)
    if spec is None and not (args.variable and args.grid):
        raise ConfigError("config has no [sweep] section; give one or --variable/--grid",
                          "sweep")
    variable = args.variable or spec.variable
    if args.grid:
        try:
            grid = tuple(float(t) for t in args.grid.split(",") if t.strip())
        except ValueError:
            raise ConfigError(f"not a number list: {args.grid!r}", "sweep.grid") from None
    else:
        grid = spec.grid
    if args.outputs:
        outputs = {t.strip() for t in args.outputs.split(",") if t.strip()}
    else:
        outputs = spec.outputs if spec else {"analysis"}
    spec = SweepSpec(variable, grid, frozenset(outputs))
    result = run_sweep(scen, spec, n_jobs=args.jobs, progress=_progress)
    d = _outdir(args) or Path(".")
    write_csv(result, d / "sweep.csv", title=f"sweep of {variable}")
    if result.markers:
        write_markers_csv(result, d / "sweep_markers.csv")
    if args.svg:
        render_sweep(result, d / "sweep.svg", title=f"E{{S}} vs {variable}")
    failed = sum(bool(r.get("error")) for r in result.rows)
    print(f"wrote {len(result.rows)} rows to {d / 'sweep.csv'}"
          + (f" ({failed} with errors)" if failed else ""))
    return 0


def cmd_figure(args) -> int:
    preset, result = run_figure(args.id, trials=args.trials, seed=args.seed,
                                radius=args.radius, n_jobs=args.jobs, progress=_progress)
    d = Path(args.out)
    d.mkdir(parents=True, exist_ok=True)
    write_csv(result, d / f"{args.id}.csv", title=preset.title)
    write_markers_csv(result, d / f"{args.id}_markers.csv")
    render_sweep(result, d / f"{args.id}.svg", preset.title, preset.xlabel, logx=preset.logx)
    print(f"wrote {args.id}.csv, {args.id}_markers.csv, {args.id}.svg to {d}")
    return 0


COMMANDS = {"analyze": cmd_analyze, "design": cmd_design, "simulate": cmd_simulate,
            "sweep": cmd_sweep, "figure": cmd_figure}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except PeerDiscError as exc:
        kind = type(exc).__name__
        print(f"peerdisc: {kind}: {exc}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
