"""Command line interface.

Usage: lcd <operation> --config file.json [--seed N] [--out dir]

Every operation reads a JSON config, runs, writes <operation>.json (and CSV
curve files where applicable) into the output directory, and exits with
0 = pass, 1 = fail, 2 = inconclusive, 3 = config or runtime error.  Unknown
config keys are rejected with the offending key path on stderr.  Reports are
self-contained (config echo, seed, tool version) and a rerun with the same
config and seed reproduces every numeric field exactly.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
import time

import numpy as np

from . import __version__, expr as expr_mod, mc, transport1d as t1d
from .cost import (bishop_gromov_check, connect, diameter_probe,
                   forward_ball_volume, supercriticality_probe)
from .curvature import cd_verdict, ricci_bochner_oracle, ricci_weighted
from .dynamics import el_flow
from .examples import get_example, list_examples
from .expr import ExprError
from .model import (Chart, LagrangianModel, ModelError, PhasePoint,
                    sample_indicatrix_points)
from .needles import extract_needle, needle_cd_check, seed_construct

SCHEMA_VERSION = 1

EXIT_PASS, EXIT_FAIL, EXIT_INCONCLUSIVE, EXIT_ERROR = 0, 1, 2, 3


class CliError(Exception):
    pass


# -- config validation -------------------------------------------------------

ANY = object()   # open map, not recursed into

MODEL_SCHEMA = {
    "builtin": None, "params": ANY,
    "chart": {"lower": None, "upper": None},
    "L": None, "omega": None,
    "metric": None, "potential": None, "eta": None,
    "fd_step": None, "name": None,
}

REGION_SCHEMA = {
    "kind": None, "lower": None, "upper": None,
    "center": None, "radius": None, "resolution": None,
    "expr": None, "level": None,
    "bounding_box": {"lower": None, "upper": None},
}

MEASURE_SCHEMA = {"interval": None, "density": None, "grid": None}

CONNECT_SCHEMA = {"t_max": None, "n_starts": None, "top_k": None,
                  "h_scan": None, "h": None, "tol": None}

OP_SCHEMAS = {
    "ricci": {"model": MODEL_SCHEMA, "N": None, "samples": None, "tol": None,
              "seed": None},
    "cd-verdict": {"model": MODEL_SCHEMA, "K": None, "N": None,
                   "grid_per_axis": None, "dirs_per_point": None, "tol": None,
                   "seed": None},
    "flow": {"model": MODEL_SCHEMA, "x": None, "v": None, "T": None, "h": None,
             "zero_energy": None, "drift_tol": None},
    "needle": {"model": MODEL_SCHEMA, "x": None, "direction": None,
               "mode": None, "N": None, "K": None, "span": None, "h": None,
               "tol": None},
    "cost": {"model": MODEL_SCHEMA, "x0": None, "x1": None,
             "connect": CONNECT_SCHEMA},
    "ball": {"model": MODEL_SCHEMA, "center": None, "radius": None,
             "resolution": None, "n_directions": None, "seed": None},
    "bishop-gromov": {"model": MODEL_SCHEMA, "center": None, "K": None,
                      "N": None, "radii": None, "rel_tol": None,
                      "resolution": None, "n_directions": None, "seed": None},
    "diameter": {"model": MODEL_SCHEMA, "K": None, "N": None, "pairs": None,
                 "seed": None, "connect": CONNECT_SCHEMA},
    "interp1d": {"m0": MEASURE_SCHEMA, "m1": MEASURE_SCHEMA, "lambdas": None,
                 "grid": None},
    "cd1d": {"measure": MEASURE_SCHEMA, "K": None, "N": None, "tol": None},
    "dconv1d": {"reference": MEASURE_SCHEMA, "m0": MEASURE_SCHEMA,
                "m1": MEASURE_SCHEMA, "K": None, "N": None, "lambdas": None,
                "tol": None},
    "bm": {"model": MODEL_SCHEMA, "a0": REGION_SCHEMA, "a1": REGION_SCHEMA,
           "lambda": None, "K": None, "N": None, "pairs": None,
           "resolution": None, "margin": None, "seed": None,
           "connect": CONNECT_SCHEMA},
    "functional": {"model": MODEL_SCHEMA, "kind": None,
                   "region": REGION_SCHEMA, "K": None, "diameter": None,
                   "n_funcs": None, "samples": None, "modes": None,
                   "tol": None, "seed": None},
    "verify": {"suite": None, "seed": None},
}


def validate_config(cfg, schema, path="config"):
    if not isinstance(cfg, dict):
        raise CliError(f"{path}: expected an object")
    for key, value in cfg.items():
        if key not in schema:
            raise CliError(f"unknown config key: {path}.{key}")
        sub = schema[key]
        if isinstance(sub, dict) and sub is not ANY:
            validate_config(value, sub, f"{path}.{key}")


# -- model / region / measure construction -----------------------------------

def _expr_fn(source, names, label):
    """Compile an expression into a callable over a flat float vector."""
    ast = expr_mod.parse(source)
    free = expr_mod.free_vars(ast)
    unknown = free - set(names)
    if unknown:
        raise CliError(f"{label}: unknown variables {sorted(unknown)}")

    def fn(values):
        ctx = dict(zip(names, (float(v) for v in values)))
        return expr_mod.evaluate(ast, ctx)

    return fn


def _to_sympy(source, table, label):
    ast = expr_mod.parse(source)
    unknown = expr_mod.free_vars(ast) - set(table)
    if unknown:
        raise CliError(f"{label}: unknown variables {sorted(unknown)}")
    return expr_mod.to_sympy(ast, table)


_CONFIG_MODEL_COUNTER = [0]


def build_model(block):
    if "builtin" in block:
        bad = set(block) - {"builtin", "params"}
        if bad:
            raise CliError(f"builtin model takes no {sorted(bad)} keys")
        try:
            return get_example(block["builtin"], **block.get("params", {}))
        except TypeError as e:
            raise CliError(f"bad builtin model parameters: {e}") from None
    if "chart" not in block:
        raise CliError("model needs either 'builtin' or 'chart' bounds")
    import sympy as sp

    from ._codegen import build_function
    from .examples import _classical_model, _lagrangian_providers, _symbols

    lower = [float(v) for v in block["chart"]["lower"]]
    upper = [float(v) for v in block["chart"]["upper"]]
    n = len(lower)
    chart = Chart(n, tuple(lower), tuple(upper), label="config chart")
    xs = _symbols("x", n)
    vs = _symbols("v", n)
    x_table = {f"x{i + 1}": xs[i] for i in range(n)}
    xv_table = dict(x_table, **{f"v{i + 1}": vs[i] for i in range(n)})
    _CONFIG_MODEL_COUNTER[0] += 1
    name = block.get("name", f"config{_CONFIG_MODEL_COUNTER[0]}")
    omega_expr = _to_sympy(block.get("omega", "1"), x_table, "omega")

    if "L" in block:
        if "metric" in block or "potential" in block or "eta" in block:
            raise CliError("give either 'L' or the metric/potential/eta form")
        L_expr = _to_sympy(block["L"], xv_table, "L")
        providers = _lagrangian_providers(name, xs, vs, L_expr)
        omega = build_function(f"{name}_omega", [("x", xs)], omega_expr)
        return LagrangianModel(chart=chart, L=providers["L"], omega=omega,
                               L_x=providers["L_x"], L_v=providers["L_v"],
                               L_vv=providers["L_vv"],
                               L_vx=providers["L_vx"],
                               L_xx=providers["L_xx"], name=name,
                               fd_step=block.get("fd_step"))

    if "metric" not in block or "potential" not in block:
        raise CliError("structured model needs 'metric' and 'potential'")
    G_src = block["metric"]
    if len(G_src) != n or any(len(row) != n for row in G_src):
        raise CliError(f"metric must be {n}x{n}")
    G = sp.Matrix([[_to_sympy(G_src[i][j], x_table, f"metric[{i}][{j}]")
                    for j in range(n)] for i in range(n)])
    c_expr = _to_sympy(block["potential"], x_table, "potential")
    eta_src = block.get("eta")
    eta_row = None
    if eta_src is not None:
        if len(eta_src) != n:
            raise CliError(f"eta must have {n} entries")
        eta_row = sp.Matrix([[_to_sympy(e, x_table, f"eta[{i}]")
                              for i, e in enumerate(eta_src)]])
    model = _classical_model(name, chart, G, c_expr, eta_row, omega_expr, xs)
    if block.get("fd_step") is not None:
        model.fd_step = float(block["fd_step"])
    return model


def build_region(block, model):
    kind = block.get("kind")
    if kind == "box":
        spec = mc.RegionSpec.box(block["lower"], block["upper"])
    elif kind == "ball":
        spec = mc.RegionSpec.ball(block["center"], float(block["radius"]),
                                  resolution=int(block.get("resolution", 64)))
    elif kind == "sublevel":
        # {x : expr(x) <= level} inside an explicit bounding box
        n = model.dim
        xs = [f"x{i + 1}" for i in range(n)]
        fn = _expr_fn(block["expr"], xs, "region expr")
        level = float(block.get("level", 0.0))
        bb = block.get("bounding_box")
        if bb is None:
            raise CliError("sublevel region needs a bounding_box")

        def member(pts):
            return np.array([fn(p) <= level for p in pts], dtype=bool)

        spec = mc.RegionSpec.indicator(member, bb["lower"], bb["upper"],
                                       resolution=int(block.get("resolution",
                                                                64)))
    else:
        raise CliError(f"unknown region kind {kind!r}")
    return spec.bind(model)


def build_measure(block):
    a, b = (float(v) for v in block["interval"])
    fn = _expr_fn(block["density"], ["t"], "density")
    grid = int(block.get("grid", t1d.GRID_DEFAULT))
    return t1d.Measure1D.from_function(lambda t: fn([t]), a, b, grid=grid)


def _parse_N(value):
    if value in ("inf", "infinity", None):
        return np.inf
    return float(value)


# -- output helpers ----------------------------------------------------------

def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (np.floating, float)):
        value = float(obj)
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        if math.isnan(value):
            return "nan"
        return value
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    return obj


def write_csv(path, header, rows):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow([repr(float(v)) if isinstance(v, (float, np.floating))
                             else v for v in row])


def write_report(op, cfg, seed, results, verdict, out_dir, started):
    report = {
        "schema_version": SCHEMA_VERSION,
        "tool_version": __version__,
        "operation": op,
        "config": cfg,
        "seed": seed,
        "verdict": verdict,
        "results": _jsonable(results),
        "wall_clock_s": round(time.perf_counter() - started, 3),
    }
    path = f"{out_dir}/{op}.json"
    with open(path, "w") as fh:
        json.dump(report, fh, indent=2)
        fh.write("\n")
    return path


# -- operation runners -------------------------------------------------------

def run_ricci(cfg, seed, out):
    model = build_model(cfg["model"])
    N = _parse_N(cfg.get("N", "inf"))
    count = int(cfg.get("samples", 50))
    tol = float(cfg.get("tol", 1e-3))
    rng = np.random.default_rng(seed)
    pts = sample_indicatrix_points(model, rng, count)
    values = [ricci_weighted(model, q, N) for q in pts]
    oracle = model.oracles.get("ricci")
    results = {
        "model": model.name, "N": N, "samples": count,
        "min": min(values), "max": max(values),
        "mean": float(np.mean(values)),
    }
    if oracle is not None:
        refs = [oracle(q, N) for q in pts]
        if all(r is not None for r in refs):
            err = max(abs(v - r) for v, r in zip(values, refs))
            results["oracle_max_error"] = err
            results["tol"] = tol
            return results, ("pass" if err <= tol else "fail")
    return results, "inconclusive"


def run_cd_verdict(cfg, seed, out):
    model = build_model(cfg["model"])
    rep = cd_verdict(model, float(cfg["K"]), _parse_N(cfg["N"]),
                     grid_per_axis=int(cfg.get("grid_per_axis", 3)),
                     dirs_per_point=int(cfg.get("dirs_per_point", 8)),
                     tol=float(cfg.get("tol", 1e-3)), seed=seed)
    results = {"model": rep.model, "K": rep.K, "N": rep.N, "count": rep.count,
               "min_excess": rep.min_excess, "tol": rep.tol,
               "failures": rep.failures,
               "argmin_x": rep.argmin.x, "argmin_v": rep.argmin.v}
    return results, ("pass" if rep.passed else "fail")


def run_flow(cfg, seed, out):
    model = build_model(cfg["model"])
    q0 = PhasePoint(cfg["x"], cfg["v"])
    T = float(cfg["T"])
    h = float(cfg.get("h", 1e-3))
    tol = float(cfg.get("drift_tol", 1e-8))
    traj = el_flow(model, q0, T, h,
                   zero_energy=bool(cfg.get("zero_energy", False)))
    n = model.dim
    header = (["t"] + [f"x{i + 1}" for i in range(n)]
              + [f"v{i + 1}" for i in range(n)] + ["energy"])
    rows = [[traj.t[k]] + list(traj.x[k]) + list(traj.v[k]) + [traj.energy[k]]
            for k in range(len(traj.t))]
    write_csv(f"{out}/flow.csv", header, rows)
    results = {"model": model.name, "T": T, "h": h, "steps": len(traj.t) - 1,
               "energy0": float(traj.energy[0]),
               "energy_drift": traj.energy_drift, "drift_tol": tol,
               "endpoint_x": traj.x[-1], "endpoint_v": traj.v[-1],
               "left_chart": traj.left_chart}
    if traj.left_chart:
        return results, "inconclusive"
    return results, ("pass" if traj.energy_drift <= tol else "fail")


def run_needle(cfg, seed_value, out):
    model = build_model(cfg["model"])
    x = np.asarray(cfg["x"], float)
    u = np.asarray(cfg["direction"], float)
    q = model.indicatrix_sample(x, u)
    N = _parse_N(cfg.get("N", "inf"))
    K = float(cfg.get("K", 0.0))
    span = float(cfg.get("span", 1.0))
    h = float(cfg.get("h", 1e-3))
    tol = float(cfg.get("tol", 5e-4))
    seed = seed_construct(model, q, mode=cfg.get("mode", "minimal"), N=N)
    needle = extract_needle(model, seed, (-span, span), h)
    rep = needle_cd_check(needle, K, N, tol=tol)
    rows = [[needle.t[k]] + list(needle.x[k]) + [needle.rho[k], needle.psi[k]]
            for k in range(len(needle.t))]
    header = (["t"] + [f"x{i + 1}" for i in range(model.dim)]
              + ["rho", "psi"])
    write_csv(f"{out}/needle.csv", header, rows)
    results = {"model": model.name, "mode": seed.mode, "K": K, "N": N,
               "span": span, "h": h, "residual_max": rep.residual_max,
               "tol": tol, "truncated": needle.truncated,
               "velocity_residual": needle.velocity_residual(),
               "density_residual": needle.density_residual()}
    return results, ("pass" if rep.passed else "fail")


def run_cost(cfg, seed, out):
    model = build_model(cfg["model"])
    kw = dict(cfg.get("connect", {}))
    sol = connect(model, np.asarray(cfg["x0"], float),
                  np.asarray(cfg["x1"], float), full_trajectory=False, **kw)
    results = {"model": model.name, "x0": sol.x0, "x1": sol.x1,
               "action": sol.action, "duration": sol.ell,
               "initial_direction": sol.u0,
               "endpoint_residual": sol.endpoint_residual,
               "energy0": sol.energy0, "n_converged": sol.n_converged}
    return results, "pass"


def run_ball(cfg, seed, out):
    model = build_model(cfg["model"])
    vol = forward_ball_volume(model, np.asarray(cfg["center"], float),
                              float(cfg["radius"]),
                              n_directions=cfg.get("n_directions"),
                              resolution=cfg.get("resolution"), seed=seed)
    results = {"model": model.name, "center": cfg["center"],
               "radius": float(cfg["radius"]), "volume": vol.volume,
               "truncated": vol.truncated, "resolution": vol.resolution,
               "n_directions": vol.n_directions}
    return results, ("inconclusive" if vol.truncated else "pass")


def run_bishop_gromov(cfg, seed, out):
    model = build_model(cfg["model"])
    rep = bishop_gromov_check(model, np.asarray(cfg["center"], float),
                              float(cfg["K"]), _parse_N(cfg["N"]),
                              [float(r) for r in cfg["radii"]],
                              rel_tol=float(cfg.get("rel_tol", 0.03)),
                              n_directions=cfg.get("n_directions"),
                              resolution=cfg.get("resolution"), seed=seed)
    write_csv(f"{out}/bishop-gromov.csv", ["r", "ratio", "bound"],
              list(zip(rep.radii, rep.ratios, rep.bounds)))
    results = {"model": model.name, "K": rep.K, "N": rep.N, "R": rep.R,
               "radii": rep.radii, "ratios": rep.ratios, "bounds": rep.bounds,
               "rel_tol": rep.rel_tol, "truncated": rep.truncated}
    if rep.truncated and not rep.passed:
        return results, "inconclusive"
    return results, ("pass" if rep.passed else "fail")


def run_diameter(cfg, seed, out):
    model = build_model(cfg["model"])
    rep = diameter_probe(model, float(cfg["K"]), _parse_N(cfg["N"]),
                         pairs=int(cfg.get("pairs", 40)), seed=seed,
                         **cfg.get("connect", {}))
    results = {"model": model.name, "K": rep.K, "N": rep.N,
               "bound": rep.bound, "max_duration": rep.max_ell,
               "pairs": len(rep.ells), "failures": rep.failures}
    return results, ("pass" if rep.passed else "fail")


def run_interp1d(cfg, seed, out):
    m0 = build_measure(cfg["m0"]).normalized()
    m1 = build_measure(cfg["m1"]).normalized()
    lambdas = [float(v) for v in cfg.get("lambdas", [0.25, 0.5, 0.75])]
    grid = int(cfg.get("grid", t1d.GRID_DEFAULT))
    tmap = t1d.monotone_map(m0, m1)
    columns = {}
    mass_err = 0.0
    for lam in lambdas:
        m_lam = t1d.interpolate(m0, m1, lam, grid=grid, transport=tmap)
        columns[lam] = m_lam
        mass_err = max(mass_err, abs(m_lam.mass - 1.0))
    base = columns[lambdas[0]]
    header = ["t"] + [f"rho_lam_{lam}" for lam in lambdas]
    rows = []
    for k in range(len(base.t)):
        tk = base.t[k]
        rows.append([tk] + [columns[lam].density_at(tk) for lam in lambdas])
    write_csv(f"{out}/interp1d.csv", header, rows)
    results = {"lambdas": lambdas, "grid": grid,
               "map_monotone": bool(np.all(np.diff(tmap.T) >= -1e-12)),
               "mass_error_max": mass_err}
    ok = results["map_monotone"] and mass_err <= 1e-6
    return results, ("pass" if ok else "fail")


def run_cd1d(cfg, seed, out):
    m = build_measure(cfg["measure"])
    tol = float(cfg.get("tol", 1e-6))
    rep = t1d.cd1d_check(m, float(cfg["K"]), _parse_N(cfg["N"]), tol=tol)
    results = {"K": rep.K, "N": rep.N, "residual_max": rep.residual_max,
               "tol": tol}
    return results, ("pass" if rep.passed else "fail")


def run_dconv1d(cfg, seed, out):
    ref = build_measure(cfg["reference"])
    m0 = build_measure(cfg["m0"])
    m1 = build_measure(cfg["m1"])
    lambdas = cfg.get("lambdas")
    if lambdas is not None:
        lambdas = [float(v) for v in lambdas]
    rep = t1d.displacement_convexity_check(ref, m0, m1, float(cfg["K"]),
                                           _parse_N(cfg["N"]),
                                           lambdas=lambdas,
                                           tol=float(cfg.get("tol", 1e-4)))
    results = {"K": rep.K, "N": rep.N, "lambdas": rep.lambdas,
               "margins": rep.margins, "worst_margin": rep.worst_margin,
               "vacuous": rep.vacuous}
    if rep.vacuous:
        return results, "inconclusive"
    return results, ("pass" if rep.passed else "fail")


def run_bm(cfg, seed, out):
    model = build_model(cfg["model"])
    a0 = build_region(cfg["a0"], model)
    a1 = build_region(cfg["a1"], model)
    rep = mc.brunn_minkowski_check(
        model, a0, a1, float(cfg["lambda"]), float(cfg["K"]),
        _parse_N(cfg["N"]), pairs=int(cfg.get("pairs", 10000)),
        resolution=cfg.get("resolution"),
        margin=float(cfg.get("margin", 0.03)), seed=seed,
        connect_kwargs=cfg.get("connect"))
    results = {"model": model.name, "lambda": rep.lam, "K": rep.K, "N": rep.N,
               "mu0": rep.mu0, "mu1": rep.mu1, "estimate": rep.estimate,
               "bound": rep.bound, "margin": rep.margin,
               "beta0": rep.beta0, "beta1": rep.beta1,
               "duration_range": list(rep.ell_range), "pairs": rep.pairs,
               "failure_rate": rep.failure_rate,
               "resolution": rep.resolution}
    if rep.failure_rate > 0.1:
        return results, "inconclusive"
    return results, ("pass" if rep.passed else "fail")


def run_functional(cfg, seed, out):
    model = build_model(cfg["model"])
    region = build_region(cfg["region"], model)
    K = cfg.get("K")
    rep = mc.functional_check(
        model, cfg["kind"], region,
        K=None if K is None else float(K),
        diameter=(None if cfg.get("diameter") is None
                  else float(cfg["diameter"])),
        n_funcs=int(cfg.get("n_funcs", 20)),
        samples=int(cfg.get("samples", 1500)),
        modes=int(cfg.get("modes", 3)),
        tol=float(cfg.get("tol", 0.05)), seed=seed)
    results = {"model": model.name, "kind": rep.kind,
               "worst_ratio": rep.worst_ratio, "n_funcs": rep.n_funcs,
               "samples": rep.samples, "tol": rep.tol}
    return results, ("pass" if rep.passed else "fail")


# -- verify suites -----------------------------------------------------------

def _check(name, passed, **info):
    return dict(name=name, passed=bool(passed), **info)


def _suite_smoke(seed):
    checks = []
    flat = get_example("flat_euclidean", n=2)
    rng = np.random.default_rng(seed)
    pts = sample_indicatrix_points(flat, rng, 5)
    err = max(abs(ricci_weighted(flat, q, np.inf)) for q in pts)
    checks.append(_check("flat ricci vanishes", err <= 1e-6, max_abs=err))

    worst = 0.0
    for _ in range(3):
        a = rng.uniform(-1.2, 1.2, 2)
        b = rng.uniform(-1.2, 1.2, 2)
        if np.linalg.norm(b - a) < 0.3:
            b = a + np.array([0.7, 0.1])
        sol = connect(flat, a, b, full_trajectory=False)
        worst = max(worst, abs(sol.action - np.linalg.norm(b - a)))
    checks.append(_check("flat cost equals distance", worst <= 1e-6,
                         max_error=worst))

    d = t1d.distortion(0.3, 1.0, 4.0, 0.9)
    ident = abs(d.tau ** 4 - 0.3 * d.sigma ** 3)
    checks.append(_check("distortion identity tau^N = t sigma^(N-1)",
                         ident <= 1e-12, defect=ident))

    m0 = t1d.Measure1D.from_function(lambda t: 1.0, 0.0, 1.0, grid=512)
    m1 = t1d.Measure1D.from_function(lambda t: 1.0, 2.0, 3.0, grid=512)
    tmap = t1d.monotone_map(m0.normalized(), m1.normalized())
    shift_err = float(np.max(np.abs(tmap.T - tmap.t - 2.0)))
    checks.append(_check("uniform shift transport map", shift_err <= 1e-9,
                         max_error=shift_err))
    return checks


def _suite_curvature(seed):
    checks = []
    horo = get_example("hyperbolic_horocycle")
    rng = np.random.default_rng(seed)
    pts = sample_indicatrix_points(horo, rng, 200)
    err = max(abs(ricci_weighted(horo, q, 2.0)) for q in pts)
    checks.append(_check("horocycle Ric_{Vol,2} vanishes", err <= 1e-3,
                         max_abs=err))

    s = 0.3
    con = get_example("contact_sphere", d=1, s=s)
    target = 2.0 * (s - 1.0) ** 2
    pts = sample_indicatrix_points(con, rng, 25)
    err = max(abs(ricci_weighted(con, q, 3.0) - target) for q in pts)
    checks.append(_check("contact sphere weighted Ricci formula", err <= 1e-3,
                         s=s, target=target, max_error=err))

    for name in ("flat_euclidean", "hyperbolic_horocycle"):
        model = get_example(name) if name != "flat_euclidean" else \
            get_example(name, n=2)
        pts = sample_indicatrix_points(model, rng, 10)
        err = max(abs(ricci_weighted(model, q, np.inf)
                      - ricci_bochner_oracle(model, q, np.inf)) for q in pts)
        checks.append(_check(f"{name} direct vs integrated-curvature route",
                             err <= 1e-3, max_error=err))
    return checks


def _suite_needles(seed):
    checks = []
    rng = np.random.default_rng(seed)
    for name, kwargs, K, N in (("flat_euclidean", {"n": 2}, 0.0, np.inf),
                               ("hyperbolic_horocycle", {}, 0.0, 2.0)):
        model = get_example(name, **kwargs)
        worst = -np.inf
        for q in sample_indicatrix_points(model, rng, 10):
            for mode in ("minimal", "equality"):
                hj = seed_construct(model, q, mode=mode, N=N)
                needle = extract_needle(model, hj, (-0.4, 0.4), 1e-3)
                rep = needle_cd_check(needle, K, N)
                worst = max(worst, rep.residual_max)
        checks.append(_check(f"{name} needle CD residual", worst <= 5e-4,
                             K=K, N=N, residual_max=worst))
    return checks


def _suite_transport(seed):
    checks = []
    m0 = t1d.Measure1D.from_function(
        lambda t: math.exp(-0.5 * t * t), -6.0, 6.0)
    m1 = t1d.Measure1D.from_function(
        lambda t: math.exp(-0.5 * (t - 2.0) ** 2), -4.0, 8.0)
    m_half = t1d.interpolate(m0.normalized(), m1.normalized(), 0.5)
    target = np.exp(-0.5 * (m_half.t - 1.0) ** 2) / math.sqrt(2 * math.pi)
    err = float(np.max(np.abs(m_half.rho - target)))
    checks.append(_check("gaussian midpoint density", err <= 1e-4,
                         max_error=err))

    N = 4.0
    m = t1d.Measure1D.from_function(lambda t: math.sin(t) ** (N - 1.0),
                                    1e-3, math.pi - 1e-3)
    rep = t1d.cd1d_check(m, N - 1.0, N)
    checks.append(_check("model density satisfies its sharp CD condition",
                         rep.passed, residual_max=rep.residual_max))
    rep_bad = t1d.cd1d_check(m, N - 1.0 + 0.1, N)
    checks.append(_check("CD check rejects an inflated K", not rep_bad.passed,
                         residual_max=rep_bad.residual_max))

    pep = t1d.poincare_check(t1d.Measure1D.from_function(
        lambda t: 1.0, 0.0, 2.0), trials=50, seed=seed)
    checks.append(_check("uniform interval Poincare inequality", pep.passed,
                         worst_margin=pep.worst_margin))
    return checks


def _suite_inequalities(seed):
    checks = []
    flat = get_example("flat_euclidean", n=2)
    a0 = mc.RegionSpec.box([-1.0, -1.0], [0.0, 0.0]).bind(flat)
    a1 = mc.RegionSpec.box([0.5, 0.2], [1.5, 1.2]).bind(flat)
    rep = mc.brunn_minkowski_check(flat, a0, a1, 0.5, 0.0, 2.0, pairs=20000,
                                   resolution=128, seed=seed)
    checks.append(_check("flat Brunn-Minkowski equality case", rep.passed,
                         estimate=rep.estimate, bound=rep.bound,
                         rel_margin=rep.margin / rep.bound))

    box = mc.RegionSpec.box([-1.4, -1.4], [1.4, 1.4]).bind(flat)
    rep = mc.functional_check(flat, "poincare", box,
                              diameter=2.8 * math.sqrt(2.0), n_funcs=8,
                              samples=1200, seed=seed)
    checks.append(_check("flat box Poincare spot check", rep.passed,
                         worst_ratio=rep.worst_ratio))

    sup = supercriticality_probe(flat, loops=50, seed=seed)
    checks.append(_check("closed loops have positive action", sup.passed,
                         min_action=sup.min_action))
    return checks


SUITES = {
    "smoke": ("smoke",),
    "curvature": ("curvature",),
    "needles": ("needles",),
    "transport": ("transport",),
    "inequalities": ("inequalities",),
    "full": ("smoke", "curvature", "needles", "transport", "inequalities"),
}

_SUITE_FNS = {
    "smoke": _suite_smoke,
    "curvature": _suite_curvature,
    "needles": _suite_needles,
    "transport": _suite_transport,
    "inequalities": _suite_inequalities,
}


def run_verify(cfg, seed, out, suite=None):
    suite = suite or cfg.get("suite", "smoke")
    if suite not in SUITES:
        raise CliError(f"unknown suite {suite!r}; choose from "
                       f"{sorted(SUITES)}")
    checks = []
    for part in SUITES[suite]:
        checks.extend(_SUITE_FNS[part](seed))
    passed = all(c["passed"] for c in checks)
    results = {"suite": suite, "checks": checks,
               "n_checks": len(checks),
               "n_failed": sum(not c["passed"] for c in checks)}
    return results, ("pass" if passed else "fail")


RUNNERS = {
    "ricci": run_ricci,
    "cd-verdict": run_cd_verdict,
    "flow": run_flow,
    "needle": run_needle,
    "cost": run_cost,
    "ball": run_ball,
    "bishop-gromov": run_bishop_gromov,
    "diameter": run_diameter,
    "interp1d": run_interp1d,
    "cd1d": run_cd1d,
    "dconv1d": run_dconv1d,
    "bm": run_bm,
    "functional": run_functional,
}


# -- entry point -------------------------------------------------------------

def _examples_list():
    for name, schema in list_examples():
        if schema:
            params = ", ".join(f"{k}={v!r}" for k, v in schema.items())
            print(f"{name}  ({params})")
        else:
            print(name)


def main(argv=None):
    parser = argparse.ArgumentParser(
        prog="lcd",
        description="curvature-dimension toolkit for Tonelli Lagrangians")
    sub = parser.add_subparsers(dest="operation", required=True)
    for op in list(RUNNERS) + ["verify"]:
        p = sub.add_parser(op)
        p.add_argument("--config", required=(op != "verify"))
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--out", default=".")
        if op == "verify":
            p.add_argument("--suite", default=None,
                           choices=sorted(SUITES))
    p = sub.add_parser("examples")
    p.add_argument("action", choices=["list"])
    args = parser.parse_args(argv)

    if args.operation == "examples":
        _examples_list()
        return EXIT_PASS

    started = time.perf_counter()
    try:
        if args.config is not None:
            try:
                with open(args.config) as fh:
                    cfg = json.load(fh)
            except (OSError, json.JSONDecodeError) as e:
                raise CliError(f"cannot read config {args.config}: {e}") \
                    from None
        else:
            cfg = {}
        validate_config(cfg, OP_SCHEMAS[args.operation])
        seed = args.seed if args.seed is not None else int(cfg.get("seed", 0))
        if args.operation == "verify":
            results, verdict = run_verify(cfg, seed, args.out,
                                          suite=args.suite)
        else:
            results, verdict = RUNNERS[args.operation](cfg, seed, args.out)
    except (CliError, ExprError, ModelError, t1d.Transport1DError,
            mc.RegionError, KeyError) as e:
        detail = f"missing config key {e}" if isinstance(e, KeyError) else str(e)
        print(f"lcd {args.operation}: error: {detail}", file=sys.stderr)
        return EXIT_ERROR

    path = write_report(args.operation, cfg, seed, results, verdict,
                        args.out, started)
    print(f"{args.operation}: {verdict} ({path})")
    return {"pass": EXIT_PASS, "fail": EXIT_FAIL,
            "inconclusive": EXIT_INCONCLUSIVE}[verdict]


if __name__ == "__main__":
    sys.exit(main())
