"""Configuration-driven experiment runner: ``qdx run|validate|plotdata``.

Exit codes: 0 success, 2 invalid config or data file, 3 computation error.
The worker count comes from the config's ``workers`` entry unless the
``QDX_WORKERS`` environment variable is set.
"""
from __future__ import annotations

import argparse
import json
import math
import os
import sys
from collections import OrderedDict
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import bounds, dynamics, tracemap
from .errors import ConfigError, DomainError, QdxError, SchemaError
from .io import Writer, format_value, read_manifest, read_table, write_plot
from .lattice import PotentialSpec

WORKERS_ENV = "QDX_WORKERS"
TASKS = ("evolve", "tracemap", "bounds", "dimension", "exponents", "sandwich")
_COMMON = ("task", "potential", "output_dir", "precision", "workers")


# ---------------------------------------------------------------------------
# validation helpers


def _number(cfg, key, default=None, lo=None, hi=None, lo_open=False, integer=False, required=False):
    if key not in cfg or cfg[key] is None:
        if required:
            raise ConfigError(key, "required")
        return default
    v = cfg[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ConfigError(key, f"expected a number, got {v!r}")
    if integer and (not float(v).is_integer()):
        raise ConfigError(key, f"expected an integer, got {v!r}")
    if not math.isfinite(v):
        raise ConfigError(key, "must be finite")
    if lo is not None and (v <= lo if lo_open else v < lo):
        raise ConfigError(key, f"must be {'>' if lo_open else '>='} {lo}, got {v}")
    if hi is not None and v > hi:
        raise ConfigError(key, f"must be <= {hi}, got {v}")
    return int(v) if integer else float(v)


def _numbers(cfg, key, default=None, lo=None, hi=None, lo_open=False, integer=False,
             increasing=False, required=False):
    if key not in cfg or cfg[key] is None:
        if required or default is None:
            raise ConfigError(key, "required")
        return list(default)
    v = cfg[key]
    if not isinstance(v, list):
        raise ConfigError(key, "expected a list")
    if not v:
        raise ConfigError(key, "must not be empty")
    out = [_number({key: x}, key, lo=lo, hi=hi, lo_open=lo_open, integer=integer) for x in v]
    if increasing and any(b <= a for a, b in zip(out, out[1:])):
        raise ConfigError(key, "must be strictly increasing")
    return out


def _flag(cfg, key, default):
    v = cfg.get(key, default)
    if not isinstance(v, bool):
        raise ConfigError(key, f"expected true or false, got {v!r}")
    return v


def _choice(cfg, key, default, options):
    v = cfg.get(key, default)
    if v not in options:
        raise ConfigError(key, f"must be one of {list(options)}, got {v!r}")
    return v


def _no_extra(cfg, allowed, where=""):
    for k in cfg:
        if k not in allowed:
            raise ConfigError(where + k, "unknown entry")


def _decades(key, values, n):
    if values[0] <= 0 or math.log10(values[-1] / values[0]) < n - 1e-9:
        raise ConfigError(key, f"must span at least {n} decades of positive values")


def _potential(cfg):
    raw = cfg.get("potential", {"kind": "free"})
    if not isinstance(raw, dict):
        raise ConfigError("potential", "expected an object")
    _no_extra(raw, ("kind", "lam", "theta", "table", "table_start"), "potential.")
    try:
        return PotentialSpec.from_dict(raw)
    except (DomainError, KeyError, TypeError, ValueError) as exc:
        raise ConfigError("potential", str(exc)) from None


def _fib_lambda(spec):
    if spec.kind != "fibonacci":
        raise ConfigError("potential", "this task needs a fibonacci potential")
    return spec.lam


def _alphas(cfg):
    return _numbers(cfg, "alphas", default=[round(0.05 * i, 10) for i in range(25)],
                    lo=0.0, hi=1.2, increasing=True)


def validate_config(raw):
    """Resolve defaults and check every parameter; return a plain dict."""
    if not isinstance(raw, dict):
        raise ConfigError("config", "expected a JSON object")
    task = raw.get("task")
    if task not in TASKS:
        raise ConfigError("task", f"must be one of {list(TASKS)}, got {task!r}")
    spec = _potential(raw)
    out = OrderedDict(task=task, potential=spec.to_dict())
    out["output_dir"] = str(raw.get("output_dir", "qdx_out"))
    prec = raw.get("precision")
    out["precision"] = None if prec is None else _number(raw, "precision", lo=1, hi=17, integer=True)
    out["workers"] = _number(raw, "workers", 1, lo=1, integer=True)
    p = globals()["_validate_" + task](raw, spec)
    _no_extra(raw, _COMMON + tuple(p))
    out.update(p)
    return dict(out)


def _validate_evolve(cfg, spec):
    p = OrderedDict()
    p["time_grid"] = _numbers(cfg, "time_grid", lo=0.0, increasing=True, required=True)
    p["tol"] = _number(cfg, "tol", 1e-12, lo=0.0, hi=1e-6, lo_open=True)
    p["radius"] = _number(cfg, "radius", None, lo=0, integer=True)
    p["window_cap"] = _number(cfg, "window_cap", dynamics.DEFAULT_WINDOW_CAP, lo=1, integer=True)
    return p


def _validate_tracemap(cfg, spec):
    lam = _fib_lambda(spec)
    p = OrderedDict()
    p["k_values"] = _numbers(cfg, "k_values", lo=1, hi=40, integer=True, increasing=True,
                             required=True)
    p["delta"] = _number(cfg, "delta", 0.0, lo=0.0)
    p["bits"] = _number(cfg, "bits", None, lo=53, integer=True)
    if not lam > tracemap.lambda_zero(p["delta"]):
        raise ConfigError("delta", f"lambda={lam} must exceed lambda0(delta)="
                                   f"{tracemap.lambda_zero(p['delta']):.6g}")
    return p


def _validate_dimension(cfg, spec):
    p = OrderedDict()
    default = [spec.lam] if spec.kind == "fibonacci" else None
    p["lambdas"] = _numbers(cfg, "lambdas", default, lo=0.0, lo_open=True)
    p["k"] = _number(cfg, "k", 14, lo=2, hi=40, integer=True)
    p["delta"] = _number(cfg, "delta", 0.0, lo=0.0)
    p["scales"] = _choice(cfg, "scales", "resolved", ("resolved", "widths"))
    for lam in p["lambdas"]:
        if not lam > tracemap.lambda_zero(p["delta"]):
            raise ConfigError("lambdas", f"lambda={lam} must exceed lambda0(delta)")
    return p


def _validate_bounds(cfg, spec):
    p = OrderedDict()
    default = [spec.lam] if spec.kind == "fibonacci" else None
    p["lambdas"] = _numbers(cfg, "lambdas", default, lo=0.0, lo_open=True)
    p["deltas"] = _numbers(cfg, "deltas", [0.0], lo=0.0)
    p["p_list"] = _numbers(cfg, "p_list", [1.0, 2.0, 4.0, 8.0], lo=0.0, lo_open=True)
    p["require_upper"] = _flag(cfg, "require_upper", True)
    p["trend_lambdas"] = _numbers(cfg, "trend_lambdas", [8.0, 32.0, 128.0, 512.0], lo=8.0)
    if p["require_upper"]:
        for lam in p["lambdas"]:
            d = lam - 4.0
            if d < 0 or d * d < 12.0:
                raise ConfigError("lambdas", f"lambda={lam} is below 4 + 2 sqrt 3, where S_l is undefined")
    for key in ("envelope", "chain"):
        sub = cfg.get(key)
        if sub is None:
            p[key] = None
            continue
        if not isinstance(sub, dict):
            raise ConfigError(key, "expected an object or null")
        _fib_lambda(spec)
        q = OrderedDict()
        try:
            if key == "envelope":
                _no_extra(sub, ("time_grid", "exponents", "side", "quad_tol", "decay_alpha"))
                q["time_grid"] = _numbers(sub, "time_grid", lo=0.0, lo_open=True, increasing=True,
                                          required=True)
                _decades("time_grid", q["time_grid"], 1)
                q["exponents"] = _numbers(sub, "exponents", [0.5, 0.7, 0.9], lo=0.0, lo_open=True)
                q["side"] = _choice(sub, "side", "right", ("right", "left"))
                q["quad_tol"] = _number(sub, "quad_tol", 1e-4, lo=0.0, hi=0.1, lo_open=True)
                q["decay_alpha"] = _number(sub, "decay_alpha", 0.95, lo=0.0, lo_open=True)
            else:
                _no_extra(sub, ("time_grid", "k", "delta", "slack"))
                q["time_grid"] = _numbers(sub, "time_grid", lo=0.0, lo_open=True, increasing=True,
                                          required=True)
                q["k"] = _number(sub, "k", 12, lo=2, hi=20, integer=True)
                q["delta"] = _number(sub, "delta", 0.2, lo=0.0)
                q["slack"] = _number(sub, "slack", 0.5, lo=0.0)
                if not spec.lam > tracemap.lambda_zero(q["delta"]):
                    raise ConfigError("delta", "lambda must exceed lambda0(delta)")
        except ConfigError as exc:
            raise ConfigError(f"{key}.{exc.field}", str(exc).split(": ", 1)[1]) from None
        p[key] = dict(q)
    return p


def _validate_exponents(cfg, spec):
    p = OrderedDict()
    p["time_grid"] = _numbers(cfg, "time_grid", lo=0.0, lo_open=True, increasing=True, required=True)
    _decades("time_grid", p["time_grid"], 2)
    if p["time_grid"][0] <= 1.0:
        # log P / log t needs log t > 0
        raise ConfigError("time_grid", "values must exceed 1")
    p["p_list"] = _numbers(cfg, "p_list", [1.0, 2.0, 4.0, 8.0], lo=0.0, lo_open=True)
    p["alphas"] = _alphas(cfg)
    p["averaged"] = _flag(cfg, "averaged", False)
    p["side"] = _choice(cfg, "side", "both", ("both", "right", "left"))
    p["method"] = _choice(cfg, "method", "slope", ("slope", "ratio"))
    p["threshold_zero"] = _number(cfg, "threshold_zero", 0.05, lo=0.0, lo_open=True)
    p["threshold_inf"] = _number(cfg, "threshold_inf", 10.0, lo=0.0, lo_open=True)
    p["tol"] = _number(cfg, "tol", 1e-12, lo=0.0, hi=1e-6, lo_open=True)
    p["noise_floor"] = _number(cfg, "noise_floor", 1e-250, lo=0.0)
    return p


def _validate_sandwich(cfg, spec):
    lam = _fib_lambda(spec)
    p = OrderedDict()
    p["time_grid"] = _numbers(cfg, "time_grid", lo=0.0, lo_open=True, increasing=True, required=True)
    _decades("time_grid", p["time_grid"], 2)
    if p["time_grid"][0] <= 1.0:
        raise ConfigError("time_grid", "values must exceed 1")
    p["alphas"] = _alphas(cfg)
    p["upper"] = _flag(cfg, "upper", True)
    p["lower"] = _flag(cfg, "lower", True)
    p["slack_lower"] = _number(cfg, "slack_lower", 0.1, lo=0.0)
    p["slack_upper"] = _number(cfg, "slack_upper", 0.15, lo=0.0)
    p["threshold_zero"] = _number(cfg, "threshold_zero", 0.05, lo=0.0, lo_open=True)
    p["threshold_inf"] = _number(cfg, "threshold_inf", 10.0, lo=0.0, lo_open=True)
    p["trend_lambdas"] = _numbers(cfg, "trend_lambdas", [8.0, 32.0, 128.0, 512.0], lo=8.0)
    if p["upper"] and lam < 8.0:
        raise ConfigError("upper", f"the upper bound needs lambda >= 8, got {lam}")
    if p["lower"] and not lam > tracemap.lambda_zero(0.0):
        raise ConfigError("lower", f"the lower bound needs lambda > sqrt(24), got {lam}")
    return p


# ---------------------------------------------------------------------------
# tasks


def _pmap(fn, items, workers):
    """Ordered map; a process pool when ``workers`` > 1."""
    items = list(items)
    if workers <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=min(workers, len(items))) as ex:
        return list(ex.map(fn, items))


def _evolve_one(args):
    spec_d, t, tol, cap = args
    pkt = dynamics.evolve(PotentialSpec.from_dict(spec_d), t, tol=tol, window_cap=cap)
    return pkt.sites, pkt.window.amplitudes


def _run_evolve(cfg, spec, w, workers):
    jobs = [(spec.to_dict(), t, cfg["tol"], cfg["window_cap"]) for t in cfg["time_grid"]]
    r = cfg["radius"]
    for i, (sites, amp) in enumerate(_pmap(_evolve_one, jobs, workers)):
        if r is not None:
            keep = np.abs(sites) <= r
            sites, amp = sites[keep], amp[keep]
        rows = [(int(n), a.real, a.imag, abs(a) ** 2) for n, a in zip(sites, amp)]
        w.table(f"wavepacket_{i:03d}.csv", "wavepacket", rows)


def _bands_one(args):
    k, delta, lam, bits = args
    b = tracemap.real_bands(k, delta, lam, bits)
    hist = tracemap.c_histogram(k, lam, bits) if k >= 2 else {}
    return b.rows(), hist


def _run_tracemap(cfg, spec, w, workers):
    jobs = [(k, cfg["delta"], spec.lam, cfg["bits"]) for k in cfg["k_values"]]
    hist_rows = []
    for k, (rows, hist) in zip(cfg["k_values"], _pmap(_bands_one, jobs, workers)):
        w.table(f"bands_k{k:02d}.csv", "bands", rows)
        hist_rows += [(k, m, c) for m, c in hist.items()]
    w.table("c_histogram.csv", "c_histogram", hist_rows)


def _dimension_one(args):
    lam, k, delta, scales = args
    f = tracemap.box_dimension(lam, k, delta, scales=scales)
    return f.dimension, f.r_squared, int(np.size(f.scales))


def _run_dimension(cfg, spec, w, workers):
    jobs = [(lam, cfg["k"], cfg["delta"], cfg["scales"]) for lam in cfg["lambdas"]]
    rows = []
    for lam, (d, r2, n) in zip(cfg["lambdas"], _pmap(_dimension_one, jobs, workers)):
        rows.append((lam, cfg["k"], cfg["delta"], d, r2, d * math.log(lam), n))
    w.table("dimension.csv", "dimension", rows)


def _trend_rows(lams):
    return [(r["lambda"], r["alpha_upper_log"], r["alpha_lower_log"], r["gap"])
            for r in bounds.asymptotic_trend(lams)]


def _run_bounds(cfg, spec, w, workers):
    consts, betas, docs = [], [], []
    for lam in cfg["lambdas"]:
        cc = bounds.coupling_constants(lam, cfg["deltas"], cfg["p_list"], cfg["require_upper"])
        consts.append((lam, cc.S_l, cc.S_u, cc.alpha_upper, cc.alpha_lower, cc.s))
        betas += [(lam, p, cc.beta_lower_zero_phase(p)) for p in cfg["p_list"]]
        docs.append(cc.to_dict())
    w.table("constants.csv", "constants", consts)
    w.table("beta_zero_phase.csv", "beta_zero_phase", betas)
    w.table("trend.csv", "trend", _trend_rows(cfg["trend_lambdas"]))
    w.json("constants.json", {"constants": docs})
    env = cfg["envelope"]
    if env is not None:
        rep = bounds.theorem1_envelope(spec.lam, env["time_grid"], tuple(env["exponents"]),
                                       env["side"], env["quad_tol"], env["decay_alpha"])
        P, R = rep.measured["P"], rep.predicted["theorem1_rhs"]
        E, Ns = rep.predicted["theorem1_rhs_error"], rep.grid["N"]
        rows = [(t, e, int(Ns[i, j]), P[i, j], R[i, j], E[i, j])
                for i, t in enumerate(env["time_grid"]) for j, e in enumerate(env["exponents"])]
        w.table("envelope.csv", "envelope", rows)
        w.json("envelope.json", rep.to_dict())
    ch = cfg["chain"]
    if ch is not None:
        rep = bounds.lower_bound_chain(spec.lam, ch["time_grid"], ch["k"], ch["delta"], ch["slack"])
        rows = list(zip(ch["time_grid"], rep.grid["N"], rep.measured["avg_P"],
                        rep.measured["avg_P_error"], rep.predicted["bound"]))
        w.table("chain.csv", "chain", rows)
        w.json("chain.json", rep.to_dict())


def _n_for(t, alphas):
    return [max(0, int(math.ceil(t ** a)) - 1) for a in alphas]


def _run_exponents(cfg, spec, w, workers):
    times, ps, alphas = cfg["time_grid"], cfg["p_list"], cfg["alphas"]
    side = cfg["side"]
    p_arr = np.asarray(ps)
    N_grid = [_n_for(t, alphas) for t in times]
    all_N = np.unique(np.concatenate([np.asarray(n, dtype=np.int64) for n in N_grid]))

    def obs(pkt):
        n = np.abs(pkt.sites).astype(float)
        m = (n[None, :] ** p_arr[:, None]) @ pkt.probabilities
        return np.concatenate([m, dynamics.outside_profile(pkt, all_N, side)])

    n_p = len(ps)
    if cfg["averaged"]:
        floors = [max(cfg["noise_floor"], t ** -cfg["threshold_inf"]) for t in times]
        vals, errs = bounds.averaged_observable(
            spec, times, obs, n_p + all_N.size, tol=cfg["tol"], rtol=None, floors=floors,
            at_zero=np.concatenate([np.zeros(n_p), np.where(all_N == 0, 1.0, 0.0)]))
    else:
        rows, err_rows = [], []

        def grab(pkt):
            v = obs(pkt)
            R = max(-pkt.window.left, pkt.window.right, 1)
            err_rows.append(np.concatenate([pkt.truncation_bound * float(R) ** p_arr,
                                            dynamics.outside_error(pkt, v[n_p:])]))
            rows.append(v)

        dynamics.propagate_series(spec, np.asarray(times), tol=cfg["tol"], callback=grab)
        vals, errs = np.array(rows), np.array(err_rows)
    # probabilities not resolved above twice their error count as zero
    floor = np.maximum(cfg["noise_floor"], 2.0 * errs[:, n_p:])
    M, Pall = vals[:, :n_p], vals[:, n_p:]
    cols = [np.searchsorted(all_N, n) for n in N_grid]
    P = np.array([Pall[i, c] for i, c in enumerate(cols)]).T          # (n_alpha, n_t)
    PE = np.array([errs[i, n_p + c] for i, c in enumerate(cols)]).T
    F = np.array([floor[i, c] for i, c in enumerate(cols)]).T
    prof = bounds.spreading_profile(times, alphas, P, cfg["threshold_zero"], cfg["threshold_inf"],
                                    floor=F)
    ests = [bounds.transport_exponents(times, M[:, j], p, method=cfg["method"])
            for j, p in enumerate(ps)]
    w.table("moments.csv", "moments", [(t, p, M[i, j], errs[i, j]) for i, t in enumerate(times)
                                       for j, p in enumerate(ps)])
    w.table("outside.csv", "outside", [(t, a, N_grid[i][j], P[j, i], PE[j, i])
                                       for i, t in enumerate(times) for j, a in enumerate(alphas)])
    w.table("exponents.csv", "exponents", [(e.p, e.method, e.beta_minus, e.beta_plus,
                                            e.final_span[0], e.final_span[1]) for e in ests])
    w.table("spreading.csv", "spreading", list(zip(alphas, prof.S_minus, prof.S_plus)))
    rep = bounds.BoundReport(
        "exponents", spec.to_dict(),
        grid={"t": times, "alphas": alphas, "p_list": ps, "averaged": cfg["averaged"], "side": side},
        measured={"moments": M, "P": P},
        exponents={"spreading": prof.to_dict(), "transport": [e.to_dict() for e in ests]},
        windows={"spreading_final": list(prof.final_span),
                 "transport_final": list(ests[0].final_span)},
    )
    w.json("report.json", rep.to_dict())


def _run_sandwich(cfg, spec, w, workers):
    rep = bounds.sandwich_report(
        spec.lam, cfg["time_grid"], np.asarray(cfg["alphas"]), cfg["upper"], cfg["lower"],
        cfg["slack_lower"], cfg["slack_upper"], cfg["threshold_inf"], cfg["threshold_zero"])
    ex = rep.exponents
    w.table("spreading.csv", "spreading", list(zip(ex["alphas"], ex["S_minus"], ex["S_plus"])))
    P, E = rep.measured["avg_P"], rep.measured["avg_P_error"]
    rows = [(T, a, _n_for(T, [a])[0], P[j, i], E[j, i]) for i, T in enumerate(cfg["time_grid"])
            for j, a in enumerate(cfg["alphas"])]
    w.table("outside.csv", "outside", rows)
    w.table("trend.csv", "trend", _trend_rows(cfg["trend_lambdas"]))
    w.json("report.json", rep.to_dict())


def worker_count(cfg):
    env = os.environ.get(WORKERS_ENV)
    if env is None or env == "":
        return cfg["workers"]
    try:
        n = int(env)
    except ValueError:
        raise ConfigError(WORKERS_ENV, f"expected a positive integer, got {env!r}") from None
    if n < 1:
        raise ConfigError(WORKERS_ENV, f"expected a positive integer, got {env!r}")
    return n


def load_config(path):
    path = Path(path)
    try:
        raw = json.loads(path.read_text())
    except OSError as exc:
        raise ConfigError("config", f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError("config", f"invalid JSON ({exc})") from None
    return validate_config(raw)


def run(config, base_dir=".", created=None):
    """Execute a validated config; returns the manifest path."""
    cfg = validate_config(config)
    workers = worker_count(cfg)
    spec = PotentialSpec.from_dict(cfg["potential"])
    out = Path(base_dir) / cfg["output_dir"]
    w = Writer(out, cfg["precision"])
    try:
        globals()["_run_" + cfg["task"]](cfg, spec, w, workers)
    except (ConfigError, SchemaError):
        raise
    except QdxError as exc:
        raise type(exc)(f"task {cfg['task']}: {exc}") from exc
    return w.manifest(cfg, created)


# ---------------------------------------------------------------------------
# plot data


def _log(x):
    return math.log(x) if x > 0 else None


def _pairs(rows, fx, fy):
    out = []
    for r in rows:
        x, y = fx(r), fy(r)
        if x is not None and y is not None:
            out.append((x, y))
    return out


def _grouped(out_dir, stem, rows, key, label, xl, yl, fx, fy):
    groups = OrderedDict()
    for r in rows:
        groups.setdefault(r[key], []).append(r)
    if not groups:
        return [write_plot(out_dir / f"{stem}.{xl}_{yl}.txt", xl, yl, [])]
    return [write_plot(out_dir / f"{stem}.{label}={format_value(g)}.{xl}_{yl}.txt", xl, yl,
                       _pairs(rs, fx, fy)) for g, rs in groups.items()]


def _finite(v):
    return v if isinstance(v, (int, float)) and math.isfinite(v) else None


def _plot_file(out_dir, stem, schema, rows):
    if schema == "bands":
        return [write_plot(out_dir / f"{stem}.m_logwidth.txt", "m", "log_width",
                           _pairs(rows, lambda r: r["m"], lambda r: _log(r["width"])))]
    if schema == "spreading":
        return [write_plot(out_dir / f"{stem}.alpha_Splus.txt", "alpha", "S_plus",
                           _pairs(rows, lambda r: r["alpha"], lambda r: _finite(r["S_plus"]))),
                write_plot(out_dir / f"{stem}.alpha_Sminus.txt", "alpha", "S_minus",
                           _pairs(rows, lambda r: r["alpha"], lambda r: _finite(r["S_minus"])))]
    if schema == "dimension":
        return [write_plot(out_dir / f"{stem}.loglambda_dimloglambda.txt", "log_lambda",
                           "dimension_log_lambda",
                           _pairs(rows, lambda r: _log(r["lambda"]), lambda r: r["dimension_log_lambda"]))]
    if schema == "outside":
        return _grouped(out_dir, stem, rows, "alpha", "alpha", "log_t", "log_P",
                        lambda r: _log(r["t"]), lambda r: _log(r["P"]))
    if schema == "envelope":
        return _grouped(out_dir, stem, rows, "exponent", "exponent", "log_t", "log_P",
                        lambda r: _log(r["t"]), lambda r: _log(r["P"]))
    if schema == "moments":
        return _grouped(out_dir, stem, rows, "p", "p", "log_t", "log_moment",
                        lambda r: _log(r["t"]), lambda r: _log(r["moment"]))
    if schema == "chain":
        return [write_plot(out_dir / f"{stem}.logT_logavgP.txt", "log_T", "log_avg_P",
                           _pairs(rows, lambda r: _log(r["T"]), lambda r: _log(r["avg_P"])))]
    if schema == "trend":
        return [write_plot(out_dir / f"{stem}.loglambda_alphaupperlog.txt", "log_lambda",
                           "alpha_upper_log",
                           _pairs(rows, lambda r: _log(r["lambda"]), lambda r: r["alpha_upper_log"]))]
    return []


def emit_plotdata(manifest_path, out_dir=None):
    """Write two-column plot files for every declared table with a standard projection."""
    manifest_path = Path(manifest_path)
    doc = read_manifest(manifest_path)
    base = manifest_path.parent
    out_dir = base / "plotdata" if out_dir is None else Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    for entry in doc["files"]:
        for key in ("path", "schema"):
            if key not in entry:
                raise SchemaError(f"manifest entry without {key!r}")
        schema = entry["schema"]
        if schema in ("report", "plot"):
            continue
        rows = read_table(base / entry["path"], schema)
        written += _plot_file(out_dir, Path(entry["path"]).stem, schema, rows)
    return written


# ---------------------------------------------------------------------------
# entry point


def _parser():
    ap = argparse.ArgumentParser(prog="qdx", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)
    r = sub.add_parser("run", help="run an experiment config")
    r.add_argument("config")
    v = sub.add_parser("validate", help="check a config without running it")
    v.add_argument("config")
    p = sub.add_parser("plotdata", help="emit two-column plot files from a manifest")
    p.add_argument("manifest")
    p.add_argument("--out", default=None, help="output directory (default: <manifest dir>/plotdata)")
    return ap


def main(argv=None):
    args = _parser().parse_args(argv)
    try:
        if args.command == "validate":
            cfg = load_config(args.config)
            worker_count(cfg)
            print(f"ok: task {cfg['task']}")
        elif args.command == "run":
            cfg = load_config(args.config)
            path = run(cfg, Path(args.config).parent)
            print(path)
        else:
            for path in emit_plotdata(args.manifest, args.out):
                print(path)
    except (ConfigError, SchemaError) as exc:
        print(f"qdx: invalid input: {exc}", file=sys.stderr)
        return 2
    except (QdxError, ArithmeticError, ValueError, MemoryError) as exc:
        print(f"qdx: computation failed: {exc}", file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
