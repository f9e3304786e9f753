"""Command-line driver.

    ellface verify --suite rmatrix --seed 42 --out report.json [--config run.cfg]
    ellface eval bracket 0 6 --x 0.3 --r 6

Exit codes: 0 every check passed, 1 some check failed, 2 configuration or
usage error.  The report format is described in docs/report_schema.md.
"""
from __future__ import annotations

import argparse
import configparser
import json
import logging
import math
import sys
import time
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path

from . import current_structure as cs
from . import face_rmatrix as fr
from . import scaling_limit as sl
from . import special_functions as sf
from .config import DEFAULT_CFG, ModelParams, TruncationConfig
from .errors import ConfigError, EllfaceError
from .suites import SUITES, SuiteContext, build_checks

log = logging.getLogger("ellface")

SCHEMA_NAME = "ellface.verification-report"
SCHEMA_VERSION = 1
EXIT_PASS, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2

_PARAM_KEYS = {"x": "x", "r": "r", "c": "c", "pi_hat": "pi_hat"}
_TRIG_KEYS = {"hbar": "hbar", "eta": "eta"}
_TRUNC_KEYS = {"target_tol": float, "max_product_terms": int, "max_sum_terms": int, "max_modes": int}


@dataclass
class RunConfig:
    params: ModelParams = field(default_factory=ModelParams)
    trig: sl.TrigParams = field(default_factory=sl.TrigParams)
    truncation: TruncationConfig = DEFAULT_CFG
    suites: tuple = ("all",)
    seed: int = 0
    output_path: str | None = None
    timings: bool = False


def _number(text):
    try:
        z = complex(text.replace(" ", ""))
    except ValueError:
        raise ConfigError(f"not a number: {text!r}") from None
    return z.real if z.imag == 0 else z


def read_config_file(path):
    """key = value lines (no section header needed); '#' starts a comment."""
    parser = configparser.ConfigParser(inline_comment_prefixes=("#",))
    try:
        text = Path(path).read_text()
        parser.read_string("[run]\n" + text)
    except (OSError, configparser.Error) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    return dict(parser["run"])


def make_params(values: dict, allow_small_r=False):
    """Split a flat key/value mapping into model, trigonometric and truncation settings."""
    pkw, tkw, ckw = {}, {}, {}
    for key, raw in values.items():
        if raw is None:
            continue
        if key in _PARAM_KEYS:
            pkw[_PARAM_KEYS[key]] = _number(raw) if isinstance(raw, str) else raw
        elif key in _TRIG_KEYS:
            tkw[_TRIG_KEYS[key]] = float(raw)
        elif key in _TRUNC_KEYS:
            try:
                ckw[key] = _TRUNC_KEYS[key](raw)
            except ValueError:
                raise ConfigError(f"bad value for {key}: {raw!r}") from None
        else:
            raise ConfigError(f"unknown config key {key!r}")
    for k in ("r", "c", "pi_hat"):
        if k in pkw:
            if isinstance(pkw[k], complex):
                raise ConfigError(f"{k} must be real")
            pkw[k] = float(pkw[k])
    r = pkw.get("r", ModelParams.r)
    if r <= 4:
        if not allow_small_r:
            raise ConfigError(f"r = {r} violates 4 < r; pass --allow-small-r to proceed anyway")
        log.warning("proceeding with r = %s <= 4 on request", r)
    params = ModelParams(allow_small_r=allow_small_r, **pkw)
    if "c" in pkw and "c" not in tkw:
        tkw["c"] = pkw["c"]
    trig = sl.TrigParams(**tkw)
    cfg = TruncationConfig.from_env(replace(DEFAULT_CFG, **ckw))
    return params, trig, cfg


# ----------------------------------------------------------------- verify


def _json_float(x):
    x = float(x)
    return x if math.isfinite(x) else repr(x)


def run_suite(name, config: RunConfig):
    """Run every check of suite ``name``; returns the report as a dict."""
    ctx = SuiteContext(config.params, config.trig, config.truncation, config.seed)
    records = []
    for chk in build_checks(name, ctx):
        t0 = time.perf_counter()
        error = None
        try:
            residual = float(chk.fn())
        except EllfaceError as exc:
            residual, error = float("nan"), f"{type(exc).__name__}: {exc}"
        ms = (time.perf_counter() - t0) * 1e3
        passed = math.isfinite(residual) and residual < chk.tolerance
        rec = {
            "check_id": chk.check_id,
            "reference": chk.reference,
            "parameters": chk.parameters,
            "residual": _json_float(residual),
            "tolerance": chk.tolerance,
            "passed": passed,
            "wall_time_ms": round(ms, 3) if config.timings else None,
        }
        if error:
            rec["error"] = error
        records.append(rec)
        log.info("%s %s residual=%.3e", "PASS" if passed else "FAIL", chk.check_id, residual)
    finite = [r["residual"] for r in records if isinstance(r["residual"], float)]
    p = config.params
    return {
        "schema": SCHEMA_NAME,
        "schema_version": SCHEMA_VERSION,
        "suite": name,
        "seed": config.seed,
        "params": {"x": _num_out(p.x), "r": p.r, "c": p.c, "pi_hat": p.pi_hat},
        "trig": {"hbar": config.trig.hbar, "eta": config.trig.eta, "c": config.trig.c},
        "truncation": asdict(config.truncation),
        "records": records,
        "summary": {
            "total": len(records),
            "passed": sum(r["passed"] for r in records),
            "failed": sum(not r["passed"] for r in records),
            "errors": sum("error" in r for r in records),
            "worst_residual": max(finite) if finite else None,
        },
    }


def _num_out(z):
    z = complex(z)
    return z.real if z.imag == 0 else [z.real, z.imag]


def dump_report(report) -> str:
    return json.dumps(report, indent=2, sort_keys=True) + "\n"


def write_report(report, path):
    """Write once; an existing report is never overwritten."""
    path = Path(path)
    if path.exists():
        raise ConfigError(f"{path} exists; reports are never overwritten")
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dump_report(report))


# ----------------------------------------------------------------- eval


def _loose(cfg):
    return replace(cfg, target_tol=cfg.target_tol * 1e4)


def _kappa_eval(args, params, trig, cfg):
    beta = float(args[0])
    val = sl.kappa(beta, trig, cfg)
    alt = sl.kappa(beta, trig, cfg, cutoff=2 * sl.kappa_cutoff(trig))
    return val, abs(val - alt)


def _generic(fn, nargs):
    def run(args, params, trig, cfg):
        if len(args) != nargs:
            raise ConfigError(f"expected {nargs} arguments, got {len(args)}")
        val = complex(fn(args, params, trig, cfg))
        alt = complex(fn(args, params, trig, _loose(cfg)))
        return val, abs(val - alt)
    return run


EVAL_FUNCTIONS = {
    "bracket": (_generic(lambda a, p, t, c: sf.bracket(_number(a[0]), float(a[1]), p, c), 2), "v t"),
    "theta": (_generic(lambda a, p, t, c: sf.theta_big(_number(a[0]), _number(a[1]), c), 2), "z q"),
    "pochhammer": (_generic(lambda a, p, t, c: sf.pochhammer(_number(a[0]), _number(a[1]), c), 2), "z q"),
    "tau": (_generic(lambda a, p, t, c: fr.tau(_number(a[0]), p, c), 1), "v"),
    "weight": (_generic(lambda a, p, t, c: fr.weight(a[0], _number(a[1]), float(a[2]), p, c), 3), "which v pi_hat"),
    "exchange": (_generic(lambda a, p, t, c: cs.exchange(a[0], _number(a[1]), p, c), 2), "kind dv"),
    "trig_exchange": (_generic(lambda a, p, t, c: sl.trig_exchange(a[0], float(a[1]), t, c), 2), "kind dbeta"),
    "trig_weight": (_generic(lambda a, p, t, c: sl.trig_weight(a[0], float(a[1]), float(a[2]), t, c), 3),
                    "which beta pi_hat"),
    "kappa": (_kappa_eval, "beta"),
}


def eval_function(name, args, params, trig, cfg):
    if name not in EVAL_FUNCTIONS:
        raise ConfigError(f"unknown function {name!r}; choose from {', '.join(sorted(EVAL_FUNCTIONS))}")
    fn, _ = EVAL_FUNCTIONS[name]
    if name == "kappa" and len(args) != 1:
        raise ConfigError("kappa takes one argument")
    return fn(args, params, trig, cfg)


# ----------------------------------------------------------------- argparse


def build_parser():
    ap = argparse.ArgumentParser(prog="ellface", description="Elliptic face algebra verification workbench.")
    ap.add_argument("-v", "--verbose", action="store_true", help="log every check")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--x", help="modulus x (may be complex, e.g. 0.3+0.1j)")
        p.add_argument("--r", help="level r (> 4)")
        p.add_argument("--c", help="center c")
        p.add_argument("--pi-hat", dest="pi_hat", help="dynamical variable")
        p.add_argument("--hbar", help="trigonometric hbar")
        p.add_argument("--eta", help="trigonometric eta")
        p.add_argument("--allow-small-r", action="store_true", help="proceed (with a warning) when r <= 4")

    v = sub.add_parser("verify", help="run a verification suite and write a JSON report")
    v.add_argument("--suite", default="all", choices=SUITES + ("all",))
    v.add_argument("--config", help="key = value parameter file")
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--out", help="report path (default: print to stdout)")
    v.add_argument("--timings", action="store_true", help="record wall times (reports stop being byte-reproducible)")
    common(v)

    e = sub.add_parser("eval", help="evaluate one function and print value and error estimate")
    e.add_argument("function", help=", ".join(f"{k} <{h}>" for k, (_, h) in sorted(EVAL_FUNCTIONS.items())))
    e.add_argument("args", nargs="*")
    common(e)
    return ap


def _collect(ns, file_values=None):
    vals = dict(file_values or {})
    for k in ("x", "r", "c", "pi_hat", "hbar", "eta"):
        if getattr(ns, k, None) is not None:
            vals[k] = getattr(ns, k)
    return make_params(vals, allow_small_r=ns.allow_small_r)


def main(argv=None):
    ap = build_parser()
    try:
        ns = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_PASS
    logging.basicConfig(level=logging.INFO if ns.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        if ns.command == "eval":
            # negative numbers look like options to argparse: accept "--" or an "m" prefix (m0.3 = -0.3)
            args = ["-" + a[1:] if a.startswith("m") and a[1:2].isdigit() else a for a in ns.args]
            params, trig, cfg = _collect(ns)
            val, err = eval_function(ns.function, args, params, trig, cfg)
            print(json.dumps({"function": ns.function, "args": ns.args, "value": [val.real, val.imag],
                              "error_estimate": err}))
            return EXIT_PASS
        file_values = read_config_file(ns.config) if ns.config else {}
        params, trig, cfg = _collect(ns, file_values)
        config = RunConfig(params, trig, cfg, (ns.suite,), ns.seed, ns.out, ns.timings)
        report = run_suite(ns.suite, config)
        if ns.out:
            write_report(report, ns.out)
        else:
            sys.stdout.write(dump_report(report))
        s = report["summary"]
        print(f"{ns.suite}: {s['passed']}/{s['total']} passed, worst residual {s['worst_residual']}", file=sys.stderr)
        return EXIT_PASS if s["failed"] == 0 else EXIT_FAIL
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except EllfaceError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
