"""Command-line front end: ``steep {sweep,validate,rate,mc}``.

Exit status is 0 on success, 1 if any gated check failed and 2 on a
configuration or I/O error. ``STEEP_SEED`` overrides the config seed;
``--seed`` overrides both.
"""

import argparse
import dataclasses
import json
import math
import os
import sys

import numpy as np

from . import gsteep, mc_oracle, msteep
from .channel_model import PowerConfig, sample_channels
from .config import FORMATS, SUITES, ValidationConfig, parse_config, parse_sweep
from .errors import ConfigError, SteepError
from .sweep import columns, random_network, render, run_sweep
from .validation import run_validation

EXIT_OK, EXIT_CHECKS, EXIT_CONFIG = 0, 1, 2


def _clean(obj):
    """Replace non-finite floats so the output is strict JSON."""
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        return v if math.isfinite(v) else str(v)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def report_json(report):
    return json.dumps(_clean(report), indent=1) + "\n"


def _resolve_seed(flag, config_seed):
    if flag is not None:
        return flag
    env = os.environ.get("STEEP_SEED")
    if env is not None and env.strip():
        try:
            seed = int(env)
        except ValueError:
            raise ConfigError(f"STEEP_SEED must be a non-negative integer, got {env!r}") from None
        if seed < 0:
            raise ConfigError(f"STEEP_SEED must be a non-negative integer, got {env!r}")
        return seed
    return config_seed


def _emit(text, out):
    if out:
        try:
            with open(out, "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
        except OSError as exc:
            raise ConfigError(f"cannot write {out!r}: {exc.strerror}") from exc
    else:
        sys.stdout.write(text)


def _parse_params(items):
    params = {}
    for item in items:
        key, sep, raw = item.partition("=")
        if not sep or not key:
            raise ConfigError(f"expected KEY=VALUE, got {item!r}")
        try:
            params[key] = json.loads(raw)
        except json.JSONDecodeError:
            params[key] = raw
    return params


def cmd_sweep(args):
    spec = parse_config(args.config)
    if isinstance(spec, ValidationConfig):
        raise ConfigError("sweep needs a sweep config (kind 'sweep')")
    spec = dataclasses.replace(
        spec,
        seed=_resolve_seed(args.seed, spec.seed),
        format=args.format or spec.format,
        out=args.out or spec.out,
    )
    rows = run_sweep(spec, jobs=args.jobs)
    _emit(render(rows, columns(spec), spec.format), spec.out)
    return EXIT_OK


def cmd_validate(args):
    cfg = parse_config(args.config) if args.config else ValidationConfig()
    if not isinstance(cfg, ValidationConfig):
        raise ConfigError("validate needs a validation config (kind 'validate')")
    suites = cfg.suites
    if args.suite:
        suites = tuple(s for s in SUITES if s in args.suite)
    cfg = dataclasses.replace(cfg, seed=_resolve_seed(args.seed, cfg.seed), suites=suites, out=args.out or cfg.out)
    report, status = run_validation(cfg, jobs=args.jobs)
    _emit(report_json(report), cfg.out)
    for c in report["checks"]:
        if c["gated"] and not c["passed"]:
            print(f"FAIL {c['suite']}: {c['name']} ({c['detail'] or c['value']})", file=sys.stderr)
    s = report["summary"]
    print(f"{'PASS' if s['passed'] else 'FAIL'}: {s['gated'] - s['failed']}/{s['gated']} gated checks passed",
          file=sys.stderr)
    return status


def cmd_rate(args):
    doc = {"kind": "sweep", "scheme": args.scheme, "grid": _parse_params(args.params)}
    spec = parse_sweep(doc)
    if spec.n_rows != 1:
        raise ConfigError(f"rate computes a single point; the parameters give {spec.n_rows}")
    spec = dataclasses.replace(spec, seed=_resolve_seed(args.seed, 0))
    rows = run_sweep(spec)
    _emit(render(rows, columns(spec), args.format or "csv"), args.out)
    return EXIT_OK


def _mc_reports(spec, n_samples, seed):
    p = next(spec.points())
    key = (spec.scheme, spec.mode)
    if key == ("gsteep", "mimo"):
        ch = sample_channels(p["n_A"], p["n_B"], p["n_E"], [spec.seed, p["realization"]])
        return mc_oracle.mc_gsteep(ch, PowerConfig(p["p_A"], p["p_B"]), n_samples, seed)
    if key == ("psteep", "siso"):
        snr = gsteep.SisoSnr(p["a"], p["b"], p["alpha"], p["beta"])
        return mc_oracle.mc_psteep(p["M"], snr, n_samples, seed)
    if key == ("msteep", "symmetric"):
        sym = (p["sigma2"], p["sigma2_A"], p["sigma2_E"], p["sigma2_EA"])
        return mc_oracle.mc_msteep(msteep.symmetric_network(*sym, p["M"]), n_samples, seed, symmetric=sym)
    if key == ("msteep", "random"):
        net = random_network(p["M"], p["n_A"], p["n_E"], p["p_A"], p["p_u"], [spec.seed, p["realization"]])
        return mc_oracle.mc_msteep(net, n_samples, seed)
    if key == ("classic", "mimo"):
        ch = sample_channels(p["n_A"], p["n_B"], p["n_E"], [spec.seed, p["realization"]])
        return [mc_oracle.mc_classic_wtc(ch, PowerConfig(p["p_A"], p["p_A"]), np.eye(ch.n_A), n_samples, seed)]
    raise ConfigError(f"no simulator for {spec.scheme} with {spec.mode} parameters")


def cmd_mc(args):
    spec = parse_sweep({"kind": "sweep", "scheme": args.scheme, "grid": _parse_params(args.params)})
    if spec.n_rows != 1:
        raise ConfigError(f"mc simulates a single point; the parameters give {spec.n_rows}")
    seed = _resolve_seed(args.seed, 0)
    spec = dataclasses.replace(spec, seed=seed)
    default_n = mc_oracle.MIN_SYMBOLS if spec.scheme == "psteep" else 1_000_000
    n = args.samples if args.samples is not None else default_n
    try:
        reports = _mc_reports(spec, n, seed)
    except SteepError as exc:
        raise ConfigError(f"{type(exc).__name__}: {exc}") from exc
    rows = [r.as_dict() for r in reports]
    cols = ("name", "analytic", "empirical", "n_samples", "std_error", "z", "passed", "gated")
    _emit(render(rows, cols, args.format or "csv"), args.out)
    return EXIT_CHECKS if any(r.gated and not r.passed for r in reports) else EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(prog="steep", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, fmt=True):
        p.add_argument("--seed", type=int, default=None, help="overrides STEEP_SEED and the config seed")
        p.add_argument("--out", default=None, help="output path (default: stdout)")
        if fmt:
            p.add_argument("--format", choices=FORMATS, default=None)
        p.add_argument("--jobs", type=int, default=1, help="worker processes (1 = serial)")

    p = sub.add_parser("sweep", help="evaluate closed forms over a parameter grid")
    p.add_argument("--config", required=True, help="JSON config path or inline JSON text")
    common(p)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("validate", help="run the validation suites")
    p.add_argument("--config", default=None, help="JSON config path or inline JSON text")
    p.add_argument("--suite", action="append", choices=SUITES, help="run only this suite (repeatable)")
    common(p, fmt=False)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("rate", help="closed-form results at one point")
    p.add_argument("scheme")
    p.add_argument("params", nargs="*", metavar="KEY=VALUE")
    common(p)
    p.set_defaults(func=cmd_rate)

    p = sub.add_parser("mc", help="Monte Carlo oracle at one point")
    p.add_argument("scheme")
    p.add_argument("params", nargs="*", metavar="KEY=VALUE")
    p.add_argument("--samples", type=int, default=None)
    common(p)
    p.set_defaults(func=cmd_mc)
    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    if getattr(args, "jobs", 1) < 1:
        print("error: --jobs must be >= 1", file=sys.stderr)
        return EXIT_CONFIG
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
