"""Command-line front end.

    lbeval simulate --model sine.nmx --name G --n 100 --out run/
    lbeval lbe --model sine.nmx --a G --b H --n 100 --out run/
    lbeval validate --model sine.nmx --system S --model-name G \\
        --extension H --n 65 --out run/
    lbeval reproduce sine-map --n 100 --out run/

Exit codes: 0 success, 2 usage error, 3 parse error, 4 numeric divergence,
5 I/O error.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from datetime import datetime, timezone

from . import __version__
from .dsl import ParseError, load_model_file
from .expr import DivergenceError, EvaluationError
from .metrics import lbe as lbe_series
from .sim import DuffingParams, InputTooShortError, orbit_to_csv, simulate
from .studies import (FIDELITY_MODES, STUDY_NAMES, CaseStudy, Forcing,
                      get_study, run_procedure)

EXIT_OK, EXIT_USAGE, EXIT_PARSE, EXIT_DIVERGENCE, EXIT_IO = 0, 2, 3, 4, 5


class UsageError(Exception):
    pass


def _period(text: str) -> float:
    """Accept a float or ``pi/K``."""
    if text.startswith("pi/"):
        return math.pi / float(text[3:])
    return float(text)


def _add_common(p: argparse.ArgumentParser, forcing=True):
    p.add_argument("--n", type=int, default=100, help="iterations (N)")
    p.add_argument("--out", default=".", help="output directory")
    if forcing:
        p.add_argument("--forcing-amplitude", type=float, default=10.0,
                       help="A in U_n = A*cos(n*Ts), for models reading u[]")
        p.add_argument("--forcing-period", type=_period, default="pi/60",
                       help="Ts in U_n = A*cos(n*Ts); float or pi/K")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lbeval",
        description="Simulate recursive models, compute the lower bound "
                    "error between model extensions, and evaluate "
                    "RMSE/MAPE/LRMSE/LMAPE.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="iterate one model, write orbit.csv")
    p.add_argument("--model", required=True, help=".nmx file")
    p.add_argument("--name", required=True, help="model name in the file")
    _add_common(p)

    p = sub.add_parser("lbe", help="lower bound error of two extensions")
    p.add_argument("--model", required=True, help=".nmx file")
    p.add_argument("--a", required=True, help="first model name")
    p.add_argument("--b", required=True, help="second model name")
    _add_common(p)

    p = sub.add_parser(
        "validate", help="run the three-step procedure on a "
                         "system/model/extension triple")
    p.add_argument("--model", required=True,
                   help=".nmx file; names below may also be FILE:NAME")
    p.add_argument("--system", required=True,
                   help="system model name, or 'duffing-ode'")
    p.add_argument("--model-name", required=True, help="identified model G")
    p.add_argument("--extension", required=True, help="extension H")
    _add_common(p)
    _add_study_flags(p)
    p.add_argument("--damping", type=float, default=1.0,
                   help="k for the duffing-ode system")
    p.add_argument("--stiffness", type=float, default=0.25,
                   help="mu for the duffing-ode system")

    p = sub.add_parser("reproduce", help="run a shipped case study")
    p.add_argument("study", choices=STUDY_NAMES)
    _add_common(p, forcing=False)
    _add_study_flags(p)
    return parser


def _add_study_flags(p):
    p.add_argument("--fidelity", choices=FIDELITY_MODES, default="equivalent")
    p.add_argument("--substeps", type=int, default=100,
                   help="RK4 steps per sample for the Duffing system")
    p.add_argument("--format", choices=("csv", "json", "both"),
                   default="both")


def _resolve(ref: str, default_file: str, cache: dict):
    path, _, name = ref.rpartition(":")
    path = path or default_file
    if path not in cache:
        cache[path] = load_model_file(path)
    try:
        return cache[path][name]
    except KeyError:
        known = ", ".join(cache[path].models)
        raise UsageError(f"no model {name!r} in {path} (has: {known})")


def _write(out_dir: str, name: str, text: str):
    with open(os.path.join(out_dir, name), "w", encoding="utf-8",
              newline="") as fh:
        fh.write(text)


def _write_manifest(out_dir: str, args: argparse.Namespace, argv):
    params = {k: v for k, v in sorted(vars(args).items())}
    doc = {"command": ["lbeval"] + list(argv), "parameters": params,
           "version": __version__}
    text = json.dumps(doc, indent=2, sort_keys=True)
    # the timestamp is the only run-dependent line; keep it last and alone
    stamp = datetime.now(timezone.utc).isoformat(timespec="seconds")
    text = text[:-2] + f',\n  "timestamp": "{stamp}"\n}}\n'
    _write(out_dir, "manifest.json", text)


def _input_for(models, args, N):
    if any(m.requires_input for m in models):
        return Forcing(args.forcing_amplitude, args.forcing_period)
    return None


def cmd_simulate(args) -> int:
    model = _resolve(args.name, args.model, {})
    forcing = _input_for([model], args, args.n)
    u = forcing.realize(args.n) if forcing else None
    orbit = simulate(model, args.n, u) if u else simulate(model, args.n)
    _write(args.out, "orbit.csv", orbit_to_csv(orbit))
    return EXIT_OK


def cmd_lbe(args) -> int:
    cache: dict = {}
    a = _resolve(args.a, args.model, cache)
    b = _resolve(args.b, args.model, cache)
    forcing = _input_for([a, b], args, args.n)
    u = forcing.realize(args.n) if forcing else None
    orbits = [simulate(m, args.n, u) if (u and m.requires_input)
              else simulate(m, args.n) for m in (a, b)]
    delta = lbe_series(*orbits)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["n", "a", "b", "delta"])
    for n in range(args.n + 1):
        w.writerow([n, repr(orbits[0][n]), repr(orbits[1][n]),
                    repr(delta[n])])
    _write(args.out, "lbe.csv", buf.getvalue())
    return EXIT_OK


def _write_procedure(out_dir: str, result, fmt: str):
    reports = (("step1_2", result.report_step1_2),
               ("step3", result.report_step3))
    if fmt in ("csv", "both"):
        for tag, report in reports:
            _write(out_dir, f"{tag}_report.csv", report.to_csv())
            for pair in (("rmse", "lrmse", "d_rmse_pct"),
                         ("mape", "lmape", "d_mape_pct")):
                _write(out_dir, f"{tag}_{pair[0]}.csv",
                       _series_csv(report, pair))
    if fmt in ("json", "both"):
        _write(out_dir, "summary.json",
               json.dumps(result.summary(), indent=2) + "\n")


def _series_csv(report, columns) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(("n",) + columns)
    series = {"rmse": report.rmse.values, "lrmse": report.lrmse.values,
              "mape": report.mape.values, "lmape": report.lmape.values,
              "d_rmse_pct": report.d_rmse_pct,
              "d_mape_pct": report.d_mape_pct}
    for n in range(len(report.y)):
        w.writerow([n] + ["" if series[c][n] is None else repr(series[c][n])
                          for c in columns])
    return buf.getvalue()


def cmd_validate(args) -> int:
    cache: dict = {}
    model = _resolve(args.model_name, args.model, cache)
    extension = _resolve(args.extension, args.model, cache)
    if args.system == "duffing-ode":
        system = DuffingParams(k=args.damping, mu=args.stiffness,
                               A=args.forcing_amplitude,
                               Ts=args.forcing_period,
                               substeps=args.substeps)
        triple = [model, extension]
    else:
        system = _resolve(args.system, args.model, cache)
        triple = [system, model, extension]
    if model.requires_input != extension.requires_input:
        raise UsageError(
            f"model {model.name!r} and extension {extension.name!r} disagree "
            "on whether they take an input")
    forcing = _input_for(triple, args, args.n)
    if forcing is None and isinstance(system, DuffingParams):
        forcing = Forcing(args.forcing_amplitude, args.forcing_period)
    study = CaseStudy("custom", system, model, extension, N=args.n,
                      forcing=forcing, fidelity=args.fidelity)
    _write_procedure(args.out, run_procedure(study), args.format)
    return EXIT_OK


def cmd_reproduce(args) -> int:
    study = get_study(args.study, args.n, args.fidelity, args.substeps)
    _write_procedure(args.out, run_procedure(study), args.format)
    return EXIT_OK


COMMANDS = {"simulate": cmd_simulate, "lbe": cmd_lbe,
            "validate": cmd_validate, "reproduce": cmd_reproduce}


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if args.n < 0:
        print("lbeval: error: --n must be nonnegative", file=sys.stderr)
        return EXIT_USAGE
    try:
        os.makedirs(args.out, exist_ok=True)
        code = COMMANDS[args.command](args)
        _write_manifest(args.out, args, argv)
        return code
    except ParseError as exc:
        print(f"lbeval: parse error:\n{exc}", file=sys.stderr)
        return EXIT_PARSE
    except DivergenceError as exc:
        print(f"lbeval: divergence at step {exc.step_index}: {exc}",
              file=sys.stderr)
        return EXIT_DIVERGENCE
    except EvaluationError as exc:
        print(f"lbeval: evaluation error: {exc}", file=sys.stderr)
        return EXIT_DIVERGENCE
    except (UsageError, InputTooShortError, ValueError) as exc:
        print(f"lbeval: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"lbeval: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
