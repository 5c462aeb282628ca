"""feynprop command line: propagator evaluation, Morse closed forms,
heat-divergence data, desk verification and parameter sweeps.

Exit codes: 0 success, 1 malformed config, 2 domain/argument error,
3 truncation budget exceeded (partial JSON is still emitted).
"""

from __future__ import annotations

import argparse
import json
import math
import sys

import numpy as np

from . import dyson, heat, morse, oracle
from .config import load_config
from .errors import (ConfigError, ConvergenceBudgetError, FeynpropError,
                     GreenFormError, PoleError, UnsupportedError)
from .freeprop import SpacetimePair, free_kernel_with_field
from .measure import ExponentialMeasure, potential_eval

SCHEMA_VERSION = 1


def _emit(text: str, path: str | None):
    if path:
        with open(path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _c(z: complex) -> dict:
    return {"re": z.real, "im": z.imag}


def _series_json(result: dyson.SeriesResult) -> str:
    doc = {
        "schema": SCHEMA_VERSION,
        "value": _c(result.value),
        "terms": [_c(t) for t in result.terms],
        "order_used": result.order_used,
        "tail_bound": result.tail_bound,
        "quad_error": result.quad_error_estimate,
    }
    return json.dumps(doc, indent=2) + "\n"


def _read_config(path: str):
    with open(path) as fh:
        return load_config(fh.read())


def _cmd_propagate(args) -> int:
    cfg = _read_config(args.config)
    path = args.output or cfg.output_path
    try:
        result = dyson.propagator(cfg.query(), tol=args.tol, quad=cfg.quadrature,
                                  order=args.order)
    except ConvergenceBudgetError as exc:
        _emit(_series_json(exc.partial), path)
        print(f"feynprop: {exc}", file=sys.stderr)
        return 3
    _emit(_series_json(result), path)
    return 0


def _cmd_free(args) -> int:
    cfg = _read_config(args.config)
    value = free_kernel_with_field(cfg.theta,
                                   SpacetimePair(cfg.x, cfg.x0, cfg.t, cfg.t0),
                                   cfg.hbar, cfg.mass)
    doc = {"schema": SCHEMA_VERSION, "value": _c(value)}
    _emit(json.dumps(doc, indent=2) + "\n", args.output or cfg.output_path)
    return 0


def _morse_params(args) -> morse.MorseParams:
    return morse.MorseParams(args.g, args.gamma, args.a)


def _cmd_morse_spectrum(args) -> int:
    levels = morse.morse_spectrum(_morse_params(args))
    lines = ["n,energy"] + [f"{n},{e!r}" for n, e in enumerate(levels)]
    _emit("\n".join(lines) + "\n", args.output)
    return 0


def _cmd_morse_eigen(args) -> int:
    fn = morse.MorseEigenfunction(args.n, _morse_params(args))
    xs = np.linspace(args.x_min, args.x_max, args.points)
    vals = fn(xs)
    lines = ["x,psi"] + [f"{x!r},{v!r}" for x, v in zip(xs, vals)]
    _emit("\n".join(lines) + "\n", args.output)
    return 0


def _cmd_morse_green(args) -> int:
    query = morse.GreenQuery(_morse_params(args), complex(args.e_re, args.e_im))
    forms = ["whittaker", "kummer"] if args.form == "both" else [args.form]
    doc = {"schema": SCHEMA_VERSION}
    for form in forms:
        doc[form] = _c(morse.morse_green(args.xp, args.x, query, form=form))
    _emit(json.dumps(doc, indent=2) + "\n", args.output)
    return 0


def _cmd_morse_series(args) -> int:
    params = _morse_params(args)
    measure = morse.morse_measure(params)
    pair = SpacetimePair([args.x], [args.x0], args.t, args.t0)
    from .field import TestFunction
    q = dyson.PropagatorQuery(pair, args.g, TestFunction(1), measure)
    lines = ["n,re,im"]
    for n in range(args.n_max + 1):
        term = morse.morse_series_term(n, q)
        lines.append(f"{n},{term.real!r},{term.imag!r}")
    _emit("\n".join(lines) + "\n", args.output)
    return 0


def _cmd_heat(args) -> int:
    cfg = _read_config(args.config)
    pair = SpacetimePair(cfg.x, cfg.x0, cfg.t, cfg.t0)
    hq = heat.HeatQuery(pair, cfg.g, cfg.measure, cfg.hbar, cfg.mass)
    if args.a0 is not None:
        a0 = args.a0
    else:
        hq, a0 = heat.default_a0(hq)
    lines = ["n,log10_term,log10_lower_bound"]
    for n in range(args.n_max + 1):
        term_log, _ = heat.heat_term_log10(n, hq, cfg.quadrature)
        bound_log = heat.divergence_lower_bound_log10(n, hq, a0)
        lines.append(f"{n},{term_log!r},{bound_log!r}")
    _emit("\n".join(lines) + "\n", args.output or cfg.output_path)
    return 0


def _cmd_sweep(args) -> int:
    cfg = _read_config(args.config)
    values = np.linspace(args.start, args.stop, args.steps)
    lines = ["param,re,im,order_used,tail_bound,quad_error"]
    for v in values:
        x, t, g = cfg.x, cfg.t, cfg.g
        if args.param == "g":
            g = complex(v)
        elif args.param == "t":
            t = float(v)
        elif args.param == "x":
            x = cfg.x.copy()
            x[0] = v
        pair = SpacetimePair(x, cfg.x0, t, cfg.t0)
        q = dyson.PropagatorQuery(pair, g, cfg.theta, cfg.measure, cfg.hbar, cfg.mass)
        result = dyson.propagator(q, tol=args.tol, quad=cfg.quadrature)
        lines.append(
            f"{float(v)!r},{result.value.real!r},{result.value.imag!r},"
            f"{result.order_used},{result.tail_bound!r},"
            f"{result.quad_error_estimate!r}"
        )
    _emit("\n".join(lines) + "\n", args.output or cfg.output_path)
    return 0


def _cmd_verify(args) -> int:
    checks = []

    # constant potential: exact scalar phase
    measure = ExponentialMeasure(1, (((1.0 + 0.0j), (0.0,)),))
    from .field import TestFunction
    pair = SpacetimePair([0.4], [0.0], 1.3, 0.0)
    q = dyson.PropagatorQuery(pair, 0.7, TestFunction(1), measure)
    got = dyson.propagator(q, tol=1e-12).value
    from .freeprop import free_kernel
    want = free_kernel(pair) * np.exp(-1j * 0.7 * 1.3)
    checks.append(("constant-potential phase", abs(got - want) / abs(want) < 1e-10))

    # Morse spectrum formula vs grid diagonalization (coarse)
    params = morse.MorseParams(2.0, 1.0, 1.0)
    closed = morse.morse_spectrum(params)
    grid = oracle.Grid1D(-5.0, 10.0, 1501)
    numeric = oracle.hamiltonian_eigs(grid, lambda x: morse.morse_potential(params, x),
                                      len(closed))
    checks.append((
        "morse spectrum vs grid",
        bool(np.max(np.abs(np.array(closed) - numeric)) < 1e-3),
    ))

    # bridge form never positive
    rng = np.random.default_rng(7)
    worst = 0.0
    for _ in range(2000):
        n = rng.integers(1, 6)
        alphas = rng.normal(size=(n, 2))
        sigmas = rng.random(n)
        worst = max(worst, dyson.bridge_quadratic(alphas, sigmas))
    checks.append(("bridge form <= 0", worst <= 1e-12))

    # heat terms dominate their lower bound
    hpair = SpacetimePair([0.0], [0.0], 1.0, 0.0)
    hq = heat.HeatQuery(hpair, 1.0, ExponentialMeasure(1, ((1.0, (1.0,)),)))
    ok = True
    for n in range(1, 4):
        term_log, _ = heat.heat_term_log10(n, hq)
        if term_log < heat.divergence_lower_bound_log10(n, hq, 1.0):
            ok = False
    checks.append(("heat term >= lower bound", ok))

    failed = 0
    for name, passed in checks:
        print(f"{'PASS' if passed else 'FAIL'}  {name}")
        if not passed:
            failed += 1
    return 0 if failed == 0 else 2


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="feynprop",
        description="Perturbation-series propagators for exponential-class potentials",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("propagate", help="evaluate the truncated propagator")
    p.add_argument("--config", required=True)
    p.add_argument("--tol", type=float, default=1e-8)
    p.add_argument("--order", type=int, default=None)
    p.add_argument("--json", action="store_true", help="emit JSON (default)")
    p.add_argument("--output", default=None)
    p.set_defaults(func=_cmd_propagate)

    p = sub.add_parser("free", help="free propagator with external field")
    p.add_argument("--config", required=True)
    p.add_argument("--output", default=None)
    p.set_defaults(func=_cmd_free)

    pm = sub.add_parser("morse", help="Morse closed forms")
    msub = pm.add_subparsers(dest="morse_command", required=True)

    p = msub.add_parser("spectrum")
    for flag in ("--g", "--gamma", "--a"):
        p.add_argument(flag, type=float, required=True)
    p.add_argument("--output", default=None)
    p.set_defaults(func=_cmd_morse_spectrum)

    p = msub.add_parser("eigen")
    for flag in ("--g", "--gamma", "--a"):
        p.add_argument(flag, type=float, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--x-min", type=float, default=-3.0)
    p.add_argument("--x-max", type=float, default=8.0)
    p.add_argument("--points", type=int, default=201)
    p.add_argument("--output", default=None)
    p.set_defaults(func=_cmd_morse_eigen)

    p = msub.add_parser("green")
    for flag in ("--g", "--gamma", "--a"):
        p.add_argument(flag, type=float, required=True)
    p.add_argument("--e-re", type=float, required=True)
    p.add_argument("--e-im", type=float, default=0.0)
    p.add_argument("--x", type=float, required=True)
    p.add_argument("--xp", type=float, required=True)
    p.add_argument("--form", choices=("whittaker", "kummer", "both"),
                   default="whittaker")
    p.add_argument("--output", default=None)
    p.set_defaults(func=_cmd_morse_green)

    p = msub.add_parser("series")
    for flag in ("--g", "--gamma", "--a"):
        p.add_argument(flag, type=float, required=True)
    p.add_argument("--x", type=float, default=0.0)
    p.add_argument("--x0", type=float, default=0.0)
    p.add_argument("--t", type=float, default=1.0)
    p.add_argument("--t0", type=float, default=0.0)
    p.add_argument("--n-max", type=int, default=6)
    p.add_argument("--output", default=None)
    p.set_defaults(func=_cmd_morse_series)

    p = sub.add_parser("heat-divergence", help="heat-continuation term growth")
    p.add_argument("--config", required=True)
    p.add_argument("--n-max", type=int, default=8)
    p.add_argument("--a0", type=float, default=None)
    p.add_argument("--csv", action="store_true", help="emit CSV (default)")
    p.add_argument("--output", default=None)
    p.set_defaults(func=_cmd_heat)

    p = sub.add_parser("verify", help="desk-scale oracle cross checks")
    p.set_defaults(func=_cmd_verify)

    p = sub.add_parser("sweep", help="parameter sweep of the propagator")
    p.add_argument("--config", required=True)
    p.add_argument("--param", choices=("g", "t", "x"), required=True)
    p.add_argument("--from", dest="start", type=float, required=True)
    p.add_argument("--to", dest="stop", type=float, required=True)
    p.add_argument("--steps", type=int, required=True)
    p.add_argument("--tol", type=float, default=1e-8)
    p.add_argument("--output", default=None)
    p.set_defaults(func=_cmd_sweep)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"feynprop: config error: {exc}", file=sys.stderr)
        return 1
    except FileNotFoundError as exc:
        print(f"feynprop: {exc}", file=sys.stderr)
        return 1
    except (ValueError, UnsupportedError, GreenFormError, PoleError,
            OverflowError) as exc:
        print(f"feynprop: {exc}", file=sys.stderr)
        return 2
    except FeynpropError as exc:
        print(f"feynprop: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
