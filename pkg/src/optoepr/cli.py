"""Command-line interface.

Commands: derive, spectrum, sweep, optimum, verify, occupation.  Without
``--config`` the built-in default operating point is used.  Exit codes:
0 success, 2 configuration error, 3 physics-domain error, 4 IO error.
"""

from __future__ import annotations

import argparse
import math
import sys

import numpy as np

from . import io as tabio
from .config import RunConfig, parse_config
from .errors import ConfigError, OptoEprError, PhysicsError
from .langevin import compare_models, intracavity_occupation
from .params import validate_regime
from .spectrum import optimum_d, spectrum
from .steady_state import retuned_d, solve_steady_state
from .sweeps import SweepSpec, find_optimum_d_numeric, run_sweep

_AXIS_NAMES = {"T": "temperature", "alpha": "alpha", "d": "d", "Q": "Q"}
_DEFAULT_SWEEP_VALUES = {
    "temperature": "4,77,300",
    "alpha": "500,1000,2000",
    "d": "",           # filled from gamma at runtime
    "Q": "300,3000,30000",
}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="optoepr",
        description="EPR entanglement of the output beams of a driven two-mode "
                    "optomechanical cavity (frequency-domain, stationary).",
    )
    parser.add_argument("command", choices=["derive", "spectrum", "sweep", "optimum",
                                            "verify", "occupation"])
    parser.add_argument("--config", metavar="PATH",
                        help="key=value configuration file (default: built-in paper defaults)")
    parser.add_argument("--set", dest="overrides", action="append", default=[],
                        metavar="KEY=VALUE", help="override a configuration key (repeatable)")
    parser.add_argument("--out", metavar="PATH", help="output file (default: stdout)")
    parser.add_argument("--format", choices=["csv", "jsonlines"], default=None)
    parser.add_argument("--omega-min", type=float, default=None,
                        help="grid start [rad/s] (default -2 gamma)")
    parser.add_argument("--omega-max", type=float, default=None,
                        help="grid end [rad/s] (default +2 gamma)")
    parser.add_argument("--omega-points", type=int, default=2001)
    parser.add_argument("--axis", choices=sorted(_AXIS_NAMES), help="sweep axis")
    parser.add_argument("--values", help="comma-separated sweep values")
    parser.add_argument("--models", default="adiabatic,rwa3,full6",
                        help="comma-separated models for verify")
    parser.add_argument("--at-optimum-d", action="store_true",
                        help="retune d to the closed-form optimum before running")
    parser.add_argument("--numeric", action="store_true",
                        help="optimum: also run the numeric 1-D optimization")
    return parser


def _load_config(args) -> RunConfig:
    if args.config:
        with open(args.config) as handle:
            text = handle.read()
    else:
        text = "defaults: paper\n"
    overrides = {}
    for item in args.overrides:
        if "=" not in item:
            raise ConfigError(f"--set expects KEY=VALUE, got {item!r}")
        key, _, value = item.partition("=")
        overrides[key.strip()] = value.strip()
    cfg = parse_config(text, overrides, command=args.command)
    if args.format:
        cfg = RunConfig(params=cfg.params, command=cfg.command,
                        output_path=cfg.output_path, format=args.format)
    if args.out:
        cfg = RunConfig(params=cfg.params, command=cfg.command,
                        output_path=args.out, format=cfg.format)
    return cfg


def _grid(args, gamma: float) -> np.ndarray:
    lo = -2.0 * gamma if args.omega_min is None else args.omega_min
    hi = 2.0 * gamma if args.omega_max is None else args.omega_max
    if args.omega_points < 1 or hi < lo:
        raise ConfigError("invalid omega grid")
    return np.linspace(lo, hi, args.omega_points)


def _maybe_retune(params, args):
    if not args.at_optimum_d:
        return params
    derived = solve_steady_state(params)
    return retuned_d(params, optimum_d(derived).d_o)


def _spectrum_rows(derived, grid, model_name: str):
    rows = []
    for pt in spectrum(derived, grid):
        sf, m = pt.standard_form, pt.metrics
        rows.append({
            "omega_rads": pt.omega,
            "omega_over_gamma": pt.omega / derived.gamma,
            "n": None if sf is None else sf.n,
            "k_x": None if sf is None else sf.k_x,
            "epr_variance": None if m is None else m.epr_variance,
            "S_db": None if m is None else m.S_db,
            "eof": None if m is None else m.eof,
            "log_negativity": None if m is None else m.log_negativity,
            "model": model_name,
            "flags": ";".join(pt.flags),
        })
    return rows


def _emit(rows, cfg: RunConfig, columns=tabio.BASE_COLUMNS) -> None:
    text = tabio.emit_rows(rows, cfg.format, cfg.output_path, columns)
    if cfg.output_path is None:
        sys.stdout.write(text)


def _cmd_derive(args, cfg: RunConfig) -> int:
    params = _maybe_retune(cfg.params, args)
    derived = solve_steady_state(params)
    # regime ratios are quoted at the elimination band edge unless the
    # caller pins a band explicitly
    omega_max = abs(args.omega_max) if args.omega_max is not None else 0.1 * derived.delta
    report = validate_regime(params, derived, omega_max=omega_max)
    print("derived parameters (rad/s unless noted):")
    print(f"  |alpha_1| = {abs(derived.alpha_1):.6g}   |alpha_2| = {abs(derived.alpha_2):.6g}")
    print(f"  beta = {derived.beta:.6g} (dropped imaginary part {derived.beta_imag_dropped:.3g})")
    print(f"  Delta_1' = {derived.Delta_1p:.6g}   Delta_2' = {derived.Delta_2p:.6g}")
    print(f"  delta = {derived.delta:.6g}   d = {derived.d:.6g} ({derived.d / derived.gamma:.4f} gamma)")
    print(f"  g = {derived.g:.6g}   g' = {derived.g_prime:.6g}   gamma_m~ = {derived.gamma_m_tilde:.6g}")
    print(f"  n_m = {derived.n_m:.6g}   multistable = {derived.multistable}")
    print("regime checks:")
    print(str(report))
    return 0


def _cmd_spectrum(args, cfg: RunConfig) -> int:
    params = _maybe_retune(cfg.params, args)
    derived = solve_steady_state(params)
    grid = _grid(args, params.gamma)
    _emit(_spectrum_rows(derived, grid, "adiabatic"), cfg)
    return 0


def _cmd_sweep(args, cfg: RunConfig) -> int:
    if not args.axis:
        raise ConfigError("sweep requires --axis {T|alpha|d|Q}")
    axis = _AXIS_NAMES[args.axis]
    params = _maybe_retune(cfg.params, args)
    if args.values:
        values = tuple(float(v) for v in args.values.split(","))
    elif axis == "d":
        g = params.gamma
        values = tuple(np.linspace(0.02 * g, 0.14 * g, 7))
    else:
        values = tuple(float(v) for v in _DEFAULT_SWEEP_VALUES[axis].split(","))
    grid = _grid(args, params.gamma)
    result = run_sweep(SweepSpec(axis=axis, values=values, base=params,
                                 omega_grid=grid, model="adiabatic"))
    rows = []
    for row in result.rows:
        tag = f"{args.axis}={row.value:.17g}"
        if row.error:
            rows.append({"model": "adiabatic", "flags": f"{tag};error:{row.error}"})
            continue
        for omega, x, e in zip(row.omega, row.epr_variance, row.eof):
            rows.append({
                "omega_rads": float(omega),
                "omega_over_gamma": float(omega) / params.gamma,
                "n": None,
                "k_x": None,
                "epr_variance": float(x),
                "S_db": -10.0 * math.log10(x),
                "eof": float(e),
                "log_negativity": max(0.0, -math.log2(x)),
                "model": "adiabatic",
                "flags": tag,
            })
    _emit(rows, cfg)
    for row in result.rows:
        if row.error:
            print(f"# {args.axis}={row.value:g}: {row.error}", file=sys.stderr)
        else:
            print(f"# {args.axis}={row.value:g}: peak_eof={row.peak_eof:.6g} "
                  f"fwhm={row.fwhm:.6g} peaks_at={[f'{w:.4g}' for w in row.peak_omegas]}",
                  file=sys.stderr)
    return 0


def _cmd_optimum(args, cfg: RunConfig) -> int:
    params = cfg.params
    derived = solve_steady_state(params)
    opt = optimum_d(derived)
    print(f"d_o = {opt.d_o:.10g} rad/s = {opt.d_o / params.gamma:.6g} gamma")
    print(f"S_o = {opt.S_o_db:.6g} dB")
    print(f"EOF_o = {opt.eof_o:.6g} ebits")
    if opt.unbounded:
        print("warning: squeezing unbounded in this limit")
    if args.numeric:
        bracket = (0.25 * opt.d_o, min(4.0 * opt.d_o, 0.5 * params.gamma))
        d_star = find_optimum_d_numeric(params, bracket)
        print(f"numeric optimum d* = {d_star:.10g} rad/s "
              f"({abs(d_star - opt.d_o) / opt.d_o:.3%} from closed form)")
    return 0


def _cmd_verify(args, cfg: RunConfig) -> int:
    models = tuple(m.strip() for m in args.models.split(",") if m.strip())
    params = _maybe_retune(cfg.params, args)
    derived = solve_steady_state(params)
    grid = _grid(args, params.gamma)
    report = compare_models(derived, grid, models=models)
    dev_cols = tuple(f"dev_{m}" for m in models[1:])
    columns = tabio.BASE_COLUMNS + dev_cols
    rows = []
    for row in report.rows:
        for model in models:
            pt = row.values[model]
            record = {
                "omega_rads": row.omega,
                "omega_over_gamma": row.omega / params.gamma,
                "n": None,
                "k_x": None,
                "epr_variance": pt.epr_variance,
                "S_db": pt.S_db,
                "eof": pt.eof,
                "log_negativity": None if pt.epr_variance is None
                                  else max(0.0, -math.log2(pt.epr_variance)),
                "model": model,
                "flags": "" if pt.error is None else f"error:{pt.error}",
            }
            for m in models[1:]:
                record[f"dev_{m}"] = row.deviations.get(m)
            rows.append(record)
    _emit(rows, cfg, columns)
    for model, dev in report.max_deviation.items():
        print(f"# max |rel dev| of n-k_x, {model} vs {report.baseline}: {dev:.6g}",
              file=sys.stderr)
    return 0


def _cmd_occupation(args, cfg: RunConfig) -> int:
    derived = solve_steady_state(cfg.params)
    value = intracavity_occupation(derived)
    alpha_sq = abs(derived.alpha_1) ** 2
    print(f"<a1^dag a1> = {value:.6g}")
    print(f"|alpha_1|^2 = {alpha_sq:.6g}  (ratio {value / alpha_sq:.3e})")
    return 0


_COMMANDS = {
    "derive": _cmd_derive,
    "spectrum": _cmd_spectrum,
    "sweep": _cmd_sweep,
    "optimum": _cmd_optimum,
    "verify": _cmd_verify,
    "occupation": _cmd_occupation,
}


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        cfg = _load_config(args)
        return _COMMANDS[args.command](args, cfg)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    except PhysicsError as exc:
        print(f"physics error: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return 4
    except OptoEprError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
