"""Command-line front end.

Exit status: 0 success, 1 usage or configuration error, 2 comparison failed,
3 numerical non-convergence.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from . import __version__
from .compare import DEFAULT_ETAS, DEFAULT_POINTS, DEFAULT_SIGMAS, DEFAULT_TOLERANCE, run_compare
from .config import ConfigError, parse_config, parse_flags
from .figures import DEFAULT_SAMPLES, FIGURES, TITLES, T_MAX, figure_curves
from .oracle import QuadratureError, SpectralKernel, energy_shift
from .output import fmt, to_csv, to_svg
from .params import EV, HBAR, ParameterError, derive_scales, known_presets, material_preset
from .rates import Curve, RateParams, decay, gamma

EXIT_OK, EXIT_USAGE, EXIT_FAIL, EXIT_NONCONVERGED = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def build_parser():
    parser = _Parser(
        prog="phonon-dephasing",
        description="Phonon-induced dephasing of a double-donor charge qubit.",
        epilog="Parameters are overridden with --section.key=value, e.g. --temperature.K=4.",
        allow_abbrev=False,
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    common = _Parser(add_help=False, allow_abbrev=False)
    common.add_argument("--config", help="key = value config file (default: $PHONON_DEPHASING_CONFIG)")
    common.add_argument("--out", default="-", help="output file, '-' for stdout")
    common.add_argument("--format", choices=("csv", "svg"), default="csv")

    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name, text in (("rate", "decoherence rate gamma(t) in 1/s"), ("decay", "decay function g(t)")):
        cmd = sub.add_parser(name, parents=[common], help=text, allow_abbrev=False)
        cmd.add_argument("--samples", type=int, default=DEFAULT_SAMPLES)
        cmd.add_argument("--t-max", type=float, default=T_MAX, help="last time in units of tau_d")

    fig = sub.add_parser("figure", parents=[common], help="reproduce a published figure", allow_abbrev=False)
    fig.add_argument("id", choices=FIGURES)
    fig.add_argument("--samples", type=int, default=DEFAULT_SAMPLES)

    cmp_ = sub.add_parser("compare", parents=[common], help="closed form against quadrature", allow_abbrev=False)
    cmp_.add_argument("--eta", type=float, nargs="*", default=list(DEFAULT_ETAS))
    cmp_.add_argument("--sigma", type=float, nargs="*", default=list(DEFAULT_SIGMAS))
    cmp_.add_argument("--points", type=int, default=DEFAULT_POINTS)
    cmp_.add_argument("--t-max", type=float, default=T_MAX)
    cmp_.add_argument("--tolerance", type=float, default=DEFAULT_TOLERANCE)

    sub.add_parser("shift", parents=[common], help="phonon-induced level shift", allow_abbrev=False)

    mat = sub.add_parser("material", help="list or show material presets", allow_abbrev=False)
    mat.add_argument("action", choices=("list", "show"))
    mat.add_argument("name", nargs="?")
    return parser


def _split_args(parser, argv):
    args, extra = parser.parse_known_args(argv)
    bad = [tok for tok in extra if not (tok.startswith("--") and "." in tok.split("=", 1)[0])]
    if bad:
        raise UsageError(f"unrecognised arguments: {' '.join(bad)}")
    return args, extra


def _emit(text, out):
    if out == "-":
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def _render(curves, header, args, title, ylabel):
    if args.format == "svg":
        return to_svg(curves, title=title, ylabel=ylabel)
    return to_csv(curves, header)


def _scale_header(run, scales):
    head = {"package": f"phonon_dephasing {__version__}"}
    head.update(run.header())
    head.update(
        tau_d_s=fmt(scales.tau_d),
        T0_K=fmt(scales.T0),
        eta=fmt(scales.eta),
        sigma=fmt(scales.sigma),
        Gamma_T_per_s=fmt(scales.gamma_T(run.temperature)),
    )
    return head


def _time_grid(args):
    if args.samples < 2 or not args.t_max > 0:
        raise UsageError("need --samples >= 2 and --t-max > 0")
    return np.linspace(0.0, args.t_max, args.samples)


def _cmd_curve(args, flags):
    run = parse_config(args.config, flags)
    scales = derive_scales(run.material, run.geometry)
    x = _time_grid(args)
    p = RateParams.from_scales(scales, run.temperature)
    t = x * scales.tau_d
    if args.command == "rate":
        curve = Curve(x, gamma(t, p), "gamma_per_s")
        title, ylabel = "Decoherence rate", "gamma [1/s]"
    else:
        curve = Curve(x, decay(t, run.temperature, p, scales), "g")
        title, ylabel = "Decoherence function", "g(t)"
    head = {"command": args.command, **_scale_header(run, scales)}
    _emit(_render([curve], head, args, f"{title}, T = {run.temperature:g} K", ylabel), args.out)
    return EXIT_OK


def _cmd_figure(args, flags):
    if flags:
        raise UsageError("figures are dimensionless and take no parameter overrides")
    if args.samples < 2:
        raise UsageError("need --samples >= 2")
    curves, meta = figure_curves(args.id, args.samples)
    title, ylabel = TITLES[args.id]
    head = {"command": "figure", "package": f"phonon_dephasing {__version__}", **meta}
    _emit(_render(curves, head, args, title, ylabel), args.out)
    return EXIT_OK


def _cmd_compare(args, flags):
    if args.format != "csv":
        raise UsageError("compare writes csv only")
    run = parse_config(args.config, flags)
    if not args.eta or not args.sigma or args.points < 1:
        raise UsageError("comparison grid is empty")
    report = run_compare(args.eta, args.sigma, args.points, args.t_max, args.tolerance, run.quad)
    _emit(report.to_csv(), args.out)
    verdict = "pass" if report.passed else "fail"
    print(
        f"compare: {verdict} max_deviation={report.max_deviation:.3g} tolerance={args.tolerance:g} "
        f"nonconverged={report.nonconverged}",
        file=sys.stderr,
    )
    if report.nonconverged:
        return EXIT_NONCONVERGED
    return EXIT_OK if report.passed else EXIT_FAIL


def _cmd_shift(args, flags):
    if args.format != "csv":
        raise UsageError("shift writes key=value text only")
    run = parse_config(args.config, flags)
    scales = derive_scales(run.material, run.geometry)
    res = energy_shift(SpectralKernel(run.material, run.geometry), run.quad)
    head = {"command": "shift", **_scale_header(run, scales)}
    lines = [f"# {k}={v}" for k, v in head.items()]
    lines += [
        f"shift_rad_per_s={fmt(res.value)}",
        f"shift_error_rad_per_s={fmt(res.error)}",
        f"shift_meV={fmt(res.value * HBAR / EV * 1e3)}",
    ]
    _emit("\n".join(lines) + "\n", args.out)
    return EXIT_OK


def _cmd_material(args, flags):
    if flags:
        raise UsageError("material takes no parameter overrides")
    if args.action == "list":
        print("\n".join(known_presets()))
        return EXIT_OK
    if not args.name:
        raise UsageError("material show needs a NAME")
    try:
        m = material_preset(args.name)
    except KeyError as exc:
        raise UsageError(exc.args[0]) from None
    print(f"name={m.name}")
    print(f"material.rho_m={m.mass_density!r}")
    print(f"material.s={m.sound_speed!r}")
    print(f"material.D_eV={m.deformation_ev!r}")
    return EXIT_OK


_COMMANDS = {
    "rate": _cmd_curve,
    "decay": _cmd_curve,
    "figure": _cmd_figure,
    "compare": _cmd_compare,
    "shift": _cmd_shift,
    "material": _cmd_material,
}


def main(argv=None):
    parser = build_parser()
    try:
        args, extra = _split_args(parser, sys.argv[1:] if argv is None else argv)
        flags = parse_flags(extra)
        return _COMMANDS[args.command](args, flags)
    except (UsageError, ConfigError, ParameterError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except QuadratureError as exc:
        print(f"error: quadrature did not converge: {exc}", file=sys.stderr)
        return EXIT_NONCONVERGED
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
