"""
Command-line front end, `loewner-lab <command> ...`.

Exit codes: 0 on success, 2 for invalid input or specs, 3 for numerical
failures (non-convergence, integration or resolution errors).
"""
import argparse
import sys

import numpy as np
from loguru import logger

from .. import __version__
from ..checks import INVARIANT_CHECKS, run_invariant_suite
from ..config import NumericConfig, load_config
from ..core import SingularPair
from ..exceptions import InvalidArgument, NumericalError
from ..io import write_curve_csv, write_driving_csv, write_json, write_sweep_csv
from ..loewner_flow import compute_trace, evolve_point, singular_pair, trace_tip
from ..measures import THEOREM2_QUANTITIES, measures_from_pair, ratio_theorem1, ratio_theorem2
from ..oracles import arc_params, sqrt_interval_endpoints, sqrt_params
from ..plotting import plot_curves, plot_driving, plot_sweep
from ..welding import compute_driving
from .specs import normalise_complex, normalise_curve_spec, normalise_driving_spec, normalise_t_grid

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_NUMERICAL = 3

# command-line flags that override NumericConfig fields
NUMERIC_FLAGS = {
    "ode_rel_tol": float,
    "ode_abs_tol": float,
    "ode_method": str,
    "real_ode_method": str,
    "extrapolation_rel_tol": float,
    "newton_tol": float,
    "max_newton_iters": int,
    "weld_steps": int,
    "bootstrap_fraction": float,
    "arc_t_max": float,
}


def _parse_eps_list(text):
    try:
        return tuple(float(value) for value in text.split(","))
    except ValueError as ex:
        raise argparse.ArgumentTypeError(f"invalid eps list {text!r}") from ex


def _add_common_arguments(parser):
    parser.add_argument("--config", help="YAML/JSON file with NumericConfig values (explicit flags win)")
    for name, type_ in NUMERIC_FLAGS.items():
        parser.add_argument(f"--{name.replace('_', '-')}", dest=name, type=type_, default=None)
    parser.add_argument("--eps-list", dest="eps_list", type=_parse_eps_list, default=None)
    parser.add_argument("--output", "-o", default=None, help="Output file, stdout when omitted")
    parser.add_argument("--format", choices=("csv", "json", "svg"), default=None, help="Output format")
    parser.add_argument("--plot", default=None, help="Also write an SVG figure to this path")
    parser.add_argument("--stamp", action="store_true", help="Prefix CSV output with a version comment line")
    parser.add_argument("--verbose", "-v", action="store_true", help="Log numerical detail to stderr")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="loewner-lab", description="Numerical experiments with the chordal Löwner equation."
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    commands = parser.add_subparsers(dest="command", required=True)

    evolve = commands.add_parser("evolve", help="Evolve a point under the forward flow")
    evolve.add_argument("--driving", required=True)
    evolve.add_argument("--z0", required=True, help="Start point, x+yj or x,y")
    evolve.add_argument("--t", type=float, required=True)
    evolve.add_argument("--estimate-error", action="store_true")

    trace = commands.add_parser("trace", help="Trace tip at one capacity or trace vertices on a grid")
    trace.add_argument("--driving", required=True)
    group = trace.add_mutually_exclusive_group(required=True)
    group.add_argument("--t", type=float)
    group.add_argument("--t-grid", help="geometric:start,stop,points with start < stop")

    weld = commands.add_parser("weld", help="Driving function of a slit")
    weld.add_argument("--curve", required=True)
    weld.add_argument("--n-vertices", type=int, default=None)

    hcap = commands.add_parser("hcap", help="Half-plane capacity of a slit")
    hcap.add_argument("--curve", required=True)
    hcap.add_argument("--n-vertices", type=int, default=None)

    oracle = commands.add_parser("oracle", help="Closed-form solution families")
    oracle.add_argument("family", choices=("sqrt", "arc"))
    oracle.add_argument("--c", type=float, default=None)
    oracle.add_argument("--t", type=float, default=None)

    measure = commands.add_parser("measure", help="Slit-side harmonic measures at one capacity")
    measure.add_argument("--driving", required=True)
    measure.add_argument("--t", type=float, required=True)

    ratio = commands.add_parser("ratio", help="Small-capacity sweep of a slit-side ratio")
    ratio.add_argument("--theorem", type=int, choices=(1, 2), required=True)
    source = ratio.add_mutually_exclusive_group()
    source.add_argument("--c", type=float)
    source.add_argument("--driving")
    source.add_argument("--curve")
    ratio.add_argument("--t-grid", required=True, help="geometric:start,stop,points with start > stop")
    ratio.add_argument("--quantity", choices=THEOREM2_QUANTITIES, default="measure")
    ratio.add_argument("--n-vertices", type=int, default=None)

    check = commands.add_parser("check", help="Run the invariant suite")
    check.add_argument("--only", nargs="+", choices=list(INVARIANT_CHECKS), default=None)

    for subparser in commands.choices.values():
        _add_common_arguments(subparser)
    return parser


def _setup_logging(verbose):
    logger.remove()
    logger.add(sys.stderr, level="DEBUG" if verbose else "INFO")


def _numeric_config(args):
    cfg = load_config(args.config) if args.config else NumericConfig()
    overrides = {name: getattr(args, name) for name in list(NUMERIC_FLAGS) + ["eps_list"]}
    return cfg.updated(**overrides)


def _require(value, message):
    if value is None:
        raise InvalidArgument(message)
    return value


def _emit_json(values, args):
    if args.format not in (None, "json"):
        raise InvalidArgument(f"{args.command}: only JSON output is available, got --format {args.format}")
    write_json(values, args.output)


def _point(z):
    return dict(x=float(np.real(z)), y=float(np.imag(z)))


def cmd_evolve(args, cfg):
    z0 = normalise_complex(args.z0, "z0")
    driving = normalise_driving_spec(args.driving, domain_end=args.t or 1.0, cfg=cfg)
    result = evolve_point(z0, driving, args.t, cfg, estimate_error=args.estimate_error)
    _emit_json(
        dict(
            **_point(result.value),
            survived=result.survived,
            step_count=result.step_count,
            error_estimate=result.error_estimate,
            swallow_time=result.swallow_time,
        ),
        args,
    )


def cmd_trace(args, cfg):
    if args.t is not None:
        driving = normalise_driving_spec(args.driving, domain_end=args.t or 1.0, cfg=cfg)
        _emit_json(_point(trace_tip(driving, args.t, cfg)), args)
        return
    times = normalise_t_grid(args.t_grid, decreasing=False)
    driving = normalise_driving_spec(args.driving, domain_end=float(times[-1]), cfg=cfg)
    curve = compute_trace(driving, times, cfg)
    if args.format == "svg":
        plot_curves(curve, _require(args.output, "trace: --format svg needs --output"))
    elif args.format == "json":
        write_json(dict(t=curve.capacity.tolist(), x=curve.vertices.real.tolist(), y=curve.vertices.imag.tolist()), args.output)
    else:
        write_curve_csv(curve, args.output, stamp=args.stamp)
    if args.plot:
        plot_curves(curve, args.plot)


def cmd_weld(args, cfg):
    curve = normalise_curve_spec(args.curve, args.n_vertices or cfg.weld_steps)
    result = compute_driving(curve, cfg)
    times = result.driving.times
    values = result.driving.values
    if args.format == "svg":
        plot_driving(times, values, _require(args.output, "weld: --format svg needs --output"))
    elif args.format == "json":
        write_json(dict(hcap=result.hcap_total, lambda_end=float(values[-1]), n_vertices=len(curve)), args.output)
    else:
        write_driving_csv(times, values, args.output, stamp=args.stamp)
    if args.plot:
        plot_driving(times, values, args.plot)


def cmd_hcap(args, cfg):
    curve = normalise_curve_spec(args.curve, args.n_vertices or cfg.weld_steps)
    result = compute_driving(curve, cfg)
    _emit_json(dict(hcap=result.hcap_total, n_vertices=len(curve)), args)


def cmd_oracle(args, cfg):
    if args.family == "sqrt":
        params = sqrt_params(abs(_require(args.c, "oracle sqrt: --c is required")))
        values = dict(c=args.c, beta=float(np.sign(args.c) * params.beta), theta=params.theta, b_modulus=params.b_modulus)
        if args.c < 0:
            values["theta"] = float(np.pi - params.theta)
        if args.t is not None:
            pair = sqrt_interval_endpoints(abs(args.c), args.t)
            if args.c < 0:
                pair = SingularPair(t=pair.t, f_minus=-pair.f_plus, lam=-pair.lam, f_plus=-pair.f_minus)
            values.update({"t": pair.t, "f_minus": pair.f_minus, "lambda": pair.lam, "f_plus": pair.f_plus})
        _emit_json(values, args)
        return
    params = arc_params(_require(args.t, "oracle arc: --t is required"), cfg)
    _emit_json(
        dict(
            t=params.t,
            beta1=params.beta1,
            beta2=params.beta2,
            lambda0=params.lambda0,
            residual1=params.residual1,
            residual2=params.residual2,
        ),
        args,
    )


def cmd_measure(args, cfg):
    driving = normalise_driving_spec(args.driving, domain_end=args.t, cfg=cfg)
    pair = singular_pair(driving, args.t, cfg)
    measures = measures_from_pair(pair)
    _emit_json(
        {
            "t": pair.t,
            "lambda": pair.lam,
            "f_minus": pair.f_minus,
            "f_plus": pair.f_plus,
            "m_left": measures.m_left,
            "m_right": measures.m_right,
            "ratio": measures.m_left / measures.m_right,
        },
        args,
    )


def cmd_ratio(args, cfg):
    times = normalise_t_grid(args.t_grid, decreasing=True)
    if args.curve is not None:
        source = normalise_curve_spec(args.curve, args.n_vertices or cfg.weld_steps)
    elif args.driving is not None:
        source = normalise_driving_spec(args.driving, domain_end=float(times[0]), cfg=cfg)
    elif args.c is not None:
        if args.theorem == 2:
            raise InvalidArgument("ratio: --c selects the sqrt family of theorem 1")
        source = args.c
    elif args.theorem == 2:
        source = "oracle"
    else:
        raise InvalidArgument("ratio: theorem 1 needs --c, --driving or --curve")

    if args.theorem == 1:
        series = ratio_theorem1(source, times, cfg)
    else:
        series = ratio_theorem2(source, times, cfg, quantity=args.quantity)

    if args.format == "svg":
        plot_sweep(series, _require(args.output, "ratio: --format svg needs --output"))
    elif args.format == "csv":
        write_sweep_csv(series, args.output, stamp=args.stamp)
    else:
        write_json(dict(series.summary(), expected_limit=series.expected_limit, quantity=series.quantity), args.output)
    if args.plot:
        plot_sweep(series, args.plot)


def cmd_check(args, cfg):
    results = run_invariant_suite(cfg, names=args.only)
    json_to_stdout = args.format == "json" and args.output is None
    if not json_to_stdout:
        for result in results:
            marker = "✅" if result.passed else "❌"
            print(f"{marker} {result.name}: {result.detail}")
    if args.format == "json" or args.output:
        write_json([dict(name=r.name, passed=r.passed, detail=r.detail) for r in results], args.output)
    return EXIT_OK if all(r.passed for r in results) else EXIT_NUMERICAL


COMMANDS = {
    "evolve": cmd_evolve,
    "trace": cmd_trace,
    "weld": cmd_weld,
    "hcap": cmd_hcap,
    "oracle": cmd_oracle,
    "measure": cmd_measure,
    "ratio": cmd_ratio,
    "check": cmd_check,
}


def run(argv=None):
    """Parse `argv`, execute the command and return the exit code."""
    args = build_parser().parse_args(argv)
    _setup_logging(args.verbose)
    try:
        cfg = _numeric_config(args)
        code = COMMANDS[args.command](args, cfg)
    except InvalidArgument as ex:
        print(f"❌ {args.command}: {ex}", file=sys.stderr)
        return EXIT_INVALID
    except NumericalError as ex:
        print(f"❌ {args.command}: {type(ex).__name__}: {ex}", file=sys.stderr)
        return EXIT_NUMERICAL
    if args.output and args.command != "check":
        print(f"✅ {args.command}: wrote {args.output}", file=sys.stderr)
    return EXIT_OK if code is None else code


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
