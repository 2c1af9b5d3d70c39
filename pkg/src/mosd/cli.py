"""Command-line front end.

Exit codes: 0 success, 2 invalid input, 3 dual solver not converged,
4 Hölder bound violated by a probe.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .continuity import (
    PROBE_TOL,
    counterexample_pair,
    fit_exponent,
    holder_sample,
    probe_region,
    samples_to_csv,
)
from .descent import DescentParams, run_descent
from .direction import CRITICAL_EPS, is_pareto_critical, steepest_descent_direction
from .errors import InvalidInputError, MosdError, NotConvergedError
from .minnorm import DEFAULT_TOL
from .problems import REGISTRY, Region, check_gradients, get_problem

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_NOT_CONVERGED = 3
EXIT_BOUND_FAILED = 4


# ---------------------------------------------------------------------------
# parsing helpers
# ---------------------------------------------------------------------------


def parse_floats(text: str) -> list[float]:
    """Comma- (or whitespace-) separated decimals."""
    parts = [p for p in text.replace(",", " ").split()]
    if not parts:
        raise InvalidInputError("expected a comma-separated list of numbers")
    try:
        vals = [float(p) for p in parts]
    except ValueError as exc:
        raise InvalidInputError(f"not a number list: {text!r}") from exc
    if not all(math.isfinite(v) for v in vals):
        raise InvalidInputError(f"non-finite value in {text!r}")
    return vals


def read_point(flag: str | None, path: str | None, what: str = "--x") -> np.ndarray:
    # a file wins over the flag
    if path is not None:
        return np.array(parse_floats(Path(path).read_text()))
    if flag is None:
        raise InvalidInputError(f"{what} (or {what}-file) is required")
    return np.array(parse_floats(flag))


def parse_region(text: str | None, n: int) -> Region:
    """``ball:c1,..,cn:r``, ``box:l1,..,ln:u1,..,un`` or a JSON file path.

    Defaults to the radius-2 ball around the origin.
    """
    if text is None:
        return Region.ball(np.zeros(n), 2.0)
    path = Path(text)
    if path.is_file():
        region = Region.from_dict(json.loads(path.read_text()))
    else:
        kind, _, rest = text.partition(":")
        a, _, b = rest.partition(":")
        if kind == "ball" and a and b:
            region = Region.ball(parse_floats(a), parse_floats(b)[0])
        elif kind == "box" and a and b:
            region = Region.box(parse_floats(a), parse_floats(b))
        else:
            raise InvalidInputError(f"cannot parse region {text!r}; use ball:C:R or box:LO:HI")
    if region.dim != n:
        raise InvalidInputError(f"region has dimension {region.dim}, problem has {n}")
    return region


def _open_out(path: str | None):
    if path is None or path == "-":
        return sys.stdout, False
    return open(path, "w", newline=""), True


def _write(path: str | None, text: str) -> None:
    fh, close = _open_out(path)
    try:
        fh.write(text)
    finally:
        if close:
            fh.close()


def _json(obj) -> str:
    return json.dumps(obj, indent=2, allow_nan=False) + "\n"


def read_csv_blocks(text: str) -> list[list[dict[str, str]]]:
    """Split CSV text on blank lines and parse each block with its own header."""
    blocks = [b for b in text.split("\n\n") if b.strip()]
    return [list(csv.DictReader(io.StringIO(b))) for b in blocks]


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------


def cmd_list_problems(args) -> int:
    if args.export:
        out = Path(args.export)
        out.mkdir(parents=True, exist_ok=True)
        for name, p in REGISTRY.items():
            (out / f"{name}.json").write_text(_json(dict(p.descriptor)))
    lines = [f"{name}\tn={p.n}\tm={p.m}" for name, p in REGISTRY.items()]
    _write(args.output, "\n".join(lines) + "\n")
    return EXIT_OK


def cmd_direction(args) -> int:
    problem = get_problem(args.problem)
    x = read_point(args.x, args.x_file)
    res = steepest_descent_direction(problem, x, args.tol)
    payload = {
        "problem": problem.name,
        "x": x.tolist(),
        **res.to_dict(),
        "critical": is_pareto_critical(res, args.eps),
    }
    _write(args.output, _json(payload))
    return EXIT_OK if res.converged else EXIT_NOT_CONVERGED


def cmd_descend(args) -> int:
    problem = get_problem(args.problem)
    x0 = read_point(args.x0, args.x0_file, "--x0")
    params = DescentParams(
        sigma=args.sigma,
        beta=args.beta,
        t0=args.t0,
        max_iters=args.max_iters,
        eps_crit=args.eps_crit,
        max_backtracks=args.max_backtracks,
    )
    trace = run_descent(problem, x0, params)
    _write(args.output, trace.to_csv())
    info = {"problem": problem.name, "status": trace.status, "iterations": max(len(trace.iterates) - 1, 0)}
    if trace.iterates:
        info["x_final"] = trace.final.x.tolist()
        info["lambda_norm"] = trace.final.lambda_norm
    print(json.dumps(info), file=sys.stderr)
    return EXIT_OK


def cmd_holder_probe(args) -> int:
    problem = get_problem(args.problem)
    if args.pairs == "counterexample":
        return _probe_counterexample_family(problem, args)
    region = parse_region(args.region, problem.n)
    scales = parse_floats(args.scales) if args.scales.strip() else []
    result = probe_region(problem, region, args.n_pairs, scales, seed=args.seed, tol=args.tol)
    if args.output:
        _write(args.output, samples_to_csv(result.samples, args.eta))
    summary = {"problem": problem.name, "region": region.to_dict(), **result.summary(args.eta)}
    _summary_out(args, summary)
    return EXIT_OK if result.passed else EXIT_BOUND_FAILED


def _probe_counterexample_family(problem, args) -> int:
    if problem.name != "paper-counterexample":
        raise InvalidInputError("--pairs counterexample needs --problem paper-counterexample")
    ts = np.geomspace(args.t_min, args.t_max, args.n_pairs)
    samples = [holder_sample(problem, *counterexample_pair(t), tol=args.tol, label=t) for t in ts]
    if args.output:
        _write(args.output, samples_to_csv(samples, args.eta))
    q_eta = [s.quotient(args.eta) for s in samples]
    summary = {
        "problem": problem.name,
        "pairs": "counterexample",
        "eta": args.eta,
        "t": ts.tolist(),
        "q_eta": q_eta,
        "max_q_half": max(s.quotient(0.5) for s in samples),
        "max_q_eta": max(q_eta),
        "seed": args.seed,
    }
    _summary_out(args, summary)
    return EXIT_OK


def _summary_out(args, summary) -> None:
    if args.summary:
        _write(args.summary, _json(summary))
    elif args.output == "-":
        sys.stderr.write(_json(summary))
    else:
        sys.stdout.write(_json(summary))


def cmd_counterexample(args) -> int:
    t_min, t_max, k = args.t_min, args.t_max, args.n_points
    if k < 1:
        raise InvalidInputError("n-points must be >= 1")
    if not (0 < t_min and t_max < math.pi / 2 and (t_min < t_max or (k == 1 and t_min <= t_max))):
        raise InvalidInputError("need 0 < t-min < t-max < pi/2")
    problem = REGISTRY["paper-counterexample"]
    ts = [t_min] if k == 1 else np.geomspace(t_min, t_max, k).tolist()
    samples = [holder_sample(problem, *counterexample_pair(t), tol=args.tol, label=t) for t in ts]

    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["t", "dist", "dlambda", "q_half"])
    for s in samples:
        w.writerow([repr(float(v)) for v in (s.label, s.dist, s.dlambda, s.quotient(0.5))])
    if len(samples) >= 2:
        fit = fit_exponent(samples)
        buf.write("\n")
        w.writerow(["fit_slope", "fit_intercept", "fit_r2"])
        w.writerow([repr(fit.slope), repr(fit.intercept), repr(fit.r_squared)])
    _write(args.output, buf.getvalue())
    return EXIT_OK


def cmd_gradcheck(args) -> int:
    problem = get_problem(args.problem)
    if args.x is not None or args.x_file is not None:
        points = [read_point(args.x, args.x_file)]
    else:
        region = parse_region(args.region, problem.n)
        points = list(region.sample(np.random.default_rng(args.seed), args.n_points))
    errors = [check_gradients(problem, x, args.h) for x in points]
    payload = {
        "problem": problem.name,
        "h": args.h,
        "points": len(points),
        "max_rel_error": max(errors),
        "seed": args.seed,
    }
    _write(args.output, _json(payload))
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mosd",
        description="Multiobjective steepest descent directions, descent runs and Hölder probes.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, problem=True):
        if problem:
            p.add_argument("--problem", required=True, help="registry name or JSON descriptor path")
        p.add_argument("--output", "-o", default=None, help="output file (default: stdout)")
        p.add_argument("--seed", type=int, default=42)

    p = sub.add_parser("list-problems", help="list registry problems")
    common(p, problem=False)
    p.add_argument("--export", metavar="DIR", help="write each problem's JSON descriptor into DIR")
    p.set_defaults(func=cmd_list_problems)

    p = sub.add_parser("direction", help="steepest descent direction at a point")
    common(p)
    p.add_argument("--x", help="point, comma-separated")
    p.add_argument("--x-file", help="file holding the point (overrides --x)")
    p.add_argument("--tol", type=float, default=DEFAULT_TOL)
    p.add_argument("--eps", type=float, default=CRITICAL_EPS, help="criticality threshold on |lambda|")
    p.set_defaults(func=cmd_direction)

    p = sub.add_parser("descend", help="run steepest descent, write the trace as CSV")
    common(p)
    p.add_argument("--x0", help="start point, comma-separated")
    p.add_argument("--x0-file", help="file holding the start point (overrides --x0)")
    d = DescentParams()
    p.add_argument("--sigma", type=float, default=d.sigma)
    p.add_argument("--beta", type=float, default=d.beta)
    p.add_argument("--t0", type=float, default=d.t0)
    p.add_argument("--max-iters", type=int, default=d.max_iters)
    p.add_argument("--eps-crit", type=float, default=d.eps_crit)
    p.add_argument("--max-backtracks", type=int, default=d.max_backtracks)
    p.set_defaults(func=cmd_descend)

    p = sub.add_parser("holder-probe", help="probe Hölder continuity of the direction map")
    common(p)
    p.add_argument("--region", help="ball:C:R, box:LO:HI or JSON file (default ball:0..0:2)")
    p.add_argument("--scales", default="1e-2,1e-4,1e-6")
    p.add_argument("--n-pairs", type=int, default=2000)
    p.add_argument("--eta", type=float, default=0.75, help="extra exponent for the q_eta column")
    p.add_argument("--tol", type=float, default=PROBE_TOL)
    p.add_argument("--pairs", choices=["random", "counterexample"], default="random")
    p.add_argument("--t-min", type=float, default=1e-6, help="counterexample pairs only")
    p.add_argument("--t-max", type=float, default=0.5, help="counterexample pairs only")
    p.add_argument("--summary", help="JSON summary file (default: stdout)")
    p.set_defaults(func=cmd_holder_probe)

    p = sub.add_parser("counterexample", help="tabulate the exponent-1/2 counterexample family")
    common(p, problem=False)
    p.add_argument("--t-min", type=float, default=1e-4)
    p.add_argument("--t-max", type=float, default=1.0)
    p.add_argument("--n-points", type=int, default=50)
    p.add_argument("--tol", type=float, default=PROBE_TOL)
    p.set_defaults(func=cmd_counterexample)

    p = sub.add_parser("gradcheck", help="compare analytic gradients with central differences")
    common(p)
    p.add_argument("--x", help="point, comma-separated (default: random points in --region)")
    p.add_argument("--x-file")
    p.add_argument("--h", type=float, default=1e-6)
    p.add_argument("--region")
    p.add_argument("--n-points", type=int, default=100)
    p.set_defaults(func=cmd_gradcheck)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except NotConvergedError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NOT_CONVERGED
    except (MosdError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
