"""Command line: fit, sample, density-grid, check and aic.

Exit codes: 0 success, 2 input error, 3 fit did not converge,
4 sampler failure, 5 a checked inequality was violated.
"""

import argparse
import os
import sys
from types import SimpleNamespace

from .density import density_grid
from .errors import (
    DimensionError, EmptyData, InadmissibleSpec, MaxIterations, MismatchedData, SolverFailure,
)
from .inference import ModelSpec, compare_models, mle_fit
from .io import InputError, read_json, read_model, read_points, write_json, write_points
from .potential import QuadraticSpec, quadratic_to_components, validate_spec
from .sampler import sample_batch
from .verify import run_suite

EXIT_OK, EXIT_INPUT, EXIT_NOT_CONVERGED, EXIT_SOLVER, EXIT_CHECK = 0, 2, 3, 4, 5


def _validated(spec):
    """Components form of a model file, after the admissibility check."""
    if isinstance(spec, QuadraticSpec):
        return quadratic_to_components(spec)
    validate_spec(spec)
    return spec


def _out(path):
    return sys.stdout if path in (None, "-") else path


def cmd_fit(args):
    points, _ = read_points(args.data)
    spec = read_model(args.model)
    model = ModelSpec.from_spec(spec, delta=args.delta)
    if model.ambient != points.shape[1]:
        raise DimensionError("model and data live on different spheres")
    fit = mle_fit(model, points, tol=args.tol, max_iter=args.max_iter)
    write_json(fit.report(), _out(args.output))
    print(f"loglik={fit.loglik:.6f} aic={fit.aic:.6f} dim={fit.dim} "
          f"iterations={fit.iterations} converged={fit.converged}", file=sys.stderr)
    return EXIT_OK if fit.converged else EXIT_NOT_CONVERGED


def cmd_sample(args):
    spec = _validated(read_model(args.model))
    if args.n < 0:
        raise InputError("sample count must be nonnegative")
    pts = sample_batch(spec, args.n, args.seed, threads=args.threads, tol=args.tol, max_iter=args.max_iter)
    write_points(pts, _out(args.output), fmt=args.format)
    return EXIT_OK


def cmd_density_grid(args):
    spec = _validated(read_model(args.model))
    grid = density_grid(spec, args.resolution)
    grid.to_csv(_out(args.output))
    return EXIT_OK


def cmd_check(args):
    specs = [_validated(read_model(p)) for p in args.models]
    if len(specs) > 2:
        raise InputError("check takes one or two model files")
    report = run_suite(args.suite, specs, seed=args.seed, n_points=args.points, resolution=args.resolution)
    write_json(report, _out(args.output))
    for c in report["checks"]:
        print(f"{c['name']}: {'pass' if c['passed'] else 'FAIL'}", file=sys.stderr)
    return EXIT_OK if report["passed"] else EXIT_CHECK


def cmd_aic(args):
    fits = []
    for path in args.reports:
        d = read_json(path)
        try:
            fits.append(SimpleNamespace(label=path, aic=float(d["aic"]), dim=int(d["dim"]),
                                        loglik=float(d["loglik"]), fingerprint=d.get("data_fingerprint", "")))
        except (KeyError, TypeError, ValueError):
            raise InputError(f"{path}: not a fit report") from None
    ranked = compare_models(fits)
    rows = [{"rank": i + 1, "report": f.label, "aic": f.aic, "loglik": f.loglik, "dim": f.dim}
            for i, f in enumerate(ranked)]
    width = max(len(r["report"]) for r in rows)
    print(f"{'rank':>4}  {'report':<{width}}  {'aic':>12}  {'loglik':>12}  {'dim':>3}")
    for r in rows:
        print(f"{r['rank']:>4}  {r['report']:<{width}}  {r['aic']:>12.4f}  {r['loglik']:>12.4f}  {r['dim']:>3}")
    if args.output:
        write_json({"ranking": rows}, args.output)
    return EXIT_OK


def build_parser():
    p = argparse.ArgumentParser(prog="spherical-gradient", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    f = sub.add_parser("fit", help="maximum-likelihood fit of a model family to data")
    f.add_argument("data", help="CSV with header x,y,z or lon_deg,lat_deg")
    f.add_argument("model", help="model-spec JSON; weights are ignored, the structure is fitted")
    f.add_argument("-o", "--output", help="fit report JSON (default stdout)")
    f.add_argument("--tol", type=float, default=1e-8)
    f.add_argument("--delta", type=float, default=1e-6)
    f.add_argument("--max-iter", type=int, default=500)
    f.set_defaults(func=cmd_fit)

    s = sub.add_parser("sample", help="exact samples from a model")
    s.add_argument("model")
    s.add_argument("-n", type=int, required=True)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("-o", "--output")
    s.add_argument("--format", choices=["xyz", "lonlat"], default="xyz")
    s.add_argument("--threads", type=int, default=os.cpu_count() or 1)
    s.add_argument("--tol", type=float, default=1e-10)
    s.add_argument("--max-iter", type=int, default=10_000)
    s.set_defaults(func=cmd_sample)

    g = sub.add_parser("density-grid", help="density on a lon/lat grid (S^2 only)")
    g.add_argument("model")
    g.add_argument("--resolution", type=int, default=90, help="latitude intervals; longitude uses twice as many")
    g.add_argument("-o", "--output")
    g.set_defaults(func=cmd_density_grid)

    c = sub.add_parser("check", help="numerical checks of c-convexity and the Jacobian inequality")
    c.add_argument("models", nargs="+")
    c.add_argument("--suite", choices=["c-convexity", "jacobian", "sliding-mountain", "all"], default="all")
    c.add_argument("--seed", type=int, default=0)
    c.add_argument("--points", type=int, default=200, help="random points per scan")
    c.add_argument("--resolution", type=int, default=4000, help="mesh nodes for c-transforms")
    c.add_argument("-o", "--output")
    c.set_defaults(func=cmd_check)

    a = sub.add_parser("aic", help="rank fit reports by AIC")
    a.add_argument("reports", nargs="+")
    a.add_argument("-o", "--output")
    a.set_defaults(func=cmd_aic)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except SolverFailure as exc:
        print(f"error: solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except MaxIterations as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except EmptyData as exc:
        print(f"error: EmptyData: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (InputError, InadmissibleSpec, DimensionError, MismatchedData, FileNotFoundError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
