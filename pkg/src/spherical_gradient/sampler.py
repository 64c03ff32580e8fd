"""Exact sampling by inverting the gradient map.

X = G^{-1}(U) with U uniform is found as the unique minimizer of
h(x) = c(x, u) + phi(x); its Riemannian gradient is -log_x(u) + grad phi(x),
so plain descent with an Armijo line search is enough.
"""

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .density import gradient_map
from .errors import AntipodalError, MaxIterations, SolverFailure
from .potential import _angles, as_potential, profile_eval
from .sphere import EPS_ANTIPODE, as_point, exp_map, geodesic_distance, log_map, project_tangent, uniform_sample

ARMIJO_C1 = 1e-4
SHRINK = 0.5
MIN_STEP = 1e-12
BB_RANGE = (1e-3, 1e3)


@dataclass
class SolveReport:
    solution: np.ndarray
    residual: float
    iterations: int
    converged: bool
    grad_norm: float = np.nan
    restarts: int = 0
    trace: list = field(default_factory=list, repr=False)


def _objective(spec, u, x):
    """h(x) = d(x,u)^2/2 + phi(x) and its Riemannian gradient."""
    c = float(x @ u)
    w = u - c * x
    s = float(np.sqrt(w @ w))
    d = float(np.arctan2(s, c))
    if d >= np.pi - EPS_ANTIPODE:
        raise AntipodalError("iterate reached the antipode of the target")
    grad = -(w * (d / s)) if s > 0 else np.zeros_like(x)
    h = 0.5 * d * d
    if len(spec):
        alpha, _, e, _ = _angles(spec, x)
        f, fp, _ = profile_eval(spec.ks, alpha)
        h += float(spec.weights @ f)
        grad = grad - (spec.weights * fp) @ e
    return h, grad


def _noise(h):
    return 16.0 * np.finfo(float).eps * (abs(h) + 1.0)


def _bb_step(x, x_new, g, g_new):
    """Barzilai-Borwein trial step s.s / s.y, tangent vectors compared at x_new."""
    s = project_tangent(x_new, x_new - x)
    y = g_new - project_tangent(x_new, g)
    sy = float(s @ y)
    if sy <= 0:
        return 1.0
    return float(np.clip(s @ s / sy, *BB_RANGE))


def inverse_gradient_map(spec, u, tol=1e-10, max_iter=10_000, tol_residual=1e-8,
                         record_trace=False, rng=None):
    """Solve G(x) = u by descent on c(x, u) + phi(x), starting at x = u.

    Steepest descent with monotone Armijo backtracking; the first trial
    step is 1, later ones the Barzilai-Borwein step.  A unit step alone
    crawls when the Hessian of h has an eigenvalue near 2, which happens
    for specs with sum |theta| close to 1.

    Returns a SolveReport; raises MaxIterations (carrying the report) when
    the iteration cap is hit.
    """
    spec = as_potential(spec)
    u = as_point(u)
    x = u.copy()
    restarts = 0
    trace = []
    gn = np.inf
    it = 0
    h = None
    trial = 1.0
    while it < max_iter:
        try:
            if h is None:
                h, g = _objective(spec, u, x)
        except AntipodalError:
            # leave the cut locus of u along a deterministic-or-seeded direction
            rng = rng if rng is not None else np.random.default_rng(restarts)
            x = exp_map(x, 1e-3 * project_tangent(x, rng.standard_normal(len(x))))
            restarts += 1
            h = None
            trial = 1.0
            continue
        if record_trace and (not trace or trace[-1] != h):
            trace.append(h)
        gn = float(np.linalg.norm(g))
        if gn <= tol:
            break
        it += 1
        step = trial
        accepted = False
        while step >= MIN_STEP:
            x_new = exp_map(x, -step * g)
            try:
                h_new, g_new = _objective(spec, u, x_new)
            except AntipodalError:
                step *= SHRINK
                continue
            if h_new <= h - ARMIJO_C1 * step * gn * gn:
                accepted = True
                break
            # below roundoff in h, fall back on the gradient norm
            if h_new <= h + _noise(h) and np.linalg.norm(g_new) < gn:
                accepted = True
                break
            step *= SHRINK
        if not accepted:
            break
        trial = _bb_step(x, x_new, g, g_new)
        x, h, g = x_new, h_new, g_new
    residual = float(geodesic_distance(gradient_map(spec, x), u))
    report = SolveReport(x, residual, it, bool(gn <= tol and residual <= tol_residual),
                         gn, restarts, trace)
    if it >= max_iter and gn > tol:
        raise MaxIterations(f"no convergence after {max_iter} iterations (|grad| = {gn:.3g})", report)
    return report


def sample(spec, rng, **solver_options):
    """One exact draw: uniform u, then x = G^{-1}(u)."""
    spec = as_potential(spec)
    u = uniform_sample(rng, spec.ambient)
    rep = inverse_gradient_map(spec, u, **solver_options)
    if not rep.converged:
        raise SolverFailure(
            f"solver stopped with |grad| = {rep.grad_norm:.3g}, residual = {rep.residual:.3g}"
        )
    return rep.solution


def index_stream(seed, index):
    """Independent generator for sample ``index`` under a global seed."""
    return np.random.default_rng([int(seed), int(index)])


def _draw(args):
    spec, seed, index, options = args
    try:
        return sample(spec, index_stream(seed, index), **options)
    except (SolverFailure, MaxIterations) as exc:
        raise SolverFailure(f"sample {index}: {exc}", index=index, cause=exc) from exc


def sample_batch(spec, N, seed, threads=1, **solver_options):
    """N independent samples as an (N, n+1) array; reproducible per (seed, index)."""
    spec = as_potential(spec)
    if N == 0:
        return np.zeros((0, spec.ambient))
    jobs = [(spec, seed, i, solver_options) for i in range(N)]
    if threads and threads > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            out = list(pool.map(_draw, jobs, chunksize=max(1, N // (4 * threads))))
    else:
        out = [_draw(j) for j in jobs]
    return np.array(out)
