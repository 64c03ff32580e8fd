"""Numerical witnesses for the geometric inequalities behind the model.

Each ``check_*`` function returns a report dataclass carrying the measured
margins and a ``passed`` flag; nothing here mutates its inputs.
"""

from dataclasses import asdict, dataclass, field

import numpy as np

from .density import _assemble, gradient_map, jacobian_parts, log_density
from .errors import DimensionError
from .potential import _angles, as_potential, blend, profile_eval, potential_value, random_spec
from .sphere import (
    as_point, c_segment, cost, exp_map, fibonacci_sphere, geodesic_distance, sinc, tangent_basis,
    uniform_sample,
)

INEQ_SLACK = 1e-9
CONCAVITY_SLACK = 1e-8
SLIDING_SLACK = 1e-8

# Sup-norm deviation of the discrete double c-transform per unit mesh spacing,
# measured on the extreme (sum |theta| = 1) single-component profiles, k <= 5
# (0.307 at 4000 nodes), rounded up.
# See calibrate_mesh_constant.
MESH_CONSTANT = 0.32


# -- finite-difference oracle ---------------------------------------------

def fd_jacobian(f, x, h=1e-5):
    """n x n Jacobian of a sphere map in orthonormal tangent frames at x and f(x)."""
    x = as_point(x)
    Bx = tangent_basis(x)
    y = f(x)
    By = tangent_basis(y)
    cols = []
    for b in Bx:
        dp = f(exp_map(x, h * b))
        dm = f(exp_map(x, -h * b))
        cols.append(By @ (dp - dm) / (2.0 * h))
    return np.array(cols).T


def fd_jacobian_determinant(spec, x, h=1e-5):
    """|det| of the finite-difference Jacobian of the gradient map."""
    return abs(np.linalg.det(fd_jacobian(lambda p: gradient_map(spec, p), x, h)))


def fd_tangent_gradient(f, x, h=1e-5):
    """Central-difference Riemannian gradient of a scalar function, ambient coordinates."""
    x = as_point(x)
    B = tangent_basis(x)
    g = np.array([(f(exp_map(x, h * b)) - f(exp_map(x, -h * b))) / (2.0 * h) for b in B])
    return g @ B


# -- c-transforms on a mesh -----------------------------------------------

@dataclass
class GridFunction:
    grid: np.ndarray
    values: np.ndarray

    @property
    def spacing(self):
        return mesh_spacing(len(self.grid))


def mesh_spacing(n_nodes):
    """Nominal spacing sqrt(4 pi / N) of an N-node quasi-uniform S^2 mesh."""
    return float(np.sqrt(4.0 * np.pi / n_nodes))


def _c_transform_values(grid, values, chunk=1024):
    out = np.empty(len(grid))
    for start in range(0, len(grid), chunk):
        y = grid[start:start + chunk]
        dots = np.clip(y @ grid.T, -1.0, 1.0)
        c = 0.5 * np.arccos(dots) ** 2
        out[start:start + chunk] = np.max(-c - values[None, :], axis=1)
    return out


def c_transform_grid(f):
    """Brute-force c-transform: phi^c(y) = max_x { -c(x, y) - phi(x) }."""
    return GridFunction(f.grid, _c_transform_values(f.grid, np.asarray(f.values, dtype=float)))


def double_c_transform_deviation(values, grid):
    once = _c_transform_values(grid, values)
    twice = _c_transform_values(grid, once)
    return float(np.max(np.abs(twice - values)))


@dataclass
class CConvexityReport:
    deviation: float
    spacing: float
    threshold: float
    n_nodes: int
    passed: bool


def check_c_convexity(spec, resolution=4000, mesh_constant=MESH_CONSTANT):
    """sup |phi^cc - phi| on a Fibonacci mesh against 3 * C * h."""
    spec = as_potential(spec)
    if spec.ambient != 3:
        raise DimensionError("c-convexity mesh checks run on S^2 only")
    grid = fibonacci_sphere(resolution)
    values = potential_value(spec, grid) if len(spec) else np.zeros(len(grid))
    dev = double_c_transform_deviation(np.asarray(values, dtype=float), grid)
    h = mesh_spacing(resolution)
    thr = 3.0 * mesh_constant * h
    return CConvexityReport(dev, h, thr, resolution, dev <= thr)


def refinement_ratio(spec, coarse=4000, fine=8000):
    """deviation(fine) / deviation(coarse); 0/0 counts as 0."""
    a = check_c_convexity(spec, coarse).deviation
    b = check_c_convexity(spec, fine).deviation
    if a == 0.0:
        return 0.0 if b == 0.0 else np.inf
    return b / a


def calibrate_mesh_constant(resolution=4000, max_k=5):
    """max deviation / h over the extreme single-component profiles.

    A sum of |theta| = 1 pushes the density to zero somewhere, which is
    where the discrete transform loses the most; admissible specs stay below.
    """
    grid = fibonacci_sphere(resolution)
    h = mesh_spacing(resolution)
    z = as_point([0.3, -0.5, 0.8])
    from .potential import PotentialSpec

    worst = 0.0
    for k in range(1, max_k + 1):
        for sign in (1.0, -1.0):
            spec = PotentialSpec([z], [k], [sign])
            dev = double_c_transform_deviation(potential_value(spec, grid), grid)
            worst = max(worst, dev / h)
    return worst


# -- Jacobian inequality ---------------------------------------------------

@dataclass
class JacobianInequalityReport:
    min_margin: float
    max_second_difference: float
    min_ratio_margin: float
    log_j: list = field(repr=False)
    passed: bool = True


def check_jacobian_inequality(spec0, spec1, x, t_grid=None):
    """Scan log J_t along the blend (1-t) phi_0 + t phi_1 at a fixed x.

    Reports min_t [log J_t - (1-t) log J_0 - t log J_1] (should be >= 0),
    the largest second difference of log J_t (should be <= 0) and the
    margin of the ratio form (J_t/sigma_t)^(1/n) >= convex combination.
    """
    spec0, spec1 = as_potential(spec0), as_potential(spec1)
    t = np.linspace(0.0, 1.0, 21) if t_grid is None else np.asarray(t_grid, dtype=float)
    x = as_point(x)
    n = len(x) - 1
    log_j = np.empty(len(t))
    ratio = np.empty(len(t))
    for i, ti in enumerate(t):
        spec = blend(spec0, spec1, ti)
        _, _, sigma, M = _assemble(spec, x)
        sign, logdet = np.linalg.slogdet(M)
        log_j[i] = log_density(spec, x)
        ratio[i] = np.exp(logdet / n) if sign > 0 else -np.inf
    lj0 = log_density(spec0, x)
    lj1 = log_density(spec1, x)
    margin = log_j - ((1 - t) * lj0 + t * lj1)
    r0 = np.exp(np.linalg.slogdet(_assemble(spec0, x)[3])[1] / n)
    r1 = np.exp(np.linalg.slogdet(_assemble(spec1, x)[3])[1] / n)
    ratio_margin = ratio - ((1 - t) * r0 + t * r1)
    if len(t) >= 3:
        d2 = log_j[:-2] - 2 * log_j[1:-1] + log_j[2:]
        max_d2 = float(np.max(d2))
    else:
        max_d2 = 0.0
    rep = JacobianInequalityReport(
        float(np.min(margin)), max_d2, float(np.min(ratio_margin)), log_j.tolist()
    )
    rep.passed = rep.min_margin >= -INEQ_SLACK and rep.max_second_difference <= CONCAVITY_SLACK \
        and rep.min_ratio_margin >= -INEQ_SLACK
    return rep


# -- sliding mountain ------------------------------------------------------

@dataclass
class SlidingMountainReport:
    min_second_difference: float
    values: list = field(repr=False)
    passed: bool = True


def sliding_mountain(x, z, y0, y1, t):
    y = c_segment(y0, y1, z, t)
    return cost(z, y) - cost(x, y)


def check_sliding_mountain(x, z, y0, y1, t_grid=None):
    """Second differences of t -> c(z, y_t) - c(x, y_t) along a c-segment."""
    t = np.linspace(0.0, 1.0, 21) if t_grid is None else np.asarray(t_grid, dtype=float)
    vals = np.array([sliding_mountain(x, z, y0, y1, ti) for ti in t])
    d2 = vals[:-2] - 2 * vals[1:-1] + vals[2:] if len(t) >= 3 else np.zeros(1)
    m = float(np.min(d2))
    return SlidingMountainReport(m, vals.tolist(), m >= -SLIDING_SLACK)


# -- factored Jacobian -----------------------------------------------------

@dataclass
class FactoredJacobianReport:
    density: float
    factored: float
    relative_mismatch: float
    sigma: float
    passed: bool


def exp_jacobian_factor(v, n):
    """Jacobian determinant of exp_x at v: (sin|v|/|v|)^(n-1)."""
    return float(sinc(np.linalg.norm(v)) ** (n - 1))


def factored_jacobian(spec, x):
    """sigma * det(H + Hess phi) in an n-dimensional tangent frame at x.

    Built independently of the ambient formula: H is the Hessian of
    c(., y) at y = G(x) and Hess phi is summed per component, both
    projected on tangent_basis(x).
    """
    spec = as_potential(spec)
    x = as_point(x)
    n = len(x) - 1
    B = tangent_basis(x)
    hess_phi = np.zeros((n, n))
    v = np.zeros(len(x))
    if len(spec):
        alpha, s, e, regular = _angles(spec, x)
        _, fp, fpp = profile_eval(spec.ks, alpha)
        for i in range(len(spec)):
            v -= spec.weights[i] * fp[i] * e[i]
            if regular[i]:
                ei = B @ e[i]
                coef = fp[i] * np.cos(alpha[i]) / s[i]
                Ki = fpp[i] * np.outer(ei, ei) + coef * (np.eye(n) - np.outer(ei, ei))
            else:
                Ki = fpp[i] * np.eye(n)
            hess_phi += spec.weights[i] * Ki
    a = np.linalg.norm(v)
    if a > 0:
        ev = B @ (v / a)
        H = np.outer(ev, ev) + a / np.tan(a) * (np.eye(n) - np.outer(ev, ev))
    else:
        H = np.eye(n)
    sigma = exp_jacobian_factor(v, n)
    return sigma, float(np.linalg.det(H + hess_phi))


def check_factored_jacobian(spec, x, rtol=1e-10):
    sigma, det = factored_jacobian(spec, x)
    parts = jacobian_parts(spec, x)
    p = parts.density
    f = sigma * det
    mismatch = abs(f - p) / abs(p)
    return FactoredJacobianReport(p, f, mismatch, sigma, mismatch <= rtol)


def log_sigma_along_blend(spec0, spec1, x, t_grid=None):
    spec0, spec1 = as_potential(spec0), as_potential(spec1)
    t = np.linspace(0.0, 1.0, 21) if t_grid is None else np.asarray(t_grid, dtype=float)
    x = as_point(x)
    n = len(x) - 1
    out = []
    for ti in t:
        v, _, _, _ = _assemble(blend(spec0, spec1, ti), x)
        out.append(np.log(exp_jacobian_factor(v, n)) if n > 1 else 0.0)
    return np.array(out)


def two_monotonicity_gap(spec, x, z):
    """c(x,Gx) + c(z,Gz) - c(x,Gz) - c(z,Gx); nonpositive for gradient maps."""
    gx = gradient_map(spec, x)
    gz = gradient_map(spec, z)
    return float(cost(x, gx) + cost(z, gz) - cost(x, gz) - cost(z, gx))


# -- suites ---------------------------------------------------------------

def _random_quadruple(rng, margin=1e-3):
    while True:
        x, z, y0, y1 = uniform_sample(rng, 3, size=4)
        if geodesic_distance(y0, z) < np.pi - margin and geodesic_distance(y1, z) < np.pi - margin:
            return x, z, y0, y1


def run_suite(suite, specs, seed=0, n_points=200, resolution=4000):
    """Run a named check suite and return a JSON-serializable report.

    ``specs`` is a list of one or two potentials; the Jacobian scan pairs
    the first with the second (or with the zero potential).
    """
    suites = ["c-convexity", "jacobian", "sliding-mountain"] if suite == "all" else [suite]
    unknown = set(suites) - {"c-convexity", "jacobian", "sliding-mountain"}
    if unknown:
        raise ValueError(f"unknown suite {sorted(unknown)}")
    specs = [as_potential(s) for s in specs]
    rng = np.random.default_rng(seed)
    report = {"seed": seed, "checks": []}

    if "c-convexity" in suites:
        cands = list(specs)
        if len(specs) == 2:
            cands.append(blend(specs[0], specs[1], 0.5))
        for i, s in enumerate(cands):
            rep = check_c_convexity(s, resolution)
            report["checks"].append({"name": "c-convexity", "spec_index": i, **asdict(rep)})

    if "jacobian" in suites:
        s0 = specs[0]
        s1 = specs[1] if len(specs) > 1 else type(s0).empty(s0.ambient)
        worst = None
        failures = []
        for _ in range(n_points):
            x = uniform_sample(rng, s0.ambient)
            rep = check_jacobian_inequality(s0, s1, x)
            fac = check_factored_jacobian(s0, x)
            ok = rep.passed and fac.passed
            if not ok:
                failures.append({"x": x.tolist(), "margin": rep.min_margin,
                                 "second_difference": rep.max_second_difference,
                                 "ratio_margin": rep.min_ratio_margin,
                                 "factored_mismatch": fac.relative_mismatch})
            if worst is None or rep.min_margin < worst:
                worst = rep.min_margin
        report["checks"].append({
            "name": "jacobian", "n_points": n_points, "min_margin": worst,
            "failures": failures, "passed": not failures,
        })

    if "sliding-mountain" in suites:
        failures = []
        worst = np.inf
        for _ in range(n_points):
            x, z, y0, y1 = _random_quadruple(rng)
            rep = check_sliding_mountain(x, z, y0, y1)
            worst = min(worst, rep.min_second_difference)
            if not rep.passed:
                failures.append({"x": x.tolist(), "z": z.tolist(), "y0": y0.tolist(), "y1": y1.tolist(),
                                 "min_second_difference": rep.min_second_difference})
        report["checks"].append({
            "name": "sliding-mountain", "n_points": n_points,
            "min_second_difference": float(worst), "failures": failures, "passed": not failures,
        })

    report["passed"] = all(c["passed"] for c in report["checks"])
    return report


__all__ = [
    "GridFunction", "c_transform_grid", "check_c_convexity", "check_jacobian_inequality",
    "check_sliding_mountain", "check_factored_jacobian", "fd_jacobian_determinant",
    "fd_tangent_gradient", "random_spec", "run_suite", "two_monotonicity_gap",
]
