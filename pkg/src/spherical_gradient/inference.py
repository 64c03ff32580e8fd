"""Maximum likelihood over the spherical gradient model and AIC selection.

The log-likelihood is concave in theta, so conditional-gradient ascent over
the l1-type parameter ball reaches the global maximum and its duality gap is
an optimality certificate.
"""

import hashlib
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from .density import log_density
from .errors import ConstraintViolation, EmptyData, MismatchedData
from .potential import PotentialSpec, QuadraticSpec, quadratic_to_components, trace_norm

FIT_DELTA = 1e-6
FD_STEP = 1e-6
_SLACK = 1e-12


@dataclass(frozen=True, eq=False)
class ModelSpec:
    """A parametrized family: fixed structure plus a free parameter vector.

    ``kind="components"`` fixes anchors and frequencies and frees the
    weights; ``kind="quadratic"`` frees (mu, A), packed as mu followed by
    the upper triangle of A (row-major).
    """

    kind: str
    ambient: int = 3
    anchors: np.ndarray = None
    ks: np.ndarray = None
    delta: float = FIT_DELTA

    def __post_init__(self):
        if self.kind not in ("components", "quadratic"):
            raise ValueError(f"unknown model kind {self.kind!r}")
        if self.kind == "components":
            anchors = np.zeros((0, self.ambient)) if self.anchors is None else np.asarray(self.anchors, float)
            anchors = anchors.reshape(-1, self.ambient)
            ks = np.zeros(0, int) if self.ks is None else np.asarray(self.ks, int).reshape(-1)
            if len(ks) != len(anchors):
                raise ValueError("need one frequency per anchor")
            if len(anchors):
                anchors = anchors / np.linalg.norm(anchors, axis=1, keepdims=True)
            object.__setattr__(self, "anchors", anchors)
            object.__setattr__(self, "ks", ks)

    @classmethod
    def components(cls, anchors, ks, delta=FIT_DELTA):
        anchors = np.atleast_2d(np.asarray(anchors, dtype=float))
        return cls("components", anchors.shape[1], anchors, ks, delta)

    @classmethod
    def null(cls, ambient=3):
        return cls("components", ambient, None, None, 0.0)

    @classmethod
    def quadratic(cls, ambient=3, delta=FIT_DELTA):
        return cls("quadratic", ambient, delta=delta)

    @classmethod
    def from_spec(cls, spec, delta=None):
        """Model family with the structure of a parsed model-spec file."""
        if isinstance(spec, QuadraticSpec):
            return cls.quadratic(spec.ambient, FIT_DELTA if delta is None else delta)
        if len(spec) == 0:
            return cls.null(spec.ambient)
        return cls("components", spec.ambient, spec.anchors, spec.ks, FIT_DELTA if delta is None else delta)

    @property
    def radius(self):
        return 1.0 - self.delta

    @property
    def n_params(self):
        if self.kind == "components":
            return len(self.ks)
        d = self.ambient
        return d + d * (d + 1) // 2

    @property
    def dim(self):
        """Free-parameter count for AIC; A -> A + cI is a gauge direction."""
        if self.kind == "components":
            return len(self.ks)
        return self.n_params - 1

    def unpack(self, theta):
        d = self.ambient
        theta = np.asarray(theta, dtype=float)
        mu = theta[:d]
        A = np.zeros((d, d))
        iu = np.triu_indices(d)
        A[iu] = theta[d:]
        A = A + np.triu(A, 1).T
        return mu, A

    def pack(self, mu, A):
        return np.concatenate([np.asarray(mu, float), np.asarray(A, float)[np.triu_indices(self.ambient)]])

    def norm(self, theta):
        if self.kind == "components":
            return float(np.sum(np.abs(theta)))
        mu, A = self.unpack(theta)
        return float(np.linalg.norm(mu) + trace_norm(A))

    def check(self, theta):
        if len(theta) != self.n_params:
            raise ValueError(f"expected {self.n_params} parameters, got {len(theta)}")
        if self.norm(theta) > self.radius + _SLACK:
            raise ConstraintViolation(
                f"parameter norm {self.norm(theta):.6g} exceeds the constraint radius {self.radius:.6g}"
            )

    def instantiate(self, theta):
        theta = np.asarray(theta, dtype=float)
        if self.kind == "components":
            if len(self.ks) == 0:
                return PotentialSpec.empty(self.ambient)
            return PotentialSpec(self.anchors, self.ks, theta, ambient=self.ambient)
        mu, A = self.unpack(theta)
        return quadratic_to_components(QuadraticSpec(mu, A, 0.0))

    def lmo(self, grad):
        """Maximizer of <grad, s> over the constraint ball (an extreme point)."""
        r = self.radius
        s = np.zeros(self.n_params)
        if self.kind == "components":
            if len(grad):
                i = int(np.argmax(np.abs(grad)))
                s[i] = r * np.sign(grad[i]) if grad[i] != 0 else 0.0
            return s
        d = self.ambient
        g_mu, G = self.unpack(grad)
        # off-diagonal packed derivatives move A_ij and A_ji together
        G = G - 0.5 * (np.triu(G, 1) + np.triu(G, 1).T)
        lam, U = np.linalg.eigh(G)
        best_mu = r * np.linalg.norm(g_mu)
        j = int(np.argmax(np.abs(lam)))
        best_A = r * abs(lam[j])
        if best_mu >= best_A:
            nm = np.linalg.norm(g_mu)
            return self.pack(r * g_mu / nm if nm > 0 else np.zeros(d), np.zeros((d, d)))
        u = U[:, j]
        return self.pack(np.zeros(d), r * np.sign(lam[j]) * np.outer(u, u))

    def away_atom(self, grad, theta):
        """Worst active vertex of the l1 ball and its barycentric weight.

        theta is written as sum_i |theta_i|/r on sign(theta_i) r e_i plus the
        slack 1 - |theta|_1/r spread evenly over all 2p vertices.  Used by the
        pairwise step of the components kind only.
        """
        r = self.radius
        p = len(theta)
        slack = 1.0 - float(np.sum(np.abs(theta))) / r
        if slack < _SLACK:
            # on the boundary up to roundoff
            slack = 0.0
        best = None
        for i in range(p):
            for sgn in (1.0, -1.0):
                w = slack / (2 * p) + (abs(theta[i]) / r if theta[i] * sgn > 0 else 0.0)
                if w <= 0:
                    continue
                val = sgn * r * grad[i]
                if best is None or val < best[0]:
                    best = (val, i, sgn, w)
        a = np.zeros(p)
        _, i, sgn, w = best
        a[i] = sgn * r
        return a, w

    def describe(self):
        if self.kind == "quadratic":
            return {"type": "quadratic", "ambient": self.ambient, "delta": self.delta}
        return {
            "type": "components", "ambient": self.ambient, "delta": self.delta,
            "components": [{"z": z.tolist(), "k": int(k)} for z, k in zip(self.anchors, self.ks)],
        }

    def theta_to_json(self, theta):
        if self.kind == "quadratic":
            mu, A = self.unpack(theta)
            return {"mu": mu.tolist(), "A": A.tolist()}
        return [float(t) for t in theta]


def _as_data(data):
    X = np.atleast_2d(np.asarray(data, dtype=float))
    if X.size == 0:
        raise EmptyData("no data points")
    return X / np.linalg.norm(X, axis=1, keepdims=True)


def data_fingerprint(data):
    """Order-independent hash of the data set (coordinates rounded to 1e-12)."""
    X = np.round(_as_data(data), 12) + 0.0
    X = X[np.lexsort(X.T[::-1])]
    return hashlib.sha256(np.ascontiguousarray(X).tobytes()).hexdigest()[:16]


def log_likelihood(model, theta, data, check=True):
    """sum_k log p(x_k | theta); numpy's pairwise summation keeps it stable."""
    X = _as_data(data)
    theta = np.asarray(theta, dtype=float)
    if check:
        model.check(theta)
    if model.n_params == 0:
        return 0.0
    return float(np.sum(log_density(model.instantiate(theta), X)))


def fd_gradient(fun, theta, step=FD_STEP):
    g = np.empty(len(theta))
    for i in range(len(theta)):
        e = np.zeros(len(theta))
        e[i] = step
        g[i] = (fun(theta + e) - fun(theta - e)) / (2.0 * step)
    return g


def aic(loglik, dim):
    return -2.0 * loglik + 2.0 * dim


@dataclass
class FitResult:
    model: ModelSpec
    theta_hat: np.ndarray
    loglik: float
    aic: float
    iterations: int
    converged: bool
    gap: float
    trace: list = field(default_factory=list, repr=False)
    fingerprint: str = ""
    n_data: int = 0
    label: str = ""

    @property
    def dim(self):
        return self.model.dim

    def report(self):
        return {
            "model": self.model.describe(),
            "theta_hat": self.model.theta_to_json(self.theta_hat),
            "loglik": self.loglik,
            "aic": self.aic,
            "dim": self.dim,
            "converged": self.converged,
            "iterations": self.iterations,
            "duality_gap": self.gap,
            "n_data": self.n_data,
            "data_fingerprint": self.fingerprint,
        }


def _interior_start(model, theta):
    """Point for central differences: theta itself unless a +-FD_STEP
    coordinate move could leave the admissible ball (norm <= 1).

    One move changes the l1 norm by at most FD_STEP; for the quadratic kind
    an off-diagonal entry moves A_ij and A_ji together, so up to twice that.
    Shifting theta biases the gradient where the likelihood is stiff, which
    is why the margin is not larger.
    """
    reach = FD_STEP if model.kind == "components" else 2 * FD_STEP
    nrm = model.norm(theta)
    limit = 1.0 - reach
    return theta if nrm <= limit else theta * (limit / nrm)


def _line_search(ll, theta, direction, slope0, step=FD_STEP):
    """Maximizer over [0, 1] of the concave gamma -> ll(theta + gamma direction).

    Root of the central-difference directional derivative; its accuracy is
    limited by roundoff in ll, not by a bracketing tolerance.
    """
    span = np.linalg.norm(direction)
    h = step / span if span > 0 else step

    def slope(gamma):
        return (ll(theta + (gamma + h) * direction) - ll(theta + (gamma - h) * direction)) / (2 * h)

    hi = 1.0 - h
    if slope(hi) >= 0:
        return 1.0
    if slope0 <= 0:
        return 0.0
    return brentq(slope, 0.0, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps)


def fd_hessian(fun, theta, step=1e-4):
    n = len(theta)
    H = np.empty((n, n))
    for j in range(n):
        e = np.zeros(n)
        e[j] = step
        H[:, j] = (fd_gradient(fun, theta + e) - fd_gradient(fun, theta - e)) / (2.0 * step)
    return 0.5 * (H + H.T)


def _max_feasible_step(model, theta, direction):
    if model.norm(theta + direction) <= model.radius:
        return 1.0
    lo, hi = 0.0, 1.0
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        if model.norm(theta + mid * direction) <= model.radius:
            lo = mid
        else:
            hi = mid
    return lo


def _newton_step(model, ll, theta):
    """Damped Newton ascent step kept inside the ball; None if unusable."""
    margin = 4 * FD_STEP * max(1, model.n_params) + 2e-4
    if model.norm(theta) > model.radius - margin:
        return None
    g = fd_gradient(ll, theta)
    H = fd_hessian(ll, theta)
    # pinv drops flat (gauge) directions
    d = -np.linalg.pinv(H, rcond=1e-10) @ g
    slope0 = float(g @ d)
    if not np.all(np.isfinite(d)) or slope0 <= 0:
        return None
    direction = _max_feasible_step(model, theta, d) * d
    gamma = _line_search(ll, theta, direction, slope0)
    new_theta = theta + gamma * direction
    return new_theta, ll(new_theta)


def mle_fit(model, data, tol=1e-8, max_iter=500, theta0=None):
    """Frank-Wolfe ascent with exact line search on the concave log-likelihood.

    Component models take pairwise steps (weight moves from the worst active
    vertex of the l1 ball to the oracle's vertex), which converge linearly
    on that polytope.  Stops when the duality gap max_s <grad, s - theta>
    drops to ``tol``.
    Once a Frank-Wolfe step gains less than ``tol`` at an interior point,
    a Newton step is tried; every accepted step is an ascent step.
    """
    X = _as_data(data)
    fp = data_fingerprint(X)
    if model.n_params == 0:
        return FitResult(model, np.zeros(0), 0.0, aic(0.0, 0), 0, True, 0.0, [0.0], fp, len(X))

    def ll(theta):
        return log_likelihood(model, theta, X, check=False)

    theta = np.zeros(model.n_params) if theta0 is None else np.asarray(theta0, dtype=float)
    model.check(theta)
    value = ll(theta)
    trace = [value]
    gap = np.inf
    it = 0
    converged = False
    while it < max_iter:
        grad = fd_gradient(ll, _interior_start(model, theta))
        s = model.lmo(grad)
        direction = s - theta
        gap = float(grad @ direction)
        if gap <= tol:
            converged = True
            break
        it += 1

        slope = gap
        if model.kind == "components":
            # pairwise step: shift weight from the worst active vertex to s;
            # plain steps zigzag when the optimum lies on a face of the ball
            a, w = model.away_atom(grad, theta)
            pair = w * (s - a)
            if grad @ pair > 0:
                direction, slope = pair, float(grad @ pair)
        gamma = _line_search(ll, theta, direction, slope)
        new = ll(theta + gamma * direction)
        if new < value:
            converged = gap <= 10 * tol
            break
        theta = theta + gamma * direction
        increase, value = new - value, new
        trace.append(value)
        if increase <= tol:
            # Frank-Wolfe zigzags near an interior optimum; finish with a Newton step
            step = _newton_step(model, ll, theta)
            if step is not None and step[1] >= value:
                theta, value = step
                trace.append(value)
            elif increase == 0.0:
                converged = gap <= 10 * tol
                break
    return FitResult(model, theta, value, aic(value, model.dim), it, converged, gap, trace, fp, len(X))


def compare_models(fits):
    """Fits sorted by ascending AIC; ties go to the smaller dimension, then input order."""
    fits = list(fits)
    prints = {f.fingerprint for f in fits if f.fingerprint}
    if len(prints) > 1:
        raise MismatchedData("fit reports were computed on different data sets")
    order = sorted(range(len(fits)), key=lambda i: (fits[i].aic, fits[i].dim, i))
    return [fits[i] for i in order]
