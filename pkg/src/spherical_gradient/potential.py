"""Rotationally symmetric potentials built from cosine profiles.

A potential is phi(x) = sum_i theta_i f_i(d(x, z_i)) with
f_i(r) = cos(k_i r) / k_i^2.  k = 1 gives the linear potential x.z and
k = 2 the quadratic building block.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionError, InadmissibleSpec
from .sphere import as_point

EPS_SIN = 1e-7
_ADMISSIBILITY_SLACK = 1e-12


@dataclass(frozen=True)
class CosineProfile:
    k: int = 1

    def __post_init__(self):
        if int(self.k) != self.k or self.k < 1:
            raise ValueError(f"profile frequency must be a positive integer, got {self.k}")

    def __call__(self, xi):
        return profile_eval(self.k, xi)


def profile_eval(k, xi):
    """Return (f, f', f'') of cos(k xi)/k^2 at xi."""
    k = np.asarray(getattr(k, "k", k), dtype=float)
    kx = k * np.asarray(xi, dtype=float)
    return np.cos(kx) / k**2, -np.sin(kx) / k, -np.cos(kx)


@dataclass(frozen=True)
class PotentialComponent:
    anchor: np.ndarray
    k: int
    weight: float

    @property
    def profile(self):
        return CosineProfile(self.k)


@dataclass(frozen=True, eq=False)
class PotentialSpec:
    """Weighted sum of cosine-profile components.

    Stored column-wise: ``anchors`` is (p, n+1), ``ks`` and ``weights`` are
    length p.  ``ambient`` is n+1 and is needed for the empty potential.
    """

    anchors: np.ndarray
    ks: np.ndarray
    weights: np.ndarray
    delta: float = 0.0
    ambient: int = field(default=None)

    def __post_init__(self):
        ks = np.asarray(self.ks, dtype=int).reshape(-1)
        weights = np.asarray(self.weights, dtype=float).reshape(-1)
        p = len(ks)
        ambient = self.ambient
        if p:
            anchors = as_point(np.asarray(self.anchors, dtype=float).reshape(p, -1))
            if ambient is not None and anchors.shape[1] != ambient:
                raise DimensionError("anchor dimension does not match ambient dimension")
            ambient = anchors.shape[1]
        else:
            ambient = 3 if ambient is None else int(ambient)
            anchors = np.zeros((0, ambient))
        if len(weights) != p:
            raise ValueError("need one weight per component")
        if np.any(ks < 1):
            raise ValueError("profile frequencies must be >= 1")
        if self.delta < 0:
            raise ValueError("slack delta must be nonnegative")
        object.__setattr__(self, "anchors", anchors)
        object.__setattr__(self, "ks", ks)
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "ambient", int(ambient))

    @classmethod
    def empty(cls, ambient=3, delta=0.0):
        return cls(np.zeros((0, ambient)), [], [], delta=delta, ambient=ambient)

    @classmethod
    def from_components(cls, components, delta=0.0, ambient=None):
        components = list(components)
        if not components:
            return cls.empty(3 if ambient is None else ambient, delta)
        return cls(
            [c.anchor for c in components],
            [c.k for c in components],
            [c.weight for c in components],
            delta=delta,
            ambient=ambient,
        )

    @property
    def n(self):
        """Intrinsic dimension of the sphere."""
        return self.ambient - 1

    def __len__(self):
        return len(self.ks)

    @property
    def components(self):
        return [PotentialComponent(z, int(k), float(w)) for z, k, w in zip(self.anchors, self.ks, self.weights)]

    def with_weights(self, weights, delta=None):
        return PotentialSpec(
            self.anchors, self.ks, weights,
            delta=self.delta if delta is None else delta, ambient=self.ambient,
        )

    def scaled(self, s):
        return self.with_weights(s * self.weights)

    def rotated(self, R):
        """Apply an ambient rotation to every anchor."""
        return PotentialSpec(self.anchors @ np.asarray(R).T, self.ks, self.weights, self.delta, self.ambient)

    def __add__(self, other):
        if self.ambient != other.ambient:
            raise DimensionError("cannot add potentials on different spheres")
        return PotentialSpec(
            np.vstack([self.anchors, other.anchors]),
            np.concatenate([self.ks, other.ks]),
            np.concatenate([self.weights, other.weights]),
            delta=min(self.delta, other.delta),
            ambient=self.ambient,
        )


def blend(spec0, spec1, t):
    """Potential (1-t) phi_0 + t phi_1 as a single spec."""
    if t == 0:
        return spec0
    if t == 1:
        return spec1
    return spec0.scaled(1.0 - t) + spec1.scaled(t)


@dataclass(frozen=True)
class AdmissibilityReport:
    total: float
    delta: float
    margin: float

    @property
    def ok(self):
        return self.margin >= -_ADMISSIBILITY_SLACK


def validate_spec(spec):
    """Check sum |theta_i| <= 1 - delta; raise InadmissibleSpec otherwise."""
    total = float(np.sum(np.abs(spec.weights)))
    report = AdmissibilityReport(total, spec.delta, 1.0 - spec.delta - total)
    if not report.ok:
        raise InadmissibleSpec(
            f"sum of |theta| is {total:.6g}, exceeds 1 - delta = {1.0 - spec.delta:.6g} "
            f"(margin {report.margin:.3g})",
            margin=report.margin,
        )
    return report


def _angles(spec, x):
    """Angles alpha_i, their sines and unit directions e_i toward each anchor.

    Returns arrays of shapes (..., p), (..., p), (..., p, n+1).  Directions
    are zeroed where sin alpha_i < EPS_SIN.
    """
    x = np.asarray(x, dtype=float)
    c = x @ spec.anchors.T
    w = spec.anchors - c[..., None] * x[..., None, :]
    s = np.linalg.norm(w, axis=-1)
    alpha = np.arctan2(s, c)
    regular = s >= EPS_SIN
    e = np.where(regular[..., None], w / np.where(regular, s, 1.0)[..., None], 0.0)
    return alpha, s, e, regular


def potential_value(spec, x):
    x = np.asarray(x, dtype=float)
    if len(spec) == 0:
        return np.zeros(x.shape[:-1]) if x.ndim > 1 else 0.0
    alpha, _, _, _ = _angles(spec, x)
    f, _, _ = profile_eval(spec.ks, alpha)
    return np.sum(spec.weights * f, axis=-1)


def potential_gradient(spec, x):
    """Riemannian gradient: -sum theta_i f_i'(alpha_i) e_i."""
    x = np.asarray(x, dtype=float)
    if len(spec) == 0:
        return np.zeros_like(x)
    alpha, _, e, _ = _angles(spec, x)
    _, fp, _ = profile_eval(spec.ks, alpha)
    return -np.einsum("...i,...ij->...j", spec.weights * fp, e)


@dataclass(frozen=True, eq=False)
class QuadraticSpec:
    """phi(x) = x.mu + x^T A x / 2 with A symmetric."""

    mu: np.ndarray
    A: np.ndarray
    delta: float = 0.0

    def __post_init__(self):
        mu = np.asarray(self.mu, dtype=float).reshape(-1)
        A = np.asarray(self.A, dtype=float)
        if A.shape != (len(mu), len(mu)):
            raise DimensionError("A must be square with the same size as mu")
        if not np.allclose(A, A.T, atol=1e-12):
            raise ValueError("A must be symmetric")
        object.__setattr__(self, "mu", mu)
        object.__setattr__(self, "A", 0.5 * (A + A.T))

    @property
    def ambient(self):
        return len(self.mu)

    def norm(self):
        return float(np.linalg.norm(self.mu) + trace_norm(self.A))

    def value(self, x):
        x = np.asarray(x, dtype=float)
        return x @ self.mu + 0.5 * np.einsum("...i,ij,...j->...", x, self.A, x)


def trace_norm(A):
    return float(np.sum(np.abs(np.linalg.eigvalsh(A))))


def quadratic_to_components(q, eig_tol=0.0):
    """Rewrite a quadratic potential as k=1 and k=2 cosine components.

    x.mu = |mu| cos d(x, mu/|mu|) and, for A = sum l_j u_j u_j^T,
    x^T A x / 2 = sum l_j cos(2 d(x, u_j))/4 + tr(A)/4, so the result agrees
    with q.value up to an additive constant.
    """
    total = q.norm()
    if total > 1.0 - q.delta + _ADMISSIBILITY_SLACK:
        raise InadmissibleSpec(
            f"|mu| + |A|_1 = {total:.6g} exceeds 1 - delta = {1.0 - q.delta:.6g}",
            margin=1.0 - q.delta - total,
        )
    anchors, ks, weights = [], [], []
    m = np.linalg.norm(q.mu)
    if m > 0:
        anchors.append(q.mu / m)
        ks.append(1)
        weights.append(m)
    lam, U = np.linalg.eigh(q.A)
    for j in range(len(lam)):
        if abs(lam[j]) > eig_tol:
            anchors.append(U[:, j])
            ks.append(2)
            weights.append(lam[j])
    if not ks:
        return PotentialSpec.empty(q.ambient, q.delta)
    return PotentialSpec(np.array(anchors), ks, weights, delta=q.delta, ambient=q.ambient)


def spec_from_dict(d):
    """Parse the model-spec JSON object into a PotentialSpec or QuadraticSpec."""
    kind = d.get("type", "components")
    delta = float(d.get("delta", 0.0))
    if kind == "components":
        comps = d.get("components", [])
        ambient = d.get("ambient")
        if not comps:
            return PotentialSpec.empty(3 if ambient is None else int(ambient), delta)
        return PotentialSpec(
            [c["z"] for c in comps],
            [int(c.get("k", 1)) for c in comps],
            [float(c.get("theta", 0.0)) for c in comps],
            delta=delta,
            ambient=ambient,
        )
    if kind == "quadratic":
        mu = np.asarray(d["mu"], dtype=float)
        A = np.asarray(d.get("A", np.zeros((len(mu), len(mu)))), dtype=float)
        return QuadraticSpec(mu, A, delta)
    raise ValueError(f"unknown model type {kind!r}")


def spec_to_dict(spec):
    if isinstance(spec, QuadraticSpec):
        return {"type": "quadratic", "mu": spec.mu.tolist(), "A": spec.A.tolist(), "delta": spec.delta}
    return {
        "type": "components",
        "components": [
            {"z": z.tolist(), "k": int(k), "theta": float(w)}
            for z, k, w in zip(spec.anchors, spec.ks, spec.weights)
        ],
        "delta": spec.delta,
        "ambient": spec.ambient,
    }


def as_potential(spec):
    """Components form of either spec type."""
    if isinstance(spec, QuadraticSpec):
        return quadratic_to_components(spec)
    return spec


def random_spec(rng, n_components=None, max_k=5, total=None, ambient=3, delta=0.0, max_total=0.9):
    """Random admissible spec for tests and scans.

    Anchors are uniform, frequencies uniform in 1..max_k, signs random and
    sum |theta| equal to ``total`` (default uniform in [0, max_total]).
    """
    p = int(rng.integers(1, 5)) if n_components is None else n_components
    if total is None:
        total = rng.uniform(0.0, max_total)
    g = rng.standard_normal((p, ambient))
    anchors = g / np.linalg.norm(g, axis=1, keepdims=True)
    ks = rng.integers(1, max_k + 1, size=p)
    w = rng.dirichlet(np.ones(p)) * total * rng.choice([-1.0, 1.0], size=p)
    return PotentialSpec(anchors, ks, w, delta=delta, ambient=ambient)
