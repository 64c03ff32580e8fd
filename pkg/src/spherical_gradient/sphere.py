"""Geometry of the unit sphere S^n in ambient coordinates of R^{n+1}.

Points are plain numpy arrays of shape ``(n+1,)`` (or stacked ``(m, n+1)``)
with unit norm; tangent vectors are ambient arrays orthogonal to their base
point.  Most functions broadcast over a leading batch axis.
"""

import numpy as np

from .errors import AntipodalError, DimensionError

EPS_ANTIPODE = 1e-9
_SINC_SWITCH = 1e-7


def as_point(coords):
    """Validate and renormalize ambient coordinates into a point of S^n."""
    x = np.asarray(coords, dtype=float)
    if x.shape[-1] < 2:
        raise DimensionError("a point of S^n needs at least 2 ambient coordinates")
    norm = np.linalg.norm(x, axis=-1, keepdims=True)
    if np.any(norm == 0) or not np.all(np.isfinite(x)):
        raise ValueError("cannot normalize a zero or non-finite vector")
    return x / norm


def basis_vector(i, ambient=3):
    e = np.zeros(ambient)
    e[i] = 1.0
    return e


def geodesic_distance(x, y):
    """Great-circle distance in [0, pi].

    Uses 2*atan2(|x-y|, |x+y|), which equals arccos(x.y) but keeps full
    relative accuracy near 0 and pi.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    a = np.linalg.norm(x - y, axis=-1)
    b = np.linalg.norm(x + y, axis=-1)
    return 2.0 * np.arctan2(a, b)


def cost(x, y):
    """Transport cost c(x, y) = d(x, y)^2 / 2."""
    return 0.5 * geodesic_distance(x, y) ** 2


def sinc(r):
    """sin(r)/r with the series branch near zero."""
    r = np.asarray(r, dtype=float)
    small = np.abs(r) < _SINC_SWITCH
    safe = np.where(small, 1.0, r)
    return np.where(small, 1.0 - r * r / 6.0, np.sin(safe) / safe)


def exp_map(x, v):
    """exp_x(v) = cos|v| x + sin|v| v/|v|; renormalized."""
    x = np.asarray(x, dtype=float)
    v = np.asarray(v, dtype=float)
    r = np.linalg.norm(v, axis=-1, keepdims=True)
    y = np.cos(r) * x + sinc(r) * v
    return y / np.linalg.norm(y, axis=-1, keepdims=True)


def log_map(x, y, eps_antipode=EPS_ANTIPODE):
    """Inverse exponential map: the tangent vector at x pointing to y.

    Raises AntipodalError when y lies within eps_antipode of the cut point -x.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    c = np.sum(x * y, axis=-1, keepdims=True)
    w = y - c * x
    s = np.linalg.norm(w, axis=-1, keepdims=True)
    d = geodesic_distance(x, y)[..., None]
    if np.any(d >= np.pi - eps_antipode):
        raise AntipodalError("log map undefined: points are (nearly) antipodal")
    # d / sin d -> 1 as d -> 0
    scale = np.where(s > 0, d / np.where(s > 0, s, 1.0), 1.0)
    return w * scale


def c_segment(y0, y1, z, t):
    """Point at time t on the c-segment from y0 to y1 seen from z."""
    if t == 0:
        return np.array(y0, dtype=float)
    if t == 1:
        return np.array(y1, dtype=float)
    v0 = log_map(z, y0)
    v1 = log_map(z, y1)
    return exp_map(z, (1.0 - t) * v0 + t * v1)


def project_tangent(x, v):
    x = np.asarray(x, dtype=float)
    v = np.asarray(v, dtype=float)
    return v - np.sum(x * v, axis=-1, keepdims=True) * x


def tangent_basis(x):
    """Orthonormal basis of T_x S^n as an (n, n+1) array.

    Gram-Schmidt over the standard basis, skipping the axis most aligned
    with x, so the result is a deterministic function of x.
    """
    x = np.asarray(x, dtype=float)
    d = x.shape[-1]
    skip = int(np.argmax(np.abs(x)))
    out = []
    for i in range(d):
        if i == skip:
            continue
        u = np.zeros(d)
        u[i] = 1.0
        u -= (u @ x) * x
        for b in out:
            u -= (u @ b) * b
        # second pass for orthogonality at the 1e-16 level
        u -= (u @ x) * x
        for b in out:
            u -= (u @ b) * b
        out.append(u / np.linalg.norm(u))
    return np.array(out)


def uniform_sample(rng, ambient=3, size=None):
    """Uniform point(s) on S^n by normalizing standard Gaussian draws."""
    shape = (ambient,) if size is None else (size, ambient)
    g = rng.standard_normal(shape)
    return g / np.linalg.norm(g, axis=-1, keepdims=True)


def lonlat_to_xyz(lon_deg, lat_deg):
    lon = np.radians(np.asarray(lon_deg, dtype=float))
    lat = np.radians(np.asarray(lat_deg, dtype=float))
    return np.stack([np.cos(lat) * np.cos(lon), np.cos(lat) * np.sin(lon), np.sin(lat)], axis=-1)


def xyz_to_lonlat(x):
    """Geographic (lon, lat) in degrees with lon in [-180, 180)."""
    x = np.asarray(x, dtype=float)
    lon = np.degrees(np.arctan2(x[..., 1], x[..., 0]))
    lon = np.where(lon >= 180.0, lon - 360.0, lon)
    lat = np.degrees(np.arctan2(x[..., 2], np.hypot(x[..., 0], x[..., 1])))
    return lon, lat


def fibonacci_sphere(n_nodes):
    """Quasi-uniform Fibonacci lattice on S^2, shape (n_nodes, 3)."""
    i = np.arange(n_nodes) + 0.5
    z = 1.0 - 2.0 * i / n_nodes
    golden = np.pi * (3.0 - np.sqrt(5.0))
    phi = golden * i
    r = np.sqrt(1.0 - z * z)
    return np.stack([r * np.cos(phi), r * np.sin(phi), z], axis=-1)


def random_rotation(rng, ambient=3):
    """Haar-random proper rotation matrix."""
    q, r = np.linalg.qr(rng.standard_normal((ambient, ambient)))
    q = q * np.sign(np.diag(r))
    if np.linalg.det(q) < 0:
        q[:, 0] = -q[:, 0]
    return q
