"""Gradient map and its Jacobian determinant, the pull-back density.

For phi = sum theta_i f_i(d(x, z_i)) the density with respect to the
uniform measure is

    p(x) = (sin|v|/|v|)^(n-1) det(x x^T + H + sum_i theta_i K_i)

with v = grad phi(x), H the Hessian of c(., y) at y = exp_x(v) and K_i the
Hessian of f_i(d(., z_i)).  All matrices are ambient (n+1)x(n+1); the
normal direction contributes the eigenvalue 1.
"""

import csv
from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, JacobianSignError, WrapViolation
from .potential import _angles, as_potential, potential_gradient, profile_eval
from .sphere import exp_map, lonlat_to_xyz, sinc

EPS_V = 1e-7
EPS_WRAP = 1e-9
DET_ROUNDOFF = 1e-12


def _alpha_cot(a):
    """a cos(a) / sin(a), series branch near 0."""
    small = a < EPS_V
    safe = np.where(small, 1.0, a)
    return np.where(small, 1.0 - a * a / 3.0, safe * np.cos(safe) / np.sin(safe))


@dataclass(frozen=True)
class JacobianParts:
    v: np.ndarray
    sigma: float
    M: np.ndarray
    det: float

    @property
    def density(self):
        return self.sigma * self.det


def gradient_map(spec, x):
    """G(x) = exp_x(grad phi(x))."""
    spec = as_potential(spec)
    return exp_map(x, potential_gradient(spec, x))


def _assemble(spec, x, eps_wrap=EPS_WRAP):
    """Batched pieces of the density formula: (v, |v|, sigma, M)."""
    spec = as_potential(spec)
    x = np.asarray(x, dtype=float)
    d = x.shape[-1]
    if d != spec.ambient:
        raise DimensionError(f"point has {d} coordinates, spec expects {spec.ambient}")
    n = d - 1
    eye = np.eye(d)
    xx = x[..., :, None] * x[..., None, :]
    P = eye - xx
    batch = x.shape[:-1]

    if len(spec):
        alpha, s, e, regular = _angles(spec, x)
        _, fp, fpp = profile_eval(spec.ks, alpha)
        v = -np.einsum("...i,...ij->...j", spec.weights * fp, e)
        # f'(a) cos(a)/sin(a) tends to f''(a) at a in {0, pi} since f' vanishes there
        g = np.where(regular, fp * np.cos(alpha) / np.where(regular, s, 1.0), fpp)
        tw = spec.weights * (fpp - g)
        iso = np.sum(spec.weights * g, axis=-1)
        K_sum = np.einsum("...i,...ij,...ik->...jk", tw, e, e)
    else:
        v = np.zeros(x.shape)
        iso = np.zeros(batch)
        K_sum = 0.0

    a = np.linalg.norm(v, axis=-1)
    if np.any(a >= np.pi - eps_wrap):
        raise WrapViolation(f"|grad phi| = {np.max(a):.6g} reaches pi; the spec does not wrap at this point")
    big = a >= EPS_V
    ev = np.where(big[..., None], v / np.where(big, a, 1.0)[..., None], 0.0)
    beta = _alpha_cot(a)
    sigma = sinc(a) ** (n - 1)
    M = (
        xx
        + (1.0 - beta)[..., None, None] * (ev[..., :, None] * ev[..., None, :])
        + (beta + iso)[..., None, None] * P
        + K_sum
    )
    return v, a, sigma, M


def jacobian_parts(spec, x, eps_wrap=EPS_WRAP):
    v, _, sigma, M = _assemble(spec, x, eps_wrap)
    return JacobianParts(v=v, sigma=float(sigma), M=M, det=float(np.linalg.det(M)))


def _checked_det(det):
    """Reject negative determinants; roundoff around the zeros of boundary
    specs (sum |theta| = 1) is clamped to 0."""
    if np.any(det < -DET_ROUNDOFF):
        raise JacobianSignError("negative Jacobian determinant; the spec is not a wrapping potential here")
    return np.maximum(det, 0.0)


def log_density(spec, x):
    """log p(x), broadcasting over a leading batch axis."""
    x = np.asarray(x, dtype=float)
    n = x.shape[-1] - 1
    _, a, _, M = _assemble(spec, x)
    sign, logdet = np.linalg.slogdet(M)
    if np.any(sign <= 0):
        # rare: only at zeros of boundary specs
        _checked_det(sign * np.exp(logdet))
        logdet = np.where(sign > 0, logdet, -np.inf)
    small = a < EPS_V
    log_sinc = np.where(small, -a * a / 6.0, np.log(sinc(np.where(small, 1.0, a))))
    out = (n - 1) * log_sinc + logdet
    return float(out) if out.ndim == 0 else out


def density(spec, x):
    x = np.asarray(x, dtype=float)
    _, _, sigma, M = _assemble(spec, x)
    det = _checked_det(np.linalg.det(M))
    out = sigma * det
    return float(out) if np.ndim(out) == 0 else out


@dataclass(frozen=True)
class DensityGrid:
    """Density on a lon/lat table; values[i, j] is at (lat[i], lon[j])."""

    lon: np.ndarray
    lat: np.ndarray
    values: np.ndarray

    def weighted_mean(self):
        """Area-weighted mean over the sphere (trapezoid in latitude)."""
        lat = np.radians(self.lat)
        w = np.clip(np.cos(lat), 0.0, None)
        w[[0, -1]] *= 0.5
        return float(np.sum(w * self.values.mean(axis=1)) / np.sum(w))

    def argmax(self):
        i, j = np.unravel_index(np.argmax(self.values), self.values.shape)
        return float(self.lon[j]), float(self.lat[i])

    def rows(self):
        for i, la in enumerate(self.lat):
            for j, lo in enumerate(self.lon):
                yield lo, la, self.values[i, j]

    def to_csv(self, path_or_file):
        write_grid_csv(self, path_or_file)


def density_grid(spec, resolution):
    """Evaluate the density on a (resolution+1) x (2*resolution) lat/lon grid."""
    spec = as_potential(spec)
    if spec.ambient != 3:
        raise DimensionError("density grids are defined on S^2 only")
    if resolution < 2:
        raise ValueError("resolution must be at least 2")
    lat = np.linspace(-90.0, 90.0, resolution + 1)
    lon = -180.0 + 360.0 * np.arange(2 * resolution) / (2 * resolution)
    LO, LA = np.meshgrid(lon, lat)
    pts = lonlat_to_xyz(LO, LA)
    values = density(spec, pts.reshape(-1, 3)).reshape(LA.shape)
    return DensityGrid(lon, lat, values)


def write_grid_csv(grid, path_or_file):
    def _write(f):
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["lon_deg", "lat_deg", "density"])
        for lo, la, val in grid.rows():
            w.writerow([f"{lo:.17g}", f"{la:.17g}", f"{val:.17g}"])

    if hasattr(path_or_file, "write"):
        _write(path_or_file)
    else:
        with open(path_or_file, "w", newline="") as f:
            _write(f)
