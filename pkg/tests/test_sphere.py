import math

import numpy as np
import pytest
from hypothesis import assume, given, settings

from spherical_gradient.errors import AntipodalError
from spherical_gradient.sphere import (
    as_point, c_segment, cost, exp_map, geodesic_distance, lonlat_to_xyz, log_map, tangent_basis,
    uniform_sample, xyz_to_lonlat,
)
from spherical_gradient.verify import fd_tangent_gradient

from conftest import E1, E2, E3, unit_vectors


def test_distance_examples():
    assert geodesic_distance(E1, E1) == 0.0
    assert geodesic_distance(E1, -E1) == pytest.approx(math.pi, abs=1e-15)
    assert geodesic_distance(E1, E2) == pytest.approx(math.pi / 2, abs=1e-15)


def test_cost_examples():
    x = as_point([0.3, -0.2, 0.9])
    assert cost(x, x) == 0.0
    assert cost(E1, -E1) == pytest.approx(math.pi**2 / 2)
    assert cost(E1, E2) == pytest.approx(math.pi**2 / 8)


def test_exp_map_examples():
    np.testing.assert_array_equal(exp_map(E1, np.zeros(3)), E1)
    np.testing.assert_allclose(exp_map(E1, math.pi / 2 * E2), E2, atol=1e-15)
    v = math.pi / 4 * (E1 + E2) / math.sqrt(2)
    want = math.cos(math.pi / 4) * E3 + math.sin(math.pi / 4) * (E1 + E2) / math.sqrt(2)
    np.testing.assert_allclose(exp_map(E3, v), want, atol=1e-15)


def test_log_map_examples():
    np.testing.assert_array_equal(log_map(E1, E1), np.zeros(3))
    np.testing.assert_allclose(log_map(E1, E3), math.pi / 2 * E3, atol=1e-15)
    with pytest.raises(AntipodalError):
        log_map(E1, -E1)
    with pytest.raises(AntipodalError):
        log_map(E1, as_point(-E1 + 1e-11 * E2))


def test_c_segment_endpoints_and_midpoint():
    y0, y1, z = as_point([1, 2, 0.5]), as_point([-1, 0.3, 1]), as_point([0.2, 0.1, 1])
    np.testing.assert_array_equal(c_segment(y0, y1, z, 0), y0)
    np.testing.assert_array_equal(c_segment(y0, y1, z, 1), y1)
    # oracle: log_{e3}(e1) = pi/2 e1, log_{e3}(e2) = pi/2 e2, average, then the exp formula
    r = math.hypot(math.pi / 4, math.pi / 4)
    want = [math.sin(r) / math.sqrt(2), math.sin(r) / math.sqrt(2), math.cos(r)]
    np.testing.assert_allclose(c_segment(E1, E2, E3, 0.5), want, atol=1e-14)


def test_tangent_basis_examples():
    B = tangent_basis(E3)
    np.testing.assert_array_equal(B, [E1, E2])
    x = as_point([0.3, -0.7, 0.2])
    B = tangent_basis(x)
    assert B.shape == (2, 3)
    np.testing.assert_allclose(B @ B.T, np.eye(2), atol=1e-15)
    np.testing.assert_allclose(B @ x, 0.0, atol=1e-15)
    np.testing.assert_array_equal(tangent_basis(x), B)


def test_tangent_basis_higher_dimension(rng):
    x = uniform_sample(rng, ambient=5)
    B = tangent_basis(x)
    assert B.shape == (4, 5)
    np.testing.assert_allclose(B @ B.T, np.eye(4), atol=1e-14)
    np.testing.assert_allclose(B @ x, 0.0, atol=1e-14)


def test_uniform_sample_deterministic():
    a = uniform_sample(np.random.default_rng(7))
    b = uniform_sample(np.random.default_rng(7))
    np.testing.assert_array_equal(a, b)
    assert np.linalg.norm(a) == pytest.approx(1.0, abs=1e-15)


def test_uniform_sample_moments(rng):
    X = uniform_sample(rng, size=100_000)
    # 3/sqrt(M) per coordinate with Var = 1/3 gives about 0.0055 per axis
    assert np.linalg.norm(X.mean(axis=0)) < 0.02
    # binomial stderr 0.0016; 0.005 is about 3 sigma
    assert abs(np.mean(X[:, 2] > 0) - 0.5) < 0.005


def test_lonlat_round_trip():
    lon = np.array([-180.0, -45.0, 0.0, 90.0, 179.0])
    lat = np.array([-90.0 + 1e-9, -30.0, 0.0, 45.0, 89.0])
    lo, la = xyz_to_lonlat(lonlat_to_xyz(lon, lat))
    np.testing.assert_allclose(la, lat, atol=1e-9)
    np.testing.assert_allclose(lo[1:], lon[1:], atol=1e-9)
    np.testing.assert_allclose(lonlat_to_xyz(0.0, 90.0), E3, atol=1e-15)


@settings(max_examples=200, deadline=None)
@given(unit_vectors(), unit_vectors())
def test_exp_log_round_trip(x, y):
    assume(geodesic_distance(x, y) <= math.pi - 1e-3)
    v = log_map(x, y)
    assert abs(v @ x) < 1e-12
    assert np.linalg.norm(v) == pytest.approx(geodesic_distance(x, y), abs=1e-12)
    np.testing.assert_allclose(exp_map(x, v), y, atol=1e-10)


@settings(max_examples=200, deadline=None)
@given(unit_vectors(), unit_vectors(), unit_vectors())
def test_triangle_inequality(x, y, z):
    assert geodesic_distance(x, z) <= geodesic_distance(x, y) + geodesic_distance(y, z) + 1e-12


@settings(max_examples=100, deadline=None)
@given(unit_vectors(), unit_vectors())
def test_cost_gradient_is_minus_log(x, y):
    assume(geodesic_distance(x, y) < math.pi - 1e-3)
    g = fd_tangent_gradient(lambda w: cost(w, y), x, h=1e-5)
    np.testing.assert_allclose(g, -log_map(x, y), atol=1e-5)


@settings(max_examples=100, deadline=None)
@given(unit_vectors(), unit_vectors())
def test_distance_symmetric(x, y):
    assert geodesic_distance(x, y) == geodesic_distance(y, x)
    assert 0.0 <= geodesic_distance(x, y) <= math.pi
