import numpy as np
import pytest
from hypothesis import given, settings

from spherical_gradient.potential import PotentialSpec, blend, random_spec
from spherical_gradient.sphere import fibonacci_sphere, uniform_sample
from spherical_gradient.verify import (
    GridFunction, c_transform_grid, check_c_convexity, check_factored_jacobian,
    check_jacobian_inequality, check_sliding_mountain, run_suite,
)
from spherical_gradient import verify

from conftest import E1, E2, E3, admissible_specs, unit_vectors


def test_c_transform_of_constant():
    grid = fibonacci_sphere(600)
    g = c_transform_grid(GridFunction(grid, np.full(len(grid), 0.3)))
    # the max is attained at x = y
    np.testing.assert_allclose(g.values, -0.3, atol=1e-12)


def test_null_spec_is_exactly_c_convex():
    rep = check_c_convexity(PotentialSpec.empty(), 2000)
    assert rep.deviation == 0.0 and rep.passed


def test_admissible_specs_pass():
    s0 = PotentialSpec([E3], [3], [0.9])
    s1 = PotentialSpec([E1, E2], [1, 5], [-0.5, 0.45])
    for s in (s0, s1, blend(s0, s1, 0.5)):
        assert check_c_convexity(s, 4000).passed


def test_non_c_convex_spec_fails():
    rep = check_c_convexity(PotentialSpec([E3], [2], [3.0]), 4000)
    assert not rep.passed
    assert rep.deviation > 10 * rep.threshold


def test_mesh_constant_covers_calibration():
    c = verify.calibrate_mesh_constant(4000)
    assert c <= verify.MESH_CONSTANT


def test_jacobian_inequality_endpoints(rng):
    s0, s1 = random_spec(rng, total=0.9), random_spec(rng, total=0.9)
    x = uniform_sample(rng)
    rep = check_jacobian_inequality(s0, s1, x)
    assert rep.passed
    lj = rep.log_j
    from spherical_gradient.density import log_density
    assert lj[0] == log_density(s0, x) and lj[-1] == log_density(s1, x)


def test_jacobian_inequality_same_spec_is_flat(rng):
    s = random_spec(rng, total=0.8)
    rep = check_jacobian_inequality(s, s, uniform_sample(rng))
    assert np.ptp(rep.log_j) <= 1e-12
    assert abs(rep.min_margin) <= 1e-12


@settings(max_examples=60, deadline=None)
@given(admissible_specs(max_total=0.99), admissible_specs(max_total=0.99), unit_vectors())
def test_jacobian_inequality_property(s0, s1, x):
    assert check_jacobian_inequality(s0, s1, x).passed


def test_sliding_mountain_degenerate_cases():
    y0 = np.array([0.6, 0.0, 0.8])
    y1 = np.array([0.0, 0.6, 0.8])
    rep = check_sliding_mountain(E3, E3, y0, y1)
    assert np.all(np.asarray(rep.values) == 0.0)
    rep = check_sliding_mountain(E1, E3, y0, y0)
    # y_t = y0 up to roundoff in the exp/log round trip
    assert np.ptp(rep.values) <= 1e-15 and rep.passed


@settings(max_examples=100, deadline=None)
@given(unit_vectors(), unit_vectors(), unit_vectors(), unit_vectors())
def test_sliding_mountain_property(x, z, y0, y1):
    from spherical_gradient.sphere import geodesic_distance
    if max(geodesic_distance(y0, z), geodesic_distance(y1, z)) > np.pi - 1e-3:
        return
    assert check_sliding_mountain(x, z, y0, y1).passed


@settings(max_examples=60, deadline=None)
@given(admissible_specs(max_total=0.99), unit_vectors())
def test_factored_jacobian_matches(spec, x):
    assert check_factored_jacobian(spec, x).passed


@settings(max_examples=40, deadline=None)
@given(admissible_specs(max_total=0.99), admissible_specs(max_total=0.99), unit_vectors())
def test_log_sigma_concave_along_blend(s0, s1, x):
    ls = verify.log_sigma_along_blend(s0, s1, x)
    assert np.all(ls[:-2] - 2 * ls[1:-1] + ls[2:] <= verify.CONCAVITY_SLACK)


def test_run_suite_report():
    s0 = PotentialSpec([E3], [1], [0.5])
    s1 = PotentialSpec([E1], [2], [-0.4])
    rep = run_suite("all", [s0, s1], seed=1, n_points=20, resolution=1500)
    assert rep["passed"]
    assert [c["name"] for c in rep["checks"]] == ["c-convexity"] * 3 + ["jacobian", "sliding-mountain"]
    with pytest.raises(ValueError):
        run_suite("nope", [s0])
