"""Congruence flows: velocity reductions, ray straightness, interval
linearity, and cosmology trajectories."""
import math

import numpy as np
import pytest

from finslerlab import cosmology as co
from finslerlab import fields, geodesics, spaces
from finslerlab.errors import LeftDomain, TooFewSamples, ZeroLambda

RNG = np.random.default_rng(555)


def _flows():
    return (
        (geodesics.FlowSpec(spaces.SpaceSpec.euclidean(3),
                            fields.RadialLog(c=1.3, r0=1.0, dim=3)),
         lambda: RNG.normal(size=3) + np.array([2.0, 0.0, 0.0])),
        (geodesics.FlowSpec(spaces.SpaceSpec.euclidean(3),
                            fields.RadialLog(c=-0.7, r0=1.0, dim=3)),
         lambda: RNG.normal(size=3) + np.array([2.0, 0.0, 0.0])),
        (geodesics.FlowSpec(spaces.SpaceSpec.pseudo_euclidean(4),
                            fields.IntervalLog(c=0.9, s0=1.0, dim=4)),
         lambda: np.concatenate([[3.0 + RNG.uniform(0, 1)], 0.4 * RNG.normal(size=3)])),
        (geodesics.FlowSpec(spaces.SpaceSpec.berwald_moore(),
                            fields.BerwaldMooreLog(amplitude=1.2, s0=1.0)),
         lambda: RNG.uniform(0.5, 2.0, size=4)),
    )


# ---------------------------------------------------------------------------
# velocity reductions
# ---------------------------------------------------------------------------

def test_reducing_lambda_gives_velocity_equal_position():
    for flow, draw in _flows():
        for _ in range(20):
            x = draw()
            v = geodesics.congruence_velocity(flow, x)
            assert np.max(np.abs(v - x)) <= 1e-12 * max(1.0, float(np.max(np.abs(x))))


def test_unit_lambda_velocity_is_index_raised_gradient():
    field = fields.IntervalLog(c=0.9, s0=1.0, dim=4)
    flow = geodesics.FlowSpec(spaces.SpaceSpec.pseudo_euclidean(4), field,
                              lambda_choice="unit")
    x = np.array([3.0, 0.4, -0.2, 0.1])
    grad = field.gradient(x)
    v = geodesics.congruence_velocity(flow, x)
    assert v[0] == pytest.approx(grad[0])
    np.testing.assert_allclose(v[1:], -grad[1:], rtol=1e-14)


def test_custom_lambda_and_zero_lambda():
    field = fields.RadialLog(c=1.0, r0=1.0, dim=3)
    flow = geodesics.FlowSpec(spaces.SpaceSpec.euclidean(3), field,
                              lambda_choice=lambda x: 2.0)
    x = np.array([1.0, 1.0, 0.0])
    np.testing.assert_allclose(geodesics.congruence_velocity(flow, x),
                               2.0 * field.gradient(x), rtol=1e-14)
    bad = geodesics.FlowSpec(spaces.SpaceSpec.euclidean(3), field,
                             lambda_choice=lambda x: 0.0)
    with pytest.raises(ZeroLambda):
        geodesics.congruence_velocity(bad, x)


# ---------------------------------------------------------------------------
# flow integration
# ---------------------------------------------------------------------------

def test_integrated_flow_is_exponential():
    # xdot = x from x0 has the solution x0 * e^tau
    flow = geodesics.FlowSpec(spaces.SpaceSpec.euclidean(3),
                              fields.RadialLog(c=1.0, r0=1.0, dim=3))
    x0 = np.array([1.0, 0.5, -0.25])
    traj = geodesics.integrate_flow(flow, x0, (0.0, 1.0), tol=1e-12)
    np.testing.assert_allclose(traj.points[-1], x0 * math.e, rtol=1e-10)
    assert traj.meta["future_directed"]


def test_straightness_of_integrated_flows():
    starts = {
        spaces.EUCLIDEAN: np.array([1.0, 0.6, -0.4]),
        spaces.PSEUDO_EUCLIDEAN: np.array([1.0, 0.5, 0.3, 0.1]),
        spaces.BERWALD_MOORE: np.array([1.0, 0.8, 1.3, 0.6]),
    }
    for flow, _ in _flows():
        x0 = starts[flow.space.kind]
        traj = geodesics.integrate_flow(flow, x0, (0.0, 2.0), tol=1e-10)
        assert geodesics.straightness_deviation(traj) <= 1e-9


def test_straightness_diagnostic_itself():
    direction = np.array([1.0, 2.0, 2.0]) / 3.0
    taus = np.linspace(1.0, 3.0, 9)
    exact = geodesics.Trajectory(taus, np.outer(taus, direction))
    assert geodesics.straightness_deviation(exact) <= 1e-15

    bent = np.outer(taus, direction)
    bent[3] += np.array([0.0, 1e-3, -1e-3])
    perturbed = geodesics.Trajectory(taus, bent)
    assert geodesics.straightness_deviation(perturbed) >= 1e-4

    with pytest.raises(TooFewSamples):
        geodesics.straightness_deviation(geodesics.Trajectory(taus[:2], bent[:2]))


def test_interval_grows_linearly_with_expected_slope():
    x0 = np.array([1.0, 0.5, 0.3, 0.1])
    flow = geodesics.FlowSpec(spaces.SpaceSpec.pseudo_euclidean(4),
                              fields.IntervalLog(c=1.0, s0=1.0, dim=4))
    traj = geodesics.integrate_flow(flow, x0, (0.0, 2.0), tol=1e-11)
    slope, fit_residual = geodesics.interval_slope(traj)
    expected = math.sqrt(1.0 - (0.5**2 + 0.3**2 + 0.1**2))
    assert slope == pytest.approx(expected, abs=1e-8)
    assert fit_residual <= 1e-8 * float(np.max(traj.points[:, 0]))


def test_berwald_moore_uniform_in_isotropic_time():
    x0 = np.array([1.0, 0.8, 1.3, 0.6])
    flow = geodesics.FlowSpec(spaces.SpaceSpec.berwald_moore(),
                              fields.BerwaldMooreLog(amplitude=1.0, s0=1.0))
    traj = geodesics.integrate_flow(flow, x0, (0.0, 2.0), tol=1e-11)
    assert geodesics.uniformity_deviation(traj) <= 1e-10


def test_flow_left_domain():
    # Berwald-Moore flow integrated backwards shrinks toward the orthant
    # boundary; starting near it and forcing huge spans trips the domain
    flow = geodesics.FlowSpec(spaces.SpaceSpec.berwald_moore(),
                              fields.BerwaldMooreLog(amplitude=1.0, s0=1.0),
                              lambda_choice=lambda x: -1.0e6)
    with pytest.raises(LeftDomain):
        geodesics.integrate_flow(flow, np.array([1.0, 1.0, 1.0, 1.0]), (0.0, 1.0))


# ---------------------------------------------------------------------------
# cosmology rays
# ---------------------------------------------------------------------------

@pytest.fixture(scope="module")
def solution():
    return co.integrate_phi(0.55, 1e-10)


def test_cosmo_ray_conserves_direction(solution):
    traj = geodesics.cosmo_trajectory(solution, np.array([0.2, 0.1, 0.05]),
                                      (0.0, 0.7), tol=1e-11)
    radii = np.linalg.norm(traj.points, axis=1)
    directions = traj.points / radii[:, None]
    assert np.max(np.abs(directions - directions[0])) <= 1e-10


def test_cosmo_ray_matches_one_dimensional_quadrature(solution):
    start = np.array([0.2, 0.1, 0.05])
    traj = geodesics.cosmo_trajectory(solution, start, (0.0, 0.7), tol=1e-11)
    r = float(np.linalg.norm(start))
    steps = 20000
    h = 0.7 / steps
    for _ in range(steps):
        k1 = solution.phi(solution.gamma * r)
        k2 = solution.phi(solution.gamma * (r + 0.5 * h * k1))
        k3 = solution.phi(solution.gamma * (r + 0.5 * h * k2))
        k4 = solution.phi(solution.gamma * (r + h * k3))
        r += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    assert abs(r - float(np.linalg.norm(traj.points[-1]))) <= 1e-8


def test_cosmo_ray_velocity_vanishes_at_origin(solution):
    traj = geodesics.cosmo_trajectory(solution, np.array([1e-12, 0.0, 0.0]),
                                      (0.0, 0.5), tol=1e-10)
    # starting (numerically) at the center, the body barely moves
    assert float(np.linalg.norm(traj.points[-1])) <= 1e-11


def test_cosmo_ray_leaves_resolved_range(solution):
    with pytest.raises(LeftDomain):
        geodesics.cosmo_trajectory(solution, np.array([0.3, 0.2, 0.1]),
                                   (0.0, 3.0), tol=1e-10)
