"""Normal-congruence flows of a World function and their diagnostics.

A World function S defines a congruence through

    Euclidean:       xdot_i = dS/dx_i * lambda(x)
    pseudo:          xdot_0 = dS/dx_0 * lambda,  xdot_mu = -dS/dx_mu * lambda
    Berwald-Moore:   xidot_i = (prod_j dS/dxi_j) / (dS/dxi_i) * lambda

For the three log families there is a lambda that reduces the velocity
to xdot = x exactly, so the flow lines are rays through the origin:

    radial log:      lambda = r^2 / c
    interval log:    lambda = s^2 / c
    Berwald-Moore:   lambda = 64 s^4 / amplitude^3

(The sign of lambda is chosen so trajectories are future-directed,
xdot_0 > 0, for either sign of the field constant.)
"""
from __future__ import annotations

from dataclasses import dataclass, field as dataclass_field
from typing import Callable, Union

import numpy as np

from .errors import (
    DerivativeUnavailable,
    DomainError,
    InadmissibleDirection,
    LeftDomain,
    OutOfRange,
    ToleranceNotMet,
    TooFewSamples,
    ZeroLambda,
)

_DOMAIN_ERRORS = (DomainError, InadmissibleDirection, OutOfRange,
                  DerivativeUnavailable, ZeroLambda)
from .fields import BerwaldMooreLog, IntervalLog, RadialLog, ScalarField, as_point
from .spaces import BERWALD_MOORE, EUCLIDEAN, PSEUDO_EUCLIDEAN, SpaceSpec
from .cosmology import CosmoSolution

LambdaChoice = Union[str, Callable]


@dataclass(frozen=True)
class FlowSpec:
    """Space + World function + choice of the flow scaling lambda.

    ``lambda_choice`` is "unit", "paper" (the family-specific reduction
    above), or a callable x -> lambda(x).
    """

    space: SpaceSpec
    field: ScalarField
    lambda_choice: LambdaChoice = "paper"

    def lambda_value(self, x) -> float:
        if callable(self.lambda_choice):
            lam = float(self.lambda_choice(x))
        elif self.lambda_choice == "unit":
            lam = 1.0
        elif self.lambda_choice == "paper":
            lam = self._reducing_lambda(x)
        else:
            raise ValueError(f"unknown lambda choice {self.lambda_choice!r}")
        if lam == 0.0:
            raise ZeroLambda("lambda vanished along the flow")
        return lam

    def _reducing_lambda(self, x) -> float:
        f = self.field
        if isinstance(f, RadialLog):
            r2 = float(np.dot(x, x))
            return r2 / f.c
        if isinstance(f, IntervalLog):
            x = as_point(x, f.dim)
            q = float(x[0] ** 2 - np.dot(x[1:], x[1:]))
            return q / f.c
        if isinstance(f, BerwaldMooreLog):
            prod = float(np.prod(np.asarray(x, dtype=float)))
            return 64.0 * prod / f.amplitude**3
        raise ValueError("no reducing lambda is known for this field family")


def congruence_velocity(flow: FlowSpec, x) -> np.ndarray:
    """Flow velocity at a point, per the space-appropriate index raising."""
    x = as_point(x, flow.space.dim)
    lam = flow.lambda_value(x)
    try:
        grad = flow.field.gradient(x)
    except DomainError as exc:
        raise DerivativeUnavailable(str(exc)) from exc
    kind = flow.space.kind
    if kind == EUCLIDEAN:
        return lam * grad
    if kind == PSEUDO_EUCLIDEAN:
        v = -grad
        v[0] = grad[0]
        return lam * v
    if kind == BERWALD_MOORE:
        prod = float(np.prod(grad))
        return lam * prod / grad
    raise ValueError(f"no congruence flow for space kind {kind}")


@dataclass
class Trajectory:
    """Sampled flow line with strictly increasing parameter values."""

    taus: np.ndarray
    points: np.ndarray  # shape (len(taus), dim)
    meta: dict = dataclass_field(default_factory=dict)

    def __post_init__(self):
        if np.any(np.diff(self.taus) <= 0.0):
            raise ValueError("parameter samples must be strictly increasing")


def _rk4_path(velocity, x0: np.ndarray, t0: float, t1: float, steps: int):
    """Classic fixed-step RK4; returns (ts, xs)."""
    h = (t1 - t0) / steps
    ts = np.empty(steps + 1)
    xs = np.empty((steps + 1, len(x0)))
    ts[0] = t0
    xs[0] = x0
    x = x0.astype(float).copy()
    for m in range(steps):
        k1 = velocity(x)
        k2 = velocity(x + 0.5 * h * k1)
        k3 = velocity(x + 0.5 * h * k2)
        k4 = velocity(x + h * k3)
        x = x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        ts[m + 1] = t0 + (m + 1) * h
        xs[m + 1] = x
    return ts, xs


def integrate_flow(flow: FlowSpec, x_start, tau_span, tol: float = 1e-10,
                   initial_steps: int = 32, max_doublings: int = 16) -> Trajectory:
    """Integrate the congruence flow over tau_span.

    Fixed-step RK4 with step-doubling control: the step count doubles
    until two successive resolutions agree within tol at the endpoint.
    Domain violations (cone exits, nonpositive coordinates) surface as
    LeftDomain.
    """
    x0 = as_point(x_start, flow.space.dim)
    t0, t1 = float(tau_span[0]), float(tau_span[1])
    if t1 <= t0:
        raise ValueError("tau span must be increasing")

    def velocity(x):
        return congruence_velocity(flow, x)

    try:
        steps = initial_steps
        ts, xs = _rk4_path(velocity, x0, t0, t1, steps)
        for _ in range(max_doublings):
            steps *= 2
            ts2, xs2 = _rk4_path(velocity, x0, t0, t1, steps)
            scale = 1.0 + np.max(np.abs(xs2[-1]))
            if np.max(np.abs(xs2[-1] - xs[-1])) <= tol * scale:
                ts, xs = ts2, xs2
                break
            ts, xs = ts2, xs2
        else:
            raise ToleranceNotMet(f"flow integration did not converge to tol={tol}")
    except _DOMAIN_ERRORS as exc:
        raise LeftDomain(f"flow left its admissible domain: {exc}") from exc

    return Trajectory(ts, xs, meta={
        "lambda_choice": flow.lambda_choice if isinstance(flow.lambda_choice, str) else "custom",
        "future_directed": bool(xs[-1][0] >= xs[0][0]),
        "steps": steps,
    })


def straightness_deviation(traj: Trajectory) -> float:
    """Max normalized distance of the samples from the origin ray.

    The reference direction is the last (largest-radius) sample;
    deviations are divided by each sample's radius, so exact rays give 0
    at any scale.
    """
    if len(traj.taus) < 3:
        raise TooFewSamples("need at least 3 samples")
    last = traj.points[-1]
    norm = float(np.linalg.norm(last))
    if norm == 0.0:
        raise TooFewSamples("degenerate trajectory ending at the origin")
    direction = last / norm
    worst = 0.0
    for p in traj.points:
        radius = float(np.linalg.norm(p))
        if radius == 0.0:
            continue
        offset = p - np.dot(p, direction) * direction
        worst = max(worst, float(np.linalg.norm(offset)) / radius)
    return worst


def interval_slope(traj: Trajectory):
    """Least-squares slope of s = sqrt((x0)^2 - |xv|^2) against x0,
    with the max fit residual; exact rays give slope sqrt(1 - sum C^2)."""
    x0 = traj.points[:, 0]
    q = x0**2 - np.sum(traj.points[:, 1:] ** 2, axis=1)
    if np.any(q < 0.0):
        raise LeftDomain("trajectory left the timelike cone")
    s = np.sqrt(q)
    slope, intercept = np.polyfit(x0, s, 1)
    fit_residual = float(np.max(np.abs(s - (slope * x0 + intercept))))
    return float(slope), fit_residual


def isotropic_time(points: np.ndarray) -> np.ndarray:
    """Berwald-Moore time surrogate x0 = xi1 + xi2 + xi3 + xi4."""
    return np.sum(points, axis=1)


def uniformity_deviation(traj: Trajectory) -> float:
    """Max drift of xi^i / x0 along a Berwald-Moore flow (0 for uniform
    rectilinear motion in the isotropic time)."""
    x0 = isotropic_time(traj.points)
    ratios = traj.points / x0[:, None]
    return float(np.max(np.abs(ratios - ratios[-1])))


def cosmo_trajectory(sol: CosmoSolution, x_start, x0_span, tol: float = 1e-10,
                     initial_steps: int = 64) -> Trajectory:
    """Radial ray of the cosmology: dx^mu/dx0 = phi(gamma r) x^mu / r.

    The direction x^mu / r is conserved; r(x0) matches the 1-d radial
    velocity equation dr/dx0 = phi(gamma r).
    """
    x0 = np.asarray(x_start, dtype=float)
    if x0.shape != (3,):
        raise ValueError("x_start must be the 3 spatial coordinates")

    def velocity(x):
        r = float(np.linalg.norm(x))
        if r == 0.0:
            return np.zeros(3)
        xi = sol.gamma * r
        if xi > sol.xi_end:
            raise OutOfRange(f"gamma*r = {xi} beyond resolved range")
        return sol.phi(xi) * x / r

    t0, t1 = float(x0_span[0]), float(x0_span[1])
    if t1 <= t0:
        raise ValueError("x0 span must be increasing")
    try:
        steps = initial_steps
        ts, xs = _rk4_path(velocity, x0, t0, t1, steps)
        for _ in range(16):
            steps *= 2
            ts2, xs2 = _rk4_path(velocity, x0, t0, t1, steps)
            scale = 1.0 + np.max(np.abs(xs2[-1]))
            if np.max(np.abs(xs2[-1] - xs[-1])) <= tol * scale:
                ts, xs = ts2, xs2
                break
            ts, xs = ts2, xs2
        else:
            raise ToleranceNotMet(f"cosmology ray did not converge to tol={tol}")
    except OutOfRange as exc:
        raise LeftDomain(str(exc)) from exc
    return Trajectory(ts, xs, meta={"kind": "cosmology_ray", "steps": steps})
