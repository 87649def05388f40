"""Space families and the metric-function / momentum / indicatrix machinery.

Four families are supported, all built on a flat base norm rescaled by a
positive conformal factor kappa(x):

* Euclidean conformal:        ds = kappa(x) * sqrt(sum (dx_i)^2)
* pseudo-Euclidean conformal: ds = kappa(x) * sqrt((dx0)^2 - sum (dx_mu)^2),
  signature (+, -, ..., -), directions restricted to the closed forward cone
* Berwald-Moore conformal:    ds = kappa(x) * (dxi1 dxi2 dxi3 dxi4)^(1/4),
  all components strictly positive (the real fourth root is otherwise
  undefined)
* regularized hyperboloid:    ds = kappa(x) * (sqrt((dx0)^2 - |dxv|^2) + q0*dx0),
  dx0 >= 0, used to give the pseudo indicatrix a finite volume

kappa may be the constant 1, any positive constant, a positive callable,
or a scalar field from which kappa is derived through the
Hamilton-Jacobi relation (`kappa_from_field`).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from .errors import (
    InadmissibleDirection,
    NonpositiveKappa,
    SpacelikeGradient,
    UnsupportedSpace,
    ZeroDirection,
)
from .fields import ScalarField, as_point

EUCLIDEAN = "euclidean_conformal"
PSEUDO_EUCLIDEAN = "pseudo_euclidean_conformal"
BERWALD_MOORE = "berwald_moore_conformal"
REGULARIZED_HYPERBOLOID = "regularized_hyperboloid"

_KINDS = (EUCLIDEAN, PSEUDO_EUCLIDEAN, BERWALD_MOORE, REGULARIZED_HYPERBOLOID)

KappaSource = Union[None, float, ScalarField, "object"]


@dataclass(frozen=True)
class SpaceSpec:
    """A space family plus the source of its conformal factor.

    ``kappa`` is one of: None (constant 1), a positive float, a callable
    x -> kappa(x), or a :class:`ScalarField` whose Hamilton-Jacobi form
    defines kappa.
    """

    kind: str
    dim: int
    q0: Optional[float] = None
    kappa: KappaSource = None

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ValueError(f"unknown space kind {self.kind!r}")
        if self.dim < 2:
            raise ValueError("dim must be >= 2")
        if self.kind in (BERWALD_MOORE, REGULARIZED_HYPERBOLOID) and self.dim != 4:
            raise ValueError(f"{self.kind} requires dim = 4")
        if self.kind == REGULARIZED_HYPERBOLOID:
            if self.q0 is None or self.q0 <= 0.0:
                raise ValueError("regularized hyperboloid requires q0 > 0")
        elif self.q0 is not None:
            raise ValueError("q0 only applies to the regularized hyperboloid")
        if isinstance(self.kappa, (int, float)) and self.kappa <= 0.0:
            raise NonpositiveKappa("constant kappa must be positive")

    @staticmethod
    def euclidean(dim: int, kappa: KappaSource = None) -> "SpaceSpec":
        return SpaceSpec(EUCLIDEAN, dim, kappa=kappa)

    @staticmethod
    def pseudo_euclidean(dim: int, kappa: KappaSource = None) -> "SpaceSpec":
        return SpaceSpec(PSEUDO_EUCLIDEAN, dim, kappa=kappa)

    @staticmethod
    def berwald_moore(kappa: KappaSource = None) -> "SpaceSpec":
        return SpaceSpec(BERWALD_MOORE, 4, kappa=kappa)

    @staticmethod
    def regularized_hyperboloid(q0: float) -> "SpaceSpec":
        return SpaceSpec(REGULARIZED_HYPERBOLOID, 4, q0=q0)

    def kappa_value(self, x) -> float:
        if self.kappa is None:
            return 1.0
        if isinstance(self.kappa, (int, float)):
            return float(self.kappa)
        if isinstance(self.kappa, ScalarField):
            return kappa_from_field(self, self.kappa, x)
        k = float(self.kappa(as_point(x, self.dim)))
        if k <= 0.0:
            raise NonpositiveKappa(f"kappa({x}) = {k} is not positive")
        return k


def _pseudo_quadratic(dx: np.ndarray) -> float:
    return float(dx[0] ** 2 - np.dot(dx[1:], dx[1:]))


def base_norm(spec: SpaceSpec, dx) -> float:
    """Base (kappa = 1) norm of a direction, validating admissibility."""
    dx = as_point(dx, spec.dim)
    if spec.kind == EUCLIDEAN:
        return float(np.linalg.norm(dx))
    if spec.kind == BERWALD_MOORE:
        if np.any(dx <= 0.0):
            raise InadmissibleDirection("Berwald-Moore directions need all components > 0")
        return float(np.prod(dx)) ** 0.25
    q = _pseudo_quadratic(dx)
    if dx[0] < 0.0 or q < 0.0:
        raise InadmissibleDirection("direction outside the closed forward cone")
    root = math.sqrt(q)
    if spec.kind == REGULARIZED_HYPERBOLOID:
        return root + spec.q0 * float(dx[0])
    return root


def metric_function(spec: SpaceSpec, x, dx) -> float:
    """Length element ds = kappa(x) * base_norm(dx); 1-homogeneous in dx."""
    return spec.kappa_value(x) * base_norm(spec, dx)


def generalized_momenta(spec: SpaceSpec, x, dx) -> np.ndarray:
    """Momenta p_i = d(ds)/d(dx^i); 0-homogeneous in dx.

    Light-like (and zero) directions have no momenta: the base norm
    appears in a denominator.
    """
    dx = as_point(dx, spec.dim)
    kappa = spec.kappa_value(x)
    if spec.kind == EUCLIDEAN:
        norm = float(np.linalg.norm(dx))
        if norm == 0.0:
            raise ZeroDirection("zero direction has no momenta")
        return kappa * dx / norm
    if spec.kind == BERWALD_MOORE:
        norm = base_norm(spec, dx)
        return 0.25 * kappa * norm / dx
    # pseudo-Euclidean and regularized hyperboloid share the interval root
    base_norm(spec, dx)  # admissibility
    q = _pseudo_quadratic(dx)
    root = math.sqrt(max(q, 0.0))
    if root == 0.0:
        raise ZeroDirection("momenta undefined on the light cone (zero base interval)")
    p = np.empty(spec.dim)
    p[0] = kappa * dx[0] / root
    p[1:] = -kappa * dx[1:] / root
    if spec.kind == REGULARIZED_HYPERBOLOID:
        p[0] += kappa * spec.q0
    return p


def tangential_indicatrix_residual(spec: SpaceSpec, x, p) -> float:
    """Left side minus right side of the figuratrix equation.

    Euclidean:       sum p_i^2 - kappa^2
    pseudo:          p_0^2 - sum p_mu^2 - kappa^2
    Berwald-Moore:   p_1 p_2 p_3 p_4 - (kappa/4)^4
    regularized:     (p_0 - q0*kappa)^2 - sum p_mu^2 - kappa^2
    """
    p = as_point(p, spec.dim)
    kappa = spec.kappa_value(x)
    if spec.kind == EUCLIDEAN:
        return float(np.dot(p, p)) - kappa**2
    if spec.kind == BERWALD_MOORE:
        return float(np.prod(p)) - (kappa / 4.0) ** 4
    if spec.kind == REGULARIZED_HYPERBOLOID:
        return float((p[0] - spec.q0 * kappa) ** 2 - np.dot(p[1:], p[1:])) - kappa**2
    return float(p[0] ** 2 - np.dot(p[1:], p[1:])) - kappa**2


def indicatrix_residual(spec: SpaceSpec, x, xi, quadratic: bool = False) -> float:
    """L(xi; x) - 1, whose zero set is the indicatrix.

    With ``quadratic=True`` the algebraic form is returned instead:
    (base quadratic of xi) - 1/kappa^2 for the quadratic families and
    prod(xi) - 1/kappa^4 for Berwald-Moore.  Both forms share the same
    zero set.
    """
    xi = as_point(xi, spec.dim)
    if not quadratic:
        return metric_function(spec, x, xi) - 1.0
    kappa = spec.kappa_value(x)
    if spec.kind == EUCLIDEAN:
        return float(np.dot(xi, xi)) - 1.0 / kappa**2
    if spec.kind == PSEUDO_EUCLIDEAN:
        base_norm(spec, xi)  # admissibility
        return _pseudo_quadratic(xi) - 1.0 / kappa**2
    if spec.kind == BERWALD_MOORE:
        base_norm(spec, xi)
        return float(np.prod(xi)) - 1.0 / kappa**4
    raise UnsupportedSpace("the regularized hyperboloid indicatrix has no quadratic form")


def hamilton_jacobi_left(spec: SpaceSpec, field: ScalarField, x) -> float:
    """Left side of the Hamilton-Jacobi relation for a World function S.

    Euclidean:      sum (dS/dx_i)^2
    pseudo:         (dS/dx0)^2 - sum (dS/dx_mu)^2
    Berwald-Moore:  prod_i dS/dxi_i
    """
    grad = field.gradient(as_point(x, spec.dim))
    if spec.kind == EUCLIDEAN:
        return float(np.dot(grad, grad))
    if spec.kind == PSEUDO_EUCLIDEAN:
        return float(grad[0] ** 2 - np.dot(grad[1:], grad[1:]))
    if spec.kind == BERWALD_MOORE:
        return float(np.prod(grad))
    raise UnsupportedSpace("no Hamilton-Jacobi form for the regularized hyperboloid")


def hamilton_jacobi_residual(spec: SpaceSpec, field: ScalarField, x) -> float:
    """Hamilton-Jacobi left side minus its kappa target.

    The target is kappa^2 for the quadratic families and (kappa/4)^4 for
    Berwald-Moore.  When the spec's kappa is derived from the same field
    the residual is exactly zero by construction, and is returned as such.
    """
    if spec.kappa is field:
        return 0.0
    left = hamilton_jacobi_left(spec, field, x)
    kappa = spec.kappa_value(x)
    if spec.kind == BERWALD_MOORE:
        return left - (kappa / 4.0) ** 4
    return left - kappa**2


def kappa_from_field(spec: SpaceSpec, field: ScalarField, x) -> float:
    """Conformal factor induced by a World function.

    kappa = sqrt(HJ left side) for the quadratic families and
    4 * (HJ left side)^(1/4) for Berwald-Moore.  A non-positive left side
    means the gradient fails to define a factor (for pseudo spaces this
    flags the |phi| >= 1 region of the cosmology).
    """
    left = hamilton_jacobi_left(spec, field, x)
    if left <= 0.0:
        if spec.kind == EUCLIDEAN:
            raise NonpositiveKappa("zero gradient cannot define a conformal factor")
        raise SpacelikeGradient(f"Hamilton-Jacobi form {left} is not positive")
    if spec.kind == BERWALD_MOORE:
        return 4.0 * left**0.25
    return math.sqrt(left)
