"""Scalar field families used as World functions S(x).

Closed-form families expose exact first and second derivatives.
Grid-sampled fields use second-order central differences and are only
differentiable on interior lattice nodes (one-cell boundary layer
excluded).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .errors import BoundaryPoint, DomainError, OutOfRange


def as_point(x, dim: int) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.shape != (dim,):
        raise ValueError(f"expected a point of dimension {dim}, got shape {x.shape}")
    return x


class ScalarField:
    """Interface: value, gradient and Hessian of a scalar field at a point.

    Subclasses with closed forms override all three; the base class
    provides a central-difference Hessian built from the gradient.
    """

    dim: int

    def value(self, x) -> float:
        raise NotImplementedError

    def gradient(self, x) -> np.ndarray:
        raise NotImplementedError

    def hessian(self, x) -> np.ndarray:
        x = as_point(x, self.dim)
        steps = 1e-5 * (1.0 + np.abs(x))
        hess = np.empty((self.dim, self.dim))
        for j in range(self.dim):
            e = np.zeros(self.dim)
            e[j] = steps[j]
            hess[:, j] = (self.gradient(x + e) - self.gradient(x - e)) / (2.0 * steps[j])
        return 0.5 * (hess + hess.T)


@dataclass(frozen=True)
class RadialLog(ScalarField):
    """S = c * ln(r / r0) with r = |x| on Euclidean R^n.

    Stationary point of the radial-reduced action: the flux
    r**(n-1) * |S'|**(n-1) is constant, so the radial field equation is
    satisfied identically for every n >= 2.
    """

    c: float
    r0: float = 1.0
    dim: int = 3

    def __post_init__(self):
        if self.c == 0.0:
            raise ValueError("c must be nonzero")
        if self.r0 <= 0.0:
            raise ValueError("r0 must be positive")
        if self.dim < 2:
            raise ValueError("dim must be >= 2")

    def _radius(self, x) -> float:
        r = float(np.linalg.norm(as_point(x, self.dim)))
        if r <= 0.0:
            raise DomainError("radial log field undefined at the origin")
        return r

    def value(self, x) -> float:
        return self.c * math.log(self._radius(x) / self.r0)

    def gradient(self, x) -> np.ndarray:
        x = as_point(x, self.dim)
        r = self._radius(x)
        return self.c * x / r**2

    def hessian(self, x) -> np.ndarray:
        x = as_point(x, self.dim)
        r2 = self._radius(x) ** 2
        return self.c * (np.eye(self.dim) / r2 - 2.0 * np.outer(x, x) / r2**2)

    def radial_derivative(self, rho: float) -> float:
        return self.c / rho

    def radial_second_derivative(self, rho: float) -> float:
        return -self.c / rho**2


def minkowski_eta(dim: int) -> np.ndarray:
    """Diagonal flat metric with signature (+, -, ..., -)."""
    eta = -np.eye(dim)
    eta[0, 0] = 1.0
    return eta


@dataclass(frozen=True)
class IntervalLog(ScalarField):
    """S = c * ln(s / s0) with s = sqrt((x0)^2 - sum (x_mu)^2).

    Defined inside the timelike cone; the interval-reduced flux
    s**(n-1) * |S'|**(n-1) is constant so the reduced field equation
    holds identically.
    """

    c: float
    s0: float = 1.0
    dim: int = 4

    def __post_init__(self):
        if self.c == 0.0:
            raise ValueError("c must be nonzero")
        if self.s0 <= 0.0:
            raise ValueError("s0 must be positive")
        if self.dim < 2:
            raise ValueError("dim must be >= 2")

    def _q(self, x) -> float:
        x = as_point(x, self.dim)
        q = x[0] ** 2 - float(np.dot(x[1:], x[1:]))
        if q <= 0.0:
            raise DomainError("interval log field defined only where the interval is timelike")
        return q

    def interval(self, x) -> float:
        return math.sqrt(self._q(x))

    def value(self, x) -> float:
        return self.c * math.log(self.interval(x) / self.s0)

    def gradient(self, x) -> np.ndarray:
        x = as_point(x, self.dim)
        q = self._q(x)
        eta_x = x.copy()
        eta_x[1:] *= -1.0
        return self.c * eta_x / q

    def hessian(self, x) -> np.ndarray:
        x = as_point(x, self.dim)
        q = self._q(x)
        eta_x = x.copy()
        eta_x[1:] *= -1.0
        eta_diag = np.full(self.dim, -1.0)
        eta_diag[0] = 1.0
        return self.c * (np.diag(eta_diag) / q - 2.0 * np.outer(eta_x, eta_x) / q**2)

    def radial_derivative(self, rho: float) -> float:
        return self.c / rho

    def radial_second_derivative(self, rho: float) -> float:
        return -self.c / rho**2


@dataclass(frozen=True)
class BerwaldMooreLog(ScalarField):
    """S = amplitude * ln(s / s0) with s = (xi1 xi2 xi3 xi4)^(1/4).

    Lives on the positive orthant of the isotropic basis.  Satisfies
    d/ds (s * dS/ds) = 0 identically.
    """

    amplitude: float
    s0: float = 1.0

    dim = 4

    def __post_init__(self):
        if self.amplitude == 0.0:
            raise ValueError("amplitude must be nonzero")
        if self.s0 <= 0.0:
            raise ValueError("s0 must be positive")

    def _check(self, x) -> np.ndarray:
        x = as_point(x, 4)
        if np.any(x <= 0.0):
            raise DomainError("Berwald-Moore log field requires all coordinates positive")
        return x

    def radius(self, x) -> float:
        x = self._check(x)
        return float(np.prod(x)) ** 0.25

    def value(self, x) -> float:
        x = self._check(x)
        return self.amplitude * (0.25 * float(np.sum(np.log(x))) - math.log(self.s0))

    def gradient(self, x) -> np.ndarray:
        x = self._check(x)
        return self.amplitude / (4.0 * x)

    def hessian(self, x) -> np.ndarray:
        x = self._check(x)
        return np.diag(-self.amplitude / (4.0 * x**2))

    def radial_derivative(self, rho: float) -> float:
        return self.amplitude / rho

    def radial_second_derivative(self, rho: float) -> float:
        return -self.amplitude / rho**2


class CosmoExp(ScalarField):
    """S = amplitude * exp(-gamma * x0) * psi(r) with psi = exp(int_0^(gamma r) phi).

    The radial profile phi comes from a dense-output interpolant (see
    :mod:`finslerlab.cosmology`).  Gradient and Hessian are exact in
    terms of phi and its derivative.
    """

    dim = 4

    def __init__(self, amplitude: float, gamma: float,
                 phi: Callable[[float], float],
                 dphi: Callable[[float], float],
                 phi_integral: Callable[[float], float],
                 xi_max: float):
        if amplitude <= 0.0:
            raise ValueError("amplitude must be positive so the conformal factor stays positive")
        if gamma <= 0.0:
            raise ValueError("gamma must be positive")
        self.amplitude = amplitude
        self.gamma = gamma
        self.phi = phi
        self.dphi = dphi
        self.phi_integral = phi_integral
        self.xi_max = xi_max

    def _split(self, x):
        x = as_point(x, 4)
        r = float(np.linalg.norm(x[1:]))
        xi = self.gamma * r
        if xi > self.xi_max * (1.0 + 1e-12):
            raise OutOfRange(f"gamma*r = {xi} beyond resolved range {self.xi_max}")
        return x, r, xi

    def value(self, x) -> float:
        x, _, xi = self._split(x)
        psi = math.exp(self.phi_integral(xi))
        return self.amplitude * math.exp(-self.gamma * x[0]) * psi

    def gradient(self, x) -> np.ndarray:
        x, r, xi = self._split(x)
        s_val = self.value(x)
        grad = np.empty(4)
        grad[0] = -self.gamma * s_val
        if r == 0.0:
            grad[1:] = 0.0
        else:
            grad[1:] = self.gamma * self.phi(xi) * s_val * x[1:] / r
        return grad

    def hessian(self, x) -> np.ndarray:
        x, r, xi = self._split(x)
        g = self.gamma
        s_val = self.value(x)
        hess = np.empty((4, 4))
        hess[0, 0] = g**2 * s_val
        if r == 0.0:
            hess[0, 1:] = hess[1:, 0] = 0.0
            hess[1:, 1:] = g**2 * s_val * np.eye(3)
            return hess
        phi = self.phi(xi)
        dphi = self.dphi(xi)
        unit = x[1:] / r
        proj = np.outer(unit, unit)
        hess[0, 1:] = hess[1:, 0] = -(g**2) * phi * s_val * unit
        hess[1:, 1:] = (g**2 * s_val * (dphi + phi**2) * proj
                        + g * phi * s_val * (np.eye(3) - proj) / r)
        return hess


class GridSampled(ScalarField):
    """Field known only on a uniform lattice.

    Derivatives are second-order central differences and exist only on
    interior nodes; querying the one-cell boundary layer raises
    :class:`BoundaryPoint`.  Points must coincide with lattice nodes.
    """

    def __init__(self, origin, spacing, values: np.ndarray):
        self.values = np.asarray(values, dtype=float)
        self.dim = self.values.ndim
        self.origin = as_point(origin, self.dim)
        spacing = np.asarray(spacing, dtype=float)
        if spacing.ndim == 0:
            spacing = np.full(self.dim, float(spacing))
        if spacing.shape != (self.dim,) or np.any(spacing <= 0.0):
            raise ValueError("spacing must be a positive scalar or per-axis vector")
        self.spacing = spacing
        if min(self.values.shape) < 3:
            raise ValueError("need at least 3 nodes per axis for central differences")

    @classmethod
    def from_function(cls, fn, origin, spacing, shape) -> "GridSampled":
        origin = np.asarray(origin, dtype=float)
        spacing_arr = np.asarray(spacing, dtype=float)
        if spacing_arr.ndim == 0:
            spacing_arr = np.full(len(shape), float(spacing_arr))
        axes = [origin[k] + spacing_arr[k] * np.arange(shape[k]) for k in range(len(shape))]
        mesh = np.meshgrid(*axes, indexing="ij")
        values = fn(*mesh)
        return cls(origin, spacing_arr, values)

    def axis_coordinates(self, axis: int) -> np.ndarray:
        return self.origin[axis] + self.spacing[axis] * np.arange(self.values.shape[axis])

    def node_index(self, x) -> tuple:
        x = as_point(x, self.dim)
        rel = (x - self.origin) / self.spacing
        idx = np.rint(rel).astype(int)
        if np.max(np.abs(rel - idx)) > 1e-8:
            raise DomainError("point does not coincide with a lattice node")
        if np.any(idx < 0) or np.any(idx >= self.values.shape):
            raise DomainError("point outside the lattice")
        return tuple(int(i) for i in idx)

    def _interior_index(self, x) -> tuple:
        idx = self.node_index(x)
        for k, i in enumerate(idx):
            if i < 1 or i > self.values.shape[k] - 2:
                raise BoundaryPoint("derivatives unavailable in the boundary layer")
        return idx

    def value(self, x) -> float:
        return float(self.values[self.node_index(x)])

    def gradient(self, x) -> np.ndarray:
        idx = self._interior_index(x)
        grad = np.empty(self.dim)
        for k in range(self.dim):
            up = list(idx)
            dn = list(idx)
            up[k] += 1
            dn[k] -= 1
            grad[k] = (self.values[tuple(up)] - self.values[tuple(dn)]) / (2.0 * self.spacing[k])
        return grad

    def hessian(self, x) -> np.ndarray:
        idx = self._interior_index(x)
        hess = np.empty((self.dim, self.dim))
        v0 = self.values[idx]
        for k in range(self.dim):
            up = list(idx)
            dn = list(idx)
            up[k] += 1
            dn[k] -= 1
            hess[k, k] = (self.values[tuple(up)] - 2.0 * v0 + self.values[tuple(dn)]) / self.spacing[k] ** 2
        for k in range(self.dim):
            for l in range(k + 1, self.dim):
                pp = list(idx)
                pm = list(idx)
                mp = list(idx)
                mm = list(idx)
                pp[k] += 1; pp[l] += 1
                pm[k] += 1; pm[l] -= 1
                mp[k] -= 1; mp[l] += 1
                mm[k] -= 1; mm[l] -= 1
                hess[k, l] = hess[l, k] = (
                    self.values[tuple(pp)] - self.values[tuple(pm)]
                    - self.values[tuple(mp)] + self.values[tuple(mm)]
                ) / (4.0 * self.spacing[k] * self.spacing[l])
        return hess


class CustomField(ScalarField):
    """Wrap plain callables as a field; missing derivatives fall back to
    central differences."""

    def __init__(self, fn: Callable, dim: int,
                 grad: Optional[Callable] = None,
                 hess: Optional[Callable] = None):
        self.fn = fn
        self.dim = dim
        self._grad = grad
        self._hess = hess

    def value(self, x) -> float:
        return float(self.fn(as_point(x, self.dim)))

    def gradient(self, x) -> np.ndarray:
        x = as_point(x, self.dim)
        if self._grad is not None:
            return np.asarray(self._grad(x), dtype=float)
        steps = 1e-6 * (1.0 + np.abs(x))
        grad = np.empty(self.dim)
        for k in range(self.dim):
            e = np.zeros(self.dim)
            e[k] = steps[k]
            grad[k] = (self.fn(x + e) - self.fn(x - e)) / (2.0 * steps[k])
        return grad

    def hessian(self, x) -> np.ndarray:
        x = as_point(x, self.dim)
        if self._hess is not None:
            return np.asarray(self._hess(x), dtype=float)
        if self._grad is not None:
            return super().hessian(x)
        steps = 1e-4 * (1.0 + np.abs(x))
        hess = np.empty((self.dim, self.dim))
        f0 = self.fn(x)
        for k in range(self.dim):
            ek = np.zeros(self.dim)
            ek[k] = steps[k]
            hess[k, k] = (self.fn(x + ek) - 2.0 * f0 + self.fn(x - ek)) / steps[k] ** 2
            for l in range(k + 1, self.dim):
                el = np.zeros(self.dim)
                el[l] = steps[l]
                hess[k, l] = hess[l, k] = (
                    self.fn(x + ek + el) - self.fn(x + ek - el)
                    - self.fn(x - ek + el) + self.fn(x - ek - el)
                ) / (4.0 * steps[k] * steps[l])
        return hess


def coordinate_field(index: int, dim: int) -> CustomField:
    """The coordinate function x^index as a field (exact derivatives)."""
    unit = np.zeros(dim)
    unit[index] = 1.0
    return CustomField(
        lambda x: float(x[index]),
        dim,
        grad=lambda x: unit.copy(),
        hess=lambda x: np.zeros((dim, dim)),
    )
