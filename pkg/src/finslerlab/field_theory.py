"""Lagrangian densities of gradient power type and their field equations.

Densities handled here (constant prefactors suppressed throughout, they
drop out of the field equations):

* Euclidean power:      L = (sum_i (d_i S)^2)^(n/2)
* pseudo power:         L = ((d_0 S)^2 - sum_mu (d_mu S)^2)^(n/2)
* spherical reduced:    L = r^2 * ((d_0 S)^2 - (d_r S)^2)^2   on (x0, r)
* radial reduced:       L = rho^(n-1) * |S'(rho)|^n
* Berwald-Moore:        L = prod_i d_i S, radial form s^3 * (S')^4

The Euler-Lagrange equation is the vanishing divergence of the flux
F_k = dL/d(d_k S) (again with the constant prefactor dropped).  On
lattices the divergence is discretized conservatively: fluxes live at
half-steps (compact difference along the face axis, averaged central
differences transversally) and the residual is their divergence, which
is second-order accurate on interior nodes.  |S'|^(n-1) factors are
implemented as sign(S') * |S'|^(n-1) so the flux is the actual
derivative of |S'|^n.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence, Union

import numpy as np

from .errors import (
    BoundaryPoint,
    GridTooSmall,
    NegativeBase,
    NonpositiveRadius,
)
from .fields import (
    BerwaldMooreLog,
    GridSampled,
    IntervalLog,
    RadialLog,
    ScalarField,
    as_point,
)

EUCLIDEAN_POWER = "euclidean_power"
PSEUDO_POWER = "pseudo_power"
SPHERICAL_REDUCED = "spherical_reduced"
RADIAL_REDUCED = "radial_reduced"
BM_PRODUCT = "berwald_moore_product"
BM_RADIAL = "berwald_moore_radial"


@dataclass(frozen=True)
class LagrangianForm:
    kind: str
    n: int

    @staticmethod
    def euclidean_power(n: int) -> "LagrangianForm":
        if n < 2:
            raise ValueError("n must be >= 2")
        return LagrangianForm(EUCLIDEAN_POWER, n)

    @staticmethod
    def pseudo_power(n: int) -> "LagrangianForm":
        if n < 2:
            raise ValueError("n must be >= 2")
        return LagrangianForm(PSEUDO_POWER, n)

    @staticmethod
    def spherical_reduced() -> "LagrangianForm":
        return LagrangianForm(SPHERICAL_REDUCED, 4)

    @staticmethod
    def radial_reduced(n: int) -> "LagrangianForm":
        if n < 2:
            raise ValueError("n must be >= 2")
        return LagrangianForm(RADIAL_REDUCED, n)

    @staticmethod
    def berwald_moore_product() -> "LagrangianForm":
        return LagrangianForm(BM_PRODUCT, 4)

    @staticmethod
    def berwald_moore_radial() -> "LagrangianForm":
        return LagrangianForm(BM_RADIAL, 4)

    @property
    def degree(self) -> int:
        """Homogeneity degree of the density in the gradient."""
        return self.n


def _power(base, exponent_num: int, exponent_den: int = 2):
    """base ** (num/den) keeping integer powers exact for negative bases."""
    if exponent_num % exponent_den == 0:
        return base ** (exponent_num // exponent_den)
    if np.any(np.asarray(base) < 0.0):
        raise NegativeBase("half-integer power of a negative quadratic form")
    return base ** (exponent_num / exponent_den)


def lagrangian_density(form: LagrangianForm, grad, position: Optional[float] = None) -> float:
    """Density value for a gradient (or radial derivative) sample.

    Radial and spherical forms need the radial coordinate through
    ``position``.
    """
    if form.kind == EUCLIDEAN_POWER:
        g = np.asarray(grad, dtype=float)
        return float(_power(float(np.dot(g, g)), form.n))
    if form.kind == PSEUDO_POWER:
        g = np.asarray(grad, dtype=float)
        q = float(g[0] ** 2 - np.dot(g[1:], g[1:]))
        return float(_power(q, form.n))
    if form.kind == SPHERICAL_REDUCED:
        if position is None:
            raise ValueError("spherical form needs the radius as position")
        g = np.asarray(grad, dtype=float)
        q = float(g[0] ** 2 - g[1] ** 2)
        return position**2 * q**2
    if form.kind == RADIAL_REDUCED:
        if position is None:
            raise ValueError("radial form needs rho as position")
        if position <= 0.0:
            raise NonpositiveRadius("rho must be positive")
        return position ** (form.n - 1) * abs(float(grad)) ** form.n
    if form.kind == BM_PRODUCT:
        g = np.asarray(grad, dtype=float)
        return float(np.prod(g))
    if form.kind == BM_RADIAL:
        if position is None:
            raise ValueError("Berwald-Moore radial form needs s as position")
        if position <= 0.0:
            raise NonpositiveRadius("s must be positive")
        return position**3 * float(grad) ** 4
    raise ValueError(f"unknown form {form.kind}")


# ---------------------------------------------------------------------------
# flux F_k = dL/d(d_k S), constant prefactor dropped
# ---------------------------------------------------------------------------

def _flux_components(form: LagrangianForm, comps: Sequence[np.ndarray],
                     radius: Optional[np.ndarray] = None) -> list:
    """Vectorized flux components from gradient-component arrays."""
    if form.kind == EUCLIDEAN_POWER:
        q = sum(c * c for c in comps)
        factor = _power(q, form.n - 2)
        return [c * factor for c in comps]
    if form.kind == PSEUDO_POWER:
        q = comps[0] * comps[0] - sum(c * c for c in comps[1:])
        factor = _power(q, form.n - 2)
        return [comps[0] * factor] + [-c * factor for c in comps[1:]]
    if form.kind == SPHERICAL_REDUCED:
        q = comps[0] * comps[0] - comps[1] * comps[1]
        w = radius * radius
        return [w * comps[0] * q, -w * comps[1] * q]
    if form.kind == BM_PRODUCT:
        fluxes = []
        for i in range(4):
            prod = None
            for j in range(4):
                if j == i:
                    continue
                prod = comps[j] if prod is None else prod * comps[j]
            fluxes.append(prod)
        return fluxes
    raise ValueError(f"no lattice flux for form {form.kind}")


def flux_vector(form: LagrangianForm, field: ScalarField, x) -> np.ndarray:
    """Pointwise flux from a field's analytic gradient."""
    grad = field.gradient(x)
    comps = [np.asarray(g) for g in grad]
    if form.kind == SPHERICAL_REDUCED:
        raise ValueError("spherical flux needs lattice coordinates; use the grid residual")
    return np.array([float(f) for f in _flux_components(form, comps)])


@dataclass(frozen=True)
class ResidualLattice:
    """Field-equation residual on interior lattice nodes."""

    values: np.ndarray
    max_norm: float
    l2_norm: float


def _face_gradients(values: np.ndarray, spacing: np.ndarray, axis: int):
    """Gradient components on the faces normal to ``axis``.

    The along-axis component is the compact two-point difference; the
    transverse components average the nodal central differences of the
    two nodes sharing the face.  Entries are valid wherever the
    transverse index is away from the lattice edge, which covers every
    face adjacent to an interior node.
    """
    dim = values.ndim
    comps = []
    lo = [slice(None)] * dim
    hi = [slice(None)] * dim
    lo[axis] = slice(None, -1)
    hi[axis] = slice(1, None)
    lo, hi = tuple(lo), tuple(hi)
    for j in range(dim):
        if j == axis:
            comps.append((values[hi] - values[lo]) / spacing[axis])
        else:
            central = np.gradient(values, spacing[j], axis=j)
            comps.append(0.5 * (central[lo] + central[hi]))
    return comps


def _interior(arr: np.ndarray) -> np.ndarray:
    return arr[tuple(slice(1, -1) for _ in range(arr.ndim))]


def grid_euler_lagrange_residual(form: LagrangianForm, grid: GridSampled) -> ResidualLattice:
    """Divergence-form residual sum_k d_k F_k on interior nodes.

    Vanishes to round-off for lattice-exact solutions (affine fields,
    eikonal fields in the pseudo case, fields missing a Berwald-Moore
    coordinate) and converges at O(h^2) for smooth solutions.
    """
    values = grid.values
    spacing = grid.spacing
    dim = values.ndim
    if form.kind in (EUCLIDEAN_POWER, PSEUDO_POWER) and dim != form.n:
        raise ValueError(f"{form.kind} with n={form.n} needs a {form.n}-d lattice")
    if form.kind == BM_PRODUCT and dim != 4:
        raise ValueError("Berwald-Moore product form needs a 4-d lattice")
    if form.kind == SPHERICAL_REDUCED and dim != 2:
        raise ValueError("spherical form needs a 2-d (x0, r) lattice")
    if form.kind in (RADIAL_REDUCED, BM_RADIAL):
        raise ValueError("use radial_residual for one-dimensional reduced forms")
    if min(values.shape) < 5:
        raise GridTooSmall("need at least 5 nodes per axis")

    divergence = np.zeros(tuple(s - 2 for s in values.shape))
    for axis in range(dim):
        comps = _face_gradients(values, spacing, axis)
        radius = None
        if form.kind == SPHERICAL_REDUCED:
            r_nodes = grid.axis_coordinates(1)
            if axis == 1:
                r_face = 0.5 * (r_nodes[:-1] + r_nodes[1:])
            else:
                r_face = r_nodes
            shape = [1, 1]
            shape[1] = len(r_face)
            radius = r_face.reshape(shape)
        flux = _flux_components(form, comps, radius=radius)[axis]
        take_hi = [slice(1, -1)] * dim
        take_lo = [slice(1, -1)] * dim
        take_hi[axis] = slice(1, None)
        take_lo[axis] = slice(None, -1)
        divergence += (flux[tuple(take_hi)] - flux[tuple(take_lo)]) / spacing[axis]
    return ResidualLattice(
        values=divergence,
        max_norm=float(np.max(np.abs(divergence))),
        l2_norm=float(np.sqrt(np.mean(divergence**2))),
    )


def divergence_residual(form: LagrangianForm, field: ScalarField, x, step: float = 1e-3) -> float:
    """Pointwise residual as the numerical divergence of the analytic
    flux (one of the two cross-checking evaluation routes).

    Uses fourth-order five-point differences so the truncation error
    stays below the 1e-9 cross-route agreement target.
    """
    x = as_point(x, field.dim)
    total = 0.0
    for k in range(field.dim):
        h = step * (1.0 + abs(x[k]))
        e = np.zeros(field.dim)
        e[k] = h
        f_pp = flux_vector(form, field, x + 2.0 * e)[k]
        f_p = flux_vector(form, field, x + e)[k]
        f_m = flux_vector(form, field, x - e)[k]
        f_mm = flux_vector(form, field, x - 2.0 * e)[k]
        total += (-f_pp + 8.0 * f_p - 8.0 * f_m + f_mm) / (12.0 * h)
    return total


def expanded_residual(form: LagrangianForm, field: ScalarField, x) -> float:
    """Pointwise residual with the divergence expanded through the
    Hessian (the second cross-checking route; exact for closed forms)."""
    x = as_point(x, field.dim)
    g = field.gradient(x)
    hess = field.hessian(x)
    if form.kind == EUCLIDEAN_POWER:
        q = float(np.dot(g, g))
        if form.n == 2:
            return float(np.trace(hess))
        p = (form.n - 2) / 2.0
        qp = _power(q, form.n - 2)
        qpm1 = _power(q, form.n - 4)
        dq = 2.0 * hess @ g
        return float(np.trace(hess) * qp + p * qpm1 * np.dot(g, dq))
    if form.kind == PSEUDO_POWER:
        eta = np.full(field.dim, -1.0)
        eta[0] = 1.0
        q = float(np.dot(eta * g, g))
        box = float(np.dot(eta, np.diag(hess)))
        if form.n == 2:
            return box
        p = (form.n - 2) / 2.0
        qp = _power(q, form.n - 2)
        qpm1 = _power(q, form.n - 4)
        dq = 2.0 * hess @ (eta * g)
        return float(box * qp + p * qpm1 * np.dot(eta * g, dq))
    if form.kind == BM_PRODUCT:
        total = 0.0
        for i in range(4):
            for j in range(4):
                if j == i:
                    continue
                prod = 1.0
                for l in range(4):
                    if l in (i, j):
                        continue
                    prod *= g[l]
                total += hess[j, i] * prod
        return total
    raise ValueError(f"no expanded residual for form {form.kind}")


# ---------------------------------------------------------------------------
# reduced one-dimensional field equations
# ---------------------------------------------------------------------------

RadialFamily = Union[RadialLog, IntervalLog, BerwaldMooreLog, Callable[[float], float]]


def radial_residual(family: RadialFamily, n: int, rho: float,
                    dfamily: Optional[Callable[[float], float]] = None,
                    step: float = 1e-5) -> float:
    """Residual of the reduced radial field equation at rho > 0.

    For the power families this is d/drho [rho^(n-1) sign(S') |S'|^(n-1)],
    evaluated analytically for the closed-form log fields and by central
    differencing of the flux for a custom callable S(rho).  The
    Berwald-Moore family uses its own reduced equation d/ds (s * S') = 0.
    """
    if rho <= 0.0:
        raise NonpositiveRadius("rho must be positive")
    if isinstance(family, BerwaldMooreLog):
        s1 = family.radial_derivative(rho)
        s2 = family.radial_second_derivative(rho)
        return s1 + rho * s2
    if isinstance(family, (RadialLog, IntervalLog)):
        s1 = family.radial_derivative(rho)
        s2 = family.radial_second_derivative(rho)
        lead = (n - 1) * rho ** (n - 2) * math.copysign(abs(s1) ** (n - 1), s1)
        chain = rho ** (n - 1) * (n - 1) * abs(s1) ** (n - 2) * s2
        return lead + chain
    if not callable(family):
        raise TypeError("family must be a log field or a callable S(rho)")

    # outer step larger than the inner one so that inner round-off does
    # not get amplified by the outer division
    h_outer = min(40.0 * step * (1.0 + rho), rho / 8.0)
    h_inner = h_outer / 4.0

    def s_prime(r):
        if dfamily is not None:
            return dfamily(r)
        return (family(r + h_inner) - family(r - h_inner)) / (2.0 * h_inner)

    def flux(r):
        d = s_prime(r)
        return r ** (n - 1) * math.copysign(abs(d) ** (n - 1), d)

    return (-flux(rho + 2.0 * h_outer) + 8.0 * flux(rho + h_outer)
            - 8.0 * flux(rho - h_outer) + flux(rho - 2.0 * h_outer)) / (12.0 * h_outer)


# ---------------------------------------------------------------------------
# two-dimensional degenerations
# ---------------------------------------------------------------------------

def two_dim_degeneration_check(grid: GridSampled, kind: str) -> dict:
    """Linear (Laplace or wave) residual next to the full nonlinear one.

    In two dimensions the gradient-power density has exponent one, so
    the nonlinear Euler-Lagrange residual of a solution vanishes exactly
    when the linear residual does; both are returned for comparison.
    """
    if grid.dim != 2:
        raise ValueError("degeneration check needs a 2-d lattice")
    if min(grid.values.shape) < 5:
        raise GridTooSmall("need at least 5 nodes per axis")
    v = grid.values
    h0, h1 = grid.spacing
    d00 = (v[2:, 1:-1] - 2.0 * v[1:-1, 1:-1] + v[:-2, 1:-1]) / h0**2
    d11 = (v[1:-1, 2:] - 2.0 * v[1:-1, 1:-1] + v[1:-1, :-2]) / h1**2
    if kind == "laplace":
        linear = d00 + d11
        form = LagrangianForm.euclidean_power(2)
    elif kind == "wave":
        linear = d00 - d11
        form = LagrangianForm.pseudo_power(2)
    else:
        raise ValueError("kind must be 'laplace' or 'wave'")
    nonlinear = grid_euler_lagrange_residual(form, grid)
    return {
        "linear": ResidualLattice(linear, float(np.max(np.abs(linear))),
                                  float(np.sqrt(np.mean(linear**2)))),
        "nonlinear": nonlinear,
    }


def eikonal_residual(field: ScalarField, x) -> float:
    """Pseudo-Euclidean gradient form (d_0 S)^2 - sum (d_mu S)^2.

    Zero for eikonal fields; such fields automatically solve the n = 4
    pseudo field equation, and a constant value marks the wave-equation
    reduction.
    """
    g = field.gradient(x)
    return float(g[0] ** 2 - np.dot(g[1:], g[1:]))


# ---------------------------------------------------------------------------
# metrics assembled from scalar fields
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MetricAssembly:
    """g_ij = sum_a eps_a d_i f_a d_j f_a from N scalar fields and signs."""

    fields: tuple
    signs: tuple

    def __post_init__(self):
        if len(self.fields) == 0:
            raise ValueError("need at least one field")
        if len(self.fields) != len(self.signs):
            raise ValueError("one sign per field")
        if any(s not in (-1, 1) for s in self.signs):
            raise ValueError("signs must be +1 or -1")


def assemble_metric(assembly: MetricAssembly, x):
    """Assembled metric and its determinant at a point.

    Rank is at most the number of fields, so the determinant vanishes
    whenever fewer fields than dimensions are supplied.
    """
    dim = assembly.fields[0].dim
    g = np.zeros((dim, dim))
    for field, sign in zip(assembly.fields, assembly.signs):
        grad = field.gradient(x)
        g += sign * np.outer(grad, grad)
    return g, float(np.linalg.det(g))
