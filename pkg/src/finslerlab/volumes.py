"""Indicatrix volumes and the reciprocal-volume Lagrangian density.

The volume of the indicatrix is computed as if the tangent space were
Euclidean.  Conformal rescaling of the metric function by kappa scales
the indicatrix by 1/kappa, hence its volume by kappa^(-n); all
suppressed normalization constants are fixed so that kappa = 1 gives the
plain unit-ball volume (Euclidean family) or 1 (pseudo and
Berwald-Moore families).

For the unregularized pseudo families the Euclidean volume of the
indicatrix (a hyperboloid) is infinite; that case is reported with an
explicit infinity rather than an error.  The regularized hyperboloid
family makes the volume finite for every q0 > 0 and grows without bound
as q0 -> 0+.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InfiniteVolume, NonpositiveQ0, NotPositiveDefinite
from .spaces import (
    BERWALD_MOORE,
    EUCLIDEAN,
    PSEUDO_EUCLIDEAN,
    REGULARIZED_HYPERBOLOID,
    SpaceSpec,
)

CLOSED_FORM = "closed_form"
SCALING_LAW = "scaling_law"
QUADRATURE = "quadrature"


@dataclass(frozen=True)
class VolumeResult:
    value: float
    method: str
    error_estimate: float = 0.0

    @property
    def is_finite(self) -> bool:
        return math.isfinite(self.value)


def unit_ball_volume(n: int) -> float:
    """Volume of the unit n-ball, pi^(n/2) / Gamma(n/2 + 1)."""
    return math.pi ** (n / 2.0) / math.gamma(n / 2.0 + 1.0)


def ellipsoid_volume(g) -> VolumeResult:
    """Volume of the ellipsoid {xi : xi^T g xi = 1} for SPD g.

    Equals unit_ball_volume(n) / sqrt(det g); the determinant is taken
    from a Cholesky factor, which doubles as the definiteness check.
    """
    g = np.asarray(g, dtype=float)
    if g.ndim != 2 or g.shape[0] != g.shape[1]:
        raise ValueError("g must be a square matrix")
    scale = float(np.max(np.abs(g))) or 1.0
    if np.max(np.abs(g - g.T)) > 1e-12 * scale:
        raise NotPositiveDefinite("matrix is not symmetric")
    try:
        chol = np.linalg.cholesky(g)
    except np.linalg.LinAlgError as exc:
        raise NotPositiveDefinite("matrix is not positive definite") from exc
    sqrt_det = float(np.prod(np.diag(chol)))
    n = g.shape[0]
    return VolumeResult(unit_ball_volume(n) / sqrt_det, CLOSED_FORM, 0.0)


def base_indicatrix_volume(spec: SpaceSpec) -> VolumeResult:
    """Indicatrix volume of the family at kappa = 1 (the normalization)."""
    if spec.kind == EUCLIDEAN:
        return VolumeResult(unit_ball_volume(spec.dim), CLOSED_FORM, 0.0)
    if spec.kind in (PSEUDO_EUCLIDEAN, BERWALD_MOORE):
        return VolumeResult(1.0, CLOSED_FORM, 0.0)
    return regularized_hyperboloid_volume(spec.q0)


def conformal_indicatrix_volume(spec: SpaceSpec, x, regularized: bool = True) -> VolumeResult:
    """Indicatrix volume at a point: V(x) = V_base / kappa(x)^n.

    With ``regularized=False`` the pseudo-Euclidean and Berwald-Moore
    families report the raw Euclidean volume of their unbounded
    indicatrix, which is infinite.
    """
    if not regularized and spec.kind in (PSEUDO_EUCLIDEAN, BERWALD_MOORE):
        return VolumeResult(math.inf, CLOSED_FORM, 0.0)
    kappa = spec.kappa_value(x)
    scale = kappa ** spec.dim
    base = base_indicatrix_volume(spec)
    method = QUADRATURE if spec.kind == REGULARIZED_HYPERBOLOID else SCALING_LAW
    return VolumeResult(base.value / scale, method, base.error_estimate / scale)


def adaptive_simpson(f, a: float, b: float, rel_tol: float = 1e-9,
                     abs_tol: float = 0.0, max_depth: int = 48):
    """Adaptive Simpson quadrature; returns (value, error_estimate)."""

    def recurse(xa, xb, fa, fm, fb, whole, tol, depth):
        xm = 0.5 * (xa + xb)
        xl = 0.5 * (xa + xm)
        xr = 0.5 * (xm + xb)
        fl = f(xl)
        fr = f(xr)
        left = (xm - xa) / 6.0 * (fa + 4.0 * fl + fm)
        right = (xb - xm) / 6.0 * (fm + 4.0 * fr + fb)
        delta = left + right - whole
        if depth <= 0 or abs(delta) <= 15.0 * tol:
            return left + right + delta / 15.0, abs(delta) / 15.0
        lv, le = recurse(xa, xm, fa, fl, fm, left, tol / 2.0, depth - 1)
        rv, re = recurse(xm, xb, fm, fr, fb, right, tol / 2.0, depth - 1)
        return lv + rv, le + re

    fa, fm, fb = f(a), f(0.5 * (a + b)), f(b)
    whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    tol = max(abs_tol, rel_tol * abs(whole))
    if tol == 0.0:
        tol = rel_tol
    return recurse(a, b, fa, fm, fb, whole, tol, max_depth)


def hyperboloid_slice_volume(t: float, q0: float) -> float:
    """3-volume of the slice xi0 = t of the regularized body.

    The body is {xi0 >= 0, |xiv| <= xi0, sqrt(xi0^2 - |xiv|^2) + q0*xi0 <= 1}.
    For t <= 1/(1+q0) the slice is the full ball |xiv| <= t; beyond that it
    is the shell r_min <= |xiv| <= t with r_min^2 = t^2 - (1 - q0*t)^2, and
    it is empty past t = 1/q0.
    """
    if t <= 0.0:
        return 0.0
    if t >= 1.0 / q0:
        return 0.0
    cap = 1.0 - q0 * t
    inner_sq = t * t - cap * cap
    if inner_sq <= 0.0:
        return 4.0 * math.pi / 3.0 * t**3
    return 4.0 * math.pi / 3.0 * (t**3 - inner_sq**1.5)


def regularized_hyperboloid_volume(q0: float, rel_tol: float = 1e-9) -> VolumeResult:
    """4-volume swept by the unit vector of the regularized family.

    Integrates the closed-form slice volumes over xi0 with adaptive
    Simpson; the breakpoint 1/(1+q0), where the slice switches from ball
    to shell, is a panel boundary.
    """
    if q0 <= 0.0:
        raise NonpositiveQ0("q0 must be positive")
    t_break = 1.0 / (1.0 + q0)
    t_max = 1.0 / q0
    v1, e1 = adaptive_simpson(lambda t: hyperboloid_slice_volume(t, q0), 0.0, t_break, rel_tol)
    v2, e2 = adaptive_simpson(lambda t: hyperboloid_slice_volume(t, q0), t_break, t_max, rel_tol)
    return VolumeResult(v1 + v2, QUADRATURE, e1 + e2)


def lagrangian_from_volume(spec: SpaceSpec, x, regularized: bool = True) -> float:
    """Lagrangian density as the reciprocal indicatrix volume.

    Normalized so the three conformal families give exactly kappa(x)^n;
    the regularized hyperboloid gives 1/V(q0) on its own scale.
    """
    vol = conformal_indicatrix_volume(spec, x, regularized=regularized)
    if not vol.is_finite:
        raise InfiniteVolume("unregularized pseudo indicatrix has infinite volume")
    if vol.value <= 0.0:
        raise InfiniteVolume("indicatrix volume must be positive")
    if spec.kind == REGULARIZED_HYPERBOLOID:
        return 1.0 / vol.value
    return base_indicatrix_volume(spec).value / vol.value
