"""Curvature chain for conformally flat 4-d metrics g_ij = kappa^2 eta_ij.

Everything is written in terms of the exponent a(x) = ln(kappa^2) and
the flat metric eta = diag(+1, -1, -1, -1):

    Gamma^i_kl = (a_,l d^i_k + a_,k d^i_l - eta^is a_,s eta_kl) / 2
    R^i_klm    = curvature of that connection (see `riemann`)
    R_km       = R^l_klm
    R          = g^km R_km = kappa^-2 eta^km R_km
    T_km       = factor * (R_km - g_km R / 2),   factor = c^4 / (8 pi k)
    That^k_m   = 4 eta^ks S_,s S_,m Q - d^k_m Q^2,  Q = eta^rs S_,r S_,s
                 (traceless by construction)

A widely quoted explicit right-hand side for the scalar curvature of
this metric family, -3 kappa^-2 (2 box a + (grad a)^2), is exactly twice
the trace of the Ricci form above; `scalar_curvature_diagnostic` reports
both values and their ratio.  The trace is what every other operation
uses, and it is the value the finite-difference oracle confirms.

An independent validation path (`generic_oracle_curvature`) computes the
same chain for an arbitrary metric callable with nested central
differences and the textbook Christoffel/Riemann definitions.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .errors import NonpositiveKappa, SingularMetric
from .fields import ScalarField, as_point

DIM = 4
ETA_DIAG = np.array([1.0, -1.0, -1.0, -1.0])
ETA = np.diag(ETA_DIAG)
_EYE = np.eye(DIM)


class ConformalExponentField:
    """Provides a = ln(kappa^2) and its first two derivative tensors."""

    def exponent(self, x) -> float:
        raise NotImplementedError

    def gradient(self, x) -> np.ndarray:
        raise NotImplementedError

    def hessian(self, x) -> np.ndarray:
        raise NotImplementedError

    def kappa(self, x) -> float:
        return math.exp(0.5 * self.exponent(x))


@dataclass(frozen=True)
class ExponentialExponent(ConformalExponentField):
    """kappa = exp(beta . x), i.e. a = 2 beta . x (constant gradient)."""

    beta: tuple

    def exponent(self, x) -> float:
        return 2.0 * float(np.dot(self.beta, as_point(x, DIM)))

    def gradient(self, x) -> np.ndarray:
        return 2.0 * np.asarray(self.beta, dtype=float)

    def hessian(self, x) -> np.ndarray:
        return np.zeros((DIM, DIM))


@dataclass(frozen=True)
class LogIntervalExponent(ConformalExponentField):
    """kappa = |c| / s with s^2 = (x0)^2 - sum (x_mu)^2 (timelike region)."""

    c: float

    def _q(self, x) -> float:
        x = as_point(x, DIM)
        q = float(x[0] ** 2 - np.dot(x[1:], x[1:]))
        if q <= 0.0:
            raise NonpositiveKappa("interval factor defined only in the timelike region")
        return q

    def exponent(self, x) -> float:
        return math.log(self.c**2) - math.log(self._q(x))

    def gradient(self, x) -> np.ndarray:
        x = as_point(x, DIM)
        q = self._q(x)
        return -2.0 * ETA_DIAG * x / q

    def hessian(self, x) -> np.ndarray:
        x = as_point(x, DIM)
        q = self._q(x)
        eta_x = ETA_DIAG * x
        return -2.0 * ETA / q + 4.0 * np.outer(eta_x, eta_x) / q**2


@dataclass(frozen=True)
class LogRadialExponent(ConformalExponentField):
    """kappa = |c| / r with r the spatial radius |x^1..x^3|."""

    c: float

    def _r2(self, x) -> float:
        x = as_point(x, DIM)
        r2 = float(np.dot(x[1:], x[1:]))
        if r2 <= 0.0:
            raise NonpositiveKappa("radial factor undefined on the time axis")
        return r2

    def exponent(self, x) -> float:
        return math.log(self.c**2) - math.log(self._r2(x))

    def gradient(self, x) -> np.ndarray:
        x = as_point(x, DIM)
        r2 = self._r2(x)
        grad = np.zeros(DIM)
        grad[1:] = -2.0 * x[1:] / r2
        return grad

    def hessian(self, x) -> np.ndarray:
        x = as_point(x, DIM)
        r2 = self._r2(x)
        hess = np.zeros((DIM, DIM))
        hess[1:, 1:] = -2.0 * np.eye(3) / r2 + 4.0 * np.outer(x[1:], x[1:]) / r2**2
        return hess


@dataclass(frozen=True)
class QuadraticExponent(ConformalExponentField):
    """a(x) = a0 + p . x + x . M x with symmetric M (nonconstant Hessian)."""

    a0: float
    linear: tuple
    quadratic: tuple  # 4x4 nested tuple, symmetric

    def exponent(self, x) -> float:
        x = as_point(x, DIM)
        m = np.asarray(self.quadratic, dtype=float)
        return self.a0 + float(np.dot(self.linear, x)) + float(x @ m @ x)

    def gradient(self, x) -> np.ndarray:
        x = as_point(x, DIM)
        m = np.asarray(self.quadratic, dtype=float)
        return np.asarray(self.linear, dtype=float) + 2.0 * m @ x

    def hessian(self, x) -> np.ndarray:
        return 2.0 * np.asarray(self.quadratic, dtype=float)


class NumericalExponent(ConformalExponentField):
    """a = ln(kappa^2) for an arbitrary positive callable kappa(x);
    derivatives by central differences with step ~ step_scale * (1 + |x|)."""

    def __init__(self, kappa_fn: Callable, step_scale: float = 1e-4):
        self.kappa_fn = kappa_fn
        self.step_scale = step_scale

    def exponent(self, x) -> float:
        k = float(self.kappa_fn(as_point(x, DIM)))
        if k <= 0.0:
            raise NonpositiveKappa(f"kappa({x}) = {k}")
        return 2.0 * math.log(k)

    def _steps(self, x) -> np.ndarray:
        return self.step_scale * (1.0 + np.abs(x))

    def gradient(self, x) -> np.ndarray:
        x = as_point(x, DIM)
        steps = self._steps(x)
        grad = np.empty(DIM)
        for i in range(DIM):
            e = np.zeros(DIM)
            e[i] = steps[i]
            grad[i] = (self.exponent(x + e) - self.exponent(x - e)) / (2.0 * steps[i])
        return grad

    def hessian(self, x) -> np.ndarray:
        x = as_point(x, DIM)
        steps = self._steps(x)
        hess = np.empty((DIM, DIM))
        a0 = self.exponent(x)
        for i in range(DIM):
            ei = np.zeros(DIM)
            ei[i] = steps[i]
            hess[i, i] = (self.exponent(x + ei) - 2.0 * a0 + self.exponent(x - ei)) / steps[i] ** 2
            for j in range(i + 1, DIM):
                ej = np.zeros(DIM)
                ej[j] = steps[j]
                hess[i, j] = hess[j, i] = (
                    self.exponent(x + ei + ej) - self.exponent(x + ei - ej)
                    - self.exponent(x - ei + ej) + self.exponent(x - ei - ej)
                ) / (4.0 * steps[i] * steps[j])
        return hess


# ---------------------------------------------------------------------------
# closed-form chain
# ---------------------------------------------------------------------------

def christoffel(field: ConformalExponentField, x) -> np.ndarray:
    """Connection coefficients, indexed [i, k, l]; symmetric in (k, l)."""
    b = field.gradient(x)
    b_up = ETA_DIAG * b
    return 0.5 * (
        _EYE[:, :, None] * b[None, None, :]
        + _EYE[:, None, :] * b[None, :, None]
        - b_up[:, None, None] * ETA[None, :, :]
    )


def riemann(field: ConformalExponentField, x) -> np.ndarray:
    """Curvature tensor R^i_klm, indexed [i, k, l, m]; antisymmetric in (l, m)."""
    b = field.gradient(x)
    hb = field.hessian(x)
    b_up = ETA_DIAG * b
    hb_up = ETA_DIAG[:, None] * hb  # eta^is a_,sl
    b_sq = float(np.dot(b_up, b))

    second = 0.5 * (
        hb[None, :, :, None] * _EYE[:, None, None, :]
        - hb[None, :, None, :] * _EYE[:, None, :, None]
        - hb_up[:, None, :, None] * ETA[None, :, None, :]
        + hb_up[:, None, None, :] * ETA[None, :, :, None]
    )
    quad = 0.25 * (
        b[None, None, None, :] * b[None, :, None, None] * _EYE[:, None, :, None]
        - b[None, None, :, None] * b[None, :, None, None] * _EYE[:, None, None, :]
        - b_sq * _EYE[:, None, :, None] * ETA[None, :, None, :]
        + b[None, None, :, None] * ETA[None, :, None, :] * b_up[:, None, None, None]
        + b_sq * _EYE[:, None, None, :] * ETA[None, :, :, None]
        - b[None, None, None, :] * ETA[None, :, :, None] * b_up[:, None, None, None]
    )
    return second + quad


def ricci(field: ConformalExponentField, x) -> np.ndarray:
    """Ricci tensor R_km = R^l_klm (symmetric)."""
    b = field.gradient(x)
    hb = field.hessian(x)
    box_a = float(np.dot(ETA_DIAG, np.diag(hb)))
    b_sq = float(np.dot(ETA_DIAG * b, b))
    return 0.5 * (-2.0 * hb - box_a * ETA + np.outer(b, b) - b_sq * ETA)


def scalar_curvature(field: ConformalExponentField, x) -> float:
    """R = g^km R_km = kappa^-2 eta^km R_km (the defining trace)."""
    r_km = ricci(field, x)
    kappa2 = math.exp(field.exponent(x))
    return float(np.dot(ETA_DIAG, np.diag(r_km))) / kappa2


def scalar_curvature_diagnostic(field: ConformalExponentField, x) -> dict:
    """Trace-based scalar curvature next to the explicit-form value
    -3 kappa^-2 (2 box a + (grad a)^2), which is exactly twice the trace.

    The ratio is reported as NaN where the curvature vanishes (relative
    to the natural scale of its two terms), e.g. for kappa ~ 1/r where
    2 box a + (grad a)^2 is identically zero.
    """
    b = field.gradient(x)
    hb = field.hessian(x)
    kappa2 = math.exp(field.exponent(x))
    box_a = float(np.dot(ETA_DIAG, np.diag(hb)))
    b_sq = float(np.dot(ETA_DIAG * b, b))
    trace_value = scalar_curvature(field, x)
    explicit_value = -3.0 / kappa2 * (2.0 * box_a + b_sq)
    scale = 3.0 / kappa2 * (2.0 * abs(box_a) + abs(b_sq))
    if abs(trace_value) <= 1e-9 * max(scale, 1e-300):
        ratio = math.nan
    else:
        ratio = explicit_value / trace_value
    return {"trace": trace_value, "explicit": explicit_value, "ratio": ratio}


def stress_energy(field: ConformalExponentField, x, factor: float = 1.0):
    """Matter stress-energy T_km = factor (R_km - g_km R / 2) and its trace.

    The trace satisfies T = -factor * R identically; callers can use
    that as an internal consistency check.
    """
    r_km = ricci(field, x)
    r_scal = scalar_curvature(field, x)
    kappa2 = math.exp(field.exponent(x))
    t_km = factor * (r_km - 0.5 * kappa2 * ETA * r_scal)
    trace = float(np.dot(ETA_DIAG, np.diag(t_km))) / kappa2
    return t_km, trace


def full_stress_energy(s_field: ScalarField, x) -> np.ndarray:
    """Canonical stress-energy of the quartic gradient density, mixed
    indices [k, m]: 4 eta^ks S_,s S_,m Q - d^k_m Q^2.  Trace-free."""
    grad = s_field.gradient(as_point(x, DIM))
    q = float(np.dot(ETA_DIAG * grad, grad))
    grad_up = ETA_DIAG * grad
    return 4.0 * np.outer(grad_up, grad) * q - q**2 * _EYE


@dataclass(frozen=True)
class TensorBundle:
    """Point-wise tensor chain for a conformal exponent field."""

    point: np.ndarray
    christoffel: np.ndarray
    riemann: np.ndarray
    ricci: np.ndarray
    scalar: float
    stress: np.ndarray
    stress_trace: float
    coupling_factor: float
    full_stress: Optional[np.ndarray] = None


def tensor_bundle(field: ConformalExponentField, x,
                  s_field: Optional[ScalarField] = None,
                  factor: float = 1.0) -> TensorBundle:
    x = as_point(x, DIM)
    t_km, trace = stress_energy(field, x, factor)
    return TensorBundle(
        point=x,
        christoffel=christoffel(field, x),
        riemann=riemann(field, x),
        ricci=ricci(field, x),
        scalar=scalar_curvature(field, x),
        stress=t_km,
        stress_trace=trace,
        coupling_factor=factor,
        full_stress=None if s_field is None else full_stress_energy(s_field, x),
    )


# ---------------------------------------------------------------------------
# generic finite-difference oracle (independent validation path)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class OracleBundle:
    christoffel: np.ndarray
    riemann: np.ndarray
    ricci: np.ndarray
    scalar: float


def generic_oracle_curvature(metric_fn: Callable, x, step: float = 0.05) -> OracleBundle:
    """Curvature of an arbitrary metric callable by nested central
    differences and the textbook definitions.

    Christoffels use g^is (g_sk,l + g_sl,k - g_kl,s) / 2 with the metric
    differentiated at step ``step``; the Riemann tensor differentiates
    those Christoffels at the same step, so errors are O(step^2).
    """
    x = np.asarray(x, dtype=float)
    if x.ndim != 1:
        raise ValueError("x must be a point")
    n = x.shape[0]

    def christoffel_at(y):
        g = np.asarray(metric_fn(y), dtype=float)
        try:
            g_inv = np.linalg.inv(g)
        except np.linalg.LinAlgError as exc:
            raise SingularMetric("metric not invertible at evaluation point") from exc
        dg = np.empty((n, n, n))  # dg[a, b, c] = d_a g_bc
        for a in range(n):
            e = np.zeros(n)
            e[a] = step
            dg[a] = (np.asarray(metric_fn(y + e), float)
                     - np.asarray(metric_fn(y - e), float)) / (2.0 * step)
        sym = (np.transpose(dg, (1, 2, 0)) + np.transpose(dg, (1, 0, 2)) - dg)
        return 0.5 * np.einsum("is,skl->ikl", g_inv, sym)

    gamma0 = christoffel_at(x)
    dgamma = np.empty((n, n, n, n))  # dgamma[l, i, k, m] = d_l Gamma^i_km
    for l in range(n):
        e = np.zeros(n)
        e[l] = step
        dgamma[l] = (christoffel_at(x + e) - christoffel_at(x - e)) / (2.0 * step)

    riem = (np.transpose(dgamma, (1, 2, 0, 3))
            - np.transpose(dgamma, (1, 2, 3, 0))
            + np.einsum("ils,skm->iklm", gamma0, gamma0)
            - np.einsum("ims,skl->iklm", gamma0, gamma0))
    ric = np.einsum("lklm->km", riem)
    g = np.asarray(metric_fn(x), dtype=float)
    scal = float(np.einsum("km,km->", np.linalg.inv(g), ric))
    return OracleBundle(christoffel=gamma0, riemann=riem, ricci=ric, scalar=scal)


def conformal_metric_fn(field: ConformalExponentField) -> Callable:
    """Metric callable g(x) = kappa^2(x) * eta for feeding the oracle."""

    def metric(x):
        return math.exp(field.exponent(x)) * ETA

    return metric
