"""Model cosmology: the expansion-profile ODE, its series bootstrap,
the induced World function, and the Hubble profile.

The radial expansion profile phi(xi) (xi = gamma * r dimensionless)
solves

    xi * (1 - 3 phi^2) * phi' + 2 phi (1 - phi^2) - 3 xi (1 - phi^2)^2 = 0,
    phi(0) = 0,

equivalently the flux form  d/dxi [xi^2 phi (1 - phi^2)] = 3 xi^2 (1 - phi^2)^2.
The origin is a removable singular point; the regular solution is odd
with phi ~ xi - xi^3/5 + (6/35) xi^5 + ...  Integration therefore
bootstraps from an exact-rational power series on [0, xi_switch] and
continues with an embedded Runge-Kutta 5(4) pair (PI step control,
quartic Hermite dense output).  The coefficient 1 - 3 phi^2 vanishes at
phi = 1/sqrt(3), where the derivative blows up; integration halts there
and reports the location instead of continuing through it.

From the profile:

    psi(r)  = exp( int_0^(gamma r) phi )          (psi(0) = 1)
    S       = S0 * exp(-gamma x0) * psi(r)        (S0 > 0)
    kappa   = gamma * sqrt(1 - phi^2) * S         (requires |phi| < 1)
    dr/dt   = c * phi(gamma r)                    (always below c)
    H(r)    = H0 * phi(xi)/xi,  H0 = c * gamma,   H(0) = H0
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field as dataclass_field
from fractions import Fraction
from functools import lru_cache
from typing import Optional

import numpy as np

from .errors import (
    OriginSingularity,
    OutOfRange,
    SingularDenominator,
    ToleranceNotMet,
)
from .fields import CosmoExp

# ---------------------------------------------------------------------------
# exact-rational series bootstrap
# ---------------------------------------------------------------------------


def _series_mul(a, b, order):
    out = [Fraction(0)] * (order + 1)
    for i, ai in enumerate(a):
        if ai == 0:
            continue
        for j, bj in enumerate(b):
            if i + j > order:
                break
            out[i + j] += ai * bj
    return out


def _ode_residual_series(coeffs, order):
    """Series (through ``order``) of the ODE left side for phi = sum a_k xi^k."""
    one = [Fraction(0)] * (order + 1)
    one[0] = Fraction(1)
    phi = list(coeffs) + [Fraction(0)] * (order + 1 - len(coeffs))
    phi2 = _series_mul(phi, phi, order)
    u = [one[k] - phi2[k] for k in range(order + 1)]
    w = [one[k] - 3 * phi2[k] for k in range(order + 1)]
    dphi = [(k + 1) * phi[k + 1] for k in range(order)] + [Fraction(0)]
    w_dphi = _series_mul(w, dphi, order)
    phi_u = _series_mul(phi, u, order)
    u_u = _series_mul(u, u, order)
    res = [Fraction(0)] * (order + 1)
    for k in range(order + 1):
        res[k] += 2 * phi_u[k]
        if k >= 1:
            res[k] += w_dphi[k - 1] - 3 * u_u[k - 1]
    return res


@dataclass(frozen=True)
class SeriesExpansion:
    """phi(xi) = sum_k a_k xi^k with exact rational coefficients a_1..a_N."""

    coefficients: tuple
    order: int

    def as_floats(self) -> np.ndarray:
        return np.array([float(c) for c in self.coefficients])

    def evaluate(self, xi: float) -> float:
        acc = 0.0
        for c in reversed(self.coefficients):
            acc = acc * xi + float(c)
        return acc * xi

    def derivative(self, xi: float) -> float:
        acc = 0.0
        for k in range(self.order, 0, -1):
            acc = acc * xi + k * float(self.coefficients[k - 1])
        return acc

    def integral(self, xi: float) -> float:
        acc = 0.0
        for k in range(self.order, 0, -1):
            acc = acc * xi + float(self.coefficients[k - 1]) / (k + 1)
        return acc * xi * xi


@lru_cache(maxsize=None)
def phi_series(order: int) -> SeriesExpansion:
    """Series solution of the profile ODE, solved order by order.

    Substituting a truncated series into the ODE makes the order-k
    residual coefficient equal to (k + 2) a_k plus terms from lower
    coefficients, so each a_k is determined uniquely; a_1 = 1 comes from
    the order-one balance.  All arithmetic is exact.
    """
    if order < 1:
        raise ValueError("order must be >= 1")
    coeffs = [Fraction(0)] * (order + 1)  # coeffs[k] multiplies xi^k
    for k in range(1, order + 1):
        res = _ode_residual_series(coeffs[: k + 1], k)
        coeffs[k] = -res[k] / (k + 2)
    return SeriesExpansion(tuple(coeffs[1:]), order)


# ---------------------------------------------------------------------------
# ODE right-hand side
# ---------------------------------------------------------------------------

_DEFAULT_EPS_SING = 1e-6
_DEFAULT_XI_SWITCH = 1e-3
_BOOTSTRAP_ORDER = 11


def _rhs_raw(xi: float, phi: float) -> float:
    """Rearranged derivative dphi/dxi; caller guards the denominator."""
    u = 1.0 - phi * phi
    w = 1.0 - 3.0 * phi * phi
    return (3.0 * xi * u * u - 2.0 * phi * u) / (xi * w)


def phi_rhs(xi: float, phi: float,
            eps_sing: float = _DEFAULT_EPS_SING,
            xi_switch: float = _DEFAULT_XI_SWITCH) -> float:
    """dphi/dxi from the rearranged ODE.

    Near the removable origin singularity (xi <= xi_switch, phi close to
    the regular solution) the series derivative is returned instead of
    the rearranged quotient, which suffers cancellation there.
    """
    if xi == 0.0:
        raise OriginSingularity("the rearranged derivative is undefined at xi = 0")
    if 0.0 < xi <= xi_switch:
        series = phi_series(_BOOTSTRAP_ORDER)
        if abs(phi - series.evaluate(xi)) <= 1e-2:
            return series.derivative(xi)
    w = 1.0 - 3.0 * phi * phi
    if abs(w) < eps_sing:
        raise SingularDenominator(f"1 - 3 phi^2 = {w} at phi = {phi}")
    return _rhs_raw(xi, phi)


# ---------------------------------------------------------------------------
# embedded Runge-Kutta 5(4) pair (Dormand-Prince) with dense output
# ---------------------------------------------------------------------------

_RK_C = (0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0)
_RK_A = (
    (),
    (1 / 5,),
    (3 / 40, 9 / 40),
    (44 / 45, -56 / 15, 32 / 9),
    (19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729),
    (9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656),
    (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84),
)
_RK_B5 = (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0)
_RK_B4 = (5179 / 57600, 0.0, 7571 / 16695, 393 / 640, -92097 / 339200,
          187 / 2100, 1 / 40)
_RK_ERR = tuple(b5 - b4 for b5, b4 in zip(_RK_B5, _RK_B4))


class _StepFailure(Exception):
    """Internal: a stage left the admissible region; retry with smaller h."""


def _hermite_cubic(h: float, y0: float, f0: float, y1: float, f1: float) -> np.ndarray:
    """Monomial coefficients (in theta = (xi - xi0)/h) of the cubic Hermite."""
    return np.array([
        y0,
        h * f0,
        -3.0 * y0 - 2.0 * h * f0 + 3.0 * y1 - h * f1,
        2.0 * y0 + h * f0 - 2.0 * y1 + h * f1,
    ])


def _quartic_hermite(cubic: np.ndarray, h: float, f_quarter: float) -> np.ndarray:
    """Raise the cubic Hermite to a quartic.

    Adds a theta^2 (1-theta)^2 bump (which preserves the four Hermite
    conditions) fitted so the slope at theta = 1/4 matches the extra
    right-hand-side sample there.
    """
    slope_quarter = cubic[1] + 2.0 * cubic[2] * 0.25 + 3.0 * cubic[3] * 0.0625
    bump = (h * f_quarter - slope_quarter) / 0.1875  # d/dtheta of the bump at 1/4 is 3/16
    return np.array([cubic[0], cubic[1], cubic[2] + bump, cubic[3] - 2.0 * bump, bump])


def _poly_eval(coeffs: np.ndarray, theta: float) -> float:
    acc = 0.0
    for c in coeffs[::-1]:
        acc = acc * theta + c
    return acc


def _poly_deriv(coeffs: np.ndarray, theta: float, h: float) -> float:
    acc = 0.0
    for k in range(len(coeffs) - 1, 0, -1):
        acc = acc * theta + k * coeffs[k]
    return acc / h


def _poly_integral(coeffs: np.ndarray, theta: float, h: float) -> float:
    acc = 0.0
    for k in range(len(coeffs) - 1, -1, -1):
        acc = acc * theta + coeffs[k] / (k + 1)
    return acc * theta * h


@dataclass
class CosmoSolution:
    """Dense-output expansion profile plus derived cosmology quantities.

    ``xi_nodes`` / ``phi_nodes`` include the origin and the series/RK
    handover point.  The profile is valid on [0, xi_end]; if the
    1 - 3 phi^2 coefficient dropped below ``eps_sing`` the run halted at
    ``singular_xi`` (= xi_end) with phi within O(eps_sing) of 1/sqrt(3).
    """

    gamma: float
    amplitude: float
    c: float
    rel_tol: float
    eps_sing: float
    xi_switch: float
    series: SeriesExpansion
    singular_xi: Optional[float]
    residual_norm: float = 0.0
    _rk_nodes: np.ndarray = dataclass_field(default=None, repr=False)
    _rk_values: np.ndarray = dataclass_field(default=None, repr=False)
    _rk_slopes: np.ndarray = dataclass_field(default=None, repr=False)
    _rk_coeffs: np.ndarray = dataclass_field(default=None, repr=False)
    _rk_cum_integral: np.ndarray = dataclass_field(default=None, repr=False)

    @property
    def h0(self) -> float:
        return self.c * self.gamma

    @property
    def xi_end(self) -> float:
        return float(self._rk_nodes[-1])

    @property
    def xi_nodes(self) -> np.ndarray:
        return np.concatenate([[0.0], self._rk_nodes])

    @property
    def phi_nodes(self) -> np.ndarray:
        return np.concatenate([[0.0], self._rk_values])

    def _check_range(self, xi: float) -> float:
        if xi < 0.0:
            raise OutOfRange("xi must be nonnegative")
        end = self.xi_end
        if xi > end:
            if xi <= end * (1.0 + 1e-12):
                return end
            raise OutOfRange(f"xi = {xi} beyond resolved range [0, {end}]")
        return xi

    def _segment(self, xi: float) -> int:
        k = int(np.searchsorted(self._rk_nodes, xi, side="right")) - 1
        return min(max(k, 0), len(self._rk_nodes) - 2)

    def phi(self, xi: float) -> float:
        xi = self._check_range(xi)
        if xi <= self.xi_switch:
            return self.series.evaluate(xi)
        k = self._segment(xi)
        h = self._rk_nodes[k + 1] - self._rk_nodes[k]
        return float(_poly_eval(self._rk_coeffs[k], (xi - self._rk_nodes[k]) / h))

    def dphi(self, xi: float) -> float:
        xi = self._check_range(xi)
        if xi <= self.xi_switch:
            return self.series.derivative(xi)
        k = self._segment(xi)
        h = self._rk_nodes[k + 1] - self._rk_nodes[k]
        return float(_poly_deriv(self._rk_coeffs[k], (xi - self._rk_nodes[k]) / h, h))

    def phi_integral(self, xi: float) -> float:
        """int_0^xi phi, exact per dense segment."""
        xi = self._check_range(xi)
        if xi <= self.xi_switch:
            return self.series.integral(xi)
        k = self._segment(xi)
        h = self._rk_nodes[k + 1] - self._rk_nodes[k]
        theta = (xi - self._rk_nodes[k]) / h
        return float(self._rk_cum_integral[k] + _poly_integral(self._rk_coeffs[k], theta, h))

    def psi(self, r: float) -> float:
        return math.exp(self.phi_integral(self.gamma * r))

    def world_function(self) -> CosmoExp:
        """The induced World function as a 4-d scalar field."""
        return CosmoExp(self.amplitude, self.gamma, self.phi, self.dphi,
                        self.phi_integral, self.xi_end)


def integrate_phi(xi_max: float, rel_tol: float, *,
                  gamma: float = 1.0, amplitude: float = 1.0, c: float = 1.0,
                  eps_sing: float = _DEFAULT_EPS_SING,
                  xi_switch: float = _DEFAULT_XI_SWITCH,
                  series_order: int = _BOOTSTRAP_ORDER,
                  safety: float = 0.9, min_factor: float = 0.2,
                  max_factor: float = 5.0,
                  initial_step: float = 1e-2) -> CosmoSolution:
    """Integrate the expansion profile up to xi_max (or the singular halt).

    Series bootstrap on [0, xi_switch], then adaptive embedded RK5(4)
    steps with a PI controller.  When 1 - 3 phi^2 falls below
    ``eps_sing`` inside a step, the crossing is located on the dense
    polynomial by bisection, recorded as ``singular_xi``, and
    integration stops there.
    """
    if xi_max <= 0.0:
        raise ValueError("xi_max must be positive")
    if not (1e-13 <= rel_tol <= 1e-3):
        raise ValueError("rel_tol must lie in [1e-13, 1e-3]")
    if amplitude <= 0.0:
        raise ValueError("amplitude must be positive so kappa > 0")
    if gamma <= 0.0 or c <= 0.0:
        raise ValueError("gamma and c must be positive")

    series = phi_series(series_order)
    xi_switch = min(xi_switch, 0.5 * xi_max)

    def rhs(x, y):
        w = 1.0 - 3.0 * y * y
        if x <= 0.0 or w <= 1e-14:
            raise _StepFailure
        return _rhs_raw(x, y)

    nodes = [xi_switch]
    values = [series.evaluate(xi_switch)]
    slopes = [series.derivative(xi_switch)]
    coeff_rows = []
    singular_xi = None

    xi = nodes[0]
    y = values[0]
    f = slopes[0]
    h = min(initial_step, xi_max - xi)
    err_prev = 1.0
    min_step = 1e-15 * max(1.0, xi_max)

    while xi_max - xi > min_step:
        if h < min_step:
            raise ToleranceNotMet(f"step size underflow near xi = {xi}")
        h = min(h, xi_max - xi)
        try:
            k = [f]
            for i in range(1, 7):
                yi = y + h * sum(a * k[j] for j, a in enumerate(_RK_A[i]))
                if i < 6:
                    k.append(rhs(xi + _RK_C[i] * h, yi))
                else:
                    y_new = yi
                    w_new = 1.0 - 3.0 * y_new * y_new
                    if w_new <= 0.0:
                        raise _StepFailure
                    k.append(rhs(xi + h, y_new))
            cubic = _hermite_cubic(h, y, f, y_new, k[6])
            f_quarter = rhs(xi + 0.25 * h, _poly_eval(cubic, 0.25))
        except _StepFailure:
            h *= 0.5
            continue

        err = h * sum(e * ki for e, ki in zip(_RK_ERR, k))
        scale = 1e-3 * rel_tol + rel_tol * max(abs(y), abs(y_new))
        err_norm = abs(err) / scale
        if err_norm > 1.0:
            h *= max(min_factor, safety * err_norm ** -0.2)
            continue

        coeffs = _quartic_hermite(cubic, h, f_quarter)
        if w_new < eps_sing:
            lo, hi = 0.0, 1.0
            for _ in range(200):
                mid = 0.5 * (lo + hi)
                if 1.0 - 3.0 * _poly_eval(coeffs, mid) ** 2 < eps_sing:
                    hi = mid
                else:
                    lo = mid
                if hi - lo < 1e-16:
                    break
            theta_cross = 0.5 * (lo + hi)
            xi_cross = xi + theta_cross * h
            y_cross = _poly_eval(coeffs, theta_cross)
            # rescale the polynomial to the truncated step
            scale_t = theta_cross
            rescaled = np.array([coeffs[j] * scale_t**j for j in range(5)])
            nodes.append(xi_cross)
            values.append(y_cross)
            slopes.append(_poly_deriv(coeffs, theta_cross, h))
            coeff_rows.append(rescaled)
            singular_xi = xi_cross
            break

        nodes.append(xi + h)
        values.append(y_new)
        slopes.append(k[6])
        coeff_rows.append(coeffs)
        xi += h
        y = y_new
        f = k[6]  # first-same-as-last
        factor = safety * err_norm ** -0.14 * err_prev ** 0.08 if err_norm > 0 else max_factor
        h *= min(max_factor, max(min_factor, factor))
        err_prev = max(err_norm, 1e-4)

    rk_nodes = np.array(nodes)
    rk_values = np.array(values)
    rk_slopes = np.array(slopes)
    rk_coeffs = (np.array(coeff_rows) if coeff_rows
                 else np.zeros((0, 5)))

    cum = np.empty(len(rk_nodes))
    cum[0] = series.integral(rk_nodes[0])
    for i in range(len(rk_coeffs)):
        seg_h = rk_nodes[i + 1] - rk_nodes[i]
        cum[i + 1] = cum[i] + _poly_integral(rk_coeffs[i], 1.0, seg_h)

    sol = CosmoSolution(
        gamma=gamma, amplitude=amplitude, c=c, rel_tol=rel_tol,
        eps_sing=eps_sing, xi_switch=xi_switch, series=series,
        singular_xi=singular_xi,
        _rk_nodes=rk_nodes, _rk_values=rk_values, _rk_slopes=rk_slopes,
        _rk_coeffs=rk_coeffs, _rk_cum_integral=cum,
    )
    sol.residual_norm = _node_residual_norm(sol)
    return sol


def _node_residual_norm(sol: CosmoSolution) -> float:
    """Max |flux-form residual|, weighted by psi^3, over the nodes."""
    worst = 0.0
    for xi, phi_v, dphi_v in zip(sol._rk_nodes, sol._rk_values, sol._rk_slopes):
        res = _flux_residual(xi, phi_v, dphi_v)
        psi3 = math.exp(3.0 * sol.phi_integral(xi))
        worst = max(worst, abs(psi3 * res))
    return worst


def _flux_residual(xi: float, phi_v: float, dphi_v: float) -> float:
    u = 1.0 - phi_v * phi_v
    w = 1.0 - 3.0 * phi_v * phi_v
    return xi * xi * dphi_v * w + 2.0 * xi * phi_v * u - 3.0 * xi * xi * u * u


def cosmo_field_residual(sol: CosmoSolution, xi: float) -> float:
    """Flux-form ODE residual d/dxi[xi^2 phi (1-phi^2)] - 3 xi^2 (1-phi^2)^2
    evaluated with the dense-output profile."""
    if xi == 0.0:
        return 0.0
    return _flux_residual(xi, sol.phi(xi), sol.dphi(xi))


def psi_and_field(sol: CosmoSolution, x0: float, r: float):
    """(psi, S, kappa) at time coordinate x0 and radius r >= 0."""
    if r < 0.0:
        raise OutOfRange("r must be nonnegative")
    xi = sol.gamma * r
    psi = math.exp(sol.phi_integral(xi))
    s_val = sol.amplitude * math.exp(-sol.gamma * x0) * psi
    phi_v = sol.phi(xi)
    kappa = sol.gamma * math.sqrt(1.0 - phi_v**2) * s_val
    return psi, s_val, kappa


def hubble(sol: CosmoSolution, r: float) -> float:
    """H(r) = H0 * phi(xi)/xi at xi = H0 r / c; the limit H(0) = H0 is exact."""
    if r < 0.0:
        raise OutOfRange("r must be nonnegative")
    xi = sol.gamma * r
    if xi == 0.0:
        return sol.h0
    return sol.h0 * sol.phi(xi) / xi


def hubble_quadratic(sol: CosmoSolution, r: float) -> float:
    """Small-radius closed form H(r) = H0 * (1 - (H0 r / c)^2 / 5)."""
    xi = sol.gamma * r
    return sol.h0 * (1.0 - xi * xi / 5.0)


def body_velocity(sol: CosmoSolution, r: float) -> float:
    """Radial velocity dr/dt = c * phi(gamma r); |dr/dt| < c always."""
    if r < 0.0:
        raise OutOfRange("r must be nonnegative")
    return sol.c * sol.phi(sol.gamma * r)
