"""finslerlab: a numerical laboratory for conformally flat Finsler spaces.

The Lagrangian density of a field theory is built as the reciprocal of
the indicatrix volume of the underlying space.  The package evaluates
metric functions, momenta and Hamilton-Jacobi residuals for four space
families; computes the indicatrix volumes and induced Lagrangians;
verifies closed-form solutions of the resulting field equations;
integrates the model cosmological ODE to a Hubble profile; and computes
and cross-validates the conformal curvature / stress-energy chain.
"""

__version__ = "0.1.0"

from . import cosmology, curvature, field_theory, fields, geodesics, spaces, volumes
from .cosmology import (
    CosmoSolution,
    SeriesExpansion,
    body_velocity,
    cosmo_field_residual,
    hubble,
    hubble_quadratic,
    integrate_phi,
    phi_rhs,
    phi_series,
    psi_and_field,
)
from .fields import (
    BerwaldMooreLog,
    CosmoExp,
    CustomField,
    GridSampled,
    IntervalLog,
    RadialLog,
    ScalarField,
    coordinate_field,
)
from .field_theory import (
    LagrangianForm,
    MetricAssembly,
    assemble_metric,
    eikonal_residual,
    grid_euler_lagrange_residual,
    lagrangian_density,
    radial_residual,
    two_dim_degeneration_check,
)
from .geodesics import (
    FlowSpec,
    Trajectory,
    congruence_velocity,
    cosmo_trajectory,
    integrate_flow,
    interval_slope,
    straightness_deviation,
    uniformity_deviation,
)
from .spaces import (
    SpaceSpec,
    generalized_momenta,
    hamilton_jacobi_residual,
    indicatrix_residual,
    kappa_from_field,
    metric_function,
    tangential_indicatrix_residual,
)
from .volumes import (
    VolumeResult,
    conformal_indicatrix_volume,
    ellipsoid_volume,
    lagrangian_from_volume,
    regularized_hyperboloid_volume,
    unit_ball_volume,
)
