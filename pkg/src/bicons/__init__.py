"""Numerical toolkit for biconservative surfaces of revolution in R^3.

Modules
-------
diffgeo    jets -> fundamental forms, shape operator, curvatures, field calculus
profiles   closed-form / ODE profile curves, arc length, curvature ODE
families   concrete surfaces: the revolution families plus control surfaces
intrinsic  conformal metrics, their curvature, geodesics, characterizing ODE
residuals  pointwise identity residuals and grid sweep reports
gluing     boundary limits, mirror matching, meridian geodesic checks
io_cli     deterministic CLI front end and file writers
"""

__version__ = "0.1.0"

from .diffgeo import (
    ANALYTIC,
    ChartPoint,
    DifferentiationScheme,
    Jet2,
    PointGeometry,
    fundamental_forms,
    geometry_at,
    jet_of,
    scalar_field_calculus,
)
from .families import (
    CompleteRevolutionSurface,
    Cylinder,
    Ellipsoid,
    HalfRevolutionSurface,
    Sphere,
    c0_to_ct0,
    ct0_to_c0,
    parse_family,
)
from .profiles import (
    ProfileCurve,
    arclength_reparam,
    boundary_profile,
    curvature_ode_residual,
    graph_profile,
    integrate_curvature_ode,
    mirror_profile,
    sigma_theta,
    signed_curvature,
    u_profile,
)

__all__ = [
    "ANALYTIC",
    "ChartPoint",
    "CompleteRevolutionSurface",
    "Cylinder",
    "DifferentiationScheme",
    "Ellipsoid",
    "HalfRevolutionSurface",
    "Jet2",
    "PointGeometry",
    "ProfileCurve",
    "Sphere",
    "__version__",
    "arclength_reparam",
    "boundary_profile",
    "c0_to_ct0",
    "ct0_to_c0",
    "curvature_ode_residual",
    "fundamental_forms",
    "geometry_at",
    "graph_profile",
    "integrate_curvature_ode",
    "jet_of",
    "mirror_profile",
    "parse_family",
    "scalar_field_calculus",
    "sigma_theta",
    "signed_curvature",
    "u_profile",
]
