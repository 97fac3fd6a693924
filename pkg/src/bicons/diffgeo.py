"""Pointwise curvature pipeline for parametric surfaces in R^3.

Second-order jets go in; fundamental forms, shape operator, mean and Gauss
curvature, and intrinsic derivatives of scalar fields come out. The shape
operator is stored as the coordinate-basis matrix g^(-1) * II: generally
non-symmetric as a matrix but self-adjoint with respect to g.

Laplacian sign convention
-------------------------
The mean-curvature PDE identities verified by this package use the
geometer's Laplacian

    lap f = -trace_g(Hess f),

selected by `calibrate_laplacian_sign`: of the two sign conventions, it is
the one for which  f*lap(f) + |grad f|^2 - f^4  vanishes on the canonical
revolution families. The choice is hard-coded as LAPLACIAN_SIGN and quoted
in every residual report.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable

import numpy as np

from .errors import DegenerateMetric, OutOfDomain, StencilOutOfDomain, UnsupportedMode
from .numerics import observed_order

LAPLACIAN_SIGN = -1.0
DEGENERACY_FACTOR = 1e-12  # eps_g = 1e-12 * (E + G)^2
JET_STEP_MIN = 1e-8
JET_STEP_MAX = 1e-1


@dataclass(frozen=True)
class ChartPoint:
    """A point in the open domain of a named chart."""

    u: float
    v: float
    chart_id: str = "default"


@dataclass(frozen=True)
class Jet2:
    """Position and first/second partials of an immersion at a chart point."""

    position: np.ndarray
    d_u: np.ndarray
    d_v: np.ndarray
    d_uu: np.ndarray
    d_uv: np.ndarray
    d_vv: np.ndarray


@dataclass(frozen=True)
class PointGeometry:
    """Fundamental forms and derived curvature data at one surface point.

    grad_f / hess_f / lap_f refer to the mean curvature as a scalar field on
    the chart and are filled in by `geometry_at`; `fundamental_forms` leaves
    them as None.
    """

    E: float
    F: float
    G: float
    L: float
    M: float
    N: float
    normal: np.ndarray
    shape: np.ndarray
    f: float
    K: float
    grad_f: np.ndarray | None = None
    grad_f_norm2: float | None = None
    hess_f: np.ndarray | None = None
    lap_f: float | None = None

    def metric(self) -> np.ndarray:
        return np.array([[self.E, self.F], [self.F, self.G]])

    def second_form(self) -> np.ndarray:
        return np.array([[self.L, self.M], [self.M, self.N]])


@dataclass(frozen=True)
class DifferentiationScheme:
    """How jets and scalar-field derivatives are obtained.

    jets: "analytic" uses the family's closed-form partials, "fd" central
    differences of the position map. Steps are relative and scaled by
    max(1, |u|, |v|) at the evaluation point.
    """

    jets: str = "analytic"
    jet_step: float = 1e-4
    field_step: float = 1e-4

    def jet_h(self, p: ChartPoint) -> float:
        return self.jet_step * max(1.0, abs(p.u), abs(p.v))

    def field_h(self, p: ChartPoint) -> float:
        return self.field_step * max(1.0, abs(p.u), abs(p.v))


ANALYTIC = DifferentiationScheme()


# ---------------------------------------------------------------------------
# Forms and shape operator
# ---------------------------------------------------------------------------

def fundamental_forms(jet: Jet2, orientation_sign: float = 1.0) -> PointGeometry:
    """First and second fundamental forms, unit normal, shape operator, f, K.

    The normal is (d_u x d_v)/|d_u x d_v| times orientation_sign; the caller
    (surface family) picks the sign so that f > 0 on its canonical surfaces.
    Raises DegenerateMetric when EG - F^2 falls under the scale-aware floor.
    """
    E = float(jet.d_u @ jet.d_u)
    F = float(jet.d_u @ jet.d_v)
    G = float(jet.d_v @ jet.d_v)
    det_g = E * G - F * F
    if det_g <= DEGENERACY_FACTOR * (E + G) ** 2:
        raise DegenerateMetric(f"EG - F^2 = {det_g:g} below degeneracy floor")
    raw = np.cross(jet.d_u, jet.d_v)
    normal = orientation_sign * raw / math.sqrt(det_g)
    L = float(jet.d_uu @ normal)
    M = float(jet.d_uv @ normal)
    N = float(jet.d_vv @ normal)
    g = np.array([[E, F], [F, G]])
    second = np.array([[L, M], [M, N]])
    shape = np.linalg.solve(g, second)
    return PointGeometry(
        E=E, F=F, G=G, L=L, M=M, N=N,
        normal=normal,
        shape=shape,
        f=float(np.trace(shape)),
        K=float(np.linalg.det(shape)),
    )


def christoffels(jet: Jet2) -> np.ndarray:
    """Christoffel symbols Gamma[k, i, j] of the induced metric at the point.

    Obtained from the tangential part of the second derivatives:
    Gamma^k_ij = g^(kl) <x_ij, x_l>, exact for analytic jets.
    """
    g = np.array([
        [jet.d_u @ jet.d_u, jet.d_u @ jet.d_v],
        [jet.d_v @ jet.d_u, jet.d_v @ jet.d_v],
    ])
    basis = np.stack([jet.d_u, jet.d_v])          # (2, 3)
    second = np.stack([
        [jet.d_uu, jet.d_uv],
        [jet.d_uv, jet.d_vv],
    ])                                             # (2, 2, 3)
    rhs = np.einsum("ijm,lm->ijl", second, basis)  # <x_ij, x_l>
    gamma_low = rhs.reshape(4, 2).T                # (l, ij)
    gamma = np.linalg.solve(g, gamma_low).T.reshape(2, 2, 2)  # (i, j, k)
    return np.transpose(gamma, (2, 0, 1))


# ---------------------------------------------------------------------------
# Jets from families
# ---------------------------------------------------------------------------

def jet_of(family, p: ChartPoint, mode: str = "analytic", h: float | None = None) -> Jet2:
    """Second-order jet of a surface family at a chart point.

    mode "analytic" returns the family's closed-form partials; "fd" builds a
    central-difference jet of the position map with error O(h^2).
    """
    if not family.contains(p.u, p.v, p.chart_id):
        raise OutOfDomain(f"({p.u:g}, {p.v:g}) outside chart '{p.chart_id}' of {family.spec_string()}")
    if mode == "analytic":
        jet = family.jet(p.u, p.v, p.chart_id)
        if jet is None:
            raise UnsupportedMode(f"{family.spec_string()} has no analytic jets")
        return jet
    if mode != "fd":
        raise UnsupportedMode(f"unknown jet mode '{mode}'")
    if h is None:
        h = 1e-4 * max(1.0, abs(p.u), abs(p.v))
    if not (JET_STEP_MIN <= h <= JET_STEP_MAX):
        raise OutOfDomain(f"fd step h={h:g} outside [{JET_STEP_MIN:g}, {JET_STEP_MAX:g}]")
    for du in (-h, 0.0, h):
        for dv in (-h, 0.0, h):
            if not family.contains(p.u + du, p.v + dv, p.chart_id):
                raise StencilOutOfDomain(
                    f"fd stencil leaves chart '{p.chart_id}' at ({p.u + du:g}, {p.v + dv:g})"
                )
    X = lambda a, b: family.position(a, b, p.chart_id)
    u, v = p.u, p.v
    c = X(u, v)
    xp, xm = X(u + h, v), X(u - h, v)
    yp, ym = X(u, v + h), X(u, v - h)
    return Jet2(
        position=c,
        d_u=(xp - xm) / (2.0 * h),
        d_v=(yp - ym) / (2.0 * h),
        d_uu=(xp - 2.0 * c + xm) / (h * h),
        d_vv=(yp - 2.0 * c + ym) / (h * h),
        d_uv=(X(u + h, v + h) - X(u + h, v - h) - X(u - h, v + h) + X(u - h, v - h)) / (4.0 * h * h),
    )


def jet_convergence_orders(family, p: ChartPoint, h: float = 1e-3) -> dict[str, float]:
    """Observed convergence order of each fd jet entry against analytic jets."""
    exact = jet_of(family, p, "analytic")
    coarse = jet_of(family, p, "fd", h)
    fine = jet_of(family, p, "fd", h / 2.0)
    out = {}
    for name in ("d_u", "d_v", "d_uu", "d_uv", "d_vv"):
        e_c = np.linalg.norm(getattr(coarse, name) - getattr(exact, name))
        e_f = np.linalg.norm(getattr(fine, name) - getattr(exact, name))
        out[name] = observed_order(e_c, e_f) if e_c > 0 else math.inf
    return out


# ---------------------------------------------------------------------------
# Scalar-field calculus
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FieldDerivatives:
    grad: np.ndarray       # coordinate components of grad f
    grad_norm2: float      # |grad f|^2 = df(grad f)
    hess: np.ndarray       # covariant Hessian, lower indices
    lap: float             # LAPLACIAN_SIGN * trace_g(Hess f)


def scalar_field_calculus(
    family,
    field: Callable[[float, float], float],
    p: ChartPoint,
    scheme: DifferentiationScheme = ANALYTIC,
    jet: Jet2 | None = None,
) -> FieldDerivatives:
    """Gradient, Hessian and Laplace-Beltrami of a chart scalar field at p.

    Field derivatives use a 3x3 central stencil of step scheme.field_h(p);
    the metric and Christoffel symbols come from the surface jet at p (exact
    in analytic mode). The stencil must stay inside the chart domain.

    A field whose stencil values are constant to machine precision (CMC
    controls) is treated as exactly constant: central differences cannot
    resolve sub-ulp variation, so grad, Hess and lap are returned as exact
    zeros instead of roundoff noise.
    """
    h = scheme.field_h(p)
    for du in (-h, 0.0, h):
        for dv in (-h, 0.0, h):
            if not family.contains(p.u + du, p.v + dv, p.chart_id):
                raise StencilOutOfDomain(
                    f"field stencil leaves chart '{p.chart_id}' at ({p.u + du:g}, {p.v + dv:g})"
                )
    if jet is None:
        jet = jet_of(family, p, scheme.jets, scheme.jet_h(p) if scheme.jets == "fd" else None)

    u, v = p.u, p.v
    f00 = field(u, v)
    fpu, fmu = field(u + h, v), field(u - h, v)
    fpv, fmv = field(u, v + h), field(u, v - h)
    fpp, fpm = field(u + h, v + h), field(u + h, v - h)
    fmp, fmm = field(u - h, v + h), field(u - h, v - h)

    stencil = (f00, fpu, fmu, fpv, fmv, fpp, fpm, fmp, fmm)
    span = max(stencil) - min(stencil)
    if span <= 8.0 * np.finfo(float).eps * max(1.0, max(abs(x) for x in stencil)):
        return FieldDerivatives(grad=np.zeros(2), grad_norm2=0.0, hess=np.zeros((2, 2)), lap=0.0)

    df = np.array([(fpu - fmu) / (2.0 * h), (fpv - fmv) / (2.0 * h)])
    fuu = (fpu - 2.0 * f00 + fmu) / (h * h)
    fvv = (fpv - 2.0 * f00 + fmv) / (h * h)
    fuv = (fpp - fpm - fmp + fmm) / (4.0 * h * h)

    g = np.array([
        [jet.d_u @ jet.d_u, jet.d_u @ jet.d_v],
        [jet.d_u @ jet.d_v, jet.d_v @ jet.d_v],
    ])
    gamma = christoffels(jet)
    partials2 = np.array([[fuu, fuv], [fuv, fvv]])
    hess = partials2 - np.einsum("kij,k->ij", gamma, df)
    grad = np.linalg.solve(g, df)
    return FieldDerivatives(
        grad=grad,
        grad_norm2=float(df @ grad),
        hess=hess,
        lap=LAPLACIAN_SIGN * float(np.trace(np.linalg.solve(g, hess))),
    )


def mean_curvature_field(
    family, chart_id: str, jets: str = "analytic", jet_h: float | None = None
):
    """Mean curvature (trace of the shape operator) as a chart scalar field.

    In fd mode the jet step is frozen to `jet_h` for every evaluation: a
    per-point rescaled step would make the evaluation error non-smooth in
    (u, v) and contaminate second differences of the field.
    """

    def field(u: float, v: float) -> float:
        jet = jet_of(family, ChartPoint(u, v, chart_id), jets, jet_h)
        return fundamental_forms(jet, family.orientation_sign).f

    return field


def geometry_at(family, p: ChartPoint, scheme: DifferentiationScheme = ANALYTIC) -> PointGeometry:
    """Complete PointGeometry (forms + mean-curvature field calculus) at p."""
    jet_h = scheme.jet_h(p) if scheme.jets == "fd" else None
    jet = jet_of(family, p, scheme.jets, jet_h)
    base = fundamental_forms(jet, family.orientation_sign)
    field = mean_curvature_field(family, p.chart_id, scheme.jets, jet_h)
    derivs = scalar_field_calculus(family, field, p, scheme, jet=jet)
    return replace(
        base,
        grad_f=derivs.grad,
        grad_f_norm2=derivs.grad_norm2,
        hess_f=derivs.hess,
        lap_f=derivs.lap,
    )


# ---------------------------------------------------------------------------
# Calibration
# ---------------------------------------------------------------------------

def calibrate_laplacian_sign(family=None, points=None) -> float:
    """Pick the Laplacian sign for which the quartic identity vanishes.

    Evaluates f*lap(f) + |grad f|^2 - f^4 with both sign conventions on
    interior points of a canonical revolution surface and returns the sign
    (+1 or -1 relative to trace_g Hess) with the smaller maximum residual.
    The winner is hard-coded as LAPLACIAN_SIGN; this function exists so the
    choice stays auditable.
    """
    from .families import HalfRevolutionSurface

    if family is None:
        family = HalfRevolutionSurface(1.0)
    if points is None:
        points = [ChartPoint(t, 0.3, family.default_chart) for t in (0.5, 1.0, 2.0, 3.5)]
    worst = {1.0: 0.0, -1.0: 0.0}
    for p in points:
        geom = geometry_at(family, p)
        trace_term = geom.lap_f / LAPLACIAN_SIGN  # recover +trace_g(Hess f)
        for sign in (1.0, -1.0):
            res = geom.f * (sign * trace_term) + geom.grad_f_norm2 - geom.f ** 4
            worst[sign] = max(worst[sign], abs(res))
    return 1.0 if worst[1.0] < worst[-1.0] else -1.0
