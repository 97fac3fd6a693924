"""Boundary geometry and mirror-gluing checks for the revolution families.

The half surface meets its mirror image along the circle of radius
Ct0^(-3/2) in the Oxy plane. Along approach sequences theta -> 0 in the
boundary-regular chart this module measures

  * the mean curvature (limit (2/3) Ct0^(3/2)),
  * |grad f| (limit 0, leading behavior ~ sqrt(theta)),
  * the tilt of the unit normal against the Oxy plane (limit 0: the
    tangent plane becomes vertical).

Limits are Richardson-extrapolated in theta rather than evaluated at the
(excluded) boundary point; quantities with a sqrt(theta) leading term use
the half-integer exponent ladder.

Mirror gluing is checked to finite derivative order (default 4, the
highest order any residual in this package differentiates): one-sided
derivative jets of the profile at the neck, computed from samples on each
branch with Fornberg weights, must agree componentwise after reflection.
Gluing a reflected profile with a different parameter fails at order 0
(the neck circles differ); gluing an unreflected translate fails at order
1 (tangent directions disagree). That finite-order check is numerical
evidence for the rigidity statement, not a proof of C-infinity matching.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import profiles
from .diffgeo import ChartPoint, DifferentiationScheme, geometry_at
from .errors import OutOfDomain
from .families import CompleteRevolutionSurface, HalfRevolutionSurface
from .intrinsic import cosh_power_metric, geodesic_shoot, unit_speed_state
from .numerics import fit_limit, fornberg_weights, quad_tol

DEFAULT_THETAS = tuple(0.1 * 4.0 ** -k for k in range(8))


# ---------------------------------------------------------------------------
# Boundary limits
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BoundaryProbe:
    """Per-theta boundary records plus extrapolated limits."""

    ct0: float
    thetas: np.ndarray
    f_values: np.ndarray
    grad_norms: np.ndarray
    tilt_rad: np.ndarray
    f_limit: float
    grad_limit: float
    tilt_limit: float
    f_predicted: float          # (2/3) Ct0^(3/2)
    boundary_radius: float      # Ct0^(-3/2)


def boundary_limits(ct0: float, thetas=None) -> BoundaryProbe:
    """Probe f, |grad f| and the normal tilt along theta -> 0.

    The theta sequence must be strictly decreasing and positive (default:
    geometric, ratio 4). f is smooth in theta and extrapolated on the
    integer ladder; |grad f| and the tilt vanish like sqrt(theta) and use
    the half-integer ladder {1/2, 3/2}.
    """
    thetas = np.asarray(DEFAULT_THETAS if thetas is None else thetas, dtype=float)
    if np.any(thetas <= 0.0) or np.any(np.diff(thetas) >= 0.0):
        raise OutOfDomain("theta sequence must be strictly decreasing and positive")
    fam = HalfRevolutionSurface(ct0)
    fs, grads, tilts = [], [], []
    for th in thetas:
        # keep the field stencil inside theta > 0 as the sequence approaches 0
        scheme = DifferentiationScheme(field_step=min(1e-4, float(th) / 16.0))
        geom = geometry_at(fam, ChartPoint(float(th), 0.0, "theta"), scheme)
        fs.append(geom.f)
        grads.append(math.sqrt(max(geom.grad_f_norm2, 0.0)))
        tilts.append(math.asin(min(1.0, abs(float(geom.normal[2])))))
    fs, grads, tilts = np.array(fs), np.array(grads), np.array(tilts)

    # extrapolate on the three smallest thetas
    xs = thetas[-3:]
    return BoundaryProbe(
        ct0=ct0,
        thetas=thetas,
        f_values=fs,
        grad_norms=grads,
        tilt_rad=tilts,
        f_limit=fit_limit(xs, fs[-3:], (1.0, 2.0)),
        grad_limit=fit_limit(xs, grads[-3:], (0.5, 1.5)),
        tilt_limit=fit_limit(xs, tilts[-3:], (0.5, 1.5)),
        f_predicted=(2.0 / 3.0) * ct0 ** 1.5,
        boundary_radius=ct0 ** -1.5,
    )


# ---------------------------------------------------------------------------
# Mirror matching
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MatchReport:
    """One-sided jet comparison at the neck, per derivative order."""

    candidate: str
    order: int
    step: float
    mismatch: np.ndarray        # (order+1, 2): |d^j radius|, |d^j height|
    tolerance: float

    def max_at_order(self, j: int) -> float:
        return float(np.max(self.mismatch[j]))

    def max_mismatch(self) -> float:
        return float(np.max(self.mismatch))

    def passed(self) -> bool:
        return self.max_mismatch() <= self.tolerance

    def first_failing_order(self) -> int | None:
        for j in range(self.order + 1):
            if self.max_at_order(j) > self.tolerance:
                return j
        return None


def _one_sided_jet(samples_t: np.ndarray, samples: np.ndarray, order: int) -> np.ndarray:
    """Derivatives 0..order at t=0 from samples on nodes samples_t (shape (n, 2))."""
    w = fornberg_weights(0.0, samples_t, order)
    return w @ samples  # (order+1, 2)


def mirror_match(
    c0: float, order: int = 4, step: float = 0.05, candidate: str = "mirror",
    c0_other: float | None = None, dz: float = 0.0, tolerance: float = 1e-10,
) -> MatchReport:
    """Compare one-sided profile jets at the neck across a gluing candidate.

    The jet of the profile at u = 0 estimated from u > 0 samples is compared
    against the *reflection-transformed* jet estimated from the candidate's
    u < 0 samples. The mirror transform (height flip + parameter reversal)
    acts on jets as  d^j -> (-1)^j * (radius, -height); the gluing is C^k
    exactly when the transformed left jet equals the right jet, i.e. when
    the radius is even and the height odd in u. Both jets use mirrored
    Fornberg stencils, so their truncation errors cancel identically on a
    true mirror pair and the mismatch drops to roundoff.

    candidate "mirror":    the complete profile itself (passes to order k).
    candidate "crossed":   branch of a different parameter c0_other glued by
                           mirror; the neck radii differ, order 0 fails.
    candidate "translate": the branch continued without reflection (shifted
                           along Oz by dz); with dz = 0 positions agree but
                           the vertical tangent flips sign, order 1 fails.
    """
    if order < 0 or order > 4:
        raise OutOfDomain("derivative order must be between 0 and 4")
    n_nodes = order + 4  # cushion above the minimum order+1
    ts = step * np.arange(n_nodes)

    right = np.array([profiles.mirror_sigma(c0, t) for t in ts])

    if candidate == "mirror":
        left = np.array([profiles.mirror_sigma(c0, -t) for t in ts])
        label = f"mirror:C0={c0:g}"
    elif candidate == "crossed":
        if c0_other is None:
            raise OutOfDomain("candidate 'crossed' needs c0_other")
        left = np.array([profiles.mirror_sigma(c0_other, -t) for t in ts])
        label = f"crossed:C0={c0:g},C0b={c0_other:g}"
    elif candidate == "translate":
        left = np.array([profiles.mirror_sigma(c0, t) for t in ts]) + np.array([0.0, dz])
        label = f"translate:C0={c0:g},dz={dz:g}"
    else:
        raise OutOfDomain(f"unknown glue candidate '{candidate}'")

    jet_right = _one_sided_jet(ts, right, order)
    jet_left = _one_sided_jet(-ts, left, order)
    signs = np.array([(-1.0) ** j for j in range(order + 1)])
    reflected_left = signs[:, None] * jet_left * np.array([1.0, -1.0])
    return MatchReport(
        candidate=label,
        order=order,
        step=step,
        mismatch=np.abs(jet_right - reflected_left),
        tolerance=tolerance,
    )


def neck_mean_curvature(c0: float) -> float:
    """f at the neck circle u = 0 of the complete surface, via the jet pipeline."""
    fam = CompleteRevolutionSurface(c0)
    return geometry_at(fam, ChartPoint(0.0, 0.0, "uv")).f


# ---------------------------------------------------------------------------
# Geodesic checks on the complete surface
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DriftReport:
    """Trajectory-vs-reference distances for a surface geodesic."""

    label: str
    s: np.ndarray
    distances: np.ndarray
    max_distance: float
    clairaut_drift: float
    speed_drift: float


def _ambient(fam: CompleteRevolutionSurface, u, v):
    return fam.position(float(u), float(v), "uv")


def _distance_to_meridian(fam, point, v0, u_bracket=(-12.0, 12.0)) -> float:
    """Distance from an ambient point to the meridian curve {v = v0}."""
    lo, hi = u_bracket
    us = np.linspace(lo, hi, 241)
    d = [np.linalg.norm(point - _ambient(fam, u, v0)) for u in us]
    i = int(np.argmin(d))
    a = us[max(0, i - 1)]
    b = us[min(len(us) - 1, i + 1)]
    # golden-section refine (deterministic, derivative-free)
    phi = (math.sqrt(5.0) - 1.0) / 2.0
    x1 = b - phi * (b - a)
    x2 = a + phi * (b - a)
    f1 = np.linalg.norm(point - _ambient(fam, x1, v0))
    f2 = np.linalg.norm(point - _ambient(fam, x2, v0))
    for _ in range(80):
        if f1 <= f2:
            b, x2, f2 = x2, x1, f1
            x1 = b - phi * (b - a)
            f1 = np.linalg.norm(point - _ambient(fam, x1, v0))
        else:
            a, x1, f1 = x1, x2, f2
            x2 = a + phi * (b - a)
            f2 = np.linalg.norm(point - _ambient(fam, x2, v0))
    return float(min(f1, f2))


def _distance_to_parallel(fam, point, u0) -> float:
    """Distance to the circle {u = u0}: closed form via cylindrical radius."""
    s1, s2 = profiles.mirror_sigma(fam.c0, u0)
    radial = math.hypot(point[0], point[1])
    return math.hypot(radial - s1, point[2] - s2)


def meridian_geodesic_check(
    c0: float, u_span: tuple[float, float] = (-2.0, 2.0), step: float = 1e-3, v0: float = 0.0
) -> DriftReport:
    """Shoot a surface geodesic tangent to the meridian and measure drift.

    The chart geodesic equation uses the exact induced metric (isothermal,
    factor C0 cosh^6 u); the trajectory is mapped to R^3 and compared with
    the meridian point set. Meridians of revolution surfaces are geodesics,
    so the distance stays at integration-error level.
    """
    metric = cosh_power_metric(c0)
    length = quad_tol(lambda t: math.sqrt(c0) * math.cosh(t) ** 3, u_span[0], u_span[1], 1e-12)
    start = unit_speed_state(metric, u_span[0], v0 / 3.0, 0.0)
    path = geodesic_shoot(metric, start, length, step, record_every=max(1, int(round(0.05 / step))))
    fam = CompleteRevolutionSurface(c0)
    pts = [
        _ambient(fam, u, v) for u, v in zip(path.u, path.v)
    ]
    dists = np.array([_distance_to_meridian(fam, pt, v0 / 3.0) for pt in pts])
    return DriftReport(
        label=f"meridian:C0={c0:g}",
        s=path.s,
        distances=dists,
        max_distance=float(np.max(dists)),
        clairaut_drift=path.max_clairaut_drift(),
        speed_drift=path.max_speed_drift(),
    )


def parallel_circle_check(
    c0: float, u0: float, length: float = 3.0, step: float = 1e-3
) -> DriftReport:
    """Shoot tangent to the parallel circle u = u0 and measure deviation.

    Only the neck circle u = 0 is a geodesic (critical parallel); for
    u0 != 0 the trajectory leaves the circle.
    """
    metric = cosh_power_metric(c0)
    start = unit_speed_state(metric, u0, 0.0, math.pi / 2.0)
    path = geodesic_shoot(metric, start, length, step, record_every=max(1, int(round(0.05 / step))))
    fam = CompleteRevolutionSurface(c0)
    pts = [_ambient(fam, u, v) for u, v in zip(path.u, path.v)]
    dists = np.array([_distance_to_parallel(fam, pt, u0) for pt in pts])
    return DriftReport(
        label=f"parallel:C0={c0:g},u0={u0:g}",
        s=path.s,
        distances=dists,
        max_distance=float(np.max(dists)),
        clairaut_drift=path.max_clairaut_drift(),
        speed_drift=path.max_speed_drift(),
    )
