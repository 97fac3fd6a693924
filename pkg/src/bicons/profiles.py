"""Profile curves of the biconservative surfaces of revolution.

Three equivalent descriptions of the same planar generating curve are
implemented, together with arc-length reparametrization, signed curvature,
and the fourth-order curvature ODE

    kappa'' * kappa = (7/4) * kappa'^2 - 4 * kappa^4

that characterizes these profiles among unit-speed plane curves.

Closed forms
------------
Graph form (parameter rho > Ct0^(-3/2)):

    height(rho) = (3 / (2 Ct0)) * (rho^(1/3) * sqrt(w) + log(sqrt(Ct0) rho^(1/3) + sqrt(w)) / sqrt(Ct0)),
    w = Ct0 * rho^(2/3) - 1.

Boundary-regular form (parameter theta > 0):

    sigma(theta) = Ct0^(-3/2) * ((theta+1)^(3/2),
                                 (3/2) * (sqrt(theta^2+theta) + log(sqrt(theta) + sqrt(theta+1)))).

Mirror-extended form (parameter u in R, constant c0 = 9 * Ct0^(-3)):

    (sqrt(c0)/3 * cosh^3 u,  sqrt(c0)/2 * (sinh(2u)/2 + u)).

The theta parameter is *not* arc length: |sigma'(theta)| =
(3/2) Ct0^(-3/2) (theta+1)/sqrt(theta), which blows up at the boundary.
Arc length is always re-derived numerically (`arclength_reparam`); the
closed form s(theta) = Ct0^(-3/2) (3+theta) sqrt(theta) is used only as a
test oracle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable

import numpy as np

from .errors import OutOfDomain
from .numerics import central_first, central_second, invert_monotone, quad_tol

KAPPA_FLOOR = 1e-10


# ---------------------------------------------------------------------------
# Closed-form components
# ---------------------------------------------------------------------------

def u_profile(ct0: float, rho: float) -> float:
    """Height of the profile graph above radius rho.

    Defined for rho > ct0^(-3/2); at the boundary radius the graph has a
    vertical tangent and the formula leaves its domain.
    """
    if ct0 <= 0.0:
        raise OutOfDomain(f"ct0 must be positive, got {ct0:g}")
    w = ct0 * rho ** (2.0 / 3.0) - 1.0
    if rho <= 0.0 or w <= 0.0:
        raise OutOfDomain(
            f"rho={rho:g} is at or below the boundary radius {ct0 ** -1.5:g}"
        )
    r13 = rho ** (1.0 / 3.0)
    sq = math.sqrt(w)
    return 1.5 / ct0 * (r13 * sq + math.log(math.sqrt(ct0) * r13 + sq) / math.sqrt(ct0))


def u_profile_d1(ct0: float, rho: float) -> float:
    """d(height)/d(rho) = 1 / sqrt(ct0 * rho^(2/3) - 1); blows up at the boundary."""
    w = ct0 * rho ** (2.0 / 3.0) - 1.0
    if rho <= 0.0 or w <= 0.0:
        raise OutOfDomain(f"rho={rho:g} outside the graph chart")
    return 1.0 / math.sqrt(w)


def u_profile_d2(ct0: float, rho: float) -> float:
    w = ct0 * rho ** (2.0 / 3.0) - 1.0
    if rho <= 0.0 or w <= 0.0:
        raise OutOfDomain(f"rho={rho:g} outside the graph chart")
    return -(ct0 / 3.0) * rho ** (-1.0 / 3.0) * w ** -1.5


def sigma_theta(ct0: float, theta: float) -> tuple[float, float]:
    """Boundary-regular parametrization (radius, height) of the profile."""
    if ct0 <= 0.0:
        raise OutOfDomain(f"ct0 must be positive, got {ct0:g}")
    if theta <= 0.0:
        raise OutOfDomain(f"theta must be positive, got {theta:g}")
    scale = ct0 ** -1.5
    s1 = scale * (theta + 1.0) ** 1.5
    s2 = scale * 1.5 * (
        math.sqrt(theta * theta + theta)
        + math.log(math.sqrt(theta) + math.sqrt(theta + 1.0))
    )
    return s1, s2


def sigma_theta_d1(ct0: float, theta: float) -> tuple[float, float]:
    if theta <= 0.0:
        raise OutOfDomain(f"theta must be positive, got {theta:g}")
    scale = ct0 ** -1.5
    d1 = scale * 1.5 * math.sqrt(theta + 1.0)
    d2 = scale * 1.5 * math.sqrt(theta + 1.0) / math.sqrt(theta)
    return d1, d2


def sigma_theta_d2(ct0: float, theta: float) -> tuple[float, float]:
    if theta <= 0.0:
        raise OutOfDomain(f"theta must be positive, got {theta:g}")
    scale = ct0 ** -1.5
    d1 = scale * 0.75 / math.sqrt(theta + 1.0)
    d2 = -scale * 0.75 / (theta ** 1.5 * math.sqrt(theta + 1.0))
    return d1, d2


def mirror_sigma(c0: float, u: float) -> tuple[float, float]:
    """Mirror-extended profile (radius, height); even/odd in u by construction."""
    if c0 <= 0.0:
        raise OutOfDomain(f"c0 must be positive, got {c0:g}")
    rc = math.sqrt(c0)
    return rc / 3.0 * math.cosh(u) ** 3, rc / 2.0 * (0.5 * math.sinh(2.0 * u) + u)


def mirror_sigma_d1(c0: float, u: float) -> tuple[float, float]:
    rc = math.sqrt(c0)
    ch = math.cosh(u)
    return rc * ch * ch * math.sinh(u), rc * ch * ch


def mirror_sigma_d2(c0: float, u: float) -> tuple[float, float]:
    rc = math.sqrt(c0)
    ch, sh = math.cosh(u), math.sinh(u)
    return rc * ch * (2.0 * sh * sh + ch * ch), 2.0 * rc * ch * sh


def theta_arclength(ct0: float, theta: float) -> float:
    """Closed-form arc length from the boundary along the theta curve (oracle)."""
    if theta < 0.0:
        raise OutOfDomain(f"theta must be nonnegative, got {theta:g}")
    return ct0 ** -1.5 * (3.0 + theta) * math.sqrt(theta)


def mirror_arclength(c0: float, u: float) -> float:
    """Closed-form signed arc length from the neck along the mirror profile (oracle)."""
    sh = math.sinh(u)
    return math.sqrt(c0) * (sh + sh ** 3 / 3.0)


# ---------------------------------------------------------------------------
# Curve values
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ProfileCurve:
    """Planar curve (radius, height) with two derivatives.

    `kind` is one of "rho_graph", "theta", "arclength", "numeric"; only
    arclength-kind curves may be fed to `signed_curvature`.
    """

    point: Callable[[float], np.ndarray]
    velocity: Callable[[float], np.ndarray]
    acceleration: Callable[[float], np.ndarray]
    domain: tuple[float, float]
    kind: str = "numeric"

    def __call__(self, t: float) -> np.ndarray:
        return self.point(t)

    def speed(self, t: float) -> float:
        return float(np.linalg.norm(self.velocity(t)))

    def contains(self, t: float) -> bool:
        return self.domain[0] < t < self.domain[1]

    def mirrored(self) -> "ProfileCurve":
        """Reflection through the rotation plane (height -> -height)."""
        flip = np.array([1.0, -1.0])
        return replace(
            self,
            point=lambda t, p=self.point: flip * p(t),
            velocity=lambda t, v=self.velocity: flip * v(t),
            acceleration=lambda t, a=self.acceleration: flip * a(t),
        )


def _curve(p, v, a, domain, kind):
    return ProfileCurve(
        point=lambda t: np.array(p(t)),
        velocity=lambda t: np.array(v(t)),
        acceleration=lambda t: np.array(a(t)),
        domain=domain,
        kind=kind,
    )


def boundary_profile(ct0: float) -> ProfileCurve:
    """Ascending profile branch in the boundary-regular theta parameter."""
    if ct0 <= 0.0:
        raise OutOfDomain(f"ct0 must be positive, got {ct0:g}")
    return _curve(
        lambda t: sigma_theta(ct0, t),
        lambda t: sigma_theta_d1(ct0, t),
        lambda t: sigma_theta_d2(ct0, t),
        (0.0, math.inf),
        "theta",
    )


def graph_profile(ct0: float) -> ProfileCurve:
    """Profile as a graph over the radius (degenerates at the boundary)."""
    if ct0 <= 0.0:
        raise OutOfDomain(f"ct0 must be positive, got {ct0:g}")
    return _curve(
        lambda r: (r, u_profile(ct0, r)),
        lambda r: (1.0, u_profile_d1(ct0, r)),
        lambda r: (0.0, u_profile_d2(ct0, r)),
        (ct0 ** -1.5, math.inf),
        "rho_graph",
    )


def mirror_profile(c0: float) -> ProfileCurve:
    """Full mirror-extended profile, parametrized over the whole real line."""
    if c0 <= 0.0:
        raise OutOfDomain(f"c0 must be positive, got {c0:g}")
    return _curve(
        lambda u: mirror_sigma(c0, u),
        lambda u: mirror_sigma_d1(c0, u),
        lambda u: mirror_sigma_d2(c0, u),
        (-math.inf, math.inf),
        "numeric",
    )


# ---------------------------------------------------------------------------
# Arc-length reparametrization
# ---------------------------------------------------------------------------

def arclength_reparam(curve: ProfileCurve, t0: float, tol: float = 1e-10) -> ProfileCurve:
    """Reparametrize by cumulative arc length measured from t0.

    The arc-length function is computed by adaptive quadrature of the speed
    and inverted with a bracketed root find (monotone, globally safe). The
    returned curve is unit speed; direction of traversal is preserved.
    """
    if not curve.contains(t0):
        raise OutOfDomain(f"t0={t0:g} outside curve domain {curve.domain}")

    def arc(t: float) -> float:
        return quad_tol(curve.speed, t0, t, tol)

    def t_of_s(s: float) -> float:
        if s == 0.0:
            return t0
        lo, hi = (t0, t0 + 1.0) if s > 0.0 else (t0 - 1.0, t0)
        # expand the bracket geometrically, halving toward finite open edges
        for _ in range(200):
            if s > 0.0:
                if hi >= curve.domain[1]:
                    hi = t0 + 0.5 * (hi - t0) + 0.5 * (curve.domain[1] - t0)
                if arc(hi) >= s:
                    break
                lo, hi = hi, t0 + 2.0 * (hi - t0)
            else:
                if lo <= curve.domain[0]:
                    lo = t0 - 0.5 * (t0 - lo) - 0.5 * (t0 - curve.domain[0])
                if arc(lo) <= s:
                    break
                hi, lo = lo, t0 - 2.0 * (t0 - lo)
        else:
            raise OutOfDomain(f"arc length s={s:g} unreachable inside the domain")
        return invert_monotone(arc, s, lo, hi, xtol=1e-12)

    def p(s):
        return curve.point(t_of_s(s))

    def v(s):
        vel = curve.velocity(t_of_s(s))
        return vel / np.linalg.norm(vel)

    def a(s):
        t = t_of_s(s)
        vel = curve.velocity(t)
        acc = curve.acceleration(t)
        n2 = float(vel @ vel)
        return acc / n2 - vel * float(vel @ acc) / (n2 * n2)

    return ProfileCurve(point=p, velocity=v, acceleration=a, domain=(-math.inf, math.inf), kind="arclength")


# ---------------------------------------------------------------------------
# Curvature
# ---------------------------------------------------------------------------

def signed_curvature(curve: ProfileCurve, s: float) -> float:
    """Signed curvature of a unit-speed plane curve, (radius, height) oriented.

    Counterclockwise circles have curvature +1/r.
    """
    if curve.kind != "arclength":
        raise ValueError("signed_curvature requires an arclength-kind curve")
    vel = curve.velocity(s)
    acc = curve.acceleration(s)
    return float(vel[0] * acc[1] - vel[1] * acc[0])


def curvature_general(curve: ProfileCurve, t: float) -> float:
    """Signed curvature in an arbitrary regular parameter."""
    vel = curve.velocity(t)
    acc = curve.acceleration(t)
    sp = float(np.linalg.norm(vel))
    return float(vel[0] * acc[1] - vel[1] * acc[0]) / sp ** 3


@dataclass(frozen=True)
class OdeResidual:
    """Curvature-ODE residual with a step-halving error estimate."""

    value: float
    error_estimate: float


def _kappa_ode_rhs_residual(kappa: float, dkappa: float, d2kappa: float) -> float:
    return d2kappa * kappa - 1.75 * dkappa * dkappa + 4.0 * kappa ** 4


def curvature_ode_residual(curve: ProfileCurve, s: float, h: float = 1e-3) -> OdeResidual:
    """Residual of the profile curvature ODE at arc length s.

    kappa' and kappa'' come from central differences on `signed_curvature`;
    the error estimate is the Richardson difference against step h/2.
    """
    if curve.kind != "arclength":
        raise ValueError("curvature_ode_residual requires an arclength-kind curve")
    k = lambda x: signed_curvature(curve, x)

    def residual(step: float) -> float:
        return _kappa_ode_rhs_residual(k(s), central_first(k, s, step), central_second(k, s, step))

    r_h = residual(h)
    r_h2 = residual(h / 2.0)
    return OdeResidual(value=r_h2, error_estimate=abs(r_h - r_h2) / 3.0)


def curvature_ode_residual_param(curve: ProfileCurve, t: float, h: float = 1e-3) -> float:
    """Curvature-ODE residual for a curve in a general parameter.

    Arc-length derivatives are obtained by the chain rule d/ds = (1/|v|) d/dt
    with kappa(t) and |v|(t) differenced centrally; no quadrature involved.
    """
    k = lambda x: curvature_general(curve, x)
    sp = lambda x: curve.speed(x)
    kt = central_first(k, t, h)
    ktt = central_second(k, t, h)
    spt = central_first(sp, t, h)
    speed = sp(t)
    k_s = kt / speed
    k_ss = (ktt - kt * spt / speed) / (speed * speed)
    return _kappa_ode_rhs_residual(k(t), k_s, k_ss)


@dataclass(frozen=True)
class KappaPath:
    """Sampled solution of the curvature ODE as an initial-value problem."""

    s: np.ndarray
    kappa: np.ndarray
    dkappa: np.ndarray
    stop_reason: str


def integrate_curvature_ode(
    kappa0: float, dkappa0: float, s_span: tuple[float, float], step: float
) -> KappaPath:
    """Integrate kappa'' = ((7/4) kappa'^2 - 4 kappa^4) / kappa with fixed RK4.

    Halts (stop_reason "domain_exit") before kappa crosses the positivity
    floor 1e-10; raises Blowup when the state passes 1e12.
    """
    if kappa0 <= 0.0:
        raise OutOfDomain(f"kappa0 must be positive, got {kappa0:g}")
    from .numerics import integrate_fixed

    def rhs(_s, y):
        kap, dk = y
        return np.array([dk, (1.75 * dk * dk - 4.0 * kap ** 4) / kap])

    def monitor(_s, y):
        if y[0] <= KAPPA_FLOOR:
            return "domain_exit"
        return None

    ts, ys, stop = integrate_fixed(rhs, s_span[0], np.array([kappa0, dkappa0]), s_span[1], step, monitor)
    return KappaPath(s=ts, kappa=ys[:, 0], dkappa=ys[:, 1], stop_reason=stop)
