"""Catalog of concrete surfaces with analytic jets.

Two biconservative families of revolution about Oz, plus CMC positive
controls (sphere, cylinder) and a non-biconservative negative control
(triaxial ellipsoid).

* `HalfRevolutionSurface` (CLI id ``sc``): the open half surface bounded by
  the circle of radius Ct0^(-3/2) in the Oxy plane. Canonical chart is the
  boundary-regular ``theta`` chart (theta > 0, v the rotation angle); a
  ``rho`` graph chart is provided but degenerates at the boundary.

* `CompleteRevolutionSurface` (CLI id ``stilde``): the complete surface
  obtained by extending the half surface with its mirror image through the
  Oxy plane, realized by a single global chart

      (u, v) -> (r(u) cos 3v, r(u) sin 3v, z(u)),
      r = sqrt(C0)/3 cosh^3 u,   z = sqrt(C0)/2 (sinh(2u)/2 + u),

  smooth across the neck u = 0 where the rho chart breaks down.

The two parameters describe the same neck circle through the dictionary
Ct0^(-3/2) = sqrt(C0)/3, i.e. C0 = 9 * Ct0^(-3) (`ct0_to_c0`); matched
parameters make the half surface exactly the u > 0 part of the complete
one under theta = sinh^2 u, v_half = 3 v.

Normal orientation per family is fixed so the mean curvature f = trace(A)
is positive on the canonical families; for controls it is an explicit
constructor argument.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import profiles
from .diffgeo import Jet2
from .errors import ConfigError, OutOfDomain


@dataclass(frozen=True)
class ChartDomain:
    """Open rectangle (possibly unbounded); v may be periodic."""

    u_min: float = -math.inf
    u_max: float = math.inf
    v_min: float = -math.inf
    v_max: float = math.inf
    v_period: float | None = None

    def contains(self, u: float, v: float) -> bool:
        return self.u_min < u < self.u_max and self.v_min < v < self.v_max


class SurfaceFamily:
    """Immutable description of a parametric surface; evaluation is pure."""

    kind: str = ""
    orientation_sign: float = 1.0
    charts: dict[str, ChartDomain] = {}
    default_chart: str = ""

    def params(self) -> dict[str, float]:
        raise NotImplementedError

    def spec_string(self) -> str:
        inner = ",".join(f"{k}={v:g}" for k, v in self.params().items())
        return f"{self.kind}:{inner}"

    def domain(self, chart_id: str | None = None) -> ChartDomain:
        cid = chart_id or self.default_chart
        try:
            return self.charts[cid]
        except KeyError:
            raise OutOfDomain(f"{self.spec_string()} has no chart '{cid}'") from None

    def contains(self, u: float, v: float, chart_id: str | None = None) -> bool:
        return self.domain(chart_id).contains(u, v)

    def position(self, u: float, v: float, chart_id: str | None = None) -> np.ndarray:
        raise NotImplementedError

    def jet(self, u: float, v: float, chart_id: str | None = None) -> Jet2 | None:
        """Closed-form Jet2, or None when the family has no analytic jets."""
        raise NotImplementedError


def _revolution_jet(s1, s2, d1, d2, dd1, dd2, v, ang_speed=1.0):
    """Jet of (s1(t) cos(w v), s1(t) sin(w v), s2(t)) from profile derivatives."""
    w = ang_speed
    cw, sw = math.cos(w * v), math.sin(w * v)
    return Jet2(
        position=np.array([s1 * cw, s1 * sw, s2]),
        d_u=np.array([d1 * cw, d1 * sw, d2]),
        d_v=np.array([-w * s1 * sw, w * s1 * cw, 0.0]),
        d_uu=np.array([dd1 * cw, dd1 * sw, dd2]),
        d_uv=np.array([-w * d1 * sw, w * d1 * cw, 0.0]),
        d_vv=np.array([-w * w * s1 * cw, -w * w * s1 * sw, 0.0]),
    )


# ---------------------------------------------------------------------------
# Biconservative families
# ---------------------------------------------------------------------------

def ct0_to_c0(ct0: float) -> float:
    """Neck-radius dictionary between the two family parameters."""
    return 9.0 * ct0 ** -3


def c0_to_ct0(c0: float) -> float:
    return (9.0 / c0) ** (1.0 / 3.0)


@dataclass(frozen=True)
class HalfRevolutionSurface(SurfaceFamily):
    """Half revolution surface above its boundary circle (f > 0, grad f != 0)."""

    ct0: float
    kind: str = field(default="sc", init=False)
    orientation_sign: float = field(default=1.0, init=False)
    default_chart: str = field(default="theta", init=False)

    def __post_init__(self):
        if self.ct0 <= 0.0:
            raise ConfigError(f"Ct0 must be positive, got {self.ct0:g}")
        object.__setattr__(self, "charts", {
            "theta": ChartDomain(u_min=0.0, v_period=2.0 * math.pi),
            "rho": ChartDomain(u_min=self.ct0 ** -1.5, v_period=2.0 * math.pi),
        })

    def params(self):
        return {"Ct0": self.ct0}

    def boundary_radius(self) -> float:
        return self.ct0 ** -1.5

    def boundary_mean_curvature(self) -> float:
        """Limit of f along the boundary circle: (2/3) Ct0^(3/2)."""
        return (2.0 / 3.0) * self.ct0 ** 1.5

    def position(self, u, v, chart_id=None):
        cid = chart_id or self.default_chart
        if cid == "theta":
            s1, s2 = profiles.sigma_theta(self.ct0, u)
        elif cid == "rho":
            s1, s2 = u, profiles.u_profile(self.ct0, u)
        else:
            raise OutOfDomain(f"no chart '{cid}'")
        return np.array([s1 * math.cos(v), s1 * math.sin(v), s2])

    def jet(self, u, v, chart_id=None):
        cid = chart_id or self.default_chart
        if cid == "theta":
            s1, s2 = profiles.sigma_theta(self.ct0, u)
            d1, d2 = profiles.sigma_theta_d1(self.ct0, u)
            dd1, dd2 = profiles.sigma_theta_d2(self.ct0, u)
        elif cid == "rho":
            s1, s2 = u, profiles.u_profile(self.ct0, u)
            d1, d2 = 1.0, profiles.u_profile_d1(self.ct0, u)
            dd1, dd2 = 0.0, profiles.u_profile_d2(self.ct0, u)
        else:
            raise OutOfDomain(f"no chart '{cid}'")
        return _revolution_jet(s1, s2, d1, d2, dd1, dd2, v)

    def profile(self, chart_id: str = "theta") -> profiles.ProfileCurve:
        if chart_id == "theta":
            return profiles.boundary_profile(self.ct0)
        if chart_id == "rho":
            return profiles.graph_profile(self.ct0)
        raise OutOfDomain(f"no profile chart '{chart_id}'")


@dataclass(frozen=True)
class CompleteRevolutionSurface(SurfaceFamily):
    """Mirror-extended complete revolution surface, global chart over R^2."""

    c0: float
    kind: str = field(default="stilde", init=False)
    orientation_sign: float = field(default=1.0, init=False)
    default_chart: str = field(default="uv", init=False)

    def __post_init__(self):
        if self.c0 <= 0.0:
            raise ConfigError(f"C0 must be positive, got {self.c0:g}")
        object.__setattr__(self, "charts", {
            "uv": ChartDomain(v_period=2.0 * math.pi / 3.0),
        })

    def params(self):
        return {"C0": self.c0}

    def neck_radius(self) -> float:
        return math.sqrt(self.c0) / 3.0

    def position(self, u, v, chart_id=None):
        s1, s2 = profiles.mirror_sigma(self.c0, u)
        return np.array([s1 * math.cos(3.0 * v), s1 * math.sin(3.0 * v), s2])

    def jet(self, u, v, chart_id=None):
        s1, s2 = profiles.mirror_sigma(self.c0, u)
        d1, d2 = profiles.mirror_sigma_d1(self.c0, u)
        dd1, dd2 = profiles.mirror_sigma_d2(self.c0, u)
        return _revolution_jet(s1, s2, d1, d2, dd1, dd2, v, ang_speed=3.0)

    def profile(self) -> profiles.ProfileCurve:
        return profiles.mirror_profile(self.c0)

    def mean_curvature_exact(self, u: float) -> float:
        """Closed-form f(u) = 2 / (sqrt(C0) cosh^4 u), the trace of A."""
        return 2.0 / (math.sqrt(self.c0) * math.cosh(u) ** 4)

    def gauss_curvature_exact(self, u: float) -> float:
        """Closed-form K(u) = -3 / (C0 cosh^8 u)."""
        return -3.0 / (self.c0 * math.cosh(u) ** 8)


# ---------------------------------------------------------------------------
# Control surfaces
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Sphere(SurfaceFamily):
    """Round sphere, colatitude/longitude chart excluding the poles."""

    r: float
    orientation_sign: float = -1.0  # flip outward normal so f = 2/r > 0
    kind: str = field(default="sphere", init=False)
    default_chart: str = field(default="uv", init=False)

    def __post_init__(self):
        if self.r <= 0.0:
            raise ConfigError(f"r must be positive, got {self.r:g}")
        object.__setattr__(self, "charts", {
            "uv": ChartDomain(u_min=0.0, u_max=math.pi, v_period=2.0 * math.pi),
        })

    def params(self):
        return {"r": self.r}

    def position(self, u, v, chart_id=None):
        r = self.r
        return np.array([r * math.sin(u) * math.cos(v), r * math.sin(u) * math.sin(v), r * math.cos(u)])

    def jet(self, u, v, chart_id=None):
        r = self.r
        su, cu, sv, cv = math.sin(u), math.cos(u), math.sin(v), math.cos(v)
        return Jet2(
            position=np.array([r * su * cv, r * su * sv, r * cu]),
            d_u=np.array([r * cu * cv, r * cu * sv, -r * su]),
            d_v=np.array([-r * su * sv, r * su * cv, 0.0]),
            d_uu=np.array([-r * su * cv, -r * su * sv, -r * cu]),
            d_uv=np.array([-r * cu * sv, r * cu * cv, 0.0]),
            d_vv=np.array([-r * su * cv, -r * su * sv, 0.0]),
        )


@dataclass(frozen=True)
class Cylinder(SurfaceFamily):
    """Circular cylinder of radius r about Oz; u is height, v the angle."""

    r: float
    orientation_sign: float = 1.0
    kind: str = field(default="cylinder", init=False)
    default_chart: str = field(default="uv", init=False)

    def __post_init__(self):
        if self.r <= 0.0:
            raise ConfigError(f"r must be positive, got {self.r:g}")
        object.__setattr__(self, "charts", {"uv": ChartDomain(v_period=2.0 * math.pi)})

    def params(self):
        return {"r": self.r}

    def position(self, u, v, chart_id=None):
        return np.array([self.r * math.cos(v), self.r * math.sin(v), u])

    def jet(self, u, v, chart_id=None):
        r, sv, cv = self.r, math.sin(v), math.cos(v)
        zero = np.zeros(3)
        return Jet2(
            position=np.array([r * cv, r * sv, u]),
            d_u=np.array([0.0, 0.0, 1.0]),
            d_v=np.array([-r * sv, r * cv, 0.0]),
            d_uu=zero,
            d_uv=zero,
            d_vv=np.array([-r * cv, -r * sv, 0.0]),
        )


@dataclass(frozen=True)
class Ellipsoid(SurfaceFamily):
    """Triaxial ellipsoid: compact, analytic, and not biconservative."""

    a: float
    b: float
    c: float
    orientation_sign: float = -1.0
    kind: str = field(default="ellipsoid", init=False)
    default_chart: str = field(default="uv", init=False)

    def __post_init__(self):
        if min(self.a, self.b, self.c) <= 0.0:
            raise ConfigError("ellipsoid semi-axes must be positive")
        object.__setattr__(self, "charts", {
            "uv": ChartDomain(u_min=0.0, u_max=math.pi, v_period=2.0 * math.pi),
        })

    def params(self):
        return {"a": self.a, "b": self.b, "c": self.c}

    def position(self, u, v, chart_id=None):
        return np.array([
            self.a * math.sin(u) * math.cos(v),
            self.b * math.sin(u) * math.sin(v),
            self.c * math.cos(u),
        ])

    def jet(self, u, v, chart_id=None):
        a, b, c = self.a, self.b, self.c
        su, cu, sv, cv = math.sin(u), math.cos(u), math.sin(v), math.cos(v)
        return Jet2(
            position=np.array([a * su * cv, b * su * sv, c * cu]),
            d_u=np.array([a * cu * cv, b * cu * sv, -c * su]),
            d_v=np.array([-a * su * sv, b * su * cv, 0.0]),
            d_uu=np.array([-a * su * cv, -b * su * sv, -c * cu]),
            d_uv=np.array([-a * cu * sv, b * cu * cv, 0.0]),
            d_vv=np.array([-a * su * cv, -b * su * sv, 0.0]),
        )


# ---------------------------------------------------------------------------
# Family spec parsing (CLI grammar: name:key=val,key=val)
# ---------------------------------------------------------------------------

_FAMILY_KEYS = {
    "sc": ("Ct0",),
    "stilde": ("C0",),
    "sphere": ("r",),
    "cylinder": ("r",),
    "ellipsoid": ("a", "b", "c"),
}


def parse_family(spec: str) -> SurfaceFamily:
    """Build a family from a spec string like ``sc:Ct0=1.2`` (see _FAMILY_KEYS)."""
    name, _, rest = spec.partition(":")
    name = name.strip()
    if name not in _FAMILY_KEYS:
        known = ", ".join(sorted(_FAMILY_KEYS))
        raise ConfigError(f"unknown family '{name}' (known: {known})")
    kv: dict[str, float] = {}
    if rest.strip():
        for i, item in enumerate(rest.split(",")):
            key, sep, val = item.partition("=")
            if not sep:
                raise ConfigError(f"family spec '{spec}': item {i + 1} ('{item}') is not key=value")
            try:
                kv[key.strip()] = float(val)
            except ValueError:
                raise ConfigError(f"family spec '{spec}': value '{val}' of '{key.strip()}' is not a number") from None
    expected = _FAMILY_KEYS[name]
    unknown = set(kv) - set(expected)
    if unknown:
        raise ConfigError(f"family spec '{spec}': unknown keys {sorted(unknown)} (expected {list(expected)})")
    missing = set(expected) - set(kv)
    if missing:
        raise ConfigError(f"family spec '{spec}': missing keys {sorted(missing)}")
    try:
        if name == "sc":
            return HalfRevolutionSurface(kv["Ct0"])
        if name == "stilde":
            return CompleteRevolutionSurface(kv["C0"])
        if name == "sphere":
            return Sphere(kv["r"])
        if name == "cylinder":
            return Cylinder(kv["r"])
        return Ellipsoid(kv["a"], kv["b"], kv["c"])
    except ConfigError as exc:
        raise ConfigError(f"family spec '{spec}': {exc}") from None
