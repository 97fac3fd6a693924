"""Abstract-surface side: conformal metrics, curvature, geodesics, and the
characterizing ODE / quadrature of the biconservative family.

A metric g = e^(2 rho(u)) (du^2 + dv^2) is described by its log conformal
factor rho and the ambient curvature parameter c. For the canonical family

    e^(2 rho) = C0 cosh^6 u        (`cosh_power_metric`),

the Gauss curvature is K(u) = -3 / (C0 cosh^8 u) with
K'(u) = 24 sinh u / (C0 cosh^9 u), so grad K vanishes exactly on the u = 0
axis.

The characterizing second-order ODE

    rho'' = e^(-2 rho / 3) - c e^(2 rho),    rho' > 0,

conserves  a(u) = rho'^2 + 3 e^(-2 rho / 3) + c e^(2 rho), and its solutions
invert through the quadrature

    u = u0 + integral_{rho0}^{rho} dtau / sqrt(a - 3 e^(-2 tau/3) - c e^(2 tau)).

Normalization note: substituting the canonical rho(u) directly into the ODE
with c = 0 balances only for C0 = 1/27. For general C0 the coordinate
homothety (u, v) -> lam (u, v) with lam = (27 C0)^(1/8) renormalizes the
factor (rho_hat(u) = rho(u / lam) - log lam) so the ODE holds verbatim; see
`normalized_log_factor`. Curvature and level-curve identities are
normalization-free and are tested on the raw family.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import DomainExit, HypothesisViolated, OutOfDomain, RadicandNonpositive
from .numerics import central_first, central_second, integrate_fixed, quad_sqrt_endpoint, quad_tol

NEAR_TURNING_FACTOR = 1e-6  # radicand below this (times scale) uses the sqrt substitution


@dataclass(frozen=True)
class ConformalMetric:
    """Metric e^(2 rho(u)) (du^2 + dv^2) on a strip of the (u, v) plane.

    Derivative callables are optional; central differences (step 1e-5,
    relative) fill in whatever is missing.
    """

    rho: Callable[[float], float]
    drho: Callable[[float], float] | None = None
    d2rho: Callable[[float], float] | None = None
    d3rho: Callable[[float], float] | None = None
    c: float = 0.0
    u_min: float = -math.inf
    u_max: float = math.inf
    label: str = "conformal"

    def _h(self, u: float) -> float:
        return 1e-5 * max(1.0, abs(u))

    def rho_d1(self, u: float) -> float:
        if self.drho is not None:
            return self.drho(u)
        return central_first(self.rho, u, self._h(u))

    def rho_d2(self, u: float) -> float:
        if self.d2rho is not None:
            return self.d2rho(u)
        return central_second(self.rho, u, self._h(u))

    def rho_d3(self, u: float) -> float:
        if self.d3rho is not None:
            return self.d3rho(u)
        if self.d2rho is not None:
            return central_first(self.d2rho, u, self._h(u))
        return central_first(lambda x: central_second(self.rho, x, self._h(u)), u, self._h(u))

    def factor(self, u: float) -> float:
        """Conformal factor e^(2 rho(u))."""
        return math.exp(2.0 * self.rho(u))

    def contains(self, u: float) -> bool:
        return self.u_min < u < self.u_max


def _log_cosh(u):
    # overflow-safe log(cosh u); accepts scalars and arrays
    au = np.abs(u)
    return au + np.log1p(np.exp(-2.0 * au)) - math.log(2.0)


def cosh_power_metric(c0: float, c: float = 0.0) -> ConformalMetric:
    """The canonical family: e^(2 rho) = C0 cosh^6 u on the whole plane.

    All derivative callables accept numpy arrays, so geodesic batches
    integrate without per-point Python dispatch.
    """
    if c0 <= 0.0:
        raise OutOfDomain(f"C0 must be positive, got {c0:g}")
    half_log = 0.5 * math.log(c0)
    return ConformalMetric(
        rho=lambda u: half_log + 3.0 * _log_cosh(u),
        drho=lambda u: 3.0 * np.tanh(u),
        d2rho=lambda u: 3.0 / np.cosh(u) ** 2,
        d3rho=lambda u: -6.0 * np.tanh(u) / np.cosh(u) ** 2,
        c=c,
        label=f"gc0:C0={c0:g}",
    )


def flat_metric(scale: float = 1.0) -> ConformalMetric:
    log_s = math.log(scale)
    zero = lambda u: 0.0
    return ConformalMetric(rho=lambda u: log_s, drho=zero, d2rho=zero, d3rho=zero, label="flat")


def normalizing_homothety(c0: float) -> float:
    """Coordinate scale lam with rho_hat(u) = rho(u/lam) - log(lam) solving the c=0 ODE."""
    return (27.0 * c0) ** 0.125


def normalized_log_factor(c0: float) -> ConformalMetric:
    """cosh_power_metric(c0) rewritten in homothety-normalized coordinates."""
    lam = normalizing_homothety(c0)
    base = cosh_power_metric(c0)
    return ConformalMetric(
        rho=lambda u: base.rho(u / lam) - math.log(lam),
        drho=lambda u: base.drho(u / lam) / lam,
        d2rho=lambda u: base.d2rho(u / lam) / lam ** 2,
        d3rho=lambda u: base.d3rho(u / lam) / lam ** 3,
        c=0.0,
        label=f"gc0-normalized:C0={c0:g}",
    )


# ---------------------------------------------------------------------------
# Curvature and the level-curve identity
# ---------------------------------------------------------------------------

def gauss_curvature_conformal(m: ConformalMetric, u: float) -> float:
    """K = -e^(-2 rho) rho'' for a u-only conformal factor."""
    if not m.contains(u):
        raise OutOfDomain(f"u={u:g} outside metric domain")
    return -math.exp(-2.0 * m.rho(u)) * m.rho_d2(u)


def gauss_curvature_du(m: ConformalMetric, u: float) -> float:
    """dK/du = e^(-2 rho) (2 rho' rho'' - rho''')."""
    return math.exp(-2.0 * m.rho(u)) * (2.0 * m.rho_d1(u) * m.rho_d2(u) - m.rho_d3(u))


def coordinate_circle_curvature(m: ConformalMetric, u: float) -> float:
    """Geodesic curvature e^(-rho) |rho'| of the level curve u = const."""
    return math.exp(-m.rho(u)) * abs(m.rho_d1(u))


def level_curve_identity_residual(m: ConformalMetric, u: float) -> float:
    """kappa_g - 3 |grad K| / (8 (c - K)) at the coordinate circle through u.

    Requires the hypotheses c - K > 0 and grad K != 0; violations raise
    HypothesisViolated (e.g. u = 0 on the canonical family, or any metric
    of constant curvature).
    """
    if not m.contains(u):
        raise OutOfDomain(f"u={u:g} outside metric domain")
    K = gauss_curvature_conformal(m, u)
    dK = gauss_curvature_du(m, u)
    gap = m.c - K
    if gap <= 0.0:
        raise HypothesisViolated(f"c - K = {gap:g} is not positive at u={u:g}")
    scale = abs(K) + abs(m.c) + 1.0
    if abs(dK) <= 1e-14 * scale:
        raise HypothesisViolated(f"grad K vanishes at u={u:g}")
    grad_k_norm = math.exp(-m.rho(u)) * abs(dK)
    return coordinate_circle_curvature(m, u) - 3.0 * grad_k_norm / (8.0 * gap)


# ---------------------------------------------------------------------------
# Characterizing ODE and quadrature
# ---------------------------------------------------------------------------

def first_integral(c: float, rho: float, drho: float):
    """Conserved quantity a = rho'^2 + 3 e^(-2 rho/3) + c e^(2 rho)."""
    return drho ** 2 + 3.0 * np.exp(-2.0 * rho / 3.0) + c * np.exp(2.0 * rho)


@dataclass(frozen=True)
class RhoPath:
    """Fixed-step solution samples of the characterizing ODE."""

    u: np.ndarray
    rho: np.ndarray
    drho: np.ndarray
    a: np.ndarray
    stop_reason: str = "completed"

    def max_first_integral_drift(self) -> float:
        return float(np.max(np.abs(self.a - self.a[0])))


def rho_ode_integrate(
    c: float, rho0: float, drho0: float, u_span: tuple[float, float], step: float
) -> RhoPath:
    """Integrate rho'' = e^(-2 rho/3) - c e^(2 rho) with fixed-step RK4.

    Emits the first integral at every sample; conservation drift is the
    standard integration-quality gate.
    """

    def rhs(_u, y):
        rho, drho = y
        return np.array([drho, math.exp(-2.0 * rho / 3.0) - c * math.exp(2.0 * rho)])

    us, ys, stop = integrate_fixed(rhs, u_span[0], np.array([rho0, drho0]), u_span[1], step)
    return RhoPath(u=us, rho=ys[:, 0], drho=ys[:, 1], a=first_integral(c, ys[:, 0], ys[:, 1]), stop_reason=stop)


def rho_quadrature(
    c: float,
    a: float,
    rho0: float,
    u0: float,
    rho_target: float,
    tol: float = 1e-10,
    increasing: bool = True,
) -> float:
    """Invert the ODE through u = u0 + integral drho / sqrt(a - 3 e^(-2 tau/3) - c e^(2 tau)).

    The default orientation follows the rho' > 0 regime; pass
    increasing=False for the descending branch (the integral's sign flips).
    Raises RadicandNonpositive (with the violating tau) when the radicand is
    not positive on the closed interval, including its endpoints; endpoints
    where the radicand is positive but tiny are handled with a square-root
    substitution that keeps the integrand smooth near turning points.
    """
    lo, hi = min(rho0, rho_target), max(rho0, rho_target)

    def radicand(tau: float) -> float:
        return a - 3.0 * math.exp(-2.0 * tau / 3.0) - c * math.exp(2.0 * tau)

    scale = abs(a) + 1.0
    n_check = 33
    taus = np.linspace(lo, hi, n_check) if hi > lo else np.array([lo])
    vals = np.array([radicand(t) for t in taus])
    bad = np.where(vals <= 0.0)[0]
    if bad.size:
        tau_bad = float(taus[bad[0]])
        raise RadicandNonpositive(
            f"radicand {vals[bad[0]]:g} is not positive at tau={tau_bad:g}", tau=tau_bad
        )
    if rho_target == rho0:
        return u0

    integrand = lambda tau: 1.0 / math.sqrt(radicand(tau))
    near = NEAR_TURNING_FACTOR * scale
    if vals[0] < near and vals[-1] < near:
        mid = 0.5 * (lo + hi)
        value = quad_sqrt_endpoint(integrand, lo, mid, tol, at="lower") + quad_sqrt_endpoint(
            integrand, mid, hi, tol, at="upper"
        )
    elif vals[0] < near:
        value = quad_sqrt_endpoint(integrand, lo, hi, tol, at="lower")
    elif vals[-1] < near:
        value = quad_sqrt_endpoint(integrand, lo, hi, tol, at="upper")
    else:
        value = quad_tol(integrand, lo, hi, tol)

    direction = 1.0 if increasing else -1.0
    if rho_target < rho0:
        direction = -direction
    return u0 + direction * value


# ---------------------------------------------------------------------------
# Geodesics
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GeodesicState:
    """Position, chart velocity and accumulated arc length along a geodesic."""

    u: float
    v: float
    du: float
    dv: float
    s: float = 0.0


@dataclass(frozen=True)
class GeodesicPath:
    """Sampled geodesic with its two conserved-quantity diagnostics."""

    s: np.ndarray
    u: np.ndarray
    v: np.ndarray
    du: np.ndarray
    dv: np.ndarray
    clairaut: np.ndarray      # e^(2 rho) v_dot, conserved (rotational symmetry)
    speed_sq: np.ndarray      # e^(2 rho) (u_dot^2 + v_dot^2), 1 for unit speed

    def max_clairaut_drift(self) -> float:
        return float(np.max(np.abs(self.clairaut - self.clairaut[0])))

    def max_speed_drift(self) -> float:
        return float(np.max(np.abs(self.speed_sq - self.speed_sq[0])))


def unit_speed_state(m: ConformalMetric, u: float, v: float, angle: float) -> GeodesicState:
    """Unit-speed initial state at (u, v) with chart direction `angle`."""
    norm = math.exp(-m.rho(u))
    return GeodesicState(u=u, v=v, du=norm * math.cos(angle), dv=norm * math.sin(angle))


def _vectorized(fn, x: np.ndarray) -> np.ndarray:
    """Apply a scalar-or-ufunc callable to an array, falling back elementwise."""
    try:
        out = np.asarray(fn(x), dtype=float)
        if out.shape == x.shape:
            return out
    except (TypeError, ValueError):
        pass
    return np.array([fn(xi) for xi in x], dtype=float)


def _geodesic_rhs(m: ConformalMetric):
    # Christoffels of e^(2 rho(u)) delta: G^u_uu = rho', G^u_vv = -rho', G^v_uv = rho'
    fallback = m.drho if m.drho is not None else m.rho_d1

    def rhs(_s, y):
        y = np.atleast_2d(y)
        dp = np.empty_like(y)
        rp = _vectorized(fallback, y[:, 0])
        dp[:, 0] = y[:, 2]
        dp[:, 1] = y[:, 3]
        dp[:, 2] = -rp * (y[:, 2] ** 2 - y[:, 3] ** 2)
        dp[:, 3] = -2.0 * rp * y[:, 2] * y[:, 3]
        return dp

    return rhs


def geodesic_shoot(
    m: ConformalMetric,
    start: GeodesicState,
    length: float,
    step: float,
    record_every: int = 1,
) -> GeodesicPath:
    """Integrate the geodesic equation to the requested arc length.

    Raises DomainExit if u leaves the metric's strip and Blowup on overflow.
    record_every thins the stored samples; drift diagnostics still see every
    recorded sample.
    """
    paths = geodesic_fan(m, [start], length, step, record_every)
    return paths[0]


def geodesic_fan(
    m: ConformalMetric,
    starts: list[GeodesicState],
    length: float,
    step: float,
    record_every: int = 1,
) -> list[GeodesicPath]:
    """Integrate a batch of geodesics with one vectorized fixed-step loop."""
    if step <= 0.0:
        raise ValueError("step must be positive")
    if record_every < 1:
        raise ValueError("record_every must be >= 1")
    rhs = _geodesic_rhs(m)
    y = np.array([[st.u, st.v, st.du, st.dv] for st in starts], dtype=float)
    n = max(1, int(round(length / step)))
    h = length / n
    s0 = starts[0].s
    samples = [(s0, y.copy())]
    from .numerics import BLOWUP_LIMIT, rk4_step

    for i in range(n):
        y = rk4_step(rhs, s0 + i * h, y, h)
        if not np.all(np.isfinite(y)) or np.max(np.abs(y)) > BLOWUP_LIMIT:
            from .errors import Blowup

            raise Blowup(f"geodesic state exceeded {BLOWUP_LIMIT:g} at s={s0 + (i + 1) * h:g}")
        if np.any(y[:, 0] <= m.u_min) or np.any(y[:, 0] >= m.u_max):
            raise DomainExit(f"geodesic left the metric domain at s={s0 + (i + 1) * h:g}")
        if (i + 1) % record_every == 0 or i == n - 1:
            samples.append((s0 + (i + 1) * h, y.copy()))

    ss = np.array([s for s, _ in samples])
    states = np.stack([st for _, st in samples])  # (n_samples, n_geod, 4)
    out = []
    for j in range(len(starts)):
        uj = states[:, j, 0]
        fac = np.exp(2.0 * _vectorized(m.rho, uj))
        duj, dvj = states[:, j, 2], states[:, j, 3]
        out.append(
            GeodesicPath(
                s=ss,
                u=uj,
                v=states[:, j, 1],
                du=duj,
                dv=dvj,
                clairaut=fac * dvj,
                speed_sq=fac * (duj ** 2 + dvj ** 2),
            )
        )
    return out
