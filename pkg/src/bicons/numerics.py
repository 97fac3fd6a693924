"""Shared numerical kernels.

Fixed-step Runge-Kutta integration, central-difference stencils, Richardson
extrapolation, limit fitting, Fornberg differentiation weights, and thin
wrappers around scipy's adaptive quadrature / bracketed root finding.

The integrators are deliberately fixed-step (no adaptive libraries) so that
two runs with identical inputs produce bit-identical trajectories.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Sequence

import numpy as np
from scipy.integrate import quad as _scipy_quad
from scipy.optimize import brentq as _brentq

from .errors import Blowup, QuadratureFailure

BLOWUP_LIMIT = 1e12


# ---------------------------------------------------------------------------
# Fixed-step integration
# ---------------------------------------------------------------------------

def rk4_step(f: Callable, t: float, y: np.ndarray, h: float) -> np.ndarray:
    """One classical Runge-Kutta step of size h. y may be batched."""
    k1 = f(t, y)
    k2 = f(t + 0.5 * h, y + 0.5 * h * k1)
    k3 = f(t + 0.5 * h, y + 0.5 * h * k2)
    k4 = f(t + h, y + h * k3)
    return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def integrate_fixed(
    f: Callable,
    t0: float,
    y0: np.ndarray,
    t1: float,
    step: float,
    monitor: Callable[[float, np.ndarray], str | None] | None = None,
):
    """Integrate y' = f(t, y) from t0 to t1 with a fixed RK4 step.

    The nominal step is adjusted so the final sample lands exactly on t1.
    `monitor(t, y)` is called after every accepted step; returning a string
    stops the integration and the string is reported as the stop reason.

    Returns (ts, ys, stop_reason) with ys stacked along axis 0 and
    stop_reason "completed" when t1 was reached.
    """
    if step <= 0.0:
        raise ValueError("step must be positive")
    span = t1 - t0
    n = max(1, int(round(abs(span) / step)))
    h = span / n
    y = np.asarray(y0, dtype=float)
    ts = [t0]
    ys = [y]
    stop = "completed"
    for i in range(n):
        t = t0 + i * h
        y = rk4_step(f, t, y, h)
        if not np.all(np.isfinite(y)) or np.max(np.abs(y)) > BLOWUP_LIMIT:
            raise Blowup(f"integration state exceeded {BLOWUP_LIMIT:g} at t={t + h:g}")
        ts.append(t0 + (i + 1) * h)
        ys.append(y)
        if monitor is not None:
            reason = monitor(ts[-1], y)
            if reason is not None:
                stop = reason
                break
    return np.asarray(ts), np.stack(ys), stop


# ---------------------------------------------------------------------------
# Finite differences
# ---------------------------------------------------------------------------

def central_first(f: Callable[[float], float], x: float, h: float) -> float:
    return (f(x + h) - f(x - h)) / (2.0 * h)


def central_second(f: Callable[[float], float], x: float, h: float) -> float:
    return (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h)


def central_mixed(f: Callable[[float, float], float], u: float, v: float, h: float) -> float:
    return (f(u + h, v + h) - f(u + h, v - h) - f(u - h, v + h) + f(u - h, v - h)) / (4.0 * h * h)


def fornberg_weights(z: float, x: Sequence[float], m: int) -> np.ndarray:
    """Finite-difference weights on arbitrary nodes (Fornberg's recursion).

    Returns an array w of shape (m+1, len(x)) such that
    sum_j w[k, j] * f(x[j]) approximates the k-th derivative of f at z.
    """
    x = np.asarray(x, dtype=float)
    n = len(x)
    if m >= n:
        raise ValueError("need at least m+1 nodes for the m-th derivative")
    w = np.zeros((m + 1, n))
    c1 = 1.0
    c4 = x[0] - z
    w[0, 0] = 1.0
    for i in range(1, n):
        mn = min(i, m)
        c2 = 1.0
        c5 = c4
        c4 = x[i] - z
        for j in range(i):
            c3 = x[i] - x[j]
            c2 *= c3
            if j == i - 1:
                for k in range(mn, 0, -1):
                    w[k, i] = c1 * (k * w[k - 1, i - 1] - c5 * w[k, i - 1]) / c2
                w[0, i] = -c1 * c5 * w[0, i - 1] / c2
            for k in range(mn, 0, -1):
                w[k, j] = ((c4 * w[k, j]) - k * w[k - 1, j]) / c3
            w[0, j] = c4 * w[0, j] / c3
        c1 = c2
    return w


# ---------------------------------------------------------------------------
# Extrapolation and convergence diagnostics
# ---------------------------------------------------------------------------

def richardson_extrapolate(values: Sequence, p: int, r: float = 2.0):
    """Richardson ladder for approximations with leading error order p.

    `values` are computed at steps decreasing by the factor r; successive
    integer orders p, p+1, ... are eliminated.
    """
    vals = [np.asarray(v, dtype=float) for v in values]
    n = len(vals)
    if n < 2:
        raise ValueError("need at least two values to extrapolate")
    for j in range(1, n):
        factor = r ** (p + j - 1)
        for k in range(n - 1, j - 1, -1):
            vals[k] = (factor * vals[k] - vals[k - 1]) / (factor - 1.0)
    out = vals[-1]
    return float(out) if out.ndim == 0 else out


def fit_limit(xs: Sequence[float], ys: Sequence[float], exponents: Sequence[float]) -> float:
    """Limit of y(x) as x -> 0 assuming y = a0 + sum_i a_i x^{p_i}.

    Solves the small Vandermonde system on the given samples and returns a0.
    len(xs) must equal len(exponents) + 1.
    """
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    if len(xs) != len(exponents) + 1:
        raise ValueError("need exactly len(exponents)+1 samples")
    cols = [np.ones_like(xs)] + [xs ** p for p in exponents]
    coeffs = np.linalg.solve(np.column_stack(cols), ys)
    return float(coeffs[0])


def observed_order(err_coarse: float, err_fine: float, ratio: float = 2.0) -> float:
    """log-ratio convergence order from errors at steps h and h/ratio."""
    if err_fine == 0.0:
        return math.inf
    return math.log(abs(err_coarse) / abs(err_fine)) / math.log(ratio)


# ---------------------------------------------------------------------------
# Quadrature and root bracketing
# ---------------------------------------------------------------------------

def quad_tol(f: Callable[[float], float], a: float, b: float, tol: float = 1e-10) -> float:
    """Adaptive quadrature with a hard absolute-error gate."""
    if a == b:
        return 0.0
    value, err = _scipy_quad(f, a, b, epsabs=tol, epsrel=tol, limit=200)
    if err > max(tol, tol * abs(value)) * 10.0:
        raise QuadratureFailure(
            f"quadrature error estimate {err:g} exceeds tolerance {tol:g} on [{a:g}, {b:g}]"
        )
    return value


def quad_sqrt_endpoint(
    f: Callable[[float], float], a: float, b: float, tol: float = 1e-10, at: str = "lower"
) -> float:
    """Quadrature of f over [a, b] when f ~ (x - a)^(-1/2) at an endpoint.

    Substitutes x = a + s^2 (or x = b - s^2), which turns an inverse-square-root
    endpoint singularity into a smooth integrand.
    """
    if b < a:
        return -quad_sqrt_endpoint(f, b, a, tol, at)
    width = b - a
    if width == 0.0:
        return 0.0
    if at == "lower":
        g = lambda s: 2.0 * s * f(a + s * s)
    elif at == "upper":
        g = lambda s: 2.0 * s * f(b - s * s)
    else:
        raise ValueError("at must be 'lower' or 'upper'")
    return quad_tol(g, 0.0, math.sqrt(width), tol)


def invert_monotone(
    fn: Callable[[float], float],
    target: float,
    lo: float,
    hi: float,
    xtol: float = 1e-12,
) -> float:
    """Solve fn(x) = target for increasing fn on the bracket [lo, hi]."""
    g = lambda x: fn(x) - target
    glo, ghi = g(lo), g(hi)
    if glo == 0.0:
        return lo
    if ghi == 0.0:
        return hi
    if glo * ghi > 0.0:
        raise ValueError(f"target {target:g} not bracketed by [{lo:g}, {hi:g}]")
    return float(_brentq(g, lo, hi, xtol=xtol, rtol=8.881784197001252e-16))


# ---------------------------------------------------------------------------
# Deterministic parallel map
# ---------------------------------------------------------------------------

def thread_count() -> int:
    """Worker cap from BICONS_THREADS (default: single-threaded)."""
    raw = os.environ.get("BICONS_THREADS", "")
    try:
        n = int(raw)
    except ValueError:
        return 1
    return max(1, n)


def parallel_map(fn: Callable, items: Sequence) -> list:
    """Map preserving input order; threads capped by BICONS_THREADS.

    Results are reduced by index, never by completion time, so output is
    independent of the worker count.
    """
    n = thread_count()
    if n == 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items))
