"""Independent oracles used across the test suite.

Everything here is deliberately separate from the package implementation:
closed forms from the reflection principle, quadrature, and brute-force path
simulation are the reference against which the fast formulas are judged.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.integrate import quad
from scipy.stats import norm

# second-order Richardson weights in sqrt(dt) for nested grids (n, n/2, n/4):
# combination annihilates both the sqrt(dt) and dt terms of the grid bias
_LEVELS = np.array([1.0, math.sqrt(2.0), 2.0])
_M = np.vstack([np.ones(3), _LEVELS, _LEVELS**2])
RICHARDSON_W = np.linalg.solve(_M, np.array([1.0, 0.0, 0.0]))


def simulate_bridge_survival(
    a: float,
    b: float,
    level: float,
    tau: float,
    sigma: float,
    n_paths: int,
    n_steps: int,
    rng: np.random.Generator,
) -> tuple[float, float]:
    """Brute-force estimate of P(bridge from a to b stays above level).

    Simulates bridges by sequential conditional stepping and counts grid
    minima, on the full grid and on its 2x and 4x coarsenings of the same
    paths.  Checking only grid points overstates survival by O(sqrt(dt)), so
    the three counts are Richardson-extrapolated; returns (estimate,
    standard error of the extrapolated estimator).
    """
    if n_steps % 4:
        raise ValueError("n_steps must be divisible by 4")
    dt = tau / n_steps
    x = np.full(n_paths, float(a))
    above = np.ones((3, n_paths), dtype=bool)  # fine, half, quarter grids
    t = 0.0
    for k in range(1, n_steps + 1):
        rem = tau - t
        mean = x + (b - x) * (dt / rem)
        var = sigma * sigma * dt * (rem - dt) / rem
        x = mean + math.sqrt(max(var, 0.0)) * rng.standard_normal(n_paths)
        t += dt
        ok = x > level
        above[0] &= ok
        if k % 2 == 0:
            above[1] &= ok
        if k % 4 == 0:
            above[2] &= ok
    z = RICHARDSON_W @ above
    return float(z.mean()), float(z.std(ddof=1) / math.sqrt(n_paths))


def simulate_bridge_crossing_times(
    a: float,
    b: float,
    level: float,
    tau: float,
    sigma: float,
    n_paths: int,
    n_steps: int,
    rng: np.random.Generator,
) -> np.ndarray:
    """First grid times at which simulated bridges reach the level; only
    paths that cross within the interval are returned."""
    dt = tau / n_steps
    x = np.full(n_paths, float(a))
    hit = np.full(n_paths, np.nan)
    t = 0.0
    for k in range(1, n_steps + 1):
        rem = tau - t
        mean = x + (b - x) * (dt / rem)
        var = sigma * sigma * dt * (rem - dt) / rem
        x = mean + math.sqrt(max(var, 0.0)) * rng.standard_normal(n_paths)
        t += dt
        newly = np.isnan(hit) & (x <= level)
        hit[newly] = t
    return hit[~np.isnan(hit)]


def quad_interjump_density(seg) -> float:
    """Adaptive quadrature of the interior crossing-time density over its
    open interval."""
    from fptmc import interjump_fpt_density

    val, _ = quad(
        lambda t: interjump_fpt_density(seg, t),
        seg.t_start,
        seg.t_end,
        limit=300,
    )
    return val


def ratio_construction_density(
    t: float,
    x_start: float,
    x_end: float,
    level: float,
    t_start: float,
    t_end: float,
    mu: float,
    sigma: float,
) -> float:
    """Independent route to the interior crossing density: first-hit density
    of the free drifted motion, times the Gaussian density of reaching the
    observed endpoint from the level, divided by the Gaussian density of the
    observed endpoint from the start."""
    u = t - t_start
    v = t_end - t
    tau = t_end - t_start
    dist = x_start - level
    hit = (
        dist
        / (sigma * math.sqrt(2.0 * math.pi * u**3))
        * math.exp(-((dist + mu * u) ** 2) / (2.0 * sigma * sigma * u))
    )
    terminal = norm.pdf(x_end, loc=level + mu * v, scale=sigma * math.sqrt(v))
    endpoint = norm.pdf(x_end, loc=x_start + mu * tau, scale=sigma * math.sqrt(tau))
    return hit * terminal / endpoint


def bm_crossing_probability(
    x0: float, level: float, mu: float, sigma: float, horizon: float
) -> float:
    """P(min over [0, horizon] of x0 + mu t + sigma W_t <= level), level < x0."""
    d = level - x0
    st = sigma * math.sqrt(horizon)
    return float(
        norm.cdf((d - mu * horizon) / st)
        + math.exp(2.0 * mu * d / sigma**2) * norm.cdf((d + mu * horizon) / st)
    )


def bm_fpt_density(t, x0: float, level: float, mu: float, sigma: float):
    """First-passage-time density of drifted Brownian motion through a
    constant level below the start."""
    t = np.asarray(t, dtype=float)
    d = abs(level - x0)
    out = np.zeros_like(t)
    pos = t > 0
    tp = t[pos]
    out[pos] = (
        d
        / (sigma * np.sqrt(2.0 * np.pi * tp**3))
        * np.exp(-((level - x0 - mu * tp) ** 2) / (2.0 * sigma * sigma * tp))
    )
    return out


def gamma_density_curvature_quad(alpha: float, beta: float) -> float:
    """Quadrature of the integrated squared second derivative of the gamma
    density t^(beta-1) exp(-alpha t) alpha^beta / Gamma(beta)."""
    lognorm = beta * math.log(alpha) - math.lgamma(beta)

    def second_derivative(t: float) -> float:
        quadratic = (
            alpha * alpha * t * t
            - 2.0 * alpha * (beta - 1.0) * t
            + (beta - 1.0) * (beta - 2.0)
        )
        return math.exp(lognorm - alpha * t) * t ** (beta - 3.0) * quadratic

    val, _ = quad(lambda t: second_derivative(t) ** 2, 0.0, np.inf, limit=400)
    return val
