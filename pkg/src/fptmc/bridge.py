"""Exact crossing mathematics for one interjump interval.

Between two consecutive jumps the diffusion, conditioned on its simulated
endpoint values, is a Brownian bridge.  This module provides, for a single
component on a single interval with the barrier held at a constant level:

* the probability that the bridge stays above the level for the whole
  interval (drift-free by bridge conditioning),
* the conditional first-crossing-time density on the open interval, which
  integrates to one minus that survival probability,
* a uniform-candidate sampler that turns one uniform draw into either
  "no interior crossing" or a crossing time with an importance weight,
* the index of the first jump whose post-jump value breaches the barrier.

Scalar operations wrap the array kernels that the Monte Carlo engines call
directly, so both surfaces share one implementation of the formulas.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .model import JumpTimeline, LinearBarrier

__all__ = [
    "BridgeSegment",
    "CrossingDraw",
    "SURVIVAL_SHORTCUT",
    "survival_probability",
    "interjump_fpt_density",
    "sample_crossing",
    "first_jump_crossing",
]

# Survival this close to 1 is treated as certain survival: the candidate
# stretch tau / (1 - P) would otherwise overflow.
SURVIVAL_SHORTCUT = 1e-12


@dataclass(frozen=True)
class BridgeSegment:
    """One component's bridge data on one interjump interval.

    ``level`` is the barrier value used for the whole segment; callers that
    track an affine barrier evaluate it once at the segment midpoint (the
    slope-induced error over one interjump gap is far below Monte Carlo
    noise at the parameter scales this package targets).
    """

    x_start: float
    x_end: float
    t_start: float
    t_end: float
    mu: float
    sigma: float
    level: float

    def __post_init__(self):
        if not self.t_end > self.t_start:
            raise ValueError("t_end must exceed t_start")
        if not self.sigma > 0:
            raise ValueError("sigma must be positive")

    @property
    def tau(self) -> float:
        return self.t_end - self.t_start


@dataclass(frozen=True)
class CrossingDraw:
    """Outcome of one uniform-candidate crossing draw.

    When ``crossed``, ``time`` lies in (t_start, t_end) and ``weight`` is the
    importance factor tau / (1 - P) * g(time) that makes weighted draws an
    unbiased sample of the interior crossing-time density.
    """

    crossed: bool
    time: float = float("nan")
    weight: float = float("nan")


def survival_array(x_start, x_end, level, tau, sigma):
    """Probability the bridge stays above ``level``, elementwise.

    Zero whenever the right endpoint is at or below the level; caller
    guarantees x_start > level.
    """
    x_start, x_end, level, tau, sigma = np.broadcast_arrays(
        x_start, x_end, level, tau, sigma
    )
    expo = -2.0 * (x_start - level) * (x_end - level) / (tau * np.square(sigma))
    p = -np.expm1(expo)
    return np.where(x_end > level, np.clip(p, 0.0, 1.0), 0.0)


def fpt_density_array(t, x_start, x_end, level, t_start, t_end, mu, sigma):
    """Interior first-crossing-time density g(t), elementwise.

    Valid strictly inside (t_start, t_end); the prefactors are singular at
    the endpoints.
    """
    (t, x_start, x_end, level, t_start, t_end, mu, sigma) = np.broadcast_arrays(
        t, x_start, x_end, level, t_start, t_end, mu, sigma
    )
    tau = t_end - t_start
    u = t - t_start
    v = t_end - t
    sig2 = np.square(sigma)
    # density of the observed endpoint given the start, the normaliser
    y = np.exp(-np.square(x_start - x_end + mu * tau) / (2.0 * tau * sig2)) / (
        sigma * np.sqrt(2.0 * np.pi * tau)
    )
    pref = (x_start - level) / (2.0 * y * np.pi * sig2) * u**-1.5 * v**-0.5
    down = np.exp(-np.square(x_end - level - mu * v) / (2.0 * v * sig2))
    up = np.exp(-np.square(x_start - level + mu * u) / (2.0 * u * sig2))
    return pref * down * up


def sample_crossing_array(x_start, x_end, level, t_start, t_end, mu, sigma, u):
    """Vectorised uniform-candidate draw.

    ``u`` are uniforms on (0, 1].  The candidate time is
    t_start + tau / (1 - P) * u; it is accepted exactly when it lands inside
    the interval, which happens with probability 1 - P.  Returns
    (accepted mask, times, weights); times and weights are meaningful only
    where accepted.
    """
    x_start, x_end, level, t_start, t_end, mu, sigma, u = (
        np.atleast_1d(a)
        for a in np.broadcast_arrays(x_start, x_end, level, t_start, t_end, mu, sigma, u)
    )
    tau = t_end - t_start
    p = survival_array(x_start, x_end, level, tau, sigma)
    keep = 1.0 - p
    feasible = keep > SURVIVAL_SHORTCUT
    accepted = feasible & (u <= keep)
    stretch = np.where(feasible, tau / np.where(feasible, keep, 1.0), np.inf)
    s = t_start + stretch * u
    # strict guards: the density is singular at both interval endpoints
    accepted &= (s < t_end) & (s > t_start)
    times = np.where(accepted, s, np.nan)
    weights = np.full(times.shape, np.nan)
    if np.any(accepted):
        idx = np.nonzero(accepted)
        g = fpt_density_array(
            times[idx],
            x_start[idx],
            x_end[idx],
            level[idx],
            t_start[idx],
            t_end[idx],
            mu[idx],
            sigma[idx],
        )
        weights[idx] = stretch[idx] * g
    return accepted, times, weights


def survival_probability(seg: BridgeSegment) -> float:
    """Probability the bridge never touches the segment level."""
    return float(
        survival_array(seg.x_start, seg.x_end, seg.level, seg.tau, seg.sigma)
    )


def interjump_fpt_density(seg: BridgeSegment, t: float) -> float:
    """Conditional crossing-time density at an interior time t.

    Integrates over (t_start, t_end) to 1 - survival_probability(seg).
    """
    if not (seg.t_start < t < seg.t_end):
        raise ValueError(
            f"t = {t} must lie strictly inside ({seg.t_start}, {seg.t_end})"
        )
    return float(
        fpt_density_array(
            t, seg.x_start, seg.x_end, seg.level, seg.t_start, seg.t_end, seg.mu, seg.sigma
        )
    )


def sample_crossing(seg: BridgeSegment, rng: np.random.Generator) -> CrossingDraw:
    """Draw one uniform candidate for the segment.

    The uniform is taken from (0, 1] so the candidate never lands on the
    singular left endpoint.  When the segment survival probability rounds to
    one, no draw can be accepted and the result is simply "not crossed".
    """
    u = 1.0 - rng.random()
    accepted, times, weights = sample_crossing_array(
        seg.x_start, seg.x_end, seg.level, seg.t_start, seg.t_end, seg.mu, seg.sigma, u
    )
    if bool(accepted[0]):
        return CrossingDraw(True, float(times[0]), float(weights[0]))
    return CrossingDraw(False)


def first_jump_crossing(
    timeline: JumpTimeline, barriers: tuple[LinearBarrier, ...], i: int
) -> Optional[int]:
    """Index (1-based) of the first jump whose post-jump value breaches the
    barrier while every earlier pre- and post-jump value stayed above it.

    Returns None when no jump qualifies.  Barrier levels are evaluated at the
    jump instants themselves.
    """
    n = timeline.n_jumps
    if n == 0:
        return None
    t_jumps = timeline.instants[1 : n + 1]
    levels = barriers[i].at(t_jumps)
    pre = timeline.pre_jump[i, :n]
    post = timeline.post_jump[i, :n]
    pre_ok = pre > levels
    post_ok = post > levels
    for j in range(n):
        if not pre_ok[j]:
            return None
        if not post_ok[j]:
            return j + 1
    return None
