"""Conventional fixed-step Monte Carlo baseline.

The horizon is discretised into steps of size dt and the full state vector is
advanced through every step: an Euler diffusion increment, then (with
probability rate*dt, shared across components like the exact engine's jump
clock) one normal jump per component, then a barrier check at the grid time.
Crossing times are grid-aligned and carry weight 1.  No sub-step bridge
correction is applied: stepping over an excursion is exactly the
discretisation bias this baseline is expected to show, and the reason it
needs small dt.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .model import ModelSpec
from .results import (
    KIND_AT_JUMP,
    KIND_INTERIOR,
    EngineResult,
    RunOutcome,
    collect_result,
    outcome_from_arrays,
    run_blocks,
)

__all__ = ["CmcConfig", "run_cmc_single", "run_cmc", "simulate_block_cmc"]

_COMPACT_EVERY = 128


@dataclass(frozen=True)
class CmcConfig:
    """Settings of one baseline execution."""

    dt: float
    n_runs: int
    seed: int = 0
    workers: int = 1

    def __post_init__(self):
        if not self.dt > 0:
            raise ValueError("dt must be positive")
        if self.n_runs < 1:
            raise ValueError("n_runs must be a positive integer")
        if self.workers < 1:
            raise ValueError("workers must be a positive integer")
        if self.seed < 0:
            raise ValueError("seed must be a non-negative integer")

    def validate_for(self, spec: ModelSpec) -> None:
        if self.dt > spec.horizon:
            raise ValueError("dt must not exceed the horizon")
        if spec.jump_rate * self.dt >= 1.0:
            raise ValueError(
                f"jump_rate * dt = {spec.jump_rate * self.dt} must be < 1 "
                "for per-step Bernoulli arrivals"
            )


def _step_grid(horizon: float, dt: float) -> np.ndarray:
    """Grid times dt, 2 dt, ..., horizon; the last step is shortened when dt
    does not divide the horizon."""
    n_full = int(math.floor(horizon / dt + 1e-9))
    grid = dt * np.arange(1, n_full + 1)
    if n_full == 0 or grid[-1] < horizon - 1e-12 * horizon:
        grid = np.append(grid, horizon)
    else:
        grid[-1] = min(grid[-1], horizon)
    return grid


def simulate_block_cmc(
    spec: ModelSpec, cfg: CmcConfig, rng: np.random.Generator, size: int
) -> tuple[np.ndarray, np.ndarray, np.ndarray, int]:
    """Simulate ``size`` discretised runs; returns (times, weights, kinds)
    of shape (size, m) plus the total number of jumps that occurred."""
    m = spec.m
    mu = spec.mu
    sigma_rows = spec.sigma
    icpt, slope = spec.barrier_arrays()
    grid = _step_grid(spec.horizon, cfg.dt)

    state = np.tile(spec.x0, (size, 1))
    alive = np.ones((size, m), dtype=bool)
    hit_t = np.full((size, m), np.nan)
    hit_w = np.zeros((size, m))
    hit_k = np.zeros((size, m), dtype=np.int8)
    run_ids = np.arange(size)
    n_jumps = 0

    t_prev = 0.0
    for k, t in enumerate(grid, start=1):
        dt_k = t - t_prev
        t_prev = t
        n_active = state.shape[0]
        z = rng.standard_normal((n_active, m))
        state += mu * dt_k + math.sqrt(dt_k) * (z @ sigma_rows.T)
        if spec.jump_rate > 0:
            jumped = rng.random(n_active) < spec.jump_rate * dt_k
            nj = int(jumped.sum())
            if nj:
                zj = rng.standard_normal((nj, m))
                state[jumped] += spec.jump_mean + spec.jump_sd * zj
                n_jumps += nj
        level = icpt + slope * t
        newly = alive & (state <= level)
        if newly.any():
            rows, cols = np.nonzero(newly)
            hit_t[run_ids[rows], cols] = t
            hit_w[run_ids[rows], cols] = 1.0
            hit_k[run_ids[rows], cols] = KIND_INTERIOR
            alive &= ~newly
        if k % _COMPACT_EVERY == 0:
            keep = alive.any(axis=1)
            if not keep.all():
                state = state[keep]
                alive = alive[keep]
                run_ids = run_ids[keep]
                if state.shape[0] == 0:
                    break
    return hit_t, hit_w, hit_k, n_jumps


def run_cmc_single(
    spec: ModelSpec, cfg: CmcConfig, rng: np.random.Generator
) -> RunOutcome:
    """One discretised run; crossing times are grid-aligned, weight 1."""
    cfg.validate_for(spec)
    hit_t, hit_w, hit_k, _ = simulate_block_cmc(spec, cfg, rng, 1)
    return outcome_from_arrays(hit_t[0], hit_w[0], hit_k[0])


def run_cmc(spec: ModelSpec, cfg: CmcConfig) -> EngineResult:
    """Run the discretised baseline with the same reproducibility contract as
    the bridge-sampling engine (fixed blocks, per-block streams, ordered
    merge)."""
    cfg.validate_for(spec)

    def simulate(rng: np.random.Generator, size: int):
        return simulate_block_cmc(spec, cfg, rng, size)

    outputs, elapsed = run_blocks(cfg.n_runs, cfg.seed, cfg.workers, simulate)
    total_jumps = sum(o[3] for o in outputs)
    return collect_result(
        "cmc",
        cfg.seed,
        [o[:3] for o in outputs],
        elapsed,
        diagnostics={"total_jumps": total_jumps, "dt": cfg.dt},
    )
