"""Shared result types and run-loop machinery for the Monte Carlo engines.

Runs are partitioned into fixed-size blocks.  Block b of a job seeded with s
always draws from the generator seeded by SeedSequence([s, b]), and block
outputs are concatenated in block order, so results are bitwise identical for
any worker count and any scheduling.  Workers are threads: each block task is
dominated by numpy work on its own arrays and shares no mutable state.
"""

from __future__ import annotations

import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .kde import (
    DensityEstimate,
    WeightedSamples,
    estimate_density_1d,
    estimate_density_multi,
    gamma_moment_fit,
    optimal_bandwidth_1d,
    optimal_bandwidth_multi,
)

__all__ = [
    "INTERIOR",
    "AT_JUMP",
    "BLOCK_SIZE",
    "FptSample",
    "RunOutcome",
    "EngineResult",
    "block_rng",
    "run_blocks",
    "collect_result",
    "estimate_densities",
]

INTERIOR = "interior"
AT_JUMP = "at_jump"

# Runs per random-stream block.  Fixed: it is part of the reproducibility
# contract (outputs depend on seed and block index only, never on workers).
BLOCK_SIZE = 16384

KIND_NONE = 0
KIND_INTERIOR = 1
KIND_AT_JUMP = 2
KIND_NAMES = {KIND_INTERIOR: INTERIOR, KIND_AT_JUMP: AT_JUMP}


@dataclass(frozen=True)
class FptSample:
    """One recorded crossing: component index, crossing time, importance
    weight (1 for crossings located exactly at a jump), and how it was found."""

    process: int
    time: float
    weight: float
    kind: str


@dataclass(frozen=True)
class RunOutcome:
    """Per-run record: at most one sample per component; None where the
    component never crossed within the horizon."""

    samples: tuple[Optional[FptSample], ...]
    run_index: int = 0


@dataclass(frozen=True)
class EngineResult:
    """Everything one engine execution produced.

    ``marginals[i]`` holds component i's crossing times and weights over all
    runs; ``joint`` holds the m-tuples from runs where every component
    crossed, weighted by the product of the per-component weights.  The
    ``*_run_indices`` arrays map samples back to their run for diagnostics.
    ``seconds_per_run`` is wall time of the run loop only, divided by n_runs.
    """

    engine: str
    n_runs: int
    seed: int
    marginals: list[WeightedSamples]
    joint: WeightedSamples
    marginal_run_indices: list[np.ndarray]
    joint_run_indices: np.ndarray
    seconds_per_run: float
    diagnostics: dict = field(default_factory=dict)

    @property
    def m(self) -> int:
        return len(self.marginals)

    def crossing_probabilities(self) -> np.ndarray:
        """Weighted estimate of each component's probability of crossing
        within the horizon: sum of weights over runs."""
        return np.array([ws.weights.sum() / ws.n_runs for ws in self.marginals])


def block_rng(seed: int, block_index: int) -> np.random.Generator:
    """The generator owning block ``block_index`` of a job seeded ``seed``."""
    return np.random.default_rng(np.random.SeedSequence([int(seed), int(block_index)]))


def block_sizes(n_runs: int) -> list[int]:
    sizes = [BLOCK_SIZE] * (n_runs // BLOCK_SIZE)
    if n_runs % BLOCK_SIZE:
        sizes.append(n_runs % BLOCK_SIZE)
    return sizes


def run_blocks(
    n_runs: int,
    seed: int,
    workers: int,
    simulate: Callable[[np.random.Generator, int], tuple],
) -> tuple[list[tuple], float]:
    """Run ``simulate(rng, size)`` over every block, in order, timed.

    Returns the per-block outputs in block order and the elapsed wall time of
    the whole loop.
    """
    if n_runs < 1:
        raise ValueError("n_runs must be a positive integer")
    if workers < 1:
        raise ValueError("workers must be a positive integer")
    if seed < 0:
        raise ValueError("seed must be a non-negative integer")
    sizes = block_sizes(n_runs)

    def task(b: int) -> tuple:
        return simulate(block_rng(seed, b), sizes[b])

    start = time.perf_counter()
    if workers == 1:
        outputs = [task(b) for b in range(len(sizes))]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            outputs = list(pool.map(task, range(len(sizes))))
    elapsed = time.perf_counter() - start
    return outputs, elapsed


def collect_result(
    engine: str,
    seed: int,
    blocks: list[tuple[np.ndarray, np.ndarray, np.ndarray]],
    elapsed: float,
    diagnostics: Optional[dict] = None,
) -> EngineResult:
    """Merge per-block (times, weights, kinds) arrays of shape (B, m) into an
    EngineResult, preserving block (hence run) order."""
    hit_t = np.concatenate([b[0] for b in blocks], axis=0)
    hit_w = np.concatenate([b[1] for b in blocks], axis=0)
    hit_k = np.concatenate([b[2] for b in blocks], axis=0)
    n_runs, m = hit_t.shape
    # a weight can underflow to zero when a candidate lands where the crossing
    # density is below float range; such samples carry no estimatable mass
    recorded = (hit_k != KIND_NONE) & (hit_w > 0.0)
    marginals = []
    run_indices = []
    for i in range(m):
        sel = recorded[:, i]
        marginals.append(
            WeightedSamples(times=hit_t[sel, i], weights=hit_w[sel, i], n_runs=n_runs)
        )
        run_indices.append(np.nonzero(sel)[0])
    complete = np.all(recorded, axis=1)
    joint_w = hit_w[complete].prod(axis=1) if complete.any() else np.empty(0)
    joint_rows = np.nonzero(complete)[0]
    positive = joint_w > 0.0  # the product itself can underflow
    joint = WeightedSamples(
        times=hit_t[joint_rows[positive]],
        weights=joint_w[positive],
        n_runs=n_runs,
    )
    diag = dict(diagnostics or {})
    diag.setdefault("interior_crossings", int((hit_k == KIND_INTERIOR).sum()))
    diag.setdefault("at_jump_crossings", int((hit_k == KIND_AT_JUMP).sum()))
    return EngineResult(
        engine=engine,
        n_runs=n_runs,
        seed=seed,
        marginals=marginals,
        joint=joint,
        marginal_run_indices=run_indices,
        joint_run_indices=joint_rows[positive],
        seconds_per_run=elapsed / n_runs,
        diagnostics=diag,
    )


def outcome_from_arrays(
    hit_t: np.ndarray, hit_w: np.ndarray, hit_k: np.ndarray, run_index: int = 0
) -> RunOutcome:
    """Build a RunOutcome from one row of the block arrays."""
    samples = []
    for i in range(hit_t.shape[-1]):
        if hit_k[i] == KIND_NONE:
            samples.append(None)
        else:
            samples.append(
                FptSample(
                    process=i,
                    time=float(hit_t[i]),
                    weight=float(hit_w[i]),
                    kind=KIND_NAMES[int(hit_k[i])],
                )
            )
    return RunOutcome(samples=tuple(samples), run_index=run_index)


def marginal_bandwidth(times: np.ndarray, horizon: float) -> float:
    """Bandwidth for one component's estimate: gamma-reference optimum, or
    1% of the horizon when the sample is too small or degenerate to fit."""
    try:
        fit = gamma_moment_fit(times)
    except ValueError:
        return 0.01 * horizon
    return optimal_bandwidth_1d(fit, len(times))


def estimate_densities(
    result: EngineResult,
    grid: np.ndarray,
    joint_grid: Optional[tuple[np.ndarray, ...]] = None,
    include_joint: bool = True,
) -> tuple[list[DensityEstimate], Optional[DensityEstimate]]:
    """Marginal estimates for every component plus the joint estimate.

    ``grid`` is the 1-D evaluation grid spanning [0, T].  ``joint_grid``
    defaults to a 128-point grid per axis over the same span; pass
    ``include_joint=False`` to skip the joint estimate entirely.  A component
    with no crossings gets the zero density; the joint estimate is zero when
    any component never crossed in any run.
    """
    grid = np.asarray(grid, dtype=float)
    horizon = float(grid[-1]) if len(grid) else 1.0
    marginals = []
    for ws in result.marginals:
        h = marginal_bandwidth(ws.times, horizon) if len(ws) else 0.01 * horizon
        marginals.append(estimate_density_1d(ws, grid, h))
    joint = None
    if include_joint and result.m >= 2:
        if joint_grid is None:
            axis = np.linspace(0.0, horizon, 128)
            joint_grid = tuple(axis for _ in range(result.m))
        n_joint = len(result.joint)
        h = optimal_bandwidth_multi(result.m, max(n_joint, 1))
        joint = estimate_density_multi(result.joint, joint_grid, h)
    return marginals, joint
