"""Problem specification and path-skeleton generation for a constant-coefficient
multivariate jump-diffusion.

The process is  dX = mu dt + sigma dW + dZ  with a shared Poisson clock of rate
``jump_rate`` driving jumps in every component and per-component normal jump
sizes.  Each component X_i is watched against its own affine barrier
D_i(t) = intercept_i + slope_i * t on the horizon [0, T]; a run ends for a
component the first time it touches or falls below its barrier.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "LinearBarrier",
    "ModelSpec",
    "JumpTimeline",
    "effective_sigma",
    "sample_jump_instants",
    "propagate_interjump",
    "apply_jump",
    "build_timeline",
]


@dataclass(frozen=True)
class LinearBarrier:
    """Affine threshold D(t) = intercept + slope * t."""

    intercept: float
    slope: float

    def __post_init__(self):
        if not (np.isfinite(self.intercept) and np.isfinite(self.slope)):
            raise ValueError("barrier intercept and slope must be finite")

    def at(self, t):
        """Barrier level at time t (scalar or array)."""
        return self.intercept + self.slope * np.asarray(t)


def _as_readonly(a, dtype=float) -> np.ndarray:
    out = np.array(a, dtype=dtype)
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class ModelSpec:
    """Full problem definition for one experiment.

    Parameters
    ----------
    m : int
        Number of processes.
    x0 : array (m,)
        Initial values; each must start strictly above its barrier at t = 0.
    mu : array (m,)
        Constant drift per unit time.
    sigma : array (m, m)
        Diffusion coefficient matrix; row i drives component i through a
        shared vector of independent Brownian motions.
    jump_rate : float
        Poisson arrival rate of the shared jump clock (>= 0).
    jump_mean, jump_sd : array (m,)
        Normal jump-size mean and standard deviation per component.
    barriers : sequence of LinearBarrier, length m.
    horizon : float
        Terminal time T > 0.
    """

    m: int
    x0: np.ndarray
    mu: np.ndarray
    sigma: np.ndarray
    jump_rate: float
    jump_mean: np.ndarray
    jump_sd: np.ndarray
    barriers: tuple[LinearBarrier, ...] = field(default=())
    horizon: float = 1.0

    def __post_init__(self):
        m = int(self.m)
        if m < 1:
            raise ValueError("m must be a positive integer")
        object.__setattr__(self, "m", m)
        for name in ("x0", "mu", "jump_mean", "jump_sd"):
            arr = _as_readonly(getattr(self, name))
            if arr.shape != (m,):
                raise ValueError(f"{name} must have shape ({m},), got {arr.shape}")
            object.__setattr__(self, name, arr)
        sigma = _as_readonly(self.sigma)
        if sigma.shape != (m, m):
            raise ValueError(f"sigma must have shape ({m}, {m}), got {sigma.shape}")
        object.__setattr__(self, "sigma", sigma)
        barriers = tuple(self.barriers)
        if len(barriers) != m:
            raise ValueError(f"expected {m} barriers, got {len(barriers)}")
        object.__setattr__(self, "barriers", barriers)
        if not self.horizon > 0:
            raise ValueError("horizon must be positive")
        if self.jump_rate < 0:
            raise ValueError("jump_rate must be >= 0")
        if np.any(self.jump_sd < 0):
            raise ValueError("jump_sd entries must be >= 0")
        d0 = self.barrier_values(0.0)
        if np.any(self.x0 <= d0):
            bad = int(np.argmax(self.x0 <= d0))
            raise ValueError(
                f"x0[{bad}] = {self.x0[bad]} does not start above its barrier "
                f"D({bad})(0) = {d0[bad]}"
            )

    def barrier_values(self, t: float) -> np.ndarray:
        """Vector of barrier levels at scalar time t, shape (m,)."""
        icpt, slope = self.barrier_arrays()
        return icpt + slope * float(t)

    def barrier_arrays(self) -> tuple[np.ndarray, np.ndarray]:
        """(intercepts, slopes) as (m,) arrays, for vectorised evaluation."""
        return (
            np.array([b.intercept for b in self.barriers]),
            np.array([b.slope for b in self.barriers]),
        )

    def effective_sigmas(self) -> np.ndarray:
        """Per-component volatility of the aggregated Brownian driver.

        Raises for any all-zero row: downstream bridge formulas divide by it.
        """
        return np.array([effective_sigma(self.sigma, i) for i in range(self.m)])


@dataclass(frozen=True)
class JumpTimeline:
    """One run's jump skeleton: instants 0 = T_0 < T_1 < ... < T_M < T_{M+1} = T
    with values immediately before and after every jump.

    ``pre_jump`` has shape (m, M+1): column j holds X(T_{j+1}^-) for j < M and
    the horizon-end value in the last column.  ``post_jump`` has shape (m, M).
    """

    instants: np.ndarray
    pre_jump: np.ndarray
    post_jump: np.ndarray

    def __post_init__(self):
        inst = _as_readonly(self.instants)
        if inst.ndim != 1 or len(inst) < 2:
            raise ValueError("instants must hold at least [0, T]")
        if inst[0] != 0.0:
            raise ValueError("first instant must be 0")
        if np.any(np.diff(inst) <= 0):
            raise ValueError("instants must be strictly increasing")
        object.__setattr__(self, "instants", inst)
        n_jumps = len(inst) - 2
        pre = _as_readonly(self.pre_jump)
        post = _as_readonly(self.post_jump)
        if pre.ndim != 2 or pre.shape[1] != n_jumps + 1:
            raise ValueError(f"pre_jump must have {n_jumps + 1} columns")
        if post.shape != (pre.shape[0], n_jumps):
            raise ValueError(f"post_jump must have shape ({pre.shape[0]}, {n_jumps})")
        object.__setattr__(self, "pre_jump", pre)
        object.__setattr__(self, "post_jump", post)

    @property
    def n_jumps(self) -> int:
        return len(self.instants) - 2

    def jump_sizes(self) -> np.ndarray:
        """Realised jump sizes, shape (m, M)."""
        return self.post_jump - self.pre_jump[:, : self.n_jumps]


def effective_sigma(sigma: np.ndarray, i: int) -> float:
    """Volatility of component i once its Brownian drivers are aggregated:
    the Euclidean norm of row i of the diffusion matrix.
    """
    row = np.asarray(sigma, dtype=float)[i]
    out = float(np.sqrt(np.sum(row * row)))
    if out == 0.0:
        raise ValueError(
            f"degenerate diffusion row {i}: all sigma entries are zero"
        )
    return out


def sample_jump_instants(rate: float, horizon: float, rng: np.random.Generator) -> np.ndarray:
    """Jump instants of a Poisson(rate) clock on (0, horizon).

    Built by accumulating exponential inter-arrival gaps of mean 1/rate until
    the horizon is passed.  rate = 0 yields an empty array.  An instant landing
    exactly on the horizon (measure zero) is discarded so the horizon itself
    always caps the timeline.
    """
    if rate < 0:
        raise ValueError("rate must be >= 0")
    if not horizon > 0:
        raise ValueError("horizon must be positive")
    if rate == 0:
        return np.empty(0)
    out = []
    t = 0.0
    while True:
        t += rng.exponential(1.0 / rate)
        if t >= horizon:
            break
        out.append(t)
    return np.array(out)


def propagate_interjump(
    state: np.ndarray, dt: float, spec: ModelSpec, rng: np.random.Generator
) -> np.ndarray:
    """Advance the diffusion part over a jump-free stretch of length dt.

    The increment is mu * dt + sigma @ N with N ~ Normal(0, dt I) shared across
    rows, so repeated calls have mean state + mu*dt and covariance
    sigma sigma^T * dt.  ``state`` may carry leading batch dimensions.
    """
    if not dt > 0:
        raise ValueError("dt must be positive")
    state = np.asarray(state, dtype=float)
    z = rng.standard_normal(state.shape)
    return state + spec.mu * dt + np.sqrt(dt) * (z @ spec.sigma.T)


def apply_jump(state: np.ndarray, spec: ModelSpec, rng: np.random.Generator) -> np.ndarray:
    """Add one normal jump per component, independent across components."""
    state = np.asarray(state, dtype=float)
    z = rng.standard_normal(state.shape)
    return state + spec.jump_mean + spec.jump_sd * z


def build_timeline(spec: ModelSpec, rng: np.random.Generator) -> JumpTimeline:
    """Generate one complete jump skeleton for the spec.

    Draws the shared jump instants, then alternates interjump propagation and
    jump application from x0 out to the horizon.
    """
    jumps = sample_jump_instants(spec.jump_rate, spec.horizon, rng)
    instants = np.concatenate([[0.0], jumps, [spec.horizon]])
    n_seg = len(instants) - 1
    pre = np.empty((spec.m, n_seg))
    post = np.empty((spec.m, n_seg - 1))
    state = spec.x0
    for j in range(n_seg):
        state = propagate_interjump(state, instants[j + 1] - instants[j], spec, rng)
        pre[:, j] = state
        if j < n_seg - 1:
            state = apply_jump(state, spec, rng)
            post[:, j] = state
    return JumpTimeline(instants=instants, pre_jump=pre, post_jump=post)
