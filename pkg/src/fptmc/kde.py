"""Kernel density estimation of first-passage-time densities.

One-dimensional estimates use the Gaussian kernel
K(h, x) = exp(-x^2 / (h^2/2)) / (sqrt(pi/2) h), i.e. a normal density of
standard deviation h/2, with the bandwidth minimising asymptotic integrated
squared error under a gamma reference fit of the sample.  Multivariate
estimates use the product Gaussian kernel of covariance h^2 I with the
normal-reference bandwidth.  Both estimators divide by the number of Monte
Carlo runs, not the number of crossings, so the integral of an estimate is
the estimated crossing probability.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

__all__ = [
    "WeightedSamples",
    "GammaFit",
    "DensityEstimate",
    "gaussian_kernel",
    "gamma_moment_fit",
    "roughness_functional",
    "optimal_bandwidth_1d",
    "optimal_bandwidth_multi",
    "estimate_density_1d",
    "estimate_density_multi",
]

_SAMPLE_CHUNK = 4096


@dataclass(frozen=True)
class WeightedSamples:
    """Crossing times with importance weights from N Monte Carlo runs.

    ``times`` is (n,) for one component or (n, m) for joint tuples where every
    component crossed in the same run.  ``n_runs`` is the total number of runs
    (the estimator denominator), so n_runs >= n.
    """

    times: np.ndarray
    weights: np.ndarray
    n_runs: int

    def __post_init__(self):
        times = np.atleast_1d(np.asarray(self.times, dtype=float))
        weights = np.atleast_1d(np.asarray(self.weights, dtype=float))
        if weights.ndim != 1 or len(weights) != times.shape[0]:
            raise ValueError("weights must be one per sample")
        if np.any(weights <= 0):
            raise ValueError("weights must be positive")
        if self.n_runs < max(len(weights), 1):
            raise ValueError("n_runs must be at least the number of samples")
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "n_runs", int(self.n_runs))

    def __len__(self) -> int:
        return self.times.shape[0]


@dataclass(frozen=True)
class GammaFit:
    """Moment-matched gamma reference: density ~ t^(beta-1) exp(-alpha t).

    beta is kept at or above 3 so the curvature functional below stays
    positive and finite.
    """

    alpha: float
    beta: float

    def __post_init__(self):
        if not self.alpha > 0:
            raise ValueError("alpha must be positive")
        if self.beta < 3.0:
            raise ValueError("beta must be >= 3 (clamp before constructing)")


@dataclass(frozen=True)
class DensityEstimate:
    """A density evaluated on a grid.

    ``grid`` is the 1-D evaluation grid, or a tuple of per-axis grids for a
    multivariate estimate whose ``values`` then form the matching mesh.
    ``total_mass`` is the trapezoidal integral over the grid, i.e. the
    estimated crossing probability caught by the grid window.
    """

    grid: np.ndarray | tuple[np.ndarray, ...]
    values: np.ndarray
    bandwidth: float
    n_samples: int
    total_mass: float


def gaussian_kernel(h: float, x) -> np.ndarray:
    """Smoothing kernel of bandwidth h: a centred normal density with
    standard deviation h/2.  Symmetric, unit mass, peak at x = 0."""
    if not h > 0:
        raise ValueError("bandwidth must be positive")
    x = np.asarray(x, dtype=float)
    return np.exp(-np.square(x) / (h * h / 2.0)) / (math.sqrt(math.pi / 2.0) * h)


def gamma_moment_fit(times) -> GammaFit:
    """Fit the gamma reference by the method of moments.

    alpha = mean/variance and beta = mean^2/variance with the population
    variance; beta is clamped up to 3.  Needs at least two distinct positive
    values, otherwise the caller should fall back to a default bandwidth.
    """
    t = np.asarray(times, dtype=float)
    if t.ndim != 1 or len(t) < 2:
        raise ValueError("need at least two samples to fit")
    mean = float(t.mean())
    var = float(t.var())
    if var <= 0.0:
        raise ValueError("samples have zero variance; gamma fit undefined")
    if mean <= 0.0:
        raise ValueError("sample mean must be positive for a gamma fit")
    return GammaFit(alpha=mean / var, beta=max(mean * mean / var, 3.0))


def roughness_functional(fit: GammaFit) -> float:
    """Integrated squared second derivative of the gamma reference density.

    Closed form: with a = alpha and b = beta,

        a^5 * sum_{i=1..5} c_i(b) Gamma(2b - i) / (2^(2b-i) Gamma(b)^2)

    where the c_i are the coefficients of the squared quadratic
    (a t^2 - 2a(b-1) t + (b-1)(b-2))^2 / a^(2i) collected by power of t.
    Scales as alpha^5 at fixed beta.
    """
    a, b = fit.alpha, fit.beta
    if b < 3.0:
        raise ValueError("beta must be >= 3")
    c = (
        1.0,
        -4.0 * (b - 1.0),
        4.0 * (b - 1.0) ** 2 + 2.0 * (b - 1.0) * (b - 2.0),
        -4.0 * (b - 1.0) ** 2 * (b - 2.0),
        (b - 1.0) ** 2 * (b - 2.0) ** 2,
    )
    log_norm = -2.0 * gammaln(b)
    total = 0.0
    for i in range(1, 6):
        total += c[i - 1] * math.exp(
            gammaln(2.0 * b - i) - (2.0 * b - i) * math.log(2.0) + log_norm
        )
    return a**5 * total


def optimal_bandwidth_1d(fit: GammaFit, n: int) -> float:
    """AMISE-optimal bandwidth for the 1-D kernel given the gamma reference:
    (2 n sqrt(pi) * roughness)^(-1/5), decreasing as n^(-1/5)."""
    if n < 1:
        raise ValueError("n must be a positive integer")
    return float((2.0 * n * math.sqrt(math.pi) * roughness_functional(fit)) ** -0.2)


def optimal_bandwidth_multi(m: int, n: int) -> float:
    """Normal-reference bandwidth for the m-variate product kernel:
    n^(-1/(m+4)) * (4 / (2m+1))^(1/(m+4))."""
    if m < 1 or n < 1:
        raise ValueError("m and n must be positive integers")
    p = 1.0 / (m + 4.0)
    return float(n ** -p * (4.0 / (2.0 * m + 1.0)) ** p)


def estimate_density_1d(samples: WeightedSamples, grid, h: float) -> DensityEstimate:
    """Weighted kernel estimate on a sorted grid:
    f(t) = (1/n_runs) * sum_k w_k K(h, t - s_k).

    An empty sample set yields the all-zero estimate (no crossings observed).
    """
    if not h > 0:
        raise ValueError("bandwidth must be positive")
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 1 or np.any(np.diff(grid) < 0):
        raise ValueError("grid must be a sorted 1-D array")
    if samples.times.ndim != 1:
        raise ValueError("1-D estimator needs scalar crossing times")
    values = np.zeros_like(grid)
    s, w = samples.times, samples.weights
    for k in range(0, len(s), _SAMPLE_CHUNK):
        sk = s[k : k + _SAMPLE_CHUNK]
        wk = w[k : k + _SAMPLE_CHUNK]
        values += gaussian_kernel(h, grid[:, None] - sk[None, :]) @ wk
    values /= samples.n_runs
    return DensityEstimate(
        grid=grid,
        values=values,
        bandwidth=float(h),
        n_samples=len(samples),
        total_mass=float(np.trapezoid(values, grid)),
    )


def estimate_density_multi(
    samples: WeightedSamples, grid: tuple[np.ndarray, ...], h: float
) -> DensityEstimate:
    """Weighted m-variate product-kernel estimate on a tensor grid.

    ``grid`` holds one sorted axis per dimension; the result values have shape
    (len(grid[0]), ..., len(grid[m-1])).  Only complete tuples (runs where
    every component crossed) should be passed in.  The kernel here is a normal
    density of covariance h^2 I, not the half-width convention of the 1-D
    kernel.
    """
    if not h > 0:
        raise ValueError("bandwidth must be positive")
    axes = tuple(np.asarray(g, dtype=float) for g in grid)
    m = len(axes)
    times = samples.times
    if times.ndim == 1:
        times = times[:, None]
    if times.shape[1] != m:
        raise ValueError(f"samples have {times.shape[1]} components, grid has {m}")
    shape = tuple(len(g) for g in axes)
    values = np.zeros(shape)
    n = times.shape[0]
    norm = (2.0 * math.pi * h * h) ** (-m / 2.0)
    if n:
        if m == 2:
            # separable kernel: accumulate as a weighted outer product
            g0, g1 = axes
            for k in range(0, n, _SAMPLE_CHUNK):
                sk = times[k : k + _SAMPLE_CHUNK]
                wk = samples.weights[k : k + _SAMPLE_CHUNK]
                a = np.exp(-np.square(g0[:, None] - sk[None, :, 0]) / (2 * h * h)) * wk
                b = np.exp(-np.square(sk[:, None, 1] - g1[None, :]) / (2 * h * h))
                values += a @ b
        else:
            mesh = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, m)
            flat = np.zeros(mesh.shape[0])
            for k in range(0, n, 256):
                sk = times[k : k + 256]
                wk = samples.weights[k : k + 256]
                d2 = np.square(mesh[:, None, :] - sk[None, :, :]).sum(axis=2)
                flat += np.exp(-d2 / (2 * h * h)) @ wk
            values = flat.reshape(shape)
        values *= norm / samples.n_runs
    mass = values
    for axis in reversed(axes):
        mass = np.trapezoid(mass, axis, axis=-1)
    return DensityEstimate(
        grid=axes,
        values=values,
        bandwidth=float(h),
        n_samples=n,
        total_mass=float(mass),
    )
