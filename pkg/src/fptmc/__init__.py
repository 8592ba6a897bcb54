"""First-passage-time Monte Carlo for multivariate jump-diffusions.

Two engines estimate the distribution of the first time each component of a
constant-coefficient jump-diffusion touches its affine barrier:

* ``run_engine`` - the fast bridge-sampling engine, which only evaluates the
  process at jump instants and samples interior crossings with importance
  weights;
* ``run_cmc`` - a conventional fixed-step baseline used for validation and
  speed comparison.

Both feed ``estimate_densities`` for kernel density estimates of the marginal
and joint first-passage-time densities.
"""

from .model import (
    LinearBarrier,
    ModelSpec,
    JumpTimeline,
    effective_sigma,
    sample_jump_instants,
    propagate_interjump,
    apply_jump,
    build_timeline,
)
from .bridge import (
    BridgeSegment,
    CrossingDraw,
    survival_probability,
    interjump_fpt_density,
    sample_crossing,
    first_jump_crossing,
)
from .kde import (
    WeightedSamples,
    GammaFit,
    DensityEstimate,
    gaussian_kernel,
    gamma_moment_fit,
    roughness_functional,
    optimal_bandwidth_1d,
    optimal_bandwidth_multi,
    estimate_density_1d,
    estimate_density_multi,
)
from .results import FptSample, RunOutcome, EngineResult, estimate_densities
from .unif import run_single, run_engine
from .cmc import CmcConfig, run_cmc_single, run_cmc
from .config import (
    ConfigError,
    ExperimentConfig,
    parse_config,
    parse_config_text,
    serialize_config,
)
from .report import ComparisonReport, normalized_l1, emit_density_csv, run_experiment

__version__ = "0.1.0"

__all__ = [
    "LinearBarrier",
    "ModelSpec",
    "JumpTimeline",
    "effective_sigma",
    "sample_jump_instants",
    "propagate_interjump",
    "apply_jump",
    "build_timeline",
    "BridgeSegment",
    "CrossingDraw",
    "survival_probability",
    "interjump_fpt_density",
    "sample_crossing",
    "first_jump_crossing",
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
    "FptSample",
    "RunOutcome",
    "EngineResult",
    "estimate_densities",
    "run_single",
    "run_engine",
    "CmcConfig",
    "run_cmc_single",
    "run_cmc",
    "ConfigError",
    "ExperimentConfig",
    "parse_config",
    "parse_config_text",
    "serialize_config",
    "ComparisonReport",
    "normalized_l1",
    "emit_density_csv",
    "run_experiment",
]
