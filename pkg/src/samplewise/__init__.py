"""Sample-wise variational inference for simulation-based inverse problems.

The package inverts observation pairs one sample at a time with a damped
Gauss-Newton iteration, aligns a scaled uniform prior with the recovered
samples by greedy nearest-neighbour permutation, and trains a kernel
network that transports prior samples to posterior samples.  Baselines
(a MAP-based Gaussian mixture, Metropolis-Hastings, Hamiltonian Monte
Carlo), a bandwidth selector for the variational complexity cost, and
spring / finite-element forward models round out the toolbox.

`run_experiment` drives the full pipeline from a TOML config; the stage
functions on `PipelineRun` expose the same steps individually.
"""

from .baselines import (
    bfgs_minimize,
    distance_loglik,
    gaussian_coverage_points,
    hmc_sample,
    map_estimate,
    map_posterior_mixture,
    mh_sample,
    optimize_sigma,
    standard_loglik,
)
from .config import ConfigError, config_hash, load_config, validate_config
from .experiments import (
    Dataset,
    Truth,
    TruthSpec,
    analytic_map,
    generate_dataset,
    make_truth,
    mode_fractions,
    moment_errors,
    normalized_error,
    spring_inputs,
)
from .fem import FemModel, FemProblem, fem_solve
from .forward import ForwardModel, SpringModel
from .gmm import GaussianMixture, uniform_box_logpdf
from .inversion import (
    InversionOptions,
    invert_dataset,
    invert_sample,
    invert_with_noise,
)
from .klfield import kl_basis_2d, modulus_field, transform_basis
from .mesh import rect_mesh
from .nnk import (
    KernelNetwork,
    TrainingOptions,
    augment_prior,
    init_network,
    load_checkpoint,
    predict,
    save_checkpoint,
    train,
)
from .permutation import permute, scale_prior
from .pipeline import STAGES, PipelineRun, StageError, run_experiment

__version__ = "0.1.0"

__all__ = [
    "Dataset",
    "ConfigError",
    "FemModel",
    "FemProblem",
    "ForwardModel",
    "GaussianMixture",
    "InversionOptions",
    "KernelNetwork",
    "PipelineRun",
    "STAGES",
    "SpringModel",
    "StageError",
    "TrainingOptions",
    "Truth",
    "TruthSpec",
    "analytic_map",
    "augment_prior",
    "bfgs_minimize",
    "config_hash",
    "distance_loglik",
    "fem_solve",
    "gaussian_coverage_points",
    "generate_dataset",
    "hmc_sample",
    "init_network",
    "invert_dataset",
    "invert_sample",
    "invert_with_noise",
    "kl_basis_2d",
    "load_checkpoint",
    "load_config",
    "make_truth",
    "map_estimate",
    "map_posterior_mixture",
    "mh_sample",
    "mode_fractions",
    "modulus_field",
    "moment_errors",
    "normalized_error",
    "optimize_sigma",
    "permute",
    "predict",
    "rect_mesh",
    "run_experiment",
    "save_checkpoint",
    "scale_prior",
    "spring_inputs",
    "standard_loglik",
    "train",
    "transform_basis",
    "uniform_box_logpdf",
    "validate_config",
    "__version__",
]
