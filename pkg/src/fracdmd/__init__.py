"""Occupation-kernel dynamic mode decomposition for fractional-order systems.

From uniformly sampled trajectories of a Caputo fractional system
D^q x = f(x), the package builds finite-rank representations of Liouville
and fractional Liouville operators over an occupation-kernel Hilbert space
realized through an RKHS, extracts eigenvalues and dynamic modes, and
predicts new trajectories as sums of exponentials or Mittag-Leffler
functions.
"""

__version__ = "0.1.0"

from .dmdcore import (
    DecompositionConfig,
    FiniteRankModel,
    decompose,
    eigenfunction_at,
    eigenfunction_values,
    finite_rank_matrix,
    load_model,
    model_from_json,
    model_to_json,
    predict,
    reconstruction_error,
    save_model,
)
from .errors import (
    AccuracyError,
    ConditioningError,
    ConfigError,
    DivergenceError,
    FracdmdError,
)
from .estimator import OccupationKernelDMD
from .fodesolver import FodeProblem, make_vector_field, solve
from .fraccalc import (
    MLParams,
    SampledSignal,
    SingularQuadRule,
    build_singular_rule,
    caputo_derivative,
    mittag_leffler,
    rl_derivative,
    rl_integral,
)
from .kernels import KernelSpec, kernel_cross_matrix, kernel_eval
from .okhs import (
    OccupationGram,
    OperatorVariant,
    Trajectory,
    build_occupation_gram,
    gram_matrix,
    interaction_matrix,
    occupation_functional,
    occupation_kernel_at,
)
from .trajio import read_trajectory_csv, write_trajectory_csv

__all__ = [
    "AccuracyError",
    "ConditioningError",
    "ConfigError",
    "DecompositionConfig",
    "DivergenceError",
    "FiniteRankModel",
    "FodeProblem",
    "FracdmdError",
    "KernelSpec",
    "MLParams",
    "OccupationGram",
    "OccupationKernelDMD",
    "OperatorVariant",
    "SampledSignal",
    "SingularQuadRule",
    "Trajectory",
    "build_occupation_gram",
    "build_singular_rule",
    "caputo_derivative",
    "decompose",
    "eigenfunction_at",
    "eigenfunction_values",
    "finite_rank_matrix",
    "gram_matrix",
    "interaction_matrix",
    "kernel_cross_matrix",
    "kernel_eval",
    "load_model",
    "make_vector_field",
    "mittag_leffler",
    "model_from_json",
    "model_to_json",
    "occupation_functional",
    "occupation_kernel_at",
    "predict",
    "read_trajectory_csv",
    "reconstruction_error",
    "rl_derivative",
    "rl_integral",
    "save_model",
    "solve",
    "write_trajectory_csv",
]
