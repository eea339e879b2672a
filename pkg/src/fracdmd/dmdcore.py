"""Finite-rank operator construction, spectral decomposition and prediction.

The decomposition projects the adjoint of the chosen operator variant onto
the span of the trajectories' occupation kernels: with Gram matrix G and
interaction matrix A, the finite-rank representation is the solution of
(G + reg*I) X = A.  Its eigenpairs give eigenfunctions as occupation-kernel
combinations, dynamic modes come from projecting the full-state observable
onto that eigenbasis, and predictions combine modes with exponential or
Mittag-Leffler time factors.
"""

import json
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .errors import ConditioningError
from .fraccalc import build_singular_rule, mittag_leffler
from .kernels import KernelSpec, as_kernel_spec, kernel_cross_matrix
from .okhs import (
    OperatorVariant,
    Trajectory,
    as_trajectories,
    as_variant,
    build_occupation_gram,
    occupation_functional,
)

__all__ = [
    "DecompositionConfig",
    "FiniteRankModel",
    "finite_rank_matrix",
    "decompose",
    "eigenfunction_at",
    "eigenfunction_values",
    "predict",
    "reconstruction_error",
    "save_model",
    "load_model",
    "model_to_json",
    "model_from_json",
]

_EPS = np.finfo(float).eps


@dataclass(frozen=True)
class DecompositionConfig:
    """Settings for one decomposition run."""

    variant: OperatorVariant = OperatorVariant.FRACTIONAL
    order: float = 0.5
    kernel: KernelSpec = field(default_factory=KernelSpec)
    reg: float = 0.0
    quad_refine: int = 1

    def __post_init__(self):
        object.__setattr__(self, "variant", as_variant(self.variant))
        object.__setattr__(self, "kernel", as_kernel_spec(self.kernel))
        if not (np.isfinite(self.order) and 0 < self.order <= 1):
            raise ValueError(f"order must lie in (0, 1], got {self.order}")
        if not (np.isfinite(self.reg) and self.reg >= 0):
            raise ValueError(f"reg must be nonnegative, got {self.reg}")
        if int(self.quad_refine) < 1:
            raise ValueError("quad_refine must be a positive integer")
        object.__setattr__(self, "quad_refine", int(self.quad_refine))


@dataclass(frozen=True)
class FiniteRankModel:
    """Spectral model fitted from trajectories.

    ``coeffs`` column i holds the occupation-kernel coefficients of the i-th
    eigenfunction, normalized to unit norm in the trajectory Gram pairing;
    ``modes`` row i is the dynamic mode attached to that eigenfunction.  The
    training trajectories are retained because evaluating an eigenfunction
    at a new state requires integrating the kernel along each of them.
    """

    variant: OperatorVariant
    order: float
    kernel: KernelSpec
    eigenvalues: np.ndarray
    coeffs: np.ndarray
    modes: np.ndarray
    trajectories: tuple
    reg: float
    diagnostics: dict = field(default_factory=dict)

    @property
    def rank(self):
        return self.eigenvalues.size

    @property
    def dim(self):
        return self.trajectories[0].dim

    @property
    def gram_order(self):
        return 1.0 if self.variant is OperatorVariant.LIOUVILLE else self.order


def finite_rank_matrix(gram, interaction, reg=0.0):
    """Solve (gram + reg*I) X = interaction by a symmetric factorization.

    Raises ConditioningError when the shifted Gram matrix is numerically
    singular (condition estimate beyond 1/eps); a larger ``reg`` is the
    usual remedy.
    """
    gram = np.asarray(gram, dtype=float)
    interaction = np.asarray(interaction, dtype=float)
    if gram.shape != interaction.shape or gram.ndim != 2 or gram.shape[0] != gram.shape[1]:
        raise ValueError("gram and interaction must be square matrices of equal shape")
    shifted = gram + reg * np.eye(gram.shape[0])
    spectrum = np.linalg.eigvalsh((shifted + shifted.T) / 2.0)
    if spectrum[-1] <= 0 or spectrum[0] <= spectrum[-1] * _EPS:
        raise ConditioningError(
            f"Gram matrix is numerically singular (eigenvalue range [{spectrum[0]:.3e}, "
            f"{spectrum[-1]:.3e}]); increase reg"
        )
    try:
        cho = scipy.linalg.cho_factor(shifted)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - guarded above
        raise ConditioningError(f"Cholesky factorization failed: {exc}; increase reg")
    return scipy.linalg.cho_solve(cho, interaction)


def _gram_condition(gram, reg):
    spectrum = np.linalg.eigvalsh(gram + reg * np.eye(gram.shape[0]))
    if spectrum[0] <= 0:
        return np.inf
    return float(spectrum[-1] / spectrum[0])


def decompose(trajectories, config=None, **overrides):
    """Fit a FiniteRankModel to a collection of trajectories.

    Keyword overrides (``variant``, ``order``, ``kernel``, ``reg``,
    ``quad_refine``) are merged into ``config`` for convenience.
    """
    if config is None:
        config = DecompositionConfig(**overrides)
    elif overrides:
        merged = {
            "variant": config.variant,
            "order": config.order,
            "kernel": config.kernel,
            "reg": config.reg,
            "quad_refine": config.quad_refine,
        }
        merged.update(overrides)
        config = DecompositionConfig(**merged)
    trajs = as_trajectories(trajectories)

    pair = build_occupation_gram(
        trajs, config.order, config.kernel, config.variant, refine=config.quad_refine
    )
    # The transposed interaction matrix turns the solve into the projection
    # of the operator itself (rather than its adjoint); the eigenvalues are
    # the same either way, but only the operator's eigenvectors satisfy the
    # exponential / Mittag-Leffler evolution the reconstruction relies on.
    rank_matrix = finite_rank_matrix(pair.gram, pair.interaction.T, config.reg)

    eigenvalues, vectors = np.linalg.eig(rank_matrix)
    eigenvalues = eigenvalues.astype(complex)
    vectors = vectors.astype(complex)
    # descending |lambda|, ties broken by descending imaginary part
    order_idx = np.lexsort((-eigenvalues.imag, -np.abs(eigenvalues)))
    eigenvalues = eigenvalues[order_idx]
    vectors = vectors[:, order_idx]

    gram = pair.gram
    norms = np.sqrt(np.abs(np.einsum("ki,kl,li->i", vectors.conj(), gram, vectors)))
    norms = np.maximum(norms, np.finfo(float).tiny)
    coeffs = vectors / norms

    # least squares for the full-state observable in the eigenfunction basis:
    # (V^H G V) + reg*I against V^H d, one column per state dimension
    eig_gram = coeffs.conj().T @ gram @ coeffs
    functional = np.array(
        [
            [occupation_functional(t, pair.order, j) for j in range(trajs[0].dim)]
            for t in trajs
        ]
    )
    rhs = coeffs.conj().T @ functional
    modes = scipy.linalg.solve(
        eig_gram + config.reg * np.eye(len(trajs)), rhs, assume_a="her"
    )

    diagnostics = {
        "gram_condition": _gram_condition(gram, config.reg),
        "eigenvector_condition": float(np.linalg.cond(vectors)),
    }
    return FiniteRankModel(
        variant=config.variant,
        order=config.order,
        kernel=config.kernel,
        eigenvalues=eigenvalues,
        coeffs=coeffs,
        modes=modes,
        trajectories=tuple(trajs),
        reg=config.reg,
        diagnostics=diagnostics,
    )


def eigenfunction_values(model, x):
    """All eigenfunctions of the model evaluated at state ``x`` (length M)."""
    x = np.asarray(x, dtype=float).ravel()
    if x.size != model.dim:
        raise ValueError(f"state has dimension {x.size}, model has {model.dim}")
    occ = np.empty(model.rank)
    for k, traj in enumerate(model.trajectories):
        rule = build_singular_rule(model.gram_order, traj.horizon, traj.n_samples)
        samples = kernel_cross_matrix(model.kernel, traj.states, x[None, :])[:, 0]
        occ[k] = rule.apply(samples)
    return model.coeffs.T @ occ


def eigenfunction_at(model, i, x):
    """Evaluate the i-th eigenfunction at state ``x``."""
    i = int(i)
    if not 0 <= i < model.rank:
        raise IndexError(f"eigenfunction index {i} out of range for rank {model.rank}")
    return complex(eigenfunction_values(model, x)[i])


def _time_basis(model, times):
    """Rows: times; columns: per-eigenvalue time factor."""
    times = np.asarray(times, dtype=float)
    if model.variant is OperatorVariant.LIOUVILLE:
        return np.exp(np.outer(times, model.eigenvalues))
    args = np.outer(times**model.order, model.eigenvalues)
    return mittag_leffler(model.order, args)


def predict(model, x0, times, return_diagnostics=False):
    """Predict the state from ``x0`` at the given (ascending, nonnegative) times.

    Returns an array of shape (len(times), dim).  With
    ``return_diagnostics=True`` also returns the largest imaginary magnitude
    discarded when taking the real part, relative to the prediction scale.
    """
    times = np.asarray(times, dtype=float)
    if times.ndim != 1 or times.size == 0:
        raise ValueError("times must be a nonempty 1-D array")
    if (times < 0).any() or (np.diff(times) < 0).any():
        raise ValueError("times must be nonnegative and ascending")
    amplitudes = eigenfunction_values(model, x0)
    basis = _time_basis(model, times)
    values = (basis * amplitudes) @ model.modes
    scale = np.abs(values).max()
    imag_rel = float(np.abs(values.imag).max() / scale) if scale > 0 else 0.0
    if return_diagnostics:
        return values.real, imag_rel
    return values.real


def reconstruction_error(model, trajectory):
    """Relative L2 error of the model's reconstruction of one trajectory."""
    traj = trajectory
    predicted = predict(model, traj.initial_state, traj.times)
    return float(
        np.linalg.norm(predicted - traj.states) / np.linalg.norm(traj.states)
    )


# --- serialization ---------------------------------------------------------
#
# Models are stored as JSON with complex arrays flattened to [re, im] pairs.
# Floats go through repr, so every value round-trips bit-exactly.

_FORMAT = "fracdmd-model"
_VERSION = 1


def _complex_out(arr):
    return [[[v.real, v.imag] for v in row] for row in np.atleast_2d(arr)]


def _complex_in(data):
    return np.array([[complex(re, im) for re, im in row] for row in data])


def model_to_json(model):
    payload = {
        "format": _FORMAT,
        "version": _VERSION,
        "variant": model.variant.value,
        "order": model.order,
        "kernel": model.kernel.to_string(),
        "reg": model.reg,
        "eigenvalues": [[v.real, v.imag] for v in model.eigenvalues],
        "coeffs": _complex_out(model.coeffs),
        "modes": _complex_out(model.modes),
        "trajectories": [
            {"dt": t.dt, "states": t.states.tolist()} for t in model.trajectories
        ],
        "diagnostics": model.diagnostics,
    }
    return json.dumps(payload, indent=2)


def model_from_json(text):
    payload = json.loads(text)
    if payload.get("format") != _FORMAT:
        raise ValueError("not a model file")
    if payload.get("version") != _VERSION:
        raise ValueError(f"unsupported model version {payload.get('version')}")
    return FiniteRankModel(
        variant=as_variant(payload["variant"]),
        order=float(payload["order"]),
        kernel=KernelSpec.from_string(payload["kernel"]),
        eigenvalues=np.array([complex(re, im) for re, im in payload["eigenvalues"]]),
        coeffs=_complex_in(payload["coeffs"]),
        modes=_complex_in(payload["modes"]),
        trajectories=tuple(
            Trajectory(dt=t["dt"], states=np.array(t["states"])) for t in payload["trajectories"]
        ),
        reg=float(payload["reg"]),
        diagnostics=payload.get("diagnostics", {}),
    )


def save_model(path, model):
    with open(path, "w", encoding="utf-8") as handle:
        handle.write(model_to_json(model))
        handle.write("\n")


def load_model(path):
    with open(path, "r", encoding="utf-8") as handle:
        return model_from_json(handle.read())
