"""Occupation-kernel computations in RKHS coordinates.

Every quantity here is a weighted integral along sampled trajectories: the
occupation kernel evaluated at a state, the Gram matrix of occupation
kernels, and the interaction matrix encoding the adjoint action of the
(fractional) Liouville operator.  Integrals use the product-integration
rules from :mod:`fracdmd.fraccalc`, so the weakly singular weight of order
q is handled exactly against piecewise-linear interpolants.
"""

import enum
from dataclasses import dataclass

import numpy as np

from .fraccalc import build_singular_rule, _check_order
from .kernels import KernelSpec, as_kernel_spec, kernel_cross_matrix

__all__ = [
    "OperatorVariant",
    "Trajectory",
    "OccupationGram",
    "occupation_kernel_at",
    "gram_matrix",
    "interaction_matrix",
    "occupation_functional",
    "build_occupation_gram",
]


class OperatorVariant(str, enum.Enum):
    """Which operator the decomposition targets.

    LIOUVILLE pairs trajectories through plain time integrals and yields
    exponential time dynamics; FRACTIONAL weights the integrals with
    (T-tau)^(q-1) and yields Mittag-Leffler dynamics.
    """

    LIOUVILLE = "liouville"
    FRACTIONAL = "fractional"


def as_variant(variant):
    if isinstance(variant, OperatorVariant):
        return variant
    try:
        return OperatorVariant(str(variant).lower())
    except ValueError:
        raise ValueError(
            f"unknown variant {variant!r}; choose 'liouville' or 'fractional'"
        ) from None


@dataclass(frozen=True)
class Trajectory:
    """Uniformly sampled trajectory; row k of ``states`` is the state at k*dt."""

    dt: float
    states: np.ndarray

    def __post_init__(self):
        states = np.asarray(self.states, dtype=float)
        if states.ndim == 1:
            states = states[:, None]
        if states.ndim != 2 or states.shape[0] < 2:
            raise ValueError("states must be an (N, n) array with N >= 2")
        if not np.isfinite(states).all():
            raise ValueError("states contain non-finite entries")
        if not (np.isfinite(self.dt) and self.dt > 0):
            raise ValueError(f"dt must be positive and finite, got {self.dt}")
        states = states.copy()
        states.setflags(write=False)
        object.__setattr__(self, "states", states)
        object.__setattr__(self, "dt", float(self.dt))

    @property
    def n_samples(self):
        return self.states.shape[0]

    @property
    def dim(self):
        return self.states.shape[1]

    @property
    def horizon(self):
        return (self.n_samples - 1) * self.dt

    @property
    def times(self):
        return self.dt * np.arange(self.n_samples)

    @property
    def initial_state(self):
        return self.states[0]

    @property
    def final_state(self):
        return self.states[-1]

    def refined(self, factor):
        """Linearly re-interpolate onto a grid ``factor`` times finer."""
        factor = int(factor)
        if factor < 1:
            raise ValueError("refinement factor must be a positive integer")
        if factor == 1:
            return self
        n_fine = (self.n_samples - 1) * factor + 1
        t_fine = np.linspace(0.0, self.horizon, n_fine)
        fine = np.column_stack(
            [np.interp(t_fine, self.times, self.states[:, j]) for j in range(self.dim)]
        )
        return Trajectory(dt=self.horizon / (n_fine - 1), states=fine)


def as_trajectory(obj):
    """Accept a Trajectory, a (dt, states) pair, or a dict with those keys."""
    if isinstance(obj, Trajectory):
        return obj
    if isinstance(obj, dict):
        return Trajectory(dt=obj["dt"], states=obj["states"])
    if isinstance(obj, (tuple, list)) and len(obj) == 2 and np.isscalar(obj[0]):
        return Trajectory(dt=obj[0], states=obj[1])
    raise TypeError(
        "expected a Trajectory, a (dt, states) pair, or a dict with 'dt' and 'states'"
    )


def as_trajectories(objs):
    trajs = [as_trajectory(t) for t in objs]
    if not trajs:
        raise ValueError("at least one trajectory is required")
    dims = {t.dim for t in trajs}
    if len(dims) > 1:
        raise ValueError(f"trajectories have mixed state dimensions {sorted(dims)}")
    return trajs


def _rule_for(traj, q, refine=1):
    traj = traj.refined(refine)
    return traj, build_singular_rule(q, traj.horizon, traj.n_samples)


def occupation_kernel_at(traj, q, kernel, x, refine=1):
    """Evaluate the occupation kernel of order q at state ``x``.

    Computes (1/Gamma(q)) * int_0^T (T-t)^(q-1) K(x, traj(t)) dt with the
    trajectory's product-integration rule.
    """
    traj = as_trajectory(traj)
    spec = as_kernel_spec(kernel)
    x = np.asarray(x, dtype=float).ravel()
    if x.size != traj.dim:
        raise ValueError(f"state has dimension {x.size}, trajectory has {traj.dim}")
    fine, rule = _rule_for(traj, q, refine)
    samples = kernel_cross_matrix(spec, fine.states, x[None, :])[:, 0]
    return float(rule.apply(samples))


def gram_matrix(trajs, q, kernel, refine=1):
    """Gram matrix of occupation kernels of order q.

    Entry (j, i) is the double product-integration approximation of
    (1/Gamma(q))^2 * iint (T_j-tau)^(q-1) (T_i-t)^(q-1) K(traj_j(tau), traj_i(t)),
    computed as a weighted quadratic form of the kernel cross matrix;
    symmetry is enforced by averaging with the transpose.
    """
    _check_order(q, 1.0)
    trajs = as_trajectories(trajs)
    spec = as_kernel_spec(kernel)
    m = len(trajs)
    fine, rules = zip(*(_rule_for(t, q, refine) for t in trajs))
    g = np.empty((m, m))
    for i in range(m):
        for j in range(i, m):
            cross = kernel_cross_matrix(spec, fine[j].states, fine[i].states)
            g[j, i] = rules[j].weights @ cross @ rules[i].weights
            g[i, j] = rules[i].weights @ cross.T @ rules[j].weights
    return (g + g.T) / 2.0


def interaction_matrix(trajs, q, kernel, variant, refine=1):
    """Adjoint interaction matrix for the chosen operator variant.

    Entry (j, i) integrates K(traj_j(tau), traj_i(T_i)) - K(traj_j(tau), traj_i(0))
    over trajectory j's interval: an unweighted time integral for LIOUVILLE,
    the singular weight of order q (with its 1/Gamma(q) factor) for FRACTIONAL.
    """
    _check_order(q, 1.0)
    variant = as_variant(variant)
    trajs = as_trajectories(trajs)
    spec = as_kernel_spec(kernel)
    weight_order = 1.0 if variant is OperatorVariant.LIOUVILLE else q
    m = len(trajs)
    endpoints_final = np.array([t.final_state for t in trajs])
    endpoints_start = np.array([t.initial_state for t in trajs])
    a = np.empty((m, m))
    for j in range(m):
        fine, rule = _rule_for(trajs[j], weight_order, refine)
        diff = kernel_cross_matrix(spec, fine.states, endpoints_final) - kernel_cross_matrix(
            spec, fine.states, endpoints_start
        )
        a[j, :] = rule.apply(diff)
    return a


def occupation_functional(traj, q, component):
    """Singular-rule integral of one coordinate of the trajectory.

    This is the pairing of the occupation kernel with the corresponding
    coordinate of the full-state observable.
    """
    traj = as_trajectory(traj)
    component = int(component)
    if not 0 <= component < traj.dim:
        raise IndexError(f"component {component} out of range for dimension {traj.dim}")
    _, rule = _rule_for(traj, q)
    return float(rule.apply(traj.states[:, component]))


@dataclass(frozen=True)
class OccupationGram:
    """Gram and interaction matrices for one trajectory collection.

    ``order`` is the weight order actually used for the Gram pairing: 1 for
    the LIOUVILLE variant regardless of the system order, q for FRACTIONAL.
    """

    order: float
    gram: np.ndarray
    interaction: np.ndarray
    variant: OperatorVariant
    kernel: KernelSpec


def build_occupation_gram(trajs, order, kernel, variant, refine=1):
    """Assemble the Gram/interaction pair that defines the finite-rank operator."""
    variant = as_variant(variant)
    spec = as_kernel_spec(kernel)
    gram_order = 1.0 if variant is OperatorVariant.LIOUVILLE else float(order)
    return OccupationGram(
        order=gram_order,
        gram=gram_matrix(trajs, gram_order, spec, refine=refine),
        interaction=interaction_matrix(trajs, order, spec, variant, refine=refine),
        variant=variant,
        kernel=spec,
    )
