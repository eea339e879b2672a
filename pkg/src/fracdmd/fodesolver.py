"""Numerical solution of Caputo initial value problems for synthetic data.

Solves D^q x = f(x), x(0) = x0 with 0 < q <= 1 by the fractional
Adams-Bashforth-Moulton predictor-corrector: the Volterra integral form of
the problem is discretized with a fractional rectangle rule (predictor) and
a fractional trapezoid / product-integration rule (corrector).  For q = 1
this reduces to the classical second-order ABM scheme.

Vector fields come from a small named registry so problems remain plain,
serializable configuration.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy.special import rgamma

from .errors import DivergenceError
from .okhs import Trajectory

__all__ = ["FodeProblem", "make_vector_field", "solve", "VECTOR_FIELDS"]


def _linear_1d(params):
    lam = float(params["lam"])
    return lambda x: lam * x


def _linear_nd(params):
    matrix = np.asarray(params["matrix"], dtype=float)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise ValueError("linearnd expects a square 'matrix'")
    return lambda x: matrix @ x


def _logistic(params):
    r = float(params["r"])
    k_cap = float(params["k_cap"])
    return lambda x: r * x * (1.0 - x / k_cap)


def _duffing(params):
    # unforced Duffing oscillator written as a first-order polynomial field:
    # (x, v) -> (v, -delta*v - alpha*x - beta*x^3)
    alpha = float(params["alpha"])
    beta = float(params["beta"])
    delta = float(params.get("delta", 0.0))
    def rhs(x):
        return np.array([x[1], -delta * x[1] - alpha * x[0] - beta * x[0] ** 3])
    return rhs


def _zero(params):
    return lambda x: np.zeros_like(x)


VECTOR_FIELDS = {
    "linear1d": _linear_1d,
    "linearnd": _linear_nd,
    "logistic": _logistic,
    "duffing": _duffing,
    "zero": _zero,
}


def make_vector_field(name, params=None):
    """Instantiate a registered vector field from its name and parameters."""
    try:
        factory = VECTOR_FIELDS[str(name)]
    except KeyError:
        raise ValueError(
            f"unknown vector field {name!r}; registered: {sorted(VECTOR_FIELDS)}"
        ) from None
    return factory(params or {})


@dataclass(frozen=True)
class FodeProblem:
    """A Caputo initial value problem D^q x = f(x), x(0) = x0 on [0, horizon]."""

    order: float
    field_name: str
    params: dict = field(default_factory=dict)
    x0: np.ndarray = None
    horizon: float = 1.0
    dt: float = 1e-2

    def __post_init__(self):
        if not (np.isfinite(self.order) and 0 < self.order <= 1):
            raise ValueError(f"order must lie in (0, 1], got {self.order}")
        x0 = np.atleast_1d(np.asarray(self.x0, dtype=float))
        if x0.ndim != 1 or not np.isfinite(x0).all():
            raise ValueError("x0 must be a finite vector")
        if not (self.horizon > 0 and self.dt > 0 and self.horizon / self.dt >= 10):
            raise ValueError("need horizon > 0, dt > 0 and at least 10 steps")
        make_vector_field(self.field_name, self.params)  # fail fast on bad specs
        x0 = x0.copy()
        x0.setflags(write=False)
        object.__setattr__(self, "x0", x0)


def solve(problem, corrector_sweeps=1):
    """Integrate the problem on its uniform grid; returns a Trajectory.

    ``corrector_sweeps`` repeats the corrector stage (1 is the standard
    scheme; a few extra sweeps can help stiff fields).
    """
    corrector_sweeps = int(corrector_sweeps)
    if not 1 <= corrector_sweeps <= 5:
        raise ValueError("corrector_sweeps must be between 1 and 5")
    rhs = make_vector_field(problem.field_name, problem.params)
    q = problem.order
    h = problem.dt
    n_steps = int(round(problem.horizon / h))
    x0 = problem.x0
    dim = x0.size

    # power tables shared by both rules:
    # predictor (rectangle) weights are first differences of k^q,
    # corrector (trapezoid) interior weights are second differences of k^(q+1)
    k = np.arange(n_steps + 2, dtype=float)
    pow_q = k**q
    pow_q1 = k ** (q + 1)
    rect = np.diff(pow_q)
    second_diff = pow_q1[2:] + pow_q1[:-2] - 2.0 * pow_q1[1:-1]

    pred_scale = h**q * rgamma(q + 1.0)
    corr_scale = h**q * rgamma(q + 2.0)

    states = np.empty((n_steps + 1, dim))
    f_hist = np.empty((n_steps + 1, dim))
    states[0] = x0
    f_hist[0] = rhs(x0)

    with np.errstate(over="ignore", invalid="ignore"):
        for n in range(n_steps):
            # predictor: x0 + h^q/Gamma(q+1) * sum_j ((n+1-j)^q - (n-j)^q) f_j
            hist = rect[: n + 1][::-1] @ f_hist[: n + 1]
            x_pred = x0 + pred_scale * hist

            # corrector: trapezoid history plus the predicted endpoint
            a0 = pow_q1[n] - (n - q) * pow_q[n + 1]
            hist = a0 * f_hist[0]
            if n >= 1:
                hist = hist + second_diff[:n][::-1] @ f_hist[1 : n + 1]
            x_next = x_pred
            for _ in range(corrector_sweeps):
                x_next = x0 + corr_scale * (hist + rhs(x_next))
            if not np.isfinite(x_next).all():
                raise DivergenceError(
                    f"solution diverged between t={n * h} and t={(n + 1) * h}",
                    last_valid_time=n * h,
                )
            states[n + 1] = x_next
            f_hist[n + 1] = rhs(x_next)

    return Trajectory(dt=h, states=states)
