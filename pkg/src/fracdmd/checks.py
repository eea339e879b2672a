"""Built-in numerical oracle checks, runnable from the CLI.

Each check compares a computed quantity against an independent closed form
or construction and records the measured error next to its tolerance.
``weight_perturbation`` multiplicatively distorts the quadrature weights
used by the product-integration checks; it exists as a negative-control
hook so the suite can be shown to actually fail when the numerics break.
"""

from dataclasses import dataclass

import numpy as np
from scipy.special import gamma

from .fraccalc import (
    SampledSignal,
    build_singular_rule,
    caputo_derivative,
    mittag_leffler,
    rl_integral,
)
from .fodesolver import FodeProblem, solve
from .kernels import KernelSpec, kernel_cross_matrix
from .okhs import Trajectory, gram_matrix

__all__ = ["CheckResult", "run_builtin_checks"]


@dataclass(frozen=True)
class CheckResult:
    name: str
    measured: float
    tolerance: float

    @property
    def passed(self):
        return self.measured <= self.tolerance


def _power_signal(p, n=1001):
    t = np.linspace(0.0, 1.0, n)
    return SampledSignal(t0=0.0, dt=t[1] - t[0], values=t**p)


def _rl_power_error(p, q, perturbation):
    """Product rule vs analytic power-law integral, with optional weight distortion."""
    signal = _power_signal(p)
    rule = build_singular_rule(q, 1.0, signal.n_samples)
    weights = rule.weights * (1.0 + perturbation)
    computed = float(weights @ signal.values)
    exact = gamma(p + 1) / gamma(p + q + 1)
    return abs(computed - exact)


def _smooth_trajectories(m=4, n=60, seed=20240211):
    rng = np.random.default_rng(seed)
    trajs = []
    for _ in range(m):
        t = np.linspace(0.0, 1.0, n)
        a, b = rng.uniform(-1, 1, size=(2, 2))
        states = np.column_stack(
            [a[j] + b[j] * t + 0.2 * np.sin(np.pi * t + a[j]) for j in range(2)]
        )
        trajs.append(Trajectory(dt=t[1] - t[0], states=states))
    return trajs


def run_builtin_checks(weight_perturbation=0.0):
    """Run the oracle suite; returns a list of CheckResult."""
    results = []

    def check(name, measured, tolerance):
        results.append(CheckResult(name=name, measured=float(measured), tolerance=tolerance))

    # fractional integral against the power-law family
    check("rl_integral constant q=0.5", _rl_power_error(0, 0.5, weight_perturbation), 1e-8)
    check("rl_integral linear q=0.3", _rl_power_error(1, 0.3, weight_perturbation), 1e-8)
    check("rl_integral quadratic q=0.7", _rl_power_error(2, 0.7, weight_perturbation), 1e-4)

    # Caputo derivative of t at t=1 equals 1/Gamma(2-q)
    signal = _power_signal(1)
    measured = abs(caputo_derivative(signal, 0.5, 1.0) - 1.0 / gamma(1.5))
    check("caputo_derivative linear q=0.5", measured, 1e-8)

    # semigroup: J^0.3 applied to J^0.4 of t equals J^0.7 of t at t=1
    signal = _power_signal(1, n=2001)
    t = signal.times
    inner = SampledSignal(
        t0=0.0,
        dt=signal.dt,
        values=np.array([rl_integral(signal, 0.4, tk) for tk in t]),
    )
    nested = rl_integral(inner, 0.3, 1.0)
    direct = rl_integral(signal, 0.7, 1.0)
    check("semigroup J^0.3 o J^0.4 = J^0.7", abs(nested - direct), 1e-5)

    # quadrature rule exactness and positivity
    rule = build_singular_rule(0.25, 2.0, 301)
    check(
        "singular rule exact on constants",
        abs(rule.weights.sum() - 2.0**0.25 / gamma(1.25)),
        1e-12,
    )
    worst = 0.0
    for q in (0.1, 0.3, 0.5, 0.7, 0.9, 1.0):
        worst = max(worst, -build_singular_rule(q, 1.0, 101).weights.min())
    check("singular rule weights nonnegative", worst, 0.0)

    # Mittag-Leffler identities
    z = np.linspace(-5, 5, 41) + 1j * np.linspace(-3, 3, 41)
    check("E_1(z) = exp(z)", np.abs(mittag_leffler(1.0, z) - np.exp(z)).max(), 1e-9)
    z = np.linspace(-5, 5, 41)
    check(
        "E_2(z^2) = cosh(z)",
        np.abs(mittag_leffler(2.0, z**2) - np.cosh(z)).max(),
        1e-9,
    )
    worst = max(
        abs(mittag_leffler(q, 0.0) - 1.0) for q in np.arange(0.1, 2.0, 0.2)
    )
    check("E_q(0) = 1", worst, 0.0)

    # occupation-kernel Gram structure
    trajs = _smooth_trajectories()
    spec = KernelSpec("gaussian", 1.0)
    g = gram_matrix(trajs, 0.5, spec)
    check("gram symmetry", np.abs(g - g.T).max() / np.abs(g).max(), 1e-10)
    eigmin = np.linalg.eigvalsh(g).min()
    check("gram positive semidefinite", max(0.0, -eigmin) / np.abs(g).max(), 1e-8)

    # order-1 Gram equals a plain trapezoid double integral
    g1 = gram_matrix(trajs, 1.0, spec)
    worst = 0.0
    for i, ti in enumerate(trajs):
        wi = np.full(ti.n_samples, ti.dt)
        wi[[0, -1]] /= 2
        for j, tj in enumerate(trajs):
            wj = np.full(tj.n_samples, tj.dt)
            wj[[0, -1]] /= 2
            cross = kernel_cross_matrix(spec, tj.states, ti.states)
            worst = max(worst, abs(g1[j, i] - wj @ cross @ wi))
    check("q=1 gram equals trapezoid double integral", worst, 1e-10)

    # solver against closed forms
    problem = FodeProblem(order=1.0, field_name="linear1d", params={"lam": -1.0},
                          x0=[1.0], horizon=1.0, dt=1e-3)
    terminal = solve(problem).states[-1, 0]
    check("solver q=1 exponential decay", abs(terminal - np.exp(-1.0)), 1e-4)

    # halving dt must shrink the terminal error by at least ~2^1.5 for q=0.5
    exact = complex(mittag_leffler(0.5, -1.0)).real
    errors = []
    for dt in (2e-3, 1e-3):
        problem = FodeProblem(order=0.5, field_name="linear1d", params={"lam": -1.0},
                              x0=[1.0], horizon=1.0, dt=dt)
        errors.append(abs(solve(problem).states[-1, 0] - exact))
    check("solver q=0.5 terminal error", errors[-1], 1e-3)
    ratio = errors[0] / errors[1] if errors[1] > 0 else np.inf
    check("solver q=0.5 order ratio >= 1.8", max(0.0, 1.8 - ratio), 0.0)

    return results
