"""Fractional-calculus primitives on uniformly sampled signals.

The central tool is product integration: integrals with the weakly singular
weight (t - tau)^(q-1) are evaluated exactly against the piecewise-linear
interpolant of the samples, so the singularity never degrades the order of
the rule.  Everything else (Caputo/Riemann-Liouville derivatives, the
Mittag-Leffler function) is built on top of that.
"""

from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln, rgamma

from .errors import AccuracyError

__all__ = [
    "SampledSignal",
    "SingularQuadRule",
    "MLParams",
    "build_singular_rule",
    "rl_integral",
    "caputo_derivative",
    "rl_derivative",
    "mittag_leffler",
]


@dataclass(frozen=True)
class SampledSignal:
    """Uniformly sampled scalar signal; sample k is the value at ``t0 + k*dt``."""

    t0: float
    dt: float
    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.ndim != 1 or values.size < 2:
            raise ValueError("signal needs at least two samples in a 1-D array")
        if not np.isfinite(values).all():
            raise ValueError("signal contains non-finite samples")
        if not (np.isfinite(self.dt) and self.dt > 0):
            raise ValueError(f"dt must be positive and finite, got {self.dt}")
        values = values.copy()
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @property
    def n_samples(self):
        return self.values.size

    @property
    def t_end(self):
        return self.t0 + (self.values.size - 1) * self.dt

    @property
    def times(self):
        return self.t0 + self.dt * np.arange(self.values.size)

    @classmethod
    def sample(cls, fn, t0, t_end, n_samples):
        """Sample a callable on a uniform grid of ``n_samples`` points."""
        times = np.linspace(t0, t_end, n_samples)
        return cls(t0=t0, dt=times[1] - times[0], values=np.asarray(fn(times), dtype=float))


@dataclass(frozen=True)
class SingularQuadRule:
    """Nodes and weights for g -> (1/Gamma(q)) int_0^T (T-tau)^(q-1) g(tau) dtau.

    The weights integrate the singular factor exactly against the
    piecewise-linear interpolant of the node values, so the rule is exact on
    constants and linears.  All weights are nonnegative.
    """

    order: float
    nodes: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        nodes = np.asarray(self.nodes, dtype=float)
        weights = np.asarray(self.weights, dtype=float)
        if nodes.shape != weights.shape or nodes.ndim != 1:
            raise ValueError("nodes and weights must be 1-D arrays of equal length")
        nodes.setflags(write=False)
        weights.setflags(write=False)
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "weights", weights)

    def apply(self, samples):
        """Contract the weights with samples taken at the rule's nodes.

        ``samples`` may carry extra trailing axes (e.g. one column per state
        dimension); the contraction is over the leading axis.
        """
        samples = np.asarray(samples)
        if samples.shape[0] != self.weights.size:
            raise ValueError(
                f"expected {self.weights.size} samples along axis 0, got {samples.shape[0]}"
            )
        return np.tensordot(self.weights, samples, axes=(0, 0))


@dataclass(frozen=True)
class MLParams:
    """Evaluation controls for the Mittag-Leffler function."""

    series_radius: float = 10.0
    max_terms: int = 2000
    tol: float = 1e-14

    def __post_init__(self):
        if not (np.isfinite(self.series_radius) and self.series_radius > 0):
            raise ValueError("series_radius must be positive and finite")
        if self.max_terms < 50:
            raise ValueError("max_terms must be at least 50")
        if not (0 < self.tol <= 1e-6):
            raise ValueError("tol must lie in (0, 1e-6]")


def _check_order(q, upper, name="q"):
    if not (np.isfinite(q) and 0 < q <= upper):
        raise ValueError(f"{name} must lie in (0, {upper}], got {q}")


def _product_weights(q, dt, n_nodes, t):
    """Product-integration weights on the grid j*dt for upper limit ``t``.

    Returns w of length n_nodes with
    w @ samples = (1/Gamma(q)) * int_0^t (t-tau)^(q-1) pl(tau) dtau,
    pl being the piecewise-linear interpolant of the samples.  ``t`` may fall
    strictly inside a grid cell; nodes beyond ``t`` get zero weight.
    """
    w = np.zeros(n_nodes)
    if t <= 0:
        return w
    # index of the last grid cell whose left node lies strictly below t,
    # with a fuzz guard so an on-grid t does not open an empty extra cell
    n_cells = min(int(np.ceil(t / dt - 1e-12)), n_nodes - 1)
    j = np.arange(n_cells)
    left = j * dt
    right = (j + 1) * dt
    upper = np.minimum(right, t)
    u1 = t - left
    u0 = t - upper
    c = t - right
    diff_q = (u1**q - u0**q) / q
    diff_q1 = (u1 ** (q + 1) - u0 ** (q + 1)) / (q + 1)
    w_left = (diff_q1 - c * diff_q) / dt
    w_right = (u1 * diff_q - diff_q1) / dt
    w[:n_cells] += w_left
    w[1 : n_cells + 1] += w_right
    w *= rgamma(q)
    return w


def build_singular_rule(q, horizon, n_nodes):
    """Build the product-integration rule of order ``q`` on [0, horizon]."""
    _check_order(q, 1.0)
    if not (np.isfinite(horizon) and horizon > 0):
        raise ValueError(f"horizon must be positive, got {horizon}")
    n_nodes = int(n_nodes)
    if n_nodes < 2:
        raise ValueError("a rule needs at least two nodes")
    nodes = np.linspace(0.0, horizon, n_nodes)
    weights = _product_weights(q, horizon / (n_nodes - 1), n_nodes, horizon)
    return SingularQuadRule(order=q, nodes=nodes, weights=weights)


def _locate(signal, t):
    """Offset of ``t`` from the signal start, validated against its range."""
    span = signal.t_end - signal.t0
    fuzz = 1e-12 * max(span, abs(signal.t0), 1.0)
    if not (signal.t0 - fuzz <= t <= signal.t_end + fuzz):
        raise ValueError(
            f"t={t} outside the sampled range [{signal.t0}, {signal.t_end}]"
        )
    return min(max(t - signal.t0, 0.0), span)


def rl_integral(signal, q, t):
    """Riemann-Liouville integral (1/Gamma(q)) int (t-tau)^(q-1) signal(tau) dtau.

    The lower terminal is the signal's start time.  The integrand is the
    piecewise-linear interpolant of the samples; the singular factor is
    integrated in closed form on every grid cell.
    """
    _check_order(q, 1.0)
    offset = _locate(signal, t)
    w = _product_weights(q, signal.dt, signal.n_samples, offset)
    return float(w @ signal.values)


def _fd_derivative(values, dt):
    """Second-order finite differences: central interior, one-sided ends."""
    values = np.asarray(values, dtype=float)
    d = np.empty_like(values)
    d[1:-1] = (values[2:] - values[:-2]) / (2 * dt)
    d[0] = (-3 * values[0] + 4 * values[1] - values[2]) / (2 * dt)
    d[-1] = (3 * values[-1] - 4 * values[-2] + values[-3]) / (2 * dt)
    return d


def caputo_derivative(signal, q, t):
    """Caputo derivative of order q in (0,1): J^(1-q) applied to signal'."""
    if not (np.isfinite(q) and 0 < q < 1):
        raise ValueError(f"q must lie in (0, 1), got {q}")
    if signal.n_samples < 3:
        raise ValueError("Caputo derivative needs at least three samples")
    derivative = SampledSignal(
        t0=signal.t0, dt=signal.dt, values=_fd_derivative(signal.values, signal.dt)
    )
    return rl_integral(derivative, 1.0 - q, t)


def rl_derivative(signal, q, t, step=None):
    """Riemann-Liouville derivative of order q in (0,1): d/dt of J^(1-q).

    The outer time derivative uses central differences with a step finer
    than the sampling grid (one-sided second order at the range ends).
    Intended as a diagnostic oracle, not a high-accuracy primitive.
    """
    if not (np.isfinite(q) and 0 < q < 1):
        raise ValueError(f"q must lie in (0, 1), got {q}")
    if step is None:
        step = signal.dt / 4.0
    integral = lambda s: rl_integral(signal, 1.0 - q, s)
    if t - step < signal.t0:
        return (
            -3 * integral(t) + 4 * integral(t + step) - integral(t + 2 * step)
        ) / (2 * step)
    if t + step > signal.t_end:
        return (
            3 * integral(t) - 4 * integral(t - step) + integral(t - 2 * step)
        ) / (2 * step)
    return (integral(t + step) - integral(t - step)) / (2 * step)


# The largest series term reaches ~exp(s) at s = |z|^(1/q), so roundoff in
# the summation grows like exp(s)*eps while the asymptotic side's optimal
# truncation error shrinks like exp(-s); they cross at s = -ln(eps)/2.
_SERIES_CANCEL_GUARD = 18.4


def _ml_series(q, z, params):
    """Taylor series of E_q, vectorized with per-element convergence."""
    z = np.atleast_1d(z)
    total = np.ones_like(z)
    comp = np.zeros_like(z)  # Kahan compensation
    term = np.ones_like(z)
    active = np.abs(z) > 0
    m = 0
    while active.any():
        if m >= params.max_terms:
            raise AccuracyError(
                f"Mittag-Leffler series did not converge within {params.max_terms} terms",
                partial=total,
            )
        ratio = np.exp(gammaln(q * m + 1.0) - gammaln(q * (m + 1) + 1.0))
        term = term * z * ratio
        y = term - comp
        t_new = total + y
        comp = np.where(active, (t_new - total) - y, comp)
        total = np.where(active, t_new, total)
        active &= np.abs(term) >= params.tol * np.abs(total)
        m += 1
    return total


def _ml_asymptotic(q, z, params):
    """Large-|z| expansion: algebraic tail -sum_k z^(-k)/Gamma(1-qk) truncated
    at its smallest term, plus the exponential exp(z^(1/q))/q of the principal
    branch.  The exponential dominates for |arg z| <= q*pi/2 and is an
    exponentially small (but not negligible) correction out to |arg z| = q*pi,
    beyond which the principal branch no longer contributes."""
    tail = 0.0 + 0.0j
    term_prev = np.inf
    zinv = 1.0 / z
    power = 1.0 + 0.0j
    for k in range(1, 1 + max(50, int(params.max_terms))):
        power = power * zinv
        term = power * rgamma(1.0 - q * k)
        mag = abs(term)
        if mag == 0.0:  # reciprocal-gamma pole; not a convergence signal
            continue
        if mag >= term_prev:
            break
        tail += term
        term_prev = mag
        if mag < params.tol * max(abs(tail), 1e-300):
            break
    result = -tail
    if abs(np.angle(z)) <= q * np.pi + 1e-15:
        with np.errstate(over="ignore", invalid="ignore"):
            result = result + np.exp(z ** (1.0 / q)) / q
    return result


def mittag_leffler(q, z, params=None):
    """Mittag-Leffler function E_q(z) = sum_m z^m / Gamma(q*m + 1).

    Accepts scalar or array ``z`` (real or complex) and returns a matching
    complex result.  Inside ``params.series_radius`` the Taylor series is
    summed with compensated accumulation; outside, the standard asymptotic
    expansion is used: the algebraic tail plus, while the principal branch of
    z^(1/q) contributes (|arg z| <= q*pi), the exponential exp(z^(1/q))/q,
    which dominates inside |arg z| <= q*pi/2.  The handoff between the two
    regimes is capped so series cancellation never exceeds what the
    asymptotic side delivers; accuracy in the crossover ring bottoms out
    around 1e-8.
    """
    _check_order(q, 2.0)
    if params is None:
        params = MLParams()
    z_arr = np.asarray(z, dtype=complex)
    scalar = z_arr.ndim == 0
    flat = np.atleast_1d(z_arr).ravel()
    out = np.empty(flat.shape, dtype=complex)
    # The radius test honors whichever of |z| and the exponential-equivalent
    # scale |z|^(1/q) is friendlier (for q > 1 the series stays benign far
    # beyond the nominal radius), capped where series cancellation would
    # exceed what the asymptotic side already delivers.
    mags = np.abs(flat)
    exp_scale = mags ** (1.0 / q)
    near = (mags <= params.series_radius) | (exp_scale <= params.series_radius)
    near &= exp_scale <= _SERIES_CANCEL_GUARD
    if near.any():
        out[near] = _ml_series(q, flat[near], params)
    for idx in np.nonzero(~near)[0]:
        out[idx] = _ml_asymptotic(q, flat[idx], params)
    if scalar:
        return complex(out[0])
    return out.reshape(z_arr.shape)
