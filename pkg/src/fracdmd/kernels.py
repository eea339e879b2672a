"""Base RKHS kernels and their evaluation on batches of states."""

from dataclasses import dataclass

import numpy as np

__all__ = ["KernelSpec", "kernel_eval", "kernel_cross_matrix"]

_FAMILIES = ("gaussian", "expdot")


@dataclass(frozen=True)
class KernelSpec:
    """Kernel family plus scale.

    gaussian:  K(x, y) = exp(-||x - y||^2 / mu)
    expdot:    K(x, y) = exp(x . y / mu)
    """

    family: str = "gaussian"
    mu: float = 1.0

    def __post_init__(self):
        family = str(self.family).lower()
        if family not in _FAMILIES:
            raise ValueError(f"unknown kernel family {self.family!r}; choose from {_FAMILIES}")
        if not (np.isfinite(self.mu) and self.mu > 0):
            raise ValueError(f"mu must be positive and finite, got {self.mu}")
        object.__setattr__(self, "family", family)
        object.__setattr__(self, "mu", float(self.mu))

    def to_string(self):
        """Compact form used by the CLI and config files, e.g. ``gaussian:mu=1.0``."""
        return f"{self.family}:mu={self.mu!r}"

    @classmethod
    def from_string(cls, text):
        """Parse ``family:mu=<value>`` (a bare family name defaults mu to 1)."""
        parts = str(text).strip().split(":")
        family = parts[0]
        mu = 1.0
        for part in parts[1:]:
            key, _, value = part.partition("=")
            if key.strip() != "mu" or not value:
                raise ValueError(f"cannot parse kernel spec {text!r}")
            try:
                mu = float(value)
            except ValueError as exc:
                raise ValueError(f"cannot parse kernel spec {text!r}") from exc
        return cls(family=family, mu=mu)


def as_kernel_spec(spec):
    """Accept a KernelSpec or its string form."""
    if isinstance(spec, KernelSpec):
        return spec
    if isinstance(spec, str):
        return KernelSpec.from_string(spec)
    raise TypeError(f"expected KernelSpec or string, got {type(spec).__name__}")


def _as_points(points, name):
    arr = np.asarray(points, dtype=float)
    if arr.ndim == 1:
        arr = arr[None, :]
    if arr.ndim != 2:
        raise ValueError(f"{name} must be a vector or a batch of vectors")
    return arr


def kernel_cross_matrix(spec, a_points, b_points):
    """Matrix of kernel values, entry (i, j) = K(a_points[i], b_points[j])."""
    spec = as_kernel_spec(spec)
    a = _as_points(a_points, "a_points")
    b = _as_points(b_points, "b_points")
    if a.shape[1] != b.shape[1]:
        raise ValueError(
            f"dimension mismatch: {a.shape[1]} vs {b.shape[1]}"
        )
    if spec.family == "gaussian":
        # broadcast difference keeps the matrix exactly symmetric when a is b
        sq = np.sum((a[:, None, :] - b[None, :, :]) ** 2, axis=-1)
        return np.exp(-sq / spec.mu)
    return np.exp(a @ b.T / spec.mu)


def kernel_eval(spec, x, y):
    """Kernel value K(x, y) for single states."""
    x = np.asarray(x, dtype=float).ravel()
    y = np.asarray(y, dtype=float).ravel()
    return float(kernel_cross_matrix(spec, x[None, :], y[None, :])[0, 0])
