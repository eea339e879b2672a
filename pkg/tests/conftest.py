import numpy as np
import pytest

from fracdmd import FodeProblem, Trajectory, solve


def smooth_trajectory_2d(rng, n_samples=200, horizon=1.0):
    """Random gentle 2-D trajectory with well-separated endpoints.

    Built from a closed-form expression so adaptive-quadrature oracles can
    evaluate the underlying curve exactly; returns (trajectory, callable).
    """
    a = rng.uniform(-1.0, 1.0, size=2)
    slope = rng.uniform(0.4, 0.9, size=2) * rng.choice([-1.0, 1.0], size=2)
    amp = rng.uniform(-0.15, 0.15, size=2)
    phase = rng.uniform(0.0, 2 * np.pi, size=2)

    def curve(t):
        t = np.asarray(t, dtype=float)
        return np.stack(
            [a[j] + slope[j] * t + amp[j] * np.sin(np.pi * t + phase[j]) for j in range(2)],
            axis=-1,
        )

    t = np.linspace(0.0, horizon, n_samples)
    return Trajectory(dt=t[1] - t[0], states=curve(t)), curve


@pytest.fixture(scope="session")
def linear_fractional_dataset():
    """Eight trajectories of the Caputo system D^0.5 x = -x used throughout."""
    problems = [
        FodeProblem(order=0.5, field_name="linear1d", params={"lam": -1.0},
                    x0=[x0], horizon=2.0, dt=2e-3)
        for x0 in np.linspace(0.5, 2.0, 8)
    ]
    return [solve(p) for p in problems]
