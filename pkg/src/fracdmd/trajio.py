"""CSV trajectory files: header ``t,x1,...,xn``, uniform time grid.

Floats are written with 17 significant digits, which is enough for every
binary64 value to survive a write/read round trip bit-exactly.
"""

import csv

import numpy as np

from .okhs import Trajectory

__all__ = ["read_trajectory_csv", "write_trajectory_csv"]

_REL_UNIFORMITY = 1e-9


def write_trajectory_csv(path, trajectory, t0=0.0):
    """Write one trajectory; the time column starts at ``t0``."""
    traj = trajectory
    with open(path, "w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(["t"] + [f"x{j + 1}" for j in range(traj.dim)])
        for k in range(traj.n_samples):
            t = t0 + k * traj.dt
            writer.writerow([f"{t:.17g}"] + [f"{v:.17g}" for v in traj.states[k]])


def read_trajectory_csv(path):
    """Parse a trajectory file, validating the grid and the values.

    The time column must be strictly increasing and uniform to within 1e-9
    relative; NaN or infinite entries are rejected.  The offset of the time
    column is discarded: trajectories always run on [0, T] internally.
    """
    with open(path, "r", encoding="utf-8", newline="") as handle:
        reader = csv.reader(handle)
        try:
            header = next(reader)
        except StopIteration:
            raise ValueError(f"{path}: empty file") from None
        if not header or header[0].strip() != "t" or len(header) < 2:
            raise ValueError(f"{path}: expected header 't,x1,...,xn'")
        rows = []
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(header):
                raise ValueError(f"{path}:{lineno}: expected {len(header)} columns")
            try:
                rows.append([float(v) for v in row])
            except ValueError:
                raise ValueError(f"{path}:{lineno}: non-numeric value") from None
    if len(rows) < 2:
        raise ValueError(f"{path}: need at least two samples")
    data = np.asarray(rows)
    if not np.isfinite(data).all():
        raise ValueError(f"{path}: NaN or infinite values are not allowed")
    t = data[:, 0]
    steps = np.diff(t)
    if (steps <= 0).any():
        raise ValueError(f"{path}: time column must be strictly increasing")
    dt = (t[-1] - t[0]) / (len(t) - 1)
    if np.abs(steps - dt).max() > _REL_UNIFORMITY * dt:
        raise ValueError(f"{path}: time grid is not uniform (tolerance 1e-9 relative)")
    return Trajectory(dt=dt, states=data[:, 1:])
