"""Smooth compactly-supported profile fields (bumps) used as multipliers,
test-sequence envelopes and localization windows."""

from __future__ import annotations

import numpy as np

from .errors import ValidationError
from .grid import Grid, SampledField


def bump_values(points: np.ndarray, center, width: float, amplitude: float = 1.0)\
        -> np.ndarray:
    """The standard bump amplitude * exp(1 - 1/(1 - |x-c|^2/w^2)) inside the
    ball |x - c| < w, zero outside; peak value = amplitude."""
    c = np.asarray(center, dtype=np.float64)
    rho2 = np.sum(((points - c) / width) ** 2, axis=-1)
    out = np.zeros(points.shape[:-1])
    inside = rho2 < 1.0
    out[inside] = amplitude * np.exp(1.0 - 1.0 / (1.0 - rho2[inside]))
    return out


def bump_field(
    grid: Grid,
    center=None,
    width: float | None = None,
    amplitude: float = 1.0,
    margin: float | None = None,
) -> SampledField:
    """Sample a bump on the grid.

    The support ball must sit inside the box with the requested margin
    (default L/4), which keeps torus wraparound out of the experiments.
    """
    if center is None:
        center = (0.0,) * grid.d
    if width is None:
        width = grid.L / 2.0
    if len(center) != grid.d:
        raise ValidationError(f"bump center needs {grid.d} coordinates")
    if not (width > 0):
        raise ValidationError("bump width must be positive")
    if margin is None:
        margin = grid.L / 4.0
    reach = max(abs(c) for c in center) + width
    if reach > grid.L - margin + 1e-12:
        raise ValidationError(
            f"bump support (reach {reach:g}) leaves the box margin "
            f"{grid.L - margin:g}"
        )
    vals = bump_values(grid.spatial_points(), center, width, amplitude)
    return SampledField(grid, "spatial", vals)


def lipschitz_bound(b: SampledField) -> float:
    """Numerical Lipschitz constant: max |centered difference gradient|."""
    g = b.grid
    acc = np.zeros(g.shape)
    for ax in range(g.d):
        diff = (np.roll(b.values, -1, axis=ax) - np.roll(b.values, 1, axis=ax)) / (
            2.0 * g.dx
        )
        acc += np.abs(diff) ** 2
    return float(np.sqrt(acc).max())
