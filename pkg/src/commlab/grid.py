"""Periodic-box discretization with a continuum-normalized Fourier transform.

The box [-L, L)^d is sampled on N points per axis (x_m = -L + m*dx,
dx = 2L/N); the dual lattice is xi_k = k*dxi with k in [-N/2, N/2) and
dxi = 1/(2L), so dx*dxi*N = 1 per axis.  The transform convention is

    F(u)(xi) = integral u(x) exp(-2*pi*i x.xi) dx,

discretized with the midpoint rule, which makes the discrete transform
exact on lattice exponentials and keeps Plancherel free of normalization
constants.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass

import numpy as np

from .errors import ValidationError

SPATIAL = "spatial"
FREQUENCY = "frequency"


@dataclass(frozen=True)
class Grid:
    """Matched spatial/frequency lattices for the periodic box [-L, L)^d."""

    d: int
    N: int
    L: float
    dx: float
    dxi: float

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.N,) * self.d

    @property
    def size(self) -> int:
        return self.N**self.d

    def spatial_axis(self) -> np.ndarray:
        """1-d array of per-axis sample points -L + m*dx."""
        return -self.L + self.dx * np.arange(self.N)

    def frequency_axis(self) -> np.ndarray:
        """1-d array of per-axis frequencies k*dxi, k in [-N/2, N/2)."""
        return self.dxi * np.arange(-self.N // 2, self.N // 2)

    def spatial_points(self) -> np.ndarray:
        """Lattice points, shape (N,)*d + (d,)."""
        return _points(self, SPATIAL)

    def frequency_points(self) -> np.ndarray:
        """Frequency lattice points, shape (N,)*d + (d,)."""
        return _points(self, FREQUENCY)

    def spatial_radius(self) -> np.ndarray:
        """|x| on the spatial lattice (the representative in [-L, L)^d is
        already the minimal one for the torus metric)."""
        return _radius(self, SPATIAL)

    def frequency_radius(self) -> np.ndarray:
        """|xi| on the frequency lattice."""
        return _radius(self, FREQUENCY)


@dataclass(frozen=True)
class SampledField:
    """Complex samples of a function on one side (spatial or frequency) of a
    Grid.  values has shape (N,)*d; C-order ravel gives lexicographic lattice
    order."""

    grid: Grid
    side: str
    values: np.ndarray

    def __post_init__(self):
        if self.side not in (SPATIAL, FREQUENCY):
            raise ValidationError(f"unknown side {self.side!r}")
        v = np.asarray(self.values, dtype=np.complex128)
        if v.shape != self.grid.shape:
            raise ValidationError(
                f"values shape {v.shape} != grid shape {self.grid.shape}"
            )
        object.__setattr__(self, "values", v)


def make_grid(d: int, N: int, L: float) -> Grid:
    """Build a Grid; rejects d outside 1..3, odd or tiny N, nonpositive L."""
    if d not in (1, 2, 3):
        raise ValidationError(f"dimension d={d} not in {{1, 2, 3}}")
    if N % 2 != 0 or N < 8:
        raise ValidationError(f"N={N} must be even and >= 8")
    if not (L > 0):
        raise ValidationError(f"half-width L={L} must be positive")
    return Grid(d=d, N=int(N), L=float(L), dx=2.0 * L / N, dxi=1.0 / (2.0 * L))


@functools.lru_cache(maxsize=64)
def _points(grid: Grid, side: str) -> np.ndarray:
    ax = grid.spatial_axis() if side == SPATIAL else grid.frequency_axis()
    mesh = np.meshgrid(*([ax] * grid.d), indexing="ij")
    pts = np.stack(mesh, axis=-1)
    pts.setflags(write=False)
    return pts

@functools.lru_cache(maxsize=64)
def _radius(grid: Grid, side: str) -> np.ndarray:
    r = np.sqrt(np.sum(_points(grid, side) ** 2, axis=-1))
    r.setflags(write=False)
    return r


@functools.lru_cache(maxsize=64)
def _alternating_phase(grid: Grid) -> np.ndarray:
    """(-1)**(k_1 + ... + k_d) over the shifted index lattice k in [-N/2, N/2).

    This is the phase that converts the index-space FFT into the transform
    anchored at x = -L (and back).
    """
    k = np.arange(-grid.N // 2, grid.N // 2)
    sign1 = 1.0 - 2.0 * (np.abs(k) % 2)
    out = sign1
    for _ in range(grid.d - 1):
        out = np.multiply.outer(out, sign1)
    out = np.ascontiguousarray(out)
    out.setflags(write=False)
    return out


def _require_side(u: SampledField, side: str, op: str) -> None:
    if u.side != side:
        raise ValidationError(f"{op} expects a {side}-side field, got {u.side}")


def forward_ft_array(values: np.ndarray, grid: Grid) -> np.ndarray:
    """Batched forward transform over the trailing d axes."""
    axes = tuple(range(values.ndim - grid.d, values.ndim))
    spec = np.fft.fftshift(np.fft.fftn(values, axes=axes), axes=axes)
    return (grid.dx**grid.d) * _alternating_phase(grid) * spec


def inverse_ft_array(values: np.ndarray, grid: Grid) -> np.ndarray:
    """Batched inverse transform over the trailing d axes."""
    axes = tuple(range(values.ndim - grid.d, values.ndim))
    tmp = np.fft.ifftshift(_alternating_phase(grid) * values, axes=axes)
    scale = (grid.N * grid.dxi) ** grid.d
    return scale * np.fft.ifftn(tmp, axes=axes)


def forward_ft(u: SampledField) -> SampledField:
    """Discrete F(u)(xi_k) = dx^d sum_m u(x_m) exp(-2*pi*i x_m.xi_k)."""
    _require_side(u, SPATIAL, "forward_ft")
    return SampledField(u.grid, FREQUENCY, forward_ft_array(u.values, u.grid))


def inverse_ft(v: SampledField) -> SampledField:
    """Discrete u(x_m) = dxi^d sum_k v(xi_k) exp(2*pi*i x_m.xi_k)."""
    _require_side(v, FREQUENCY, "inverse_ft")
    return SampledField(v.grid, SPATIAL, inverse_ft_array(v.values, v.grid))


def _box_mask(grid: Grid, V) -> np.ndarray:
    if isinstance(V, str):
        if V == "all":
            return np.ones(grid.shape, dtype=bool)
        raise ValidationError(f"unknown region {V!r}")
    if len(V) != grid.d:
        raise ValidationError(f"region has {len(V)} axes, grid has {grid.d}")
    pts = grid.spatial_points()
    mask = np.ones(grid.shape, dtype=bool)
    for i, (lo, hi) in enumerate(V):
        if lo < -grid.L - 1e-12 or hi > grid.L + 1e-12:
            raise ValidationError(f"region axis {i} [{lo}, {hi}) leaves the box")
        mask &= (pts[..., i] >= lo) & (pts[..., i] < hi)
    return mask


def lp_norm(u: SampledField, p: float, V="all") -> float:
    """Midpoint-rule L^p(V) norm; V is a half-open axis-aligned box or 'all'.

    p = inf returns the max of |u| over lattice points in V.
    """
    _require_side(u, SPATIAL, "lp_norm")
    if p != np.inf and p < 1:
        raise ValidationError(f"exponent p={p} must be >= 1 or inf")
    mask = _box_mask(u.grid, V)
    if not mask.any():
        raise ValidationError("region contains no lattice points")
    absu = np.abs(u.values[mask])
    if p == np.inf:
        return float(absu.max())
    vol = u.grid.dx**u.grid.d
    return float((vol * np.sum(absu**p)) ** (1.0 / p))


def pointwise_mul(u: SampledField, w: SampledField) -> SampledField:
    """Elementwise product of two fields on the same grid and side."""
    if u.grid != w.grid:
        raise ValidationError("pointwise_mul: fields live on different grids")
    if u.side != w.side:
        raise ValidationError("pointwise_mul: fields live on different sides")
    return SampledField(u.grid, u.side, u.values * w.values)
