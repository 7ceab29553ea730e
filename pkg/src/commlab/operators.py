"""Multiplier, multiplication and commutator operators on a periodic grid.

Operators act on spatial fields.  A multiplier acts diagonally on the
frequency side; a multiplication operator acts diagonally on the spatial
side; the commutator is their bracket.  Convolution-kernel variants (the
compact part of a symbol, dyadic kernels and their partial sums, and the
off-diagonal truncated kernel operator) realize convolutions through the
grid's transforms, so the convolution theorem holds exactly at the discrete
level.  Dense materialization and singular spectra provide the compactness
diagnostics.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .errors import NumericalError, ValidationError
from .grid import (
    FREQUENCY,
    SPATIAL,
    Grid,
    SampledField,
    forward_ft_array,
    inverse_ft_array,
)
from .symbols import CutoffChi, LPPartition, SymbolSpec, dyadic_piece, sphere_form

MATERIALIZE_MAX_SIDE = 4096


@dataclass(frozen=True)
class KernelField:
    """Spatial samples of a convolution kernel."""

    grid: Grid
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.complex128)
        if v.shape != self.grid.shape:
            raise ValidationError("kernel shape does not match grid")
        if not np.all(np.isfinite(v)):
            raise ValidationError("kernel has non-finite samples")
        object.__setattr__(self, "values", v)


@dataclass(frozen=True)
class SingularSpectrum:
    """Nonincreasing singular values of a materialized operator."""

    values: np.ndarray
    d: int
    N: int
    L: float
    descriptor: str = ""

    def tail_energy(self, K: int) -> float:
        """sum_{k > K} sigma_k^2 / sum_k sigma_k^2 (K counted 1-based)."""
        total = float(np.sum(self.values**2))
        if total == 0.0:
            return 0.0
        return float(np.sum(self.values[K:] ** 2) / total)


@dataclass(frozen=True)
class OperatorHandle:
    """One of the five operator kinds, with its defining data."""

    kind: str
    grid: Grid
    a: Optional[SymbolSpec] = None
    sphere: bool = False
    b: Optional[SampledField] = None
    kernel: Optional[KernelField] = None
    s: Optional[float] = None

    def apply(self, u: SampledField) -> SampledField:
        return apply_operator(self, u)


def multiplier_values(a: SymbolSpec, sphere: bool, grid: Grid) -> np.ndarray:
    """Symbol samples on the frequency lattice (sphere form applies
    a(xi/|xi|), with the origin mapped to the symbol's own value at 0)."""
    if a.d != grid.d:
        raise ValidationError(f"symbol dimension {a.d} != grid dimension {grid.d}")
    sym = sphere_form(a) if sphere else a
    return np.asarray(sym.eval(grid.frequency_points()), dtype=np.complex128)


def _freq_multiply(m: np.ndarray, arr: np.ndarray, grid: Grid) -> np.ndarray:
    return inverse_ft_array(m * forward_ft_array(arr, grid), grid)


def _require_common_grid(*fields) -> Grid:
    grids = {f.grid for f in fields if f is not None}
    if len(grids) != 1:
        raise ValidationError("operands live on different grids")
    return grids.pop()


# ---------------------------------------------------------------------------
# operator constructors
# ---------------------------------------------------------------------------


def multiplier_op(a: SymbolSpec, sphere: bool, grid: Grid) -> OperatorHandle:
    if a.d != grid.d:
        raise ValidationError("symbol/grid dimension mismatch")
    return OperatorHandle(kind="multiplier", grid=grid, a=a, sphere=sphere)


def multiplication_op(b: SampledField) -> OperatorHandle:
    if b.side != SPATIAL:
        raise ValidationError("multiplication operator needs a spatial field")
    return OperatorHandle(kind="multiplication", grid=b.grid, b=b)


def commutator_op(a: SymbolSpec, sphere: bool, b: SampledField) -> OperatorHandle:
    if b.side != SPATIAL:
        raise ValidationError("commutator needs a spatial multiplier field b")
    if a.d != b.grid.d:
        raise ValidationError("symbol/grid dimension mismatch")
    return OperatorHandle(kind="commutator", grid=b.grid, a=a, sphere=sphere, b=b)


def truncated_commutator_op(kernel: KernelField, b: SampledField) -> OperatorHandle:
    g = _require_common_grid(kernel, b)
    return OperatorHandle(kind="truncated_commutator", grid=g, b=b, kernel=kernel)


def truncated_kernel_op(
    kernel: KernelField, b: SampledField, s: float
) -> OperatorHandle:
    g = _require_common_grid(kernel, b)
    if not (s > 0):
        raise ValidationError(f"truncation radius s={s} must be positive")
    return OperatorHandle(
        kind="truncated_kernel", grid=g, b=b, kernel=kernel, s=float(s)
    )


# ---------------------------------------------------------------------------
# application (batched over leading axes)
# ---------------------------------------------------------------------------


def _truncated_kernel_values(op: OperatorHandle) -> np.ndarray:
    mask = op.grid.spatial_radius() > op.s
    return op.kernel.values * mask


def _apply_batch(op: OperatorHandle, arr: np.ndarray, adjoint: bool) -> np.ndarray:
    g = op.grid
    if op.kind == "multiplier":
        m = multiplier_values(op.a, op.sphere, g)
        return _freq_multiply(np.conj(m) if adjoint else m, arr, g)
    if op.kind == "multiplication":
        b = np.conj(op.b.values) if adjoint else op.b.values
        return b * arr
    if op.kind == "commutator":
        m = multiplier_values(op.a, op.sphere, g)
        b = op.b.values
        if adjoint:
            m, b = np.conj(m), np.conj(b)
        return _freq_multiply(m, b * arr, g) - b * _freq_multiply(m, arr, g)
    if op.kind == "truncated_commutator":
        m = forward_ft_array(op.kernel.values, g)
        b = op.b.values
        if adjoint:
            m, b = np.conj(m), np.conj(b)
        return _freq_multiply(m, b * arr, g) - b * _freq_multiply(m, arr, g)
    if op.kind == "truncated_kernel":
        m = forward_ft_array(_truncated_kernel_values(op), g)
        b = op.b.values
        if adjoint:
            m, b = np.conj(m), np.conj(b)
            return _freq_multiply(m, b * arr, g) - b * _freq_multiply(m, arr, g)
        return b * _freq_multiply(m, arr, g) - _freq_multiply(m, b * arr, g)
    raise ValidationError(f"unknown operator kind {op.kind!r}")


def apply_operator(op: OperatorHandle, u: SampledField) -> SampledField:
    if u.grid != op.grid:
        raise ValidationError("field grid does not match operator grid")
    if u.side != SPATIAL:
        raise ValidationError("operators act on spatial fields")
    return SampledField(op.grid, SPATIAL, _apply_batch(op, u.values, adjoint=False))


def apply_operator_adjoint(op: OperatorHandle, u: SampledField) -> SampledField:
    if u.grid != op.grid or u.side != SPATIAL:
        raise ValidationError("adjoint operand mismatch")
    return SampledField(op.grid, SPATIAL, _apply_batch(op, u.values, adjoint=True))


def apply_multiplier(a: SymbolSpec, sphere: bool, u: SampledField) -> SampledField:
    """inverse_ft(symbol samples * forward_ft(u))."""
    return apply_operator(multiplier_op(a, sphere, u.grid), u)


def apply_commutator(
    a: SymbolSpec, sphere: bool, b: SampledField, u: SampledField
) -> SampledField:
    """A(b u) - b A(u) for the multiplier A given by (a, sphere)."""
    _require_common_grid(b, u)
    return apply_operator(commutator_op(a, sphere, b), u)


def convolve(k: KernelField, u: SampledField) -> SampledField:
    """Cyclic convolution dx^d sum_y k(x - y) u(y) via the frequency side."""
    g = _require_common_grid(k, u)
    if u.side != SPATIAL:
        raise ValidationError("convolve acts on spatial fields")
    m = forward_ft_array(k.values, g)
    return SampledField(g, SPATIAL, _freq_multiply(m, u.values, g))


# ---------------------------------------------------------------------------
# kernels
# ---------------------------------------------------------------------------


def compact_part_kernel(a: SymbolSpec, chi: CutoffChi, grid: Grid) -> KernelField:
    """Spatial kernel of the compactly-supported symbol part a * chi
    (inverse transform of the cutoff symbol)."""
    if a.d != grid.d:
        raise ValidationError("symbol/grid dimension mismatch")
    reach = (grid.N / 2) * grid.dxi
    if reach < 3.0:
        raise ValidationError(
            f"frequency lattice reaches only |xi|={reach:g} < 3; "
            f"increase N (N={grid.N}) or shrink L (L={grid.L:g})"
        )
    pts = grid.frequency_points()
    sym = np.asarray(a.eval(pts), dtype=np.complex128) * chi.eval(pts)
    return KernelField(grid, inverse_ft_array(sym, grid))


def dyadic_kernel(a_j: SymbolSpec, grid: Grid) -> KernelField:
    """Spatial samples of the inverse transform of one dyadic piece."""
    if a_j.d != grid.d:
        raise ValidationError("symbol/grid dimension mismatch")
    reach = (grid.N / 2) * grid.dxi
    if a_j.support_radius is not None and a_j.support_radius > reach:
        raise ValidationError(
            f"dyadic annulus radius {a_j.support_radius:g} exceeds the lattice "
            f"reach {reach:g}; increase N (N={grid.N}) or shrink L (L={grid.L:g})"
        )
    sym = np.asarray(a_j.eval(grid.frequency_points()), dtype=np.complex128)
    return KernelField(grid, inverse_ft_array(sym, grid))


def partial_kernel_sum(
    a: SymbolSpec, chi: CutoffChi, part: LPPartition, grid: Grid, n: int
) -> KernelField:
    """Sum of the dyadic kernels for j = 0..n."""
    if n < 0:
        raise ValidationError("partial sum needs n >= 0")
    total = np.zeros(grid.shape, dtype=np.complex128)
    for j in range(n + 1):
        total += dyadic_kernel(dyadic_piece(a, chi, part, j), grid).values
    return KernelField(grid, total)


def kernel_tail_mass(k: KernelField, s: float) -> float:
    """Quadrature of |k| over {|x| > s} (torus distance)."""
    if not (0 < s < k.grid.L):
        raise ValidationError(f"tail radius s={s} must lie in (0, L={k.grid.L:g})")
    mask = k.grid.spatial_radius() > s
    return float(k.grid.dx**k.grid.d * np.sum(np.abs(k.values[mask])))


def small_ball_moment(k: KernelField, s: float) -> float:
    """Quadrature of |x| |k(x)| over {|x| < s}."""
    if not (0 < s <= k.grid.L):
        raise ValidationError(f"ball radius s={s} must lie in (0, L={k.grid.L:g}]")
    r = k.grid.spatial_radius()
    mask = r < s
    return float(k.grid.dx**k.grid.d * np.sum(r[mask] * np.abs(k.values[mask])))


def truncated_kernel_apply(
    k: KernelField, b: SampledField, s: float, u: SampledField
) -> SampledField:
    """u -> dx^d sum_{|x-y|>s} k(x-y) (b(x)-b(y)) u(y) with cyclic distance."""
    _require_common_grid(k, b, u)
    return apply_operator(truncated_kernel_op(k, b, s), u)


# ---------------------------------------------------------------------------
# spectra
# ---------------------------------------------------------------------------


def materialize(op: OperatorHandle, chunk: int = 256) -> np.ndarray:
    """Dense matrix M with M @ vec(u) = vec(op(u)); guarded to side <= 4096."""
    n = op.grid.size
    if n > MATERIALIZE_MAX_SIDE:
        raise ValidationError(
            f"materialization guard: N^d = {n} > {MATERIALIZE_MAX_SIDE}"
        )
    M = np.empty((n, n), dtype=np.complex128)
    for lo in range(0, n, chunk):
        hi = min(lo + chunk, n)
        basis = np.zeros((hi - lo, n), dtype=np.complex128)
        basis[np.arange(hi - lo), np.arange(lo, hi)] = 1.0
        out = _apply_batch(op, basis.reshape(-1, *op.grid.shape), adjoint=False)
        M[:, lo:hi] = out.reshape(hi - lo, n).T
    return M


def singular_values(M: np.ndarray, descriptor: str = "", grid: Grid | None = None)\
        -> SingularSpectrum:
    """Full singular value list, nonincreasing."""
    M = np.asarray(M)
    if not np.all(np.isfinite(M)):
        raise ValidationError("matrix has non-finite entries")
    try:
        vals = np.linalg.svd(M, compute_uv=False)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"SVD failed: {exc}") from exc
    if grid is not None:
        d, N, L = grid.d, grid.N, grid.L
    else:
        d, N, L = 0, M.shape[0], 0.0
    return SingularSpectrum(values=vals, d=d, N=N, L=L, descriptor=descriptor)


def operator_norm_l2(
    op: OperatorHandle,
    iterations: int = 200,
    seed: int = 0,
    rtol: float = 1e-9,
) -> float:
    """Discrete L2 -> L2 operator norm by power iteration on op* op.

    Returns a lower-bound estimate of the top singular value; raises
    NumericalError if the estimate is still drifting at the iteration cap.
    """
    if iterations < 20:
        raise ValidationError("power iteration needs at least 20 iterations")
    g = op.grid
    rng = np.random.default_rng(seed)
    v = rng.standard_normal(g.shape) + 1j * rng.standard_normal(g.shape)
    v /= np.linalg.norm(v.ravel())
    sigma_prev = 0.0
    drift = np.inf
    for _ in range(iterations):
        w = _apply_batch(op, v, adjoint=False)
        sigma = float(np.linalg.norm(w.ravel()))
        if sigma == 0.0:
            return 0.0
        z = _apply_batch(op, w, adjoint=True)
        nz = np.linalg.norm(z.ravel())
        if nz == 0.0:
            return sigma
        v = z / nz
        drift = abs(sigma - sigma_prev) / max(sigma, 1e-300)
        if drift <= rtol:
            return sigma
        sigma_prev = sigma
    if drift > 1e-6:
        raise NumericalError(
            f"operator norm power iteration did not settle in {iterations} "
            f"iterations (relative drift {drift:.2e})"
        )
    return sigma_prev
