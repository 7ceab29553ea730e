"""Dyadic-annulus derivative bounds for multiplier symbols.

The central quantity is the annulus integral of |D^alpha a|^2 over
{r/2 <= |xi| <= r}, compared against r^(d - 2 n(alpha)).  The supremum of
sqrt(integral) / r^((d - 2 n(alpha))/2) over derivative orders up to kappa
and dyadic radii is the symbol's estimated multiplier constant; the scaling
table checks that the localized dyadic pieces inherit the same growth law.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NumericalError, ValidationError
from .symbols import (
    CutoffChi,
    LPPartition,
    MultiIndex,
    SymbolSpec,
    dyadic_piece,
    multi_indices,
    order,
    symbol_derivative,
)


@dataclass(frozen=True)
class MikhlinEntry:
    alpha: MultiIndex
    j: int
    r: float
    integral: float
    ratio: float


@dataclass(frozen=True)
class MikhlinReport:
    kappa: int
    entries: tuple[MikhlinEntry, ...]
    k_hat: float


@dataclass(frozen=True)
class ScalingEntry:
    j: int
    alpha: MultiIndex
    lhs: float
    bound_ratio: float


@dataclass(frozen=True)
class ScalingTable:
    kappa: int
    entries: tuple[ScalingEntry, ...]

    def sup_ratio(self, alpha: MultiIndex | None = None) -> float:
        vals = [e.bound_ratio for e in self.entries if alpha in (None, e.alpha)]
        if not vals:
            raise ValidationError(f"no scaling entries for alpha={alpha}")
        return max(vals)

    def ratios(self, alpha: MultiIndex) -> list[float]:
        return [e.bound_ratio for e in self.entries if e.alpha == alpha]


def _midpoint_lattice(d: int, radius: float, resolution: int) -> tuple[np.ndarray, float]:
    """Cell centers of a uniform lattice on [-radius, radius]^d and the cell
    volume."""
    h = 2.0 * radius / resolution
    ax = -radius + h * (np.arange(resolution) + 0.5)
    mesh = np.meshgrid(*([ax] * d), indexing="ij")
    pts = np.stack(mesh, axis=-1).reshape(-1, d)
    return pts, h**d


def annulus_integral(
    a: SymbolSpec, alpha: MultiIndex, r: float, resolution: int = 256
) -> float:
    """Midpoint-rule integral of |D^alpha a|^2 over {r/2 <= |xi| <= r}."""
    if not (r > 0):
        raise ValidationError(f"annulus radius r={r} must be positive")
    if resolution < 32:
        raise ValidationError("resolution must be >= 32")
    pts, vol = _midpoint_lattice(a.d, r, resolution)
    rho = np.sqrt(np.sum(pts * pts, axis=-1))
    inside = (rho >= r / 2.0) & (rho <= r)
    if not inside.any():
        raise NumericalError(
            f"no cell centers fall in the annulus r/2..r at r={r:g}, "
            f"resolution={resolution}"
        )
    deriv = symbol_derivative(a, pts[inside], alpha)
    return float(vol * np.sum(np.abs(deriv) ** 2))


def mikhlin_constant(
    a: SymbolSpec,
    kappa: int | None = None,
    j_range: tuple[int, int] = (-4, 8),
    resolution: int = 256,
) -> MikhlinReport:
    """Enumerate (alpha, j) pairs and report the worst dyadic ratio.

    ratio(alpha, j) = sqrt(integral / r^(d - 2 n(alpha))) at r = 2^j; the
    symbol satisfies the multiplier condition when the maximum is finite and
    stable under extension of the probed ranges.
    """
    if kappa is None:
        kappa = a.d // 2 + 1
    if kappa > a.kappa_max:
        raise ValidationError(
            f"kappa={kappa} exceeds symbol smoothness cap {a.kappa_max}"
        )
    j_lo, j_hi = j_range
    entries = []
    for alpha in multi_indices(a.d, kappa):
        for j in range(j_lo, j_hi + 1):
            r = 2.0**j
            try:
                integral = annulus_integral(a, alpha, r, resolution)
            except NumericalError as exc:
                raise NumericalError(f"alpha={alpha}, j={j}: {exc}") from exc
            ratio = float(np.sqrt(integral / r ** (a.d - 2 * order(alpha))))
            entries.append(MikhlinEntry(alpha, j, r, integral, ratio))
    k_hat = max(e.ratio for e in entries)
    return MikhlinReport(kappa=kappa, entries=tuple(entries), k_hat=k_hat)


def dyadic_scaling_check(
    a: SymbolSpec,
    chi: CutoffChi,
    part: LPPartition,
    j_range: tuple[int, int] = (0, 6),
    kappa: int | None = None,
    resolution: int = 256,
) -> ScalingTable:
    """Integrals of |D^alpha a_j|^2 against the dyadic growth law.

    lhs(j, alpha) integrates over the support annulus of the piece;
    bound_ratio = lhs / 2^(j (d - 2 n(alpha))) should stay bounded in j for
    symbols with a finite multiplier constant.
    """
    if kappa is None:
        kappa = a.d // 2 + 1
    if kappa > a.kappa_max:
        raise ValidationError(
            f"kappa={kappa} exceeds symbol smoothness cap {a.kappa_max}"
        )
    j_lo, j_hi = j_range
    if j_lo < 0:
        raise ValidationError("dyadic pieces need j >= 0")
    entries = []
    alphas = multi_indices(a.d, kappa)
    for j in range(j_lo, j_hi + 1):
        piece = dyadic_piece(a, chi, part, j)
        R = 2.0 ** (j + 1)
        pts, vol = _midpoint_lattice(a.d, R, resolution)
        rho = np.sqrt(np.sum(pts * pts, axis=-1))
        # the piece vanishes identically off its annulus, so restrict to a
        # stencil-width margin around it; elsewhere the derivative is 0
        margin = 3.0 * np.maximum(R, 1.0) * 1e-3
        live = (rho >= 2.0 ** (j - 1) - margin) & (rho <= R + margin)
        if not live.any():
            raise NumericalError(f"no cell centers near the annulus at j={j}")
        live_pts = pts[live]
        for alpha in alphas:
            deriv = symbol_derivative(piece, live_pts, alpha)
            lhs = float(vol * np.sum(np.abs(deriv) ** 2))
            ratio = lhs / 2.0 ** (j * (a.d - 2 * order(alpha)))
            entries.append(ScalingEntry(j=j, alpha=alpha, lhs=lhs, bound_ratio=ratio))
    return ScalingTable(kappa=kappa, entries=tuple(entries))
