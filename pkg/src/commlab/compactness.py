"""Weak-null test sequences and the two compactness diagnostics.

A commutator with a continuous coefficient against a multiplier symbol sends
weakly-null bounded sequences to strongly-null ones; the numerical signature
is (a) the decay of commutator outputs along modulated/concentrating/
translating sequences and (b) rapidly decaying singular values that stay
stable under grid refinement, in contrast with the plain multiplier.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .errors import ValidationError
from .grid import Grid, SampledField, lp_norm
from .operators import (
    OperatorHandle,
    commutator_op,
    materialize,
    multiplication_op,
    multiplier_op,
    singular_values,
)
from .profiles import bump_field
from .symbols import SymbolSpec

KINDS = ("oscillation", "concentration", "translation")


@dataclass(frozen=True)
class TestSequenceSpec:
    """Recipe for a bounded weak-null sequence built from a smooth bump.

    oscillation: u_n = bump * exp(2 pi i (base*n) direction . x)
    concentration: u_n = n^(d/p) bump(n (x - center)), clipped to bound
    translation: u_n = bump shifted n lattice steps along the given axis
    """

    kind: str
    center: tuple = (0.0,)
    width: float = 0.5
    amplitude: float = 1.0
    direction: tuple = (1.0,)
    base: float = 1.0
    p: float = 2.0
    bound: Optional[float] = None
    axis: int = 0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValidationError(f"unknown sequence kind {self.kind!r}")


def _profile(spec: TestSequenceSpec, grid: Grid) -> SampledField:
    return bump_field(grid, spec.center, spec.width, spec.amplitude)


def gen_sequence(spec: TestSequenceSpec, n: int, grid: Grid) -> SampledField:
    """The n-th member of the sequence; validates Nyquist and support."""
    if n < 0:
        raise ValidationError("sequence index must be >= 0")
    if len(spec.center) != grid.d:
        raise ValidationError("sequence center dimension mismatch")
    phi = _profile(spec, grid)
    if spec.kind == "oscillation":
        xi0 = np.asarray(spec.direction, dtype=np.float64)
        if xi0.shape != (grid.d,):
            raise ValidationError("oscillation direction dimension mismatch")
        lam = spec.base * n
        if lam * np.linalg.norm(xi0) >= grid.N / (4.0 * grid.L):
            raise ValidationError(
                f"oscillation frequency {lam * np.linalg.norm(xi0):g} violates "
                f"the Nyquist guard N/(4L) = {grid.N / (4 * grid.L):g}"
            )
        x = grid.spatial_points()
        phase = np.exp(2j * np.pi * lam * np.tensordot(x, xi0, axes=([-1], [0])))
        return SampledField(grid, "spatial", phi.values * phase)
    if spec.kind == "concentration":
        rate = max(n, 1)
        x = grid.spatial_points()
        c = np.asarray(spec.center)
        from .profiles import bump_values

        vals = rate ** (grid.d / spec.p) * bump_values(
            rate * (x - c) + c, spec.center, spec.width, spec.amplitude
        )
        if spec.bound is not None:
            mag = np.abs(vals)
            over = mag > spec.bound
            vals = np.where(over, vals * (spec.bound / np.maximum(mag, 1e-300)), vals)
        return SampledField(grid, "spatial", vals)
    # translation
    if not (0 <= spec.axis < grid.d):
        raise ValidationError("translation axis out of range")
    shift = n * grid.dx
    reach = abs(spec.center[spec.axis] + shift) + spec.width
    if reach > grid.L:
        raise ValidationError(
            f"translated support (reach {reach:g}) leaves the box L={grid.L:g}"
        )
    return SampledField(grid, "spatial", np.roll(phi.values, n, axis=spec.axis))


@dataclass(frozen=True)
class DecayCurve:
    points: tuple  # (n, rate, norm) triples, sorted by n
    p0: float
    V: object


def commutator_decay_experiment(
    a: SymbolSpec,
    sphere: bool,
    b: SampledField,
    spec: TestSequenceSpec,
    n_list,
    p0: float,
    V,
) -> DecayCurve:
    """Norms of C u_n in L^p0(V) along the sequence."""
    grid = b.grid
    op = commutator_op(a, sphere, b)
    pts = []
    for n in sorted(n_list):
        u = gen_sequence(spec, n, grid)
        cu = op.apply(u)
        rate = spec.base * n if spec.kind == "oscillation" else float(n)
        pts.append((int(n), float(rate), lp_norm(cu, p0, V)))
    return DecayCurve(points=tuple(pts), p0=p0, V=V)


@dataclass(frozen=True)
class SvdTailRow:
    N: int
    L: float
    sigma_1: float
    sigma_K: float
    tail_energy: float


def svd_tail_experiment(
    a: Optional[SymbolSpec],
    sphere: bool,
    b_factory: Optional[Callable[[Grid], SampledField]],
    grids,
    K: int,
    operator: str = "commutator",
) -> list[SvdTailRow]:
    """Head/tail singular statistics across a list of grids.

    operator selects the diagnosed kind: 'commutator' (expected compact),
    'multiplier' (non-compact control) or 'multiplication'.
    """
    rows = []
    for grid in grids:
        if operator == "commutator":
            op = commutator_op(a, sphere, b_factory(grid))
        elif operator == "multiplier":
            op = multiplier_op(a, sphere, grid)
        elif operator == "multiplication":
            op = multiplication_op(b_factory(grid))
        else:
            raise ValidationError(f"unknown operator kind {operator!r}")
        spec = singular_values(materialize(op), descriptor=operator, grid=grid)
        rows.append(
            SvdTailRow(
                N=grid.N,
                L=grid.L,
                sigma_1=float(spec.values[0]),
                sigma_K=float(spec.values[min(K, len(spec.values)) - 1]),
                tail_energy=spec.tail_energy(K),
            )
        )
    return rows
