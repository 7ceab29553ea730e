"""Quadratic frequency-localization forms on test sequences.

For a pair of localization windows and a degree-zero-homogeneous symbol, the
form integrates (phi1 u_n) against the multiplier image of (phi2 times the
second factor), with or without conjugation.  For pure modulated-bump
sequences the limit value factorizes into the symbol evaluated at the
modulation direction times a weighted mass integral, which serves as the
analytic oracle for convergence studies.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .compactness import TestSequenceSpec, gen_sequence
from .errors import ValidationError
from .grid import Grid, SampledField, pointwise_mul
from .operators import apply_multiplier
from .symbols import SymbolSpec, is_degree_zero_homogeneous

VARIANTS = ("hermitian", "bilinear")


@dataclass(frozen=True)
class HFormSample:
    n: int
    value: complex
    variant: str


def _check_symbol(psi: SymbolSpec) -> None:
    if not is_degree_zero_homogeneous(psi):
        raise ValidationError(
            f"symbol {psi.name!r} is not degree-zero homogeneous"
        )


def hform(
    variant: str,
    u_n: SampledField,
    second: SampledField,
    phi1: SampledField,
    phi2: SampledField,
    psi_sphere: SymbolSpec,
) -> complex:
    """dx^d sum (phi1 u_n) * [conj if hermitian](A_psi(phi2 * second)).

    variant 'hermitian' conjugates the multiplier image (second factor is
    the same sequence); 'bilinear' pairs u_n against an independent bounded
    factor without conjugation.
    """
    if variant not in VARIANTS:
        raise ValidationError(f"unknown hform variant {variant!r}")
    _check_symbol(psi_sphere)
    grids = {u_n.grid, second.grid, phi1.grid, phi2.grid}
    if len(grids) != 1:
        raise ValidationError("hform operands live on different grids")
    g = grids.pop()
    image = apply_multiplier(psi_sphere, True, pointwise_mul(phi2, second))
    right = np.conj(image.values) if variant == "hermitian" else image.values
    total = np.sum(phi1.values * u_n.values * right)
    return complex(g.dx**g.d * total)


def oscillation_oracle(
    profile: SampledField,
    xi0,
    phi1: SampledField,
    phi2: SampledField,
    psi_sphere: SymbolSpec,
) -> complex:
    """Limit value for a modulated-bump sequence: the symbol at the
    modulation direction times integral phi1 conj(phi2) |profile|^2."""
    _check_symbol(psi_sphere)
    xi0 = np.asarray(xi0, dtype=np.float64)
    norm = np.linalg.norm(xi0)
    if norm == 0:
        raise ValidationError("oscillation direction must be nonzero")
    g = profile.grid
    psi_dir = complex(np.asarray(psi_sphere.eval((xi0 / norm)[None, :]))[0])
    mass = g.dx**g.d * np.sum(
        phi1.values * np.conj(phi2.values) * np.abs(profile.values) ** 2
    )
    return psi_dir * complex(mass)


@dataclass(frozen=True)
class HFormStudyRow:
    n: int
    value: complex
    error: float


def hform_convergence_study(
    spec: TestSequenceSpec,
    phi1: SampledField,
    phi2: SampledField,
    psi_sphere: SymbolSpec,
    n_list,
    grid: Grid,
) -> tuple[list[HFormStudyRow], complex]:
    """Hermitian-form values along an oscillation sequence against the
    analytic oracle; returns (rows, oracle value)."""
    if spec.kind != "oscillation":
        raise ValidationError("convergence study needs an oscillation sequence")
    from .profiles import bump_field

    profile = bump_field(grid, spec.center, spec.width, spec.amplitude)
    oracle = oscillation_oracle(profile, spec.direction, phi1, phi2, psi_sphere)
    rows = []
    for n in sorted(n_list):
        u = gen_sequence(spec, n, grid)
        val = hform("hermitian", u, u, phi1, phi2, psi_sphere)
        rows.append(HFormStudyRow(n=int(n), value=val, error=abs(val - oracle)))
    return rows, oracle


def hform_matrix(
    specs,
    n: int,
    phi1: SampledField,
    phi2: SampledField,
    psi_sphere: SymbolSpec,
    grid: Grid,
) -> np.ndarray:
    """The r x r matrix of pairwise hermitian forms at sequence index n for
    component sequences sharing one modulation direction."""
    dirs = {tuple(s.direction) for s in specs}
    if len(dirs) != 1:
        raise ValidationError("matrix components must share the direction")
    us = [gen_sequence(s, n, grid) for s in specs]
    r = len(us)
    M = np.empty((r, r), dtype=np.complex128)
    for i in range(r):
        for j in range(r):
            M[i, j] = hform("hermitian", us[i], us[j], phi1, phi2, psi_sphere)
    return M
