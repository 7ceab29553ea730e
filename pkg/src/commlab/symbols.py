"""Multiplier symbols and the auxiliary cutoff / dyadic-partition functions.

A symbol is an evaluable function of the frequency variable, optionally with
analytic derivatives.  This module also builds the two smooth auxiliary
objects the commutator experiments rely on: a mollified ball-indicator cutoff
(plateau on B(0,1), support in B(0,3)) and a dyadic partition of unity
subordinate to the annuli {2^(j-1) <= |xi| <= 2^(j+1)}.
"""

from __future__ import annotations

import csv
import functools
import itertools
import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .errors import ValidationError

MultiIndex = tuple  # tuple of per-axis nonnegative derivative orders


def order(alpha: MultiIndex) -> int:
    """Total order n(alpha) = sum of components."""
    return int(sum(alpha))


def multi_indices(d: int, max_order: int) -> list[MultiIndex]:
    """All multi-indices with n(alpha) <= max_order, in (order, lex) order."""
    out = [
        alpha
        for alpha in itertools.product(range(max_order + 1), repeat=d)
        if sum(alpha) <= max_order
    ]
    out.sort(key=lambda a: (sum(a), a))
    return out


@dataclass(frozen=True)
class SymbolSpec:
    """An evaluable frequency-side symbol.

    eval maps an array of points with trailing axis length d to complex
    values.  deriv, when present, maps (points, alpha) to the analytic
    derivative D^alpha, or returns NotImplemented for orders it does not
    cover (the finite-difference fallback then takes over).
    """

    d: int
    eval: Callable[[np.ndarray], np.ndarray]
    kind: str = "general"  # homogeneous-degree-zero | general | tabulated
    kappa_max: int = 4
    deriv: Optional[Callable[[np.ndarray, MultiIndex], np.ndarray]] = None
    name: str = "symbol"
    support_radius: Optional[float] = None

    def __call__(self, points) -> np.ndarray:
        return self.eval(points)


def _pts(points, d: int) -> np.ndarray:
    p = np.asarray(points, dtype=np.float64)
    if p.ndim == 0 or p.shape[-1] != d:
        raise ValidationError(f"points must have trailing axis of length {d}")
    return p


# ---------------------------------------------------------------------------
# builtin symbols
# ---------------------------------------------------------------------------


def _radius(p: np.ndarray) -> np.ndarray:
    return np.sqrt(np.sum(p * p, axis=-1))


def _constant(d: int, c: complex) -> SymbolSpec:
    def ev(points):
        p = _pts(points, d)
        return np.full(p.shape[:-1], c, dtype=np.complex128)

    def dv(points, alpha):
        p = _pts(points, d)
        if order(alpha) == 0:
            return np.full(p.shape[:-1], c, dtype=np.complex128)
        return np.zeros(p.shape[:-1], dtype=np.complex128)

    return SymbolSpec(d=d, eval=ev, deriv=dv, kind="general", name=f"constant({c})")


def _zero(d: int) -> SymbolSpec:
    def ev(points):
        p = _pts(points, d)
        return np.zeros(p.shape[:-1], dtype=np.complex128)

    def dv(points, alpha):
        return ev(points)

    return SymbolSpec(d=d, eval=ev, deriv=dv, kind="general", name="zero")


def _riesz(d: int, i: int) -> SymbolSpec:
    if not 1 <= i <= d:
        raise ValidationError(f"riesz index {i} out of range 1..{d}")
    ax = i - 1

    def ev(points):
        p = _pts(points, d)
        r = _radius(p)
        out = np.zeros(p.shape[:-1], dtype=np.complex128)
        nz = r > 0
        out[nz] = p[..., ax][nz] / r[nz]
        return out

    def dv(points, alpha):
        n = order(alpha)
        if n == 0:
            return ev(points)
        if n > 2:
            return NotImplemented
        p = _pts(points, d)
        r = _radius(p)
        if np.any(r == 0):
            raise ValidationError("riesz derivative evaluated at the origin")
        xi_i = p[..., ax]
        if n == 1:
            j = next(k for k, a in enumerate(alpha) if a)
            return ((ax == j) / r - xi_i * p[..., j] / r**3).astype(np.complex128)
        # order 2: alpha = e_j + e_k with possibly j == k
        idx = [k for k, a in enumerate(alpha) for _ in range(a)]
        j, k = idx
        xi_j, xi_k = p[..., j], p[..., k]
        val = (
            -((ax == j) * xi_k + (ax == k) * xi_j + (j == k) * xi_i) / r**3
            + 3.0 * xi_i * xi_j * xi_k / r**5
        )
        return val.astype(np.complex128)

    return SymbolSpec(
        d=d, eval=ev, deriv=dv, kind="homogeneous-degree-zero", name=f"riesz({i})"
    )


def _gaussian(d: int) -> SymbolSpec:
    def ev(points):
        p = _pts(points, d)
        return np.exp(-np.pi * np.sum(p * p, axis=-1)).astype(np.complex128)

    def dv(points, alpha):
        # tensor factorization: d^n/dt^n exp(-pi t^2)
        #   = (-1)^n pi^(n/2) H_n(sqrt(pi) t) exp(-pi t^2)
        p = _pts(points, d)
        out = np.ones(p.shape[:-1], dtype=np.complex128)
        for axis, n in enumerate(alpha):
            t = p[..., axis]
            fac = np.exp(-np.pi * t * t)
            if n > 0:
                hn = np.polynomial.hermite.hermval(
                    np.sqrt(np.pi) * t, [0.0] * n + [1.0]
                )
                fac = (-1.0) ** n * np.pi ** (n / 2.0) * hn * fac
            out = out * fac
        return out

    return SymbolSpec(d=d, eval=ev, deriv=dv, kind="general", name="gaussian")


def _sign_1d(d: int) -> SymbolSpec:
    if d != 1:
        raise ValidationError("sign-1d requires d=1")

    def ev(points):
        p = _pts(points, 1)
        return np.sign(p[..., 0]).astype(np.complex128)

    def dv(points, alpha):
        p = _pts(points, 1)
        if order(alpha) == 0:
            return ev(points)
        if np.any(p[..., 0] == 0):
            raise ValidationError("sign derivative evaluated at the origin")
        return np.zeros(p.shape[:-1], dtype=np.complex128)

    return SymbolSpec(
        d=1, eval=ev, deriv=dv, kind="homogeneous-degree-zero", name="sign-1d"
    )


def _sphere_harmonic(d: int, ell: int) -> SymbolSpec:
    if ell < 0:
        raise ValidationError("sphere-harmonic order must be >= 0")

    def ev(points):
        p = _pts(points, d)
        r = _radius(p)
        out = np.zeros(p.shape[:-1], dtype=np.complex128)
        nz = r > 0
        if d == 1:
            s = np.sign(p[..., 0][nz])
            out[nz] = s**ell
        elif d == 2:
            phi = np.arctan2(p[..., 1][nz], p[..., 0][nz])
            out[nz] = np.cos(ell * phi)
        else:
            t = p[..., 2][nz] / r[nz]
            out[nz] = np.polynomial.legendre.legval(t, [0.0] * ell + [1.0])
        return out

    return SymbolSpec(
        d=d, eval=ev, kind="homogeneous-degree-zero", name=f"sphere-harmonic({ell})"
    )


_BUILTINS = {
    "constant": lambda d, params: _constant(d, complex(params.get("c", 1.0))),
    "zero": lambda d, params: _zero(d),
    "riesz": lambda d, params: _riesz(d, int(params.get("i", 1))),
    "gaussian": lambda d, params: _gaussian(d),
    "sign-1d": lambda d, params: _sign_1d(d),
    "sphere-harmonic": lambda d, params: _sphere_harmonic(
        d, int(params.get("ell", 1))
    ),
}


def builtin_symbol(name: str, d: int, **params) -> SymbolSpec:
    """Construct one of the builtin test symbols by name."""
    if d not in (1, 2, 3):
        raise ValidationError(f"dimension d={d} not in {{1, 2, 3}}")
    try:
        factory = _BUILTINS[name]
    except KeyError:
        raise ValidationError(
            f"unknown symbol {name!r}; available: {sorted(_BUILTINS)}"
        ) from None
    return factory(d, params)


def is_degree_zero_homogeneous(a: SymbolSpec, tol: float = 1e-12) -> bool:
    """Sampling test for eval(t*xi) == eval(xi), t in {0.5, 2, 10}."""
    rng = np.random.default_rng(1234)
    pts = rng.uniform(-2.0, 2.0, size=(64, a.d))
    r = _radius(pts)
    pts = pts[r > 0.25]
    base = a.eval(pts)
    for t in (0.5, 2.0, 10.0):
        if np.max(np.abs(a.eval(t * pts) - base)) > tol:
            return False
    return True


def sphere_form(a: SymbolSpec) -> SymbolSpec:
    """The degree-zero-homogeneous extension xi -> a(xi/|xi|).

    The origin is mapped to the zero vector, so the value there is the
    symbol's own a(0) (zero for the homogeneous builtins; a constant symbol
    stays an exact identity multiplier).
    """

    def ev(points):
        p = _pts(points, a.d)
        r = _radius(p)
        unit = np.zeros_like(p)
        nz = r > 0
        unit[nz] = p[nz] / r[nz][..., None]
        return a.eval(unit)

    return SymbolSpec(
        d=a.d,
        eval=ev,
        kind="homogeneous-degree-zero",
        kappa_max=a.kappa_max,
        name=f"sphere[{a.name}]",
    )


def tabulated_symbol(path, d: int) -> SymbolSpec:
    """Load a symbol from CSV (columns xi_1..xi_d, re, im); evaluation is
    nearest-neighbour lookup into the tabulated frequency points."""
    table_pts = []
    table_vals = []
    with open(path, newline="") as fh:
        for row in csv.reader(fh):
            if not row or row[0].lstrip().startswith("#"):
                continue
            try:
                nums = [float(t) for t in row]
            except ValueError:
                continue  # header line
            if len(nums) != d + 2:
                raise ValidationError(
                    f"tabulated symbol rows need {d + 2} columns, got {len(nums)}"
                )
            table_pts.append(nums[:d])
            table_vals.append(complex(nums[d], nums[d + 1]))
    if not table_pts:
        raise ValidationError(f"no data rows in tabulated symbol {path}")
    tp = np.asarray(table_pts)
    tv = np.asarray(table_vals, dtype=np.complex128)

    def ev(points):
        p = _pts(points, d).reshape(-1, d)
        out = np.empty(p.shape[0], dtype=np.complex128)
        chunk = max(1, 2**22 // max(tp.shape[0], 1))
        for i in range(0, p.shape[0], chunk):
            block = p[i : i + chunk]
            d2 = np.sum((block[:, None, :] - tp[None, :, :]) ** 2, axis=-1)
            out[i : i + chunk] = tv[np.argmin(d2, axis=1)]
        return out.reshape(np.asarray(points).shape[:-1])

    return SymbolSpec(
        d=d, eval=ev, kind="tabulated", kappa_max=0, name=f"tabulated({path})"
    )


# ---------------------------------------------------------------------------
# mollifier machinery for the cutoff
# ---------------------------------------------------------------------------

_BUMP_INTERVALS = 16384
_BUMP_GL_ORDER = 8


def _omega_raw(t: np.ndarray) -> np.ndarray:
    """Unnormalized standard bump exp(-1/(1-t^2)) on (-1, 1)."""
    t = np.asarray(t, dtype=np.float64)
    out = np.zeros_like(t)
    inside = np.abs(t) < 1.0
    ti = t[inside]
    out[inside] = np.exp(-1.0 / (1.0 - ti * ti))
    return out


@functools.lru_cache(maxsize=1)
def _bump_tables():
    """Breakpoints, cumulative masses and total mass of the raw bump,
    computed with composite Gauss-Legendre so the CDF table is accurate to
    rounding on every subinterval."""
    edges = np.linspace(-1.0, 1.0, _BUMP_INTERVALS + 1)
    gx, gw = np.polynomial.legendre.leggauss(_BUMP_GL_ORDER)
    half = 0.5 * (edges[1] - edges[0])
    mid = 0.5 * (edges[1:] + edges[:-1])
    nodes = mid[:, None] + half * gx[None, :]
    per = half * (_omega_raw(nodes) * gw[None, :]).sum(axis=1)
    cum = np.concatenate([[0.0], np.cumsum(per)])
    return edges, cum, cum[-1]


def omega_mass() -> float:
    """Total mass of the raw bump (normalization constant denominator)."""
    return float(_bump_tables()[2])


def omega(t) -> np.ndarray:
    """The unit-mass mollifier profile on (-1, 1)."""
    return _omega_raw(t) / omega_mass()


def bump_cdf(y) -> np.ndarray:
    """CDF of the unit-mass mollifier: integral of omega over (-1, y].

    Between table breakpoints the value is cubic-Hermite interpolated from
    exact node values and the (known) integrand; the step is small enough
    that the interpolation error sits at rounding level.
    """
    edges, cum, total = _bump_tables()
    y = np.asarray(y, dtype=np.float64)
    yc = np.clip(y, -1.0, 1.0)
    j = np.clip(np.searchsorted(edges, yc, side="right") - 1, 0, _BUMP_INTERVALS - 1)
    lo = edges[j]
    h = edges[1] - edges[0]
    t = (yc - lo) / h
    c0 = cum[j]
    c1 = cum[j + 1]
    d0 = _omega_raw(lo) * h
    d1 = _omega_raw(lo + h) * h
    t2 = t * t
    t3 = t2 * t
    val = (
        c0 * (2 * t3 - 3 * t2 + 1)
        + d0 * (t3 - 2 * t2 + t)
        + c1 * (-2 * t3 + 3 * t2)
        + d1 * (t3 - t2)
    )
    return val / total


def _bump_cdf_quadrature(y) -> np.ndarray:
    """Reference CDF by per-query Gauss-Legendre on the partial interval
    (slow; used to validate the interpolated fast path)."""
    edges, cum, total = _bump_tables()
    y = np.asarray(y, dtype=np.float64)
    yc = np.clip(y, -1.0, 1.0)
    j = np.clip(np.searchsorted(edges, yc, side="right") - 1, 0, _BUMP_INTERVALS - 1)
    lo = edges[j]
    gx, gw = np.polynomial.legendre.leggauss(_BUMP_GL_ORDER)
    half = 0.5 * (yc - lo)
    mid = 0.5 * (yc + lo)
    nodes = mid[..., None] + half[..., None] * gx
    part = half * (_omega_raw(nodes) * gw).sum(axis=-1)
    return (cum[j] + part) / total


def _arc_nodes(x1: np.ndarray, radius, eps: float, gx: np.ndarray):
    """Angular reparametrization of one convolution axis.

    The integral over t in [-eps, eps] of m(t) f(sqrt(radius^2 - (x1-t)^2))
    has a square-root kink where the ball boundary enters the mollifier
    window; substituting x1 - t = radius*cos(phi) makes the integrand smooth.
    Returns (t nodes, rho values, jacobian weights) with one trailing
    Gauss-Legendre axis appended; windows outside the ball collapse to zero
    weight automatically through the clip.
    """
    x1 = np.asarray(x1, dtype=np.float64)
    r = radius if np.isscalar(radius) else np.asarray(radius, dtype=np.float64)
    with np.errstate(divide="ignore", invalid="ignore"):
        lo = np.arccos(np.clip((x1 + eps) / r, -1.0, 1.0))
        hi = np.arccos(np.clip((x1 - eps) / r, -1.0, 1.0))
    half = 0.5 * (hi - lo)[..., None]
    mid = 0.5 * (hi + lo)[..., None]
    phi = mid + half * gx
    rb = r if np.isscalar(r) else r[..., None]
    t = x1[..., None] - rb * np.cos(phi)
    rho = rb * np.sin(phi)
    jac = half * rho
    return t, rho, jac


def _chi_shell_direct(x: np.ndarray, d: int, eps: float, quad_nodes: int) -> np.ndarray:
    """Quadrature evaluation of the mollified ball indicator on the
    transition shell.  Outer axes integrate against the mollifier with
    Gauss-Legendre in the angular variable (see _arc_nodes); the innermost
    axis is integrated exactly via the bump CDF."""
    if d == 1:
        return bump_cdf((x[:, 0] + 2.0) / eps) - bump_cdf((x[:, 0] - 2.0) / eps)
    gx, gw = np.polynomial.legendre.leggauss(quad_nodes)
    if d == 2:
        out = np.empty(x.shape[0])
        chunk = 4096
        for i in range(0, x.shape[0], chunk):
            blk = x[i : i + chunk]
            t, rho, jac = _arc_nodes(blk[:, 0], 2.0, eps, gx)
            inner = bump_cdf((blk[:, 1, None] + rho) / eps) - bump_cdf(
                (blk[:, 1, None] - rho) / eps
            )
            out[i : i + chunk] = np.einsum(
                "qn,qn,n->q", omega(t / eps) / eps * jac, inner, gw
            )
        return out
    out = np.empty(x.shape[0])
    chunk = 32
    for i in range(0, x.shape[0], chunk):
        blk = x[i : i + chunk]
        t1, r1, jac1 = _arc_nodes(blk[:, 0], 2.0, eps, gx)  # (q, n)
        t2, rho, jac2 = _arc_nodes(blk[:, 1, None], r1, eps, gx)  # (q, n, n)
        inner = bump_cdf((blk[:, 2, None, None] + rho) / eps) - bump_cdf(
            (blk[:, 2, None, None] - rho) / eps
        )
        w1 = omega(t1 / eps) / eps * jac1 * gw
        w2 = omega(t2 / eps) / eps * jac2 * gw
        out[i : i + chunk] = np.einsum("qn,qnm,qnm->q", w1, w2, inner)
    return out


_CHI2_RADIAL = 1024
_CHI2_ANGULAR = 160


@functools.lru_cache(maxsize=8)
def _chi2_shell_spline(eps: float, quad_nodes: int):
    """Bicubic polar table of the d=2 cutoff on its transition shell.

    The cutoff has the dihedral symmetry of the tensorized mollifier, so the
    angle is sampled on [0, pi/4] only; queries fold into that sector.  The
    table is dense enough that the spline reproduces the direct quadrature
    to ~1e-12 and stays inside [0, 1] to the same accuracy.
    """
    from scipy.interpolate import RectBivariateSpline

    margin = eps * math.sqrt(2.0)
    pad = 6.0 * (2.0 * margin / _CHI2_RADIAL)
    r = np.linspace(2.0 - margin - pad, 2.0 + margin + pad, _CHI2_RADIAL)
    th = np.linspace(0.0, math.pi / 4.0, _CHI2_ANGULAR)
    R, T = np.meshgrid(r, th, indexing="ij")
    pts = np.stack([R * np.cos(T), R * np.sin(T)], axis=-1).reshape(-1, 2)
    vals = _chi_shell_direct(pts, 2, eps, quad_nodes)
    return RectBivariateSpline(r, th, vals.reshape(R.shape), kx=3, ky=3, s=0)


@dataclass(frozen=True)
class CutoffChi:
    """Mollified indicator of B(0, 2): identically 1 on B(0, 2 - eps*sqrt(d)),
    identically 0 outside B(0, 2 + eps*sqrt(d)), smooth in between.

    The mollifier is the tensor product of d scaled unit-mass bumps, so the
    convolution against the ball indicator reduces to nested 1-d quadrature
    with the innermost axis integrated exactly through the bump CDF.  Values
    off the transition shell are exact by construction; on the shell, d=1
    uses the CDF directly, d=2 a memoized high-resolution polar table, and
    d=3 the full nested quadrature.
    """

    eps: float
    quad_nodes: int = 256

    def eval(self, points) -> np.ndarray:
        p = np.asarray(points, dtype=np.float64)
        if p.ndim == 0:
            raise ValidationError("cutoff points need a trailing axis")
        if p.ndim == 1:
            # interpret a bare vector as a single d-point
            p = p[None, :]
            return self.eval(p)[0]
        d = p.shape[-1]
        if d not in (1, 2, 3):
            raise ValidationError(f"cutoff dimension {d} not in {{1, 2, 3}}")
        flat = p.reshape(-1, d)
        r = np.sqrt(np.sum(flat * flat, axis=-1))
        margin = self.eps * math.sqrt(d)
        out = np.zeros(flat.shape[0])
        out[r <= 2.0 - margin] = 1.0
        shell = (r > 2.0 - margin) & (r < 2.0 + margin)
        if shell.any():
            xs = flat[shell]
            if d == 2:
                spline = _chi2_shell_spline(self.eps, self.quad_nodes)
                rs = r[shell]
                th = np.arctan2(np.abs(xs[:, 1]), np.abs(xs[:, 0]))
                th = np.minimum(th, math.pi / 2.0 - th)
                out[shell] = np.clip(spline.ev(rs, th), 0.0, 1.0)
            else:
                out[shell] = _chi_shell_direct(xs, d, self.eps, self.quad_nodes)
        return out.reshape(p.shape[:-1])

    __call__ = eval


def build_cutoff_chi(eps: float) -> CutoffChi:
    """Cutoff with mollification width eps; requires 0 < eps <= 1/2 so the
    plateau covers B(0,1) and the support stays inside B(0,3)."""
    if not (0.0 < eps <= 0.5):
        raise ValidationError(f"mollification width eps={eps} not in (0, 1/2]")
    return CutoffChi(eps=float(eps))


# ---------------------------------------------------------------------------
# dyadic partition of unity
# ---------------------------------------------------------------------------


def _annular_profile(tau: np.ndarray) -> np.ndarray:
    """exp(-1/(1 - tau^2)) for |tau| < 1, else 0 (tau = log2 of |xi|)."""
    return _omega_raw(tau)


@dataclass(frozen=True)
class LPPartition:
    """Dyadic partition of unity: theta is supported in {1/2 <= |xi| <= 2}
    and sum_j theta(2^-j xi) = 1 for xi != 0 (all but at most two terms
    vanish at any point, so the infinite sum is evaluated exactly)."""

    j_min: int
    j_max: int

    @property
    def j_range(self) -> range:
        return range(self.j_min, self.j_max + 1)

    def Theta(self, points) -> np.ndarray:
        p = np.asarray(points, dtype=np.float64)
        r = np.sqrt(np.sum(p * p, axis=-1))
        out = np.zeros_like(r)
        nz = r > 0
        out[nz] = _annular_profile(np.log2(r[nz]))
        return out

    def theta(self, points) -> np.ndarray:
        p = np.asarray(points, dtype=np.float64)
        r = np.sqrt(np.sum(p * p, axis=-1))
        out = np.zeros_like(r)
        nz = r > 0
        s = np.log2(r[nz])
        num = _annular_profile(s)
        f = s - np.floor(s)
        den = _annular_profile(f) + _annular_profile(f - 1.0)
        pos = num > 0
        vals = np.zeros_like(num)
        vals[pos] = num[pos] / den[pos]
        out[nz] = vals
        return out

    def partition_sum(self, points) -> np.ndarray:
        """Finite sum over the stored j_range of theta(2^-j xi)."""
        p = np.asarray(points, dtype=np.float64)
        total = np.zeros(p.shape[:-1])
        for j in self.j_range:
            total = total + self.theta(p * 2.0 ** (-j))
        return total


def build_lp_partition(j_min: int, j_max: int) -> LPPartition:
    """Partition valid (sums to 1) on 2^(j_min+1) <= |xi| <= 2^(j_max-1)."""
    if j_min > j_max:
        raise ValidationError(f"empty j_range [{j_min}, {j_max}]")
    if not (j_min <= 0 <= j_max):
        raise ValidationError("j_range must straddle 0 for the tested shell")
    return LPPartition(j_min=int(j_min), j_max=int(j_max))


def dyadic_piece(
    a: SymbolSpec, chi: CutoffChi, part: LPPartition, j: int
) -> SymbolSpec:
    """The localized symbol a(xi) * (1 - chi(xi)) * theta(2^-j xi), supported
    in the annulus {2^(j-1) <= |xi| <= 2^(j+1)}."""
    if j < 0:
        raise ValidationError(f"dyadic piece index j={j} must be >= 0")

    scale = 2.0 ** (-j)

    def ev(points):
        p = _pts(points, a.d)
        th = part.theta(p * scale)
        out = np.zeros(p.shape[:-1], dtype=np.complex128)
        live = th > 0
        if np.any(live):
            psub = p[live]
            out[live] = a.eval(psub) * (1.0 - chi.eval(psub)) * th[live]
        return out

    return SymbolSpec(
        d=a.d,
        eval=ev,
        kind="general",
        kappa_max=a.kappa_max,
        name=f"piece[{a.name}, j={j}]",
        support_radius=2.0 ** (j + 1),
    )


# ---------------------------------------------------------------------------
# derivatives
# ---------------------------------------------------------------------------

_CENTRAL_STENCILS = {
    1: ((-1, 1), (-0.5, 0.5)),
    2: ((-1, 0, 1), (1.0, -2.0, 1.0)),
    3: ((-2, -1, 1, 2), (-0.5, 1.0, -1.0, 0.5)),
    4: ((-2, -1, 0, 1, 2), (1.0, -4.0, 6.0, -4.0, 1.0)),
}


def _fd_once(f, points: np.ndarray, alpha: MultiIndex, h: np.ndarray) -> np.ndarray:
    axis_stencils = []
    for ax, n in enumerate(alpha):
        if n == 0:
            axis_stencils.append(((0,), (1.0,)))
        else:
            axis_stencils.append(_CENTRAL_STENCILS[n])
    acc = np.zeros(points.shape[:-1], dtype=np.complex128)
    for combo in itertools.product(*(zip(*st) for st in axis_stencils)):
        shift = np.array([c[0] for c in combo], dtype=np.float64)
        coeff = math.prod(c[1] for c in combo)
        shifted = points + shift * h[..., None]
        acc = acc + coeff * np.asarray(f(shifted), dtype=np.complex128)
    return acc / h ** order(alpha)


def symbol_derivative(a: SymbolSpec, points, alpha: MultiIndex) -> np.ndarray:
    """D^alpha a at the given points: analytic when the symbol provides it,
    otherwise Richardson-extrapolated nested central differences with
    per-point step h = max(|xi|, 1) * 1e-3."""
    alpha = tuple(int(x) for x in alpha)
    if len(alpha) != a.d or any(x < 0 for x in alpha):
        raise ValidationError(f"bad multi-index {alpha} for d={a.d}")
    n = order(alpha)
    if n > a.kappa_max:
        raise ValidationError(
            f"derivative order {n} exceeds symbol smoothness cap {a.kappa_max}"
        )
    p = _pts(points, a.d)
    if n == 0:
        return np.asarray(a.eval(p), dtype=np.complex128)
    if a.kind == "homogeneous-degree-zero":
        if np.any(np.sum(p * p, axis=-1) == 0):
            raise ValidationError(
                "derivative of a homogeneous symbol at the singular point 0"
            )
    if a.deriv is not None:
        out = a.deriv(p, alpha)
        if out is not NotImplemented:
            return np.asarray(out, dtype=np.complex128)
    h = np.maximum(np.sqrt(np.sum(p * p, axis=-1)), 1.0) * 1e-3
    full = _fd_once(a.eval, p, alpha, h)
    half = _fd_once(a.eval, p, alpha, 0.5 * h)
    return (4.0 * half - full) / 3.0  # Richardson: O(h^2) -> O(h^4)
