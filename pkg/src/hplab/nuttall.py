"""Sheet functions u1..u4 of the four-sheeted covering built from the
two-sheeted surface w^2 = z^2 - 1 and an extremal continuum in the
uniformizing disk.

With g1 the Green function of [-1, 1] (log|zeta1(z)|, |zeta1| > 1) and gF the
Green function of the extremal continuum evaluated on the two sheet images
zeta1 and zeta2 = 1/zeta1, the sheet functions are

    u1 = -2 gF(zeta1) - g1      u2 = -2 gF(zeta2) + g1
    u3 =  2 gF(zeta2) + g1      u4 =  2 gF(zeta1) - g1

They sum to zero identically, satisfy u1 <= u2 <= u3 <= u4 with strict
inequalities off the cuts, and u1 decays like -3 log|z| at infinity.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .green import _green_many
from .scurve import QuadraticDifferential


class NuttallError(RuntimeError):
    pass


class OnCut(NuttallError):
    """Point lies on a cut of the four-sheeted surface, where consecutive
    sheet functions coincide."""


@dataclass(frozen=True)
class SheetValues:
    z: complex
    u: tuple  # (u1, u2, u3, u4)
    gaps: tuple  # (u2-u1, u3-u2, u4-u3)


@dataclass(frozen=True)
class NuttallReport:
    grid: np.ndarray
    u: np.ndarray  # shape (npts, 4)
    min_gaps: tuple  # minima of (u2-u1, u3-u2, u4-u3) over the grid
    max_abs_sum: float
    slope_u1: float
    slope_stderr: float


def _zeta1(z: complex) -> complex:
    w = cmath.sqrt(z - 1) * cmath.sqrt(z + 1)
    zeta = z + w
    if abs(zeta) < 1:
        zeta = z - w
    return zeta


def _cut_distance(qd: QuadraticDifferential, z: complex, nodes=None) -> float:
    """Distance to the visible cuts: the base segment [-1, 1] and the
    z-projections of the continuum on both sheets."""
    if nodes is None:
        nodes = _projection_nodes(qd)
    d = _dist_segment(z, -1.0, 1.0)
    if len(nodes):
        d = min(d, float(np.min(np.abs(nodes - z))))
    return d


def _projection_nodes(qd: QuadraticDifferential, n: int = 64) -> np.ndarray:
    """z-projections of straight chords between skeleton points of the
    continuum: a conservative sampling of where the lifted cuts can sit."""
    nodes = []
    ends = list(qd.denominator_roots) + list(qd.numerator_roots)
    for i in range(len(ends)):
        for j in range(i + 1, len(ends)):
            for t in np.linspace(0, 1, n):
                nodes.append(ends[i] + t * (ends[j] - ends[i]))
    zeta = np.asarray(nodes)
    return (zeta + 1 / zeta) / 2


def _dist_segment(z: complex, a: float, b: float) -> float:
    x = min(max(z.real, a), b)
    return abs(z - x)


def u_values(qd: QuadraticDifferential, z: complex, cut_tol: float = 1e-9) -> SheetValues:
    """Sheet functions at a single point; raises OnCut within ``cut_tol`` of
    a cut, where consecutive values coincide."""
    z = complex(z)
    if _cut_distance(qd, z, _projection_nodes(qd)) < cut_tol:
        raise OnCut(f"{z} lies on (or within {cut_tol} of) a cut")
    u = _u_batch(qd, np.asarray([z]))[0]
    gaps = (u[1] - u[0], u[2] - u[1], u[3] - u[2])
    return SheetValues(z=z, u=tuple(u), gaps=gaps)


def _u_batch(qd: QuadraticDifferential, zs: np.ndarray) -> np.ndarray:
    zeta1 = np.asarray([_zeta1(complex(z)) for z in zs])
    g1 = np.log(np.abs(zeta1))
    gf1 = _green_many(qd, list(zeta1))
    gf2 = _green_many(qd, list(1 / zeta1))
    u1 = -2 * gf1 - g1
    u2 = -2 * gf2 + g1
    u3 = 2 * gf2 + g1
    u4 = 2 * gf1 - g1
    return np.stack([u1, u2, u3, u4], axis=1)


def default_grid(qd: QuadraticDifferential, n: int = 10_000, seed: int = 7,
                 box: float = 4.0, cut_margin: float = 1e-3) -> np.ndarray:
    """Deterministic quasi-random grid in a box around the cuts, excluding a
    safety margin near the cuts themselves."""
    rng = np.random.default_rng(seed)
    nodes = _projection_nodes(qd)
    pts = []
    while len(pts) < n:
        cand = (rng.random(2 * n) * 2 - 1) * box + 1j * (rng.random(2 * n) * 2 - 1) * box
        for z in cand:
            if _cut_distance(qd, complex(z), nodes) > cut_margin:
                pts.append(complex(z))
                if len(pts) == n:
                    break
    return np.asarray(pts)


def nuttall_report(
    qd: QuadraticDifferential,
    grid: np.ndarray | None = None,
    n: int = 10_000,
    slope_radii=(1e6, 1e7),
    slope_rays: int = 8,
    slope_samples: int = 12,
) -> NuttallReport:
    """Grid verification of the sheet ordering.

    Checks performed on the returned data: min over the grid of each
    consecutive gap (positive iff the strict ordering holds off the cuts),
    the worst |u1+u2+u3+u4|, and the least-squares slope of u1 against
    log|z| on rays with |z| between ``slope_radii``.
    """
    if grid is None:
        grid = default_grid(qd, n)
    u = _u_batch(qd, grid)
    gaps = np.diff(u, axis=1)
    min_gaps = tuple(float(g) for g in gaps.min(axis=0))
    max_abs_sum = float(np.max(np.abs(u.sum(axis=1))))

    r0, r1 = slope_radii
    radii = np.exp(np.linspace(math.log(r0), math.log(r1), slope_samples))
    xs, ys = [], []
    for k in range(slope_rays):
        ang = 2 * math.pi * (k + 0.37) / slope_rays
        zs = radii * cmath.exp(1j * ang)
        uu = _u_batch(qd, zs)
        xs.extend(np.log(radii))
        ys.extend(uu[:, 0])
    xs = np.asarray(xs)
    ys = np.asarray(ys)
    a = np.vstack([xs, np.ones_like(xs)]).T
    coef, res, _, _ = np.linalg.lstsq(a, ys, rcond=None)
    fit = a @ coef
    dof = max(len(xs) - 2, 1)
    stderr = float(
        math.sqrt(np.sum((ys - fit) ** 2) / dof / np.sum((xs - xs.mean()) ** 2))
    )
    return NuttallReport(
        grid=grid,
        u=u,
        min_gaps=min_gaps,
        max_abs_sum=max_abs_sum,
        slope_u1=float(coef[0]),
        slope_stderr=stderr,
    )
