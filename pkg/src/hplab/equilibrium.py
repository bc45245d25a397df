"""Nonstandard logarithmic equilibrium problem on an arc.

The interaction kernel on the base plane is

    K(z, t) = -2 log|z - t| + log|1 - Phi(z) Phi(t)|,

with Phi(z) = z + sqrt(z^2 - 1) (the branch with |Phi| > 1), and the external
field is V(z) = log|Phi(z)|.  The equilibrium measure lambda minimizes

    J(mu) = \\iint K dmu dmu + 2 \\int V dmu

over probability measures on the arc; at the minimum the total potential
P(z) = \\int K(z, t) dlambda(t) + V(z) is constant on the support.

The solver discretizes the arc into equal-arclength cells with a lumped
diagonal and solves the stationarity system directly (falling back to
projected gradient if any cell weight turns negative).  The reported residual
re-evaluates the potential of the piecewise-constant density honestly - with
the logarithmic part integrated in closed form over every cell - so it
reflects the true discretization error and shrinks under refinement.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .hermite_pade import DiscreteMeasure


class EquilibriumError(RuntimeError):
    pass


class NegativeDensity(EquilibriumError):
    pass


@dataclass(frozen=True)
class EnergyReport:
    nodes: np.ndarray
    weights: np.ndarray
    cell_lengths: np.ndarray
    energy: float
    modified_robin: float  # the constant value of the total potential
    residual_sup: float

    def as_measure(self) -> DiscreteMeasure:
        return DiscreteMeasure(
            support=tuple(complex(z) for z in self.nodes),
            weights=tuple(float(w) for w in self.weights),
            plane="z",
        )


def _phi(z: complex) -> complex:
    w = cmath.sqrt(z - 1) * cmath.sqrt(z + 1)
    zeta = z + w
    if abs(zeta) < 1:
        zeta = z - w
    return zeta


def interaction_kernel(z: complex, t: complex) -> float:
    """K(z, t) for distinct points off the segment [-1, 1]."""
    return float(
        -2 * math.log(abs(complex(z) - complex(t)))
        + math.log(abs(1 - _phi(z) * _phi(t)))
    )


def external_field(z: complex) -> float:
    return math.log(abs(_phi(z)))


def potential(measure: DiscreteMeasure, z: complex) -> float:
    """Total potential P(z) = \\int K(z, t) dmu(t) + V(z) of a discrete
    measure."""
    total = 0.0
    for t, w in zip(measure.support, measure.weights):
        total += w * interaction_kernel(z, complex(t))
    return total + external_field(z)


def potential_energy(measure: DiscreteMeasure, self_energy: bool = False) -> float:
    """J(mu) for a discrete measure (off-diagonal pairs only unless
    ``self_energy``, since point masses have infinite self-interaction)."""
    pts = [complex(t) for t in measure.support]
    w = np.asarray(measure.weights)
    total = 0.0
    for i in range(len(pts)):
        for j in range(len(pts)):
            if i == j and not self_energy:
                continue
            total += w[i] * w[j] * interaction_kernel(pts[i], pts[j])
    return float(total + 2 * np.dot(w, [external_field(t) for t in pts]))


def _cells(arc: np.ndarray, n: int):
    """Split a polyline into n equal-arclength cells; returns (midpoints,
    cell endpoints as (start, end) complex pairs, lengths)."""
    arc = np.asarray(arc, dtype=complex)
    seg = np.abs(np.diff(arc))
    s = np.concatenate([[0.0], np.cumsum(seg)])
    total = s[-1]
    if total == 0:
        raise EquilibriumError("arc has zero length")
    bounds = np.linspace(0.0, total, n + 1)
    pos = np.interp(bounds, s, np.arange(len(arc)))
    verts = np.interp(pos, np.arange(len(arc)), arc.real) + 1j * np.interp(
        pos, np.arange(len(arc)), arc.imag
    )
    mids_s = (bounds[:-1] + bounds[1:]) / 2
    posm = np.interp(mids_s, s, np.arange(len(arc)))
    mids = np.interp(posm, np.arange(len(arc)), arc.real) + 1j * np.interp(
        posm, np.arange(len(arc)), arc.imag
    )
    lengths = np.diff(bounds)
    cells = list(zip(verts[:-1], verts[1:]))
    return mids, cells, lengths


def _log_cell_integral(z: complex, a: complex, b: complex) -> float:
    """Exact \\int_cell -2 log|z - t| |dt| over the straight cell [a, b]."""
    L = abs(b - a)
    if L == 0:
        return 0.0
    e = (b - a) / L
    d = (z - a) / e
    xi, eta = d.real, abs(d.imag)

    def anti(u):
        du = u - xi
        r2 = du * du + eta * eta
        if r2 == 0:
            return -2 * u
        val = du * math.log(r2) - 2 * u
        if eta > 0:
            val += 2 * eta * math.atan(du / eta)
        return val

    return -(anti(L) - anti(0.0))


def solve_equilibrium(arc, n: int = 400, interior_fraction: float = 0.9) -> EnergyReport:
    """Equilibrium measure of the kernel-plus-field problem on the arc.

    ``arc`` is a polyline (sequence of complex points) staying off [-1, 1].
    The density is piecewise constant on n equal-arclength cells.  The
    residual is the sup over interior cell midpoints of the deviation of the
    honestly re-evaluated total potential from its weighted mean.
    """
    mids, cells, lengths = _cells(np.asarray(arc, dtype=complex), n)
    phis = np.asarray([_phi(z) for z in mids])
    logdiff = np.abs(mids[:, None] - mids[None, :])
    np.fill_diagonal(logdiff, 1.0)
    g = -2 * np.log(logdiff) + np.log(np.abs(1 - phis[:, None] * phis[None, :]))
    # lumped diagonal: cell-average of -2 log|z - t| at the midpoint
    np.fill_diagonal(
        g,
        2 * (1 - np.log(lengths / 2)) + np.log(np.abs(1 - phis * phis)),
    )
    v = np.log(np.abs(phis))

    # stationarity: G w + v = c 1 on the support, sum w = 1
    sys = np.zeros((n + 1, n + 1))
    sys[:n, :n] = g
    sys[:n, n] = -1.0
    sys[n, :n] = 1.0
    rhs = np.concatenate([-v, [1.0]])
    sol = np.linalg.solve(sys, rhs)
    w = sol[:n]
    c = float(sol[n])
    if np.any(w < 0):
        w, c = _projected_gradient(g, v, w)

    energy = float(w @ g @ w + 2 * v @ w)

    # honest residual: piecewise-constant density, exact log integrals
    lo = int(n * (1 - interior_fraction) / 2)
    hi = n - lo
    pvals = []
    for i in range(lo, hi):
        z = mids[i]
        p = 0.0
        for j in range(n):
            dens = w[j] / lengths[j]
            a, b = cells[j]
            p += dens * _log_cell_integral(z, a, b)
            p += w[j] * math.log(abs(1 - phis[i] * phis[j]))
        p += v[i]
        pvals.append(p)
    pvals = np.asarray(pvals)
    wmid = w[lo:hi]
    ref = float(np.average(pvals, weights=np.maximum(wmid, 1e-300)))
    residual = float(np.max(np.abs(pvals - ref)))

    return EnergyReport(
        nodes=mids,
        weights=w,
        cell_lengths=lengths,
        energy=energy,
        modified_robin=c,
        residual_sup=residual,
    )


def _projected_gradient(g, v, w0, max_iter=5000, tol=1e-12):
    """Minimize w^T G w + 2 v^T w over the probability simplex."""
    n = len(v)
    w = np.maximum(np.asarray(w0), 0.0)
    if w.sum() == 0:
        w = np.full(n, 1.0 / n)
    w /= w.sum()
    for _ in range(max_iter):
        grad = 2 * (g @ w + v)
        # project gradient onto the simplex tangent at w (active set: w > 0)
        active = w > 0
        gbar = grad - grad[active].mean()
        direction = -gbar
        direction[~active & (direction < 0)] = 0.0
        if np.max(np.abs(direction)) < tol:
            break
        # exact line search for the quadratic along the direction
        gd = g @ direction
        denom = direction @ gd
        step = -(grad @ direction) / (2 * denom) if denom > 0 else 1e-3
        step = max(step, 0.0)
        # stay feasible
        shrink = np.where(direction < 0, -w / np.minimum(direction, -1e-300), np.inf)
        step = min(step, float(np.min(shrink)))
        if step <= 0:
            break
        w = np.maximum(w + step * direction, 0.0)
        w /= w.sum()
    grad = 2 * (g @ w + v)
    c = float(grad[w > 0].mean() / 2)
    return w, c


def measure_distance(mu: DiscreteMeasure, ref: DiscreteMeasure, band: float | None = None) -> float:
    """Distance between a discrete measure and a reference measure supported
    on (or near) a real segment of the base plane.

    Both measures are pushed to the z plane; the reference segment is the
    real hull of the reference support.  The value is the Kolmogorov-Smirnov
    distance of the projected distribution functions plus the ``mu`` mass
    sitting farther than ``band`` from the segment (default: 10% of its
    length).  Identical measures give 0; a point mass at the midpoint against
    the uniform measure gives 0.5.
    """
    zs = mu.projected_z()
    zr = ref.projected_z()
    a, b = float(np.min(zr.real)), float(np.max(zr.real))
    if b <= a:
        raise EquilibriumError("reference measure must span a nondegenerate segment")
    if band is None:
        band = 0.1 * (b - a)

    wm = np.asarray(mu.weights)
    wr = np.asarray(ref.weights)
    proj = np.clip(zs.real, a, b)
    off = np.abs(zs - proj)
    stray = float(wm[off > band].sum())

    xm = proj
    xr = np.clip(zr.real, a, b)
    grid = np.unique(np.concatenate([xm, xr]))
    cdf_m = np.array([wm[xm <= x].sum() for x in grid])
    cdf_r = np.array([wr[xr <= x].sum() for x in grid])
    ks = float(np.max(np.abs(cdf_m - cdf_r)))
    return ks + stray
