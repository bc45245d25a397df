"""Green functions with pole at infinity, Robin constants, and the
S-property residual.

Two independent routes to the same quantities:

* the complexified derivative sqrt(V/B) of the Green function of an extremal
  continuum, integrated along routed paths (shared kernels in
  :mod:`hplab._kernels`); and
* a boundary-integral (Symm-type) solve for the equilibrium density of a
  parametrized arc, with the double-cover cosine substitution and spectral
  quadrature for the logarithmic kernel.

Closed forms for segments and circular arcs serve as oracles and as
high-accuracy Green functions for non-extremal comparison arcs.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from ._kernels import integrate_path, path_integral, _GL_X, _GL_W
from .scurve import QuadraticDifferential


class GreenError(RuntimeError):
    pass


class InadmissibleCandidate(GreenError):
    """Comparison arc does not pass through the required points."""


@dataclass(frozen=True)
class GreenEvaluation:
    points: tuple
    values: tuple
    robin: float
    capacity: float


@dataclass(frozen=True)
class RobinComparison:
    labels: tuple
    robins: tuple
    capacities: tuple
    extremal_label: str


# ---------------------------------------------------------------------------
# Green values from the quadratic differential


def _route(anchor: complex, target: complex, roots, clearance: float = 0.08):
    """Polyline from a root ``anchor`` to ``target`` detouring around other
    roots that sit close to the straight segment."""
    anchor = complex(anchor)
    target = complex(target)
    d = target - anchor
    L = abs(d)
    if L == 0:
        return [anchor, target]
    detours = []
    for r in roots:
        r = complex(r)
        if abs(r - anchor) < 1e-12 or abs(r - target) < 1e-12:
            continue
        u = ((r - anchor) / d).real
        if 0.0 < u < 1.0:
            dist = abs(anchor + u * d - r)
            margin = clearance * min(L, 1.0 + abs(r - anchor))
            if dist < margin:
                detours.append((u, r + 1j * d / L * margin))
    detours.sort(key=lambda t: t[0])
    return [anchor] + [w for _, w in detours] + [target]


def green_eval(qd: QuadraticDifferential, points) -> GreenEvaluation:
    """Green function of the extremal continuum of ``qd`` (pole at infinity)
    at the given points, together with the Robin constant.

    Each value is |Re \\int sqrt(V/B)| from the nearest endpoint along a
    routed path; the Robin constant comes from Richardson extrapolation of
    g(R) - log R over R = 1e3, 1e4, 1e5.
    """
    pts = [complex(z) for z in points]
    values = tuple(float(v) for v in _green_many(qd, pts))
    gamma = robin_gamma(qd)
    return GreenEvaluation(
        points=tuple(pts), values=values, robin=gamma, capacity=math.exp(-gamma)
    )


def _green_many(qd: QuadraticDifferential, pts):
    num = list(qd.numerator_roots)
    den = list(qd.denominator_roots)
    roots = num + den
    out = np.empty(len(pts))
    for i, z in enumerate(pts):
        anchor = min(den, key=lambda r: abs(z - r))
        path = _route(anchor, z, roots)
        val, _ = integrate_path(num, den, path)
        out[i] = abs(val.real)
    return out


def robin_gamma(qd: QuadraticDifferential) -> float:
    """Robin constant lim (g(z) - log|z|), extrapolated in 1/R."""
    num = list(qd.numerator_roots)
    den = list(qd.denominator_roots)
    roots = num + den
    anchor = den[0]
    radii = (1e3, 1e4, 1e5)
    ys = []
    for R in radii:
        z = complex(R, R * 1e-3)  # slightly off-axis to dodge collinear roots
        path = _route(anchor, z, roots)
        val, _ = integrate_path(num, den, path)
        ys.append(abs(val.real) - math.log(abs(z)))
    rs = np.asarray(radii)
    a = np.vstack([np.ones(3), 1 / rs, 1 / rs**2]).T
    coef = np.linalg.solve(a, np.asarray(ys))
    return float(coef[0])


def capacity(qd: QuadraticDifferential) -> float:
    return math.exp(-robin_gamma(qd))


# ---------------------------------------------------------------------------
# Boundary-integral route (Symm equation with cosine double cover)


def _kress_weights(n: int) -> np.ndarray:
    """w[k] = quadrature weight for the kernel log(4 sin^2(theta/2)) at grid
    offset theta = 2 pi k / n, exact for trigonometric polynomials."""
    k = np.arange(n)
    theta = 2 * math.pi * k / n
    m = np.arange(1, n // 2)
    w = np.cos(np.outer(theta, m)) / m
    w = w.sum(axis=1) + np.cos(n // 2 * theta) / n
    return -(4 * math.pi / n) * w


def capacity_robin(curve, dcurve, n: int = 256):
    """Logarithmic capacity and Robin constant of the analytic arc
    ``curve(x)``, x in [-1, 1], by the Symm integral equation.

    The cosine substitution Z(theta) = curve(cos theta) double-covers the arc
    and absorbs the endpoint density singularity; the periodic logarithmic
    kernel is integrated with spectral (Kress) weights.  Returns
    (capacity, robin, nodes, density) where ``density`` is the equilibrium
    density with respect to d(theta)/(2 pi) on the double cover.
    """
    if n % 2:
        raise ValueError("n must be even")
    theta = 2 * math.pi * (np.arange(n) + 0.5) / n
    x = np.cos(theta)
    z = np.asarray([complex(curve(xi)) for xi in x])
    dz = np.asarray([complex(dcurve(xi)) for xi in x])

    wk = _kress_weights(n)

    # grid offsets: theta_i - theta_j = 2 pi (i - j)/n ; theta_i + theta_j =
    # 2 pi (i + j + 1)/n, both multiples of 2 pi / n
    idx = np.arange(n)
    diff = (idx[:, None] - idx[None, :]) % n
    summ = (idx[:, None] + idx[None, :] + 1) % n

    dmat = np.abs(z[:, None] - z[None, :])
    sin_d = np.abs(2 * np.sin((theta[:, None] - theta[None, :]) / 2))
    sin_s = np.abs(2 * np.sin((theta[:, None] + theta[None, :]) / 2))
    smooth = np.empty((n, n))
    off = ~np.eye(n, dtype=bool) & (summ != 0)
    with np.errstate(divide="ignore", invalid="ignore"):
        smooth[off] = np.log(dmat[off] / (sin_d[off] * sin_s[off]))
    # tau -> theta and tau -> -theta limits: log(|curve'(cos theta)| / 2)
    lim = np.log(np.abs(dz) * np.abs(np.sin(theta)) / (2 * np.abs(np.sin(theta))))
    ii = np.where(~off)
    smooth[ii] = lim[ii[0]]

    mat = 0.5 * wk[diff] + 0.5 * wk[summ] + (2 * math.pi / n) * smooth

    sys = np.zeros((n + 1, n + 1))
    sys[:n, :n] = mat
    sys[:n, n] = 1.0
    sys[n, :n] = 2 * math.pi / n
    rhs = np.zeros(n + 1)
    rhs[n] = 1.0
    sol = np.linalg.solve(sys, rhs)
    density = sol[:n]
    gamma = sol[n]
    return math.exp(-gamma), gamma, z, density


def capacity_robin_multi(curves, dcurves, n: int = 128):
    """Capacity and Robin constant of a disjoint union of analytic arcs.

    Each arc is parametrized over [-1, 1] as in :func:`capacity_robin`; the
    self-interaction blocks use the spectral Kress treatment, the
    cross-component blocks plain trapezoid weights (the kernel is smooth
    there).  Returns (capacity, robin).
    """
    if n % 2:
        raise ValueError("n must be even")
    k = len(curves)
    theta = 2 * math.pi * (np.arange(n) + 0.5) / n
    x = np.cos(theta)
    zs = [np.asarray([complex(c(xi)) for xi in x]) for c in curves]
    dzs = [np.asarray([complex(dc(xi)) for xi in x]) for dc in dcurves]

    wk = _kress_weights(n)
    idx = np.arange(n)
    diff = (idx[:, None] - idx[None, :]) % n
    summ = (idx[:, None] + idx[None, :] + 1) % n
    sin_d = np.abs(2 * np.sin((theta[:, None] - theta[None, :]) / 2))
    sin_s = np.abs(2 * np.sin((theta[:, None] + theta[None, :]) / 2))

    big = np.zeros((k * n + 1, k * n + 1))
    for a in range(k):
        for b in range(k):
            blk = np.s_[a * n:(a + 1) * n, b * n:(b + 1) * n]
            if a == b:
                dmat = np.abs(zs[a][:, None] - zs[a][None, :])
                smooth = np.empty((n, n))
                off = ~np.eye(n, dtype=bool) & (summ != 0)
                with np.errstate(divide="ignore", invalid="ignore"):
                    smooth[off] = np.log(dmat[off] / (sin_d[off] * sin_s[off]))
                lim = np.log(np.abs(dzs[a]) / 2)
                ii = np.where(~off)
                smooth[ii] = lim[ii[0]]
                big[blk] = 0.5 * wk[diff] + 0.5 * wk[summ] + (2 * math.pi / n) * smooth
            else:
                big[blk] = (2 * math.pi / n) * np.log(
                    np.abs(zs[a][:, None] - zs[b][None, :])
                )
    big[: k * n, k * n] = 1.0
    big[k * n, : k * n] = 2 * math.pi / n
    rhs = np.zeros(k * n + 1)
    rhs[k * n] = 1.0
    sol = np.linalg.solve(big, rhs)
    gamma = float(sol[k * n])
    return math.exp(-gamma), gamma


def segment_capacity_robin(a: float, b: float, n: int = 256):
    m, h = (a + b) / 2, (b - a) / 2
    cap, gamma, z, rho = capacity_robin(lambda x: m + h * x, lambda x: h, n)
    return cap, gamma


# ---------------------------------------------------------------------------
# Closed forms: segment and circular arc


def segment_green(a: float, b: float, z: complex) -> float:
    """Green function of the segment [a, b] with pole at infinity."""
    m, h = (a + b) / 2, (b - a) / 2
    u = (complex(z) - m) / h
    w = cmath.sqrt(u - 1) * cmath.sqrt(u + 1)
    return abs((cmath.log(u + w)).real)


@dataclass(frozen=True)
class CircularArc:
    """Circular arc from ``a`` to ``b`` bulging by ``sagitta`` (signed
    maximal deviation from the chord, positive = toward +i side of a->b)."""

    a: complex
    b: complex
    sagitta: float

    def __post_init__(self):
        if self.sagitta == 0:
            raise InadmissibleCandidate("zero sagitta is the chord, not an arc")
        chord = abs(self.b - self.a)
        if abs(self.sagitta) >= chord * 50:
            raise InadmissibleCandidate("sagitta out of range")

    @property
    def center_radius(self):
        a, b, s = complex(self.a), complex(self.b), self.sagitta
        chord = abs(b - a)
        # sagitta s and half-chord c give radius r = (c^2 + s^2) / (2 s)
        c = chord / 2
        r = (c * c + s * s) / (2 * abs(s))
        mid = (a + b) / 2
        nrm = 1j * (b - a) / chord * math.copysign(1.0, s)
        center = mid + nrm * (abs(s) - r)
        return center, r

    def parametrization(self):
        """(curve, dcurve) over x in [-1, 1] by angle interpolation."""
        center, r = self.center_radius
        pa = cmath.phase(complex(self.a) - center)
        pb = cmath.phase(complex(self.b) - center)
        # go the short way through the bulge apex
        apex = (complex(self.a) + complex(self.b)) / 2 + 1j * (
            complex(self.b) - complex(self.a)
        ) / abs(self.b - self.a) * self.sagitta
        pm = cmath.phase(apex - center)
        # unwrap pa -> pm -> pb consistently
        d1 = (pm - pa + math.pi) % (2 * math.pi) - math.pi
        d2 = (pb - pm + math.pi) % (2 * math.pi) - math.pi
        span = d1 + d2

        def curve(x):
            return center + r * cmath.exp(1j * (pa + span * (x + 1) / 2))

        def dcurve(x):
            return 1j * r * span / 2 * cmath.exp(1j * (pa + span * (x + 1) / 2))

        return curve, dcurve

    def samples(self, n: int = 513) -> np.ndarray:
        curve, _ = self.parametrization()
        return np.asarray([curve(x) for x in np.linspace(-1, 1, n)])

    def green(self, z: complex) -> float:
        """Exact Green function (pole at infinity) of the arc complement.

        The Moebius map T(t) = (t - a)/(t - b) sends the arc to a ray from 0
        through e^{i beta} to infinity; the square root with the cut along
        that ray opens the complement onto a half plane, where the Green
        function is explicit.
        """
        a, b = complex(self.a), complex(self.b)
        center, r = self.center_radius
        apex = (a + b) / 2 + 1j * (b - a) / abs(b - a) * self.sagitta
        beta = cmath.phase((apex - a) / (apex - b))
        z = complex(z)
        if z == b:
            return 0.0
        t = (z - a) / (z - b)
        # rotate the ray onto the positive axis, cut = [0, inf)
        u = t * cmath.exp(-1j * beta)
        # sqrt with cut along [0, inf): sqrt(u) = exp(log(u)/2) with arg in (0, 2pi)
        ang = cmath.phase(u) % (2 * math.pi)
        s = math.sqrt(abs(u)) * cmath.exp(0.5j * ang)
        u0 = cmath.exp(-1j * beta)  # image of the pole z = infinity
        ang0 = cmath.phase(u0) % (2 * math.pi)
        s0 = math.sqrt(abs(u0)) * cmath.exp(0.5j * ang0)
        val = abs(cmath.log(abs((s - s0.conjugate()) / (s - s0))))
        return val

    def robin(self) -> float:
        """Robin constant by Richardson extrapolation of g(R) - log R."""
        rs = np.asarray([1e3, 1e4, 1e5])
        ys = np.asarray([self.green(complex(R, R * 1e-3)) - math.log(abs(complex(R, R * 1e-3))) for R in rs])
        a = np.vstack([np.ones(3), 1 / rs, 1 / rs**2]).T
        return float(np.linalg.solve(a, ys)[0])


# ---------------------------------------------------------------------------
# S-property


def s_property_residual(
    green_fn,
    arc_points,
    h: float = 1e-5,
    interior_fraction: float = 0.9,
    n_samples: int = 40,
) -> float:
    """sup over interior arc samples of |d g / d n+  -  d g / d n-|.

    One-sided normal derivatives are formed from the second-order stencil
    (4 g(h) - g(2h)) / (2 h) on each side; the first and last (1 -
    interior_fraction)/2 of the arc are excluded to stay away from the
    endpoint square-root behavior.
    """
    pts = np.asarray(list(arc_points), dtype=complex)
    m = len(pts)
    lo = int(m * (1 - interior_fraction) / 2)
    hi = m - lo
    idx = np.linspace(lo, hi - 1, min(n_samples, hi - lo)).astype(int)
    worst = 0.0
    for i in idx:
        j0, j1 = max(i - 1, 0), min(i + 1, m - 1)
        tangent = pts[j1] - pts[j0]
        tangent /= abs(tangent)
        nrm = 1j * tangent
        z = pts[i]
        dp = (4 * green_fn(z + h * nrm) - green_fn(z + 2 * h * nrm)) / (2 * h)
        dm = (4 * green_fn(z - h * nrm) - green_fn(z - 2 * h * nrm)) / (2 * h)
        worst = max(worst, abs(dp - dm))
    return worst


def qd_green_fn(qd: QuadraticDifferential):
    """Point-wise Green evaluator backed by the path-integral kernel."""

    def g(z: complex) -> float:
        return float(_green_many(qd, [complex(z)])[0])

    return g


# ---------------------------------------------------------------------------
# Ranking extremal vs comparison arcs


def robin_compare(qd: QuadraticDifferential, candidates, n: int = 512) -> RobinComparison:
    """Rank the extremal continuum of ``qd`` against candidate arcs joining
    the same endpoints; every candidate must contain the endpoint set.

    Robin constants of candidates come from the boundary-integral solve on
    their parametrizations; the extremal set's from the path-integral route.
    The extremal set must come out with the largest Robin constant (smallest
    capacity), so it is listed first.
    """
    den = [complex(r) for r in qd.denominator_roots]
    labels = ["extremal"]
    robins = [robin_gamma(qd)]
    for i, cand in enumerate(candidates):
        for r in den:
            if min(abs(r - complex(p)) for p in cand.samples()) > 1e-9 * max(
                1.0, abs(r)
            ):
                raise InadmissibleCandidate(
                    f"candidate {i} misses the required point {r}"
                )
        curve, dcurve = cand.parametrization()
        _, gamma, _, _ = capacity_robin(curve, dcurve, n)
        labels.append(f"candidate-{i}")
        robins.append(gamma)
    order = np.argsort(robins)[::-1]
    labels = tuple(labels[i] for i in order)
    robins = tuple(float(robins[i]) for i in order)
    return RobinComparison(
        labels=labels,
        robins=robins,
        capacities=tuple(math.exp(-g) for g in robins),
        extremal_label=labels[0],
    )
