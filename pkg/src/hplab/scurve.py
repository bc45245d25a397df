"""Extremal compacta of disjoint-arc type through conjugate point pairs.

The maximal-Robin-constant compact through 2p conjugate-paired points
consists of p pairwise disjoint analytic arcs, each joining a point to its
conjugate.  It is the critical graph of the quadratic differential
-Q(t) dt^2 with Q = V/B, where B is monic with the prescribed points as
simple roots and V is monic of degree 2p - 2 whose p - 1 roots are all
double.  Writing V = W^2 with W monic of degree p - 1, the complexified
Green derivative is W/sqrt(B), and the unknown roots of W are fixed by the
period conditions

* Re \\oint W/sqrt(B) = 0 around each of the first p - 1 cuts (evaluated as
  Re \\int between the pair's two points), and
* Re \\int W/sqrt(B) = 0 along connectors between consecutive pairs,

which this module solves by damped Newton iteration before tracing the
trajectories to produce the arcs themselves.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from ._kernels import integrate_path


class SCurveError(RuntimeError):
    pass


class NewtonDiverged(SCurveError):
    pass


class NotGeneralPosition(SCurveError):
    pass


class TrajectoryEscaped(SCurveError):
    pass


class EndpointMismatch(SCurveError):
    pass


class SelfIntersection(SCurveError):
    pass


@dataclass(frozen=True)
class QuadraticDifferential:
    """-Q dt^2 with Q = V/B; ``numerator_roots`` lists the roots of V with
    multiplicity (each double zero appears twice), ``denominator_roots`` the
    prescribed endpoints."""

    numerator_roots: tuple
    denominator_roots: tuple
    residual: float = 0.0

    @property
    def double_zeros(self) -> tuple:
        """The distinct roots of V (roots of W)."""
        return tuple(self.numerator_roots[::2])

    def q_at(self, t: complex) -> complex:
        num = 1.0 + 0j
        for r in self.numerator_roots:
            num *= t - r
        den = 1.0 + 0j
        for r in self.denominator_roots:
            den *= t - r
        return num / den


@dataclass(frozen=True)
class CompactSet:
    """Traced extremal compact: one sampled arc per conjugate pair.

    ``pairing`` maps each arc to its (start, end) endpoints; ``location``
    tags the coordinate chart the points live in."""

    arcs: tuple  # tuple of complex ndarrays
    endpoints: tuple
    junctions: tuple  # the double zeros (off the arcs in general position)
    pairing: tuple = ()
    location: str = "zeta-plane"

    def all_points(self) -> np.ndarray:
        return np.concatenate([np.asarray(a) for a in self.arcs])


@dataclass(frozen=True)
class AdmissibilityReport:
    on_second_sheet: bool
    complement_connected: bool
    single_valued: bool

    def all_ok(self) -> bool:
        return self.on_second_sheet and self.complement_connected and self.single_valued


def _scale_of(points) -> float:
    pts = np.asarray(points, dtype=complex)
    if len(pts) < 2:
        return 1.0
    return float(max(abs(a - b) for a in pts for b in pts))


def _conj_pairs(points, tol):
    """Group a conjugate-closed point set into (upper, lower) pairs sorted by
    real part; real points are rejected (degenerate pair)."""
    pts = [complex(p) for p in points]
    upper = sorted((p for p in pts if p.imag > tol), key=lambda z: z.real)
    lower = {complex(p) for p in pts if p.imag < -tol}
    if [p for p in pts if abs(p.imag) <= tol]:
        raise NotGeneralPosition("real prescribed points form a degenerate pair")
    pairs = []
    for u in upper:
        c = u.conjugate()
        match = min(lower, key=lambda z: abs(z - c), default=None)
        if match is None or abs(match - c) > tol * 10 + 1e-13:
            raise NotGeneralPosition("point set is not closed under conjugation")
        lower.discard(match)
        pairs.append((u, match))
    if lower:
        raise NotGeneralPosition("point set is not closed under conjugation")
    return pairs


def route_around(start: complex, end: complex, roots, clearance: float = 0.08):
    """Polyline from ``start`` to ``end`` detouring around interior roots
    that sit close to the straight segment."""
    start, end = complex(start), complex(end)
    d = end - start
    L = abs(d)
    if L == 0:
        return [start, end]
    detours = []
    for r in roots:
        r = complex(r)
        if abs(r - start) < 1e-12 or abs(r - end) < 1e-12:
            continue
        u = ((r - start) / d).real
        if 0.0 < u < 1.0:
            dist = abs(start + u * d - r)
            margin = clearance * min(L, 1.0 + abs(r - start))
            if dist < margin:
                detours.append((u, r + 1j * d / L * margin))
    detours.sort(key=lambda t: t[0])
    return [start] + [w for _, w in detours] + [end]


def _period_residual(w_roots, pairs, den_roots):
    """Stacked real parts of the cut periods (first p - 1 pairs) and the
    consecutive-pair connectors."""
    num = [r for w in w_roots for r in (w, w)]
    allr = list(num) + list(den_roots)
    res = []
    for u, l in pairs[:-1]:
        val, _ = integrate_path(num, den_roots, route_around(u, l, allr))
        res.append(val.real)
    for (u1, _), (u2, _) in zip(pairs[:-1], pairs[1:]):
        val, _ = integrate_path(num, den_roots, route_around(u1, u2, allr))
        res.append(val.real)
    return np.asarray(res)


def chebotarev_solve(points, tol: float = 1e-11, max_iter: int = 60) -> QuadraticDifferential:
    """Quadratic differential of the extremal disjoint-arc compact through a
    conjugate-closed set of 2p non-real points in general position.

    p = 1 needs no numerator; for p >= 2 the p - 1 double zeros are solved
    from the period conditions by damped Newton iteration with a finite
    difference Jacobian.
    """
    pts = [complex(p) for p in points]
    if len(pts) % 2 != 0 or len(pts) < 2:
        raise NotGeneralPosition("need an even number (>= 2) of points")
    if len(set(pts)) != len(pts):
        raise NotGeneralPosition("points must be distinct")
    p = len(pts) // 2
    if p == 1:
        return QuadraticDifferential(
            numerator_roots=(), denominator_roots=tuple(pts), residual=0.0
        )

    scale = _scale_of(pts)
    pairs = _conj_pairs(pts, 1e-12 * scale)
    m = p - 1
    # initial double zeros between consecutive pair abscissae
    centers = [u.real for u, _ in pairs]
    v0 = np.asarray(
        [(centers[j] + centers[j + 1]) / 2 for j in range(m)], dtype=complex
    )
    x = np.concatenate([v0.real, v0.imag])

    def unpack(xx):
        return xx[:m] + 1j * xx[m:]

    fx = _period_residual(unpack(x), pairs, pts)
    for _ in range(max_iter):
        if np.max(np.abs(fx)) < tol:
            break
        h = 1e-7 * scale
        jac = np.empty((2 * m, 2 * m))
        for c in range(2 * m):
            xp = x.copy()
            xp[c] += h
            jac[:, c] = (_period_residual(unpack(xp), pairs, pts) - fx) / h
        try:
            dx = np.linalg.solve(jac, -fx)
        except np.linalg.LinAlgError as exc:
            raise NewtonDiverged("singular Jacobian in period solve") from exc
        lam, base = 1.0, np.max(np.abs(fx))
        for _ in range(30):
            xt = x + lam * dx
            ft = _period_residual(unpack(xt), pairs, pts)
            if np.max(np.abs(ft)) < base:
                x, fx = xt, ft
                break
            lam /= 2
        else:
            raise NewtonDiverged("line search stalled in period solve")
    res = float(np.max(np.abs(fx)))
    if res >= tol:
        raise NewtonDiverged(f"period residual {res:.3e} above {tol:.3e}")
    w_roots = unpack(x)
    for w in w_roots:
        if min(abs(w - a) for a in pts) < 1e-8 * scale:
            raise NotGeneralPosition("double zero collided with an endpoint")
    num = tuple(r for w in w_roots for r in (w, w))
    return QuadraticDifferential(
        numerator_roots=num, denominator_roots=tuple(pts), residual=res
    )


def _launch_angle(qd: QuadraticDifferential, a: complex) -> float:
    """Departure direction of the single trajectory leaving a simple pole:
    the local expansion Q ~ c/(t - a) forces theta = pi - arg c."""
    c = 1.0 + 0j
    for r in qd.numerator_roots:
        c *= a - r
    for r in qd.denominator_roots:
        if abs(r - a) > 1e-14:
            c /= a - r
    return math.pi - cmath.phase(c)


def trace_trajectory(
    qd: QuadraticDifferential,
    start: complex,
    max_length: float | None = None,
    step_scale: float = 0.05,
    snap_tol: float | None = None,
    escape_radius: float | None = None,
):
    """Trace the trajectory of -Q dt^2 leaving the endpoint ``start``.

    Follows the unit-speed field along which sqrt(Q) dt is purely imaginary,
    with the branch of sqrt(Q) carried continuously.  Stops when another
    endpoint is reached (snapped exactly) and returns (arc, endpoint); raises
    TrajectoryEscaped / EndpointMismatch / NotGeneralPosition otherwise.
    """
    den = list(qd.denominator_roots)
    dz = list(qd.double_zeros)
    scale = _scale_of(den)
    if max_length is None:
        max_length = 50 * scale
    if snap_tol is None:
        snap_tol = 1e-9 * scale
    if escape_radius is None:
        escape_radius = 100 * scale + max(abs(r) for r in den + dz or den)

    theta = _launch_angle(qd, start)
    eps = 1e-10 * scale
    z = start + eps * cmath.exp(1j * theta)

    w_prev = [0j]

    def field(t):
        w = cmath.sqrt(qd.q_at(t))
        if w_prev[0] != 0 and (w * w_prev[0].conjugate()).real < 0:
            w = -w
        w_prev[0] = w
        return 1j * abs(w) / w

    f0 = field(z)
    if (f0 * cmath.exp(-1j * theta)).real < 0:
        w_prev[0] = -w_prev[0]

    pts = [complex(start), z]
    length = eps
    for _ in range(2_000_000):
        dmin = min(abs(z - r) for r in den)
        if dmin < snap_tol or (length > 10 * snap_tol and dmin < step_scale * scale * 1e-3):
            target = min(den, key=lambda r: abs(z - r))
            if abs(target - start) > 1e-14 and dmin < 1e-4 * scale:
                pts.append(complex(target))
                return np.asarray(pts), target
        if dz:
            dj = min(abs(z - r) for r in dz)
            if dj < 1e-8 * scale and length > 1e-6 * scale:
                raise NotGeneralPosition(
                    "trajectory ran into a double zero (separatrix configuration)"
                )
            dmin = min(dmin, dj)
        h = step_scale * min(max(dmin, 1e-12), 0.5 * scale)
        state = w_prev[0]
        k1 = field(z)
        w_prev[0] = state
        k2 = field(z + 0.5 * h * k1)
        w_prev[0] = state
        k3 = field(z + 0.5 * h * k2)
        w_prev[0] = state
        k4 = field(z + h * k3)
        w_prev[0] = state
        step = h * (k1 + 2 * k2 + 2 * k3 + k4) / 6
        z = z + step
        field(z)  # advance the branch state to the accepted point
        length += abs(step)
        pts.append(z)
        if abs(z) > escape_radius:
            raise TrajectoryEscaped(
                f"trajectory from {start} escaped past |t| = {escape_radius:.3g}"
            )
        if length > max_length:
            raise EndpointMismatch(
                f"trajectory from {start} exceeded length {max_length:.3g} without landing"
            )
    raise EndpointMismatch("step limit exhausted")


def trace_compact(qd: QuadraticDifferential, step_scale: float = 0.02,
                  location: str = "zeta-plane") -> CompactSet:
    """Trace one arc per conjugate pair (from the upper point) and verify the
    within-pair landing and pairwise disjointness."""
    scale = _scale_of(qd.denominator_roots)
    den = [complex(r) for r in qd.denominator_roots]
    if len(den) == 2:
        starts = [den[0]]
    else:
        starts = [u for u, _ in _conj_pairs(den, 1e-12 * scale)]
    arcs, pairing = [], []
    landed = set()
    for a in starts:
        arc, target = trace_trajectory(qd, a, step_scale=step_scale)
        arcs.append(arc)
        pairing.append((a, target))
        landed.update((a, target))
    missing = [r for r in den if r not in landed]
    if missing:
        raise EndpointMismatch(f"endpoints {missing} are not covered by any arc")
    comp = CompactSet(
        arcs=tuple(arcs),
        endpoints=tuple(den),
        junctions=qd.double_zeros,
        pairing=tuple(pairing),
        location=location,
    )
    _check_disjoint(comp, scale)
    return comp


def _check_disjoint(comp: CompactSet, scale: float):
    arcs = [np.asarray(a) for a in comp.arcs]
    for i in range(len(arcs)):
        for j in range(i + 1, len(arcs)):
            d = np.abs(arcs[i][:, None] - arcs[j][None, :])
            if float(d.min()) < 1e-3 * scale:
                raise SelfIntersection(f"arcs {i} and {j} come within 1e-3 of touching")


def admissibility_check(comp: CompactSet, tol: float = 1e-12) -> AdmissibilityReport:
    """Structural admissibility of a traced compact in the uniformizing disk:
    all points strictly inside the unit circle, complement connected (true
    for pairwise disjoint simple arcs; a closed arc separates), and each
    endpoint covered by exactly one arc so the square-root monodromies
    cancel."""
    pts = comp.all_points()
    on_second_sheet = bool(np.all(np.abs(pts) < 1 - tol))
    closed = any(
        abs(np.asarray(a)[0] - np.asarray(a)[-1]) < 1e-12 and len(a) > 2
        for a in comp.arcs
    )
    complement_connected = not closed
    counts = {}
    for a, b in comp.pairing:
        counts[a] = counts.get(a, 0) + 1
        counts[b] = counts.get(b, 0) + 1
    single_valued = bool(comp.pairing) and all(
        counts.get(e, 0) == 1 for e in comp.endpoints
    )
    return AdmissibilityReport(
        on_second_sheet=on_second_sheet,
        complement_connected=complement_connected,
        single_valued=single_valued,
    )


def _point_to_polyline(p: np.ndarray, poly: np.ndarray) -> np.ndarray:
    """Distances from each point of ``p`` to the polyline with vertices
    ``poly`` (exact point-to-segment projection per edge)."""
    a = poly[:-1][None, :]
    b = poly[1:][None, :]
    z = p[:, None]
    d = b - a
    L2 = (d * d.conjugate()).real
    L2 = np.where(L2 == 0, 1.0, L2)
    t = ((z - a) * d.conjugate()).real / L2
    t = np.clip(t, 0.0, 1.0)
    proj = a + t * d
    return np.abs(z - proj).min(axis=1)


def polyline_hausdorff(path_a, path_b) -> float:
    """Hausdorff distance between two polylines (as point sequences),
    measured vertex-to-edge in both directions."""
    a = np.asarray(list(path_a), dtype=complex).reshape(-1)
    b = np.asarray(list(path_b), dtype=complex).reshape(-1)
    return float(max(_point_to_polyline(a, b).max(), _point_to_polyline(b, a).max()))


def hausdorff_distance(pts_a, pts_b) -> float:
    """Symmetric Hausdorff distance between two finite point clouds."""
    a = np.asarray(list(pts_a), dtype=complex).reshape(-1)
    b = np.asarray(list(pts_b), dtype=complex).reshape(-1)
    d = np.abs(a[:, None] - b[None, :])
    return float(max(d.min(axis=1).max(), d.min(axis=0).max()))


def segment_samples(a: complex, b: complex, n: int = 2001) -> np.ndarray:
    t = np.linspace(0.0, 1.0, n)
    return complex(a) + (complex(b) - complex(a)) * t
