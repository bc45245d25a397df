"""Type-I Hermite-Pade systems for the families [1,f], [1,f,f^2], [1,f,f^2,f^3].

For family size k and degree n the solver finds polynomials Q_0..Q_{k-1} of
degree at most n, not all zero, with

    sum_j Q_j(z) f(z)^j = O(z^{-(k-1)(n+1)}),   z -> infinity,

i.e. the coefficients of z^m vanish for -(k-1)(n+1) < m <= n.  That leaves
k(n+1) unknowns against (k-1)(n+1) + n conditions, so the kernel is at least
one-dimensional.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import mpmath as mp

from .series import LaurentGerm, germ_constant


class HermitePadeError(ValueError):
    pass


class InsufficientGermLength(HermitePadeError):
    pass


class OrderShortfall(HermitePadeError):
    """Certified residual order fell short of the (k-1)(n+1) contract; the
    working precision was exhausted."""


class NoConvergence(HermitePadeError):
    pass


def contract_order(k: int, n: int) -> int:
    """Residual decay order guaranteed by the defect-one linear system."""
    return (k - 1) * (n + 1)


@dataclass(frozen=True)
class HPSolution:
    family_size: int
    degree: int
    polys: tuple  # k coefficient vectors, ascending degree, length n+1
    achieved_order: int
    normalization: str
    precision_bits: int
    degenerate_kernel: bool = False
    extra_kernel: tuple = ()


@dataclass(frozen=True)
class ZeroSet:
    roots: tuple
    multiplicities: tuple
    residual_bound: float


@dataclass(frozen=True)
class DiscreteMeasure:
    """Weighted point cloud; ``plane`` records which coordinate the support
    points live in ('z' for sphere points, 'zeta2' for second-sheet points of
    the uniformizing disk)."""

    support: tuple
    weights: tuple
    plane: str = "z"

    def __post_init__(self):
        if len(self.support) != len(self.weights):
            raise ValueError("support and weights must have equal length")
        total = float(sum(self.weights))
        if abs(total - 1.0) > 1e-12:
            raise ValueError(f"weights must sum to 1, got {total}")
        if any(w < 0 for w in self.weights):
            raise ValueError("weights must be nonnegative")

    def projected_z(self) -> np.ndarray:
        """Push forward to the z-plane through the canonical projection."""
        pts = np.asarray([complex(s) for s in self.support])
        if self.plane == "zeta2":
            return (pts + 1 / pts) / 2
        return pts


def _required_len(k: int, n: int) -> int:
    # coefficient of z^m in Q_j f^j reaches germ index i - m <= n + order - 1
    return n + contract_order(k, n)


def hp_type1(germs, n: int, precision_bits: int | None = None) -> HPSolution:
    """Solve the type-I system for the germs of (1, f, ..., f^{k-1}).

    ``germs`` may omit the trivial leading germ of 1; pass either k or k-1
    entries.  Normalization: the trailing nonzero coefficient of the first
    nonzero polynomial equals 1, which pins the projective scale so repeated
    runs are bit-for-bit identical.
    """
    germs = list(germs)
    if n < 0:
        raise HermitePadeError("degree must be nonnegative")
    prec = precision_bits or max(g.precision_bits for g in germs)
    k = len(germs)
    if germs and germs[0].coeffs[0] == 1 and all(c == 0 for c in germs[0].coeffs[1:]):
        pass  # caller included the germ of 1
    else:
        k += 1
        germs = [germ_constant(1, germs[0].order, prec)] + germs
    if k not in (2, 3, 4):
        raise HermitePadeError(f"family size must be 2, 3 or 4, got {k}")

    need = _required_len(k, n)
    for g in germs[1:]:
        if len(g) < need:
            raise InsufficientGermLength(
                f"germ has {len(g)} coefficients, need at least {need} for k={k}, n={n}"
            )

    order = contract_order(k, n)
    n_rows = order + n  # z^m conditions for -(order) < m <= n
    n_cols = k * (n + 1)

    with mp.workprec(prec):
        rows = []
        for m in range(n, -order, -1):
            row = [mp.mpf(0)] * n_cols
            for j in range(k):
                cj = germs[j].coeffs
                for i in range(n + 1):
                    idx = i - m
                    if 0 <= idx < len(cj):
                        row[j * (n + 1) + i] = cj[idx]
            rows.append(row)
        kernel, degenerate, extra = _null_vectors(rows, n_rows, n_cols, prec)
        polys = _split_and_normalize(kernel, k, n, prec)
        extra_polys = tuple(_split_and_normalize(v, k, n, prec) for v in extra)

    return HPSolution(
        family_size=k,
        degree=n,
        polys=polys,
        achieved_order=order,
        normalization="trailing coefficient of first nonzero polynomial = 1",
        precision_bits=prec,
        degenerate_kernel=degenerate,
        extra_kernel=extra_polys,
    )


def _null_vectors(rows, n_rows, n_cols, prec):
    """Kernel of the (n_rows x n_cols) matrix by column-pivoted elimination.

    Returns one kernel vector, a degeneracy flag, and any further kernel
    vectors when pivots fall below the 2^{-prec/2} relative threshold.
    """
    a = [row[:] for row in rows]
    col_of = list(range(n_cols))
    scale = max((abs(x) for row in a for x in row), default=mp.mpf(1))
    if scale == 0:
        scale = mp.mpf(1)
    tiny = scale * mp.mpf(2) ** (-(prec // 2))
    rank = 0
    for r in range(n_rows):
        # pivot: largest entry in the remaining block
        best, bi, bj = mp.mpf(-1), -1, -1
        for i in range(rank, n_rows):
            for j in range(rank, n_cols):
                v = abs(a[i][j])
                if v > best:
                    best, bi, bj = v, i, j
        if best <= tiny:
            break
        a[rank], a[bi] = a[bi], a[rank]
        if bj != rank:
            for row in a:
                row[rank], row[bj] = row[bj], row[rank]
            col_of[rank], col_of[bj] = col_of[bj], col_of[rank]
        piv = a[rank][rank]
        for i in range(rank + 1, n_rows):
            f = a[i][rank] / piv
            if f != 0:
                ai, ar = a[i], a[rank]
                for j in range(rank, n_cols):
                    ai[j] -= f * ar[j]
        rank += 1

    free = list(range(rank, n_cols))
    if not free:
        raise HermitePadeError("empty kernel: the defect-one structure was violated")

    def back_substitute(free_col):
        x = [mp.mpf(0)] * n_cols
        x[free_col] = mp.mpf(1)
        for r in range(rank - 1, -1, -1):
            s = mp.mpf(0)
            for j in range(r + 1, n_cols):
                if x[j] != 0:
                    s += a[r][j] * x[j]
            x[r] = -s / a[r][r]
        out = [mp.mpf(0)] * n_cols
        for pos, col in enumerate(col_of):
            out[col] = x[pos]
        return out

    vectors = [back_substitute(c) for c in free]
    degenerate = len(vectors) > 1
    return vectors[0], degenerate, tuple(vectors[1:])


def _split_and_normalize(vec, k, n, prec):
    polys = [list(vec[j * (n + 1): (j + 1) * (n + 1)]) for j in range(k)]
    scale = max(abs(c) for p in polys for c in p)
    tiny = scale * mp.mpf(2) ** (-(prec // 2))
    norm = None
    for p in polys:
        if any(abs(c) > tiny for c in p):
            for c in reversed(p):
                if abs(c) > tiny:
                    norm = c
                    break
            break
    if norm is None:
        raise HermitePadeError("all polynomials vanish")
    return tuple(tuple(c / norm for c in p) for p in polys)


def residual_order(sol: HPSolution, germs, precision_bits: int | None = None) -> int:
    """Certify the decay order of sum Q_j f^j from longer germs.

    Returns the largest d such that every coefficient of z^m with m > -d is
    below the 2^{-prec/4} relative threshold; raises OrderShortfall when the
    contract order is not met.
    """
    germs = list(germs)
    prec = precision_bits or sol.precision_bits
    k, n = sol.family_size, sol.degree
    if len(germs) == k - 1:
        germs = [germ_constant(1, germs[0].order, prec)] + germs
    min_len = min(len(g) for g in germs[1:])
    need = _required_len(k, n) + 20
    if min_len < need:
        raise InsufficientGermLength(
            f"need at least {need} coefficients to certify, got {min_len}"
        )
    with mp.workprec(prec):
        scale = mp.mpf(0)
        for j, p in enumerate(sol.polys):
            scale = max(scale, max(abs(c) for c in p) * germs[j].max_abs())
        tol = scale * mp.mpf(2) ** (-(prec // 4))
        d = None
        for m in range(n, -(min_len - n), -1):
            r = mp.mpf(0)
            for j in range(k):
                cj = germs[j].coeffs
                pj = sol.polys[j]
                for i in range(n + 1):
                    idx = i - m
                    if 0 <= idx < len(cj):
                        r += pj[i] * cj[idx]
            if abs(r) > tol:
                d = -m
                break
        if d is None:
            d = min_len - n - 1
    if d < contract_order(k, n):
        raise OrderShortfall(
            f"certified order {d} below contract {contract_order(k, n)} for k={k}, n={n}"
        )
    return d


def _horner(coeffs, x):
    v = mp.mpc(0)
    for c in reversed(coeffs):
        v = v * x + c
    return v


def polyroots_and_measure(poly, tol: float = 1e-12, precision_bits: int | None = None):
    """All complex roots by Aberth-Ehrlich simultaneous iteration, plus the
    normalized zero-counting measure.

    Starts from companion-matrix eigenvalues in double precision and polishes
    at elevated precision until the certified residual bound drops under
    ``tol``; one automatic precision doubling before giving up.
    """
    prec = precision_bits or 256
    coeffs = list(poly)
    with mp.workprec(prec):
        scale = max(abs(mp.mpmathify(c)) for c in coeffs)
        cut = scale * mp.mpf(2) ** (-(prec // 2))
        while coeffs and abs(mp.mpmathify(coeffs[-1])) <= cut:
            coeffs.pop()
    if len(coeffs) < 2:
        raise HermitePadeError("degree must be at least 1 after trimming")

    for attempt in range(2):
        work = prec * (attempt + 2)
        with mp.workprec(work):
            cs = [mp.mpmathify(c) for c in coeffs]
            deg = len(cs) - 1
            roots = _aberth(cs, deg, work)
            bound = _residual_bound(cs, roots)
            if bound <= tol:
                roots = sorted(roots, key=lambda r: (mp.re(r), mp.im(r)))
                zs = ZeroSet(
                    roots=tuple(roots),
                    multiplicities=tuple([1] * deg),
                    residual_bound=float(bound),
                )
                w = 1.0 / deg
                measure = DiscreteMeasure(
                    support=tuple(complex(r) for r in roots),
                    weights=tuple([w] * deg),
                    plane="z",
                )
                return zs, measure
    raise NoConvergence(f"root residual bound {float(bound)} above tol {tol}")


def _aberth(cs, deg, prec):
    dcs = [cs[i] * i for i in range(1, deg + 1)]
    try:
        comp = np.zeros((deg, deg), dtype=complex)
        lead = complex(cs[-1])
        comp[1:, :-1] = np.eye(deg - 1)
        comp[:, -1] = [-complex(c) / lead for c in cs[:-1]]
        init = np.linalg.eigvals(comp)
        roots = [mp.mpc(z) for z in init]
    except Exception:
        r0 = 1 + max(abs(c) for c in cs[:-1]) / abs(cs[-1])
        roots = [r0 * mp.expjpi(mp.mpf(2 * i + 1) / deg) for i in range(deg)]
    # tiny deterministic shake so clustered eigenvalue output cannot coincide
    roots = [r + mp.mpf(2) ** (-40) * (1 + 1j) * (i + 1) / deg for i, r in enumerate(roots)]
    eps = mp.mpf(2) ** (-prec + 8)
    for _ in range(200):
        moved = mp.mpf(0)
        new = []
        for i, r in enumerate(roots):
            p = _horner(cs, r)
            dp = _horner(dcs, r)
            if dp == 0:
                new.append(r + eps)
                moved = max(moved, eps)
                continue
            newton = p / dp
            s = mp.mpc(0)
            for j, rj in enumerate(roots):
                if j != i:
                    diff = r - rj
                    if diff != 0:
                        s += 1 / diff
            denom = 1 - newton * s
            delta = newton / denom if denom != 0 else newton
            new.append(r - delta)
            moved = max(moved, abs(delta) / max(1, abs(r)))
        roots = new
        if moved < eps:
            break
    return roots


def _residual_bound(cs, roots):
    lead = abs(cs[-1])
    deg = len(cs) - 1
    worst = mp.mpf(0)
    for r in roots:
        scale = lead * max(mp.mpf(1), abs(r)) ** deg
        worst = max(worst, abs(_horner(cs, r)) / scale)
    return worst
