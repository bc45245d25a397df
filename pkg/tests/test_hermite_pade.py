import mpmath as mp
import numpy as np
import pytest

from hplab.hermite_pade import (
    DiscreteMeasure,
    HPSolution,
    HermitePadeError,
    InsufficientGermLength,
    OrderShortfall,
    contract_order,
    hp_type1,
    polyroots_and_measure,
    residual_order,
)
from hplab.series import germ_of_family


PREC = 768


@pytest.fixture(scope="module")
def germs_z(spec_z):
    # long enough for k=4, n=8 plus the certification margin
    n = 8 + contract_order(4, 8) + 25
    return germ_of_family(spec_z, n, precision_bits=PREC)


def test_contract_order_values():
    assert contract_order(2, 20) == 21
    assert contract_order(3, 20) == 42
    assert contract_order(4, 20) == 63
    assert contract_order(3, 1) == 4


def _coeff_matrix_float(germs, k, n):
    """Double-precision copy of the linear system: rows are the coefficients
    of z^m for n >= m > -(k-1)(n+1), columns are the k(n+1) unknowns."""
    order = contract_order(k, n)
    rows = order + n
    cols = k * (n + 1)
    a = np.zeros((rows, cols))
    for r, m in enumerate(range(n, -order, -1)):
        for j in range(k):
            cj = germs[j].coeffs
            for i in range(n + 1):
                idx = i - m
                if 0 <= idx < len(cj):
                    a[r, j * (n + 1) + i] = float(cj[idx])
    return a


def test_k3_n1_against_svd_null_space(spec_z, germs_z):
    """Brute-force oracle: for a 5x6 system the kernel is computable directly
    with an SVD in double precision."""
    f, f2, _ = germs_z
    one = type(f)((mp.mpf(1),) + (mp.mpf(0),) * f.order, f.precision_bits)
    sol = hp_type1([f, f2], n=1, precision_bits=PREC)
    a = _coeff_matrix_float([one, f, f2], 3, 1)
    _, s, vt = np.linalg.svd(a)
    # 5 rows, 6 columns: full row rank means the kernel is exactly the last
    # right singular vector
    assert s[-1] > 1e-6 * s[0]
    kernel = vt[-1]
    v = np.array([float(c) for p in sol.polys for c in p])
    # residual against the float matrix
    assert np.linalg.norm(a @ v) < 1e-12 * np.linalg.norm(v) * s[0]
    # alignment with the SVD kernel vector
    cosang = abs(kernel @ v) / np.linalg.norm(v)
    assert cosang > 1 - 1e-10


@pytest.mark.parametrize("k", [2, 3, 4])
def test_order_certificates(k, germs_z):
    n = 8
    sol = hp_type1(germs_z[: k - 1], n=n, precision_bits=PREC)
    assert sol.family_size == k
    assert not sol.degenerate_kernel
    d = residual_order(sol, germs_z[: k - 1], precision_bits=PREC)
    assert d >= contract_order(k, n)


def test_leading_germ_optional(germs_z):
    f, f2, _ = germs_z
    one = type(f)((mp.mpf(1),) + (mp.mpf(0),) * f.order, f.precision_bits)
    a = hp_type1([f, f2], n=3, precision_bits=PREC)
    b = hp_type1([one, f, f2], n=3, precision_bits=PREC)
    assert a.family_size == b.family_size == 3
    for pa, pb in zip(a.polys, b.polys):
        for x, y in zip(pa, pb):
            assert x == y


def test_determinism(germs_z):
    f, f2, _ = germs_z
    a = hp_type1([f, f2], n=5, precision_bits=PREC)
    b = hp_type1([f, f2], n=5, precision_bits=PREC)
    for pa, pb in zip(a.polys, b.polys):
        assert pa == pb


def test_insufficient_germ_length(spec_z):
    germs = germ_of_family(spec_z, 10, precision_bits=256)
    with pytest.raises(InsufficientGermLength):
        hp_type1(germs[:2], n=10, precision_bits=256)


def test_certification_needs_margin(germs_z):
    f, f2, _ = germs_z
    sol = hp_type1([f, f2], n=3, precision_bits=PREC)
    short = type(f)(f.coeffs[:20], f.precision_bits)
    short2 = type(f)(f2.coeffs[:20], f.precision_bits)
    with pytest.raises(InsufficientGermLength):
        residual_order(sol, [short, short2], precision_bits=PREC)


def test_order_shortfall_on_tampered_solution(germs_z):
    f, f2, _ = germs_z
    sol = hp_type1([f, f2], n=3, precision_bits=PREC)
    # perturb one coefficient: the residual order must collapse
    polys = [list(p) for p in sol.polys]
    polys[1][0] += mp.mpf("1e-3")
    bad = HPSolution(
        family_size=sol.family_size,
        degree=sol.degree,
        polys=tuple(tuple(p) for p in polys),
        achieved_order=sol.achieved_order,
        normalization=sol.normalization,
        precision_bits=sol.precision_bits,
    )
    with pytest.raises(OrderShortfall):
        residual_order(bad, [f, f2], precision_bits=PREC)


def test_pade_denominator_zeros_real(germs_z):
    # classical diagonal Pade of a Markov-type function: denominator zeros
    # are real and inside [-1, 1]
    f, _, _ = germs_z
    sol = hp_type1([f], n=8, precision_bits=PREC)
    zeros, measure = polyroots_and_measure(sol.polys[1], tol=1e-20, precision_bits=PREC)
    for r in zeros.roots:
        assert abs(mp.im(r)) < 1e-15
        assert -1 < mp.re(r) < 1
    assert measure.plane == "z"
    assert sum(measure.weights) == pytest.approx(1.0, abs=1e-14)


def test_polyroots_known_polynomial():
    # (z^2 + z - 2)(z^2 + 9) = z^4 + z^3 + 7 z^2 + 9 z - 18
    poly = [-18, 9, 7, 1, 1]  # ascending coefficients
    zeros, _ = polyroots_and_measure(poly, tol=1e-14, precision_bits=256)
    got = [complex(r) for r in zeros.roots]
    for e in (1 + 0j, -2 + 0j, 3j, -3j):
        assert min(abs(g - e) for g in got) < 1e-12
    assert zeros.residual_bound <= 1e-14


def test_polyroots_trims_trailing_noise():
    # trailing coefficients at the rounding floor must not inflate the degree
    poly = [-1, 0, 1, 1e-80]
    zeros, _ = polyroots_and_measure(poly, tol=1e-14, precision_bits=256)
    assert len(zeros.roots) == 2
    got = sorted(complex(r).real for r in zeros.roots)
    assert got == pytest.approx([-1.0, 1.0], abs=1e-13)


def test_polyroots_rejects_constant():
    with pytest.raises(HermitePadeError):
        polyroots_and_measure([1.0, 1e-90], precision_bits=256)


def test_discrete_measure_validation():
    with pytest.raises(ValueError):
        DiscreteMeasure(support=(0.0, 1.0), weights=(0.5,))
    with pytest.raises(ValueError):
        DiscreteMeasure(support=(0.0, 1.0), weights=(0.7, 0.7))
    with pytest.raises(ValueError):
        DiscreteMeasure(support=(0.0, 1.0), weights=(-0.5, 1.5))


def test_discrete_measure_projection():
    m = DiscreteMeasure(support=(0.5 + 0j,), weights=(1.0,), plane="zeta2")
    assert m.projected_z()[0] == pytest.approx(1.25)
    mz = DiscreteMeasure(support=(0.5 + 0j,), weights=(1.0,), plane="z")
    assert mz.projected_z()[0] == pytest.approx(0.5)
