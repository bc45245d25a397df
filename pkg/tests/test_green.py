import cmath
import math

import mpmath as mp
import numpy as np
import pytest

from hplab._kernels import JIT_ENABLED, integrate_path
from hplab.green import (
    CircularArc,
    InadmissibleCandidate,
    capacity,
    capacity_robin,
    capacity_robin_multi,
    green_eval,
    qd_green_fn,
    robin_compare,
    robin_gamma,
    s_property_residual,
    segment_capacity_robin,
    segment_green,
)
from hplab.scurve import chebotarev_solve, segment_samples
from hplab.surface import green_signed, lift


# ---------------------------------------------------------------------------
# shared path-integral kernel


def test_kernel_against_quadrature():
    """Independent oracle: mpmath adaptive quadrature of the same branch of
    sqrt(V B)/B along a straight path far from all roots."""
    num = [0.1 + 0.2j, 0.1 + 0.2j]
    den = [0.3 + 0.4j, 0.3 - 0.4j]
    val, _ = integrate_path(num, den, [2.0 + 0j, 2.5 + 0j])

    def f(t):
        q = (t - num[0]) * (t - num[1]) / ((t - den[0]) * (t - den[1]))
        return mp.sqrt(q)

    ref = mp.quad(f, [mp.mpf(2), mp.mpf("2.5")])
    assert abs(abs(val) - abs(complex(ref))) < 1e-12


def test_kernel_square_root_singularity():
    """Endpoint singularity handling: integral of 1/sqrt(t) from 0 to 1 is 2."""
    val, _ = integrate_path([], [0j], [0j, 1.0 + 0j])
    assert abs(val) == pytest.approx(2.0, abs=1e-10)


def test_kernel_flag_is_boolean():
    assert isinstance(JIT_ENABLED, bool)


def test_numpy_fallback_matches_jit_path():
    """The HPLAB_NO_NUMBA=1 fallback must produce identical numbers."""
    import json
    import os
    import subprocess
    import sys

    num = [0.1 + 0.2j, 0.1 + 0.2j]
    den = [0.3 + 0.4j, 0.3 - 0.4j]
    here, _ = integrate_path(num, den, [2.0 + 0j, 1.0 + 1.0j, -0.5 + 0j])
    code = (
        "import json\n"
        "from hplab._kernels import integrate_path, JIT_ENABLED\n"
        "assert not JIT_ENABLED\n"
        "v, _ = integrate_path([0.1+0.2j, 0.1+0.2j], [0.3+0.4j, 0.3-0.4j],"
        " [2.0+0j, 1.0+1.0j, -0.5+0j])\n"
        "print(json.dumps([v.real, v.imag]))\n"
    )
    env = dict(os.environ, HPLAB_NO_NUMBA="1")
    out = subprocess.run(
        [sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True
    )
    re, im = json.loads(out.stdout.strip().splitlines()[-1])
    assert complex(re, im) == pytest.approx(here, abs=1e-13)


# ---------------------------------------------------------------------------
# boundary-integral solver against closed forms


def test_segment_capacity_exact():
    # capacity of [a, b] is (b - a)/4
    cap, gamma = segment_capacity_robin(-1.0, 1.0)
    assert cap == pytest.approx(0.5, abs=1e-13)
    assert gamma == pytest.approx(math.log(2.0), abs=1e-13)
    cap2, gamma2 = segment_capacity_robin(0.25, 0.75)
    assert cap2 == pytest.approx(0.125, abs=1e-13)


def test_two_symmetric_intervals_capacity_exact():
    # cap([-b, -a] U [a, b]) = sqrt(b^2 - a^2) / 2
    a, b = 0.5, 1.0
    curves = [lambda x: (-a - b) / 2 + (b - a) / 2 * x, lambda x: (a + b) / 2 + (b - a) / 2 * x]
    dcurves = [lambda x: (b - a) / 2, lambda x: (b - a) / 2]
    cap, gamma = capacity_robin_multi(curves, dcurves, n=128)
    assert cap == pytest.approx(math.sqrt(b * b - a * a) / 2, abs=1e-12)


def test_bie_requires_even_n():
    with pytest.raises(ValueError):
        capacity_robin(lambda x: x, lambda x: 1.0, n=255)


def test_density_positive_and_normalized():
    cap, gamma, z, density = capacity_robin(lambda x: x, lambda x: 1.0, n=128)
    # the double cover determines the density only up to a component that is
    # antisymmetric under theta -> 2 pi - theta; the physical density is the
    # mirror symmetrization
    sym = 0.5 * (density + density[::-1])
    assert np.all(sym > 0)
    assert (2 * math.pi / 128) * density.sum() == pytest.approx(1.0, abs=1e-12)
    # equilibrium density of a segment: 1/(pi sqrt(1-x^2)) dx pulls back to
    # the uniform measure dtheta/(2 pi) on the double cover
    assert np.max(np.abs(sym - 1 / (2 * math.pi))) < 1e-10


# ---------------------------------------------------------------------------
# Green values from the quadratic differential


def test_green_matches_segment_closed_form(qd_p1):
    pts = [1.0 + 0.5j, -0.7 + 0j, 2.0 - 1.0j, 0.45 + 1e-3j]
    ev = green_eval(qd_p1, pts)
    for z, g in zip(ev.points, ev.values):
        assert g == pytest.approx(segment_green(1 / 3, 1 / 2, z), abs=1e-9)
    assert ev.robin == pytest.approx(math.log(24.0), abs=1e-9)
    assert ev.capacity == pytest.approx(1 / 24, abs=1e-10)


def test_green_zero_on_the_set(qd_p1):
    ev = green_eval(qd_p1, [0.4 + 0j])
    assert ev.values[0] == pytest.approx(0.0, abs=1e-12)


def test_unit_segment_green_matches_surface():
    qd = chebotarev_solve([-1.0 + 0j, 1.0 + 0j])
    for z in (1.5 + 0.7j, -2.0 + 0.1j, 0.3 + 1.2j):
        g_path = green_eval(qd, [z]).values[0]
        g_surf = green_signed(lift(z, 1))
        assert g_path == pytest.approx(g_surf, abs=1e-10)


def test_two_robin_routes_agree(qd_p1):
    gamma_path = robin_gamma(qd_p1)
    _, gamma_bie = segment_capacity_robin(1 / 3, 1 / 2)
    assert abs(gamma_path - gamma_bie) <= 1e-6 * abs(gamma_bie)


def test_capacity_is_exp_minus_robin(qd_p1):
    assert capacity(qd_p1) == pytest.approx(math.exp(-robin_gamma(qd_p1)), rel=1e-14)


# ---------------------------------------------------------------------------
# circular arcs


def test_circular_arc_geometry():
    arc = CircularArc(a=-1.0 + 0j, b=1.0 + 0j, sagitta=0.4)
    center, r = arc.center_radius
    assert abs(arc.a - center) == pytest.approx(r, rel=1e-13)
    assert abs(arc.b - center) == pytest.approx(r, rel=1e-13)
    samples = arc.samples(201)
    assert abs(samples[0] - arc.a) < 1e-12
    assert abs(samples[-1] - arc.b) < 1e-12
    apex = samples[100]
    assert apex.imag == pytest.approx(0.4, abs=1e-12)


def test_circular_arc_green_vanishes_on_arc():
    arc = CircularArc(a=-1.0 + 0j, b=1.0 + 0j, sagitta=0.3)
    for z in arc.samples(11)[1:-1]:
        assert arc.green(z) < 1e-7


def test_circular_arc_robin_vs_bie():
    # independent check: exact conformal Robin constant against the
    # boundary-integral solve on the same parametrization
    arc = CircularArc(a=-1.0 + 0j, b=1.0 + 0j, sagitta=0.35)
    curve, dcurve = arc.parametrization()
    _, gamma_bie, _, _ = capacity_robin(curve, dcurve, n=256)
    assert arc.robin() == pytest.approx(gamma_bie, abs=1e-7)


def test_circular_arc_rejects_zero_sagitta():
    with pytest.raises(InadmissibleCandidate):
        CircularArc(a=-1.0 + 0j, b=1.0 + 0j, sagitta=0.0)


# ---------------------------------------------------------------------------
# S-property


def test_s_property_holds_on_extremal_segment(qd_p1):
    g = qd_green_fn(qd_p1)
    pts = segment_samples(1 / 3, 1 / 2, 101)
    res = s_property_residual(g, pts, n_samples=15)
    assert res < 1e-6


def test_s_property_fails_on_circular_arc():
    # a bulging arc is not extremal for its endpoints, so the one-sided
    # normal derivatives of its Green function differ along the arc
    arc = CircularArc(a=-1.0 + 0j, b=1.0 + 0j, sagitta=0.4)
    res = s_property_residual(arc.green, arc.samples(201), n_samples=15)
    assert res > 1e-2


# ---------------------------------------------------------------------------
# ranking


def test_robin_compare_ranks_extremal_first(qd_p1):
    a, b = 1 / 3, 1 / 2
    L = b - a
    cands = [CircularArc(a, b, s * L) for s in (0.2, -0.3, 0.45)]
    cmp = robin_compare(qd_p1, cands, n=256)
    assert cmp.extremal_label == "extremal"
    assert cmp.labels[0] == "extremal"
    assert cmp.robins[0] >= max(cmp.robins[1:])
    # capacities listed in the matching (ascending) order
    assert list(cmp.capacities) == sorted(cmp.capacities)


def test_robin_compare_rejects_wrong_endpoints(qd_p1):
    bad = CircularArc(0.0 + 0j, 1.0 + 0j, 0.2)
    with pytest.raises(InadmissibleCandidate):
        robin_compare(qd_p1, [bad], n=128)
