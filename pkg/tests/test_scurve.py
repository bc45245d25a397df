import math

import numpy as np
import pytest

from hplab.green import robin_gamma
from hplab.scurve import (
    NotGeneralPosition,
    QuadraticDifferential,
    admissibility_check,
    chebotarev_solve,
    hausdorff_distance,
    polyline_hausdorff,
    route_around,
    segment_samples,
    trace_compact,
)


def test_p1_real_pair_is_segment(qd_p1, compact_p1):
    assert qd_p1.numerator_roots == ()
    assert qd_p1.residual == 0.0
    assert len(compact_p1.arcs) == 1
    seg = segment_samples(1 / 3, 1 / 2)
    assert polyline_hausdorff(compact_p1.arcs[0], seg) < 1e-8


def test_p1_vertical_pair_is_segment():
    a = 0.4 + 0.5j
    qd = chebotarev_solve([a, a.conjugate()])
    comp = trace_compact(qd)
    seg = segment_samples(a, a.conjugate())
    assert polyline_hausdorff(comp.arcs[0], seg) < 1e-8


def test_p1_vertical_pair_capacity_oracle():
    # the extremal compact through two points is the joining segment, whose
    # logarithmic capacity is length / 4
    a = 0.4 + 0.5j
    qd = chebotarev_solve([a, a.conjugate()])
    gamma = robin_gamma(qd)
    assert gamma == pytest.approx(math.log(4.0 / 1.0), abs=1e-9)


def test_p1_real_pair_capacity_oracle(qd_p1):
    gamma = robin_gamma(qd_p1)
    assert gamma == pytest.approx(math.log(4.0 / (1 / 6)), abs=1e-9)


@pytest.fixture(scope="module")
def qd_p2():
    # pairs horizontally well separated relative to their height, so the
    # extremal compact is of disjoint conjugate-pair type
    pts = [-0.5 + 0.25j, -0.5 - 0.25j, 0.45 + 0.2j, 0.45 - 0.2j]
    return chebotarev_solve(pts)


def test_p2_period_conditions_met(qd_p2):
    assert qd_p2.residual < 1e-11
    assert len(qd_p2.double_zeros) == 1
    # each double zero is listed twice in the numerator multiset
    assert len(qd_p2.numerator_roots) == 2
    assert qd_p2.numerator_roots[0] == qd_p2.numerator_roots[1]


def test_p2_double_zero_between_pairs(qd_p2):
    w = qd_p2.double_zeros[0]
    assert -0.5 < w.real < 0.45


def test_p2_trace_disjoint_arcs(qd_p2):
    comp = trace_compact(qd_p2)
    assert len(comp.arcs) == 2
    # each arc joins a conjugate pair
    for a, b in comp.pairing:
        assert abs(a - b.conjugate()) < 1e-9
    # arcs stay well apart
    d = np.abs(comp.arcs[0][:, None] - comp.arcs[1][None, :])
    assert float(d.min()) > 1e-3


def test_p2_admissibility(qd_p2):
    comp = trace_compact(qd_p2)
    rep = admissibility_check(comp)
    assert rep.on_second_sheet
    assert rep.complement_connected
    assert rep.single_valued
    assert rep.all_ok()


def test_p2_conjugation_symmetry(qd_p2):
    # conjugate-symmetric data forces the double zero onto the real axis
    w = qd_p2.double_zeros[0]
    assert abs(w.imag) < 1e-9


def test_p2_capacity_beats_vertical_segments(qd_p2):
    """Independent extremality check: the solved compact has a larger Robin
    constant than the naive competitor joining each pair by a straight
    vertical segment (computed by the boundary-integral solver)."""
    from hplab.green import capacity_robin_multi

    gamma_ext = robin_gamma(qd_p2)

    def seg_pair(u):
        c, d = u.real, u.imag
        return (lambda x: complex(c, d * x), lambda x: complex(0, d))

    uppers = [r for r in qd_p2.denominator_roots if r.imag > 0]
    curves, dcurves = zip(*[seg_pair(u) for u in uppers])
    _, gamma_seg = capacity_robin_multi(list(curves), list(dcurves), n=128)
    assert gamma_ext > gamma_seg - 1e-10


def test_rejects_odd_count():
    with pytest.raises(NotGeneralPosition):
        chebotarev_solve([1j, -1j, 2 + 1j])


def test_rejects_duplicates():
    with pytest.raises(NotGeneralPosition):
        chebotarev_solve([1j, 1j, -1j, -1j])


def test_rejects_real_points_for_p2():
    with pytest.raises(NotGeneralPosition):
        chebotarev_solve([0.1, 0.2, 0.5 + 0.5j, 0.5 - 0.5j])


def test_rejects_non_conjugate_set():
    with pytest.raises(NotGeneralPosition):
        chebotarev_solve([0.1 + 0.5j, 0.1 - 0.5j, 0.5 + 0.5j, 0.5 + 0.4j])


def test_route_around_inserts_detour():
    # root sitting on the straight segment forces a waypoint
    path = route_around(0.0, 1.0, [0.5])
    assert len(path) == 3
    mid = path[1]
    assert abs(mid.imag) > 0.01


def test_route_around_ignores_far_roots():
    path = route_around(0.0, 1.0, [0.5 + 2j, -3.0])
    assert path == [0.0, 1.0]


def test_hausdorff_identities():
    pts = np.asarray([0.0, 1.0, 1j])
    assert hausdorff_distance(pts, pts) == 0.0
    assert hausdorff_distance(pts, pts + 0.5) == pytest.approx(0.5)


def test_polyline_hausdorff_measures_sag():
    line = np.asarray([0.0 + 0j, 1.0 + 0j])
    bent = np.asarray([0.0 + 0j, 0.5 + 0.1j, 1.0 + 0j])
    assert polyline_hausdorff(line, bent) == pytest.approx(0.1, abs=1e-12)


def test_q_at():
    qd = QuadraticDifferential(
        numerator_roots=(1j, 1j), denominator_roots=(2.0 + 0j, 3.0 + 0j)
    )
    t = 0.5 + 0.5j
    expected = (t - 1j) ** 2 / ((t - 2) * (t - 3))
    assert qd.q_at(t) == pytest.approx(expected)
