"""
Visibility Test
Visible boundary rays, the visible extremity and zero counts of G_A on the
boundary arcs.
"""

import numpy as np
import pytest

from hesse.agreement_validator import AgreementValidator
from hesse.cone_atlas import find_component
from hesse.curve_geometry import trace_branch
from hesse.exceptions import DomainError, NotOnBoundary
from hesse.forms import RayVector, hesse_hessian
from hesse.steinian import polish_onto
from hesse.visibility import (
    INSIDE_COMPONENT, analytic_zero_table, chart_pair, classify_c2_pieces, ga_zero_count, halfspace_visible,
    inward_normal, on_boundary, segment_visible, visible, visible_extremity,
)

K = 5.0
C = -1.0 / (K - 1.0)


def _mid_c1(k=K):
    arc = trace_branch(k, "F", "C1")
    return arc.samples[len(arc.samples) // 2]


def test_boundary_membership():
    comp = find_component(K, "HYBRID[B1B2]")
    assert on_boundary(comp, _mid_c1())
    assert not on_boundary(comp, comp.interior_witness)
    with pytest.raises(NotOnBoundary):
        visible(comp, (1.0, 0.0, 0.0), comp.interior_witness)


def test_interior_class_sees_nothing():
    comp = find_component(K, "HYBRID[B1B2]")
    D0 = _mid_c1()
    assert not visible(comp, comp.interior_witness, D0)


def test_class_beyond_the_tangent_plane_sees_d0():
    comp = find_component(K, "HYBRID[B1B2]")
    D0 = _mid_c1().array
    n = inward_normal(comp, D0)
    assert n is not None
    A = D0 / np.linalg.norm(D0) - 0.1 * n
    assert visible(comp, A, D0)
    assert halfspace_visible(comp, A, D0)


def _on_c2(x, y):
    """Point of the Hessian branch C2 near (x, y, 1)."""
    return polish_onto(hesse_hessian(K), np.array([x, y, 1.0]))


def test_c2_near_b1_visible_from_upper_left():
    comp = find_component(K, "HYBRID[B1B2]")
    D0 = _on_c2(0.383, 354.37)
    assert visible(comp, RayVector((-1.0, 3.0, 1.0)), D0)
    # either sign names the same boundary point
    assert visible(comp, RayVector((-1.0, 3.0, 1.0)), -D0)


def test_c2_near_b2_hidden_from_left():
    comp = find_component(K, "HYBRID[B1B2]")
    D0 = _on_c2(354.37, 0.383)
    assert not visible(comp, RayVector((-2.0, 1.0, 1.0)), D0)


def test_chart_pair_puts_a_on_the_ray_side():
    comp = find_component(K, "HYBRID[B1B2]")
    a, d = chart_pair(comp, (-1.0, 3.0, 1.0), _on_c2(0.383, 354.37))
    assert on_boundary(comp, d)
    assert a[2] * d[2] > 0


def test_visible_extremity_points_are_visible_from_both_sides():
    comp = find_component(K, "HYBRID[B1B2]")
    A = RayVector((-2.0, 1.0, 1.0))
    extremity = visible_extremity(comp, A)
    assert extremity
    for point in extremity:
        if point.kind == "corner":
            assert segment_visible(comp, A.array, point.ray.array)
            assert segment_visible(comp, -A.array, point.ray.array)


def test_zero_table_regions():
    assert analytic_zero_table(K, RayVector((-0.4, -0.4, 1.0)))[1] == {"C1": 2}
    assert analytic_zero_table(K, RayVector((3.0, 3.0, 1.0)))[1] == {}
    label, counts = analytic_zero_table(K, RayVector((C, 1.0, 1.0)))
    assert label == "tie" and counts is None
    assert analytic_zero_table(K, RayVector((1.0, 1.0, 0.0))) == ("at-infinity", None)


def test_no_table_inside_the_component():
    assert analytic_zero_table(K, RayVector((-1.0, -1.0, 1.0))) == (INSIDE_COMPONENT, None)
    # same point of the plane, other sign
    assert analytic_zero_table(K, RayVector((1.0, 1.0, -1.0))) == (INSIDE_COMPONENT, None)
    report = ga_zero_count(K, RayVector((-1.0, -1.0, 1.0)))
    assert report.total == 0
    assert report.analytic is None and report.agree is None
    assert any("inside" in note for note in report.notes)


def test_threshold_rows():
    thr = 121.0 / 196.0
    label, counts = analytic_zero_table(K, RayVector((-1.0, 1.0 + thr, 1.0)))
    assert label == "a<c,b>c,a+b=thr"
    assert counts == {"C1": 1, "B1R": 1, "R": 2}
    label, counts = analytic_zero_table(K, RayVector((1.0 + thr, -1.0, 1.0)))
    assert label == "mirror:a<c,b>c,a+b=thr"
    assert counts == {"C1": 1, "RB2": 1, "R": 2}
    assert analytic_zero_table(K, RayVector((thr / 2.0, thr / 2.0, 1.0)))[1] == {"R": 2}
    # just off the line the generic rows take over
    assert analytic_zero_table(K, RayVector((-1.0, 1.0 + thr + 1e-6, 1.0)))[1] == {"C1": 1, "B1R": 1}


def test_mirrored_rows_swap_arcs():
    left = analytic_zero_table(K, RayVector((-2.0, 3.0, 1.0)))
    right = analytic_zero_table(K, RayVector((3.0, -2.0, 1.0)))
    assert right[0] == f"mirror:{left[0]}"
    swap = {"B1R": "RB2", "RB2": "B1R"}
    assert right[1] == {swap.get(key, key): n for key, n in left[1].items()}


def test_sampled_counts_match_table():
    points = [(-0.4, -0.4), (3.0, 3.0), (0.2, 0.2), (-2.0, 3.0), (3.0, -2.0), (-1.0, 0.5)]
    reports = [ga_zero_count(K, RayVector((a, b, 1.0))) for a, b in points]
    for report in reports:
        assert report.total in (0, 2, 4)
        assert report.agree is not False, report.to_dict()
    summary = AgreementValidator().validate(AgreementValidator.from_zero_reports(reports))["agreement_summary"]
    assert summary["disagree"] == 0


def test_zero_report_dict():
    report = ga_zero_count(K, RayVector((-0.4, -0.4, 1.0)))
    data = report.to_dict()
    assert data["counts"]["C1"] == 2
    assert data["total"] == 2
    assert data["notes"]


def test_zero_counts_in_other_regimes():
    report = ga_zero_count(-3.0, RayVector((0.28, 0.28, 1.0)))
    assert set(report.counts) == {"C1", "C2"}
    assert report.analytic is None
    report = ga_zero_count(0.0, RayVector((2.0, 2.0, 1.0)))
    assert set(report.counts) == {"C1", "L1", "L2"}


def test_c2_pieces():
    result = classify_c2_pieces(K, RayVector((-2.0, 3.0, 1.0)))
    assert not result["mirrored"]
    assert result["pieces"]
    assert result["consistent"]
    upper = classify_c2_pieces(K, RayVector((-1.0, 3.0, 1.0)))
    assert upper["hessian_sign"] == "nonneg"
    assert upper["consistent"]
    assert all(p["witness_visible"] for p in upper["pieces"])
    lower = classify_c2_pieces(K, RayVector((-2.0, 1.0, 1.0)))
    assert lower["hessian_sign"] == "negative"
    assert lower["consistent"]
    assert any(not p["witness_visible"] for p in lower["pieces"])
    mirrored = classify_c2_pieces(K, RayVector((3.0, -2.0, 1.0)))
    assert mirrored["mirrored"]


def test_c2_pieces_domain():
    with pytest.raises(DomainError):
        classify_c2_pieces(K, RayVector((1.0, 1.0, 1.0)))
    with pytest.raises(DomainError):
        classify_c2_pieces(-3.0, RayVector((-2.0, 3.0, 1.0)))


def main():
    tests = [
        test_boundary_membership, test_interior_class_sees_nothing,
        test_class_beyond_the_tangent_plane_sees_d0,
        test_c2_near_b1_visible_from_upper_left, test_c2_near_b2_hidden_from_left,
        test_chart_pair_puts_a_on_the_ray_side, test_visible_extremity_points_are_visible_from_both_sides,
        test_zero_table_regions, test_no_table_inside_the_component, test_threshold_rows,
        test_mirrored_rows_swap_arcs, test_sampled_counts_match_table, test_zero_report_dict,
        test_zero_counts_in_other_regimes, test_c2_pieces, test_c2_pieces_domain,
    ]
    failed = 0
    for test in tests:
        try:
            test()
            print(f"[OK] {test.__name__}")
        except Exception as e:
            failed += 1
            print(f"[FAILED] {test.__name__}: {e}")
    print(f"\n{len(tests) - failed}/{len(tests)} passed")
    return failed == 0


if __name__ == "__main__":
    main()
