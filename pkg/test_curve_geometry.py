"""
Curve Geometry Test
Regimes, branch catalogs, traced branches, asymptotes and line intersections.
"""

import pytest

from hesse.curve_geometry import (
    REGIME_ABOVE_ONE, REGIME_BELOW_ONE, REGIME_MINUS_TWO, REGIME_ZERO,
    asymptote_tangency, asymptotes, branch_catalog, curve_topology, inflexion_points,
    line_cubic_intersections, named_points, regime, steinian_closed_forms, trace_branch,
)
from hesse.exceptions import DegenerateParameter, IdenticalPoints, UnknownBranch
from hesse.forms import B1, B2, B3, LinearForm3, hesse_cubic, hesse_hessian, same_point


def test_regimes():
    assert regime(5.0) == REGIME_ABOVE_ONE
    assert regime(0.5) == REGIME_BELOW_ONE
    assert regime(-3.0) == REGIME_BELOW_ONE
    assert regime(0.0) == REGIME_ZERO
    assert regime(-2.0) == REGIME_MINUS_TWO
    with pytest.raises(DegenerateParameter):
        regime(1.0)


def test_topology_counts():
    assert curve_topology(5.0).f_components == 2
    assert curve_topology(5.0).h_components == 1
    assert curve_topology(-3.0).f_components == 1
    assert curve_topology(-3.0).h_components == 2
    assert curve_topology(0.0).h_components == "DEGENERATE_LINE_TRIPLE"
    assert curve_topology(-2.0).h_components == "DEGENERATE_LINE_PLUS_POINT"


def test_branch_catalogs():
    above = branch_catalog(5.0)
    assert above["BOUNDED"] == "F"
    assert all(above[label] == "H" for label in ("B1R", "RB2", "Q1B3", "B2Q1", "B3Q2", "Q2B1"))
    below = branch_catalog(-3.0)
    assert below["BOUNDED"] == "H" and "B1R" not in below
    fermat = branch_catalog(0.0)
    assert fermat["L1"] == "H" and fermat["L2"] == "H"
    special = branch_catalog(-2.0)
    assert special["C3"] == "H" and "C2" not in special and "BOUNDED" not in special


def test_unknown_branch():
    with pytest.raises(UnknownBranch):
        trace_branch(5.0, "H", "C3")
    with pytest.raises(UnknownBranch):
        trace_branch(5.0, "H", "BOUNDED")


def test_traced_samples_lie_on_curve():
    for k, curve, branch_id in ((5.0, "F", "C1"), (5.0, "H", "C2"), (5.0, "F", "BOUNDED"),
                                (-3.0, "H", "BOUNDED"), (-3.0, "F", "F[B2B3]")):
        form = hesse_cubic(k) if curve == "F" else hesse_hessian(k)
        arc = trace_branch(k, curve, branch_id)
        assert len(arc.samples) > 10
        worst = max(abs(form.normalized_value(s)) for s in arc.samples)
        assert worst < 1e-9, f"{curve}:{branch_id} at k={k}: {worst}"


def test_c1_runs_from_b1_to_b2():
    arc = trace_branch(5.0, "F", "C1")
    assert same_point(arc.endpoints[0], B1)
    assert same_point(arc.endpoints[1], B2)
    framed = trace_branch(5.0, "F", "F[B2B3]")
    assert same_point(framed.endpoints[0], B2)
    assert same_point(framed.endpoints[1], B3)


def test_hessian_split_at_r():
    R = named_points(5.0)["R"]
    left = trace_branch(5.0, "H", "B1R")
    right = trace_branch(5.0, "H", "RB2")
    assert left.endpoints[1].to_list() == pytest.approx(R.to_list())
    assert right.endpoints[0].to_list() == pytest.approx(R.to_list())


def test_fermat_lines():
    l1 = trace_branch(0.0, "H", "L1")
    assert all(abs(s.coords[0]) < 1e-15 for s in l1.samples)
    l2 = trace_branch(0.0, "H", "L2")
    assert all(abs(s.coords[1]) < 1e-15 for s in l2.samples)


def test_affine_points_drop_infinity():
    arc = trace_branch(-2.0, "H", "C3")
    assert len(arc.affine_points()) == 0
    c1 = trace_branch(5.0, "F", "C1")
    assert len(c1.affine_points()) == len(c1.samples) - 2


def test_inflexion_points():
    for k in (5.0, 0.5, 0.0, -2.0, -3.0):
        points = inflexion_points(k)
        assert all(same_point(p, q) for p, q in zip(points, (B1, B2, B3)))
        F, H = hesse_cubic(k), hesse_hessian(k)
        for p in points:
            assert F.evaluate(p) == pytest.approx(0.0, abs=1e-12)
            assert H.evaluate(p) == pytest.approx(0.0, abs=1e-9)
    with pytest.raises(DegenerateParameter):
        inflexion_points(1.0)


def test_asymptotes():
    k = 5.0
    expected = [(1.0, 0.0, 0.25), (0.0, 1.0, 0.25), (1.0, 1.0, -1.25)]
    for line, target in zip(asymptotes(k), expected):
        assert line.is_proportional(LinearForm3(target), 1e-12)


def test_asymptotes_touch_hessian():
    for row in asymptote_tangency(5.0):
        assert row["line_residual"] < 1e-12
        assert row["hessian_residual"] < 1e-9
        assert row["tangency_defect"] < 1e-7


def test_steinian_closed_forms_match_singular_points():
    for k in (5.0, 2.0, -3.0):
        computed = named_points(k)
        for label, point in steinian_closed_forms(k).items():
            assert computed[label].to_list() == pytest.approx(point.to_list(), abs=1e-9)


def test_line_at_infinity_meets_in_inflexions():
    found = line_cubic_intersections(hesse_cubic(5.0), B1, B2)
    assert sum(m for _, m in found) == 3
    for point, _ in found:
        assert any(same_point(point, b, 1e-9) for b in (B1, B2, B3))


def test_identical_points():
    with pytest.raises(IdenticalPoints):
        line_cubic_intersections(hesse_cubic(5.0), (1.0, 2.0, 3.0), (2.0, 4.0, 6.0))


def main():
    tests = [
        test_regimes, test_topology_counts, test_branch_catalogs, test_unknown_branch,
        test_traced_samples_lie_on_curve, test_c1_runs_from_b1_to_b2, test_hessian_split_at_r,
        test_fermat_lines, test_affine_points_drop_infinity, test_inflexion_points, test_asymptotes,
        test_asymptotes_touch_hessian, test_steinian_closed_forms_match_singular_points,
        test_line_at_infinity_meets_in_inflexions, test_identical_points,
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
