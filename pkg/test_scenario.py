"""
Scenario Test
lambda-bounds, the pole solver, the Fermat case table, the k = -2 facts and
integral enumeration.
"""

import numpy as np
import pytest

from hesse import scenario
from hesse.cone_atlas import find_component
from hesse.curve_geometry import trace_branch
from hesse.exceptions import AtInfinity, DomainError, HypothesisFailed, NoConvergence
from hesse.forms import RayVector, hesse_cubic, projective_gap
from hesse.scenario import (
    CUBIC_ROOTS, UNDEFINED,
    cubic_sign_pattern, double_polar, enumerate_integral, enumerate_integral_naive,
    fermat_case_id, fermat_classify, fermat_grid_summary, km2_c2_bound_check,
    km2_fact_check, km2_functions, lambda_bound, pole_residual, pole_solve,
)
from hesse.verify import VerificationRunner


def test_cubic_roots_bound():
    """F(D - tE) = 2 - s^3 + 15 s with s = 2 - t, for D = (-1, -1, 0), E = (0, 0, 1) at k = 5."""
    k = 5.0
    comp = find_component(k, "HYBRID[B1B2]")
    D, E = RayVector((-1.0, -1.0, 0.0)), RayVector((0.0, 0.0, 1.0))
    result = lambda_bound(k, comp, E, D)
    assert result.method == CUBIC_ROOTS
    assert result.roots == pytest.approx((2.13349, 5.80451), abs=1e-4)
    assert result.lambda0 == result.roots[1]
    assert cubic_sign_pattern(k, D, E, *result.roots) == (1, -1, 1)
    assert result.to_dict()["certificate_count"] == 2


def test_lambda_bound_is_homogeneous_in_d():
    k = 5.0
    comp = find_component(k, "HYBRID[B1B2]")
    D, E = RayVector((-1.0, -1.0, 0.0)), RayVector((0.0, 0.0, 1.0))
    base = lambda_bound(k, comp, E, D).lambda0
    assert lambda_bound(k, comp, E, D.scaled(2.5)).lambda0 == pytest.approx(2.5 * base, rel=1e-9)


def test_lambda_bound_rejects_e_inside():
    k = 5.0
    comp = find_component(k, "HYBRID[B1B2]")
    with pytest.raises(DomainError):
        lambda_bound(k, comp, comp.interior_witness, comp.interior_witness)


def test_lambda_bound_rejects_e_on_the_boundary():
    k = 5.0
    comp = find_component(k, "HYBRID[B1B2]")
    arc = trace_branch(k, "F", "C1")
    for E in (RayVector((0.0, -1.0, 0.0)), arc.samples[len(arc.samples) // 2]):
        with pytest.raises(DomainError):
            lambda_bound(k, comp, E, comp.interior_witness)


def test_pole_restart_count(monkeypatch):
    k = 5.0
    comp = find_component(k, "HYBRID[B1B2]")
    l = double_polar(k, comp.interior_witness)
    calls = []

    def failing(k, seed, target, tol, max_iter=100):
        calls.append(seed)
        raise NoConvergence("stalled")

    monkeypatch.setattr(scenario, "_newton", failing)
    with pytest.raises(NoConvergence):
        pole_solve(k, comp, l, max_restarts=0)
    assert len(calls) == 1
    calls.clear()
    with pytest.raises(NoConvergence):
        pole_solve(k, comp, l, max_restarts=2)
    assert len(calls) == 3
    with pytest.raises(ValueError):
        pole_solve(k, comp, l, max_restarts=-1)


def test_pole_round_trip():
    k = 5.0
    comp = find_component(k, "HYBRID[B1B2]")
    interior = comp.interior_points(raster_size=41)
    L = interior[len(interior) // 3]
    l = double_polar(k, L)
    D = pole_solve(k, comp, l)
    assert pole_residual(k, D, l) < 1e-9
    assert projective_gap(D, L) < 1e-8


def test_pole_hypothesis():
    k = 5.0
    comp = find_component(k, "HYBRID[B1B2]")
    l = -double_polar(k, comp.interior_witness)
    with pytest.raises(HypothesisFailed) as info:
        pole_solve(k, comp, l)
    assert info.value.sample is not None


def test_fermat_case_ids():
    assert fermat_case_id(2.0, 2.0) == (1, False, False)
    assert fermat_case_id(0.5, 0.3) == (2, False, False)
    assert fermat_case_id(0.5, 2.0) == (3, False, False)
    assert fermat_case_id(0.0, 2.0) == (4, False, False)
    assert fermat_case_id(-1.0, 2.0) == (5, False, False)
    assert fermat_case_id(-1.0, 0.5) == (6, False, False)
    assert fermat_case_id(2.0, 0.5) == (3, True, False)
    assert fermat_case_id(1.0, 1.0) == (1, False, False)


def test_fermat_ties_take_lowest_case():
    case, _, tie = fermat_case_id(0.5, 1.0)
    assert (case, tie) == (2, True)


def test_fermat_uncovered_and_infinity():
    with pytest.raises(DomainError):
        fermat_case_id(-1.0, -1.0)
    with pytest.raises(DomainError):
        fermat_case_id(-1.0, 0.0)
    with pytest.raises(AtInfinity):
        fermat_classify((1.0, 2.0, 0.0))


def test_fermat_grid_summary():
    df, summary = fermat_grid_summary((-1.0, 2.0), (-1.0, 2.0), 4)
    assert summary["points"] == 16
    assert summary["uncovered"] == 3
    assert len(df) == 16
    assert sum(summary["per_case"].values()) == 13


def test_fermat_case_one_facts():
    result = fermat_classify((2.0, 2.0, 1.0))
    assert result.case_id == 1
    assert result.facts["hessian_sign"] == 1
    assert result.facts_hold, result.expected


def test_km2_functions():
    t, s = km2_functions(0.25)
    assert t == pytest.approx(0.15139, abs=1e-5)
    assert s == pytest.approx(0.875)
    assert km2_functions(1.0)[0] == pytest.approx(1.0)
    assert km2_functions(0.5)[1] == UNDEFINED
    assert km2_functions(0.5 + 1e-15)[1] == UNDEFINED
    assert km2_functions(0.5 + 1e-6)[1] != UNDEFINED
    with pytest.raises(DomainError):
        km2_functions(0.0)


def test_km2_facts():
    report = km2_fact_check(1.0, 60, seed=11)
    assert all(entry["passed"] for entry in report.values())
    assert "one line misses P, the other splits it" in report


def test_km2_c2_bound():
    check = km2_c2_bound_check(2.0, 1.0, (1.0, 0.0, 0.0), (1.0, 1.0, 1.0), (1.0, 0.0, 0.0))
    assert check == {"lhs": 1.0, "rhs": 2.0, "holds": True}
    assert not km2_c2_bound_check(1.0, 3.0, (1.0, 0.0, 0.0), (1.0, 1.0, 1.0), (1.0, 0.0, 0.0))["holds"]


def test_enumerate_ray_example():
    found = enumerate_integral(-2.0, "ray:-1,-1,-3", 3, (1.0, 9.0))
    assert [r.to_list() for r in found] == [[-1.0, -1.0, -3.0]]


def test_enumerate_matches_loop_oracle():
    args = (5.0, "all", 2, (-5.0, 5.0))
    fast = enumerate_integral(*args)
    assert fast == enumerate_integral_naive(*args)
    F = hesse_cubic(5.0)
    assert all(-5.0 <= F.evaluate(E) <= 5.0 for E in fast)
    assert [E.coords for E in fast] == sorted(E.coords for E in fast)


def test_enumerate_arguments():
    assert enumerate_integral(5.0, "all", 2, (3.0, 1.0)) == []
    with pytest.raises(ValueError):
        enumerate_integral(5.0, "all", 0, (0.0, 1.0))
    with pytest.raises(ValueError):
        enumerate_integral(5.0, "somewhere", 1, (0.0, 1.0))


def test_quick_suites_pass():
    runner = VerificationRunner(seed=20240607, quick=True, echo=False)
    for suite in ("lambda", "pole", "enumerate", "siblings"):
        runner.run(suite)
    failed = [r.id for r in runner.results if not r.passed]
    assert not failed, failed
    assert not np.any(runner.to_frame()["passed"] == False)  # noqa: E712


def main():
    tests = [
        test_cubic_roots_bound, test_lambda_bound_is_homogeneous_in_d, test_lambda_bound_rejects_e_inside,
        test_lambda_bound_rejects_e_on_the_boundary, test_pole_round_trip, test_pole_hypothesis, test_fermat_case_ids, test_fermat_ties_take_lowest_case,
        test_fermat_uncovered_and_infinity, test_fermat_grid_summary, test_fermat_case_one_facts,
        test_km2_functions, test_km2_facts, test_km2_c2_bound, test_enumerate_ray_example,
        test_enumerate_matches_loop_oracle, test_enumerate_arguments, test_quick_suites_pass,
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
