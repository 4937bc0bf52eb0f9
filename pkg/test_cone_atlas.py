"""
Cone Atlas Test
Components of the positive index cone, membership, and the subcones Q cut out
by a class E.
"""

import numpy as np
import pytest

from hesse.cone_atlas import (
    BOUNDED_POSITIVE, NONE, RegionUnion,
    atlas_to_dict, component_of, convexity_check, enumerate_components,
    find_component, positive_index_membership, q_subcone,
)
from hesse.exceptions import DomainError
from hesse.forms import CENTROID
from hesse.tolerances import TraceSettings

COARSE = TraceSettings(max_arc_step=0.02, cutoff=1000.0, raster_size=121)


def test_component_ids():
    ids = [c.id for c in enumerate_components(5.0)]
    assert ids == [BOUNDED_POSITIVE, "HYBRID[B1B2]", "HYBRID[B2B3]", "HYBRID[B3B1]"]
    ids = [c.id for c in enumerate_components(-3.0)]
    assert ids == ["HYBRID[B1B2]", "HYBRID[B2B3]", "HYBRID[B3B1]", "NEG_BOUNDED_HESSIAN"]
    assert len(enumerate_components(0.0)) == 4
    ids = [c.id for c in enumerate_components(-2.0)]
    assert ids == ["KM2_SPECIAL[B1B2]", "KM2_SPECIAL[B2B3]", "KM2_SPECIAL[B3B1]"]


def test_corner_rays():
    above = find_component(5.0, "HYBRID[B1B2]").corner_rays
    assert [c.to_list() for c in above] == [[0.0, -1.0, 0.0], [-1.0, 0.0, 0.0]]
    below = find_component(0.5, "HYBRID[B1B2]").corner_rays
    assert [c.to_list() for c in below] == [[0.0, 1.0, 0.0], [1.0, 0.0, 0.0]]


def test_witnesses_classify_to_their_component():
    for k in (5.0, -3.0):
        for comp in enumerate_components(k):
            assert comp.contains(comp.interior_witness)
            assert not comp.contains(-comp.interior_witness.array)
            if comp.in_positive_index_cone:
                assert component_of(k, comp.interior_witness) == comp.id


def test_points_outside_the_cone():
    # F_5(0, 0, 1) = -1
    assert component_of(5.0, (0.0, 0.0, 1.0)) == NONE
    assert not positive_index_membership(5.0, (0.0, 0.0, 1.0))
    with pytest.raises(DomainError):
        positive_index_membership(5.0, (0.0, 0.0, 0.0))


def test_bounded_component_holds_the_centroid():
    assert find_component(5.0, BOUNDED_POSITIVE).contains(CENTROID)


def test_unknown_component():
    with pytest.raises(DomainError):
        find_component(5.0, "NEG_BOUNDED_HESSIAN")


def test_interior_points_are_inside():
    comp = find_component(5.0, "HYBRID[B1B2]")
    points = comp.interior_points(raster_size=61)
    assert len(points) > 50
    assert comp.contains_many(points).all()
    assert np.allclose(points @ comp.chart_normal, 1.0)


def test_components_are_convex():
    for k in (5.0, -3.0):
        for comp in enumerate_components(k):
            assert convexity_check(comp, 100, seed=7), comp.id


def test_subcone_regions():
    comp = find_component(5.0, "HYBRID[B1B2]")
    sub = q_subcone(5.0, comp, (-1.0, 3.0, 1.0), COARSE)
    assert len(sub.regions) >= 1
    for region in sub.regions:
        assert region.contains_many(region.interior).all()
        assert np.allclose(region.polygon @ comp.chart_normal, 1.0)
    assert sub.to_dict()["region_count"] == len(sub.regions)


def test_two_regions_fail_midpoint_test():
    comp = find_component(-3.0, "HYBRID[B1B2]")
    sub = q_subcone(-3.0, comp, (0.28, 0.28, 1.0))
    assert len(sub.regions) == 2
    assert not convexity_check(RegionUnion(sub.regions), 200, seed=5)


def test_zero_class_rejected():
    comp = find_component(5.0, "HYBRID[B1B2]")
    with pytest.raises(DomainError):
        q_subcone(5.0, comp, (0.0, 0.0, 0.0))


def test_atlas_dict():
    data = atlas_to_dict(5.0)
    assert data["k"] == 5.0
    assert [c["id"] for c in data["components"]][0] == BOUNDED_POSITIVE


def main():
    tests = [
        test_component_ids, test_corner_rays, test_witnesses_classify_to_their_component,
        test_points_outside_the_cone, test_bounded_component_holds_the_centroid,
        test_unknown_component, test_interior_points_are_inside, test_components_are_convex,
        test_subcone_regions, test_two_regions_fail_midpoint_test, test_zero_class_rejected,
        test_atlas_dict,
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
