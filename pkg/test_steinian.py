"""
Steinian Test
The involution on the Hessian, the group law with an inflexion as zero and
real 2-torsion.
"""

import numpy as np
import pytest

from hesse.curve_geometry import steinian_closed_forms
from hesse.exceptions import DomainError, NotOnCurve, NotOnHessian
from hesse.forms import B1, B2, B3, RayVector, projective_gap, siblings
from hesse.steinian import (
    GroupLawContext, e_levels, group_add, group_negate, hessian_samples,
    steinian_map, translation_check, two_torsion, verify_steinian_tangency,
)


def test_alpha_of_inflexions():
    for k in (2.0, 5.0, -3.0):
        closed = steinian_closed_forms(k)
        assert projective_gap(steinian_map(k, B3), closed["R"]) < 1e-9
        assert projective_gap(steinian_map(k, B1), closed["Q1"]) < 1e-9
        assert projective_gap(steinian_map(k, B2), closed["Q2"]) < 1e-9


def test_alpha_is_an_involution():
    for k in (5.0, -3.0):
        for U in hessian_samples(k, 15, seed=21):
            image = steinian_map(k, U)
            assert projective_gap(steinian_map(k, image), U) < 1e-7


def test_second_polar_tangent_at_image():
    for U in hessian_samples(5.0, 10, seed=4):
        line_residual, defect = verify_steinian_tangency(5.0, U)
        assert line_residual < 1e-7
        assert defect < 1e-7


def test_alpha_needs_a_hessian_point():
    with pytest.raises(NotOnHessian):
        steinian_map(5.0, RayVector((0.1, 0.2, 1.0)))


def test_group_law_identities():
    k = 5.0
    ctx = GroupLawContext.for_hessian(k)
    P, Q = hessian_samples(k, 2, seed=8)
    assert projective_gap(group_add(ctx, P, B3), P) < 1e-7
    assert projective_gap(group_add(ctx, P, Q), group_add(ctx, Q, P)) < 1e-7
    minus = group_negate(ctx, P)
    assert ctx.on_curve(minus)
    assert projective_gap(group_negate(ctx, minus), P) < 1e-7


def test_group_law_rejects_off_curve_points():
    ctx = GroupLawContext.for_hessian(5.0)
    with pytest.raises(NotOnCurve):
        group_negate(ctx, RayVector((0.1, 0.2, 1.0)))
    with pytest.raises(ValueError):
        GroupLawContext.for_hessian(5.0, zero="B4")


def test_two_torsion():
    ctx = GroupLawContext.for_hessian(5.0)
    torsion = two_torsion(ctx)
    assert len(torsion) == 1
    T = torsion[0]
    assert ctx.on_curve(T)
    # the tangent at T passes through the zero
    tangent = ctx.curve.gradient(T.array / np.linalg.norm(T.array))
    assert abs(tangent @ B3.array) < 1e-7 * np.linalg.norm(tangent) * np.linalg.norm(B3.array)
    # three real 2-torsion points when the Hessian has two components
    assert len(two_torsion(GroupLawContext.for_hessian(-3.0))) == 3


def test_alpha_is_translation_for_k_above_one():
    assert translation_check(5.0, 15, seed=2)
    with pytest.raises(DomainError):
        translation_check(-3.0, 5)


def test_e_levels():
    levels = e_levels(5.0)
    ks = siblings(5.0)
    assert list(levels) == sorted(k / (k - 1.0) for k in ks)
    assert levels == tuple(sorted(levels))


def main():
    tests = [
        test_alpha_of_inflexions, test_alpha_is_an_involution, test_second_polar_tangent_at_image,
        test_alpha_needs_a_hessian_point, test_group_law_identities,
        test_group_law_rejects_off_curve_points, test_two_torsion,
        test_alpha_is_translation_for_k_above_one, test_e_levels,
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
