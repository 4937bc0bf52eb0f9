"""
Forms Test
Polarization algebra, the Hesse family and its Hessian, cubic root isolation
and the sibling parameters.
"""

import numpy as np
import pytest

from hesse.exceptions import DegenerateParameter, DomainError, RankError
from hesse.forms import (
    B1, B2, B3, CENTROID, HESSE_FRAME, RayVector,
    conic_singular_point, hesse_cubic, hesse_hessian, hesse_normal_cubic,
    hessian_cubic, hessian_parameter, polar_quadric, real_cubic_roots,
    second_polar, signature, siblings, split_line_pair, trilinear,
)
from utils.seeded_rng import SplitMix64


def _random_points(n, seed=3):
    rng = SplitMix64(seed)
    return np.array([[rng.uniform_in(-2.0, 2.0) for _ in range(3)] for _ in range(n)])


def test_reference_values():
    assert hesse_cubic(5.0).evaluate((0.0, 0.0, 1.0)) == pytest.approx(-1.0)
    assert hesse_cubic(-2.0).evaluate(CENTROID) == pytest.approx(-1.0 / 3.0)
    assert hesse_hessian(5.0).evaluate((0.0, 0.0, 1.0)) == pytest.approx(1350.0)


def test_inflexions_on_every_curve():
    for k in (5.0, 2.0, 0.5, 0.0, -2.0, -3.0):
        F = hesse_cubic(k)
        for b in (B1, B2, B3):
            assert abs(F.normalized_value(b)) < 1e-12


def test_near_one_is_guarded():
    with pytest.raises(DegenerateParameter):
        hesse_cubic(1.0)
    with pytest.raises(DegenerateParameter):
        hesse_cubic(1.0 + 1e-8)
    assert hesse_cubic(1.0, allow_degenerate=True).evaluate((0.0, 0.0, 1.0)) == pytest.approx(-1.0)


def test_hesse_frame_change():
    """F_k(D) is the normal form evaluated at (x, y, z - x - y)."""
    points = _random_points(50)
    for k in (5.0, -3.0):
        lhs = hesse_cubic(k).evaluate_many(points)
        rhs = hesse_normal_cubic(k).evaluate_many(points @ HESSE_FRAME.T)
        assert np.allclose(lhs, rhs, atol=1e-10)


def test_hessian_identity():
    """H_k = -54 k^2 F_{k'}."""
    points = _random_points(200, seed=5)
    for k in (5.0, 2.0, 0.5, -3.0):
        kp = hessian_parameter(k)
        H = hesse_hessian(k).evaluate_many(points)
        rhs = -54.0 * k * k * hesse_cubic(kp, allow_degenerate=True).evaluate_many(points)
        assert np.max(np.abs(H - rhs)) <= 1e-9 * np.max(np.abs(H))


def test_hessian_parameter():
    assert hessian_parameter(5.0) == pytest.approx(-121.0 / 75.0)
    assert hessian_parameter(-2.0) == pytest.approx(1.0)
    with pytest.raises(DegenerateParameter):
        hessian_parameter(0.0)


def test_hessian_of_fermat_is_line_triple():
    H = hessian_cubic(hesse_cubic(0.0))
    # H_0 is a multiple of u v w
    for p in ((0.0, 0.4, 0.7), (0.3, 0.0, 2.0), (0.2, 0.8, 1.0)):
        assert abs(H.normalized_value(p)) < 1e-12
    assert abs(H.normalized_value((0.2, 0.3, 1.0))) > 1e-3


def test_polar_contractions():
    F = hesse_cubic(5.0)
    for A in _random_points(20, seed=9):
        assert polar_quadric(F, A)(A) == pytest.approx(F.evaluate(A), rel=1e-9, abs=1e-12)
        assert second_polar(F, A)(A) == pytest.approx(F.evaluate(A), rel=1e-9, abs=1e-12)
        assert np.allclose(3.0 * second_polar(F, A).array, F.gradient(A))


def test_trilinear_is_symmetric():
    F = hesse_cubic(-3.0)
    T = trilinear(F)
    A, B, C = _random_points(3, seed=21)
    assert T(A, A, A) == pytest.approx(F.evaluate(A), rel=1e-9, abs=1e-12)
    assert T(A, B, C) == pytest.approx(T(C, A, B), rel=1e-9, abs=1e-12)
    assert T(A, B, C) == pytest.approx(T(B, A, C), rel=1e-9, abs=1e-12)


def test_polar_conic_of_inflexion_splits():
    """The polar conic at an inflexion is a line pair: the tangent and the harmonic line."""
    F = hesse_cubic(5.0)
    Q = polar_quadric(F, B3)
    assert signature(Q) == (1, 1, 1)
    l1, l2 = split_line_pair(Q)
    ratios = [Q(D) / (l1(D) * l2(D)) for D in _random_points(10, seed=13)]
    assert np.allclose(ratios, ratios[0], rtol=1e-8)
    tangent = second_polar(F, B3).array
    assert any(np.linalg.norm(np.cross(l.array, tangent)) < 1e-9 * np.linalg.norm(tangent) for l in (l1, l2))


def test_singular_point_needs_rank_two():
    F = hesse_cubic(5.0)
    with pytest.raises(RankError):
        conic_singular_point(polar_quadric(F, (0.1, 0.2, 1.0)))


def test_real_cubic_roots():
    roots = real_cubic_roots((1.0, -6.0, 11.0, -6.0))
    assert [m for _, m in roots] == [1, 1, 1]
    assert [r for r, _ in roots] == pytest.approx([1.0, 2.0, 3.0])

    (r, m), = real_cubic_roots((1.0, -3.0, 3.0, -1.0))
    assert m == 3 and r == pytest.approx(1.0)

    roots = real_cubic_roots((1.0, -4.0, 5.0, -2.0))
    assert [m for _, m in roots] == [2, 1]
    assert [r for r, _ in roots] == pytest.approx([1.0, 2.0])

    (r, m), = real_cubic_roots((2.0, 0.0, 0.0, -2.0))
    assert m == 1 and r == pytest.approx(1.0)

    with pytest.raises(ValueError):
        real_cubic_roots((0.0, 1.0, 1.0, 1.0))


def test_siblings():
    roots = siblings(5.0)
    # roots of k^3 + 15k^2 - 4
    assert sum(roots) == pytest.approx(-15.0)
    assert roots[0] * roots[1] + roots[0] * roots[2] + roots[1] * roots[2] == pytest.approx(0.0, abs=1e-8)
    assert roots[0] * roots[1] * roots[2] == pytest.approx(4.0)
    assert roots == pytest.approx((-14.98218, -0.52569, 0.50787), abs=1e-4)
    for k in siblings(5.0):
        assert hessian_parameter(k) == pytest.approx(5.0)
    assert siblings(1.0, allow_boundary=True) == pytest.approx((-2.0, -2.0, 1.0), abs=1e-6)


def test_siblings_domain():
    with pytest.raises(DomainError):
        siblings(0.5)
    with pytest.raises(DomainError):
        siblings(1.0)


def test_ray_vector():
    D = RayVector((0.0, -3.0, 1.5))
    assert D.sup_norm == 3.0
    assert D.normalized().to_list() == [0.0, -1.0, 0.5]
    assert D.canonical().to_list() == [0.0, 1.0, -0.5]
    assert not RayVector((1.0, 1.0, 0.0)).is_affine()
    with pytest.raises(ValueError):
        RayVector((1.0, 2.0))


def main():
    tests = [
        test_reference_values, test_inflexions_on_every_curve, test_near_one_is_guarded,
        test_hesse_frame_change, test_hessian_identity, test_hessian_parameter,
        test_hessian_of_fermat_is_line_triple, test_polar_contractions, test_trilinear_is_symmetric,
        test_polar_conic_of_inflexion_splits, test_singular_point_needs_rank_two,
        test_real_cubic_roots, test_siblings, test_siblings_domain, test_ray_vector,
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
