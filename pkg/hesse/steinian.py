"""
Steinian
The Steinian involution on the Hessian, the chord-tangent group law with an
inflexion as zero, real 2-torsion and the e-levels of a Hessian parameter.
"""

from dataclasses import dataclass, field
from typing import Dict, List, Tuple

import numpy as np
from scipy.linalg import null_space

from utils.seeded_rng import SplitMix64

from .curve_geometry import (
    REGIME_ABOVE_ONE, REGIME_BELOW_ONE, INFLEXIONS,
    line_cubic_intersections, regime, trace_branch,
)
from .exceptions import DomainError, NoConvergence, NotOnCurve, NotOnHessian, RankError
from .forms import (
    B3, RayVector, TernaryCubic,
    conic_singular_point, hesse_cubic, hesse_hessian, hessian_cubic,
    polar_quadric, projective_gap, same_point, second_polar, siblings, split_line_pair,
)
from .tolerances import DEFAULT_TOLERANCES, Tolerances


def affine_representative(P: RayVector, eps: float = 1e-12) -> RayVector:
    """z = 1 representative when the point is affine, else the canonical ray."""
    if P.is_affine(eps):
        return RayVector.of(P.array / P.coords[2])
    return P.canonical()


def polish_onto(C: TernaryCubic, P: np.ndarray, steps: int = 6) -> np.ndarray:
    """Newton projection of a projective point onto C = 0 along the gradient."""
    x = P / np.linalg.norm(P)
    for _ in range(steps):
        g = C.gradient(x)
        gg = float(g @ g)
        if gg == 0.0:
            break
        x = x - C.evaluate(x) * g / gg
        x = x / np.linalg.norm(x)
    return x


@dataclass(frozen=True)
class GroupLawContext:
    """A smooth cubic with an inflexion chosen as the zero of its group law."""

    curve: TernaryCubic
    zero: RayVector = B3
    tol: Tolerances = field(default=DEFAULT_TOLERANCES, compare=False)

    def __post_init__(self):
        if abs(self.curve.normalized_value(self.zero)) >= self.tol.on_curve_abs:
            raise NotOnCurve(f"zero {self.zero.to_list()} is not on the curve")
        if abs(hessian_cubic(self.curve).normalized_value(self.zero)) >= self.tol.on_curve_abs:
            raise DomainError(f"zero {self.zero.to_list()} is not an inflexion")

    @classmethod
    def for_hessian(cls, k: float, zero: str = "B3",
                    tol: Tolerances = DEFAULT_TOLERANCES) -> "GroupLawContext":
        """Group law on H_k with zero at B1, B2 or B3."""
        if zero not in INFLEXIONS:
            raise ValueError(f"Unknown zero: {zero}. Available: {list(INFLEXIONS)}")
        return cls(hesse_hessian(k, tol), INFLEXIONS[zero], tol)

    def on_curve(self, P: RayVector) -> bool:
        return abs(self.curve.normalized_value(P)) < self.tol.on_curve_abs

    def third(self, P1: RayVector, P2: RayVector) -> RayVector:
        """Residual intersection of the line P1P2 (the tangent if P1 = P2) with the curve."""
        a, b = P1.array, P2.array
        if same_point(P1, P2, 1e-9):
            tangent = self.curve.gradient(a / np.linalg.norm(a))
            b = np.cross(tangent, a)
        points = []
        for point, mult in line_cubic_intersections(self.curve, a, b):
            points += [point.array] * mult
        if len(points) != 3:
            raise NoConvergence(f"chord meets the curve in {len(points)} real points")
        for known in (P1, P2):
            i = int(np.argmin([projective_gap(p, known) for p in points]))
            points.pop(i)
        return RayVector.of(polish_onto(self.curve, points[0])).canonical()


def steinian_map(k: float, U: RayVector, tol: Tolerances = DEFAULT_TOLERANCES) -> RayVector:
    """
    alpha(U): the singular point of the polar conic of U, for U on the Hessian.

    Raises:
        NotOnHessian: If U is off H_k
        RankError: If the polar conic is not a line pair
    """
    H = hesse_hessian(k, tol)
    if abs(H.normalized_value(U)) >= tol.on_curve_abs:
        raise NotOnHessian(f"U={U.to_list()} is not on H_{k} (residual {H.normalized_value(U):.3e})")
    u = U.array / np.linalg.norm(U.array)
    if np.linalg.norm(H.gradient(u)) <= tol.kernel_rank_rel * H.scale:
        raise RankError(f"U={U.to_list()} is a singular point of the Hessian")
    F = hesse_cubic(k, tol=tol)
    return affine_representative(conic_singular_point(polar_quadric(F, U), tol))


def group_add(ctx: GroupLawContext, P1: RayVector, P2: RayVector) -> RayVector:
    """P1 + P2 = third(zero, third(P1, P2))."""
    for P in (P1, P2):
        if not ctx.on_curve(P):
            raise NotOnCurve(f"{P.to_list()} is not on the curve")
    return affine_representative(ctx.third(ctx.zero, ctx.third(P1, P2)))


def group_negate(ctx: GroupLawContext, P: RayVector) -> RayVector:
    """-P = third(zero, P)."""
    if not ctx.on_curve(P):
        raise NotOnCurve(f"{P.to_list()} is not on the curve")
    return affine_representative(ctx.third(ctx.zero, P))


def two_torsion(ctx: GroupLawContext) -> List[RayVector]:
    """
    Real points T != zero whose tangent passes through zero.

    The polar conic of the inflexion splits into its tangent line and its
    harmonic line; the 2-torsion points are where the harmonic line meets the
    curve.
    """
    z = ctx.zero.array / np.linalg.norm(ctx.zero.array)
    tangent = ctx.curve.gradient(z)
    lines = split_line_pair(polar_quadric(ctx.curve, ctx.zero), ctx.tol)
    harmonic = max(lines, key=lambda l: projective_gap(l.array, tangent))
    basis = null_space(harmonic.array.reshape(1, 3))
    points = []
    for point, _ in line_cubic_intersections(ctx.curve, basis[:, 0], basis[:, 1]):
        T = affine_representative(RayVector.of(polish_onto(ctx.curve, point.array)))
        if not same_point(T, ctx.zero, 1e-6):
            points.append(T)
    return sorted(points, key=lambda P: tuple(P.coords))


def e_levels(k_prime: float) -> Tuple[float, float, float]:
    """e_i = k_i / (k_i - 1) over the siblings of k_prime, ascending."""
    ks = siblings(k_prime)
    if any(abs(kk - 1.0) < 1e-12 for kk in ks):
        raise DomainError(f"k'={k_prime}: a sibling equals 1")
    return tuple(sorted(kk / (kk - 1.0) for kk in ks))


def verify_steinian_tangency(k: float, U: RayVector,
                             tol: Tolerances = DEFAULT_TOLERANCES) -> Tuple[float, float]:
    """
    Returns:
        (|l(alpha(U))|, |l x grad H(alpha(U))|) with l the second polar of U,
        everything unit-normalized
    """
    image = steinian_map(k, U, tol)
    line = second_polar(hesse_cubic(k, tol=tol), U).array
    line = line / np.linalg.norm(line)
    a = image.array / np.linalg.norm(image.array)
    grad = hesse_hessian(k, tol).gradient(a)
    grad = grad / np.linalg.norm(grad)
    return abs(float(line @ a)), float(np.linalg.norm(np.cross(line, grad)))


def hessian_branches(k: float, tol: Tolerances = DEFAULT_TOLERANCES) -> Dict[str, List[str]]:
    """Real components of a smooth Hessian, as lists of traced branch ids."""
    r = regime(k, tol)
    if r == REGIME_ABOVE_ONE:
        return {"main": ["C2", "H[B2B3]", "H[B3B1]"]}
    if r == REGIME_BELOW_ONE:
        return {"unbounded": ["C2", "H[B2B3]", "H[B3B1]"], "bounded": ["BOUNDED"]}
    raise DomainError(f"k={k}: the Hessian is a degenerate cubic")


def hessian_samples(k: float, n: int, seed: int, component: str = None,
                    tol: Tolerances = DEFAULT_TOLERANCES) -> List[RayVector]:
    """n affine points picked from the traced Hessian branches (optionally one component)."""
    pool: List[RayVector] = []
    for name, ids in hessian_branches(k, tol).items():
        if component is not None and name != component:
            continue
        for branch_id in ids:
            pool += [s for s in trace_branch(k, "H", branch_id, tol=tol).samples if s.is_affine()]
    return SplitMix64(seed).sample(pool, n)


def translation_gaps(k: float, n_samples: int, seed: int = 1,
                     tol: Tolerances = DEFAULT_TOLERANCES) -> List[float]:
    """projective_gap(alpha(U), U + T) over sampled Hessian points, zero at B3."""
    if regime(k, tol) != REGIME_ABOVE_ONE:
        raise DomainError(f"k={k}: the translation property is checked for k > 1 only")
    ctx = GroupLawContext.for_hessian(k, tol=tol)
    torsion = two_torsion(ctx)
    if len(torsion) != 1:
        raise NoConvergence(f"expected one real 2-torsion point, found {len(torsion)}")
    T = torsion[0]
    return [projective_gap(steinian_map(k, U, tol), group_add(ctx, U, T))
            for U in hessian_samples(k, n_samples, seed, tol=tol)]


def translation_check(k: float, n_samples: int, seed: int = 1,
                      tol: Tolerances = DEFAULT_TOLERANCES) -> bool:
    """True iff alpha agrees with translation by the real 2-torsion point on every sample."""
    return max(translation_gaps(k, n_samples, seed, tol)) <= 1e-6
