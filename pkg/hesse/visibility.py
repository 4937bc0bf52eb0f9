"""
Visibility
Visibility of boundary rays of a convex cone from a class A, the visible
extremity, and the count of zeros of G_A(D) = T(A, D, D) along the boundary
arcs of the standard hybrid component.
"""

import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np
from scipy.optimize import minimize_scalar

from utils.console import log

from .cone_atlas import ConeComponent, POSITIVE_CONE, find_component
from .curve_geometry import (
    REGIME_ABOVE_ONE, REGIME_MINUS_TWO, REGIME_ZERO, SWAP_XY, regime, trace_branch,
)
from .exceptions import DomainError, NotOnBoundary
from .forms import (
    RayVector, conic_singular_point, hesse_cubic, hesse_hessian,
    hessian_parameter, polar_quadric, signature,
)
from .steinian import affine_representative, polish_onto
from .tolerances import DEFAULT_TOLERANCES, Tolerances

LINE_READING_NOTE = "the bounding line x = -1(k-1) is read as the asymptote x = -1/(k-1)"

SEGMENT_GRID = 400
BOUNDARY_EPS = 1e-6
ZERO_SAMPLE_TOL = 1e-13
DOUBLE_ZERO_TOL = 1e-8
CHART_SIDE_EPS = 1e-12
THRESHOLD_ABS = 1e-12
INSIDE_COMPONENT = "inside-P"


def _unit(v) -> np.ndarray:
    a = v.array if isinstance(v, RayVector) else np.asarray(v, dtype=float)
    return a / np.linalg.norm(a)


def _unit_rows(points: np.ndarray) -> np.ndarray:
    return points / np.linalg.norm(points, axis=1, keepdims=True)


# ---------------------------------------------------------------------------------
# Visibility
# ---------------------------------------------------------------------------------

def _boundary_kind(comp: ConeComponent, d: np.ndarray) -> str:
    """Which curve D lies on: "F", "H" or "corner" (both)."""
    F = hesse_cubic(comp.k, allow_degenerate=True, tol=comp.tol)
    H = hesse_hessian(comp.k, comp.tol)
    on_f = abs(F.normalized_value(d)) < 1e-7
    on_h = abs(H.normalized_value(d)) < 1e-7
    if on_f and on_h:
        return "corner"
    return "F" if on_f else "H"


def on_boundary(comp: ConeComponent, D0) -> bool:
    """D0 is outside the open cone but D0 nudged towards the witness is inside."""
    d = _unit(D0)
    w = _unit(comp.interior_witness)
    return (not comp.contains(d)) and comp.contains(d + BOUNDARY_EPS * w)


def inward_normal(comp: ConeComponent, D0) -> Optional[np.ndarray]:
    """Gradient of the boundary curve at a smooth boundary ray, pointing into the cone; None at corners."""
    d = _unit(D0)
    kind = _boundary_kind(comp, d)
    if kind == "corner":
        return None
    form = hesse_cubic(comp.k, allow_degenerate=True, tol=comp.tol) if kind == "F" else hesse_hessian(comp.k, comp.tol)
    n = form.gradient(d)
    if float(np.linalg.norm(n)) == 0.0:
        return None
    n = n / np.linalg.norm(n)
    return n if n @ _unit(comp.interior_witness) > 0 else -n


def segment_visible(comp: ConeComponent, A, D0) -> bool:
    """No point of the segment from A to D0 (D0 itself excluded) is interior to the cone."""
    a, d = _unit(A), _unit(D0)
    t = np.concatenate([np.linspace(0.0, 1.0, SEGMENT_GRID, endpoint=False),
                        1.0 - 10.0 ** -np.arange(1, 9)])
    points = (1.0 - t)[:, None] * a + t[:, None] * d
    points = points[np.linalg.norm(points, axis=1) > 1e-12]
    return not bool(np.any(comp.contains_many(points)))


def halfspace_visible(comp: ConeComponent, A, D0) -> Optional[bool]:
    """Tangent criterion: A lies in the closed outer half-space at D0. None at corners."""
    n = inward_normal(comp, D0)
    if n is None:
        return None
    return bool(n @ _unit(A) <= 1e-12)


def chart_pair(comp: ConeComponent, A, D0) -> Tuple[np.ndarray, np.ndarray]:
    """
    Boundary ray for the point D0 (given with either sign) and A moved to the
    same side of z = 0 as that ray, so the segment between them is the
    segment drawn in the chart z = 1.

    Raises:
        NotOnBoundary: If neither D0 nor -D0 is a boundary ray of comp
    """
    d = _unit(D0)
    if not on_boundary(comp, d):
        if not on_boundary(comp, -d):
            raise NotOnBoundary(f"D0={d.tolist()} is not on the boundary of {comp.id}")
        d = -d
    a = _unit(A)
    if a[2] * d[2] < -CHART_SIDE_EPS:
        a = -a
    return a, d


def visible(comp: ConeComponent, A, D0) -> bool:
    """
    Whether the boundary point D0 is visible from A in the chart z = 1.

    A and D0 are read as points; segment_visible and halfspace_visible keep
    the orientation of their rays.

    Raises:
        NotOnBoundary: If D0 is not a boundary point of comp
    """
    a, d = chart_pair(comp, A, D0)
    verdict = segment_visible(comp, a, d)
    tangent = halfspace_visible(comp, a, d)
    if tangent is not None and tangent != verdict:
        log(f"segment and tangent tests disagree at D0={d.tolist()} for A={a.tolist()}", "WARN")
    return verdict


@dataclass(frozen=True)
class ExtremityPoint:
    ray: RayVector
    arc_id: str
    kind: str  # "tangent" or "corner"

    def to_dict(self) -> Dict:
        return {"ray": self.ray.to_list(), "arc": self.arc_id, "kind": self.kind}


def visible_extremity(comp: ConeComponent, A) -> List[ExtremityPoint]:
    """
    Boundary rays visible from both A and -A.

    At smooth points these are the rays whose tangent plane contains A; they
    are located as sign changes of (inward normal . A) along the traced
    boundary and polished onto the curve. Corners are tested by segments.
    """
    a = _unit(A)
    F = hesse_cubic(comp.k, allow_degenerate=True, tol=comp.tol)
    H = hesse_hessian(comp.k, comp.tol)
    found: List[ExtremityPoint] = []
    for arc, sign in comp.boundary:
        form = F if arc.curve == "F" else H
        s = 1.0 if sign == POSITIVE_CONE else -1.0
        rays = _unit_rows(s * arc.array)
        values = form.gradient_many(rays) @ a
        signs = np.sign(values)
        closed = list(range(len(rays) - 1)) + ([len(rays) - 1] if arc.closed else [])
        for i in closed:
            j = (i + 1) % len(rays)
            if signs[i] * signs[j] < 0:
                t = values[i] / (values[i] - values[j])
                guess = (1.0 - t) * rays[i] + t * rays[j]
                ray = s * polish_onto(form, guess)
                found.append(ExtremityPoint(affine_representative(RayVector.of(ray)), arc.branch_id, "tangent"))
    for corner in comp.corner_rays:
        if segment_visible(comp, a, corner) and segment_visible(comp, -a, corner):
            found.append(ExtremityPoint(corner, "corner", "corner"))
    return found


# ---------------------------------------------------------------------------------
# Zero counting
# ---------------------------------------------------------------------------------

@dataclass
class ZeroCountReport:
    """
    Zeros of G_A along the boundary arcs of the standard hybrid component.

    Attributes:
        counts: Sampled zero counts with multiplicity, per arc label
        analytic: Counts predicted by the k > 1 case table (None elsewhere or on ties)
        analytic_case: Label of the table row used
        line_pair_flag: G_A is a line pair (H(A) = 0)
        singular_point: Singular point of the line pair
        double_zeros: Labels and rays of tangential zeros
        notes: Assumptions made while classifying
    """

    k: float
    A: RayVector
    counts: Dict[str, int]
    analytic: Optional[Dict[str, int]] = None
    analytic_case: Optional[str] = None
    line_pair_flag: bool = False
    singular_point: Optional[RayVector] = None
    double_zeros: List[Tuple[str, RayVector]] = field(default_factory=list)
    notes: List[str] = field(default_factory=list)

    @property
    def total(self) -> int:
        return sum(self.counts.values())

    @property
    def tangential(self) -> bool:
        return bool(self.double_zeros)

    @property
    def agree(self) -> Optional[bool]:
        if self.analytic is None:
            return None
        return _nonzero(self.counts) == _nonzero(self.analytic)

    def to_dict(self) -> Dict:
        return {
            "k": self.k,
            "A": self.A.to_list(),
            "counts": dict(self.counts),
            "total": self.total,
            "analytic": self.analytic,
            "analytic_case": self.analytic_case,
            "agree": self.agree,
            "line_pair_flag": self.line_pair_flag,
            "singular_point": self.singular_point.to_list() if self.singular_point else None,
            "double_zeros": [{"arc": label, "ray": ray.to_list()} for label, ray in self.double_zeros],
            "notes": list(self.notes),
        }


def _nonzero(counts: Dict[str, int]) -> Dict[str, int]:
    return {label: n for label, n in counts.items() if n}


def _ga_values(M: np.ndarray, rays: np.ndarray) -> np.ndarray:
    return np.einsum("ni,ij,nj->n", rays, M, rays)


def _arc_zeros(form, M: np.ndarray, rays: np.ndarray) -> List[Tuple[float, int, np.ndarray]]:
    """
    Zeros of D -> D^T M D along sampled unit rays: (position in sample units, multiplicity, ray).

    Odd zeros show up as sign changes; tangential zeros as a local minimum of
    |G| without sign change whose refined value (on the curve) vanishes.
    """
    values = _ga_values(M, rays)
    scale = max(1.0, float(np.max(np.abs(M))))
    signs = np.where(np.abs(values) <= ZERO_SAMPLE_TOL * scale, 0, np.sign(values)).astype(int)
    zeros: List[Tuple[float, int, np.ndarray]] = []
    nonzero = [i for i in range(len(rays)) if signs[i] != 0]

    # sample-exact zeros
    for i in range(len(rays)):
        if signs[i] != 0:
            continue
        left = next((signs[j] for j in range(i - 1, -1, -1) if signs[j] != 0), 0)
        right = next((signs[j] for j in range(i + 1, len(rays)) if signs[j] != 0), 0)
        if i > 0 and signs[i - 1] == 0:
            continue
        mult = 2 if left != 0 and left == right else 1
        zeros.append((float(i), mult, rays[i]))

    # sign changes between consecutive nonzero samples that are adjacent
    for i, j in zip(nonzero, nonzero[1:]):
        if j == i + 1 and signs[i] != signs[j]:
            t = values[i] / (values[i] - values[j])
            zeros.append((i + t, 1, (1.0 - t) * rays[i] + t * rays[j]))

    # tangential zeros between samples
    mags = np.abs(values)
    for i in range(1, len(rays) - 1):
        if signs[i - 1] == 0 or signs[i] == 0 or signs[i + 1] == 0:
            continue
        if not (signs[i - 1] == signs[i] == signs[i + 1]):
            continue
        if mags[i] > mags[i - 1] or mags[i] > mags[i + 1] or mags[i] > 1e-3 * scale:
            continue

        def along(s: float, i=i) -> float:
            guess = rays[i - 1] + s * (rays[i + 1] - rays[i - 1])
            p = polish_onto(form, guess)
            return abs(float(p @ M @ p))

        best = minimize_scalar(along, bounds=(0.0, 1.0), method="bounded", options={"xatol": 1e-10})
        if best.fun <= DOUBLE_ZERO_TOL * scale:
            p = polish_onto(form, rays[i - 1] + best.x * (rays[i + 1] - rays[i - 1]))
            zeros.append((i - 1 + 2 * best.x, 2, p))
    return sorted(zeros, key=lambda z: z[0])


def _standard_arcs(k: float, tol: Tolerances):
    """(label, Arc) pairs along the boundary of the standard hybrid component."""
    r = regime(k, tol)
    if r == REGIME_ABOVE_ONE:
        return [("C1", trace_branch(k, "F", "C1", tol=tol)),
                ("B1R", trace_branch(k, "H", "B1R", tol=tol)),
                ("RB2", trace_branch(k, "H", "RB2", tol=tol))]
    if r == REGIME_MINUS_TWO:
        return [("C1", trace_branch(k, "F", "C1", tol=tol)), ("C3", trace_branch(k, "H", "C3", tol=tol))]
    if r == REGIME_ZERO:
        return [("C1", trace_branch(k, "F", "C1", tol=tol)),
                ("L1", trace_branch(k, "H", "L1", tol=tol)),
                ("L2", trace_branch(k, "H", "L2", tol=tol))]
    return [("C1", trace_branch(k, "F", "C1", tol=tol)), ("C2", trace_branch(k, "H", "C2", tol=tol))]


def ga_zero_count(k: float, A, tol: Tolerances = DEFAULT_TOLERANCES) -> ZeroCountReport:
    """
    Zeros of G_A on the boundary arcs, sampled; for k > 1 also the table prediction.

    For k > 1 the arcs are the closed C1, the open arcs B1R and RB2 of C2, and
    the point R between them.

    Raises:
        DegenerateParameter: If k is near 1
    """
    A = A if isinstance(A, RayVector) else RayVector.of(A)
    r = regime(k, tol)
    F = hesse_cubic(k, allow_degenerate=True, tol=tol)
    H = hesse_hessian(k, tol)
    M = polar_quadric(F, _unit(A)).array
    report = ZeroCountReport(k=float(k), A=A, counts={})

    if abs(H.normalized_value(A)) < tol.on_curve_abs and signature(polar_quadric(F, A), tol)[2] == 1:
        report.line_pair_flag = True
        report.singular_point = affine_representative(conic_singular_point(polar_quadric(F, A), tol))

    for label, arc in _standard_arcs(k, tol):
        form = F if arc.curve == "F" else H
        rays = _unit_rows(arc.array)
        zeros = _arc_zeros(form, M, rays)
        if r == REGIME_ABOVE_ONE and label != "C1":
            # R is the shared endpoint of B1R and RB2; zeros there are reported separately
            at_r = [z for z in zeros if z[0] == (len(rays) - 1 if label == "B1R" else 0)]
            zeros = [z for z in zeros if z not in at_r]
            if label == "RB2" and at_r:
                report.counts["R"] = _multiplicity_at_r(k, M, tol)
        report.counts[label] = sum(m for _, m, _ in zeros)
        report.double_zeros += [(label, RayVector.of(p)) for _, m, p in zeros if m == 2]

    if r == REGIME_ABOVE_ONE:
        report.counts.setdefault("R", 0)
        report.notes.append(LINE_READING_NOTE)
        report.analytic_case, report.analytic = analytic_zero_table(k, A, tol)
        if report.analytic_case == INSIDE_COMPONENT:
            report.notes.append("A lies inside the hybrid component: G_A is positive on its boundary")
    return report


def _multiplicity_at_r(k: float, M: np.ndarray, tol: Tolerances) -> int:
    """Zero of G_A exactly at R: 2 without a sign change across R on C2, else 1."""
    before = trace_branch(k, "H", "B1R", tol=tol).array[-2]
    after = trace_branch(k, "H", "RB2", tol=tol).array[1]
    s1 = np.sign(_ga_values(M, _unit_rows(before[None, :]))[0])
    s2 = np.sign(_ga_values(M, _unit_rows(after[None, :]))[0])
    return 2 if s1 == s2 else 1


def analytic_zero_table(k: float, A: RayVector,
                        tol: Tolerances = DEFAULT_TOLERANCES) -> Tuple[Optional[str], Optional[Dict[str, int]]]:
    """
    Predicted zero counts for k > 1 from the inequalities on A = (a, b, 1).

    The rows hold for A outside the standard hybrid component; G_A and G_-A
    share their zeros, so A is read as the point (a, b, 1).

    Returns:
        (case label, counts) or (label, None) for points at infinity, points
        inside the component, ties and line pairs
    """
    if not A.is_affine():
        return "at-infinity", None
    a, b = A.coords[0] / A.coords[2], A.coords[1] / A.coords[2]
    if find_component(k, "HYBRID[B1B2]", tol).contains((a, b, 1.0)):
        return INSIDE_COMPONENT, None
    c = -1.0 / (k - 1.0)
    kp = hessian_parameter(k, tol)
    thr = kp / (kp - 1.0)
    if a <= c and b <= c:
        return "a<=c,b<=c", {"C1": 2}
    if a > c and b > c:
        if _on_threshold(a, b, thr):
            return "a>c,b>c,a+b=thr", {"R": 2}
        if a + b > thr:
            return "a>c,b>c,a+b>thr", {}
        return "a>c,b>c,a+b<thr", {"B1R": 1, "RB2": 1}
    if a == c or b == c:
        return "tie", None
    mirrored = a > c
    if mirrored:
        a, b = b, a
    label, counts = _left_column(k, a, b, c, thr, tol)
    if counts is not None and mirrored:
        swap = {"B1R": "RB2", "RB2": "B1R"}
        counts = {swap.get(key, key): n for key, n in counts.items()}
    return (f"mirror:{label}" if mirrored else label), counts


def _on_threshold(a: float, b: float, thr: float) -> bool:
    return math.isclose(a + b, thr, rel_tol=0.0, abs_tol=THRESHOLD_ABS * max(1.0, abs(a), abs(b)))


def _left_column(k: float, a: float, b: float, c: float, thr: float,
                 tol: Tolerances) -> Tuple[str, Optional[Dict[str, int]]]:
    """Rows with a < c < b."""
    if _on_threshold(a, b, thr):
        return "a<c,b>c,a+b=thr", {"C1": 1, "B1R": 1, "R": 2}
    if a + b > thr:
        return "a<c,b>c,a+b>thr", {"C1": 1, "B1R": 1}
    H = hesse_hessian(k, tol)
    h = H.normalized_value((a, b, 1.0))
    y_q1 = k / (2.0 * (k - 1.0))
    if abs(h) < tol.on_curve_abs and b > y_q1:
        return "arc Q1B3 (line pair)", None
    if a + b < thr and b > y_q1 and h > 0:
        return "a<c,b>y(Q1),a+b<thr,H>0", {"C1": 1, "B1R": 2, "RB2": 1}
    return "a<c,b>c,otherwise", {"C1": 1, "RB2": 1}


# ---------------------------------------------------------------------------------
# Visibility of the components of C2 cut out by G_A
# ---------------------------------------------------------------------------------

def classify_c2_pieces(k: float, A, tol: Tolerances = DEFAULT_TOLERANCES) -> Dict:
    """
    Split C2 by the sign of G_A and give each piece a witness sub-arc with its
    visibility from A, for A = (a, b, 1) with a < -1/(k-1) < b (or mirrored).

    When H(A) >= 0 the pieces where G_A > 0 are examined and each should carry
    a visible open arc; when H(A) < 0 the pieces where G_A < 0 are examined
    and one should carry an arc that is not visible.

    Raises:
        DomainError: Outside k > 1 or outside the hypothesis region
    """
    A = A if isinstance(A, RayVector) else RayVector.of(A)
    if regime(k, tol) != REGIME_ABOVE_ONE:
        raise DomainError(f"k={k}: the classification needs k > 1")
    if not A.is_affine():
        raise DomainError("A must be affine")
    a, b = A.coords[0] / A.coords[2], A.coords[1] / A.coords[2]
    c = -1.0 / (k - 1.0)
    if a < c < b:
        mirrored = False
    elif b < c < a:
        mirrored = True
        a, b = b, a
    else:
        raise DomainError(f"A=({a}, {b}, 1) is not in a < {c} < b or its mirror")

    std = RayVector((a, b, 1.0))
    F = hesse_cubic(k, tol=tol)
    H = hesse_hessian(k, tol)
    h_nonneg = H.evaluate(std) >= 0.0
    target = 1 if h_nonneg else -1
    comp = find_component(k, "HYBRID[B1B2]", tol)
    c2 = trace_branch(k, "H", "C2", tol=tol)
    rays = _unit_rows(c2.array)
    signs = np.sign(_ga_values(polar_quadric(F, std).array, rays))

    pieces = []
    i = 0
    while i < len(rays):
        if signs[i] != target:
            i += 1
            continue
        j = i
        while j + 1 < len(rays) and signs[j + 1] == target:
            j += 1
        pieces.append(_classify_piece(comp, std, rays, i, j, want_visible=h_nonneg, mirrored=mirrored))
        i = j + 1

    consistent = all(p["witness_visible"] for p in pieces) if h_nonneg \
        else any(not p["witness_visible"] for p in pieces)
    return {
        "k": k,
        "A": A.to_list(),
        "mirrored": mirrored,
        "hessian_sign": "nonneg" if h_nonneg else "negative",
        "examined_sign": "positive" if target > 0 else "negative",
        "pieces": pieces,
        "consistent": bool(consistent) and bool(pieces),
    }


def _classify_piece(comp: ConeComponent, A: RayVector, rays: np.ndarray, i: int, j: int,
                    want_visible: bool, mirrored: bool) -> Dict:
    """Longest run of boundary rays in rays[i..j] whose visibility matches want_visible."""
    verdicts = []
    for idx in range(i, j + 1):
        D0 = -rays[idx]
        try:
            verdicts.append(visible(comp, A, D0))
        except NotOnBoundary:
            verdicts.append(None)
    best, run_start = (0, None), None
    for offset, verdict in enumerate(verdicts + [None]):
        if verdict is want_visible:
            run_start = offset if run_start is None else run_start
            continue
        if run_start is not None and offset - run_start > best[0]:
            best = (offset - run_start, run_start)
        run_start = None
    length, start = best
    if length >= 2:
        witness = rays[i + start:i + start + length]
        witness_visible = want_visible
    else:
        witness = rays[i:j + 1]
        witness_visible = not want_visible
    if mirrored:
        witness = witness @ SWAP_XY.T
    return {
        "sample_range": [int(i), int(j)],
        "witness_arc": [affine_representative(RayVector.of(w)).to_list() for w in witness],
        "witness_visible": bool(witness_visible),
    }
