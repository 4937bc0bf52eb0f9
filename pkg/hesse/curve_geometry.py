"""
Curve Geometry
Real topology of F_k = 0 and H_k = 0: inflexions, asymptotes, traced branches,
line intersections.

Only the branches that are symmetric under x <-> y are traced (C1, C2 and the
bounded oval); the branches meeting at the other inflexion pairs are their
images under the coordinate permutations of (x, y, z - x - y).
"""

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, List, Optional, Tuple, Union

import numpy as np

from .exceptions import DegenerateParameter, IdenticalPoints, NoConvergence, UnknownBranch
from .forms import (
    B1, B2, B3, CENTROID,
    LinearForm3, RayVector, TernaryCubic,
    conic_singular_point, hesse_cubic, hesse_hessian, polar_quadric,
    real_cubic_roots, same_point, second_polar,
)
from .tolerances import DEFAULT_TOLERANCES, DEFAULT_TRACE, Tolerances, TraceSettings

INFLEXIONS = {"B1": B1, "B2": B2, "B3": B3}

# Affine symmetries of F_k and H_k, as matrices acting on (x, y, z).
IDENTITY = np.eye(3)
SWAP_XY = np.array([[0.0, 1.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, 1.0]])
SWAP_UW = np.array([[-1.0, -1.0, 1.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]])
SWAP_VW = np.array([[1.0, 0.0, 0.0], [-1.0, -1.0, 1.0], [0.0, 0.0, 1.0]])

# Frame of each inflexion pair: the symmetry carrying the B1B2 pair onto it.
FRAMES: Dict[str, np.ndarray] = {"B1B2": IDENTITY, "B2B3": SWAP_UW, "B3B1": SWAP_VW}

REGIME_ABOVE_ONE = "k>1"
REGIME_BELOW_ONE = "k<1"
REGIME_ZERO = "k=0"
REGIME_MINUS_TWO = "k=-2"

DEGENERATE_LINE_TRIPLE = "DEGENERATE_LINE_TRIPLE"
DEGENERATE_LINE_PLUS_POINT = "DEGENERATE_LINE_PLUS_POINT"


def regime(k: float, tol: Tolerances = DEFAULT_TOLERANCES) -> str:
    """Classify k into the four topological regimes."""
    if abs(k - 1.0) <= tol.degenerate_k_band:
        raise DegenerateParameter(f"k={k} is within {tol.degenerate_k_band} of 1; the cubic splits")
    if k > 1.0:
        return REGIME_ABOVE_ONE
    if abs(k) <= tol.degenerate_k_band:
        return REGIME_ZERO
    if abs(k + 2.0) <= tol.degenerate_k_band:
        return REGIME_MINUS_TWO
    return REGIME_BELOW_ONE


@dataclass(frozen=True)
class Arc:
    """A sampled branch of F = 0 or H = 0 with its endpoint rays."""

    curve: str
    branch_id: str
    samples: Tuple[RayVector, ...]
    endpoints: Tuple[RayVector, RayVector]
    closed: bool = False

    @property
    def array(self) -> np.ndarray:
        return np.array([s.coords for s in self.samples])

    def affine_points(self) -> np.ndarray:
        """(x, y) of the samples with z != 0."""
        pts = self.array
        keep = np.abs(pts[:, 2]) > 1e-12 * np.max(np.abs(pts), axis=1)
        pts = pts[keep]
        return pts[:, :2] / pts[:, 2:3]

    def mapped(self, matrix: np.ndarray, branch_id: str) -> "Arc":
        """Image under a linear symmetry, renamed."""
        samples = tuple(_rescale_like(matrix @ s.array, s) for s in self.samples)
        ends = tuple(_rescale_like(matrix @ e.array, e) for e in self.endpoints)
        return Arc(self.curve, branch_id, samples, ends, self.closed)

    def reversed(self, branch_id: Optional[str] = None) -> "Arc":
        return Arc(self.curve, branch_id or self.branch_id, self.samples[::-1],
                   (self.endpoints[1], self.endpoints[0]), self.closed)

    def to_dict(self) -> Dict:
        return {
            "curve": self.curve,
            "branch_id": self.branch_id,
            "samples": [s.to_list() for s in self.samples],
        }


def _rescale_like(v: np.ndarray, original: RayVector) -> RayVector:
    """The frame symmetries fix z, so affine samples stay on z = 1; rays at infinity are renormalized."""
    if original.is_affine():
        return RayVector.of(v)
    return RayVector.of(v).normalized()


@dataclass(frozen=True)
class CurveTopology:
    k: float
    f_components: int
    h_components: Union[int, str]
    inflexions: Tuple[RayVector, RayVector, RayVector]
    asymptotes: Tuple[LinearForm3, LinearForm3, LinearForm3]

    def to_dict(self) -> Dict:
        return {
            "k": self.k,
            "f_components": self.f_components,
            "h_components": self.h_components,
            "inflexions": [b.to_list() for b in self.inflexions],
            "asymptotes": [a.to_list() for a in self.asymptotes],
        }


def curve_topology(k: float, tol: Tolerances = DEFAULT_TOLERANCES) -> CurveTopology:
    """Component counts of F = 0 and H = 0 for the regime of k."""
    r = regime(k, tol)
    if r == REGIME_ABOVE_ONE:
        f_count, h_count = 2, 1
    elif r == REGIME_BELOW_ONE:
        f_count, h_count = 1, 2
    elif r == REGIME_ZERO:
        f_count, h_count = 1, DEGENERATE_LINE_TRIPLE
    else:
        f_count, h_count = 1, DEGENERATE_LINE_PLUS_POINT
    return CurveTopology(k, f_count, h_count, inflexion_points(k, tol), asymptotes(k, tol))


def inflexion_points(k: float, tol: Tolerances = DEFAULT_TOLERANCES) -> Tuple[RayVector, RayVector, RayVector]:
    regime(k, tol)
    return (B1, B2, B3)


def asymptotes(k: float, tol: Tolerances = DEFAULT_TOLERANCES) -> Tuple[LinearForm3, LinearForm3, LinearForm3]:
    """
    Tangent lines at B1, B2, B3: x = -z/(k-1), y = -z/(k-1), x + y = kz/(k-1).

    Each covector is the second polar at its inflexion, sup-norm normalized,
    so orientation agrees with second_polar.
    """
    F = hesse_cubic(k, tol=tol)
    return tuple(second_polar(F, b).normalized() for b in (B1, B2, B3))


def named_points(k: float, tol: Tolerances = DEFAULT_TOLERANCES) -> Dict[str, RayVector]:
    """B1, B2, B3, the centroid and, where defined, Q1 = a(B1), Q2 = a(B2), R = a(B3)."""
    r = regime(k, tol)
    points = dict(INFLEXIONS)
    points["centroid"] = CENTROID
    if r in (REGIME_ABOVE_ONE, REGIME_BELOW_ONE):
        F = hesse_cubic(k, tol=tol)
        for label, b in (("Q1", B1), ("Q2", B2), ("R", B3)):
            p = conic_singular_point(polar_quadric(F, b), tol)
            points[label] = RayVector.of(p.array / p.coords[2])
    return points


def steinian_closed_forms(k: float) -> Dict[str, RayVector]:
    """Q1, Q2, R from their closed forms (k != 1)."""
    c = -1.0 / (k - 1.0)
    h = k / (2.0 * (k - 1.0))
    return {
        "Q1": RayVector((c, h, 1.0)),
        "Q2": RayVector((h, c, 1.0)),
        "R": RayVector((h, h, 1.0)),
    }


def asymptote_tangency(k: float, tol: Tolerances = DEFAULT_TOLERANCES) -> List[Dict]:
    """
    Contact of each asymptote with the Hessian.

    Returns:
        One dict per inflexion with the contact point, the residual of the
        asymptote at it, the normalized Hessian value and the angle defect
        between the asymptote and the Hessian tangent there
    """
    r = regime(k, tol)
    if r not in (REGIME_ABOVE_ONE, REGIME_BELOW_ONE):
        raise DegenerateParameter(f"k={k}: the Hessian is degenerate")
    F = hesse_cubic(k, tol=tol)
    H = hesse_hessian(k, tol)
    rows = []
    for label, b in INFLEXIONS.items():
        line = second_polar(F, b)
        contact = conic_singular_point(polar_quadric(F, b), tol)
        l_hat = line.array / np.linalg.norm(line.array)
        c_hat = contact.array / np.linalg.norm(contact.array)
        grad = H.gradient(c_hat)
        defect = float(np.linalg.norm(np.cross(l_hat, grad / np.linalg.norm(grad))))
        rows.append({
            "inflexion": label,
            "contact": contact,
            "line_residual": abs(float(l_hat @ c_hat)),
            "hessian_residual": abs(H.normalized_value(contact)),
            "tangency_defect": defect,
        })
    return rows


# ---------------------------------------------------------------------------------
# Line intersections
# ---------------------------------------------------------------------------------

def restricted_coefficients(C: TernaryCubic, P: np.ndarray, Q: np.ndarray) -> Tuple[float, float, float, float]:
    """(a3, a2, a1, a0) with C(P + tQ) = a3 t^3 + a2 t^2 + a1 t + a0."""
    T = C.trilinear
    return (C.evaluate(Q), 3.0 * T(P, Q, Q), 3.0 * T(P, P, Q), C.evaluate(P))


def line_cubic_intersections(C: TernaryCubic, p1, p2) -> List[Tuple[RayVector, int]]:
    """
    Real intersections of C with the line through p1 and p2.

    The line is re-parameterized from an orthonormal basis rotated so the
    leading coefficient is as large as possible; no root then sits at
    infinity.

    Args:
        C: Cubic form
        p1, p2: Two points spanning the line

    Returns:
        List of (canonical point, multiplicity), multiplicities summing to 1 or 3

    Raises:
        IdenticalPoints: If p1 and p2 are linearly dependent
    """
    a = p1.array if isinstance(p1, RayVector) else np.asarray(p1, dtype=float)
    b = p2.array if isinstance(p2, RayVector) else np.asarray(p2, dtype=float)
    e1 = a / np.linalg.norm(a)
    b_perp = b - (b @ e1) * e1
    if np.linalg.norm(b_perp) <= 1e-12 * np.linalg.norm(b):
        raise IdenticalPoints("points do not span a line")
    e2 = b_perp / np.linalg.norm(b_perp)

    angles = np.linspace(0.0, math.pi, 24, endpoint=False)
    values = [abs(C.evaluate(math.cos(t) * e1 + math.sin(t) * e2)) for t in angles]
    theta = angles[int(np.argmax(values))]
    lead = math.cos(theta) * e1 + math.sin(theta) * e2
    base = -math.sin(theta) * e1 + math.cos(theta) * e2

    result = []
    for r, mult in real_cubic_roots(restricted_coefficients(C, base, lead)):
        result.append((RayVector.of(base + r * lead).canonical(), mult))
    return result


# ---------------------------------------------------------------------------------
# Branch tracing
# ---------------------------------------------------------------------------------

def _affine_value(C: TernaryCubic, p: np.ndarray) -> float:
    return C.evaluate((p[0], p[1], 1.0))


def _affine_gradient(C: TernaryCubic, p: np.ndarray) -> np.ndarray:
    return C.gradient((p[0], p[1], 1.0))[:2]


def _normalized_residual(C: TernaryCubic, p: np.ndarray) -> float:
    size = max(1.0, abs(p[0]), abs(p[1]))
    return abs(_affine_value(C, p)) / (size ** 3 * C.scale)


def _correct(C: TernaryCubic, q: np.ndarray, target: float) -> Optional[np.ndarray]:
    """Newton projection onto the level set along the gradient."""
    for _ in range(25):
        if _normalized_residual(C, q) < target:
            return q
        g = _affine_gradient(C, q)
        gg = float(g @ g)
        if gg == 0.0:
            return None
        q = q - _affine_value(C, q) * g / gg
    return q if _normalized_residual(C, q) < target else None


def _ray_angle(p: np.ndarray, q: np.ndarray) -> float:
    a = np.array([p[0], p[1], 1.0])
    b = np.array([q[0], q[1], 1.0])
    return math.atan2(np.linalg.norm(np.cross(a, b)), float(a @ b))


def _march(C: TernaryCubic, start: np.ndarray, heading: np.ndarray, settings: TraceSettings,
           target: float, closing: bool) -> List[np.ndarray]:
    """
    Predictor-corrector march from start along heading.

    Stops when |x| + |y| exceeds the cutoff or, when closing, when the
    march returns to start.
    """
    pts = [start]
    p = start
    prev = heading / np.linalg.norm(heading)
    travelled = 0.0
    for _ in range(200000):
        g = _affine_gradient(C, p)
        tangent = np.array([-g[1], g[0]]) / np.linalg.norm(g)
        if tangent @ prev < 0:
            tangent = -tangent
        h = 0.9 * settings.max_arc_step * math.sqrt(1.0 + p @ p)
        while True:
            q = _correct(C, p + h * tangent, target)
            if q is not None and _ray_angle(p, q) <= settings.max_arc_step:
                gq = _affine_gradient(C, q)
                tq = np.array([-gq[1], gq[0]]) / np.linalg.norm(gq)
                if abs(float(tq @ tangent)) > math.cos(0.25) and (q - p) @ tangent > 0:
                    break
            h *= 0.5
            if h < 1e-12:
                raise NoConvergence(f"branch tracing stalled at {p.tolist()}")
        travelled += float(np.linalg.norm(q - p))
        if closing and travelled > 4 * h and np.linalg.norm(q - start) < 1.5 * h:
            return pts
        pts.append(q)
        prev, p = tangent, q
        if abs(p[0]) + abs(p[1]) > settings.cutoff:
            return pts
    raise NoConvergence("branch tracing exceeded the step budget")


def _diagonal_roots(C: TernaryCubic) -> List[float]:
    """t with C(t, t, 1) = 0."""
    coeffs = restricted_coefficients(C, np.array([0.0, 0.0, 1.0]), np.array([1.0, 1.0, 0.0]))
    return [r for r, _ in real_cubic_roots(coeffs)]


def _snap_to_inflexion(p: np.ndarray) -> RayVector:
    """The signed inflexion ray closest to the direction of a far affine point."""
    direction = np.array([p[0], p[1], 0.0])
    direction /= np.linalg.norm(direction)
    best, best_dot = None, -2.0
    for b in (B1, B2, B3):
        for s in (1.0, -1.0):
            v = s * b.array / np.linalg.norm(b.array)
            if v @ direction > best_dot:
                best, best_dot = RayVector.of(s * b.array), float(v @ direction)
    return best


def _trace_unbounded(C: TernaryCubic, seed: float, curve: str, branch_id: str,
                     settings: TraceSettings, target: float) -> Arc:
    start = np.array([seed, seed])
    start = _correct(C, start, target)
    g = _affine_gradient(C, start)
    heading = np.array([-g[1], g[0]])
    forward = _march(C, start, heading, settings, target, closing=False)
    backward = _march(C, start, -heading, settings, target, closing=False)
    pts = backward[::-1] + forward[1:]
    ends = [_snap_to_inflexion(pts[0]), _snap_to_inflexion(pts[-1])]
    # B1-end first
    if not same_point(ends[0], B1):
        pts, ends = pts[::-1], ends[::-1]
    samples = [ends[0]] + [RayVector((x, y, 1.0)) for x, y in pts] + [ends[1]]
    return Arc(curve, branch_id, tuple(samples), (ends[0], ends[1]))


def _trace_oval(C: TernaryCubic, seed: float, curve: str, settings: TraceSettings, target: float) -> Arc:
    start = _correct(C, np.array([seed, seed]), target)
    g = _affine_gradient(C, start)
    pts = _march(C, start, np.array([-g[1], g[0]]), settings, target, closing=True)
    samples = tuple(RayVector((x, y, 1.0)) for x, y in pts)
    return Arc(curve, "BOUNDED", samples, (samples[0], samples[0]), closed=True)


def _polyline_ray(start: np.ndarray, direction: np.ndarray, settings: TraceSettings) -> List[np.ndarray]:
    """Affine points start + s * direction, s from 0 out to the cutoff, angle-bounded spacing."""
    pts, s = [], 0.0
    while True:
        p = start + s * direction
        pts.append(p)
        if abs(p[0]) + abs(p[1]) > settings.cutoff:
            return pts
        s += 0.9 * settings.max_arc_step * math.sqrt(1.0 + p @ p)


def _polyline_segment(a: np.ndarray, b: np.ndarray, settings: TraceSettings) -> List[np.ndarray]:
    n = max(2, int(math.ceil(np.linalg.norm(b - a) / (0.5 * settings.max_arc_step))) + 1)
    return [a + t * (b - a) for t in np.linspace(0.0, 1.0, n)]


def _fermat_lines_arc(settings: TraceSettings) -> Arc:
    """C2 at k = 0: L1 (x = 0, y <= 0) followed by L2 (y = 0, x <= 0)."""
    l1 = _polyline_ray(np.zeros(2), np.array([0.0, -1.0]), settings)[::-1]
    l2 = _polyline_ray(np.zeros(2), np.array([-1.0, 0.0]), settings)[1:]
    ends = (RayVector((0.0, -1.0, 0.0)), RayVector((-1.0, 0.0, 0.0)))
    samples = [ends[0]] + [RayVector((x, y, 1.0)) for x, y in l1 + l2] + [ends[1]]
    return Arc("H", "C2", tuple(samples), ends)


def _fermat_triangle_arc(settings: TraceSettings) -> Arc:
    corners = [np.array([0.0, 0.0]), np.array([1.0, 0.0]), np.array([0.0, 1.0])]
    pts: List[np.ndarray] = []
    for i in range(3):
        pts += _polyline_segment(corners[i], corners[(i + 1) % 3], settings)[:-1]
    samples = tuple(RayVector((x, y, 1.0)) for x, y in pts)
    return Arc("H", "BOUNDED", samples, (samples[0], samples[0]), closed=True)


def _segment_at_infinity(settings: TraceSettings) -> Arc:
    """C3 at k = -2: rays (s, 1 - s, 0) from B1 to B2."""
    n = int(math.ceil(1.0 / (0.5 * settings.max_arc_step))) + 1
    samples = tuple(RayVector((s, 1.0 - s, 0.0)).normalized() for s in np.linspace(0.0, 1.0, n))
    return Arc("H", "C3", samples, (B1, B2))


FRAMED_ALIASES = {"F[B1B2]": "C1", "H[B1B2]": "C2", "C3[B1B2]": "C3"}

# sub-arcs of the Hessian for k > 1: (parent branch, split label, first half, second half)
HESSIAN_SPLITS = {
    "B1R": ("C2", "R", 0), "RB2": ("C2", "R", 1),
    "Q1B3": ("H[B2B3]", "Q1", 1), "B2Q1": ("H[B2B3]", "Q1", 0),
    "B3Q2": ("H[B3B1]", "Q2", 0), "Q2B1": ("H[B3B1]", "Q2", 1),
}


def branch_catalog(k: float, tol: Tolerances = DEFAULT_TOLERANCES) -> Dict[str, str]:
    """Valid branch ids for the regime of k, mapped to their curve (F or H)."""
    r = regime(k, tol)
    catalog = {"C1": "F", "F[B2B3]": "F", "F[B3B1]": "F"}
    if r == REGIME_MINUS_TWO:
        catalog.update({"C3": "H", "C3[B2B3]": "H", "C3[B3B1]": "H"})
        return catalog
    catalog.update({"C2": "H", "H[B2B3]": "H", "H[B3B1]": "H"})
    if r == REGIME_ABOVE_ONE:
        catalog["BOUNDED"] = "F"
        catalog.update({label: "H" for label in HESSIAN_SPLITS})
    else:
        catalog["BOUNDED"] = "H"
    if r == REGIME_ZERO:
        catalog.update({"L1": "H", "L2": "H"})
    return catalog


def trace_branch(k: float, curve: str, branch_id: str,
                 settings: TraceSettings = DEFAULT_TRACE,
                 tol: Tolerances = DEFAULT_TOLERANCES) -> Arc:
    """
    Sampled branch of F_k = 0 or H_k = 0.

    Args:
        k: Hesse parameter
        curve: "F" or "H"
        branch_id: Label such as C1, C2, C3, BOUNDED, B1R, Q1B3 or a framed label like F[B2B3]
        settings: Step and cutoff settings
        tol: Tolerances

    Returns:
        Arc whose first endpoint is the first inflexion of its label

    Raises:
        UnknownBranch: If branch_id (or curve) does not fit the regime of k
    """
    branch_id = FRAMED_ALIASES.get(branch_id, branch_id)
    catalog = branch_catalog(k, tol)
    if catalog.get(branch_id) != curve:
        raise UnknownBranch(
            f"Unknown branch: {curve}:{branch_id} for k={k}. "
            f"Available: {sorted(f'{c}:{b}' for b, c in catalog.items())}"
        )
    return _trace_cached(float(k), branch_id, settings, tol)


@lru_cache(maxsize=512)
def _trace_cached(k: float, branch_id: str, settings: TraceSettings, tol: Tolerances) -> Arc:
    r = regime(k, tol)
    target = 1e-3 * tol.on_curve_abs
    F = hesse_cubic(k, tol=tol)

    if "[" in branch_id:
        family, frame = branch_id[:-1].split("[")
        base = {"F": "C1", "H": "C2", "C3": "C3"}[family]
        # both frame symmetries swap the B1-end to the far end of the label
        return _trace_cached(k, base, settings, tol).mapped(FRAMES[frame], branch_id).reversed()

    if branch_id in HESSIAN_SPLITS:
        parent_id, label, half = HESSIAN_SPLITS[branch_id]
        parent = _trace_cached(k, parent_id, settings, tol)
        return _split_arc(parent, named_points(k, tol)[label], branch_id, half)

    if branch_id == "C1":
        roots = _diagonal_roots(F)
        seed = min(roots) if r == REGIME_ABOVE_ONE else max(roots)
        return _trace_unbounded(F, seed, "F", "C1", settings, target)
    if r == REGIME_MINUS_TWO and branch_id == "C3":
        return _segment_at_infinity(settings)
    if r == REGIME_ZERO:
        if branch_id == "BOUNDED":
            return _fermat_triangle_arc(settings)
        lines = _fermat_lines_arc(settings)
        if branch_id == "C2":
            return lines
        corner = next(i for i, s in enumerate(lines.samples) if s.coords == (0.0, 0.0, 1.0))
        if branch_id == "L1":
            return Arc("H", "L1", lines.samples[:corner + 1], (lines.endpoints[0], lines.samples[corner]))
        return Arc("H", "L2", lines.samples[corner:], (lines.samples[corner], lines.endpoints[1]))

    H = hesse_hessian(k, tol)
    if branch_id == "C2":
        roots = _diagonal_roots(H)
        seed = max(roots) if r == REGIME_ABOVE_ONE else min(roots)
        return _trace_unbounded(H, seed, "H", "C2", settings, target)
    # bounded oval: the smaller diagonal crossing inside the triangle
    curve = F if r == REGIME_ABOVE_ONE else H
    inside = sorted(t for t in _diagonal_roots(curve) if 0.0 < t < 0.5)
    return _trace_oval(curve, inside[0], "F" if curve is F else "H", settings, target)


def _split_arc(arc: Arc, point: RayVector, branch_id: str, half: int) -> Arc:
    """One side of an arc cut at an affine point lying on it; both sides share the point."""
    pts = arc.array
    affine = np.abs(pts[:, 2]) > 0
    xy = pts[:, :2] / np.where(affine, pts[:, 2], 1.0)[:, None]
    target = np.array(point.coords[:2]) / point.coords[2]
    dists = np.where(affine, np.linalg.norm(xy - target, axis=1), np.inf)
    i = int(np.argmin(dists))
    cut = RayVector((target[0], target[1], 1.0))
    if dists[i] < 1e-12:
        before, after = arc.samples[:i], arc.samples[i + 1:]
    elif i + 1 < len(xy) and np.linalg.norm(xy[i + 1] - target) < np.linalg.norm(xy[i + 1] - xy[i]):
        before, after = arc.samples[:i + 1], arc.samples[i + 1:]
    else:
        before, after = arc.samples[:i], arc.samples[i:]
    if half == 0:
        return Arc(arc.curve, branch_id, before + (cut,), (arc.endpoints[0], cut))
    return Arc(arc.curve, branch_id, (cut,) + after, (cut, arc.endpoints[1]))
