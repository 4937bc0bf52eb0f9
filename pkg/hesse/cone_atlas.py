"""
Cone Atlas
Components of the positive index cone of F_k and the subcones
Q = {D in P : G_E(D) > 0} cut out by a class E.

Membership is decided by exact sign tests in the coordinates
(u, v, w) = (x, y, z - x - y): each component is a sign pattern of (u, v, w)
together with F > 0 and H > 0. Components of the non-standard frames are
images of the standard ones under the coordinate permutations.
"""

from dataclasses import dataclass, field
from functools import cached_property
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy import ndimage
from scipy.linalg import null_space
from scipy.spatial import ConvexHull, QhullError

from utils.console import log
from utils.seeded_rng import SplitMix64

from .curve_geometry import (
    FRAMES, REGIME_ABOVE_ONE, REGIME_MINUS_TWO, Arc, regime, trace_branch,
)
from .exceptions import DomainError
from .forms import (
    CENTROID, HESSE_FRAME, RayVector, hesse_cubic, hesse_hessian,
    polar_quadric, signature,
)
from .tolerances import DEFAULT_TOLERANCES, DEFAULT_TRACE, Tolerances, TraceSettings

BOUNDED_POSITIVE = "BOUNDED_POSITIVE"
HYBRID = "HYBRID"
NEG_BOUNDED_HESSIAN = "NEG_BOUNDED_HESSIAN"
KM2_SPECIAL = "KM2_SPECIAL"
NONE = "NONE"

POSITIVE_CONE = "positive-cone"
NEGATIVE_CONE = "negative-cone"


@dataclass(frozen=True)
class ComponentShape:
    """Standard-frame description: sign pattern of (u, v, w), chart normal, witness, corners."""

    kind: str
    signs: Tuple[int, int, int]
    chart_normal: Tuple[float, float, float]
    witness: Tuple[float, float, float]
    corners: Tuple[Tuple[float, float, float], ...]
    arcs: Tuple[Tuple[str, str, str], ...]  # (curve, branch family, cone sign)


def _shapes(k: float, tol: Tolerances) -> List[Tuple[ComponentShape, Optional[str]]]:
    """(shape, frame) pairs for every component of the regime; frame None means unframed."""
    r = regime(k, tol)
    if r == REGIME_ABOVE_ONE:
        bounded = ComponentShape(
            BOUNDED_POSITIVE, (1, 1, 1), (0.0, 0.0, 1.0), CENTROID.coords, (),
            (("F", "BOUNDED", POSITIVE_CONE),),
        )
        hybrid = ComponentShape(
            HYBRID, (-1, -1, 1), (-1.0, -1.0, 0.0), (-1.0, -1.0, 0.0),
            ((0.0, -1.0, 0.0), (-1.0, 0.0, 0.0)),
            (("F", "F", POSITIVE_CONE), ("H", "H", NEGATIVE_CONE)),
        )
        return [(bounded, None)] + [(hybrid, frame) for frame in FRAMES]

    if r == REGIME_MINUS_TWO:
        special = ComponentShape(
            KM2_SPECIAL, (1, 1, -1), (1.0, 1.0, -1.0), (1.0, 1.0, 0.5),
            ((0.0, 1.0, 0.0), (1.0, 0.0, 0.0)),
            (("F", "F", POSITIVE_CONE), ("H", "C3", POSITIVE_CONE)),
        )
        return [(special, frame) for frame in FRAMES]

    hybrid = ComponentShape(
        HYBRID, (1, 1, -1), (1.0, 1.0, -1.0), (1.0, 1.0, 0.0),
        ((0.0, 1.0, 0.0), (1.0, 0.0, 0.0)),
        (("F", "F", POSITIVE_CONE), ("H", "H", NEGATIVE_CONE)),
    )
    negative = ComponentShape(
        NEG_BOUNDED_HESSIAN, (-1, -1, -1), (0.0, 0.0, -1.0), tuple(-c for c in CENTROID.coords), (),
        (("H", "BOUNDED", NEGATIVE_CONE),),
    )
    return [(hybrid, frame) for frame in FRAMES] + [(negative, None)]


def _frame_image(matrix: np.ndarray, v: Sequence[float]) -> RayVector:
    """Image of a ray under a frame symmetry, keeping affine points on z = 1."""
    image = matrix @ np.asarray(v, dtype=float)
    ray = RayVector.of(image)
    return ray if ray.is_affine() else ray.normalized()


@dataclass(frozen=True)
class ConeComponent:
    """
    One connected component of {F > 0, H > 0} with a fixed sign pattern.

    Attributes:
        id: BOUNDED_POSITIVE, NEG_BOUNDED_HESSIAN, HYBRID[B1B2], HYBRID[B2B3], ...
        kind: Component kind
        k: Hesse parameter
        frame: Inflexion pair of a hybrid component, None for the bounded ones
        corner_rays: Rays where an F-arc meets an H-arc
        interior_witness: A point of the open component
        chart_normal: Covector positive on the closed component
        in_positive_index_cone: Whether the polar form has index (1, 2) inside
        witness_signature: Signature of the polar form at the witness
    """

    id: str
    kind: str
    k: float
    frame: Optional[str]
    shape: ComponentShape = field(repr=False)
    corner_rays: Tuple[RayVector, ...]
    interior_witness: RayVector
    chart_normal: np.ndarray = field(repr=False, compare=False)
    in_positive_index_cone: bool
    witness_signature: Tuple[int, int, int]
    tol: Tolerances = field(default=DEFAULT_TOLERANCES, repr=False, compare=False)

    @property
    def frame_matrix(self) -> np.ndarray:
        return FRAMES[self.frame] if self.frame else np.eye(3)

    @cached_property
    def boundary(self) -> Tuple[Tuple[Arc, str], ...]:
        """Traced boundary arcs with the cone sign each contributes with."""
        pieces = []
        for curve, family, sign in self.shape.arcs:
            if family in ("F", "H", "C3"):
                base = {"F": "C1", "H": "C2", "C3": "C3"}[family]
                branch_id = base if self.frame in (None, "B1B2") else f"{family}[{self.frame}]"
            else:
                branch_id = family
            pieces.append((trace_branch(self.k, curve, branch_id, tol=self.tol), sign))
        return tuple(pieces)

    def boundary_points(self) -> np.ndarray:
        """Boundary samples as oriented rays, one per row."""
        rows = []
        for arc, sign in self.boundary:
            s = 1.0 if sign == POSITIVE_CONE else -1.0
            rows.append(s * arc.array)
        return np.vstack(rows)

    def contains_many(self, points: np.ndarray) -> np.ndarray:
        """Vectorized sign-pattern membership of rays (rows)."""
        p = np.atleast_2d(np.asarray(points, dtype=float))
        standard = p @ self.frame_matrix.T
        uvw = standard @ HESSE_FRAME.T
        pattern = np.all(uvw * np.asarray(self.shape.signs) > 0, axis=1)
        sup = np.max(np.abs(p), axis=1)
        F = hesse_cubic(self.k, allow_degenerate=True, tol=self.tol)
        H = hesse_hessian(self.k, self.tol)
        f_vals = F.evaluate_many(p) / (sup ** 3 * F.scale)
        h_vals = H.evaluate_many(p) / (sup ** 3 * H.scale)
        return pattern & (f_vals > self.tol.on_curve_abs) & (h_vals > self.tol.on_curve_abs)

    def contains(self, D) -> bool:
        return bool(self.contains_many(_ray_array(D))[0])

    @cached_property
    def chart(self) -> "Chart":
        return Chart(self.chart_normal)

    def interior_points(self, raster_size: int = DEFAULT_TRACE.raster_size) -> np.ndarray:
        """Chart raster points inside the component (rays normalized to chart_normal . D = 1)."""
        grid = self.chart.raster(self.boundary_points(), raster_size)
        inside = self.contains_many(grid.points.reshape(-1, 3))
        return grid.points.reshape(-1, 3)[inside]

    def to_dict(self) -> Dict:
        return {
            "id": self.id,
            "kind": self.kind,
            "corner_rays": [c.to_list() for c in self.corner_rays],
            "witness": self.interior_witness.to_list(),
            "in_positive_index_cone": self.in_positive_index_cone,
            "witness_signature": list(self.witness_signature),
        }


def _ray_array(D) -> np.ndarray:
    return D.array if isinstance(D, RayVector) else np.asarray(D, dtype=float)


def positive_index_membership(k: float, D, tol: Tolerances = DEFAULT_TOLERANCES) -> bool:
    """F(D) > 0 and the polar form G_D has signature (1, 2, 0)."""
    F = hesse_cubic(k, allow_degenerate=True, tol=tol)
    d = _ray_array(D)
    if not np.any(d):
        raise DomainError("D must be nonzero")
    if F.normalized_value(d) <= tol.on_curve_abs:
        return False
    return signature(polar_quadric(F, d), tol) == (1, 2, 0)


def enumerate_components(k: float, tol: Tolerances = DEFAULT_TOLERANCES) -> List[ConeComponent]:
    """
    Components of {F > 0, H > 0} for the regime of k.

    k > 1 gives the bounded positive component and three hybrids, k < 1 three
    hybrids and the negative of the bounded Hessian region, k = -2 three
    special components.

    Raises:
        DegenerateParameter: If k is near 1
    """
    F = hesse_cubic(k, allow_degenerate=True, tol=tol)
    components = []
    for shape, frame in _shapes(k, tol):
        matrix = FRAMES[frame] if frame else np.eye(3)
        witness = _frame_image(matrix, shape.witness)
        sig = signature(polar_quadric(F, witness), tol)
        component_id = f"{shape.kind}[{frame}]" if frame else shape.kind
        components.append(ConeComponent(
            id=component_id,
            kind=shape.kind,
            k=float(k),
            frame=frame,
            shape=shape,
            corner_rays=tuple(_frame_image(matrix, c) for c in shape.corners),
            interior_witness=witness,
            chart_normal=matrix.T @ np.asarray(shape.chart_normal),
            in_positive_index_cone=sig == (1, 2, 0),
            witness_signature=sig,
            tol=tol,
        ))
        if sig != (1, 2, 0):
            log(f"{component_id} at k={k}: witness signature {sig}", "INFO")
    return components


def component_of(k: float, D, tol: Tolerances = DEFAULT_TOLERANCES) -> str:
    """Id of the positive index component containing D, else NONE."""
    if not positive_index_membership(k, D, tol):
        return NONE
    for comp in enumerate_components(k, tol):
        if comp.in_positive_index_cone and comp.contains(D):
            return comp.id
    return NONE


def find_component(k: float, component_id: str, tol: Tolerances = DEFAULT_TOLERANCES) -> ConeComponent:
    components = enumerate_components(k, tol)
    for comp in components:
        if comp.id == component_id:
            return comp
    raise DomainError(
        f"Unknown component: {component_id} at k={k}. Available: {[c.id for c in components]}"
    )


def atlas_to_dict(k: float, tol: Tolerances = DEFAULT_TOLERANCES) -> Dict:
    return {"k": k, "components": [c.to_dict() for c in enumerate_components(k, tol)]}


# ---------------------------------------------------------------------------------
# Charts and rasters
# ---------------------------------------------------------------------------------

@dataclass
class RasterGrid:
    points: np.ndarray   # (n, n, 3) rays on the chart plane
    coords: np.ndarray   # (n, n, 2) chart coordinates
    cell: float


class Chart:
    """The affine plane normal . D = 1 with an orthonormal basis of its directions."""

    def __init__(self, normal: np.ndarray):
        self.normal = np.asarray(normal, dtype=float)
        self.origin = self.normal / float(self.normal @ self.normal)
        self.basis = null_space(self.normal.reshape(1, 3))

    def project(self, points: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        """Chart coordinates of rays with normal . D > 0, plus the mask of those rays."""
        p = np.atleast_2d(points)
        heights = p @ self.normal
        keep = heights > 1e-12
        on_plane = p[keep] / heights[keep, None]
        return (on_plane - self.origin) @ self.basis, keep

    def lift(self, coords: np.ndarray) -> np.ndarray:
        return self.origin + np.asarray(coords) @ self.basis.T

    def raster(self, boundary: np.ndarray, size: int) -> RasterGrid:
        coords, _ = self.project(boundary)
        lo, hi = coords.min(axis=0), coords.max(axis=0)
        span = float(np.max(hi - lo))
        pad = 0.5 * span / size
        s = np.linspace(lo[0] - pad, lo[0] + span + pad, size)
        t = np.linspace(lo[1] - pad, lo[1] + span + pad, size)
        ss, tt = np.meshgrid(s, t, indexing="ij")
        grid = np.stack([ss, tt], axis=-1)
        return RasterGrid(self.lift(grid), grid, float(s[1] - s[0]))


# ---------------------------------------------------------------------------------
# Subcones
# ---------------------------------------------------------------------------------

@dataclass
class Region:
    """A connected raster region of a subcone with its convex hull in chart coordinates."""

    parent: ConeComponent
    e_class: RayVector
    chart: Chart
    interior: np.ndarray
    coords: np.ndarray
    cell: float

    @cached_property
    def hull(self) -> ConvexHull:
        return ConvexHull(self.coords)

    @property
    def polygon(self) -> np.ndarray:
        """Hull vertices lifted back to rays, counter-clockwise in chart coordinates."""
        return self.chart.lift(self.coords[self.hull.vertices])

    def in_hull(self, points: np.ndarray) -> np.ndarray:
        coords, keep = self.chart.project(points)
        out = np.zeros(len(np.atleast_2d(points)), dtype=bool)
        eq = self.hull.equations
        out[keep] = np.all(coords @ eq[:, :-1].T + eq[:, -1] <= self.cell, axis=1)
        return out

    def contains_many(self, points: np.ndarray) -> np.ndarray:
        p = np.atleast_2d(np.asarray(points, dtype=float))
        return self.parent.contains_many(p) & (_ge_values(self.parent.k, self.e_class, p) > 0) & self.in_hull(p)

    def contains(self, D) -> bool:
        return bool(self.contains_many(_ray_array(D))[0])

    def interior_points(self) -> np.ndarray:
        return self.interior


@dataclass
class RegionUnion:
    """Union of regions, used to show that disjoint pieces fail the midpoint test."""

    regions: List[Region]

    def interior_points(self) -> np.ndarray:
        return np.vstack([r.interior for r in self.regions])

    def contains_many(self, points: np.ndarray) -> np.ndarray:
        p = np.atleast_2d(points)
        return np.any([r.contains_many(p) for r in self.regions], axis=0)


@dataclass
class SubconeQ:
    parent: ConeComponent
    e_class: RayVector
    regions: List[Region]

    def to_dict(self) -> Dict:
        return {
            "component": self.parent.id,
            "e_class": self.e_class.to_list(),
            "region_count": len(self.regions),
            "regions": [
                {"polygon": r.polygon.tolist(), "cells": int(len(r.interior))}
                for r in self.regions
            ],
        }


def _ge_values(k: float, E: RayVector, points: np.ndarray) -> np.ndarray:
    """G_E(D) = T(E, D, D) for rows D."""
    F = hesse_cubic(k, allow_degenerate=True)
    M = F.trilinear.contract_one(E.array)
    return np.einsum("ni,ij,nj->n", points, M, points)


def q_subcone(k: float, comp: ConeComponent, E, settings: TraceSettings = DEFAULT_TRACE,
              min_cells: int = 4) -> SubconeQ:
    """
    Connected components of {D in comp : G_E(D) > 0}.

    The component is rasterized on its chart plane, cells are labelled with
    4-connectivity and each label becomes a Region with its convex hull.
    Specks smaller than min_cells are dropped.
    """
    E = E if isinstance(E, RayVector) else RayVector.of(E)
    if E.is_zero():
        raise DomainError("E must be nonzero")
    grid = comp.chart.raster(comp.boundary_points(), settings.raster_size)
    flat = grid.points.reshape(-1, 3)
    mask = comp.contains_many(flat) & (_ge_values(k, E, flat) > 0)
    labels, count = ndimage.label(mask.reshape(grid.points.shape[:2]))
    regions = []
    for label in range(1, count + 1):
        cells = labels == label
        if int(cells.sum()) < min_cells:
            continue
        region = Region(comp, E, comp.chart, grid.points[cells], grid.coords[cells], grid.cell)
        try:
            region.hull
        except QhullError:
            continue
        regions.append(region)
    log(f"q_subcone k={k} {comp.id} E={E.to_list()}: {len(regions)} region(s)", "INFO")
    return SubconeQ(comp, E, regions)


def convexity_check(region, n_samples: int, seed: int = 7) -> bool:
    """
    Midpoint test: for n_samples random pairs of interior points the midpoint
    must still be inside.

    Args:
        region: ConeComponent, Region or RegionUnion
        n_samples: Number of pairs
        seed: SplitMix64 seed

    Returns:
        True iff every midpoint is inside
    """
    pool = region.interior_points()
    if len(pool) == 0:
        raise DomainError("region has no interior samples")
    rng = SplitMix64(seed)
    firsts = np.array(rng.sample(pool, n_samples))
    seconds = np.array(rng.sample(pool, n_samples))
    return bool(np.all(region.contains_many(0.5 * (firsts + seconds))))
