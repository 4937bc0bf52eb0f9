"""
SVG Renderer
Deterministic SVG for a FigureSpec: curve branches as clipped polylines,
asymptotes as clipped lines, q-subcone regions as filled polygons.
"""

from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from hesse.cone_atlas import find_component, q_subcone
from hesse.curve_geometry import (
    REGIME_ABOVE_ONE, REGIME_MINUS_TWO, REGIME_ZERO,
    asymptotes, branch_catalog, named_points, regime, trace_branch,
)
from hesse.forms import RayVector

from .figure_presets import ASYMPTOTES, CUBIC, HESSIAN, MARK_POINTS, SHADE_Q, FigureSpec

PREAMBLE = """\
<?xml version="1.0" standalone="no"?>
<svg width="%(width)s" height="%(height)s" viewBox="0 0 %(width)s %(height)s" version="1.1" \
xmlns="http://www.w3.org/2000/svg">
<polygon points="0,0 %(width)s,0 %(width)s,%(height)s 0,%(height)s" fill="%(background)s" stroke="none"/>
"""

POSTAMBLE = "</svg>\n"

Z_EPS = 1e-9

Point = Tuple[float, float]


def fmt(v: float) -> str:
    """9 significant digits; -0 prints as 0."""
    s = f"{float(v):.9g}"
    return "0" if s in ("-0", "0") else s


# ---------------------------------------------------------------------------------
# Clipping
# ---------------------------------------------------------------------------------

def clip_segment(p: Point, q: Point, viewport: Sequence[float]) -> Optional[Tuple[Point, Point]]:
    """Liang-Barsky clip of the segment pq to the viewport; None if it misses."""
    xmin, xmax, ymin, ymax = viewport
    dx, dy = q[0] - p[0], q[1] - p[1]
    t0, t1 = 0.0, 1.0
    for pk, qk in ((-dx, p[0] - xmin), (dx, xmax - p[0]), (-dy, p[1] - ymin), (dy, ymax - p[1])):
        if pk == 0.0:
            if qk < 0.0:
                return None
            continue
        r = qk / pk
        if pk < 0.0:
            if r > t1:
                return None
            t0 = max(t0, r)
        else:
            if r < t0:
                return None
            t1 = min(t1, r)
    return (p[0] + t0 * dx, p[1] + t0 * dy), (p[0] + t1 * dx, p[1] + t1 * dy)


def clip_polyline(points: np.ndarray, viewport: Sequence[float]) -> List[List[Point]]:
    """Pieces of a polyline inside the viewport."""
    runs: List[List[Point]] = []
    current: List[Point] = []
    for p, q in zip(points[:-1], points[1:]):
        clipped = clip_segment(tuple(p), tuple(q), viewport)
        if clipped is None:
            if current:
                runs.append(current)
                current = []
            continue
        a, b = clipped
        if current and current[-1] == a:
            current.append(b)
        else:
            if current:
                runs.append(current)
            current = [a, b]
        if b != tuple(q):
            runs.append(current)
            current = []
    if current:
        runs.append(current)
    return runs


def _clip_halfplane(poly: List[np.ndarray], inside, cross) -> List[np.ndarray]:
    """One Sutherland-Hodgman pass."""
    out: List[np.ndarray] = []
    for i, cur in enumerate(poly):
        prev = poly[i - 1]
        if inside(cur):
            if not inside(prev):
                out.append(cross(prev, cur))
            out.append(cur)
        elif inside(prev):
            out.append(cross(prev, cur))
    return out


def clip_polygon_z(rays: np.ndarray, sign: float) -> List[np.ndarray]:
    """Part of a planar polygon of rays with sign * z >= Z_EPS."""
    def inside(p):
        return sign * p[2] >= Z_EPS

    def cross(a, b):
        t = (sign * Z_EPS - a[2]) / (b[2] - a[2])
        return a + t * (b - a)

    return _clip_halfplane(list(rays), inside, cross)


def clip_polygon_viewport(poly: List[np.ndarray], viewport: Sequence[float]) -> List[np.ndarray]:
    xmin, xmax, ymin, ymax = viewport
    for axis, bound, keep_above in ((0, xmin, True), (0, xmax, False), (1, ymin, True), (1, ymax, False)):
        if not poly:
            break

        def inside(p, axis=axis, bound=bound, keep_above=keep_above):
            return p[axis] >= bound if keep_above else p[axis] <= bound

        def cross(a, b, axis=axis, bound=bound):
            t = (bound - a[axis]) / (b[axis] - a[axis])
            return a + t * (b - a)

        poly = _clip_halfplane(poly, inside, cross)
    return poly


# ---------------------------------------------------------------------------------
# Renderer
# ---------------------------------------------------------------------------------

def curve_components(k: float, curve: str) -> Dict[str, List[str]]:
    """Branch ids of each real component of F or H, by component name."""
    catalog = branch_catalog(k)
    r = regime(k)
    if curve == "F":
        groups = {"unbounded": ["C1", "F[B2B3]", "F[B3B1]"]}
        if catalog.get("BOUNDED") == "F":
            groups["bounded"] = ["BOUNDED"]
        return groups
    if r == REGIME_MINUS_TWO:
        return {"line": ["C3", "C3[B2B3]", "C3[B3B1]"]}
    if r == REGIME_ZERO:
        return {"lines": ["L1", "L2", "H[B2B3]", "H[B3B1]"]}
    groups = {"unbounded" if r != REGIME_ABOVE_ONE else "main": ["C2", "H[B2B3]", "H[B3B1]"]}
    if catalog.get("BOUNDED") == "H":
        groups["bounded"] = ["BOUNDED"]
    return groups


class SvgFigure:
    """Collects elements in pixel space and writes the document."""

    def __init__(self, spec: FigureSpec):
        self.spec = spec
        self.elements: List[str] = []

    def to_pixels(self, x: float, y: float) -> Point:
        xmin, xmax, ymin, ymax = self.spec.viewport
        px = (x - xmin) / (xmax - xmin) * self.spec.width_px
        py = (ymax - y) / (ymax - ymin) * self.spec.height_px
        return px, py

    def _points_attr(self, points: Sequence[Point]) -> str:
        return " ".join(f"{fmt(px)},{fmt(py)}" for px, py in (self.to_pixels(*p) for p in points))

    def path(self, runs: List[List[Point]], stroke: str) -> str:
        d = []
        for run in runs:
            px = [self.to_pixels(*p) for p in run]
            d.append("M " + " L ".join(f"{fmt(x)} {fmt(y)}" for x, y in px))
        width = self.spec.style["stroke_width"]
        return f'<path d="{" ".join(d)}" fill="none" stroke="{stroke}" stroke-width="{width}"/>'

    def line(self, p: Point, q: Point, stroke: str) -> str:
        (x1, y1), (x2, y2) = self.to_pixels(*p), self.to_pixels(*q)
        return (f'<line x1="{fmt(x1)}" y1="{fmt(y1)}" x2="{fmt(x2)}" y2="{fmt(y2)}" '
                f'stroke="{stroke}" stroke-dasharray="6,4"/>')

    def polygon(self, points: Sequence[Point]) -> str:
        style = self.spec.style
        return (f'<polygon points="{self._points_attr(points)}" fill="{style["shade"]}" '
                f'fill-opacity="{style["shade_opacity"]}" fill-rule="evenodd" stroke="none"/>')

    def text(self, p: Point, label: str) -> str:
        x, y = self.to_pixels(*p)
        return f'<text x="{fmt(x + 4)}" y="{fmt(y - 4)}" font-size="12" fill="{self.spec.style["marker"]}">{label}</text>'

    def caption(self, label: str) -> str:
        return f'<text x="8" y="18" font-size="14" fill="{self.spec.style["marker"]}">{label}</text>'

    def marker(self, p: Point) -> str:
        x, y = self.to_pixels(*p)
        d = f"M {fmt(x - 3)} {fmt(y)} L {fmt(x + 3)} {fmt(y)} M {fmt(x)} {fmt(y - 3)} L {fmt(x)} {fmt(y + 3)}"
        return f'<path d="{d}" fill="none" stroke="{self.spec.style["marker"]}" stroke-width="1"/>'

    def document(self) -> str:
        head = PREAMBLE % {
            "width": self.spec.width_px,
            "height": self.spec.height_px,
            "background": self.spec.style["background"],
        }
        return head + "".join(e + "\n" for e in self.elements) + POSTAMBLE


def _curve_layer(fig: SvgFigure, curve: str):
    spec = fig.spec
    stroke = spec.style["cubic" if curve == "F" else "hessian"]
    for name, branch_ids in curve_components(spec.k, curve).items():
        paths = []
        for branch_id in branch_ids:
            arc = trace_branch(spec.k, curve, branch_id)
            runs = clip_polyline(arc.affine_points(), spec.viewport)
            if runs:
                paths.append(fig.path(runs, stroke))
        if paths:
            fig.elements.append(f'<g class="curve-{curve}" id="{curve}-{name}">')
            fig.elements += paths
            fig.elements.append("</g>")


def _asymptote_layer(fig: SvgFigure):
    spec = fig.spec
    xmin, xmax, ymin, ymax = spec.viewport
    reach = 10.0 * max(xmax - xmin, ymax - ymin) + abs(xmin) + abs(xmax) + abs(ymin) + abs(ymax)
    fig.elements.append('<g class="asymptotes">')
    for line in asymptotes(spec.k):
        a, b, c = line.covector
        direction = np.array([-b, a]) / np.hypot(a, b)
        foot = -c * np.array([a, b]) / (a * a + b * b)
        clipped = clip_segment(tuple(foot - reach * direction), tuple(foot + reach * direction), spec.viewport)
        if clipped is not None:
            fig.elements.append(fig.line(clipped[0], clipped[1], spec.style["asymptote"]))
    fig.elements.append("</g>")


def _shade_layer(fig: SvgFigure) -> int:
    spec = fig.spec
    comp = find_component(spec.k, spec.component)
    subcone = q_subcone(spec.k, comp, spec.a_point)
    for i, region in enumerate(subcone.regions):
        fig.elements.append(f'<g class="q-region" id="Q-{i}">')
        for sign in (1.0, -1.0):
            piece = clip_polygon_z(region.polygon, sign)
            if len(piece) < 3:
                continue
            affine = [p[:2] / p[2] for p in piece]
            clipped = clip_polygon_viewport(affine, spec.viewport)
            if len(clipped) >= 3:
                fig.elements.append(fig.polygon([tuple(p) for p in clipped]))
        fig.elements.append("</g>")
    return len(subcone.regions)


def _points_layer(fig: SvgFigure):
    spec = fig.spec
    xmin, xmax, ymin, ymax = spec.viewport
    marks = dict(named_points(spec.k))
    if spec.a_point is not None:
        marks["A"] = spec.a_point
    fig.elements.append('<g class="points">')
    for label in sorted(marks):
        ray: RayVector = marks[label]
        if not ray.is_affine():
            continue
        x, y = ray.affine()
        if xmin <= x <= xmax and ymin <= y <= ymax:
            fig.elements.append(fig.marker((x, y)))
            fig.elements.append(fig.text((x, y), label))
    fig.elements.append("</g>")


def render_figure(spec: FigureSpec) -> str:
    """
    SVG text for a figure spec. Identical specs give byte-identical output.

    Raises:
        DegenerateParameter: If k is in a guarded band
    """
    fig = SvgFigure(spec)
    if spec.title:
        fig.elements.append(fig.caption(spec.title))
    if SHADE_Q in spec.layers:
        _shade_layer(fig)
    if CUBIC in spec.layers:
        _curve_layer(fig, "F")
    if HESSIAN in spec.layers:
        _curve_layer(fig, "H")
    if ASYMPTOTES in spec.layers:
        _asymptote_layer(fig)
    if MARK_POINTS in spec.layers:
        _points_layer(fig)
    return fig.document()


def count_shaded_regions(svg: str) -> int:
    return svg.count('<g class="q-region"')


def count_curve_groups(svg: str, curve: str) -> int:
    return svg.count(f'<g class="curve-{curve}"')
