"""
Figure Presets
FigureSpec and the preset registry for the five standard figures.
"""

from dataclasses import dataclass, field
from typing import Dict, FrozenSet, List, Optional, Tuple

from hesse.forms import RayVector

CUBIC = "CUBIC"
HESSIAN = "HESSIAN"
ASYMPTOTES = "ASYMPTOTES"
SHADE_Q = "SHADE_Q"
MARK_POINTS = "MARK_POINTS"

LAYERS = (SHADE_Q, CUBIC, HESSIAN, ASYMPTOTES, MARK_POINTS)  # drawing order

DEFAULT_STYLE = {
    "cubic": "#1f4e9c",
    "hessian": "#b03a2e",
    "asymptote": "#7f7f7f",
    "shade": "#f4d03f",
    "shade_opacity": "0.55",
    "marker": "#222222",
    "stroke_width": "1.5",
    "background": "#ffffff",
}


@dataclass(frozen=True)
class FigureSpec:
    """
    What to draw and where.

    Attributes:
        k: Hesse parameter
        a_point: Class E whose subcone Q is shaded (required for SHADE_Q)
        viewport: (xmin, xmax, ymin, ymax) on the affine chart z = 1
        layers: Subset of LAYERS
        component: Component whose subcone is shaded
    """

    k: float
    viewport: Tuple[float, float, float, float]
    layers: FrozenSet[str]
    a_point: Optional[RayVector] = None
    width_px: int = 600
    height_px: int = 600
    component: str = "HYBRID[B1B2]"
    title: str = ""
    style: Dict[str, str] = field(default_factory=lambda: dict(DEFAULT_STYLE), compare=False)

    def __post_init__(self):
        xmin, xmax, ymin, ymax = self.viewport
        if not (xmin < xmax and ymin < ymax):
            raise ValueError(f"empty viewport {self.viewport}")
        if self.width_px <= 0 or self.height_px <= 0:
            raise ValueError(f"image size must be positive, got {self.width_px}x{self.height_px}")
        unknown = set(self.layers) - set(LAYERS)
        if unknown:
            raise ValueError(f"Unknown layers: {sorted(unknown)}. Available: {list(LAYERS)}")
        if SHADE_Q in self.layers and self.a_point is None:
            raise ValueError("SHADE_Q needs a_point")


def _spec(k: float, viewport, layers, a_point=None, title: str = "", **kwargs) -> FigureSpec:
    return FigureSpec(
        k=k,
        viewport=tuple(float(v) for v in viewport),
        layers=frozenset(layers),
        a_point=RayVector(a_point) if a_point is not None else None,
        title=title,
        **kwargs,
    )


class FigurePresetFactory:
    """Factory for the preset figures."""

    PRESETS = {
        "fig1": lambda: _spec(5.0, (-3, 3, -3, 3), (CUBIC, HESSIAN, ASYMPTOTES),
                              title="Cubic with asymptotes and Hessian, k=5"),
        "fig2": lambda: _spec(5.0, (-4, 4, -3, 5), (SHADE_Q, CUBIC, HESSIAN, MARK_POINTS), (-1.0, 3.0, 1.0),
                              title="k=5, A=(-1,3,1)"),
        "fig3": lambda: _spec(5.0, (-4, 4, -4, 4), (SHADE_Q, CUBIC, HESSIAN, MARK_POINTS), (-2.0, 1.0, 1.0),
                              title="k=5, A=(-2,1,1)"),
        "fig4": lambda: _spec(-3.0, (-4, 4, -4, 4), (SHADE_Q, CUBIC, HESSIAN, MARK_POINTS), (0.28, 0.28, 1.0),
                              title="k=-3, A=(0.28,0.28,1)"),
        "fig5": lambda: _spec(-3.0, (-0.2, 0.8, -0.2, 0.8), (SHADE_Q, CUBIC, HESSIAN, MARK_POINTS),
                              (0.28, 0.28, 1.0), title="k=-3, A=(0.28,0.28,1), close-up"),
    }

    # q-subcone region counts the presets are expected to show
    EXPECTED_REGIONS = {"fig2": 1, "fig3": 1, "fig4": 2, "fig5": 2}

    @classmethod
    def create(cls, name: str) -> FigureSpec:
        """
        Args:
            name: Preset name (fig1..fig5)

        Raises:
            ValueError: If the preset is unknown
        """
        if name not in cls.PRESETS:
            raise ValueError(f"Unknown preset: {name}. Available: {list(cls.PRESETS.keys())}")
        return cls.PRESETS[name]()

    @classmethod
    def get_available_presets(cls) -> List[str]:
        return list(cls.PRESETS.keys())
