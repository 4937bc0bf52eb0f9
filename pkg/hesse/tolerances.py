"""
Tolerances and Settings
Numerical thresholds and sampling settings, loaded from the environment.
"""

import os
from dataclasses import dataclass, fields, replace
from typing import Any, Dict

from dotenv import load_dotenv

load_dotenv()


@dataclass(frozen=True)
class Tolerances:
    """
    Numerical thresholds shared by every module.

    Attributes:
        on_curve_abs: Max |form| at a sup-norm normalized point for it to count as on the curve
        kernel_rank_rel: Eigenvalues below this fraction of the spectral radius count as zero
        newton_residual: Relative residual target of the pole solver
        degenerate_k_band: Half-width of the guarded bands around k = 1 and k = 0
    """

    on_curve_abs: float = 1e-9
    kernel_rank_rel: float = 1e-8
    newton_residual: float = 1e-10
    degenerate_k_band: float = 1e-6

    def __post_init__(self):
        for f in fields(self):
            value = getattr(self, f.name)
            if not value > 0:
                raise ValueError(f"Tolerance {f.name} must be strictly positive, got {value}")

    @classmethod
    def from_env(cls) -> "Tolerances":
        """Build tolerances from CUBICLAB_TOL_* environment variables."""
        overrides = {}
        for f in fields(cls):
            raw = os.getenv(f"CUBICLAB_TOL_{f.name.upper()}")
            if raw:
                overrides[f.name] = float(raw)
        return cls(**overrides)

    def with_overrides(self, overrides: Dict[str, Any]) -> "Tolerances":
        """
        Return a copy with some fields replaced.

        Args:
            overrides: Mapping of field name to new value

        Returns:
            New Tolerances instance

        Raises:
            ValueError: If a name is unknown or a value is not positive
        """
        known = {f.name for f in fields(self)}
        unknown = set(overrides) - known
        if unknown:
            raise ValueError(
                f"Unknown tolerance: {sorted(unknown)}. Available: {sorted(known)}"
            )
        return replace(self, **{name: float(v) for name, v in overrides.items()})

    def as_dict(self) -> Dict[str, float]:
        return {f.name: getattr(self, f.name) for f in fields(self)}


@dataclass(frozen=True)
class TraceSettings:
    """Sampling density of traced arcs and rasterized subcones."""

    max_arc_step: float = 0.02
    cutoff: float = 1000.0
    raster_size: int = 241

    @classmethod
    def from_env(cls) -> "TraceSettings":
        return cls(
            max_arc_step=float(os.getenv("CUBICLAB_ARC_MAX_STEP", "0.02")),
            cutoff=float(os.getenv("CUBICLAB_ARC_CUTOFF", "1000")),
            raster_size=int(os.getenv("CUBICLAB_RASTER_SIZE", "241")),
        )


DEFAULT_TOLERANCES = Tolerances()
DEFAULT_TRACE = TraceSettings.from_env()
