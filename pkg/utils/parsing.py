"""
Parsing
Decimal and rational ("p/q") parsing for points, covectors and flag values.
"""

from fractions import Fraction
from typing import Dict, Sequence, Tuple


def parse_scalar(text: str) -> float:
    """
    Parse "0.28", "-1/4", "1e-10" or "121/196".

    Raises:
        ValueError: If the text is not a decimal or a rational
    """
    raw = text.strip()
    try:
        return float(Fraction(raw))
    except (ValueError, ZeroDivisionError):
        pass
    try:
        return float(raw)
    except ValueError:
        raise ValueError(f"not a number: {text!r}") from None


def parse_vector(text: str, length: int = 3) -> Tuple[float, ...]:
    """Comma-separated scalars, e.g. "-1,3,1" or "1/3,1/3,1"."""
    parts = [p for p in text.split(",") if p.strip()]
    if len(parts) != length:
        raise ValueError(f"expected {length} comma-separated values, got {len(parts)} in {text!r}")
    return tuple(parse_scalar(p) for p in parts)


def parse_range(text: str) -> Tuple[float, float]:
    """"lo,hi" for a closed interval."""
    lo, hi = parse_vector(text, 2)
    return lo, hi


def parse_assignments(items: Sequence[str]) -> Dict[str, float]:
    """["on_curve_abs=1e-10", ...] -> {"on_curve_abs": 1e-10}."""
    out: Dict[str, float] = {}
    for item in items:
        if "=" not in item:
            raise ValueError(f"expected name=value, got {item!r}")
        name, value = item.split("=", 1)
        out[name.strip()] = parse_scalar(value)
    return out



def to_plain(value):
    """numpy values, tuples and ray types to JSON/YAML-safe Python values."""
    if isinstance(value, dict):
        return {str(k): to_plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_plain(v) for v in value]
    if hasattr(value, "tolist"):
        return value.tolist()
    if hasattr(value, "to_list"):
        return value.to_list()
    return value
