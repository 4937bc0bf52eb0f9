"""
Figures Package
Preset figure specifications and the deterministic SVG renderer.
"""

from .figure_presets import FigureSpec, FigurePresetFactory
from .svg_renderer import render_figure

__all__ = ['FigureSpec', 'FigurePresetFactory', 'render_figure']
