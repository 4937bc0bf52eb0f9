"""
Render Test
Figure presets, clipping helpers and the SVG output.
"""

import numpy as np
import pytest

from figures import FigurePresetFactory, FigureSpec, render_figure
from figures.figure_presets import ASYMPTOTES, CUBIC, HESSIAN, SHADE_Q
from figures.svg_renderer import clip_polyline, clip_segment, count_curve_groups, count_shaded_regions, fmt


def test_fmt():
    assert fmt(-0.0) == "0"
    assert fmt(1.0) == "1"
    assert fmt(1.0 / 3.0) == "0.333333333"
    assert fmt(-2.5) == "-2.5"


def test_clip_segment():
    viewport = (0.0, 1.0, 0.0, 1.0)
    (x0, y0), (x1, y1) = clip_segment((-1.0, 0.5), (2.0, 0.5), viewport)
    assert [x0, y0, x1, y1] == pytest.approx([0.0, 0.5, 1.0, 0.5])
    assert clip_segment((2.0, 2.0), (3.0, 3.0), viewport) is None
    p, q = clip_segment((0.2, 0.2), (0.4, 0.6), viewport)
    assert [*p, *q] == pytest.approx([0.2, 0.2, 0.4, 0.6])


def test_clip_polyline_splits_at_exits():
    # leaves through the top and comes back
    points = np.array([[0.1, 0.5], [0.5, 1.5], [0.9, 0.5]])
    runs = clip_polyline(points, (0.0, 1.0, 0.0, 1.0))
    assert len(runs) == 2
    assert runs[0][0] == (0.1, 0.5)
    assert list(runs[1][-1]) == pytest.approx([0.9, 0.5])


def test_presets():
    assert FigurePresetFactory.get_available_presets() == ["fig1", "fig2", "fig3", "fig4", "fig5"]
    assert FigurePresetFactory.create("fig2") == FigurePresetFactory.create("fig2")
    with pytest.raises(ValueError):
        FigurePresetFactory.create("fig6")


def test_spec_validation():
    with pytest.raises(ValueError):
        FigureSpec(k=5.0, viewport=(1.0, -1.0, 0.0, 1.0), layers=frozenset({CUBIC}))
    with pytest.raises(ValueError):
        FigureSpec(k=5.0, viewport=(-1.0, 1.0, -1.0, 1.0), layers=frozenset({"GRID"}))
    with pytest.raises(ValueError):
        FigureSpec(k=5.0, viewport=(-1.0, 1.0, -1.0, 1.0), layers=frozenset({SHADE_Q}))
    with pytest.raises(ValueError):
        FigureSpec(k=5.0, viewport=(-1.0, 1.0, -1.0, 1.0), layers=frozenset({CUBIC}), width_px=0)


def test_fig1_layers():
    svg = render_figure(FigurePresetFactory.create("fig1"))
    assert svg.startswith("<?xml")
    assert svg.rstrip().endswith("</svg>")
    assert count_curve_groups(svg, "F") == 2
    assert count_curve_groups(svg, "H") >= 1
    assert svg.count("<line ") == 3
    assert count_shaded_regions(svg) == 0


def test_render_is_deterministic():
    spec = FigureSpec(k=5.0, viewport=(-3.0, 3.0, -3.0, 3.0), layers=frozenset({CUBIC, HESSIAN}))
    assert render_figure(spec) == render_figure(spec)


def test_asymptote_layer_draws_three_lines():
    spec = FigureSpec(k=5.0, viewport=(-3.0, 3.0, -3.0, 3.0), layers=frozenset({ASYMPTOTES}))
    svg = render_figure(spec)
    assert svg.count("<line ") == 3
    # x = -1/4 maps to a vertical line at 600 * (2.75 / 6) px
    assert 'x1="275"' in svg and 'x2="275"' in svg


def test_every_preset_renders():
    for name in FigurePresetFactory.get_available_presets():
        svg = render_figure(FigurePresetFactory.create(name))
        assert svg.rstrip().endswith("</svg>"), name
        assert count_curve_groups(svg, "F") >= 1, name
        assert count_shaded_regions(svg) == FigurePresetFactory.EXPECTED_REGIONS.get(name, 0), name


def test_fig4_shades_two_regions():
    svg = render_figure(FigurePresetFactory.create("fig4"))
    assert count_shaded_regions(svg) == FigurePresetFactory.EXPECTED_REGIONS["fig4"]


def main():
    tests = [
        test_fmt, test_clip_segment, test_clip_polyline_splits_at_exits, test_presets,
        test_spec_validation, test_fig1_layers, test_render_is_deterministic, test_asymptote_layer_draws_three_lines,
        test_every_preset_renders, test_fig4_shades_two_regions,
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
