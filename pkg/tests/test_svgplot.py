import xml.etree.ElementTree as ET

import pytest

from scalereg.svgplot import loglog_svg, write_loglog_svg

POINTS = [(256, 0.0165), (512, 0.0118), (1024, 0.0102), (2048, 0.0090),
          (4096, 0.0081), (8192, 0.0074), (16384, 0.0068)]


def test_svg_is_well_formed_xml():
    svg = loglog_svg(POINTS, fitted_slope=-0.18, theoretical_slope=-0.25,
                     title="rate")
    root = ET.fromstring(svg)
    assert root.tag.endswith("svg")


def test_svg_contains_data_fit_and_theory_layers():
    svg = loglog_svg(POINTS, fitted_slope=-0.18, theoretical_slope=-0.25)
    assert "polyline" in svg
    assert svg.count("circle") == len(POINTS)
    assert "#d62728" in svg  # fitted line
    assert "#2ca02c" in svg and "6,4" in svg  # dashed theory line


def test_svg_without_fit_lines():
    svg = loglog_svg(POINTS)
    assert "#d62728" not in svg and "#2ca02c" not in svg
    assert "circle" in svg


def test_svg_decade_labels():
    svg = loglog_svg(POINTS)
    assert "1e3" in svg or "1e4" in svg  # m decades
    assert "1e-2" in svg  # error decades


def test_svg_rejects_nonpositive_points():
    with pytest.raises(ValueError):
        loglog_svg([(10, 0.0), (100, 1.0), (1000, 0.1), (10000, 0.01)])
    with pytest.raises(ValueError):
        loglog_svg([(-1, 0.5), (100, 1.0), (1000, 0.1), (10000, 0.01)])


def test_write_svg(tmp_path):
    path = tmp_path / "rate.svg"
    write_loglog_svg(path, POINTS, fitted_slope=-0.2)
    text = path.read_text()
    assert text.startswith("<svg") and text.rstrip().endswith("</svg>")
