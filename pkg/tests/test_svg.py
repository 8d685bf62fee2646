import xml.etree.ElementTree as ET

import numpy as np
import pytest

from physact.svg import Series, emit_svg

NS = "{http://www.w3.org/2000/svg}"


def parse(text):
    return ET.fromstring(text.encode())


def test_single_series_one_polyline():
    text, warnings = emit_svg([Series("a", [0.0, 1.0], [0.0, 1.0])])
    root = parse(text)
    lines = root.findall(f".//{NS}polyline")
    assert len(lines) == 1
    assert len(lines[0].get("points").split()) == 2
    assert warnings == []
    assert root.get("version") == "1.1"
    assert "href" not in text


def test_log_scale_clamps_zero():
    text, warnings = emit_svg([Series("loss", [0, 1, 2], [1.0, 0.0, 0.1])], log_y=True)
    assert len(warnings) == 1 and "clamped" in warnings[0]
    assert "nan" not in text and "inf" not in text


def test_three_series_structure():
    x = np.arange(10.0)
    series = [Series(f"s{i}", x, np.exp(-x * (i + 1))) for i in range(3)]
    root = parse(emit_svg(series, log_y=True)[0])
    assert len(root.findall(f".//{NS}polyline")) == 3
    legend = [g for g in root.iter(f"{NS}g") if g.get("class") == "legend"][0]
    labels = [t.text for t in legend.findall(f"{NS}text")]
    assert labels == ["s0", "s1", "s2"]
    colors = {p.get("stroke") for p in root.findall(f".//{NS}polyline")}
    assert len(colors) == 3


def test_markers_are_circles():
    root = parse(emit_svg([Series("pts", [0, 1, 2], [1, 2, 3], markers=True)])[0])
    assert len(root.findall(f".//{NS}circle")) == 3
    assert not root.findall(f".//{NS}polyline")


@pytest.mark.parametrize("bad", [[], [Series("e", [], [])], [Series("n", [0, 1], [0, np.nan])]])
def test_rejects_bad_input(bad):
    with pytest.raises(ValueError):
        emit_svg(bad)


def test_labels_escaped():
    text, _ = emit_svg([Series("a<b & c", [0, 1], [1, 2])], title="x<y")
    parse(text)
