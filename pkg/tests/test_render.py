import random
import re

import pytest
from hypothesis import given, settings, strategies as st

from caselift.errors import UnknownHighlightError
from caselift.fixtures import fig8_fragment
from caselift.render import RenderOptions, to_dot, to_svg

from docgen import random_document

documents = st.integers(0, 2**31 - 1).map(lambda seed: random_document(random.Random(seed)))


def minimal():
    from caselift.core import Document, Element, ElementKind

    g1 = Element(id="G1", kind=ElementKind.Goal, text="Top claim.", author="owner")
    return Document("G1", {"G1": g1}, {})


def dot_node_lines(dot: str) -> dict[str, str]:
    lines = {}
    for line in dot.splitlines():
        match = re.match(r'\s+"([^"]+)" \[(.*)\];$', line)
        if match and "->" not in line:
            lines[match.group(1)] = match.group(2)
    return lines


class TestDot:
    def test_minimal_single_box(self):
        nodes = dot_node_lines(to_dot(minimal()))
        assert set(nodes) == {"G1"}
        assert "shape=box" in nodes["G1"]
        assert 'label="G1\\nTop claim."' in nodes["G1"]

    def test_fig8_shapes_and_dashed_rebuttal(self):
        dot = to_dot(fig8_fragment())
        nodes = dot_node_lines(dot)
        assert len(nodes) == 4
        assert "shape=box" in nodes["G25"] and "rounded" not in nodes["G25"]
        assert "shape=ellipse" in nodes["E25.3"]
        assert "shape=box" in nodes["C25.1"] and 'style="rounded"' in nodes["C25.1"]
        assert 'style="rounded,dashed"' in nodes["C25.2"]
        assert "*Rebuttal* Exceeding the" in nodes["C25.2"]

    def test_risk_relabel(self):
        dot = to_dot(fig8_fragment(), RenderOptions(relabel_rebuttal_as_risk=True))
        assert "*Risk* Exceeding the" in dot
        assert "*Rebuttal*" not in dot

    def test_context_edges_undirected_style(self):
        dot = to_dot(fig8_fragment())
        assert '"G25" -> "C25.1" [dir=none];' in dot
        assert '"G25" -> "C25.2" [dir=none];' in dot
        assert '"G25" -> "E25.3";' in dot

    def test_double_render_byte_identical(self):
        doc = fig8_fragment()
        assert to_dot(doc) == to_dot(doc)
        assert to_svg(doc) == to_svg(doc)

    def test_unknown_highlight_id(self):
        with pytest.raises(UnknownHighlightError):
            to_dot(minimal(), RenderOptions(highlight=frozenset({"G404"})))

    def test_highlight_styles_only(self):
        plain = dot_node_lines(to_dot(fig8_fragment()))
        lit = dot_node_lines(to_dot(fig8_fragment(), RenderOptions(highlight=frozenset({"C25.2"}))))
        assert set(plain) == set(lit)
        assert "color=crimson" in lit["C25.2"]
        assert plain["G25"] == lit["G25"]


class TestSvg:
    def test_minimal_has_rect_and_label(self):
        svg = to_svg(minimal())
        assert svg.count("<rect") >= 1
        assert ">G1</tspan>" in svg
        assert 'data-element-id="G1"' in svg

    def test_fig8_counts(self):
        svg = to_svg(fig8_fragment())
        assert svg.count("data-element-id=") == 4
        assert svg.count("<ellipse") == 1
        assert 'stroke-dasharray' in svg  # the rebuttal renders dashed

    def test_every_element_id_is_hit_testable(self):
        doc = fig8_fragment()
        svg = to_svg(doc)
        for eid in doc.elements:
            assert f'data-element-id="{eid}"' in svg

    @settings(max_examples=60, deadline=None)
    @given(documents)
    def test_node_count_equals_element_count(self, doc):
        assert to_svg(doc).count("data-element-id=") == len(doc)

    @settings(max_examples=30, deadline=None)
    @given(documents)
    def test_highlight_never_changes_structure(self, doc):
        some = frozenset(list(doc.elements)[:2])
        plain = to_svg(doc)
        lit = to_svg(doc, RenderOptions(highlight=some))
        assert plain.count("data-element-id=") == lit.count("data-element-id=")

    def test_escapes_markup_in_text(self):
        from caselift.core import Document, Element, ElementKind

        g1 = Element(id="G1", kind=ElementKind.Goal, text='a < b & "c"', author="owner")
        svg = to_svg(Document("G1", {"G1": g1}, {}))
        assert "a &lt; b &amp;" in svg
