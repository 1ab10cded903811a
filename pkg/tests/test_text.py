import random

import pytest
from hypothesis import given, settings, strategies as st

from caselift.core import ElementKind, RebuttalStatus, Stage
from caselift.errors import CaseliftError, InvalidDocumentError
from caselift.fixtures import fig6_fragment
from caselift.text import ParseCode, ParseError, normalize_newlines, parse, serialize

from docgen import random_document

documents = st.integers(0, 2**31 - 1).map(lambda seed: random_document(random.Random(seed)))

FIG8_TEXT = """\
* G25
Network traffic over the assumption is detectable.
@author: operator

** C25.1
The number of the assumed users is 5 at the same time.
@author: operator

** C25.2
Exceeding the assumption
@author: operator
@rebuttal: true

** E25.3
Zabbix integrated monitoring tool is installed.
@author: operator
"""


class TestParse:
    def test_minimal_document(self):
        doc = parse("*G1\nTop claim.\n@author: owner")
        assert len(doc) == 1
        element = doc.element("G1")
        assert element.kind is ElementKind.Goal
        assert element.text == "Top claim."
        assert element.author == "owner"

    def test_fig8_headings(self):
        doc = parse(FIG8_TEXT)
        assert len(doc) == 4
        kinds = [doc.elements[e].kind for e in doc.preorder()]
        assert kinds == [
            ElementKind.Goal,
            ElementKind.Context,
            ElementKind.Context,
            ElementKind.Evidence,
        ]
        rebuttal = doc.element("C25.2")
        assert rebuttal.is_rebuttal
        assert rebuttal.rebuttal_status is RebuttalStatus.Open

    def test_depth_jump_is_orphan(self):
        with pytest.raises(ParseError) as err:
            parse("*G1\n***G2")
        assert err.value.parse_code is ParseCode.OrphanDepth
        assert err.value.line == 2

    def test_second_root_is_orphan(self):
        with pytest.raises(ParseError) as err:
            parse("*G1\n@author: o\n*G2\n@author: o")
        assert err.value.parse_code is ParseCode.OrphanDepth
        assert err.value.line == 3

    def test_duplicate_id(self):
        with pytest.raises(ParseError) as err:
            parse("*G1\n@author: o\n**G1")
        assert err.value.parse_code is ParseCode.DuplicateId
        assert err.value.line == 3

    def test_empty_input(self):
        with pytest.raises(ParseError) as err:
            parse("\n\n  \n")
        assert err.value.parse_code is ParseCode.EmptyDocument

    def test_content_before_heading(self):
        with pytest.raises(ParseError) as err:
            parse("hello\n*G1")
        assert err.value.parse_code is ParseCode.BadHeading
        assert err.value.line == 1

    def test_unknown_id_letter(self):
        with pytest.raises(ParseError) as err:
            parse("*X1\n@author: o")
        assert err.value.parse_code is ParseCode.BadHeading

    def test_unknown_metadata_key(self):
        with pytest.raises(ParseError) as err:
            parse("*G1\n@author: o\n@priority: high")
        assert err.value.parse_code is ParseCode.BadMetadata

    def test_custom_keys_need_x_prefix(self):
        doc = parse("*G1\n@author: o\n@x-priority: high")
        assert doc.element("G1").metadata == {"x-priority": "high"}

    def test_bad_stage_value(self):
        with pytest.raises(ParseError) as err:
            parse("*G1\n@author: o\n@stage: later")
        assert err.value.parse_code is ParseCode.BadMetadata

    def test_stage_accepts_any_case(self):
        doc = parse("*G1\n@author: o\n@stage: Development")
        assert doc.element("G1").stage is Stage.Development

    def test_status_without_rebuttal_rejected(self):
        with pytest.raises(ParseError) as err:
            parse("*G1\n@author: o\n**C1\n@author: o\n@status: open")
        assert err.value.parse_code is ParseCode.BadMetadata

    def test_duplicate_key_rejected(self):
        with pytest.raises(ParseError) as err:
            parse("*G1\n@author: a\n@author: b")
        assert err.value.parse_code is ParseCode.BadMetadata

    def test_rebuttal_value_must_be_true(self):
        with pytest.raises(ParseError) as err:
            parse("*G1\n@author: o\n**C1\n@author: o\n@rebuttal: maybe")
        assert err.value.parse_code is ParseCode.BadMetadata

    def test_structural_violations_surface_after_parse(self):
        # E under C is a structural error, not a syntax error.
        with pytest.raises(InvalidDocumentError):
            parse("*G1\n@author: o\n**C1\n@author: o\n***E1\n@author: o")

    def test_missing_author_surfaces_after_parse(self):
        with pytest.raises(InvalidDocumentError):
            parse("*G1\nNo author here.")

    def test_crlf_input_normalized(self):
        doc = parse("*G1\r\nTop claim.\r\n@author: owner\r\n")
        assert doc.element("G1").text == "Top claim."


class TestSerialize:
    def test_canonical_fixpoint(self):
        canonical = serialize(parse("*G1\nTop claim.\n@author: owner"))
        assert canonical == "* G1\nTop claim.\n@author: owner\n"
        assert serialize(parse(canonical)) == canonical

    def test_fig6_fragment_marks_rebuttal(self):
        text = serialize(fig6_fragment())
        block = text.split("\n\n")[-1]
        assert block.startswith("*** C22.2")
        assert "Lack of data backups" in block
        assert "@rebuttal: true" in block
        assert "@status: open" in block

    def test_one_blank_line_between_nodes_and_trailing_newline(self):
        text = serialize(fig6_fragment())
        assert "\n\n\n" not in text
        assert text.endswith("\n")
        assert not text.endswith("\n\n")

    def test_reserved_metadata_order_fixed(self):
        doc = parse(
            "*G1\n@author: o\n**C1\n@x-z: 1\n@status: fixed\n@rebuttal: true\n@stage: operation\n@author: o"
        )
        block = serialize(doc).split("\n\n")[1]
        lines = block.rstrip("\n").split("\n")
        assert lines == [
            "** C1",
            "@author: o",
            "@stage: operation",
            "@rebuttal: true",
            "@status: fixed",
            "@x-z: 1",
        ]

    def test_body_text_starting_with_markup_is_shielded(self):
        doc = parse("*G1\n@author: o")
        tricky = doc.element("G1").replace(text="@author: fake body")
        text = serialize(doc.with_element(tricky))
        assert parse(text).element("G1").text == "@author: fake body"


class TestRoundTrip:
    @settings(max_examples=150, deadline=None)
    @given(documents)
    def test_parse_after_serialize_is_identity(self, doc):
        assert parse(serialize(doc)) == doc

    @settings(max_examples=150, deadline=None)
    @given(documents)
    def test_serialize_is_canonical_fixpoint(self, doc):
        text = serialize(doc)
        assert serialize(parse(text)) == text

    def test_equal_documents_serialize_identically(self):
        seed = random.Random(20130408)
        doc = random_document(seed)
        clone = parse(serialize(doc))
        assert serialize(doc) == serialize(clone)


@settings(max_examples=300, deadline=None)
@given(st.text(max_size=400))
def test_parse_is_total_over_the_error_type(text):
    try:
        parse(text)
    except ParseError as err:
        line_count = normalize_newlines(text).count("\n") + 1
        assert 1 <= err.line <= line_count
    except InvalidDocumentError as err:
        assert err.violations


@settings(max_examples=200, deadline=None)
@given(st.text(alphabet="*@ GxSEC125.\n:-\tabc", max_size=200))
def test_parse_is_total_over_markup_heavy_noise(text):
    try:
        parse(text)
    except CaseliftError:
        pass
