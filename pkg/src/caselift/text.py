"""Textual GSN format: parse to Document, serialize to canonical text.

One node per heading; the count of leading ``*`` gives the nesting depth,
so files diff cleanly and can be hand-edited::

    * G1
    Submitted assignments are never lost.
    @author: owner

    ** S1
    Argue over storage types.
    @author: developer

Reserved body keys are ``@author``, ``@stage``, ``@rebuttal`` and
``@status``; custom keys must be written ``@x-<key>`` and pass through
uninterpreted.  Canonical serialization is byte-deterministic and is the
payload hashed and stored by the revision store.
"""

from __future__ import annotations

import enum
import re

from caselift.core import (
    Document,
    Element,
    PREFIX_KIND,
    RebuttalStatus,
    Stage,
    require_valid,
)
from caselift.errors import CaseliftError

_HEADING_RE = re.compile(r"^(\*+)[ \t]*(\S+)[ \t]*$")
_METADATA_RE = re.compile(r"^@([A-Za-z][A-Za-z0-9._-]*):[ \t]*(.*)$")
_ID_RE = re.compile(r"^[A-Z][A-Za-z0-9._-]*$")
_CUSTOM_KEY_RE = re.compile(r"^x-[A-Za-z0-9._-]+$")

RESERVED_KEYS = ("author", "stage", "rebuttal", "status")


class ParseCode(enum.Enum):
    BadHeading = "bad-heading"
    OrphanDepth = "orphan-depth"
    DuplicateId = "duplicate-id"
    BadMetadata = "bad-metadata"
    EmptyDocument = "empty-document"


class ParseError(CaseliftError):
    """Syntactic failure; ``line`` is 1-based into the normalized input."""

    code = "parse-error"

    def __init__(self, line: int, parse_code: ParseCode, message: str):
        self.line = line
        self.parse_code = parse_code
        super().__init__(f"line {line}: {message}")


def normalize_newlines(text: str) -> str:
    return text.replace("\r\n", "\n").replace("\r", "\n")


class _NodeDraft:
    def __init__(self, line: int, depth: int, element_id: str):
        self.line = line
        self.depth = depth
        self.id = element_id
        self.body: list[str] = []
        self.keys: dict[str, tuple[int, str]] = {}  # key -> (line, value)


def _scan(text: str) -> list[_NodeDraft]:
    drafts: list[_NodeDraft] = []
    current: _NodeDraft | None = None
    seen_ids: set[str] = set()

    for lineno, raw in enumerate(normalize_newlines(text).split("\n"), start=1):
        line = raw.rstrip()
        if not line.strip():
            continue
        # Markup is only recognized at column 0; an indented '*' or '@' is
        # body text (serialization indents such text by one space).
        if line.startswith("*"):
            match = _HEADING_RE.match(line)
            if match is None:
                raise ParseError(
                    lineno, ParseCode.BadHeading, f"malformed heading {line!r}"
                )
            depth = len(match.group(1))
            element_id = match.group(2)
            if not _ID_RE.match(element_id) or element_id[0] not in PREFIX_KIND:
                raise ParseError(
                    lineno,
                    ParseCode.BadHeading,
                    f"id {element_id!r} must start with one of G, S, E, C",
                )
            if element_id in seen_ids:
                raise ParseError(
                    lineno, ParseCode.DuplicateId, f"duplicate id {element_id}"
                )
            if current is None and depth != 1:
                raise ParseError(
                    lineno, ParseCode.OrphanDepth, f"first node must have depth 1, found {depth}"
                )
            if current is not None and depth == 1:
                raise ParseError(
                    lineno, ParseCode.OrphanDepth, f"second top-level node {element_id}"
                )
            if current is not None and depth > current.depth + 1:
                raise ParseError(
                    lineno,
                    ParseCode.OrphanDepth,
                    f"depth jumps from {current.depth} to {depth} at {element_id}",
                )
            seen_ids.add(element_id)
            current = _NodeDraft(lineno, depth, element_id)
            drafts.append(current)
            continue
        if current is None:
            raise ParseError(
                lineno, ParseCode.BadHeading, "content before the first element heading"
            )
        if line.startswith("@"):
            match = _METADATA_RE.match(line)
            if match is None:
                raise ParseError(
                    lineno, ParseCode.BadMetadata, f"malformed metadata line {line!r}"
                )
            key = match.group(1)
            value = match.group(2).strip()
            if key not in RESERVED_KEYS and not _CUSTOM_KEY_RE.match(key):
                raise ParseError(
                    lineno,
                    ParseCode.BadMetadata,
                    f"unknown key @{key}; custom keys must be written @x-<key>",
                )
            if key in current.keys:
                raise ParseError(
                    lineno, ParseCode.BadMetadata, f"duplicate key @{key} on {current.id}"
                )
            current.keys[key] = (lineno, value)
            continue
        current.body.append(line.strip())

    if not drafts:
        raise ParseError(1, ParseCode.EmptyDocument, "no elements in input")
    return drafts


def _enum_value(draft: _NodeDraft, key: str, enum_cls):
    entry = draft.keys.get(key)
    if entry is None:
        return None
    lineno, value = entry
    for member in enum_cls:
        if member.value == value.lower():
            return member
    allowed = ", ".join(m.value for m in enum_cls)
    raise ParseError(
        lineno, ParseCode.BadMetadata, f"@{key} must be one of {allowed}, found {value!r}"
    )


def _build_element(draft: _NodeDraft) -> Element:
    kind = PREFIX_KIND[draft.id[0]]

    author_entry = draft.keys.get("author")
    author = author_entry[1] if author_entry else ""
    if author_entry and not author:
        raise ParseError(author_entry[0], ParseCode.BadMetadata, "@author must not be empty")

    stage = _enum_value(draft, "stage", Stage)

    rebuttal_entry = draft.keys.get("rebuttal")
    is_rebuttal = False
    if rebuttal_entry is not None:
        lineno, value = rebuttal_entry
        if value.lower() != "true":
            raise ParseError(
                lineno, ParseCode.BadMetadata, f"@rebuttal accepts only 'true', found {value!r}"
            )
        is_rebuttal = True

    status = _enum_value(draft, "status", RebuttalStatus)
    if status is not None and not is_rebuttal:
        raise ParseError(
            draft.keys["status"][0],
            ParseCode.BadMetadata,
            "@status is only legal together with @rebuttal: true",
        )
    if is_rebuttal and status is None:
        status = RebuttalStatus.Open

    metadata = {
        key: value
        for key, (_, value) in draft.keys.items()
        if key not in RESERVED_KEYS
    }

    return Element(
        id=draft.id,
        kind=kind,
        text=" ".join(draft.body),
        author=author,
        stage=stage,
        is_rebuttal=is_rebuttal,
        rebuttal_status=status,
        metadata=metadata,
    )


def parse(text: str) -> Document:
    """Parse GSN text; raises ParseError on syntax, InvalidDocumentError on structure."""
    drafts = _scan(text)

    elements: dict[str, Element] = {}
    children: dict[str, tuple[str, ...]] = {}
    stack: list[_NodeDraft] = []
    for draft in drafts:
        elements[draft.id] = _build_element(draft)
        while stack and stack[-1].depth >= draft.depth:
            stack.pop()
        if stack:
            parent = stack[-1].id
            children[parent] = children.get(parent, ()) + (draft.id,)
        stack.append(draft)

    doc = Document(drafts[0].id, elements, children)
    require_valid(doc)
    return doc


def _node_lines(doc: Document, element_id: str, depth: int) -> list[str]:
    element = doc.elements[element_id]
    lines = ["*" * depth + " " + element.id]
    if element.text:
        # A leading space shields body text that would otherwise read as
        # markup; parsing trims it back off.
        body = element.text
        if body[0] in "*@":
            body = " " + body
        lines.append(body)
    lines.append(f"@author: {element.author}")
    if element.stage is not None:
        lines.append(f"@stage: {element.stage.value}")
    if element.is_rebuttal:
        lines.append("@rebuttal: true")
        lines.append(f"@status: {element.rebuttal_status.value}")
    for key, value in element.metadata.items():
        if not _CUSTOM_KEY_RE.match(key):
            raise ValueError(f"metadata key {key!r} on {element.id} must match x-<key>")
        lines.append(f"@{key}: {value}")
    return lines


def serialize(doc: Document) -> str:
    """Canonical text: pre-order, fixed metadata order, one blank line between nodes."""
    require_valid(doc)
    blocks: list[str] = []
    stack: list[tuple[str, int]] = [(doc.root_id, 1)]
    while stack:
        eid, depth = stack.pop()
        blocks.append("\n".join(_node_lines(doc, eid, depth)))
        for child in reversed(doc.child_ids(eid)):
            stack.append((child, depth + 1))
    return "\n\n".join(blocks) + "\n"
