"""Diagram export: DOT for external tooling, self-contained SVG for the UI.

The GSN shape vocabulary is fixed: goals are rectangles, strategies
parallelograms, evidence ovals, contexts rounded rectangles.  Rebuttals
keep the context shape but render dashed and carry a ``*Rebuttal*`` (or
``*Risk*``) prefix.  Both exports are deterministic byte for byte.
"""

from __future__ import annotations

import textwrap
from dataclasses import dataclass

from caselift.core import Document, Element, ElementKind, require_valid
from caselift.errors import UnknownHighlightError

NODE_W = 180
NODE_H = 76
H_GAP = 28
V_GAP = 56
MARGIN = 24
_WRAP = 26
_MAX_LINES = 3

_DOT_SHAPES = {
    ElementKind.Goal: "box",
    ElementKind.Strategy: "parallelogram",
    ElementKind.Evidence: "ellipse",
    ElementKind.Context: "box",
}


@dataclass(frozen=True)
class RenderOptions:
    highlight: frozenset[str] = frozenset()
    relabel_rebuttal_as_risk: bool = False


def _check(doc: Document, options: RenderOptions) -> None:
    require_valid(doc)
    for eid in options.highlight:
        if eid not in doc.elements:
            raise UnknownHighlightError(f"highlight id {eid!r} is not in the document")


def _marker(options: RenderOptions) -> str:
    return "*Risk*" if options.relabel_rebuttal_as_risk else "*Rebuttal*"


def _label_lines(element: Element, options: RenderOptions) -> list[str]:
    text = element.text
    if element.is_rebuttal:
        text = f"{_marker(options)} {text}".strip()
    lines = textwrap.wrap(text, _WRAP) if text else []
    if len(lines) > _MAX_LINES:
        lines = lines[: _MAX_LINES - 1] + [lines[_MAX_LINES - 1][: _WRAP - 1] + "…"]
    return [element.id] + lines


# -- DOT -----------------------------------------------------------------------


def _dot_escape(value: str) -> str:
    return value.replace("\\", "\\\\").replace('"', '\\"')


def to_dot(doc: Document, options: RenderOptions = RenderOptions()) -> str:
    """Graphviz digraph; contexts hang off undirected-styled edges."""
    _check(doc, options)
    lines = [
        "digraph assurance_case {",
        "  rankdir=TB;",
        '  node [fontname="Helvetica", fontsize=10];',
    ]
    order = doc.preorder()
    for eid in order:
        element = doc.elements[eid]
        label = _dot_escape("\n".join(_label_lines(element, options))).replace("\n", "\\n")
        attrs = [f'label="{label}"', f"shape={_DOT_SHAPES[element.kind]}"]
        styles = []
        if element.kind is ElementKind.Context:
            styles.append("rounded")
        if element.is_rebuttal:
            styles.append("dashed")
        if styles:
            attrs.append(f'style="{",".join(styles)}"')
        if eid in options.highlight:
            attrs.append("color=crimson")
            attrs.append("penwidth=2.0")
        lines.append(f'  "{_dot_escape(eid)}" [{", ".join(attrs)}];')
    for eid in order:
        for child in doc.child_ids(eid):
            if doc.elements[child].kind is ElementKind.Context:
                lines.append(f'  "{_dot_escape(eid)}" -> "{_dot_escape(child)}" [dir=none];')
            else:
                lines.append(f'  "{_dot_escape(eid)}" -> "{_dot_escape(child)}";')
    lines.append("}")
    return "\n".join(lines) + "\n"


# -- SVG -----------------------------------------------------------------------


def _xml_escape(value: str) -> str:
    return (
        value.replace("&", "&amp;")
        .replace("<", "&lt;")
        .replace(">", "&gt;")
        .replace('"', "&quot;")
    )


def _layout(doc: Document) -> dict[str, tuple[float, float]]:
    """Top-down layered layout: y by depth, leaves in slots, parents centered."""
    positions: dict[str, tuple[float, float]] = {}
    next_slot = [0.0]

    def place(eid: str, depth: int) -> float:
        kids = doc.child_ids(eid)
        if kids:
            xs = [place(kid, depth + 1) for kid in kids]
            x = (min(xs) + max(xs)) / 2
        else:
            x = next_slot[0]
            next_slot[0] += 1
        positions[eid] = (x, float(depth))
        return x

    place(doc.root_id, 0)
    return {
        eid: (
            MARGIN + x * (NODE_W + H_GAP),
            MARGIN + y * (NODE_H + V_GAP),
        )
        for eid, (x, y) in positions.items()
    }


def _svg_shape(element: Element, x: float, y: float) -> str:
    cls = f"kind-{element.kind.value}"
    dash = ' stroke-dasharray="6,3"' if element.is_rebuttal else ""
    stroke = "#333333"
    if element.kind is ElementKind.Strategy:
        skew = 18
        points = (
            f"{x + skew:.1f},{y:.1f} {x + NODE_W:.1f},{y:.1f} "
            f"{x + NODE_W - skew:.1f},{y + NODE_H:.1f} {x:.1f},{y + NODE_H:.1f}"
        )
        return f'<polygon class="{cls}" points="{points}" fill="#ffffff" stroke="{stroke}"{dash}/>'
    if element.kind is ElementKind.Evidence:
        return (
            f'<ellipse class="{cls}" cx="{x + NODE_W / 2:.1f}" cy="{y + NODE_H / 2:.1f}" '
            f'rx="{NODE_W / 2:.1f}" ry="{NODE_H / 2:.1f}" fill="#ffffff" stroke="{stroke}"{dash}/>'
        )
    rx = ' rx="12"' if element.kind is ElementKind.Context else ""
    return (
        f'<rect class="{cls}" x="{x:.1f}" y="{y:.1f}" width="{NODE_W}" height="{NODE_H}"'
        f'{rx} fill="#ffffff" stroke="{stroke}"{dash}/>'
    )


def to_svg(doc: Document, options: RenderOptions = RenderOptions()) -> str:
    """SVG 1.1 document; each node group carries data-element-id for hit-testing."""
    _check(doc, options)
    positions = _layout(doc)
    width = max(x for x, _ in positions.values()) + NODE_W + MARGIN
    height = max(y for _, y in positions.values()) + NODE_H + MARGIN

    parts = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{width:.0f}" '
        f'height="{height:.0f}" viewBox="0 0 {width:.0f} {height:.0f}">',
        "<defs>",
        '<marker id="arrow" viewBox="0 0 10 10" refX="9" refY="5" markerWidth="7" '
        'markerHeight="7" orient="auto-start-reverse">'
        '<path d="M 0 0 L 10 5 L 0 10 z" fill="#333333"/></marker>',
        "</defs>",
        '<g class="edges" stroke="#333333" fill="none">',
    ]
    for eid in doc.preorder():
        px, py = positions[eid]
        for child in doc.child_ids(eid):
            cx, cy = positions[child]
            x1, y1 = px + NODE_W / 2, py + NODE_H
            x2, y2 = cx + NODE_W / 2, cy
            if doc.elements[child].kind is ElementKind.Context:
                parts.append(f'<line x1="{x1:.1f}" y1="{y1:.1f}" x2="{x2:.1f}" y2="{y2:.1f}"/>')
            else:
                parts.append(
                    f'<line x1="{x1:.1f}" y1="{y1:.1f}" x2="{x2:.1f}" y2="{y2:.1f}" '
                    'marker-end="url(#arrow)"/>'
                )
    parts.append("</g>")
    parts.append('<g class="nodes" font-family="Helvetica, sans-serif" font-size="11">')
    for eid in doc.preorder():
        element = doc.elements[eid]
        x, y = positions[eid]
        highlight = (
            f'<rect x="{x - 4:.1f}" y="{y - 4:.1f}" width="{NODE_W + 8}" height="{NODE_H + 8}" '
            'fill="none" stroke="crimson" stroke-width="2"/>'
            if eid in options.highlight
            else ""
        )
        lines = _label_lines(element, options)
        spans = "".join(
            f'<tspan x="{x + NODE_W / 2:.1f}" dy="{14 if i else 0}">{_xml_escape(line)}</tspan>'
            for i, line in enumerate(lines)
        )
        text_y = y + NODE_H / 2 - 7 * (len(lines) - 1) + 4
        parts.append(
            f'<g class="node" data-element-id="{_xml_escape(eid)}">'
            f"{_svg_shape(element, x, y)}{highlight}"
            f'<text x="{x + NODE_W / 2:.1f}" y="{text_y:.1f}" text-anchor="middle" '
            f'fill="#111111">{spans}</text></g>'
        )
    parts.append("</g>")
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
