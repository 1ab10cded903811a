"""Seeded generators for random valid documents and random document edits.

Used by the round-trip, diff-oracle and render tests.  Generation is pure
in the passed RNG, so a seed pins the whole document.
"""

from __future__ import annotations

import random

from caselift.core import (
    Document,
    Element,
    ElementKind,
    KIND_PREFIX,
    RebuttalStatus,
    Stage,
)

AUTHORS = ["owner", "developer", "operator", "user"]

_WORDS = (
    "service data backup monitor threshold storage submission class server "
    "traffic failure recovery assumption evidence review load test git syslog "
    "restart capacity student instructor exercise grading platform term"
).split()

# Texts that stress normalization and the markup shield.
_AWKWARD = [
    "*Rebuttal* looking text that is body",
    "@author: not metadata, just prose",
    "  leading and   internal   runs of space ",
    "tabs\tand\nnewlines collapse",
    "",
]


def _text(rng: random.Random) -> str:
    if rng.random() < 0.15:
        return rng.choice(_AWKWARD)
    return " ".join(rng.choice(_WORDS) for _ in range(rng.randint(1, 12)))


def _metadata(rng: random.Random) -> dict[str, str]:
    if rng.random() < 0.25:
        keys = rng.sample(["x-note", "x-script-param", "x-source-url", "x-review.tag"], rng.randint(1, 2))
        return {k: _text(rng) or "empty" for k in keys}
    return {}


def _stage(rng: random.Random) -> Stage | None:
    return rng.choice(list(Stage)) if rng.random() < 0.2 else None


class _Ids:
    def __init__(self):
        self.n = 0

    def take(self, rng: random.Random, kind: ElementKind) -> str:
        self.n += 1
        prefix = KIND_PREFIX[kind]
        if rng.random() < 0.3:
            return f"{prefix}{self.n}.{rng.randint(1, 9)}"
        return f"{prefix}{self.n}"


def _element(rng: random.Random, ids: _Ids, kind: ElementKind, rebuttal: bool = False) -> Element:
    status = rng.choice(list(RebuttalStatus)) if rebuttal else None
    return Element(
        id=ids.take(rng, kind),
        kind=kind,
        text=_text(rng),
        author=rng.choice(AUTHORS),
        stage=_stage(rng),
        is_rebuttal=rebuttal,
        rebuttal_status=status,
        metadata=_metadata(rng),
    )


def random_document(rng: random.Random, max_nodes: int = 24) -> Document:
    """A structurally valid document with 1..max_nodes elements."""
    ids = _Ids()
    root = _element(rng, ids, ElementKind.Goal)
    doc = Document(root.id, {root.id: root}, {})
    for _ in range(rng.randint(0, max_nodes - 1)):
        doc = grow_document(rng, doc, ids)
    return doc


def grow_document(rng: random.Random, doc: Document, ids: _Ids | None = None) -> Document:
    """Attach one new random element somewhere legal."""
    if ids is None:
        ids = _Ids()
        ids.n = len(doc) + max(
            (int("".join(ch for ch in eid if ch.isdigit()) or 0) for eid in doc.elements),
            default=0,
        )
    choices = []
    for eid in doc.preorder():
        kind = doc.elements[eid].kind
        if kind is ElementKind.Goal:
            choices.append((eid, [ElementKind.Strategy, ElementKind.Evidence, ElementKind.Context, "rebuttal"]))
        elif kind is ElementKind.Strategy:
            choices.append((eid, [ElementKind.Goal, ElementKind.Context]))
        elif kind is ElementKind.Evidence:
            choices.append((eid, ["rebuttal"]))
    parent_id, kinds = rng.choice(choices)
    pick = rng.choice(kinds)
    if pick == "rebuttal":
        child = _element(rng, ids, ElementKind.Context, rebuttal=True)
    else:
        child = _element(rng, ids, pick)
    position = rng.randint(0, len(doc.child_ids(parent_id))) if doc.child_ids(parent_id) else None
    return doc.with_child(parent_id, child, position)


def mutate_document(rng: random.Random, doc: Document) -> Document:
    """One random valid edit: grow, reword, retag, restatus, reorder or prune."""
    ops = ["grow", "text", "metadata", "author", "stage", "status", "reorder", "remove"]
    for _ in range(20):
        op = rng.choice(ops)
        targets = [eid for eid in doc.preorder()]
        eid = rng.choice(targets)
        element = doc.elements[eid]
        if op == "grow":
            return grow_document(rng, doc)
        if op == "text":
            return doc.with_element(element.replace(text=_text(rng) + " edited"))
        if op == "metadata":
            meta = dict(element.metadata)
            meta["x-rev-note"] = _text(rng) or "touched"
            return doc.with_element(element.replace(metadata=meta))
        if op == "author":
            other = rng.choice([a for a in AUTHORS if a != element.author])
            return doc.with_element(element.replace(author=other))
        if op == "stage":
            stage = rng.choice([s for s in Stage if s is not element.stage])
            return doc.with_element(element.replace(stage=stage))
        if op == "status" and element.is_rebuttal:
            status = rng.choice([s for s in RebuttalStatus if s is not element.rebuttal_status])
            return doc.with_element(element.replace(rebuttal_status=status))
        if op == "reorder":
            kids = list(doc.child_ids(eid))
            if len(kids) > 1:
                shuffled = kids[:]
                rng.shuffle(shuffled)
                if shuffled != kids:
                    children = dict(doc.children)
                    children[eid] = tuple(shuffled)
                    return Document(doc.root_id, dict(doc.elements), children)
        if op == "remove" and eid != doc.root_id and rng.random() < 0.5:
            return doc.without_subtree(eid)
    return grow_document(rng, doc)
