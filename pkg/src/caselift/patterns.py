"""Reusable argument patterns instantiated as document fragments.

Three proven shapes: decomposition by lifecycle stage, decomposition by
dependability attribute, and the two-legged failure-avoidance argument
(detect the symptom, mitigate before the service stops).  No evolution
pattern is offered; the evolution-stage goal is emitted undeveloped and
left to the stakeholders.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass, field

from caselift.core import Document, Element, ElementKind, Stage, require_valid
from caselift.errors import (
    BadTargetError,
    IdCollisionError,
    MissingParameterError,
    UnknownPatternError,
)


class PatternId(enum.Enum):
    LifecycleStages = "lifecycle-stages"
    DependabilityAttributes = "dependability-attributes"
    FailureAvoidance = "failure-avoidance"


class Attribute(enum.Enum):
    Availability = "availability"
    Reliability = "reliability"
    Integrity = "integrity"
    Privacy = "privacy"


DEFAULT_STATEMENTS = {
    Attribute.Availability: "The service is available to its users whenever they need it",
    Attribute.Reliability: "No hardware or software failure interrupts service delivery",
    Attribute.Integrity: "Data entrusted to the service is never lost or corrupted",
    Attribute.Privacy: "Personal information is not disclosed to unauthorized parties",
}

_STAGE_CLAIMS = {
    Stage.Planning: "Requirements are elicited and the architecture fits the expected use",
    Stage.Development: "The developed system meets the dependability goals",
    Stage.Operation: "The operated service detects and recovers from failures",
    Stage.Evolution: "Changes to the system are accommodated without losing dependability",
}


@dataclass(frozen=True)
class FailureMode:
    """One entry of the failure-avoidance parameter list."""

    name: str
    monitor: str | None = None
    threshold: str | None = None


@dataclass
class PatternParams:
    """Slots for all three patterns; each pattern reads the slots it needs."""

    author: str = ""
    system: str = ""
    attributes: tuple[Attribute, ...] = ()
    statements: dict[Attribute, str] = field(default_factory=dict)
    modes: tuple[FailureMode, ...] = ()


class _IdAllocator:
    def __init__(self, start: dict[str, int] | None = None):
        self.next = {"G": 1, "S": 1, "E": 1, "C": 1}
        if start:
            self.next.update(start)

    def take(self, prefix: str) -> str:
        eid = f"{prefix}{self.next[prefix]}"
        self.next[prefix] += 1
        return eid


def _require(params: PatternParams, slot: str) -> None:
    if not getattr(params, slot):
        raise MissingParameterError(f"pattern parameter {slot!r} is required")


def instantiate(
    pattern: PatternId,
    params: PatternParams,
    id_start: dict[str, int] | None = None,
) -> Document:
    """Build the pattern as a standalone goal-rooted document.

    Deterministic: the same params and id_start yield the same fragment.
    Every generated element is authored by the instantiating stakeholder.
    """
    _require(params, "author")
    ids = _IdAllocator(id_start)
    author = params.author

    if pattern is PatternId.LifecycleStages:
        _require(params, "system")
        root = Element(
            id=ids.take("G"),
            kind=ElementKind.Goal,
            text=f"{params.system} delivers dependable service across its lifecycle",
            author=author,
        )
        doc = Document(root.id, {root.id: root}, {})
        strategy = Element(
            id=ids.take("S"),
            kind=ElementKind.Strategy,
            text="Argue over the lifecycle stages",
            author=author,
        )
        doc = doc.with_child(root.id, strategy)
        for stage in Stage:
            doc = doc.with_child(
                strategy.id,
                Element(
                    id=ids.take("G"),
                    kind=ElementKind.Goal,
                    text=_STAGE_CLAIMS[stage],
                    author=author,
                    stage=stage,
                ),
            )
        require_valid(doc)
        return doc

    if pattern is PatternId.DependabilityAttributes:
        _require(params, "system")
        attributes = params.attributes or tuple(Attribute)
        root = Element(
            id=ids.take("G"),
            kind=ElementKind.Goal,
            text=f"{params.system} is dependable",
            author=author,
        )
        doc = Document(root.id, {root.id: root}, {})
        strategy = Element(
            id=ids.take("S"),
            kind=ElementKind.Strategy,
            text="Argue over the dependability attributes",
            author=author,
        )
        doc = doc.with_child(root.id, strategy)
        for attribute in attributes:
            statement = params.statements.get(attribute, DEFAULT_STATEMENTS[attribute])
            doc = doc.with_child(
                strategy.id,
                Element(id=ids.take("G"), kind=ElementKind.Goal, text=statement, author=author),
            )
        require_valid(doc)
        return doc

    if pattern is PatternId.FailureAvoidance:
        _require(params, "modes")
        for mode in params.modes:
            if not mode.name:
                raise MissingParameterError("every failure mode needs a name")
        root = Element(
            id=ids.take("G"),
            kind=ElementKind.Goal,
            text="Identified failure modes are avoided during operation",
            author=author,
            stage=Stage.Operation,
        )
        doc = Document(root.id, {root.id: root}, {})
        top_strategy = Element(
            id=ids.take("S"),
            kind=ElementKind.Strategy,
            text="Argue over the identified failure modes",
            author=author,
        )
        doc = doc.with_child(root.id, top_strategy)
        for mode in params.modes:
            mode_goal = Element(
                id=ids.take("G"),
                kind=ElementKind.Goal,
                text=f"{mode.name} does not stop the service",
                author=author,
            )
            doc = doc.with_child(top_strategy.id, mode_goal)
            legs = Element(
                id=ids.take("S"),
                kind=ElementKind.Strategy,
                text=f"Argue detection and mitigation of {mode.name}",
                author=author,
            )
            doc = doc.with_child(mode_goal.id, legs)
            detect = Element(
                id=ids.take("G"),
                kind=ElementKind.Goal,
                text=f"The symptom of {mode.name} is detectable by monitoring",
                author=author,
            )
            doc = doc.with_child(legs.id, detect)
            if mode.monitor:
                doc = doc.with_child(
                    detect.id,
                    Element(
                        id=ids.take("C"),
                        kind=ElementKind.Context,
                        text=f"Monitored by {mode.monitor}",
                        author=author,
                    ),
                )
            if mode.threshold:
                doc = doc.with_child(
                    detect.id,
                    Element(
                        id=ids.take("C"),
                        kind=ElementKind.Context,
                        text=f"The symptom is defined by a threshold: {mode.threshold}",
                        author=author,
                    ),
                )
            doc = doc.with_child(
                legs.id,
                Element(
                    id=ids.take("G"),
                    kind=ElementKind.Goal,
                    text=f"A detected symptom of {mode.name} is mitigated before the service stops",
                    author=author,
                ),
            )
        require_valid(doc)
        return doc

    raise UnknownPatternError(f"unknown pattern {pattern!r}")


_NUMERIC_GROUP_RE = re.compile(r"^[GSEC](\d+)")


def next_free_ids(doc: Document) -> dict[str, int]:
    """Per-prefix counters past every numeric id group already in the document."""
    highest = 0
    for eid in doc.elements:
        match = _NUMERIC_GROUP_RE.match(eid)
        if match:
            highest = max(highest, int(match.group(1)))
    return {prefix: highest + 1 for prefix in "GSEC"}


def apply(
    doc: Document,
    target_goal_id: str,
    pattern: PatternId,
    params: PatternParams,
    id_start: dict[str, int] | None = None,
) -> tuple[Document, list[str]]:
    """Graft the pattern's strategies and sub-goals under an existing goal.

    With explicit id_start the generated ids are the caller's problem and
    collisions raise; without it, allocation starts past every id group in
    the document.  Returns the new document and the grafted element ids.
    """
    target = doc.element(target_goal_id)
    if target.kind is not ElementKind.Goal:
        raise BadTargetError(f"patterns apply under goals, {target_goal_id} is a {target.kind.value}")

    fragment = instantiate(pattern, params, id_start=id_start or next_free_ids(doc))
    grafted = [eid for eid in fragment.preorder() if eid != fragment.root_id]
    collisions = [eid for eid in grafted if eid in doc.elements]
    if collisions:
        raise IdCollisionError(f"generated ids already exist in the document: {', '.join(collisions)}")

    merged = doc
    for child_id in fragment.child_ids(fragment.root_id):
        merged = _graft(merged, target_goal_id, fragment, child_id)
    require_valid(merged)
    return merged, grafted


def _graft(doc: Document, parent_id: str, fragment: Document, node_id: str) -> Document:
    doc = doc.with_child(parent_id, fragment.elements[node_id])
    for child_id in fragment.child_ids(node_id):
        doc = _graft(doc, node_id, fragment, child_id)
    return doc
