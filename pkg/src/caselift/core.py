"""GSN domain model: elements, documents, well-formedness, stage inheritance.

A document is a rooted ordered tree of elements.  Four element kinds exist;
a rebuttal is not a fifth kind but a context carrying the ``is_rebuttal``
flag, attached to the goal or evidence it challenges.  Every element names
its author: accountability is a structural property, not an annotation.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

from caselift.errors import InvalidDocumentError, UnknownIdError


class Role(enum.Enum):
    """Stakeholder roles taking part in the cross-review."""

    Owner = "owner"
    Developer = "developer"
    Operator = "operator"
    User = "user"


@dataclass(frozen=True)
class StakeholderId:
    """Registry entry identifying one stakeholder by name and role."""

    name: str
    role: Role

    def __post_init__(self):
        if not self.name:
            raise ValueError("stakeholder name must be non-empty")


class ElementKind(enum.Enum):
    Goal = "goal"
    Strategy = "strategy"
    Evidence = "evidence"
    Context = "context"


# Leading id letter expected for each kind (G25, S8.2, E22.1, C22.2).
KIND_PREFIX = {
    ElementKind.Goal: "G",
    ElementKind.Strategy: "S",
    ElementKind.Evidence: "E",
    ElementKind.Context: "C",
}
PREFIX_KIND = {v: k for k, v in KIND_PREFIX.items()}


class Stage(enum.Enum):
    """Lifecycle stages used to scope claims and reviews."""

    Planning = "planning"
    Development = "development"
    Operation = "operation"
    Evolution = "evolution"


class RebuttalStatus(enum.Enum):
    Open = "open"
    Fixed = "fixed"
    Withdrawn = "withdrawn"
    ResidualRisk = "residual-risk"


TERMINAL_STATUSES = frozenset(
    {RebuttalStatus.Fixed, RebuttalStatus.Withdrawn, RebuttalStatus.ResidualRisk}
)


def _normalize_text(text: str) -> str:
    # Paragraph normalization: runs of whitespace collapse to single spaces
    # so canonical serialization is unambiguous.
    return " ".join(text.split())


@dataclass
class Element:
    """One GSN node; the unit of accountability.

    ``author`` is the stakeholder name as registered in the repository.
    ``metadata`` holds opaque ``x-`` prefixed key/value pairs in authored
    order; the store and tools never interpret them.
    """

    id: str
    kind: ElementKind
    text: str = ""
    author: str = ""
    stage: Stage | None = None
    is_rebuttal: bool = False
    rebuttal_status: RebuttalStatus | None = None
    metadata: dict[str, str] = field(default_factory=dict)

    def __post_init__(self):
        self.text = _normalize_text(self.text)
        self.author = self.author.strip()
        self.metadata = {k: _normalize_text(v) for k, v in self.metadata.items()}
        if self.is_rebuttal and self.rebuttal_status is None:
            self.rebuttal_status = RebuttalStatus.Open

    def replace(self, **changes) -> "Element":
        """Copy with the given fields replaced; metadata is copied."""
        fields = {
            "id": self.id,
            "kind": self.kind,
            "text": self.text,
            "author": self.author,
            "stage": self.stage,
            "is_rebuttal": self.is_rebuttal,
            "rebuttal_status": self.rebuttal_status,
            "metadata": dict(self.metadata),
        }
        fields.update(changes)
        return Element(**fields)


class ViolationCode(enum.Enum):
    NotATree = "not-a-tree"
    BadRoot = "bad-root"
    BadChildKind = "bad-child-kind"
    DuplicateId = "duplicate-id"
    MissingAuthor = "missing-author"
    BadRebuttalPlacement = "bad-rebuttal-placement"
    BadIdPrefix = "bad-id-prefix"


# Deterministic tiebreak when one element carries several violations.
_CODE_ORDER = {code: i for i, code in enumerate(ViolationCode)}


@dataclass(frozen=True)
class Violation:
    element_id: str
    code: ViolationCode
    message: str


# Which child kinds each parent kind accepts.  Rebuttal contexts are
# further restricted to Goal and Evidence parents.
ALLOWED_CHILDREN = {
    ElementKind.Goal: {ElementKind.Strategy, ElementKind.Evidence, ElementKind.Context},
    ElementKind.Strategy: {ElementKind.Goal, ElementKind.Context},
    ElementKind.Evidence: {ElementKind.Context},
    ElementKind.Context: set(),
}


@dataclass
class Document:
    """Rooted ordered tree of elements.

    Immutable by convention: ``with_*`` helpers build modified copies,
    which keeps documents safe to share across threads and leaves all
    write sequencing to the revision store.
    """

    root_id: str
    elements: dict[str, Element]
    children: dict[str, tuple[str, ...]]

    @property
    def root(self) -> Element:
        return self.elements[self.root_id]

    @property
    def assumptions(self) -> tuple[str, ...]:
        """Non-rebuttal context ids attached directly to the root."""
        return tuple(
            cid
            for cid in self.children.get(self.root_id, ())
            if cid in self.elements
            and self.elements[cid].kind is ElementKind.Context
            and not self.elements[cid].is_rebuttal
        )

    def __len__(self) -> int:
        return len(self.elements)

    def __contains__(self, element_id: str) -> bool:
        return element_id in self.elements

    def element(self, element_id: str) -> Element:
        try:
            return self.elements[element_id]
        except KeyError:
            raise UnknownIdError(f"no element {element_id!r} in document") from None

    def child_ids(self, element_id: str) -> tuple[str, ...]:
        return self.children.get(element_id, ())

    def parent_of(self, element_id: str) -> str | None:
        if element_id not in self.elements:
            raise UnknownIdError(f"no element {element_id!r} in document")
        for parent, kids in self.children.items():
            if element_id in kids:
                return parent
        return None

    def preorder(self, start: str | None = None) -> list[str]:
        """Ids in pre-order, authored child order; cycle-safe."""
        start = self.root_id if start is None else start
        if start not in self.elements:
            raise UnknownIdError(f"no element {start!r} in document")
        out: list[str] = []
        seen: set[str] = set()
        stack = [start]
        while stack:
            eid = stack.pop()
            if eid in seen or eid not in self.elements:
                continue
            seen.add(eid)
            out.append(eid)
            stack.extend(reversed(self.children.get(eid, ())))
        return out

    def subtree_ids(self, element_id: str) -> set[str]:
        return set(self.preorder(element_id))

    def depth_of(self, element_id: str) -> int:
        """1-based depth from the root, following parent links."""
        depth = 1
        current = element_id
        seen = {current}
        while current != self.root_id:
            parent = self.parent_of(current)
            if parent is None or parent in seen:
                raise UnknownIdError(f"{element_id!r} is not attached to the root")
            seen.add(parent)
            current = parent
            depth += 1
        return depth

    # -- functional updates -------------------------------------------------

    def with_child(self, parent_id: str, element: Element, position: int | None = None) -> "Document":
        """New document with ``element`` appended (or inserted) under ``parent_id``."""
        if parent_id not in self.elements:
            raise UnknownIdError(f"no element {parent_id!r} in document")
        if element.id in self.elements:
            raise InvalidDocumentError(
                [Violation(element.id, ViolationCode.DuplicateId, f"duplicate id {element.id}")]
            )
        elements = dict(self.elements)
        elements[element.id] = element
        children = dict(self.children)
        siblings = list(children.get(parent_id, ()))
        if position is None:
            siblings.append(element.id)
        else:
            siblings.insert(position, element.id)
        children[parent_id] = tuple(siblings)
        return Document(self.root_id, elements, children)

    def with_element(self, element: Element) -> "Document":
        """New document with the element of the same id replaced."""
        if element.id not in self.elements:
            raise UnknownIdError(f"no element {element.id!r} in document")
        elements = dict(self.elements)
        elements[element.id] = element
        return Document(self.root_id, elements, dict(self.children))

    def without_subtree(self, element_id: str) -> "Document":
        """New document with the element and its whole subtree removed."""
        if element_id == self.root_id:
            raise InvalidDocumentError(
                [Violation(element_id, ViolationCode.BadRoot, "cannot remove the root")]
            )
        doomed = self.subtree_ids(element_id)
        elements = {k: v for k, v in self.elements.items() if k not in doomed}
        children = {
            k: tuple(c for c in v if c not in doomed)
            for k, v in self.children.items()
            if k not in doomed
        }
        return Document(self.root_id, elements, children)


def single_goal_document(goal: Element) -> Document:
    return Document(goal.id, {goal.id: goal}, {})


def validate(doc: Document) -> list[Violation]:
    """Check every well-formedness rule; violations are values, not errors.

    The list is empty exactly when the document is valid.  Order is
    deterministic: offending elements in pre-order (unreachable ones after,
    in insertion order), then by violation code.
    """
    violations: list[Violation] = []

    root = doc.elements.get(doc.root_id)
    if root is None:
        violations.append(
            Violation(doc.root_id, ViolationCode.BadRoot, f"root {doc.root_id!r} does not exist")
        )
    elif root.kind is not ElementKind.Goal:
        violations.append(
            Violation(
                doc.root_id,
                ViolationCode.BadRoot,
                f"root {doc.root_id} must be a goal, found {root.kind.value}",
            )
        )

    # Tree shape: every child id resolvable, one parent each, no cycles,
    # everything reachable from the root.
    parent_count: dict[str, int] = {}
    for parent, kids in doc.children.items():
        if parent not in doc.elements:
            violations.append(
                Violation(parent, ViolationCode.NotATree, f"children listed for unknown id {parent!r}")
            )
        for kid in kids:
            parent_count[kid] = parent_count.get(kid, 0) + 1
            if kid not in doc.elements:
                violations.append(
                    Violation(kid, ViolationCode.NotATree, f"child {kid!r} of {parent} does not exist")
                )
    for eid, count in parent_count.items():
        if count > 1:
            violations.append(
                Violation(eid, ViolationCode.NotATree, f"{eid} has {count} parents")
            )
    if doc.root_id in parent_count:
        violations.append(
            Violation(doc.root_id, ViolationCode.NotATree, "root must not have a parent")
        )

    reachable = set(doc.preorder()) if root is not None else set()
    for eid in doc.elements:
        if root is not None and eid not in reachable:
            violations.append(
                Violation(eid, ViolationCode.NotATree, f"{eid} is not reachable from the root")
            )

    for eid, element in doc.elements.items():
        if element.id != eid:
            violations.append(
                Violation(eid, ViolationCode.DuplicateId, f"element keyed {eid!r} carries id {element.id!r}")
            )
        expected = KIND_PREFIX[element.kind]
        if not element.id or element.id[0] != expected:
            violations.append(
                Violation(
                    eid,
                    ViolationCode.BadIdPrefix,
                    f"{element.kind.value} id {element.id!r} must start with {expected!r}",
                )
            )
        if not element.author:
            violations.append(
                Violation(eid, ViolationCode.MissingAuthor, f"{eid} has no author")
            )
        if element.is_rebuttal and element.kind is not ElementKind.Context:
            violations.append(
                Violation(
                    eid,
                    ViolationCode.BadRebuttalPlacement,
                    f"rebuttal flag on {element.kind.value} {eid}; only contexts can be rebuttals",
                )
            )
        if element.is_rebuttal and element.rebuttal_status is None:
            violations.append(
                Violation(eid, ViolationCode.BadRebuttalPlacement, f"rebuttal {eid} lacks a status")
            )
        if not element.is_rebuttal and element.rebuttal_status is not None:
            violations.append(
                Violation(
                    eid,
                    ViolationCode.BadRebuttalPlacement,
                    f"{eid} carries a rebuttal status without the rebuttal flag",
                )
            )

    for parent_id, kids in doc.children.items():
        parent = doc.elements.get(parent_id)
        if parent is None:
            continue
        allowed = ALLOWED_CHILDREN[parent.kind]
        for kid_id in kids:
            kid = doc.elements.get(kid_id)
            if kid is None:
                continue
            if kid.kind not in allowed:
                violations.append(
                    Violation(
                        kid_id,
                        ViolationCode.BadChildKind,
                        f"{parent.kind.value} {parent_id} cannot have a {kid.kind.value} child ({kid_id})",
                    )
                )
            if kid.kind is ElementKind.Context:
                if kid.is_rebuttal and parent.kind not in (ElementKind.Goal, ElementKind.Evidence):
                    violations.append(
                        Violation(
                            kid_id,
                            ViolationCode.BadRebuttalPlacement,
                            f"rebuttal {kid_id} must attach to a goal or evidence, not {parent.kind.value}",
                        )
                    )
                if not kid.is_rebuttal and parent.kind is ElementKind.Evidence:
                    violations.append(
                        Violation(
                            kid_id,
                            ViolationCode.BadChildKind,
                            f"evidence {parent_id} accepts only rebuttal contexts, {kid_id} is a plain context",
                        )
                    )

    order = {eid: i for i, eid in enumerate(doc.preorder() if root is not None else [])}
    fallback = {eid: i for i, eid in enumerate(doc.elements)}

    def sort_key(v: Violation):
        pos = order.get(v.element_id, len(order) + fallback.get(v.element_id, len(fallback)))
        return (pos, _CODE_ORDER[v.code], v.message)

    violations.sort(key=sort_key)
    # Duplicate diagnoses can arise when one defect trips several rules.
    deduped: list[Violation] = []
    for v in violations:
        if not deduped or deduped[-1] != v:
            deduped.append(v)
    return deduped


def require_valid(doc: Document) -> None:
    violations = validate(doc)
    if violations:
        raise InvalidDocumentError(violations)


def undeveloped_goals(doc: Document) -> set[str]:
    """Goals with neither a strategy nor an evidence child (direct children only)."""
    require_valid(doc)
    result: set[str] = set()
    for eid in doc.preorder():
        element = doc.elements[eid]
        if element.kind is not ElementKind.Goal:
            continue
        kinds = {doc.elements[c].kind for c in doc.child_ids(eid)}
        if ElementKind.Strategy not in kinds and ElementKind.Evidence not in kinds:
            result.add(eid)
    return result


def effective_stage(doc: Document, element_id: str) -> Stage | None:
    """The element's own stage, or the nearest ancestor's, or None."""
    current: str | None = element_id
    if element_id not in doc.elements:
        raise UnknownIdError(f"no element {element_id!r} in document")
    while current is not None:
        stage = doc.elements[current].stage
        if stage is not None:
            return stage
        current = doc.parent_of(current) if current != doc.root_id else None
    return None


def open_rebuttals(doc: Document, scope_id: str | None = None) -> list[str]:
    """Rebuttal contexts still Open within the given subtree, in pre-order."""
    start = doc.root_id if scope_id is None else scope_id
    if start not in doc.elements:
        raise UnknownIdError(f"no element {start!r} in document")
    return [
        eid
        for eid in doc.preorder(start)
        if doc.elements[eid].is_rebuttal
        and doc.elements[eid].rebuttal_status is RebuttalStatus.Open
    ]
