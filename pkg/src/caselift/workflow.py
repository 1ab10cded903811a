"""Cross-review protocol: rebuttal lifecycle, review rounds, approval.

Rebuttal statuses move one way: Open is the only live state, and Fixed,
Withdrawn and ResidualRisk are terminal.  A review round closes only when
every rebuttal in its phase is terminal; goals in the phase then count as
approved by the round's participants, with residual conflicts carried
forward under the objecting stakeholder's name.
"""

from __future__ import annotations

import enum
import json
import re
from dataclasses import dataclass
from pathlib import Path

from caselift.core import (
    Document,
    Element,
    ElementKind,
    RebuttalStatus,
    Stage,
    StakeholderId,
    TERMINAL_STATUSES,
    effective_stage,
    open_rebuttals,
    undeveloped_goals,
)
from caselift.errors import (
    AlreadyResolvedError,
    BadTargetError,
    FixedWithoutChangeError,
    OpenConflictsError,
    ReviewStateError,
    StaleBaseError,
    UnknownAuthorError,
    UnknownIdError,
    UnknownReviewError,
    UnknownRevisionError,
)
from caselift.store import ChangeKind, REVIEWS_NAME, Repository, write_json_atomic


class ReviewStatus(enum.Enum):
    Open = "open"
    Closed = "closed"


class ClaimStatus(enum.Enum):
    Undeveloped = "undeveloped"
    Claimed = "claimed"
    Rebutted = "rebutted"
    AgreedResidual = "agreed-residual"
    Approved = "approved"


@dataclass
class Review:
    """One named cross-review round over a lifecycle phase."""

    name: str
    phase: Stage
    participants: tuple[str, ...]
    opened_at: int
    closed_at: int | None = None
    status: ReviewStatus = ReviewStatus.Open


@dataclass(frozen=True)
class Resolution:
    """Recorded outcome of one rebuttal; the note keeps the agreement's gist."""

    rebuttal_id: str
    decision: RebuttalStatus
    decided_by: str
    at_revision: int
    note: str = ""


class ReviewLog:
    """Reviews and resolutions of one repository, persisted in reviews.json."""

    def __init__(self, reviews: list[Review] | None = None, resolutions: list[Resolution] | None = None):
        self.reviews: list[Review] = reviews or []
        self.resolutions: list[Resolution] = resolutions or []

    @classmethod
    def load(cls, repo_path: str | Path) -> "ReviewLog":
        path = Path(repo_path) / REVIEWS_NAME
        if not path.exists():
            return cls()
        data = json.loads(path.read_text(encoding="utf-8"))
        reviews = [
            Review(
                name=entry["name"],
                phase=Stage(entry["phase"]),
                participants=tuple(entry["participants"]),
                opened_at=entry["opened_at"],
                closed_at=entry["closed_at"],
                status=ReviewStatus(entry["status"]),
            )
            for entry in data.get("reviews", [])
        ]
        resolutions = [
            Resolution(
                rebuttal_id=entry["rebuttal_id"],
                decision=RebuttalStatus(entry["decision"]),
                decided_by=entry["decided_by"],
                at_revision=entry["at_revision"],
                note=entry["note"],
            )
            for entry in data.get("resolutions", [])
        ]
        return cls(reviews, resolutions)

    def save(self, repo_path: str | Path) -> None:
        data = {
            "reviews": [
                {
                    "name": r.name,
                    "phase": r.phase.value,
                    "participants": list(r.participants),
                    "opened_at": r.opened_at,
                    "closed_at": r.closed_at,
                    "status": r.status.value,
                }
                for r in self.reviews
            ],
            "resolutions": [
                {
                    "rebuttal_id": r.rebuttal_id,
                    "decision": r.decision.value,
                    "decided_by": r.decided_by,
                    "at_revision": r.at_revision,
                    "note": r.note,
                }
                for r in self.resolutions
            ],
        }
        write_json_atomic(Path(repo_path) / REVIEWS_NAME, data)

    def find(self, name: str) -> Review:
        for review in self.reviews:
            if review.name == name:
                return review
        raise UnknownReviewError(f"no review named {name!r}")

    def closed_review_covering(self, phase: Stage | None, at: int) -> Review | None:
        """Latest review of the phase closed at or before the revision."""
        best: Review | None = None
        if phase is None:
            return None
        for review in self.reviews:
            if review.status is not ReviewStatus.Closed or review.phase is not phase:
                continue
            if review.closed_at is not None and review.closed_at <= at:
                if best is None or review.closed_at > (best.closed_at or 0):
                    best = review
        return best


# -- phase scoping -----------------------------------------------------------


def phase_goals(doc: Document, phase: Stage) -> list[str]:
    """Goals whose effective (possibly inherited) stage is the phase."""
    return [
        eid
        for eid in doc.preorder()
        if doc.elements[eid].kind is ElementKind.Goal
        and effective_stage(doc, eid) is phase
    ]

def phase_open_rebuttals(doc: Document, phase: Stage) -> list[str]:
    """Open rebuttals in the subtrees of all phase goals, pre-order, deduplicated."""
    seen: set[str] = set()
    out: list[str] = []
    for goal_id in phase_goals(doc, phase):
        for rid in open_rebuttals(doc, goal_id):
            if rid not in seen:
                seen.add(rid)
                out.append(rid)
    return out


# -- rebuttal lifecycle -------------------------------------------------------

_GROUP_RE = re.compile(r"^[GSEC](\d+)")


def _allocate_rebuttal_id(doc: Document, target_id: str) -> str:
    # Continue the dotted suffix numbering of the target's group: a rebuttal
    # on E22.1 becomes C22.2, the next one C22.3.
    match = _GROUP_RE.match(target_id)
    if match:
        group = match.group(1)
        taken = [
            int(m.group(1))
            for eid in doc.elements
            for m in [re.match(rf"^[GSEC]{group}\.(\d+)$", eid)]
            if m
        ]
        suffix = max(taken, default=0) + 1
        candidate = f"C{group}.{suffix}"
        while candidate in doc.elements:
            suffix += 1
            candidate = f"C{group}.{suffix}"
        return candidate
    n = 1
    while f"C{n}" in doc.elements:
        n += 1
    return f"C{n}"


def raise_rebuttal(
    doc: Document,
    target_id: str,
    author: str,
    text: str,
    rebuttal_id: str | None = None,
) -> tuple[Document, str]:
    """Attach a fresh Open rebuttal context to a goal or evidence element.

    Returns the new document and the rebuttal's id; committing is the
    caller's business.
    """
    target = doc.element(target_id)
    if target.kind not in (ElementKind.Goal, ElementKind.Evidence):
        raise BadTargetError(
            f"rebuttals challenge goals or evidence, {target_id} is a {target.kind.value}"
        )
    new_id = rebuttal_id or _allocate_rebuttal_id(doc, target_id)
    rebuttal = Element(
        id=new_id,
        kind=ElementKind.Context,
        text=text,
        author=author,
        is_rebuttal=True,
        rebuttal_status=RebuttalStatus.Open,
    )
    return doc.with_child(target_id, rebuttal), new_id


def _target_changed_since(repo: Repository, doc: Document, target_id: str, since: int) -> bool:
    """Did the target element or its non-rebuttal subtree change after `since`?"""
    scan: set[str] = {
        eid for eid in doc.preorder(target_id) if not doc.elements[eid].is_rebuttal
    }
    if since <= repo.head:
        creation_doc = repo.checkout(since)
        if target_id in creation_doc:
            scan |= {
                eid
                for eid in creation_doc.preorder(target_id)
                if not creation_doc.elements[eid].is_rebuttal
            }
    for eid in scan:
        for event in repo.element_history(eid):
            if event.revision > since:
                return True
    return False


def resolve_rebuttal(
    repo: Repository,
    doc: Document,
    rebuttal_id: str,
    decision: RebuttalStatus,
    decided_by: str,
    note: str = "",
) -> tuple[Document, Resolution]:
    """Move an Open rebuttal to a terminal status.

    Fixed is only accepted when the challenged element (or its non-rebuttal
    subtree) demonstrably changed since the rebuttal first appeared — the
    commit history is the proof.  The resolution's ``at_revision`` points at
    the next revision number; commit the returned document, then record the
    resolution.
    """
    element = doc.element(rebuttal_id)
    if not element.is_rebuttal:
        raise BadTargetError(f"{rebuttal_id} is not a rebuttal")
    if element.rebuttal_status is not RebuttalStatus.Open:
        raise AlreadyResolvedError(
            f"{rebuttal_id} is already {element.rebuttal_status.value}"
        )
    if decision not in TERMINAL_STATUSES:
        raise BadTargetError(f"{decision.value} is not a terminal decision")
    if not repo.is_registered(decided_by):
        raise UnknownAuthorError(f"stakeholder {decided_by!r} is not registered")

    if decision is RebuttalStatus.Fixed:
        history = repo.element_history(rebuttal_id)
        added = [e for e in history if e.kind is ChangeKind.Added]
        creation = added[0].revision if added else repo.head
        target_id = doc.parent_of(rebuttal_id)
        if target_id is None or not _target_changed_since(repo, doc, target_id, creation):
            raise FixedWithoutChangeError(
                f"cannot mark {rebuttal_id} fixed: {target_id or 'its target'} "
                f"is unchanged since the rebuttal was raised at revision {creation}"
            )

    updated = doc.with_element(element.replace(rebuttal_status=decision))
    resolution = Resolution(
        rebuttal_id=rebuttal_id,
        decision=decision,
        decided_by=decided_by,
        at_revision=repo.head + 1,
        note=note,
    )
    return updated, resolution


def record_resolution(repo: Repository, log: ReviewLog, resolution: Resolution) -> None:
    """Persist a resolution after its revision has been committed."""
    if not 1 <= resolution.at_revision <= repo.head:
        raise UnknownRevisionError(
            f"resolution of {resolution.rebuttal_id} references missing revision {resolution.at_revision}"
        )
    if not repo.is_registered(resolution.decided_by):
        raise UnknownAuthorError(f"stakeholder {resolution.decided_by!r} is not registered")
    log.resolutions.append(resolution)
    log.save(repo.path)


# -- reviews ------------------------------------------------------------------


def open_review(
    repo: Repository,
    log: ReviewLog,
    name: str,
    phase: Stage,
    participants: tuple[str, ...] | list[str],
) -> Review:
    repo.require_nonempty()
    participants = tuple(participants)
    if not participants:
        raise ReviewStateError("a review needs at least one participant")
    for participant in participants:
        if not repo.is_registered(participant):
            raise UnknownAuthorError(f"participant {participant!r} is not registered")
    if any(r.name == name for r in log.reviews):
        raise ReviewStateError(f"a review named {name!r} already exists")
    review = Review(name=name, phase=phase, participants=participants, opened_at=repo.head)
    log.reviews.append(review)
    log.save(repo.path)
    return review


def close_review(repo: Repository, log: ReviewLog, name: str, at: int) -> Review:
    """Close the round; refuses while any phase rebuttal is still Open."""
    review = log.find(name)
    if review.status is ReviewStatus.Closed:
        raise ReviewStateError(f"review {name!r} is already closed")
    if at != repo.head:
        raise StaleBaseError(at, repo.head)
    doc = repo.checkout(at)
    offending = phase_open_rebuttals(doc, review.phase)
    if offending:
        raise OpenConflictsError(offending)
    review.status = ReviewStatus.Closed
    review.closed_at = at
    log.save(repo.path)
    return review


# -- status and accountability -------------------------------------------------


def claim_status(repo: Repository, log: ReviewLog, goal_id: str, at: int) -> ClaimStatus:
    """Where one goal stands at a revision, given the review history."""
    doc = repo.checkout(at)
    element = doc.element(goal_id)
    if element.kind is not ElementKind.Goal:
        raise BadTargetError(f"{goal_id} is a {element.kind.value}, not a goal")
    if goal_id in undeveloped_goals(doc):
        return ClaimStatus.Undeveloped
    if open_rebuttals(doc, goal_id):
        return ClaimStatus.Rebutted
    covering = log.closed_review_covering(effective_stage(doc, goal_id), at)
    if covering is None:
        return ClaimStatus.Claimed
    residual = any(
        doc.elements[eid].is_rebuttal
        and doc.elements[eid].rebuttal_status is RebuttalStatus.ResidualRisk
        for eid in doc.preorder(goal_id)
    )
    return ClaimStatus.AgreedResidual if residual else ClaimStatus.Approved


def responsibility(repo: Repository, log: ReviewLog, goal_id: str, at: int) -> set[StakeholderId]:
    """Who answers for a goal: the author, plus the agreeing reviewers.

    For residual agreements the objecting rebuttal authors are part of the
    accountability set: their recorded objection is part of the deal.
    """
    doc = repo.checkout(at)
    status = claim_status(repo, log, goal_id, at)
    names: set[str] = {doc.element(goal_id).author}
    if status in (ClaimStatus.Approved, ClaimStatus.AgreedResidual):
        covering = log.closed_review_covering(effective_stage(doc, goal_id), at)
        if covering is not None:
            names.update(covering.participants)
    if status is ClaimStatus.AgreedResidual:
        names.update(
            doc.elements[eid].author
            for eid in doc.preorder(goal_id)
            if doc.elements[eid].is_rebuttal
            and doc.elements[eid].rebuttal_status is RebuttalStatus.ResidualRisk
        )
    return {repo.stakeholder(name) for name in names}


# -- repo-level conveniences (used by the service and the CLI) -----------------


def submit_rebuttal(
    repo: Repository,
    target_id: str,
    author: str,
    text: str,
    message: str | None = None,
) -> tuple[str, int]:
    """Raise a rebuttal on the head document and commit it in one step."""
    if not repo.is_registered(author):
        raise UnknownAuthorError(f"stakeholder {author!r} is not registered")
    repo.require_nonempty()
    base = repo.head
    doc, rebuttal_id = raise_rebuttal(repo.checkout(base), target_id, author, text)
    revision = repo.commit(
        doc, author, message or f"raise rebuttal {rebuttal_id} on {target_id}", base
    )
    return rebuttal_id, revision.number


def apply_resolution(
    repo: Repository,
    log: ReviewLog,
    rebuttal_id: str,
    decision: RebuttalStatus,
    decided_by: str,
    note: str = "",
    message: str | None = None,
) -> tuple[Resolution, int]:
    """Resolve a rebuttal on the head document, commit, and record it."""
    repo.require_nonempty()
    base = repo.head
    doc, resolution = resolve_rebuttal(
        repo, repo.checkout(base), rebuttal_id, decision, decided_by, note
    )
    revision = repo.commit(
        doc,
        decided_by,
        message or f"resolve {rebuttal_id} as {decision.value}",
        base,
    )
    record_resolution(repo, log, resolution)
    return resolution, revision.number
