"""Append-only revision store with author attribution, diffs and history.

One repository directory holds the full revision sequence of one document:

    manifest.json       document id, stakeholder registry, revision metadata
    revisions/<n>.gsn   canonical payload of revision n
    reviews.json        review rounds and rebuttal resolutions

History is linear; concurrent edits are rejected through an optimistic
base check rather than merged.  Whole canonical snapshots are stored per
revision: at assurance-case scale the simplicity beats delta encoding.
"""

from __future__ import annotations

import enum
import hashlib
import json
import os
import threading
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path

from caselift.core import Document, Role, StakeholderId, require_valid
from caselift.errors import (
    EmptyRepositoryError,
    RepositoryCorruptError,
    StaleBaseError,
    UnknownAuthorError,
    UnknownRevisionError,
)
from caselift import text as gsn_text

MANIFEST_NAME = "manifest.json"
REVISIONS_DIR = "revisions"
REVIEWS_NAME = "reviews.json"

# Fields compared when deciding whether a retained element was modified,
# in the order change names are reported.
_COMPARED_FIELDS = ("kind", "text", "author", "stage", "is_rebuttal", "rebuttal_status", "metadata")


@dataclass(frozen=True)
class Revision:
    """Metadata of one committed snapshot; payload lives in revisions/<n>.gsn."""

    number: int
    author: StakeholderId
    message: str
    timestamp: datetime
    content_hash: str

    @property
    def parent(self) -> int | None:
        return self.number - 1 if self.number > 1 else None


@dataclass
class ChangeSet:
    added: list[str]
    removed: list[str]
    modified: list[tuple[str, tuple[str, ...]]]

    def is_empty(self) -> bool:
        return not (self.added or self.removed or self.modified)

    def modified_ids(self) -> list[str]:
        return [eid for eid, _ in self.modified]


class ChangeKind(enum.Enum):
    Added = "added"
    Modified = "modified"
    Removed = "removed"


@dataclass(frozen=True)
class HistoryEvent:
    revision: int
    author: StakeholderId
    kind: ChangeKind


def content_hash(payload: str) -> str:
    # Timestamps are deliberately not part of the hash: replaying a fixture
    # must reproduce identical hashes.
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()


def write_json_atomic(path: Path, data) -> None:
    tmp = path.with_suffix(path.suffix + ".tmp")
    tmp.write_text(json.dumps(data, indent=2, ensure_ascii=False) + "\n", encoding="utf-8")
    os.replace(tmp, path)


def diff_documents(old: Document, new: Document) -> ChangeSet:
    """Id-map comparison of two documents, reorders reported on the parent."""
    old_ids = set(old.elements)
    new_ids = set(new.elements)
    retained = old_ids & new_ids

    added = [eid for eid in new.preorder() if eid not in old_ids]
    removed = [eid for eid in old.preorder() if eid not in new_ids]

    modified: list[tuple[str, tuple[str, ...]]] = []
    for eid in new.preorder():
        if eid not in retained:
            continue
        before = old.elements[eid]
        after = new.elements[eid]
        changed = [
            name for name in _COMPARED_FIELDS if getattr(before, name) != getattr(after, name)
        ]
        # Reordering of surviving children is a change of the parent; pure
        # insertions and removals are already reported on the children.
        kept_before = tuple(c for c in old.child_ids(eid) if c in retained)
        kept_after = tuple(c for c in new.child_ids(eid) if c in retained)
        if kept_before != kept_after:
            changed.append("children")
        if changed:
            modified.append((eid, tuple(changed)))
    return ChangeSet(added=added, removed=removed, modified=modified)


class Repository:
    """Directory-backed store; single writer, unlimited concurrent readers."""

    def __init__(self, path: Path, document_id: str, stakeholders: list[StakeholderId], revisions: list[Revision]):
        self.path = Path(path)
        self.document_id = document_id
        self._stakeholders: dict[str, StakeholderId] = {s.name: s for s in stakeholders}
        self._revisions = revisions
        self._doc_cache: dict[int, Document] = {}
        self._lock = threading.RLock()

    # -- lifecycle ----------------------------------------------------------

    @classmethod
    def init(cls, path: str | Path, document_id: str, stakeholders: list[StakeholderId]) -> "Repository":
        path = Path(path)
        if (path / MANIFEST_NAME).exists():
            raise RepositoryCorruptError(f"{path} already holds a repository")
        if not stakeholders:
            raise UnknownAuthorError("a repository needs at least one registered stakeholder")
        names = [s.name for s in stakeholders]
        if len(set(names)) != len(names):
            raise UnknownAuthorError(f"stakeholder names must be unique, got {names}")
        path.mkdir(parents=True, exist_ok=True)
        (path / REVISIONS_DIR).mkdir(exist_ok=True)
        repo = cls(path, document_id, stakeholders, [])
        repo._write_manifest()
        if not (path / REVIEWS_NAME).exists():
            write_json_atomic(path / REVIEWS_NAME, {"reviews": [], "resolutions": []})
        return repo

    @classmethod
    def open(cls, path: str | Path) -> "Repository":
        path = Path(path)
        manifest_path = path / MANIFEST_NAME
        if not manifest_path.exists():
            raise RepositoryCorruptError(f"no repository at {path} ({MANIFEST_NAME} missing)")
        manifest = json.loads(manifest_path.read_text(encoding="utf-8"))
        stakeholders = [
            StakeholderId(entry["name"], Role(entry["role"]))
            for entry in manifest["stakeholders"]
        ]
        registry = {s.name: s for s in stakeholders}
        revisions = []
        for entry in manifest["revisions"]:
            author = registry.get(entry["author"])
            if author is None:
                raise RepositoryCorruptError(
                    f"revision {entry['number']} names unregistered author {entry['author']!r}"
                )
            revisions.append(
                Revision(
                    number=entry["number"],
                    author=author,
                    message=entry["message"],
                    timestamp=datetime.fromisoformat(entry["timestamp"]),
                    content_hash=entry["content_hash"],
                )
            )
        expected = list(range(1, len(revisions) + 1))
        if [r.number for r in revisions] != expected:
            raise RepositoryCorruptError("revision numbers must be dense and increasing")
        return cls(path, manifest["document_id"], stakeholders, revisions)

    def _write_manifest(self) -> None:
        data = {
            "document_id": self.document_id,
            "stakeholders": [
                {"name": s.name, "role": s.role.value} for s in self._stakeholders.values()
            ],
            "revisions": [
                {
                    "number": r.number,
                    "author": r.author.name,
                    "message": r.message,
                    "timestamp": r.timestamp.isoformat(),
                    "content_hash": r.content_hash,
                }
                for r in self._revisions
            ],
        }
        write_json_atomic(self.path / MANIFEST_NAME, data)

    # -- registry -----------------------------------------------------------

    @property
    def stakeholders(self) -> list[StakeholderId]:
        return list(self._stakeholders.values())

    def stakeholder(self, name: str) -> StakeholderId:
        try:
            return self._stakeholders[name]
        except KeyError:
            raise UnknownAuthorError(f"stakeholder {name!r} is not registered") from None

    def is_registered(self, name: str) -> bool:
        return name in self._stakeholders

    # -- reading ------------------------------------------------------------

    @property
    def head(self) -> int:
        """Current head revision number, 0 for an empty repository."""
        return len(self._revisions)

    @property
    def revisions(self) -> list[Revision]:
        return list(self._revisions)

    def revision(self, n: int) -> Revision:
        if not 1 <= n <= self.head:
            raise UnknownRevisionError(f"revision {n} does not exist (head is {self.head})")
        return self._revisions[n - 1]

    def _payload_path(self, n: int) -> Path:
        return self.path / REVISIONS_DIR / f"{n}.gsn"

    def payload(self, n: int) -> str:
        self.revision(n)
        return self._payload_path(n).read_text(encoding="utf-8")

    def checkout(self, n: int) -> Document:
        """Document at revision n.  Cached: revisions never change."""
        self.revision(n)
        doc = self._doc_cache.get(n)
        if doc is None:
            doc = gsn_text.parse(self.payload(n))
            self._doc_cache[n] = doc
        return doc

    # -- writing ------------------------------------------------------------

    def commit(
        self,
        doc: Document,
        author: str,
        message: str,
        base: int,
        timestamp: datetime | None = None,
    ) -> Revision:
        """Append a snapshot; the store is untouched when any check fails."""
        with self._lock:
            if base != self.head:
                raise StaleBaseError(base, self.head)
            committer = self.stakeholder(author)
            require_valid(doc)
            for eid in doc.preorder():
                element_author = doc.elements[eid].author
                if not self.is_registered(element_author):
                    raise UnknownAuthorError(
                        f"element {eid} is authored by unregistered stakeholder {element_author!r}"
                    )
            payload = gsn_text.serialize(doc)
            number = self.head + 1
            revision = Revision(
                number=number,
                author=committer,
                message=message,
                timestamp=timestamp or datetime.now(timezone.utc),
                content_hash=content_hash(payload),
            )
            payload_path = self._payload_path(number)
            tmp = payload_path.with_suffix(".gsn.tmp")
            tmp.write_text(payload, encoding="utf-8")
            os.replace(tmp, payload_path)
            self._revisions.append(revision)
            try:
                self._write_manifest()
            except Exception:
                self._revisions.pop()
                payload_path.unlink(missing_ok=True)
                raise
            self._doc_cache[number] = doc
            return revision

    # -- comparing ----------------------------------------------------------

    def diff(self, a: int, b: int) -> ChangeSet:
        return diff_documents(self.checkout(a), self.checkout(b))

    def element_history(self, element_id: str) -> list[HistoryEvent]:
        """Chronological appearances of the id; empty for unknown ids."""
        events: list[HistoryEvent] = []
        previous: Document | None = None
        for revision in self._revisions:
            doc = self.checkout(revision.number)
            if previous is None:
                present, was_present, changed = element_id in doc, False, False
            else:
                was_present = element_id in previous
                present = element_id in doc
                changed = False
                if was_present and present:
                    changed = any(
                        getattr(previous.elements[element_id], f) != getattr(doc.elements[element_id], f)
                        for f in _COMPARED_FIELDS
                    )
            if present and not was_present:
                events.append(HistoryEvent(revision.number, revision.author, ChangeKind.Added))
            elif was_present and not present:
                events.append(HistoryEvent(revision.number, revision.author, ChangeKind.Removed))
            elif changed:
                events.append(HistoryEvent(revision.number, revision.author, ChangeKind.Modified))
            previous = doc
        return events

    # -- integrity ----------------------------------------------------------

    def verify_integrity(self) -> list[str]:
        """Recompute hashes and re-validate payloads; problems as strings."""
        problems: list[str] = []
        if self.head == 0:
            return problems
        for revision in self._revisions:
            try:
                payload = self.payload(revision.number)
            except OSError as exc:
                problems.append(f"revision {revision.number}: payload unreadable ({exc})")
                continue
            digest = content_hash(payload)
            if digest != revision.content_hash:
                problems.append(
                    f"revision {revision.number}: hash mismatch "
                    f"(stored {revision.content_hash[:12]}…, computed {digest[:12]}…)"
                )
            try:
                gsn_text.parse(payload)
            except Exception as exc:
                problems.append(f"revision {revision.number}: payload does not parse ({exc})")
        return problems

    def require_nonempty(self) -> None:
        if self.head == 0:
            raise EmptyRepositoryError(f"repository {self.document_id!r} has no revisions")
