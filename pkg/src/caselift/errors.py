"""Shared exception hierarchy.

Every error carries a stable ``code`` token so the CLI and the HTTP service
can report machine-readable causes without string matching on messages.
"""

from __future__ import annotations


class CaseliftError(Exception):
    """Base class for all domain errors."""

    code = "error"

    def __init__(self, message: str):
        super().__init__(message)
        self.message = message


class UnknownIdError(CaseliftError):
    code = "unknown-id"


class UnknownRevisionError(CaseliftError):
    code = "unknown-revision"


class UnknownAuthorError(CaseliftError):
    code = "unknown-author"


class UnknownReviewError(CaseliftError):
    code = "unknown-review"


class InvalidDocumentError(CaseliftError):
    """A document failed structural validation; carries the violations."""

    code = "invalid-document"

    def __init__(self, violations):
        self.violations = list(violations)
        detail = "; ".join(v.message for v in self.violations)
        super().__init__(f"invalid document: {detail}")


class StaleBaseError(CaseliftError):
    """Optimistic-concurrency failure: the given base is no longer the head."""

    code = "stale-base"

    def __init__(self, base: int, head: int):
        self.base = base
        self.head = head
        super().__init__(f"base revision {base} is stale, head is {head}")


class EmptyRepositoryError(CaseliftError):
    code = "empty-repository"


class RepositoryCorruptError(CaseliftError):
    code = "repository-corrupt"


class BadTargetError(CaseliftError):
    code = "bad-target"


class AlreadyResolvedError(CaseliftError):
    code = "already-resolved"


class FixedWithoutChangeError(CaseliftError):
    code = "fixed-without-change"


class OpenConflictsError(CaseliftError):
    """A review cannot close while rebuttals in its phase are still open."""

    code = "open-conflicts"

    def __init__(self, rebuttal_ids):
        self.rebuttal_ids = list(rebuttal_ids)
        ids = ", ".join(self.rebuttal_ids)
        super().__init__(f"unresolved rebuttals block closing: {ids}")


class ReviewStateError(CaseliftError):
    code = "review-state"


class UnknownPatternError(CaseliftError):
    code = "unknown-pattern"


class MissingParameterError(CaseliftError):
    code = "missing-parameter"


class IdCollisionError(CaseliftError):
    code = "id-collision"


class UnknownHighlightError(CaseliftError):
    code = "unknown-highlight-id"
