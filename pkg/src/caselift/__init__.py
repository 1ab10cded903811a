"""Assurance-case management: GSN documents under continuous multi-stakeholder revision."""

from caselift.core import (
    Document,
    Element,
    ElementKind,
    RebuttalStatus,
    Role,
    Stage,
    StakeholderId,
    Violation,
    ViolationCode,
    effective_stage,
    open_rebuttals,
    undeveloped_goals,
    validate,
)
from caselift.store import ChangeSet, Repository, Revision
from caselift.text import ParseError, parse, serialize
from caselift.workflow import ClaimStatus, Resolution, Review, ReviewLog

__all__ = [
    "ChangeSet",
    "ClaimStatus",
    "Document",
    "Element",
    "ElementKind",
    "ParseError",
    "RebuttalStatus",
    "Repository",
    "Resolution",
    "Review",
    "ReviewLog",
    "Revision",
    "Role",
    "Stage",
    "StakeholderId",
    "Violation",
    "ViolationCode",
    "effective_stage",
    "open_rebuttals",
    "parse",
    "serialize",
    "undeveloped_goals",
    "validate",
]

__version__ = "0.1.0"
