"""Growth and review-activity measurements over a repository.

Rebuttals are counted apart from plain contexts so the review pressure is
visible next to the argument's growth.
"""

from __future__ import annotations

from dataclasses import dataclass

from caselift.core import ElementKind, Stage
from caselift.store import Repository
from caselift.workflow import Review, ReviewStatus

CSV_HEADER = "revision,goals,strategies,evidences,contexts,rebuttals,total"


@dataclass(frozen=True)
class GrowthPoint:
    revision: int
    goals: int
    strategies: int
    evidences: int
    contexts: int
    rebuttals: int

    @property
    def total(self) -> int:
        return self.goals + self.strategies + self.evidences + self.contexts + self.rebuttals


def count_elements(doc) -> dict[str, int]:
    counts = {"goals": 0, "strategies": 0, "evidences": 0, "contexts": 0, "rebuttals": 0}
    keys = {
        ElementKind.Goal: "goals",
        ElementKind.Strategy: "strategies",
        ElementKind.Evidence: "evidences",
        ElementKind.Context: "contexts",
    }
    for eid in doc.preorder():
        element = doc.elements[eid]
        if element.is_rebuttal:
            counts["rebuttals"] += 1
        else:
            counts[keys[element.kind]] += 1
    return counts


def growth_series(repo: Repository) -> list[GrowthPoint]:
    """One point per revision, in revision order."""
    repo.require_nonempty()
    series = []
    for revision in repo.revisions:
        counts = count_elements(repo.checkout(revision.number))
        series.append(GrowthPoint(revision=revision.number, **counts))
    return series


def review_activity(repo: Repository, reviews: list[Review]) -> dict[Stage, int]:
    """Revisions committed while each review ran, summed per phase.

    A review covers the revisions after its opening head up to and
    including its closing revision; a still-open review counts up to the
    current head.
    """
    activity: dict[Stage, int] = {}
    for review in reviews:
        end = review.closed_at if review.status is ReviewStatus.Closed else repo.head
        count = sum(1 for r in repo.revisions if review.opened_at < r.number <= (end or 0))
        activity[review.phase] = activity.get(review.phase, 0) + count
    return activity


def export_csv(series: list[GrowthPoint]) -> str:
    lines = [CSV_HEADER]
    for point in series:
        lines.append(
            f"{point.revision},{point.goals},{point.strategies},"
            f"{point.evidences},{point.contexts},{point.rebuttals},{point.total}"
        )
    return "\n".join(lines) + "\n"


def parse_csv(text: str) -> list[GrowthPoint]:
    """Inverse of export_csv; totals are recomputed and must agree."""
    lines = [line for line in text.split("\n") if line]
    if not lines or lines[0] != CSV_HEADER:
        raise ValueError(f"expected header {CSV_HEADER!r}")
    series = []
    for line in lines[1:]:
        revision, goals, strategies, evidences, contexts, rebuttals, total = map(int, line.split(","))
        point = GrowthPoint(revision, goals, strategies, evidences, contexts, rebuttals)
        if point.total != total:
            raise ValueError(f"row for revision {revision} sums to {point.total}, not {total}")
        series.append(point)
    return series
