import pytest

from caselift.core import Element, ElementKind, Role, Stage, StakeholderId
from caselift.errors import EmptyRepositoryError
from caselift.metrics import (
    CSV_HEADER,
    export_csv,
    growth_series,
    parse_csv,
    review_activity,
)
from caselift.store import Repository
from caselift.workflow import Review, ReviewStatus


@pytest.fixture()
def minimal_repo(tmp_path):
    repo = Repository.init(tmp_path / "m", "m", [StakeholderId("owner", Role.Owner)])
    from caselift.core import Document

    g1 = Element(id="G1", kind=ElementKind.Goal, text="Top claim.", author="owner")
    repo.commit(Document("G1", {"G1": g1}, {}), "owner", "first", 0)
    return repo


class TestGrowthSeries:
    def test_minimal_repo_single_point(self, minimal_repo):
        series = growth_series(minimal_repo)
        assert len(series) == 1
        point = series[0]
        assert (point.revision, point.goals, point.total) == (1, 1, 1)
        assert (point.strategies, point.evidences, point.contexts, point.rebuttals) == (0, 0, 0, 0)

    def test_empty_repository_rejected(self, tmp_path):
        repo = Repository.init(tmp_path / "e", "e", [StakeholderId("owner", Role.Owner)])
        with pytest.raises(EmptyRepositoryError):
            growth_series(repo)

    def test_fixture_endpoints(self, aspen_repo):
        series = growth_series(aspen_repo)
        assert series[0].total == 4
        assert series[-1].total == 134

    def test_totals_match_preorder_walk(self, aspen_repo):
        for point in growth_series(aspen_repo):
            assert point.total == len(aspen_repo.checkout(point.revision).preorder())

    def test_totals_consistent_with_diff_algebra(self, aspen_repo):
        series = growth_series(aspen_repo)
        for earlier, later in zip(series, series[1:]):
            change_set = aspen_repo.diff(earlier.revision, later.revision)
            assert later.total - earlier.total == len(change_set.added) - len(change_set.removed)

    def test_rebuttals_counted_apart_from_contexts(self, aspen_repo):
        by_revision = {p.revision: p for p in growth_series(aspen_repo)}
        assert by_revision[22].rebuttals == 9
        assert by_revision[40].rebuttals == 10
        doc = aspen_repo.checkout(40)
        plain = [
            e for e in doc.preorder()
            if doc.elements[e].kind is ElementKind.Context and not doc.elements[e].is_rebuttal
        ]
        assert by_revision[40].contexts == len(plain)


class TestReviewActivity:
    def test_fixture_counts(self, aspen_repo, aspen_log):
        assert review_activity(aspen_repo, aspen_log.reviews) == {
            Stage.Development: 10,
            Stage.Operation: 2,
        }

    def test_review_opened_and_closed_at_same_head_counts_zero(self, minimal_repo):
        review = Review(
            name="instant", phase=Stage.Planning, participants=("owner",),
            opened_at=1, closed_at=1, status=ReviewStatus.Closed,
        )
        assert review_activity(minimal_repo, [review]) == {Stage.Planning: 0}

    def test_no_reviews_gives_empty_map(self, minimal_repo):
        assert review_activity(minimal_repo, []) == {}

    def test_counts_equal_interval_scan(self, aspen_repo, aspen_log):
        for review in aspen_log.reviews:
            expected = len([
                r for r in aspen_repo.revisions
                if review.opened_at < r.number <= review.closed_at
            ])
            assert review_activity(aspen_repo, [review])[review.phase] == expected


class TestCsv:
    def test_empty_series_is_header_only(self):
        assert export_csv([]) == CSV_HEADER + "\n"

    def test_minimal_row(self, minimal_repo):
        assert export_csv(growth_series(minimal_repo)) == CSV_HEADER + "\n1,1,0,0,0,0,1\n"

    def test_fixture_round_trips(self, aspen_repo):
        series = growth_series(aspen_repo)
        assert parse_csv(export_csv(series)) == series

    def test_bad_header_rejected(self):
        with pytest.raises(ValueError):
            parse_csv("nope\n1,1,0,0,0,0,1\n")

    def test_inconsistent_total_rejected(self):
        with pytest.raises(ValueError):
            parse_csv(CSV_HEADER + "\n1,1,0,0,0,0,5\n")
