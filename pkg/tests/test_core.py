import random

import pytest
from hypothesis import given, settings, strategies as st

from caselift.core import (
    Document,
    Element,
    ElementKind,
    RebuttalStatus,
    Stage,
    ViolationCode,
    effective_stage,
    open_rebuttals,
    undeveloped_goals,
    validate,
)
from caselift.errors import InvalidDocumentError, UnknownIdError
from caselift.fixtures import fig8_fragment

from docgen import random_document

documents = st.integers(0, 2**31 - 1).map(lambda seed: random_document(random.Random(seed)))


def goal(eid="G1", **kw):
    return Element(id=eid, kind=ElementKind.Goal, text="claim", author="owner", **kw)


def single(element):
    return Document(element.id, {element.id: element}, {})


class TestValidate:
    def test_strategy_root_is_bad_root(self):
        root = Element(id="S1", kind=ElementKind.Strategy, text="t", author="owner")
        codes = [v.code for v in validate(single(root))]
        assert ViolationCode.BadRoot in codes

    def test_fig8_fragment_is_valid(self):
        assert validate(fig8_fragment()) == []

    def test_goal_under_evidence_is_bad_child_kind(self):
        doc = single(goal())
        doc = doc.with_child("G1", Element(id="E1", kind=ElementKind.Evidence, text="e", author="owner"))
        doc = doc.with_child("E1", Element(id="G2", kind=ElementKind.Goal, text="g", author="owner"))
        codes = [v.code for v in validate(doc)]
        assert codes == [ViolationCode.BadChildKind]

    def test_plain_context_under_evidence_rejected(self):
        doc = single(goal())
        doc = doc.with_child("G1", Element(id="E1", kind=ElementKind.Evidence, text="e", author="owner"))
        doc = doc.with_child("E1", Element(id="C1", kind=ElementKind.Context, text="c", author="owner"))
        codes = [v.code for v in validate(doc)]
        assert ViolationCode.BadChildKind in codes

    def test_rebuttal_under_strategy_is_bad_placement(self):
        doc = single(goal())
        doc = doc.with_child("G1", Element(id="S1", kind=ElementKind.Strategy, text="s", author="owner"))
        doc = doc.with_child(
            "S1",
            Element(id="C1", kind=ElementKind.Context, text="r", author="owner", is_rebuttal=True),
        )
        codes = [v.code for v in validate(doc)]
        assert ViolationCode.BadRebuttalPlacement in codes

    def test_missing_author_and_bad_prefix(self):
        doc = single(goal())
        doc = doc.with_child("G1", Element(id="X1", kind=ElementKind.Context, text="c", author=""))
        codes = {v.code for v in validate(doc)}
        assert codes == {ViolationCode.MissingAuthor, ViolationCode.BadIdPrefix}

    def test_status_without_flag_rejected(self):
        bad = goal().replace(id="G1")
        bad.rebuttal_status = RebuttalStatus.Open
        codes = [v.code for v in validate(single(bad))]
        assert ViolationCode.BadRebuttalPlacement in codes

    def test_unreachable_element_is_not_a_tree(self):
        doc = single(goal())
        elements = dict(doc.elements)
        orphan = Element(id="C9", kind=ElementKind.Context, text="c", author="owner")
        elements["C9"] = orphan
        codes = [v.code for v in validate(Document("G1", elements, {}))]
        assert ViolationCode.NotATree in codes

    def test_two_parents_is_not_a_tree(self):
        doc = single(goal())
        doc = doc.with_child("G1", Element(id="S1", kind=ElementKind.Strategy, text="s", author="owner"))
        doc = doc.with_child("S1", goal("G2"))
        children = dict(doc.children)
        children["G1"] = children["G1"] + ("G2",)
        codes = [v.code for v in validate(Document("G1", dict(doc.elements), children))]
        assert ViolationCode.NotATree in codes

    def test_validate_is_pure_and_idempotent(self):
        doc = single(goal())
        doc = doc.with_child("G1", Element(id="E1", kind=ElementKind.Evidence, text="e", author="owner"))
        doc = doc.with_child("E1", goal("G2"))
        assert validate(doc) == validate(doc)

    @settings(max_examples=60, deadline=None)
    @given(documents)
    def test_generated_documents_are_valid(self, doc):
        assert validate(doc) == []

    @settings(max_examples=60, deadline=None)
    @given(documents)
    def test_preorder_visits_every_element_once(self, doc):
        walk = doc.preorder()
        assert len(walk) == len(doc)
        assert set(walk) == set(doc.elements)


class TestUndevelopedGoals:
    def test_single_goal_document(self):
        assert undeveloped_goals(single(goal())) == {"G1"}

    def test_goal_with_only_contexts_is_undeveloped(self):
        doc = fig8_fragment()
        # G25 has evidence E25.3, so it is developed.
        assert undeveloped_goals(doc) == set()

    def test_strategy_child_counts_as_developed(self):
        doc = single(goal())
        doc = doc.with_child("G1", Element(id="S1", kind=ElementKind.Strategy, text="s", author="owner"))
        doc = doc.with_child("S1", goal("G2"))
        assert undeveloped_goals(doc) == {"G2"}

    def test_rejects_invalid_document(self):
        root = Element(id="S1", kind=ElementKind.Strategy, text="t", author="owner")
        with pytest.raises(InvalidDocumentError):
            undeveloped_goals(single(root))

    @settings(max_examples=80, deadline=None)
    @given(documents)
    def test_matches_exhaustive_child_scan(self, doc):
        expected = set()
        for eid, element in doc.elements.items():
            if element.kind is not ElementKind.Goal:
                continue
            child_kinds = {doc.elements[c].kind for c in doc.child_ids(eid)}
            if not child_kinds & {ElementKind.Strategy, ElementKind.Evidence}:
                expected.add(eid)
        assert undeveloped_goals(doc) == expected

    @settings(max_examples=40, deadline=None)
    @given(documents, st.randoms(use_true_random=False))
    def test_adding_support_removes_exactly_that_goal(self, doc, rng):
        goals = sorted(undeveloped_goals(doc))
        if not goals:
            return
        target = rng.choice(goals)
        support = Element(id="E999999", kind=ElementKind.Evidence, text="new", author="owner")
        grown = doc.with_child(target, support)
        assert undeveloped_goals(grown) == set(goals) - {target}


class TestEffectiveStage:
    def test_inherits_from_root(self):
        doc = single(goal(stage=Stage.Planning))
        doc = doc.with_child("G1", Element(id="C1", kind=ElementKind.Context, text="c", author="owner"))
        assert effective_stage(doc, "C1") is Stage.Planning

    def test_own_tag_wins(self):
        doc = single(goal(stage=Stage.Planning))
        doc = doc.with_child("G1", Element(id="S1", kind=ElementKind.Strategy, text="s", author="owner"))
        doc = doc.with_child("S1", goal("G2", stage=Stage.Operation))
        assert effective_stage(doc, "G2") is Stage.Operation

    def test_absent_when_no_tags(self):
        doc = single(goal())
        assert effective_stage(doc, "G1") is None

    def test_unknown_id(self):
        with pytest.raises(UnknownIdError):
            effective_stage(single(goal()), "G404")


class TestOpenRebuttals:
    def test_no_rebuttals(self):
        assert open_rebuttals(single(goal())) == []

    def test_fixture_fragment_has_one(self):
        assert open_rebuttals(fig8_fragment()) == ["C25.2"]

    def test_development_fixture_before_agreement(self, aspen_repo):
        doc = aspen_repo.checkout(21)
        assert len(open_rebuttals(doc)) == 9

    def test_resolving_one_of_nine_leaves_eight(self, aspen_repo):
        doc = aspen_repo.checkout(21)
        first = open_rebuttals(doc)[0]
        updated = doc.with_element(
            doc.element(first).replace(rebuttal_status=RebuttalStatus.Fixed)
        )
        survey = [
            eid
            for eid in updated.preorder()
            if updated.elements[eid].is_rebuttal
            and updated.elements[eid].rebuttal_status is RebuttalStatus.Open
        ]
        assert open_rebuttals(updated) == survey
        assert len(survey) == 8

    def test_scope_restricts_to_subtree(self, aspen_repo):
        doc = aspen_repo.checkout(21)
        assert open_rebuttals(doc, "G22") == ["C22.2"]

    @settings(max_examples=40, deadline=None)
    @given(documents, st.randoms(use_true_random=False))
    def test_monotone_under_transitions_away_from_open(self, doc, rng):
        before = open_rebuttals(doc)
        if not before:
            return
        victim = rng.choice(before)
        terminal = rng.choice([RebuttalStatus.Fixed, RebuttalStatus.Withdrawn, RebuttalStatus.ResidualRisk])
        after = open_rebuttals(
            doc.with_element(doc.element(victim).replace(rebuttal_status=terminal))
        )
        assert set(after) <= set(before)
        assert len(after) == len(before) - 1
