import numpy as np
import pytest

from gridiron.annotation import (
    AnnotationError,
    Dictionary,
    EntitySpan,
    EntityType,
    annotate,
    cohen_kappa,
    evaluate,
    kappa_from_confusion,
    load_dictionaries,
    save_dictionaries,
)
from tests.test_corpus import make_doc


def dict_of(etype, *terms):
    return Dictionary(etype, frozenset(terms))


class TestAnnotate:
    def test_single_match(self):
        doc = make_doc("d1", body="Tom Brady threw")
        spans = annotate(doc, [dict_of(EntityType.player, "tom brady")])
        assert len(spans) == 1
        s = spans[0]
        assert (s.start, s.end, s.entity_type, s.surface) == (0, 9, EntityType.player, "Tom Brady")

    def test_longest_match_wins(self):
        doc = make_doc("d1", body="New England Patriots")
        spans = annotate(doc, [dict_of(EntityType.team, "patriots", "new england patriots")])
        assert len(spans) == 1
        assert spans[0].surface == "New England Patriots"

    def test_longest_match_brute_force_oracle(self):
        # enumerate every candidate match, then keep the greedy maximal
        # non-overlapping set, scanning left to right
        body = "the New England Patriots beat New England rivals"
        doc = make_doc("d1", body=body)
        terms = {"new england": EntityType.location, "new england patriots": EntityType.team}
        candidates = []
        lower = body.lower()
        for phrase, etype in terms.items():
            start = 0
            while True:
                idx = lower.find(phrase, start)
                if idx < 0:
                    break
                candidates.append((idx, idx + len(phrase), etype))
                start = idx + 1
        expected = []
        taken_until = -1
        for start, end, etype in sorted(candidates, key=lambda c: (c[0], -(c[1] - c[0]))):
            if start > taken_until:
                expected.append((start, end, etype))
                taken_until = end - 1
        dictionaries = [
            dict_of(EntityType.location, "new england"),
            dict_of(EntityType.team, "new england patriots"),
        ]
        spans = annotate(doc, dictionaries)
        assert [(s.start, s.end, s.entity_type) for s in spans] == expected

    def test_empty_dictionaries(self):
        assert annotate(make_doc("d1", body="anything"), []) == []

    def test_tie_broken_by_declaration_order(self):
        doc = make_doc("d1", body="hamstring trouble")
        dictionaries = [
            dict_of(EntityType.injury, "hamstring"),
            dict_of(EntityType.body_part, "hamstring"),
        ]
        spans = annotate(doc, dictionaries)
        # body_part is declared before injury in the ontology
        assert spans[0].entity_type == EntityType.body_part

    def test_case_insensitive(self):
        doc = make_doc("d1", body="TOM BRADY and tom brady")
        spans = annotate(doc, [dict_of(EntityType.player, "Tom Brady")])
        assert len(spans) == 2

    def test_non_overlapping_and_sorted(self):
        doc = make_doc("d1", body="brady patriots brady nfl patriots brady")
        dictionaries = [
            dict_of(EntityType.player, "brady"),
            dict_of(EntityType.team, "patriots"),
        ]
        spans = annotate(doc, dictionaries)
        for a, b in zip(spans, spans[1:]):
            assert a.end <= b.start
        assert spans == sorted(spans)

    def test_deterministic(self):
        doc = make_doc("d1", body="brady patriots nfl " * 20)
        dictionaries = [
            dict_of(EntityType.player, "brady"),
            dict_of(EntityType.team, "patriots", "nfl patriots"),
        ]
        assert annotate(doc, dictionaries) == annotate(doc, dictionaries)

    def test_token_boundary_respected(self):
        doc = make_doc("d1", body="bradys throw")
        assert annotate(doc, [dict_of(EntityType.player, "brady")]) == []

    def test_dictionary_file_roundtrip(self, tmp_path):
        dictionaries = [
            dict_of(EntityType.player, "tom brady", "todd gurley"),
            dict_of(EntityType.team, "patriots"),
        ]
        path = tmp_path / "dicts.tsv"
        save_dictionaries(dictionaries, path)
        loaded = load_dictionaries(path)
        assert {d.entity_type: d.terms for d in loaded} == {d.entity_type: d.terms for d in dictionaries}


class TestKappa:
    def test_contingency_fixture_exact(self):
        # p_o = 0.7, p_e = 0.5 -> kappa = 0.4
        assert kappa_from_confusion(np.array([[20, 5], [10, 15]])) == pytest.approx(0.4, abs=1e-15)

    def test_identical_annotations(self):
        doc = make_doc("d1", body="tom brady threw to gronk")
        spans = annotate(doc, [dict_of(EntityType.player, "tom brady", "gronk")])
        result = cohen_kappa(spans, list(spans), [doc])
        assert result.overall == 1.0

    def test_random_annotations_near_zero(self):
        rng = np.random.default_rng(42)
        n = 10_000
        body = " ".join(f"tok{i}" for i in range(n))
        doc = make_doc("d1", body=body)
        offsets = []
        pos = 0
        for i in range(n):
            word = f"tok{i}"
            offsets.append((pos, pos + len(word)))
            pos += len(word) + 1

        def random_spans():
            spans = []
            for start, end in offsets:
                if rng.random() < 0.3:
                    etype = EntityType.player if rng.random() < 0.5 else EntityType.team
                    spans.append(EntitySpan("d1", start, end, etype, body[start:end]))
            return spans

        result = cohen_kappa(random_spans(), random_spans(), [doc])
        assert abs(result.overall) <= 0.05

    def test_kappa_bounds(self):
        body = "a b c d"
        doc = make_doc("d1", body=body)
        a = [EntitySpan("d1", 0, 1, EntityType.player, "a")]
        b = [EntitySpan("d1", 2, 3, EntityType.team, "c")]
        result = cohen_kappa(a, b, [doc])
        assert -1.0 <= result.overall <= 1.0

    def test_constant_identical_annotators(self):
        # all mass in one diagonal cell: chance agreement is 1, but so is
        # observed agreement, and the statistic is defined as 1.0
        assert kappa_from_confusion(np.array([[10, 0], [0, 0]])) == 1.0

    def test_empty_table_rejected(self):
        with pytest.raises(AnnotationError):
            kappa_from_confusion(np.zeros((2, 2)))

    def test_per_type_binary_reduction(self):
        doc = make_doc("d1", body="x y")
        a = [EntitySpan("d1", 0, 1, EntityType.player, "x")]
        result = cohen_kappa(a, list(a), [doc])
        assert result.per_type["player"] == 1.0


class TestEvaluate:
    def _spans(self, triples):
        return [EntitySpan("d1", s, e, t, "") for s, e, t in triples]

    def test_identity(self):
        pred = self._spans([(0, 3, EntityType.player), (5, 9, EntityType.team)])
        result = evaluate(pred, list(pred), "exact")
        assert (result.overall.precision, result.overall.recall, result.overall.f1) == (1.0, 1.0, 1.0)

    def test_shifted_by_one(self):
        gold = self._spans([(10, 14, EntityType.player), (20, 26, EntityType.team)])
        pred = [EntitySpan("d1", g.start + 1, g.end + 1, g.entity_type, "") for g in gold]
        assert evaluate(pred, gold, "exact").overall.f1 == 0.0
        assert evaluate(pred, gold, "overlap").overall.f1 == 1.0

    def test_no_predictions(self):
        gold = self._spans([(0, 3, EntityType.player)])
        result = evaluate([], gold, "exact")
        assert (result.overall.precision, result.overall.recall, result.overall.f1) == (0.0, 0.0, 0.0)

    def test_swap_swaps_precision_recall(self):
        gold = self._spans([(0, 3, EntityType.player), (5, 9, EntityType.team), (11, 14, EntityType.team)])
        pred = self._spans([(0, 3, EntityType.player), (20, 24, EntityType.injury)])
        fwd = evaluate(pred, gold, "exact")
        rev = evaluate(gold, pred, "exact")
        assert fwd.overall.precision == rev.overall.recall
        assert fwd.overall.recall == rev.overall.precision

    def test_overlap_gold_matched_once(self):
        gold = self._spans([(0, 10, EntityType.player)])
        pred = self._spans([(0, 4, EntityType.player), (5, 10, EntityType.player)])
        result = evaluate(pred, gold, "overlap")
        assert result.overall.true_positives == 1
        assert result.overall.precision == 0.5

    def test_type_must_match_in_overlap(self):
        gold = self._spans([(0, 10, EntityType.player)])
        pred = self._spans([(0, 10, EntityType.team)])
        assert evaluate(pred, gold, "overlap").overall.f1 == 0.0
