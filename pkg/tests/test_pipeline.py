import math
import random

import pytest
import scipy.stats
from hypothesis import given, settings
from hypothesis import strategies as st

from kgquest.pipeline import (
    FILTER_ANSWER_LEAK,
    FILTER_EMPTY,
    FILTER_MALFORMED,
    FILTER_WAYPOINT_LEAK,
    FilterConfig,
    TableAnswerFn,
    compute_stats,
    order_curriculum,
    rule_filter,
    spearman,
    verify_question,
)

WAYPOINTS = [
    "Diana Arachi",
    "University of Technology Sydney",
    "Jumbunna Institute for Indigenous Education and Research",
    "Larissa Behrendt",
    "Harvard Law School",
]
ANSWER = "Christopher Columbus Langdell"
CLEAN_QUESTION = (
    "Who served as the first dean of the law school where the director of the"
    " institute that awarded Diana Arachi her doctorate later studied?"
)


class TestRuleFilter:
    def test_clean_question_passes(self):
        verdict = rule_filter(CLEAN_QUESTION, WAYPOINTS, ANSWER)
        assert verdict.passed
        assert verdict.reasons == ()

    def test_answer_leak(self):
        q = f"Everyone knows {ANSWER} did it, but who was the first dean?"
        verdict = rule_filter(q, WAYPOINTS, ANSWER)
        assert not verdict.passed
        assert FILTER_ANSWER_LEAK in verdict.reasons

    def test_answer_leak_survives_case_changes(self):
        q = "was CHRISTOPHER COLUMBUS LANGDELL the first dean?"
        assert FILTER_ANSWER_LEAK in rule_filter(q, WAYPOINTS, ANSWER).reasons

    def test_nonseed_waypoint_leak(self):
        q = "Who directed the Jumbunna Institute for Indigenous Education and Research?"
        verdict = rule_filter(q, WAYPOINTS, ANSWER)
        assert FILTER_WAYPOINT_LEAK in verdict.reasons

    def test_seed_mention_exempt_by_default(self):
        q = "Where did Diana Arachi earn her doctorate?"
        assert rule_filter(q, WAYPOINTS, ANSWER).passed

    def test_seed_mention_flagged_when_not_exempt(self):
        q = "Where did Diana Arachi earn her doctorate?"
        verdict = rule_filter(q, WAYPOINTS, ANSWER, FilterConfig(exempt_seed=False))
        assert FILTER_WAYPOINT_LEAK in verdict.reasons

    @pytest.mark.parametrize("fragment", [
        "<think>", "</think>", "<search>", "</search>", "<information>",
        "</information>", "<answer>", "</answer>", "<question>", "</question>",
    ])
    def test_tag_fragments_rejected(self, fragment):
        q = f"Which city {fragment} hosts the archive?"
        verdict = rule_filter(q, WAYPOINTS, ANSWER)
        assert FILTER_MALFORMED in verdict.reasons

    def test_non_string_is_malformed(self):
        assert rule_filter(None, WAYPOINTS, ANSWER).reasons == (FILTER_MALFORMED,)
        assert rule_filter(42, WAYPOINTS, ANSWER).reasons == (FILTER_MALFORMED,)

    def test_blank_is_empty(self):
        assert rule_filter("   \n", WAYPOINTS, ANSWER).reasons == (FILTER_EMPTY,)
        assert rule_filter("", WAYPOINTS, ANSWER).reasons == (FILTER_EMPTY,)

    def test_multiple_reasons_accumulate(self):
        q = f"<answer>{ANSWER}</answer> and also Larissa Behrendt"
        verdict = rule_filter(q, WAYPOINTS, ANSWER)
        assert set(verdict.reasons) == {
            FILTER_MALFORMED, FILTER_ANSWER_LEAK, FILTER_WAYPOINT_LEAK,
        }

    def test_nfc_variants_still_leak(self):
        waypoints = ["Seed Node", "Zürich Hauptbahnhof"]
        q = "Is Zürich Hauptbahnhof the right stop?"
        verdict = rule_filter(q, waypoints, "X")
        assert FILTER_WAYPOINT_LEAK in verdict.reasons

    def test_empty_answer_string_cannot_leak(self):
        # degenerate answer must not reject every question
        assert rule_filter("a perfectly fine question?", ["Seed"], "").passed


class TestVerifyQuestion:
    def test_match_and_mismatch(self):
        fn = TableAnswerFn({CLEAN_QUESTION: "christopher columbus langdell  "})
        assert verify_question(CLEAN_QUESTION, ANSWER, fn)
        assert not verify_question("unknown question", ANSWER, fn)

    def test_answer_fn_none_fails(self):
        assert not verify_question("q", "a", lambda q: None)


def doc(id, length, nodes, relations, answer_type="other", divergent=()):
    return {
        "id": id,
        "path": {
            "seed_node": nodes[0],
            "start_node": nodes[0],
            "end_node": nodes[-1],
            "length": length,
            "nodes": [
                {"title": t, "text": t, "answer_type": "other", "attributes": []}
                for t in nodes
            ],
            "edges": [
                {"source": a, "target": b, "relation": r}
                for (a, b), r in zip(zip(nodes, nodes[1:]), relations)
            ],
            "path": " --> ".join(nodes),
        },
        "correct_answer": nodes[-1],
        "answer_type": answer_type,
        "distractors": [
            {
                "answer": d[-1],
                "text": d[-1],
                "answer_type": "other",
                "shared_nodes": [nodes[0]],
                "divergence_point": nodes[1],
                "divergent_nodes": list(d),
            }
            for d in divergent
        ],
    }


class TestCurriculum:
    def test_descending_node_count_ties_by_id(self):
        docs = [
            doc("b", 2, ["A", "B", "C"], ["r", "r"]),
            doc("a", 2, ["A", "B", "C"], ["r", "r"]),
            doc("big", 3, ["A", "B", "C", "D"], ["r", "r", "r"]),
        ]
        ordered = order_curriculum(docs)
        assert [d["id"] for d in ordered] == ["big", "a", "b"]

    def test_divergent_nodes_count_toward_size(self):
        small = doc("small", 3, ["A", "B", "C", "D"], ["r"] * 3)
        padded = doc(
            "padded", 2, ["A", "B", "C"], ["r"] * 2,
            divergent=[["X1", "X2"], ["Y1"]],
        )
        ordered = order_curriculum([small, padded])
        # 3 path nodes + 3 divergent beats 4 path nodes
        assert [d["id"] for d in ordered] == ["padded", "small"]

    def test_explicit_node_count_respected(self):
        d1 = dict(doc("one", 2, ["A", "B", "C"], ["r"] * 2), node_count=50)
        d2 = doc("two", 5, ["A", "B", "C", "D", "E", "F"], ["r"] * 5)
        assert [d["id"] for d in order_curriculum([d1, d2])] == ["one", "two"]

    def test_stability_for_full_ties(self):
        docs = [
            dict(doc("same", 2, ["A", "B", "C"], ["r", "r"]), marker=i)
            for i in range(4)
        ]
        ordered = order_curriculum(docs)
        assert [d["marker"] for d in ordered] == [0, 1, 2, 3]

    def test_accepts_subgraph_objects(self, einstein_graph, first_candidate, rng):
        from kgquest.extraction import ExtractionConfig, extract_subgraph
        from kgquest.kg import RelationFilter

        sub = extract_subgraph(
            einstein_graph, "Q937", first_candidate, RelationFilter(),
            ExtractionConfig(distractor_min=1, distractor_max=1), rng,
        )
        assert order_curriculum([sub]) == [sub]


class TestStats:
    def make_docs(self):
        return [
            doc("a", 3, ["A", "B", "C", "D"], ["r1", "r2", "r1"], "person"),
            doc("b", 4, ["A", "B", "C", "D", "E"], ["r1", "r3", "r3", "r4"], "person"),
            doc("c", 3, ["A", "B", "C", "D"], ["r2", "r2", "r2"], "location"),
        ]

    def test_hand_counts(self):
        s = compute_stats(self.make_docs())
        assert s.count == 3
        assert s.path_length_hist == {3: 2, 4: 1}
        assert s.mean_path_length == pytest.approx(10 / 3)
        # population std over [3, 4, 3]
        assert s.std_path_length == pytest.approx(math.sqrt(2 / 9))
        assert s.answer_type_dist == pytest.approx({"person": 2 / 3, "location": 1 / 3})
        assert s.relation_freq == {"r1": 3, "r2": 4, "r3": 2, "r4": 1}
        assert s.unique_relations_total == 4
        assert s.mean_unique_relations == pytest.approx((2 + 3 + 1) / 3)

    def test_to_dict_is_json_ready(self):
        import json

        blob = json.dumps(compute_stats(self.make_docs()).to_dict())
        assert '"path_length_hist"' in blob

    def test_empty_corpus_raises(self):
        with pytest.raises(ValueError, match="empty"):
            compute_stats([])


class TestSpearman:
    def test_perfect_monotone(self):
        assert spearman([1, 2, 3, 4], [10, 20, 30, 40]) == pytest.approx(1.0)
        assert spearman([1, 2, 3, 4], [9, 7, 5, 1]) == pytest.approx(-1.0)

    def test_against_scipy_no_ties(self):
        rng = random.Random(0)
        for _ in range(200):
            n = rng.randint(3, 40)
            x = rng.sample(range(1000), n)
            y = rng.sample(range(1000), n)
            want = scipy.stats.spearmanr(x, y).statistic
            assert spearman(x, y) == pytest.approx(want, abs=1e-12)

    def test_against_scipy_with_ties(self):
        rng = random.Random(1)
        for _ in range(200):
            n = rng.randint(3, 30)
            x = [rng.randint(0, 4) for _ in range(n)]
            y = [rng.randint(0, 4) for _ in range(n)]
            if min(x) == max(x) or min(y) == max(y):
                continue
            want = scipy.stats.spearmanr(x, y).statistic
            assert spearman(x, y) == pytest.approx(want, abs=1e-12)

    def test_constant_series_is_zero(self):
        # scipy returns nan here; a flat metrics row reads better as 0
        assert spearman([1, 1, 1], [1, 2, 3]) == 0.0
        assert spearman([1, 2, 3], [5, 5, 5]) == 0.0

    def test_binary_vs_float_series(self):
        x = [0, 0, 1, 1, 0, 1]
        y = [0.1, 0.2, 0.9, 0.8, 0.3, 0.7]
        want = scipy.stats.spearmanr(x, y).statistic
        assert spearman(x, y) == pytest.approx(want, abs=1e-12)

    def test_length_mismatch(self):
        with pytest.raises(ValueError, match="length"):
            spearman([1, 2], [1])

    def test_empty(self):
        with pytest.raises(ValueError, match="empty"):
            spearman([], [])


@given(
    st.lists(st.integers(-50, 50), min_size=2, max_size=30),
    st.lists(st.integers(-50, 50), min_size=2, max_size=30),
)
@settings(max_examples=300, deadline=None)
def test_spearman_properties(x, y):
    n = min(len(x), len(y))
    x, y = x[:n], y[:n]
    r = spearman(x, y)
    assert -1.0 <= r <= 1.0 + 1e-12
    assert spearman(y, x) == pytest.approx(r)
    # strictly increasing transforms preserve ranks exactly
    assert spearman([3 * v + 7 for v in x], y) == pytest.approx(r)
