import json
import random

import pytest

from kgquest.extraction import (
    REJECT_ANSWER_IN_WAYPOINTS,
    REJECT_NO_CANDIDATES,
    REJECT_TOO_SHORT,
    DistractorBranch,
    ExtractionConfig,
    PathRejected,
    Subgraph,
    expand_target_path,
    extract_subgraph,
    render_path_arrows,
    sample_distractors,
    serialize_subgraph,
    to_canonical_json,
    to_jsonl_line,
)
from kgquest.kg import RelationFilter, load_graph
from kgquest.selector import SelectorDecision, SelectorError, SelectorExhausted

from conftest import make_scripted_selector


def write_dump(tmp_path, records, name="dump.jsonl"):
    path = tmp_path / name
    path.write_text(
        "\n".join(json.dumps(r) for r in records) + "\n", encoding="utf-8"
    )
    return path


def ent(id, title, **kw):
    rec = {
        "kind": "entity", "id": id, "title": title,
        "description": kw.pop("description", ""),
        "answer_type": kw.pop("answer_type", "other"),
    }
    rec.update(kw)
    return rec


def edg(source, target, label="step", rid=None):
    rec = {"kind": "edge", "source": source, "target": target, "relation_label": label}
    if rid:
        rec["relation_id"] = rid
    return rec


NO_FILTER = RelationFilter()


class TestExpansion:
    def test_einstein_chain(self, einstein_graph, first_candidate):
        path = expand_target_path(
            einstein_graph, "Q937", first_candidate, NO_FILTER,
            ExtractionConfig(k_min=3, k_max=7),
        )
        assert path.k == 4
        assert path.node_ids == ("Q937", "Q11942", "Q72", "Q39", "Q70")
        assert [e.relation_label for e in path.edges] == [
            "educated at", "located in", "country", "capital",
        ]

    def test_k_max_truncates(self, toy_graph, toy_filter, first_candidate):
        path = expand_target_path(
            toy_graph, "N000", first_candidate, toy_filter,
            ExtractionConfig(k_min=1, k_max=4),
        )
        assert path.k == 4

    def test_too_short_rejected_with_k(self, einstein_graph, first_candidate):
        with pytest.raises(PathRejected) as err:
            expand_target_path(
                einstein_graph, "Q937", first_candidate, NO_FILTER,
                ExtractionConfig(k_min=5, k_max=7),
            )
        assert err.value.reason == REJECT_TOO_SHORT
        assert err.value.k == 4
        assert err.value.seed_id == "Q937"

    def test_no_candidates_at_seed(self, einstein_graph, first_candidate):
        # Winterthur has no outgoing edges at all
        with pytest.raises(PathRejected) as err:
            expand_target_path(einstein_graph, "Q9125", first_candidate, NO_FILTER)
        assert err.value.reason == REJECT_NO_CANDIDATES
        assert err.value.k == 0

    def test_selector_stop_mid_walk(self, toy_graph, toy_filter):
        select = make_scripted_selector([1, 1, 1, 0])
        path = expand_target_path(
            toy_graph, "N000", select, toy_filter, ExtractionConfig(k_min=3, k_max=7)
        )
        assert path.k == 3

    def test_selector_stop_at_first_step_is_too_short(self, toy_graph, toy_filter):
        select = make_scripted_selector([0])
        with pytest.raises(PathRejected) as err:
            expand_target_path(toy_graph, "N000", select, toy_filter)
        assert err.value.reason == REJECT_TOO_SHORT
        assert err.value.k == 0

    def test_unknown_seed(self, toy_graph, toy_filter, first_candidate):
        with pytest.raises(KeyError):
            expand_target_path(toy_graph, "missing", first_candidate, toy_filter)

    def test_visited_nodes_never_reoffered(self, tmp_path, first_candidate):
        # two-node cycle: A <-> B; at B the only fresh target is C
        g = load_graph(write_dump(tmp_path, [
            ent("A", "Node A"), ent("B", "Node B"), ent("C", "Node C"),
            edg("A", "B"), edg("B", "A"), edg("B", "C"),
        ]))
        path = expand_target_path(
            g, "A", first_candidate, NO_FILTER, ExtractionConfig(k_min=2, k_max=7)
        )
        assert path.node_ids == ("A", "B", "C")

    def test_cycle_with_no_exit_rejects(self, tmp_path, first_candidate):
        g = load_graph(write_dump(tmp_path, [
            ent("A", "Node A"), ent("B", "Node B"),
            edg("A", "B"), edg("B", "A"),
        ]))
        with pytest.raises(PathRejected) as err:
            expand_target_path(g, "A", first_candidate, NO_FILTER)
        assert err.value.reason == REJECT_TOO_SHORT
        assert err.value.k == 1

    def test_candidate_cap_limits_selector_choices(self, tmp_path):
        records = [ent("HUB", "Hub")]
        records += [ent(f"T{i:02d}", f"Target {i:02d}") for i in range(14)]
        records += [edg("HUB", f"T{i:02d}", f"r{i:02d}") for i in range(14)]
        g = load_graph(write_dump(tmp_path, records))
        seen = {}

        def spy(request):
            seen["n"] = len(request.candidates)
            return SelectorDecision(think="", answer=0)

        with pytest.raises(PathRejected):
            expand_target_path(g, "HUB", spy, RelationFilter(candidate_cap=10))
        assert seen["n"] == 10

    def test_visited_filter_applies_after_cap(self, tmp_path):
        # walk A -> B; B's edges in dump order start with one back-edge to A
        # inside the cap window, so the selector sees cap-1 candidates rather
        # than a backfilled slot
        records = [ent("A", "Node A"), ent("B", "Node B")]
        records += [ent(f"X{i}", f"Extra {i}") for i in range(11)]
        records += [edg("A", "B")]
        records += [edg("B", "A", "back")]
        records += [edg("B", f"X{i}", f"out{i}") for i in range(11)]
        g = load_graph(write_dump(tmp_path, records))
        counts = []

        def spy(request):
            counts.append(len(request.candidates))
            return SelectorDecision(think="", answer=1 if len(counts) == 1 else 0)

        with pytest.raises(PathRejected):
            expand_target_path(g, "A", spy, RelationFilter(candidate_cap=10))
        # at B: cap keeps [back-edge, out0..out8]; dropping the visited
        # back-edge leaves 9, not 10
        assert counts == [1, 9]


class TestRetries:
    def test_bad_answers_then_success(self, toy_graph, toy_filter):
        answers = iter([99, -1, 1, 1, 1, 1, 1, 1, 1])

        def flaky(request):
            return SelectorDecision(think="", answer=next(answers))

        path = expand_target_path(
            toy_graph, "N000", flaky, toy_filter,
            ExtractionConfig(k_min=3, k_max=3, retries=5),
        )
        assert path.k == 3

    def test_selector_error_consumes_attempts(self, toy_graph, toy_filter):
        calls = []

        def always_failing(request):
            calls.append(1)
            raise SelectorError("transient")

        with pytest.raises(SelectorExhausted) as err:
            expand_target_path(
                toy_graph, "N000", always_failing, toy_filter,
                ExtractionConfig(retries=4),
            )
        assert err.value.attempts == 5
        assert len(calls) == 5

    def test_bool_answer_is_invalid(self, toy_graph, toy_filter):
        def boolean(request):
            return SelectorDecision(think="", answer=True)

        with pytest.raises(SelectorExhausted):
            expand_target_path(
                toy_graph, "N000", boolean, toy_filter, ExtractionConfig(retries=1)
            )

    def test_remote_exhaustion_not_retried_locally(self, toy_graph, toy_filter):
        calls = []

        def exhausted(request):
            calls.append(1)
            raise SelectorExhausted("endpoint down", attempts=3)

        with pytest.raises(SelectorExhausted):
            expand_target_path(
                toy_graph, "N000", exhausted, toy_filter, ExtractionConfig(retries=5)
            )
        assert len(calls) == 1


class TestDistractors:
    def chain_graph(self, tmp_path, with_branches=True):
        records = [ent(c, f"Stage {c}") for c in "ABCDE"]
        records += [edg(a, b) for a, b in zip("ABCD", "BCDE")]
        if with_branches:
            records += [ent("S1", "Side One"), ent("S2", "Side Two")]
            records += [edg("B", "S1", "aside"), edg("S1", "S2", "again")]
        return load_graph(write_dump(tmp_path, records))

    def target(self, graph, first_candidate, k=4):
        return expand_target_path(
            graph, "A", first_candidate, NO_FILTER, ExtractionConfig(k_min=k, k_max=k)
        )

    def test_divergence_in_range_and_terminal_marked(self, tmp_path, first_candidate):
        g = self.chain_graph(tmp_path)
        target = self.target(g, first_candidate)
        config = ExtractionConfig(distractor_min=1, distractor_max=3)
        branches = sample_distractors(
            g, target, NO_FILTER, config, random.Random(0), "Stage E"
        )
        assert branches
        for b in branches:
            assert 1 <= b.divergence_index <= target.k - 1
            assert b.divergence_index == 1  # only B has a side edge
            assert b.terminal_title in ("Side One", "Side Two")
            assert 1 <= len(b.node_ids) <= min(3, target.k - b.divergence_index)

    def test_no_distractors_when_graph_is_a_pure_chain(self, tmp_path, first_candidate):
        g = self.chain_graph(tmp_path, with_branches=False)
        target = self.target(g, first_candidate)
        branches = sample_distractors(
            g, target, NO_FILTER, ExtractionConfig(), random.Random(0), "Stage E"
        )
        assert branches == ()

    def test_distractor_max_zero(self, tmp_path, first_candidate):
        g = self.chain_graph(tmp_path)
        target = self.target(g, first_candidate)
        config = ExtractionConfig(distractor_min=0, distractor_max=0)
        assert sample_distractors(
            g, target, NO_FILTER, config, random.Random(0), "Stage E"
        ) == ()

    def test_single_hop_target_has_no_room(self, tmp_path, first_candidate):
        g = self.chain_graph(tmp_path)
        target = expand_target_path(
            g, "A", first_candidate, NO_FILTER, ExtractionConfig(k_min=1, k_max=1)
        )
        assert sample_distractors(
            g, target, NO_FILTER, ExtractionConfig(), random.Random(0), "Stage B"
        ) == ()

    def test_branch_never_ends_at_correct_answer(self, tmp_path, first_candidate):
        # the only side path terminates at a node titled like the answer
        records = [ent(c, f"Stage {c}") for c in "ABCD"]
        records += [edg(a, b) for a, b in zip("ABC", "BCD")]
        records += [ent("TRAP", "Stage D", description="an impostor")]
        records += [edg("B", "TRAP", "shortcut")]
        g = load_graph(write_dump(tmp_path, records))
        target = expand_target_path(
            g, "A", first_candidate, NO_FILTER, ExtractionConfig(k_min=3, k_max=3)
        )
        branches = sample_distractors(
            g, target, NO_FILTER, ExtractionConfig(), random.Random(1), "Stage D"
        )
        assert branches == ()

    def test_first_branch_edge_leaves_the_path(self, einstein_graph, first_candidate):
        target = expand_target_path(
            einstein_graph, "Q937", first_candidate, NO_FILTER
        )
        for seed in range(20):
            branches = sample_distractors(
                einstein_graph, target, NO_FILTER,
                ExtractionConfig(distractor_min=1, distractor_max=3),
                random.Random(seed), "Bern",
            )
            path_ids = set(target.node_ids)
            for b in branches:
                assert b.node_ids[0] not in path_ids


class TestExtractSubgraph:
    def test_waypoints_exclude_answer(self, einstein_graph, first_candidate, rng):
        sub = extract_subgraph(
            einstein_graph, "Q937", first_candidate, NO_FILTER,
            ExtractionConfig(distractor_min=1, distractor_max=1), rng,
        )
        assert sub.waypoints == ("Einstein", "ETH Zurich", "Zurich", "Switzerland")
        assert sub.correct_answer == "Bern"
        assert sub.correct_answer not in sub.waypoints
        assert sub.answer_type == "location"

    def test_node_count_spans_target_and_branches(self, einstein_graph,
                                                  first_candidate, rng):
        sub = extract_subgraph(
            einstein_graph, "Q937", first_candidate, NO_FILTER,
            ExtractionConfig(distractor_min=1, distractor_max=1), rng,
        )
        assert sub.node_count == 6  # 5 path nodes + Winterthur

    def test_duplicate_title_terminal_rejected(self, tmp_path, first_candidate, rng):
        records = [
            ent("A", "Loop Title"), ent("B", "Stage B"), ent("C", "Stage C"),
            ent("D", "Loop Title"),
        ]
        records += [edg("A", "B"), edg("B", "C"), edg("C", "D")]
        g = load_graph(write_dump(tmp_path, records))
        with pytest.raises(PathRejected) as err:
            extract_subgraph(
                g, "A", first_candidate, NO_FILTER,
                ExtractionConfig(k_min=3, k_max=3), rng,
            )
        assert err.value.reason == REJECT_ANSWER_IN_WAYPOINTS

    def test_determinism_per_rng_seed(self, toy_graph, toy_filter):
        def run(seed):
            sub = extract_subgraph(
                toy_graph, "N000",
                make_scripted_selector([1] * 7),
                toy_filter, ExtractionConfig(), random.Random(seed),
            )
            return to_canonical_json(serialize_subgraph(toy_graph, sub))

        assert run(5) == run(5)
        # distractor draws move with the seed even when the target is pinned
        docs = {run(s) for s in range(6)}
        assert len(docs) > 1


class TestSerialization:
    def test_matches_golden(self, einstein_graph, first_candidate, fixtures_dir):
        sub = extract_subgraph(
            einstein_graph, "Q937", first_candidate, NO_FILTER,
            ExtractionConfig(distractor_min=1, distractor_max=1), random.Random(0),
        )
        golden = (fixtures_dir / "einstein_subgraph.golden.json").read_text(
            encoding="utf-8"
        )
        assert to_canonical_json(serialize_subgraph(einstein_graph, sub)) == golden

    def test_text_falls_back_to_title(self, tmp_path, first_candidate, rng):
        records = [
            ent("A", "Bare A"), ent("B", "Bare B"), ent("C", "Bare C"),
            ent("D", "Bare D"),
        ]
        records += [edg("A", "B"), edg("B", "C"), edg("C", "D")]
        g = load_graph(write_dump(tmp_path, records))
        sub = extract_subgraph(
            g, "A", first_candidate, NO_FILTER, ExtractionConfig(k_min=3, k_max=3), rng
        )
        doc = serialize_subgraph(g, sub)
        assert doc["path"]["nodes"][0]["text"] == "Bare A"

    def test_arrow_string(self, einstein_graph, first_candidate):
        target = expand_target_path(einstein_graph, "Q937", first_candidate, NO_FILTER)
        arrows = render_path_arrows(einstein_graph, target.node_ids, target.edges)
        assert arrows.startswith("Einstein --educated at--> ETH Zurich")
        assert arrows.endswith("--capital--> Bern")

    def test_jsonl_line_is_compact_single_line(self, einstein_graph,
                                               first_candidate, rng):
        sub = extract_subgraph(
            einstein_graph, "Q937", first_candidate, NO_FILTER,
            ExtractionConfig(distractor_min=1, distractor_max=1), rng,
        )
        line = to_jsonl_line(serialize_subgraph(einstein_graph, sub))
        assert "\n" not in line
        assert ": " not in line
        assert json.loads(line)["correct_answer"] == "Bern"

    def test_schema_validates_einstein_doc(self, einstein_graph, first_candidate, rng):
        import jsonschema

        from kgquest.cli import SCHEMA_PATH

        schema = json.loads(SCHEMA_PATH.read_text(encoding="utf-8"))
        sub = extract_subgraph(
            einstein_graph, "Q937", first_candidate, NO_FILTER,
            ExtractionConfig(distractor_min=1, distractor_max=1), rng,
        )
        jsonschema.validate(serialize_subgraph(einstein_graph, sub), schema)


class TestConfigValidation:
    def test_k_bounds(self):
        with pytest.raises(ValueError):
            ExtractionConfig(k_min=0)
        with pytest.raises(ValueError):
            ExtractionConfig(k_min=5, k_max=4)

    def test_distractor_bounds(self):
        with pytest.raises(ValueError):
            ExtractionConfig(distractor_min=-1)
        with pytest.raises(ValueError):
            ExtractionConfig(distractor_min=3, distractor_max=1)

    def test_retries_nonnegative(self):
        with pytest.raises(ValueError):
            ExtractionConfig(retries=-1)

    def test_branch_len_positive(self):
        with pytest.raises(ValueError):
            ExtractionConfig(branch_max_len=0)
