"""Question filtering, dataset ordering, and corpus statistics.

rule_filter rejects generated questions that leak the chain they were
built from; verify_question is the retrieval-verification seam (tests and
offline runs plug in a lookup table); order_curriculum sorts training
pools hardest-first; compute_stats summarizes a serialized subgraph
corpus; spearman is the tie-aware rank correlation used for
coverage-vs-correctness tracking.
"""

import math
import unicodedata
from dataclasses import dataclass

FILTER_ANSWER_LEAK = "answer_leak"
FILTER_WAYPOINT_LEAK = "waypoint_leak"
FILTER_MALFORMED = "malformed"
FILTER_EMPTY = "empty_question"

_TAG_FRAGMENTS = (
    "<think>", "</think>", "<search>", "</search>",
    "<information>", "</information>", "<answer>", "</answer>",
    "<question>", "</question>",
)


@dataclass(frozen=True)
class FilterConfig:
    exempt_seed: bool = True  # the seed entity may appear in the question


@dataclass(frozen=True)
class FilterResult:
    passed: bool
    reasons: tuple


def _norm(text: str) -> str:
    return unicodedata.normalize("NFC", text).casefold()


def rule_filter(question, waypoints, correct_answer: str,
                config: FilterConfig | None = None) -> FilterResult:
    """Reject questions that are empty, tag-contaminated, or leak the chain.

    Leak matching is case-insensitive over NFC-normalized text. The seed
    waypoint (first element) is exempt by default: a question has to
    anchor somewhere.
    """
    config = config or FilterConfig()
    reasons = []
    if not isinstance(question, str):
        return FilterResult(False, (FILTER_MALFORMED,))
    if not question.strip():
        return FilterResult(False, (FILTER_EMPTY,))
    q = _norm(question)
    if any(_norm(tag) in q for tag in _TAG_FRAGMENTS):
        reasons.append(FILTER_MALFORMED)
    if correct_answer.strip() and _norm(correct_answer) in q:
        reasons.append(FILTER_ANSWER_LEAK)
    checked = list(waypoints)
    if config.exempt_seed and checked:
        checked = checked[1:]
    if any(w.strip() and _norm(w) in q for w in checked):
        reasons.append(FILTER_WAYPOINT_LEAK)
    return FilterResult(passed=not reasons, reasons=tuple(reasons))


def verify_question(question: str, expected_answer: str, answer_fn) -> bool:
    """Retrieval-verification seam: keep a question only if an independent
    answerer lands on the expected answer. answer_fn(question) returns the
    predicted answer text or None."""
    from .reward import answers_match

    predicted = answer_fn(question)
    return answers_match(predicted, expected_answer)


class TableAnswerFn:
    """Lookup-table answerer for offline verification runs and tests."""

    def __init__(self, table: dict):
        self.table = dict(table)

    def __call__(self, question: str):
        return self.table.get(question)


def _curriculum_key(item):
    if isinstance(item, dict):
        node_count = item.get("node_count")
        if node_count is None:
            titles = {n["title"] for n in item["path"]["nodes"]}
            for d in item.get("distractors", ()):
                titles.update(d.get("divergent_nodes", ()))
            node_count = len(titles)
        return -node_count, str(item.get("id", ""))
    return -item.node_count, str(item.subgraph_id)


def order_curriculum(subgraphs) -> list:
    """Hardest first: descending node count, ties by ascending id, stable."""
    return sorted(subgraphs, key=_curriculum_key)


@dataclass(frozen=True)
class DatasetStats:
    count: int
    path_length_hist: dict
    mean_path_length: float
    std_path_length: float
    answer_type_dist: dict
    relation_freq: dict
    unique_relations_total: int
    mean_unique_relations: float

    def to_dict(self) -> dict:
        return {
            "count": self.count,
            "path_length_hist": {str(k): v for k, v in sorted(self.path_length_hist.items())},
            "mean_path_length": self.mean_path_length,
            "std_path_length": self.std_path_length,
            "answer_type_dist": dict(sorted(self.answer_type_dist.items())),
            "relation_freq": dict(sorted(self.relation_freq.items())),
            "unique_relations_total": self.unique_relations_total,
            "mean_unique_relations": self.mean_unique_relations,
        }


def compute_stats(docs) -> DatasetStats:
    """Corpus statistics over serialized subgraph documents."""
    lengths = []
    type_counts: dict = {}
    relation_freq: dict = {}
    unique_per_doc = []
    for doc in docs:
        length = doc["path"]["length"]
        lengths.append(length)
        at = doc["answer_type"]
        type_counts[at] = type_counts.get(at, 0) + 1
        seen = set()
        for edge in doc["path"]["edges"]:
            rel = edge["relation"]
            relation_freq[rel] = relation_freq.get(rel, 0) + 1
            seen.add(rel)
        unique_per_doc.append(len(seen))
    n = len(lengths)
    if n == 0:
        raise ValueError("empty corpus")
    mean_len = sum(lengths) / n
    var = sum((x - mean_len) ** 2 for x in lengths) / n
    hist: dict = {}
    for length in lengths:
        hist[length] = hist.get(length, 0) + 1
    return DatasetStats(
        count=n,
        path_length_hist=hist,
        mean_path_length=mean_len,
        std_path_length=math.sqrt(var),
        answer_type_dist={k: v / n for k, v in type_counts.items()},
        relation_freq=relation_freq,
        unique_relations_total=len(relation_freq),
        mean_unique_relations=sum(unique_per_doc) / n,
    )


def _average_ranks(values) -> list:
    n = len(values)
    order = sorted(range(n), key=lambda i: values[i])
    ranks = [0.0] * n
    i = 0
    while i < n:
        j = i
        while j + 1 < n and values[order[j + 1]] == values[order[i]]:
            j += 1
        rank = (i + j) / 2 + 1  # average of 1-based positions i..j
        for t in range(i, j + 1):
            ranks[order[t]] = rank
        i = j + 1
    return ranks


def spearman(x, y) -> float:
    """Rank correlation with average ranks for ties; 0 for constant input."""
    xs = list(x)
    ys = list(y)
    if len(xs) != len(ys):
        raise ValueError("series lengths differ")
    n = len(xs)
    if n == 0:
        raise ValueError("empty series")
    if min(xs) == max(xs) or min(ys) == max(ys):
        return 0.0
    rx = _average_ranks(xs)
    ry = _average_ranks(ys)
    mx = sum(rx) / n
    my = sum(ry) / n
    cov = sxx = syy = 0.0
    for a, b in zip(rx, ry):
        da = a - mx
        db = b - my
        cov += da * db
        sxx += da * da
        syy += db * db
    if sxx == 0.0 or syy == 0.0:
        return 0.0
    return cov / math.sqrt(sxx * syy)
