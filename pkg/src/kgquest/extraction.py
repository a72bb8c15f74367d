"""Subgraph extraction: target-path expansion plus distractor branches.

Stage 1 walks a target path out from a seed entity, one selector decision
per hop, over blocklist/allowlist-filtered candidate edges. Stage 2
attaches short distractor branches that fork off intermediate path nodes.
The accepted structure carries the waypoint titles (all path nodes except
the terminal) and the terminal title as the correct answer.
"""

import json
import logging
import random
from dataclasses import dataclass

from .kg import Edge, KnowledgeGraph, RelationFilter, candidate_edges
from .selector import (
    CandidateView,
    NodeView,
    SelectorDecision,
    SelectorError,
    SelectorExhausted,
    SelectorRequest,
)

logger = logging.getLogger(__name__)

REJECT_TOO_SHORT = "too_short"
REJECT_NO_CANDIDATES = "no_candidates"
REJECT_SELECTOR_EXHAUSTED = "selector_exhausted"
REJECT_ANSWER_IN_WAYPOINTS = "answer_in_waypoints"


class PathRejected(Exception):
    """Seed did not yield an acceptable path."""

    def __init__(self, reason: str, k: int, seed_id: str = ""):
        super().__init__(f"seed {seed_id or '?'} rejected ({reason}) at k={k}")
        self.reason = reason
        self.k = k
        self.seed_id = seed_id


@dataclass(frozen=True)
class ExtractionConfig:
    k_min: int = 3
    k_max: int = 7
    distractor_min: int = 1
    distractor_max: int = 3
    retries: int = 5  # selector retry budget per hop
    branch_max_len: int = 3

    def __post_init__(self):
        if not 1 <= self.k_min <= self.k_max:
            raise ValueError("need 1 <= k_min <= k_max")
        if not 0 <= self.distractor_min <= self.distractor_max:
            raise ValueError("need 0 <= distractor_min <= distractor_max")
        if self.retries < 0:
            raise ValueError("retries must be >= 0")
        if self.branch_max_len < 1:
            raise ValueError("branch_max_len must be >= 1")


@dataclass(frozen=True)
class TargetPath:
    node_ids: tuple  # v_0 .. v_K
    edges: tuple  # K edges, edges[i] goes v_i -> v_{i+1}

    @property
    def k(self) -> int:
        return len(self.edges)


@dataclass(frozen=True)
class DistractorBranch:
    divergence_index: int  # forks off v_k, 1 <= k <= K-1
    node_ids: tuple  # branch nodes after v_k
    edges: tuple  # first edge leaves v_k
    terminal_title: str = ""  # title of the branch endpoint (the wrong answer)


@dataclass(frozen=True)
class Subgraph:
    subgraph_id: str
    target: TargetPath
    distractors: tuple
    waypoints: tuple  # titles of v_0 .. v_{K-1}
    correct_answer: str  # title of v_K
    answer_type: str
    node_count: int  # distinct entities across target and branches


def render_path_arrows(graph: KnowledgeGraph, node_ids, edges) -> str:
    """Human-readable chain: A --relation--> B --relation--> C."""
    parts = [graph.entity(node_ids[0]).title]
    for edge in edges:
        parts.append(f" --{edge.relation_label}--> ")
        parts.append(graph.entity(edge.target).title)
    return "".join(parts)


def _node_view(graph: KnowledgeGraph, entity_id: str) -> NodeView:
    ent = graph.entity(entity_id)
    return NodeView(
        title=ent.title, description=ent.description, attributes=ent.attributes
    )


def _build_request(graph, path_nodes, path_edges, cands) -> SelectorRequest:
    return SelectorRequest(
        path_history=render_path_arrows(graph, path_nodes, path_edges),
        current_node=_node_view(graph, path_nodes[-1]),
        candidates=tuple(
            CandidateView(
                relation_label=e.relation_label,
                target_title=graph.entity(e.target).title,
                target_description=graph.entity(e.target).description,
            )
            for e in cands
        ),
    )


def _select_with_retries(select, request, retries: int, seed_id: str) -> SelectorDecision:
    """Retry shape/range failures; selector exhaustion passes straight through."""
    n = len(request.candidates)
    last_error = None
    for _ in range(retries + 1):
        try:
            decision = select(request)
        except SelectorExhausted:
            raise
        except SelectorError as exc:
            last_error = exc
            continue
        answer = decision.answer
        if isinstance(answer, int) and not isinstance(answer, bool) and 0 <= answer <= n:
            return decision
        last_error = SelectorError(f"answer {answer!r} outside 0..{n}")
    raise SelectorExhausted(
        f"seed {seed_id}: selector gave no usable decision ({last_error})",
        attempts=retries + 1,
    )


def expand_target_path(graph: KnowledgeGraph, seed_id: str, select,
                       flt: RelationFilter,
                       config: ExtractionConfig | None = None) -> TargetPath:
    """Walk the target path out from seed_id, one selector call per hop."""
    config = config or ExtractionConfig()
    if seed_id not in graph:
        raise KeyError(f"unknown entity id: {seed_id!r}")
    path_nodes = [seed_id]
    path_edges: list = []
    visited = {seed_id}
    first_step_empty = False
    while len(path_edges) < config.k_max:
        # cycle prevention happens after the candidate cap so the selector
        # sees the same first-cap slice a fresh walk would
        cands = [
            e for e in candidate_edges(graph, path_nodes[-1], flt)
            if e.target not in visited
        ]
        if not cands:
            first_step_empty = not path_edges
            break
        request = _build_request(graph, path_nodes, path_edges, cands)
        decision = _select_with_retries(select, request, config.retries, seed_id)
        if decision.answer == 0:
            break
        edge = cands[decision.answer - 1]
        path_edges.append(edge)
        path_nodes.append(edge.target)
        visited.add(edge.target)
    k = len(path_edges)
    if k == 0 and first_step_empty:
        raise PathRejected(REJECT_NO_CANDIDATES, 0, seed_id)
    if k < config.k_min:
        raise PathRejected(REJECT_TOO_SHORT, k, seed_id)
    return TargetPath(node_ids=tuple(path_nodes), edges=tuple(path_edges))


def _grow_branch(graph, target, flt, config, rng, correct_answer, k):
    """One attempt at a branch from v_k; None when nothing grows."""
    max_len = min(config.branch_max_len, target.k - k)
    length = rng.randint(1, max_len)
    used = set(target.node_ids)
    cur = target.node_ids[k]
    nodes: list = []
    edges: list = []
    for _ in range(length):
        # excluding path entities also guarantees the first branch edge
        # differs from the target edge leaving v_k
        cands = [e for e in candidate_edges(graph, cur, flt) if e.target not in used]
        if not cands:
            break
        edge = rng.choice(cands)
        nodes.append(edge.target)
        edges.append(edge)
        used.add(edge.target)
        cur = edge.target
    if not edges:
        return None
    terminal = graph.entity(nodes[-1])
    if terminal.title == correct_answer:
        return None  # a branch must never terminate at the correct answer
    return DistractorBranch(
        divergence_index=k, node_ids=tuple(nodes), edges=tuple(edges),
        terminal_title=terminal.title,
    )


def sample_distractors(graph: KnowledgeGraph, target: TargetPath,
                       flt: RelationFilter, config: ExtractionConfig,
                       rng, correct_answer: str) -> tuple:
    """Draw distractor branches; graph limits degrade the count, never fail.

    Divergence points are drawn uniformly from 1..K-1 per branch, with
    replacement, so two branches may share a fork node; that shows up in
    serialized output as a repeated divergence_point.
    """
    if target.k < 2 or config.distractor_max == 0:
        return ()
    want = rng.randint(config.distractor_min, config.distractor_max)
    branches = []
    for _ in range(want):
        branch = None
        for _attempt in range(4 * target.k):
            k = rng.randint(1, target.k - 1)
            branch = _grow_branch(graph, target, flt, config, rng, correct_answer, k)
            if branch is not None:
                break
        if branch is not None:
            branches.append(branch)
    return tuple(branches)


def extract_subgraph(graph: KnowledgeGraph, seed_id: str, select,
                     flt: RelationFilter, config: ExtractionConfig | None = None,
                     rng=None) -> Subgraph:
    """Full extraction for one seed: target path, then distractors."""
    config = config or ExtractionConfig()
    rng = rng if rng is not None else random.Random(0)
    target = expand_target_path(graph, seed_id, select, flt, config)
    titles = [graph.entity(i).title for i in target.node_ids]
    waypoints = tuple(titles[:-1])
    correct_answer = titles[-1]
    if correct_answer in set(waypoints):
        # only possible in dumps with duplicate titles; coverage matching
        # would conflate answer and waypoint mentions
        raise PathRejected(REJECT_ANSWER_IN_WAYPOINTS, target.k, seed_id)
    distractors = sample_distractors(graph, target, flt, config, rng, correct_answer)
    node_ids = set(target.node_ids)
    for branch in distractors:
        node_ids.update(branch.node_ids)
    return Subgraph(
        subgraph_id=seed_id,
        target=target,
        distractors=distractors,
        waypoints=waypoints,
        correct_answer=correct_answer,
        answer_type=graph.entity(target.node_ids[-1]).answer_type,
        node_count=len(node_ids),
    )


# ---------------------------------------------------------------------------
# serialization

def _node_doc(graph: KnowledgeGraph, entity_id: str) -> dict:
    ent = graph.entity(entity_id)
    return {
        "title": ent.title,
        "text": ent.description if ent.description else ent.title,
        "answer_type": ent.answer_type,
        "attributes": [
            {"property_label": label, "value": value} for label, value in ent.attributes
        ],
    }


def _edge_doc(graph: KnowledgeGraph, edge: Edge) -> dict:
    return {
        "source": graph.entity(edge.source).title,
        "target": graph.entity(edge.target).title,
        "relation": edge.relation_label,
    }


def serialize_subgraph(graph: KnowledgeGraph, sub: Subgraph) -> dict:
    """Render one subgraph as the question-construction input document."""
    target = sub.target
    doc = {
        "id": sub.subgraph_id,
        "path": {
            "seed_node": sub.waypoints[0],
            "start_node": sub.waypoints[0],
            "end_node": sub.correct_answer,
            "length": target.k,
            "nodes": [_node_doc(graph, nid) for nid in target.node_ids],
            "edges": [_edge_doc(graph, e) for e in target.edges],
            "path": render_path_arrows(graph, target.node_ids, target.edges),
        },
        "correct_answer": sub.correct_answer,
        "answer_type": sub.answer_type,
        "distractors": [],
    }
    for branch in sub.distractors:
        k = branch.divergence_index
        terminal = graph.entity(branch.node_ids[-1])
        doc["distractors"].append(
            {
                "answer": terminal.title,
                "text": terminal.description if terminal.description else terminal.title,
                "answer_type": terminal.answer_type,
                "shared_nodes": [
                    graph.entity(nid).title for nid in target.node_ids[: k + 1]
                ],
                "divergence_point": graph.entity(target.node_ids[k]).title,
                "divergent_nodes": [graph.entity(nid).title for nid in branch.node_ids],
            }
        )
    return doc


def to_canonical_json(doc: dict) -> str:
    """Pretty canonical form (sorted keys) used for golden comparisons."""
    return json.dumps(doc, ensure_ascii=False, sort_keys=True, indent=2) + "\n"


def to_jsonl_line(doc: dict) -> str:
    """Compact canonical form for dataset files."""
    return json.dumps(doc, ensure_ascii=False, sort_keys=True, separators=(",", ":"))
