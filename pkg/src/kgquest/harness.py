"""Synthetic solver simulation for desk-scale reward experiments.

simulate_rollout fabricates a well-formed transcript whose think text
mentions each waypoint independently with probability p_mention, with
answer correctness either independent of coverage or logistically coupled
to it. simulate_run drives groups through both the binary and
coverage-shaped scoring paths and emits one metrics row per step, so the
dense-feedback claim can be checked end to end without any model.
"""

import csv
import hashlib
import math
import random
from dataclasses import dataclass

from .extraction import ExtractionConfig, PathRejected, Subgraph, extract_subgraph
from .kg import KnowledgeGraph, RelationFilter
from .pipeline import order_curriculum, spearman
from .reward import GroupResult, RewardConfig, binary_reward, score_group
from .selector import HeuristicSelector, HeuristicSelectorConfig

COUPLING_MODES = ("independent", "logistic")

METRICS_COLUMNS = (
    "step",
    "mean_binary_reward",
    "mean_wcr_reward",
    "mean_coverage",
    "spearman_coverage_correctness",
    "frac_all_incorrect",
    "frac_nonconstant_wcr_all_incorrect",
)


def derive_rng(seed, *tokens) -> random.Random:
    """Stable, platform-independent child RNG keyed by (seed, tokens)."""
    blob = ":".join([str(seed), *map(str, tokens)])
    digest = hashlib.sha256(blob.encode("utf-8")).hexdigest()
    return random.Random(int(digest[:16], 16))


@dataclass(frozen=True)
class SolverPolicyConfig:
    p_mention: float = 0.5
    p_correct: float = 0.0  # used by the independent coupling
    coupling: str = "independent"
    slope: float = 0.0  # logistic coupling: P(correct) = sigmoid(intercept + slope * g)
    intercept: float = 0.0
    slope_final: float | None = None  # linear slope schedule over a run

    def __post_init__(self):
        if not 0.0 <= self.p_mention <= 1.0:
            raise ValueError("p_mention must lie in [0, 1]")
        if not 0.0 <= self.p_correct <= 1.0:
            raise ValueError("p_correct must lie in [0, 1]")
        if self.coupling not in COUPLING_MODES:
            raise ValueError(f"unknown coupling {self.coupling!r}")


@dataclass(frozen=True)
class MetricsRow:
    step: int
    mean_binary_reward: float
    mean_wcr_reward: float
    mean_coverage: float
    spearman_coverage_correctness: float  # pooled over all rollouts so far
    frac_all_incorrect: float  # cumulative over groups so far
    frac_nonconstant_wcr_all_incorrect: float  # among all-incorrect groups so far


@dataclass(frozen=True)
class GroupOutcome:
    transcripts: tuple
    result: GroupResult
    binary_rewards: tuple


def _sigmoid(x: float) -> float:
    if x >= 0:
        return 1.0 / (1.0 + math.exp(-x))
    e = math.exp(x)
    return e / (1.0 + e)


def simulate_rollout(waypoints, correct_answer: str, wrong_answers,
                     policy: SolverPolicyConfig, rng,
                     slope: float | None = None) -> str:
    """One synthetic transcript; correctness is encoded in the answer span."""
    mentioned = [w for w in waypoints if rng.random() < policy.p_mention]
    g = len(mentioned) / len(waypoints)
    if policy.coupling == "logistic":
        k = policy.slope if slope is None else slope
        p_correct = _sigmoid(policy.intercept + k * g)
    else:
        p_correct = policy.p_correct
    correct = rng.random() < p_correct
    if correct:
        answer = correct_answer
    elif wrong_answers:
        answer = rng.choice(list(wrong_answers))
    else:
        answer = "no answer found"
    if mentioned:
        think = "the trail runs through " + ", then ".join(mentioned)
    else:
        think = "no clear trail from the question yet"
    query = mentioned[0] if mentioned else "background for the question"
    return (
        f"<think>{think}</think>"
        f"<search>{query}</search>"
        f"<information>retrieved context snippet</information>"
        f"<answer>{answer}</answer>"
    )


def _pool_entry(item):
    """Accepts Subgraph objects or serialized documents."""
    if isinstance(item, Subgraph):
        wrongs = [b.terminal_title for b in item.distractors]
        return item.waypoints, item.correct_answer, wrongs, item
    nodes = [n["title"] for n in item["path"]["nodes"]]
    wrongs = [d["answer"] for d in item.get("distractors", ())]
    return tuple(nodes[:-1]), item["correct_answer"], wrongs, item


def simulate_group(waypoints, correct_answer: str, wrong_answers,
                   policy: SolverPolicyConfig, group_size: int, rng,
                   reward_config: RewardConfig | None = None,
                   slope: float | None = None) -> GroupOutcome:
    """Simulate and score one rollout group under both reward paths."""
    transcripts = tuple(
        simulate_rollout(waypoints, correct_answer, wrong_answers, policy, rng, slope)
        for _ in range(group_size)
    )
    result = score_group(
        waypoints, transcripts, correct_answer=correct_answer, config=reward_config
    )
    return GroupOutcome(
        transcripts=transcripts,
        result=result,
        binary_rewards=tuple(binary_reward(result.correct)),
    )


def _schedule_slope(policy: SolverPolicyConfig, step: int, steps: int) -> float | None:
    if policy.slope_final is None or steps <= 1:
        return None  # simulate_rollout falls back to policy.slope
    frac = step / (steps - 1)
    return policy.slope + (policy.slope_final - policy.slope) * frac


def simulate_run(pool, policy: SolverPolicyConfig, group_size: int, steps: int,
                 seed=0, reward_config: RewardConfig | None = None) -> list:
    """Drive `steps` groups through the pool in curriculum order.

    Per-step means are over that step's group; the spearman column and
    both fraction columns are cumulative so every row stays in range and
    the final row summarizes the run.
    """
    if group_size < 1 or steps < 1:
        raise ValueError("group_size and steps must be >= 1")
    ordered = order_curriculum(list(pool))
    if not ordered:
        raise ValueError("empty pool")
    rows = []
    pooled_cov: list = []
    pooled_cor: list = []
    groups_seen = 0
    all_incorrect_groups = 0
    nonconstant_wcr_groups = 0
    for step in range(steps):
        waypoints, answer, wrongs, _ = _pool_entry(ordered[step % len(ordered)])
        rng = derive_rng(seed, "step", step)
        outcome = simulate_group(
            waypoints, answer, wrongs, policy, group_size, rng,
            reward_config, _schedule_slope(policy, step, steps),
        )
        result = outcome.result
        pooled_cov.extend(result.coverages)
        pooled_cor.extend(result.correct)
        groups_seen += 1
        if not any(result.correct):
            all_incorrect_groups += 1
            if len(set(result.rewards)) > 1:
                nonconstant_wcr_groups += 1
        g = group_size
        rows.append(
            MetricsRow(
                step=step,
                mean_binary_reward=sum(outcome.binary_rewards) / g,
                mean_wcr_reward=sum(result.rewards) / g,
                mean_coverage=sum(result.coverages) / g,
                spearman_coverage_correctness=spearman(pooled_cov, pooled_cor),
                frac_all_incorrect=all_incorrect_groups / groups_seen,
                frac_nonconstant_wcr_all_incorrect=(
                    nonconstant_wcr_groups / all_incorrect_groups
                    if all_incorrect_groups
                    else 0.0
                ),
            )
        )
    return rows


def write_metrics_csv(rows, path) -> None:
    """Fixed column order; float repr keeps same-seed runs byte-identical."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(METRICS_COLUMNS)
        for row in rows:
            writer.writerow(
                [
                    row.step,
                    repr(row.mean_binary_reward),
                    repr(row.mean_wcr_reward),
                    repr(row.mean_coverage),
                    repr(row.spearman_coverage_correctness),
                    repr(row.frac_all_incorrect),
                    repr(row.frac_nonconstant_wcr_all_incorrect),
                ]
            )


def generate_pool(graph: KnowledgeGraph, count: int, flt: RelationFilter | None = None,
                  k_min: int = 3, k_max: int = 7, distractor_min: int = 1,
                  distractor_max: int = 3, seed=0) -> list:
    """Synthetic pool with target lengths drawn uniformly from [k_min, k_max].

    Each entry pins the walk to its drawn length (k_min = k_max = K with a
    never-stopping heuristic selector), which is what gives the pool its
    near-uniform length histogram on well-connected graphs.
    """
    flt = flt or RelationFilter()
    ids = graph.entity_ids()
    pool = []
    for i in range(count):
        rng = derive_rng(seed, "pool", i)
        target_k = rng.randint(k_min, k_max)
        config = ExtractionConfig(
            k_min=target_k, k_max=target_k,
            distractor_min=distractor_min, distractor_max=distractor_max,
        )
        sub = None
        for _attempt in range(64):
            seed_id = rng.choice(ids)
            selector = HeuristicSelector(rng, HeuristicSelectorConfig(p_stop=0.0))
            try:
                sub = extract_subgraph(graph, seed_id, selector, flt, config, rng)
                break
            except PathRejected:
                continue
        if sub is None:
            raise RuntimeError(
                f"could not place a length-{target_k} path after 64 attempts"
            )
        pool.append(sub)
    return pool
