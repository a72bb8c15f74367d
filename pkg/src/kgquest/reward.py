"""Coverage measurement and group-relative reward scoring.

A rollout's raw coverage is the fraction of waypoint titles appearing
verbatim inside its concatenated think text. Coverage is normalized by
the group maximum, then shaped into a reward that keeps answer
correctness dominant:

    r = 1                        if the final answer is correct
    r = alpha * g_norm           if incorrect but well-formed
    r = 0                        if incorrect and malformed

Advantages are group-relative: (r - mean) / (population std + epsilon).
The arithmetic lives in the _kernel backend (compiled C or its
bit-identical pure-Python mirror).
"""

import unicodedata
from dataclasses import dataclass

from . import _kernel
from .trajectory import Trajectory, parse_trajectory

MATCH_MODES = ("exact_substring", "case_insensitive")
CORRECTNESS_MODES = ("exact_title", "external")

DEFAULT_ALPHA = 0.3
DEFAULT_EPSILON = 1e-6


@dataclass(frozen=True)
class RewardConfig:
    alpha: float = DEFAULT_ALPHA
    epsilon: float = DEFAULT_EPSILON
    match_mode: str = "exact_substring"
    normalize_nfc: bool = False

    def __post_init__(self):
        if not 0.0 < self.alpha < 1.0:
            raise ValueError("alpha must lie in (0, 1)")
        if self.epsilon <= 0.0:
            raise ValueError("epsilon must be positive")
        if self.match_mode not in MATCH_MODES:
            raise ValueError(f"unknown match_mode {self.match_mode!r}")


@dataclass(frozen=True)
class CoverageResult:
    matched: tuple  # waypoint titles found, in waypoint order
    g: float  # raw coverage in [0, 1]
    g_norm: float | None = None  # filled in by group scoring


@dataclass(frozen=True)
class GroupResult:
    coverages: tuple
    coverage_norms: tuple
    matched: tuple  # per-rollout tuples of matched waypoint titles
    correct: tuple
    valid: tuple
    rewards: tuple
    advantages: tuple
    mu: float
    sigma: float
    proposer_reward: float


def answers_match(predicted: str | None, expected: str) -> bool:
    """Trimmed, case-insensitive string equality."""
    if predicted is None:
        return False
    return predicted.strip().casefold() == expected.strip().casefold()


def _transform(text: str, config: RewardConfig) -> str:
    if config.normalize_nfc:
        text = unicodedata.normalize("NFC", text)
    if config.match_mode == "case_insensitive":
        text = text.casefold()
    return text


def _think_text(trajectory) -> str:
    if isinstance(trajectory, Trajectory):
        return trajectory.think_text
    return parse_trajectory(str(trajectory)).think_text


def _check_waypoints(waypoints) -> list:
    wps = list(waypoints)
    if not wps:
        raise ValueError("waypoint set must be nonempty")
    return wps


def coverage(waypoints, trajectory, config: RewardConfig | None = None) -> CoverageResult:
    """Raw waypoint coverage of one rollout's think text."""
    config = config or RewardConfig()
    wps = _check_waypoints(waypoints)
    text = _transform(_think_text(trajectory), config)
    patterns = [_transform(w, config) for w in wps]
    mask = _kernel.match_mask(text, patterns)
    matched = tuple(w for w, hit in zip(wps, mask) if hit)
    return CoverageResult(matched=matched, g=sum(mask) / len(wps))


def normalize_group(coverages) -> list:
    """Divide by the group max; an all-zero group stays all zeros."""
    covs = list(coverages)
    if not covs:
        raise ValueError("group must be nonempty")
    zeros = [0] * len(covs)
    norms, _ = _kernel.group_rewards(covs, zeros, zeros, 0.0)
    return norms


def wcr_reward(correct: int, valid: int, g_norm: float,
               alpha: float = DEFAULT_ALPHA) -> float:
    """Scalar reward law for one rollout."""
    if correct:
        return 1.0
    if valid:
        return alpha * g_norm
    return 0.0


def binary_reward(correct) -> list:
    """Correctness-only rewards (the unshaped baseline)."""
    return [1.0 if c else 0.0 for c in correct]


def advantages(rewards, epsilon: float = DEFAULT_EPSILON) -> list:
    """Group-relative advantages for arbitrary reward vectors."""
    rews = list(rewards)
    if not rews:
        raise ValueError("group must be nonempty")
    adv, _, _ = _kernel.advantage_stats(rews, epsilon)
    return adv


def proposer_reward(correct) -> float:
    """1 - mean solver correctness: high when the group mostly fails."""
    flags = list(correct)
    if not flags:
        raise ValueError("group must be nonempty")
    return _kernel.proposer_reward_value(flags)


def score_group(waypoints, trajectories, *, correct_answer: str | None = None,
                correctness=None, config: RewardConfig | None = None) -> GroupResult:
    """Score one rollout group end to end.

    correctness, when given, supplies external 0/1 flags; otherwise each
    rollout's final answer is compared against correct_answer.
    """
    config = config or RewardConfig()
    wps = _check_waypoints(waypoints)
    trajs = [
        t if isinstance(t, Trajectory) else parse_trajectory(str(t))
        for t in trajectories
    ]
    if not trajs:
        raise ValueError("group must be nonempty")

    if correctness is not None:
        correct = [1 if c else 0 for c in correctness]
        if len(correct) != len(trajs):
            raise ValueError("correctness length must match the group size")
    elif correct_answer is not None:
        correct = [
            1 if answers_match(t.final_answer, correct_answer) else 0
            for t in trajs
        ]
    else:
        raise ValueError("need correct_answer or external correctness flags")
    valid = [1 if t.valid else 0 for t in trajs]

    patterns = [_transform(w, config) for w in wps]
    covs = []
    matched = []
    for t in trajs:
        mask = _kernel.match_mask(_transform(t.think_text, config), patterns)
        covs.append(sum(mask) / len(wps))
        matched.append(tuple(w for w, hit in zip(wps, mask) if hit))

    norms, rewards = _kernel.group_rewards(covs, correct, valid, config.alpha)
    advs, mu, sigma = _kernel.advantage_stats(rewards, config.epsilon)
    prop = _kernel.proposer_reward_value(correct)
    return GroupResult(
        coverages=tuple(covs),
        coverage_norms=tuple(norms),
        matched=tuple(matched),
        correct=tuple(correct),
        valid=tuple(valid),
        rewards=tuple(rewards),
        advantages=tuple(advs),
        mu=mu,
        sigma=sigma,
        proposer_reward=prop,
    )
