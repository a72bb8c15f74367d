"""Knowledge-graph grounded question construction and group reward scoring.

Subpackages cover the full desk-scale loop: loading entity/relation
dumps (kg), walking out target paths with distractor branches
(extraction), rendering selector prompts and querying a chooser
(selector), parsing tagged rollout transcripts (trajectory), scoring
groups with coverage-shaped rewards (reward), dataset filtering and
statistics (pipeline), synthetic end-to-end simulation (harness), and a
CLI tying it together (cli).
"""

from ._kernel import BACKEND_NAME as kernel_backend
from .reward import (
    CoverageResult,
    GroupResult,
    RewardConfig,
    advantages,
    answers_match,
    binary_reward,
    coverage,
    normalize_group,
    proposer_reward,
    score_group,
    wcr_reward,
)
from .trajectory import Trajectory, parse_trajectory

__version__ = "0.1.0"

__all__ = [
    "CoverageResult",
    "GroupResult",
    "RewardConfig",
    "Trajectory",
    "advantages",
    "answers_match",
    "binary_reward",
    "coverage",
    "kernel_backend",
    "normalize_group",
    "parse_trajectory",
    "proposer_reward",
    "score_group",
    "wcr_reward",
    "__version__",
]
