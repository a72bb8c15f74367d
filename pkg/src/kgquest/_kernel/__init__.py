"""Scoring kernel backend selection.

Prefers the compiled extension; falls back to the pure-Python mirror when
the extension is missing (source checkout without a build) or when
KGQUEST_PURE_PYTHON is set to a non-empty value. Both backends are
bit-identical by construction; test_backends.py asserts it.
"""

import os

if os.environ.get("KGQUEST_PURE_PYTHON"):
    from ._fallback import (
        BACKEND_NAME,
        advantage_stats,
        group_rewards,
        match_mask,
        proposer_reward_value,
    )
else:
    try:
        from ._speed import (
            BACKEND_NAME,
            advantage_stats,
            group_rewards,
            match_mask,
            proposer_reward_value,
        )
    except ImportError:
        from ._fallback import (
            BACKEND_NAME,
            advantage_stats,
            group_rewards,
            match_mask,
            proposer_reward_value,
        )

__all__ = [
    "BACKEND_NAME",
    "advantage_stats",
    "group_rewards",
    "match_mask",
    "proposer_reward_value",
]
