"""Pure-Python mirror of the C scoring kernel.

Every loop matches wcrkernel.c operation for operation (left-to-right
sums, same divisions, math.sqrt == libm sqrt under IEEE-754), so results
are bit-identical to the compiled backend, not merely close.
"""

import math

BACKEND_NAME = "python"


def match_mask(text, patterns):
    """Return [pattern in text, ...] as a list of bool."""
    return [p in text for p in patterns]


def group_rewards(coverage, correct, valid, alpha):
    """Normalize coverage by the group max and apply the reward law."""
    g_max = 0.0
    for g in coverage:
        if g > g_max:
            g_max = g
    norms = []
    rewards = []
    for g, c, z in zip(coverage, correct, valid):
        norm = g / g_max if g_max > 0.0 else 0.0
        norms.append(norm)
        if c:
            rewards.append(1.0)
        elif z:
            rewards.append(alpha * norm)
        else:
            rewards.append(0.0)
    return norms, rewards


def advantage_stats(rewards, epsilon):
    """Return (advantages, mean, population std) for one reward group.

    Rewards are centered on the first element before the moment
    computations; an exact shift of the inputs then yields bit-identical
    advantages (the naive form loses that across binades).
    """
    n = len(rewards)
    base = rewards[0]
    s = 0.0
    for r in rewards:
        s += r
    ds = 0.0
    for r in rewards:
        ds += r - base
    mean_d = ds / n
    ss = 0.0
    for r in rewards:
        dev = (r - base) - mean_d
        ss += dev * dev
    sigma = math.sqrt(ss / n)
    denom = sigma + epsilon
    adv = [((r - base) - mean_d) / denom for r in rewards]
    return adv, s / n, sigma


def proposer_reward_value(correct):
    """1 - mean(correct) over the group."""
    n = len(correct)
    s = 0.0
    for c in correct:
        s += 1 if c else 0
    return 1.0 - s / n
