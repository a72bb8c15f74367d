"""The compiled kernel and its pure-Python mirror must agree bitwise."""

import os
import random
import subprocess
import sys

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kgquest._kernel import _fallback

speed = pytest.importorskip(
    "kgquest._kernel._speed", reason="compiled backend not built"
)


def random_group(rng, max_g=8, max_w=6):
    g = rng.randint(1, max_g)
    n_w = rng.randint(1, max_w)
    words = ["Node %02d" % i for i in range(16)]
    waypoints = rng.sample(words, n_w)
    texts = [
        " ".join(rng.choice(words) for _ in range(rng.randint(0, 12)))
        for _ in range(g)
    ]
    correct = [rng.randint(0, 1) for _ in range(g)]
    valid = [rng.randint(0, 1) for _ in range(g)]
    return waypoints, texts, correct, valid


class TestBackendSelection:
    def test_default_prefers_compiled(self):
        from kgquest import _kernel

        assert _kernel.BACKEND_NAME in ("c", "python")

    def test_env_forces_fallback(self):
        code = (
            "from kgquest import _kernel; print(_kernel.BACKEND_NAME)"
        )
        env = dict(os.environ, KGQUEST_PURE_PYTHON="1")
        out = subprocess.run(
            [sys.executable, "-c", code], env=env, capture_output=True, text=True
        )
        assert out.stdout.strip() == "python"

    def test_backend_names(self):
        assert speed.BACKEND_NAME == "c"
        assert _fallback.BACKEND_NAME == "python"


class TestBitwiseParity:
    def test_match_mask_random(self):
        rng = random.Random(11)
        for _ in range(500):
            waypoints, texts, _, _ = random_group(rng)
            for text in texts:
                assert speed.match_mask(text, waypoints) == _fallback.match_mask(
                    text, waypoints
                )

    def test_match_mask_agrees_with_python_in(self):
        rng = random.Random(12)
        for _ in range(300):
            waypoints, texts, _, _ = random_group(rng)
            for text in texts:
                want = [1 if w in text else 0 for w in waypoints]
                assert list(speed.match_mask(text, waypoints)) == want

    def test_empty_needle_matches_everywhere(self):
        # mirrors Python's "" in s
        assert speed.match_mask("abc", [""]) == _fallback.match_mask("abc", [""])
        assert list(speed.match_mask("", [""])) == [1]

    def test_multibyte_utf8(self):
        texts = ["Zürich Mitte", "中文路线", "café stop", ""]
        needles = ["Zürich", "中文", "café", "é s", "missing"]
        for t in texts:
            a = speed.match_mask(t, needles)
            b = _fallback.match_mask(t, needles)
            want = [1 if n in t else 0 for n in needles]
            assert list(a) == list(b) == want

    def test_group_rewards_bitwise(self):
        rng = random.Random(13)
        for _ in range(2000):
            g = rng.randint(1, 8)
            covs = [rng.random() if rng.random() > 0.2 else 0.0 for _ in range(g)]
            correct = [rng.randint(0, 1) for _ in range(g)]
            valid = [rng.randint(0, 1) for _ in range(g)]
            alpha = rng.uniform(0.05, 0.95)
            a = speed.group_rewards(covs, correct, valid, alpha)
            b = _fallback.group_rewards(covs, correct, valid, alpha)
            assert a == b

    def test_advantage_stats_bitwise(self):
        rng = random.Random(14)
        for _ in range(2000):
            g = rng.randint(1, 8)
            rewards = [rng.uniform(-5, 5) for _ in range(g)]
            eps = rng.choice([1e-6, 1e-4, 1.0])
            a = speed.advantage_stats(rewards, eps)
            b = _fallback.advantage_stats(rewards, eps)
            assert a == b

    def test_proposer_bitwise(self):
        rng = random.Random(15)
        for _ in range(500):
            g = rng.randint(1, 8)
            correct = [rng.randint(0, 1) for _ in range(g)]
            assert speed.proposer_reward_value(correct) == _fallback.proposer_reward_value(
                correct
            )


@given(
    st.lists(st.floats(-100, 100), min_size=1, max_size=8),
    st.floats(1e-9, 1.0),
)
@settings(max_examples=500, deadline=None)
def test_advantage_stats_parity_property(rewards, eps):
    assert speed.advantage_stats(rewards, eps) == _fallback.advantage_stats(rewards, eps)


@given(
    st.text(max_size=80),
    st.lists(st.text(min_size=0, max_size=12), min_size=1, max_size=6),
)
@settings(max_examples=500, deadline=None)
def test_match_mask_parity_property(text, needles):
    a = speed.match_mask(text, needles)
    b = _fallback.match_mask(text, needles)
    want = [1 if n in text else 0 for n in needles]
    assert list(a) == list(b) == want


def test_full_pipeline_parity_through_scoring():
    """score_group under each backend, compared bit-for-bit."""
    code = r"""
import json, random, sys
from kgquest.reward import score_group

rng = random.Random(99)
rows = []
for _ in range(100):
    n_w = rng.randint(1, 5)
    wps = ["Site %02d" % i for i in range(n_w)]
    g = rng.randint(1, 6)
    trajs = []
    for _ in range(g):
        mention = " ".join(w for w in wps if rng.random() < 0.6)
        answer = "right" if rng.random() < 0.3 else "wrong"
        trajs.append(f"<think>{mention}</think><answer>{answer}</answer>")
    res = score_group(wps, trajs, correct_answer="right")
    rows.append([res.rewards, res.advantages, res.mu, res.sigma, res.proposer_reward])
print(json.dumps(rows), end="")
"""
    runs = {}
    for name, flag in (("c", "0"), ("python", "1")):
        env = dict(os.environ, KGQUEST_PURE_PYTHON=flag)
        out = subprocess.run(
            [sys.executable, "-c", code], env=env, capture_output=True, text=True
        )
        assert out.returncode == 0, out.stderr
        runs[name] = out.stdout
    assert runs["c"] == runs["python"]
