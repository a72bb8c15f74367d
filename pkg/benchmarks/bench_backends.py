"""Compare the compiled scoring kernel against the pure-Python mirror.

Run from the repository root:

    python3 benchmarks/bench_backends.py [--groups 2000] [--group-size 8]

Both backends are loaded directly (no env juggling) and driven with the
same pre-generated workload, so the numbers differ only by backend.
"""

import argparse
import random
import statistics
import time

from kgquest._kernel import _fallback

try:
    from kgquest._kernel import _speed
except ImportError:
    _speed = None


def build_workload(groups, group_size, n_waypoints, seed=0):
    rng = random.Random(seed)
    titles = [f"Waypoint Entity {i:03d}" for i in range(32)]
    work = []
    for _ in range(groups):
        waypoints = rng.sample(titles, n_waypoints)
        texts = []
        correct = []
        valid = []
        for _ in range(group_size):
            mentioned = [w for w in waypoints if rng.random() < 0.5]
            filler = " ".join(rng.choice(titles) for _ in range(30))
            texts.append(" then ".join(mentioned) + " " + filler)
            correct.append(1 if rng.random() < 0.3 else 0)
            valid.append(1 if rng.random() < 0.9 else 0)
        work.append((waypoints, texts, correct, valid))
    return work


def run_backend(backend, work, alpha=0.3, epsilon=1e-6):
    checksum = 0.0
    start = time.perf_counter()
    for waypoints, texts, correct, valid in work:
        covs = []
        for text in texts:
            mask = backend.match_mask(text, waypoints)
            covs.append(sum(mask) / len(waypoints))
        norms, rewards = backend.group_rewards(covs, correct, valid, alpha)
        advs, mu, sigma = backend.advantage_stats(rewards, epsilon)
        checksum += mu + sigma + backend.proposer_reward_value(correct) + advs[0]
    return time.perf_counter() - start, checksum


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--groups", type=int, default=2000)
    parser.add_argument("--group-size", type=int, default=8)
    parser.add_argument("--waypoints", type=int, default=6)
    parser.add_argument("--repeats", type=int, default=5)
    args = parser.parse_args()

    work = build_workload(args.groups, args.group_size, args.waypoints)
    rollouts = args.groups * args.group_size
    print(
        f"workload: {args.groups} groups x {args.group_size} rollouts, "
        f"{args.waypoints} waypoints each"
    )

    backends = [("python", _fallback)]
    if _speed is not None:
        backends.insert(0, ("c", _speed))
    else:
        print("compiled backend not built; benchmarking the fallback only")

    results = {}
    for name, backend in backends:
        times = []
        checksum = None
        for _ in range(args.repeats):
            elapsed, checksum = run_backend(backend, work)
            times.append(elapsed)
        best = min(times)
        results[name] = (best, checksum)
        print(
            f"  {name:>6}: best {best * 1e3:8.2f} ms "
            f"({rollouts / best:12.0f} rollouts/s, "
            f"median {statistics.median(times) * 1e3:.2f} ms)"
        )

    if len(results) == 2:
        c_time, c_sum = results["c"]
        py_time, py_sum = results["python"]
        print(f"  speedup: {py_time / c_time:.1f}x")
        match = "bitwise-identical" if c_sum == py_sum else "DIVERGED"
        print(f"  checksums: {match} ({c_sum!r})")


if __name__ == "__main__":
    main()
