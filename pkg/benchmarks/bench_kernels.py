#!/usr/bin/env python3
"""Benchmark the compiled kernel path against the pure-numpy fallback.

Spawns one child process per path (the path is fixed at import time by the
LTLQ_DISABLE_NUMBA environment variable), runs the same seeded training on
the shipped gridworld instance, and reports wall time plus a checksum of the
learned Q table. The two paths execute the same code, so the checksums must
match exactly.

Usage: python benchmarks/bench_kernels.py [--episodes N] [--seed S]
"""

import argparse
import hashlib
import json
import os
import subprocess
import sys


def run_child(args) -> None:
    import time
    import importlib.resources as ir

    from ltlq.accel import NUMBA_ENABLED
    from ltlq.config import load_config
    from ltlq.learn import LearnConfig, ProductEnv, run_learning
    from ltlq.reward import RewardScheme

    cfg = load_config(ir.files("ltlq") / "assets" / "safe_absorb.cfg")
    env = ProductEnv(cfg.load_product())
    scheme = RewardScheme(gamma=0.99999, gamma_b=0.99)
    learn_cfg = LearnConfig(
        episodes=args.episodes, horizon=100, start="random", seed=args.seed
    )

    if NUMBA_ENABLED:
        # compile outside the timed region
        warmup = LearnConfig(episodes=1, horizon=1, start="random", seed=args.seed)
        run_learning(env, scheme, warmup)

    t0 = time.perf_counter()
    table, _ = run_learning(env, scheme, learn_cfg)
    elapsed = time.perf_counter() - t0
    digest = hashlib.sha256(table.values.tobytes()).hexdigest()
    print(json.dumps({"numba": NUMBA_ENABLED, "seconds": elapsed, "sha256": digest}))


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--episodes", type=int, default=20_000)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--child", action="store_true", help=argparse.SUPPRESS)
    args = parser.parse_args()

    if args.child:
        run_child(args)
        return 0

    results = {}
    for disable in (False, True):
        env = dict(os.environ)
        env.pop("LTLQ_DISABLE_NUMBA", None)
        if disable:
            env["LTLQ_DISABLE_NUMBA"] = "1"
        out = subprocess.run(
            [
                sys.executable,
                os.path.abspath(__file__),
                "--child",
                "--episodes",
                str(args.episodes),
                "--seed",
                str(args.seed),
            ],
            env=env,
            capture_output=True,
            text=True,
            check=True,
        )
        info = json.loads(out.stdout.strip().splitlines()[-1])
        results["numba" if info["numba"] else "numpy"] = info

    for name, info in results.items():
        print(f"{name:>6}: {info['seconds']:8.3f} s  sha256 {info['sha256'][:16]}...")
    if results["numba"]["sha256"] != results["numpy"]["sha256"]:
        print("MISMATCH: the two paths produced different Q tables", file=sys.stderr)
        return 1
    speedup = results["numpy"]["seconds"] / results["numba"]["seconds"]
    print(f"speedup: {speedup:.1f}x (identical results)")
    return 0


if __name__ == "__main__":
    sys.exit(main())
