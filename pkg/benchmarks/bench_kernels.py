"""Compare the jitted and pure-numpy dynamic-programming kernels.

Usage: python3 benchmarks/bench_kernels.py [--sizes 20,50,100] [--repeats 5]

Runs plain and entropy-regularised value iteration on seeded random
instances through both kernel paths and prints a timing table.  The two
paths must agree to solver tolerance; the benchmark asserts that too.
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from starclab import random_mdp, random_reward
from starclab._kernels import (
    _soft_value_iteration_loop,
    _soft_value_iteration_numpy,
    _value_iteration_loop,
    _value_iteration_numpy,
)
from starclab.mdp import expected_reward


def _time(fn, args, repeats):
    fn(*args)  # warm-up (includes jit compilation where applicable)
    best = np.inf
    for _ in range(repeats):
        start = time.perf_counter()
        out = fn(*args)
        best = min(best, time.perf_counter() - start)
    return best, out


def main() -> None:
    parser = argparse.ArgumentParser()
    parser.add_argument("--sizes", default="20,50,100")
    parser.add_argument("--repeats", type=int, default=5)
    parser.add_argument("--actions", type=int, default=5)
    args = parser.parse_args()
    sizes = [int(s) for s in args.sizes.split(",")]

    print(f"{'kernel':<12} {'S':>5} {'A':>3} {'numpy (s)':>12} {'numba (s)':>12} {'speedup':>9}")
    for n_states in sizes:
        mdp = random_mdp(0, n_states, args.actions, discount=0.95)
        er = expected_reward(mdp, random_reward(1, n_states, args.actions))
        for label, fn_np, fn_nb, extra in (
            ("value-iter", _value_iteration_numpy, _value_iteration_loop, ()),
            ("soft-vi", _soft_value_iteration_numpy, _soft_value_iteration_loop, (1.0,)),
        ):
            call_args = (er, mdp.transition, mdp.discount, *extra, 1e-10, 100_000)
            t_np, (v_np, _, _) = _time(fn_np, call_args, args.repeats)
            t_nb, (v_nb, _, _) = _time(fn_nb, call_args, args.repeats)
            assert np.abs(v_np - v_nb).max() < 1e-8, "kernel paths disagree"
            print(
                f"{label:<12} {n_states:>5} {args.actions:>3} "
                f"{t_np:>12.5f} {t_nb:>12.5f} {t_np / t_nb:>8.2f}x"
            )


if __name__ == "__main__":
    main()
