"""Timing comparison of the numba and numpy kernel backends.

Runs the exhaustive scan and the greedy solver on identical seeded
instances under each backend and prints a small table. JIT compilation is
excluded by a warmup call per kernel. Results must agree bit for bit
between backends; this script asserts that while timing.

Usage: python benchmarks/bench_backends.py [--k-brute 11] [--k-greedy 18] [--trials 5]
"""

from __future__ import annotations

import argparse
import time

from dcalloc import (RateCalcCounter, ScenarioParams, available_backends,
                     make_instance, set_backend, solve_brute_force, solve_proposed)


def time_solver(fn, tables, repeats: int) -> float:
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        for table in tables:
            fn(table)
        best = min(best, time.perf_counter() - t0)
    return best


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--k-brute", type=int, default=11)
    ap.add_argument("--k-greedy", type=int, default=18)
    ap.add_argument("--trials", type=int, default=5)
    ap.add_argument("--repeats", type=int, default=3)
    args = ap.parse_args()

    def tables_for(k):
        out = []
        for t in range(args.trials):
            params = ScenarioParams(num_ue=k, seed=10_000 + 97 * t)
            out.append(make_instance(params)[1])
        return out

    brute_tables = tables_for(args.k_brute)
    greedy_tables = tables_for(args.k_greedy)

    def run_brute(table):
        return solve_brute_force(table, RateCalcCounter())

    def run_greedy(table):
        return solve_proposed(table, RateCalcCounter())

    rows = []
    reference = {}
    for backend in available_backends():
        set_backend(backend)
        # warm up any JIT work outside the timed region
        run_brute(brute_tables[0])
        run_greedy(greedy_tables[0])

        brute_vals = [run_brute(t).sum_rate for t in brute_tables]
        greedy_vals = [run_greedy(t).sum_rate for t in greedy_tables]
        if reference:
            assert brute_vals == reference["brute"], "backends disagree on brute force"
            assert greedy_vals == reference["greedy"], "backends disagree on greedy"
        else:
            reference = {"brute": brute_vals, "greedy": greedy_vals}

        t_brute = time_solver(run_brute, brute_tables, args.repeats)
        t_greedy = time_solver(run_greedy, greedy_tables, args.repeats)
        rows.append((backend, t_brute, t_greedy))

    print(f"{args.trials} instances per cell, best of {args.repeats} repeats")
    print(f"{'backend':<8} {'brute K=' + str(args.k_brute):>16} {'greedy K=' + str(args.k_greedy):>16}")
    for backend, tb, tg in rows:
        print(f"{backend:<8} {tb:>14.4f}s {tg:>14.4f}s")
    if len(rows) == 2:
        print(f"{'speedup':<8} {rows[1][1] / rows[0][1]:>14.1f}x {rows[1][2] / rows[0][2]:>14.1f}x")


if __name__ == "__main__":
    main()
