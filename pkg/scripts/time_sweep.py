#!/usr/bin/env python3
"""Energy-vs-time-limit study over the twelve archetypes.

Each archetype is solved `--runs` times per time limit; per (instance,
limit) cell the mean, std, sigma-bar deviation metric and min/max of the
run energies are reported, plus a CSV for plotting. Defaults mirror the
benchmark protocol: 10 runs at 5, 10, 30 and 60 seconds. Pass --unit to
run the sweep in deterministic iteration budgets (unit, 2*unit, 6*unit,
12*unit) instead of wall-clock limits.

Usage:
    python scripts/time_sweep.py --out sweep.csv --runs 10
    python scripts/time_sweep.py --out sweep.csv --unit 30   # iteration mode
"""

import argparse
import sys
from pathlib import Path

from binpack3d import SolverConfig, archetypes, generate, run_stats, solve_heuristic


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default="sweep.csv")
    parser.add_argument("--runs", type=int, default=10)
    parser.add_argument("--limits", type=float, nargs="+", default=[5, 10, 30, 60])
    parser.add_argument("--unit", type=int, default=None,
                        help="iteration budgets unit,2u,6u,12u instead of seconds")
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    rows = []
    print(f"{'instance':<10} {'limit':>7} {'mean':>10} {'std':>10} "
          f"{'sigma_bar':>10} {'min':>10} {'max':>10}")
    for row, spec in enumerate(archetypes(), start=1):
        instance = generate(spec)
        name = f"archetype_{row:02d}"
        if args.unit:
            budgets = [args.unit, 2 * args.unit, 6 * args.unit, 12 * args.unit]
            per_budget = [[] for _ in budgets]
            for run in range(args.runs):
                result = solve_heuristic(
                    instance,
                    SolverConfig(iterations=budgets[-1], seed=args.seed + run),
                    checkpoints=budgets)
                (log,) = result.checkpoint_runs
                for idx, energy in enumerate(log):
                    per_budget[idx].append(energy)
            cells = list(zip(budgets, per_budget))
        else:
            cells = []
            for limit in args.limits:
                config = SolverConfig(time_limit=limit, seed=args.seed,
                                      runs=args.runs)
                result = solve_heuristic(instance, config)
                cells.append((limit, list(result.run_log)))
        for limit, energies in cells:
            if not energies:
                continue
            st = run_stats(energies)
            rows.append((name, limit, float(st.mean), st.std,
                         float(st.sigma_bar), float(st.minimum), float(st.maximum)))
            print(f"{name:<10} {limit:>7} {float(st.mean):>10.4f} {st.std:>10.4f} "
                  f"{float(st.sigma_bar):>10.4f} {float(st.minimum):>10.4f} "
                  f"{float(st.maximum):>10.4f}")

    header = "instance,time_limit,mean,std,sigma_bar,min,max"
    lines = [header] + [",".join(str(v) for v in row) for row in rows]
    Path(args.out).write_text("\n".join(lines) + "\n", encoding="utf-8")
    print(f"wrote {args.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
