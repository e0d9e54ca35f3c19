#!/usr/bin/env python3
"""Counter sweeps for the covering solvers: phases, enforcements and weight
growth against their analytic caps, across sizes and accuracies.

Emits one JSON line per run; pipe to jq or a notebook for plots.
"""
import argparse
import json
import math
import sys

import numpy as np

from pclp.generate import random_covering
from pclp.streaming import StreamCursor, StreamMode, solve_stream
from pclp.whack_static import solve_fast, total_rounds, weight_cap


def main() -> int:
    ap = argparse.ArgumentParser()
    ap.add_argument("--sizes", type=int, nargs="+", default=[10, 25, 50, 100])
    ap.add_argument("--eps", type=float, nargs="+", default=[0.05, 0.1, 0.2])
    ap.add_argument("--trials", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    rng = np.random.default_rng(args.seed)
    for size in args.sizes:
        for eps in args.eps:
            for trial in range(args.trials):
                inst = random_covering(rng, size, size, eps=eps,
                                       density=float(rng.uniform(0.1, 0.6)),
                                       hot_column=trial % 2 == 0)
                outcome, stats = solve_fast(inst)
                cursor = StreamCursor.from_instance(inst, StreamMode.PRIMAL_ONLY)
                _, sstats = solve_stream(cursor, eps)
                cap = math.ceil(weight_cap(size, eps) / -math.log(1 - eps / 2)) + 1
                print(json.dumps({
                    "m": size, "n": size, "eps": eps, "trial": trial,
                    "outcome": outcome.tag.value,
                    "phases": stats.phases, "phase_cap": cap,
                    "enforcements": stats.enforcements,
                    "whacks": stats.whacks,
                    "round_budget": total_rounds(inst.lam, size, eps),
                    "weight_ratio": round(stats.max_weight_ratio, 6),
                    "stream_passes": sstats.passes,
                }))
    return 0


if __name__ == "__main__":
    sys.exit(main())
