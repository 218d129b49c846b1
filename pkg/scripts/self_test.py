"""Random self-test: determinant route vs pencil route vs rank count.

    python3 scripts/self_test.py --count 100 --seed 0 --d 1 2 3 --N 2 6

Prints a summary line per (d, N) bucket and the worst scaled disagreement.
"""
import argparse
import sys
from collections import defaultdict

import numpy as np

from discrete_sl.problem import random_chart, random_equation
from discrete_sl.spectrum import count_formula, eigenvalues, pencil_oracle


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--count", type=int, default=100)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--d", type=int, nargs="+", default=[1, 2, 3])
    parser.add_argument("--N", type=int, nargs=2, default=[2, 6], metavar=("MIN", "MAX"))
    args = parser.parse_args(argv)
    rng = np.random.default_rng(args.seed)
    buckets = defaultdict(lambda: [0, 0, 0.0])  # runs, failures, worst error
    for _ in range(args.count):
        d = int(rng.choice(args.d))
        N = int(rng.integers(args.N[0], args.N[1] + 1))
        eq, chart = random_equation(rng, d, N), random_chart(rng, d)
        a, b = eigenvalues(eq, chart), pencil_oracle(eq, chart)
        err = float(np.max(np.abs(a.flat() - b.flat()) / (1 + np.abs(a.flat())))) if a.total else 0.0
        ok = a.mults.tolist() == b.mults.tolist() and a.total == count_formula(eq, chart) and err <= 1e-8
        row = buckets[(d, N)]
        row[0] += 1
        row[1] += not ok
        row[2] = max(row[2], err)
    failed = 0
    for (d, N), (runs, bad, worst) in sorted(buckets.items()):
        print(f"d={d} N={N}: {runs - bad}/{runs} agree, worst scaled error {worst:.1e}")
        failed += bad
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main())
