"""Run a jump experiment for every admissible (area, singular point) pair.

Boundary space covers every index set at the chosen d, equation space uses
K = {1..d} charts, Atkinson type a few index sets per d.  Prints one line per
experiment and a tally per space; exits 1 if anything disagrees.

    python3 scripts/jump_sweep.py --d 2 --N 3 --seed 3
"""
import argparse
import sys
import time

import numpy as np

from discrete_sl import numkernel as nk
from discrete_sl.atkinson import AtkinsonProblem
from discrete_sl.classify import SKD, admissible_areas, predict_jump
from discrete_sl.errors import NumericalError
from discrete_sl.numkernel import InertiaSignature
from discrete_sl.perturb import jump_experiment, make_atkinson_path, make_bc_path, make_eq_path
from discrete_sl.problem import BoundaryChart, all_index_sets, random_chart, random_equation


def singular_signatures(order):
    return [InertiaSignature(m, z, order - m - z)
            for m in range(order + 1) for z in range(1, order + 1 - m)]


def chart_at(rng, eq, K, sig):
    """Chart in K whose boundary classifier has inertia ``sig`` (it is affine in S)."""
    d = eq.d
    chart = random_chart(rng, d, K)
    offset = SKD(eq, chart.with_S(np.zeros((2 * d, 2 * d))))
    idx = list(range(d)) + [k - 1 for k in chart.K2]
    S = chart.S.copy()
    S[np.ix_(idx, idx)] = nk.hermitian_with_inertia(rng, sig) - offset
    return chart.with_S(nk.herm_part(S))


def attempt(make_path, prediction):
    try:
        report = jump_experiment(make_path(), prediction)
    except NumericalError as exc:
        return False, type(exc).__name__
    return report.passed, f"down {report.n_down} up {report.n_up}"


def sweep_bc(rng, d, N):
    for K in all_index_sets(d):
        eq = random_equation(rng, d, N)
        order = d + sum(k > d for k in K)
        for sig in singular_signatures(order):
            chart = chart_at(rng, eq, K, sig)
            for target in admissible_areas(sig):
                ok, info = attempt(lambda: make_bc_path(eq, chart, target), predict_jump(target, sig, "bc"))
                yield ok, f"bc K={K} {sig.as_list()} <- {target.as_list()}: {info}"


def sweep_eq(rng, d, N):
    K = tuple(range(1, d + 1))
    for sig in singular_signatures(d):
        eq = random_equation(rng, d, N)
        S = nk.random_hermitian(rng, 2 * d)
        S[:d, :d] = eq.Pinv[0] - nk.hermitian_with_inertia(rng, sig)
        chart = BoundaryChart(K, nk.herm_part(S))
        for target in admissible_areas(sig):
            ok, info = attempt(lambda: make_eq_path(eq, chart, target), predict_jump(target, sig, "eq"))
            yield ok, f"eq {sig.as_list()} <- {target.as_list()}: {info}"


def sweep_atkinson(rng, d, N):
    ap = AtkinsonProblem(np.arange(2 * N + 2.0),
                         [nk.random_positive_definite(rng, d) for _ in range(N + 1)],
                         [nk.random_hermitian(rng, d) for _ in range(N + 1)],
                         [nk.random_positive_definite(rng, d) for _ in range(N)])
    for K in [k for k in all_index_sets(d) if k][:: max(1, 2 ** (2 * d) // 4)]:
        for sig in singular_signatures(len(K)):
            S = nk.random_hermitian(rng, 2 * d)
            idx = [k - 1 for k in K]
            S[np.ix_(idx, idx)] = nk.hermitian_with_inertia(rng, sig)
            chart = BoundaryChart(K, nk.herm_part(S))
            for target in admissible_areas(sig):
                ok, info = attempt(lambda: make_atkinson_path(ap, chart, target),
                                   predict_jump(target, sig, "atkinson"))
                yield ok, f"atkinson K={K} {sig.as_list()} <- {target.as_list()}: {info}"


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--d", type=int, default=2)
    parser.add_argument("--N", type=int, default=3)
    parser.add_argument("--seed", type=int, default=3)
    parser.add_argument("--spaces", nargs="+", default=["bc", "eq", "atkinson"],
                        choices=["bc", "eq", "atkinson"])
    args = parser.parse_args(argv)
    rng = np.random.default_rng(args.seed)
    sweeps = {"bc": sweep_bc, "eq": sweep_eq, "atkinson": sweep_atkinson}
    failures = 0
    for space in args.spaces:
        start, total, bad = time.perf_counter(), 0, 0
        for ok, line in sweeps[space](rng, args.d, args.N):
            total += 1
            bad += not ok
            print(("PASS " if ok else "FAIL ") + line)
        print(f"# {space}: {total - bad}/{total} agree ({time.perf_counter() - start:.1f} s)")
        failures += bad
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
