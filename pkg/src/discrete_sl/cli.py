"""Command-line front end.

Exit codes: 0 success, 1 a jump experiment or self-test reported FAIL,
2 invalid input, 3 a numerical self-check failed.
"""
from __future__ import annotations

import argparse
import sys

import numpy as np

from . import numkernel as nk
from .atkinson import atkinson_classify, atkinson_spectrum, bc_transform, to_discrete
from .classify import SKA, SKD, T_matrix, bc_signature, eq_signature, predict_jump
from .errors import CountChangedAlongPath, NumericalError, ValidationError
from .io import (
    atkinson_from_json,
    dumps,
    jumpspec_from_json,
    load_json,
    matrix_to_json,
    problem_from_json,
    problem_to_json,
    tracespec_from_json,
)
from .numkernel import DEFAULT_TOL, Tolerances
from .perturb import (
    BranchTrace,
    jump_experiment,
    make_atkinson_path,
    make_bc_path,
    make_eq_path,
)
from .problem import BoundaryChart, all_index_sets, as_raw, canonicalize, random_chart, random_equation
from .spectrum import count_formula, eigenvalues, pencil_oracle


def _tolerances(args) -> Tolerances:
    return Tolerances(
        herm_tol=args.herm_tol if args.herm_tol is not None else DEFAULT_TOL.herm_tol,
        rank_tol=args.rank_tol if args.rank_tol is not None else DEFAULT_TOL.rank_tol,
        root_cluster_tol=args.root_tol if args.root_tol is not None else DEFAULT_TOL.root_cluster_tol,
        divergence_threshold=(args.div_threshold if args.div_threshold is not None
                              else DEFAULT_TOL.divergence_threshold),
    )


def _as_chart(bc) -> BoundaryChart:
    return bc if isinstance(bc, BoundaryChart) else canonicalize(bc)


def _need_input(args):
    if not args.input:
        raise ValidationError(f"{args.command} needs an input file")
    return load_json(args.input)


def cmd_spectrum(args, tol):
    eq, bc = problem_from_json(_need_input(args), tol)
    spec = eigenvalues(eq, bc, tol)
    return spec.to_csv() if args.format == "csv" else dumps(spec.to_json()), 0


def cmd_count(args, tol):
    eq, bc = problem_from_json(_need_input(args), tol)
    return f"{count_formula(eq, bc, tol)}\n", 0


def cmd_classify_bc(args, tol):
    eq, bc = problem_from_json(_need_input(args), tol)
    chart = _as_chart(bc)
    sig = bc_signature(eq, chart, tol)
    return dumps(sig.to_json(matrix_to_json(SKD(eq, chart)))), 0


def cmd_classify_eq(args, tol):
    eq, bc = problem_from_json(_need_input(args), tol)
    chart = _as_chart(bc)
    sig = eq_signature(eq, chart, tol)
    return dumps(sig.to_json(matrix_to_json(T_matrix(eq, chart, tol)))), 0


def cmd_classify_atkinson(args, tol):
    _, bc = atkinson_from_json(_need_input(args), tol)
    if bc is None:
        raise ValidationError("the Atkinson file has no 'bc' entry")
    chart = _as_chart(bc)
    sig = atkinson_classify(chart, tol)
    return dumps(sig.to_json(matrix_to_json(SKA(chart)))), 0


def _monotone_flag(trace: BranchTrace) -> list[str]:
    up, down = trace.nondecreasing(), trace.nonincreasing()
    return ["constant" if u and d else "nondecreasing" if u else "nonincreasing" if d else ""
            for u, d in zip(up, down)]


def cmd_trace(args, tol):
    spec = tracespec_from_json(_need_input(args), tol)
    spectra = [eigenvalues(*spec.at(t), tol) for t in spec.ts]
    totals = {s.total for s in spectra}
    if len(totals) != 1:
        raise CountChangedAlongPath(f"eigenvalue count varies along the line: {sorted(totals)}")
    values = np.array([s.flat() for s in spectra]).reshape(len(spec.ts), totals.pop())
    trace = BranchTrace(spec.ts, spectra, values)
    trace.flags = _monotone_flag(trace)
    return trace.to_csv(), 0


def cmd_jump(args, tol):
    spec = jumpspec_from_json(_need_input(args), tol)
    if spec.space == "bc":
        path = make_bc_path(spec.eq, spec.chart, spec.target, spec.t_max, spec.steps, tol)
        sig_to = nk.inertia(SKD(spec.eq, spec.chart), tol)
    elif spec.space == "eq":
        path = make_eq_path(spec.eq, spec.chart, spec.target, spec.t_max, spec.steps, tol)
        sig_to = nk.inertia(T_matrix(spec.eq, spec.chart, tol), tol)
    else:
        path = make_atkinson_path(spec.atkinson, spec.chart, spec.target, spec.t_max, spec.steps, tol)
        sig_to = nk.inertia(SKA(spec.chart), tol)
    report = jump_experiment(path, predict_jump(spec.target, sig_to, spec.space), tol)
    text = report.trace.to_csv() if args.format == "csv" else dumps(report.to_json())
    return text, 0 if report.passed else 1


def cmd_atkinson_convert(args, tol):
    ap, bc = atkinson_from_json(_need_input(args), tol)
    if bc is None:
        raise ValidationError("the Atkinson file has no 'bc' entry")
    if args.format == "csv":
        return atkinson_spectrum(ap, bc, tol).to_csv(), 0
    return dumps(problem_to_json(to_discrete(ap), bc_transform(bc))), 0


def _self_test(rng: np.random.Generator, count: int, tol: Tolerances) -> list[dict]:
    rows = []
    for k in range(count):
        d = int(rng.integers(1, 3))
        N = int(rng.integers(2, 5))
        eq = random_equation(rng, d, N)
        sets = all_index_sets(d)
        chart = random_chart(rng, d, sets[rng.integers(len(sets))])
        raw = as_raw(chart)
        n = count_formula(eq, raw, tol)
        spec = eigenvalues(eq, raw, tol)
        oracle = pencil_oracle(eq, raw, tol)
        agree = ([m for _, m in spec.pairs()] == [m for _, m in oracle.pairs()]
                 and bool(np.all(np.abs(spec.flat() - oracle.flat()) <= 1e-8 * (1 + np.abs(spec.flat())))))
        rows.append({"case": k, "d": d, "N": N, "K": list(chart.K), "count": n,
                     "total": spec.total, "oracle_agrees": agree,
                     "status": "PASS" if agree and spec.total == n else "FAIL"})
    return rows


def cmd_validate(args, tol):
    if args.random:
        rows = _self_test(np.random.default_rng(args.seed), args.random, tol)
        ok = all(r["status"] == "PASS" for r in rows)
        return dumps({"status": "PASS" if ok else "FAIL", "cases": rows}), 0 if ok else 1
    doc = _need_input(args)
    kind = args.kind
    if kind is None:
        kind = ("jump" if "space" in doc else "trace" if "direction" in doc
                else "atkinson" if "What" in doc else "problem")
    loader = {"problem": problem_from_json, "atkinson": atkinson_from_json,
              "jump": jumpspec_from_json, "trace": tracespec_from_json}[kind]
    loader(doc, tol)
    return dumps({"status": "valid", "kind": kind}), 0


COMMANDS = {
    "spectrum": (cmd_spectrum, "eigenvalues with multiplicities"),
    "count": (cmd_count, "number of eigenvalues from the rank formula"),
    "classify-bc": (cmd_classify_bc, "layer and area of the boundary condition"),
    "classify-eq": (cmd_classify_eq, "layer and area of the equation (nondegenerate chart)"),
    "classify-atkinson": (cmd_classify_atkinson, "layer and area for an Atkinson-type problem"),
    "trace": (cmd_trace, "eigenvalue branches along a line, CSV"),
    "jump": (cmd_jump, "approach a singular point and compare with the predicted jumps"),
    "atkinson-convert": (cmd_atkinson_convert, "reduce an Atkinson-type problem to a discrete one"),
    "validate": (cmd_validate, "schema-check a file, or run a random self-test with --random"),
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="write the result here instead of stdout")
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--rank-tol", type=float)
    common.add_argument("--root-tol", type=float)
    common.add_argument("--div-threshold", type=float)
    common.add_argument("--herm-tol", type=float)
    common.add_argument("--seed", type=int, default=0)

    parser = argparse.ArgumentParser(prog="discrete-sl", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name, (_, help_text) in COMMANDS.items():
        p = sub.add_parser(name, parents=[common], help=help_text)
        p.add_argument("input", nargs="?" if name == "validate" else None)
        if name == "validate":
            p.add_argument("--kind", choices=("problem", "atkinson", "jump", "trace"))
            p.add_argument("--random", type=int, default=0, metavar="COUNT")
    return parser


def run(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        tol = _tolerances(args)
        text, code = COMMANDS[args.command][0](args, tol)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except NumericalError as exc:
        print(f"numerical failure ({type(exc).__name__}): {exc}", file=sys.stderr)
        return 3
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
