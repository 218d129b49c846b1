"""Eigenvalue branches along one-parameter families.

Covers first-order sensitivities of a simple eigenvalue, paths that leave a
singular point into a chosen area, and the jump experiment.  The experiment
walks a path toward its singular endpoint and sorts every branch into one
of three outcomes: escaping down, escaping up, or converging to an
endpoint eigenvalue.
"""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import numkernel as nk
from .atkinson import AtkinsonProblem, bc_transform, to_discrete
from .classify import JumpPrediction, SKA, SKD, T_matrix, predict_jump
from .errors import CountChangedAlongPath, Inconclusive, LostInvertibility, NotHermitian
from .numkernel import DEFAULT_TOL, InertiaSignature, Tolerances
from .problem import BoundaryChart, BoundaryCondition, SLEquation, chart_to_raw
from .spectrum import EigenFunction, Spectrum, eigenfunction, eigenvalues

T_MAX = 0.25
K_STEPS = 20
MONOTONE_STEPS = 5
CONVERGENCE_REL = 1e-4


# -- derivative formulas ------------------------------------------------------

def _blocks_or_zero(mats, count: int, d: int) -> np.ndarray:
    if mats is None:
        return np.zeros((count, d, d), dtype=np.complex128)
    arr = np.array(mats, dtype=np.complex128).reshape(count, d, d)
    for m in arr:
        if not nk.is_hermitian(m):
            raise NotHermitian("perturbation direction must be Hermitian")
    return arr


def _quad(v, m) -> float:
    return float(np.real(np.vdot(v, m @ v)))


def d_lambda_eq(eq: SLEquation, bc: BoundaryCondition, lambda_star: float,
                H=None, Kdir=None, Ldir=None, tol: Tolerances | None = None) -> float:
    """Derivative of a simple eigenvalue in the equation direction
    ``(P^-1 + tH, Q + tK, W + tL)`` at ``t = 0``.  ``H`` has ``N + 1`` blocks;
    ``H_N`` does not enter (``P_N`` only rescales ``y_{N+1}``)."""
    tol = tol or eq.tol
    N, d = eq.N, eq.d
    H = _blocks_or_zero(H, N + 1, d)
    Kdir = _blocks_or_zero(Kdir, N, d)
    Ldir = _blocks_or_zero(Ldir, N, d)
    ef = eigenfunction(eq, bc, lambda_star, tol)
    y, x = ef.y, ef.x
    out = -sum(_quad(x[i], H[i]) for i in range(N))
    out += sum(_quad(y[i], Kdir[i - 1]) for i in range(1, N + 1))
    out -= ef.lam * sum(_quad(y[i], Ldir[i - 1]) for i in range(1, N + 1))
    return out


def d_lambda_bc(eq: SLEquation, chart: BoundaryChart, lambda_star: float, H,
                tol: Tolerances | None = None) -> float:
    """Derivative along ``S + tH`` in the chart of ``chart``."""
    tol = tol or eq.tol
    H = nk.check_hermitian(H, tol, "H")
    ef = eigenfunction(eq, chart_to_raw(chart), lambda_star, tol)
    v = chart.E.top @ ef.Y
    return _quad(v, H)


def atkinson_boundary_vector(ef: EigenFunction) -> np.ndarray:
    """``(-u_0, u_N, Delta u_-1, Delta u_N)`` from a reduced eigenfunction
    (``u_i`` stored at discrete index ``i + 1``)."""
    y = ef.y
    n = ef.eq.N
    return np.concatenate([-y[1], y[n], y[1] - y[0], y[n + 1] - y[n]])


def d_lambda_bc_atkinson(eq_transformed: SLEquation, chart: BoundaryChart, lambda_star: float, H,
                         tol: Tolerances | None = None) -> float:
    """As :func:`d_lambda_bc` for an Atkinson problem; ``chart`` describes the
    original condition and ``eq_transformed`` the reduced equation."""
    tol = tol or eq_transformed.tol
    H = nk.check_hermitian(H, tol, "H")
    ef = eigenfunction(eq_transformed, bc_transform(chart), lambda_star, tol)
    v = chart.E.top @ atkinson_boundary_vector(ef)
    return _quad(v, H)


def boundary_form(y: EigenFunction, z: EigenFunction) -> tuple[complex, complex]:
    """Both sides of the boundary identity for eigenfunctions of two
    equations sharing one boundary condition (``z`` may come from the other)."""
    xy, xz = y.x, z.x
    N = y.eq.N
    left = np.vdot(xz[0], y.y[0]) - np.vdot(z.y[0], xy[0])
    right = np.vdot(xz[N], y.y[N]) - np.vdot(z.y[N], xy[N])
    return complex(left), complex(right)


# -- paths --------------------------------------------------------------------

Problem = tuple[SLEquation, BoundaryCondition]


@dataclass
class ParamPath:
    """``t -> (equation, boundary condition)`` sampled on ``t_max * 2^-k``;
    ``t = 0`` is the singular endpoint."""

    generator: Callable[[float], Problem]
    t_max: float = T_MAX
    steps: int = K_STEPS
    signature: Callable[[float], InertiaSignature] | None = None
    samples: np.ndarray | None = None

    @property
    def ts(self) -> np.ndarray:
        if self.samples is not None:
            return np.asarray(self.samples, dtype=float)
        return self.t_max * 2.0 ** -np.arange(self.steps + 1)

    def at(self, t: float) -> Problem:
        return self.generator(float(t))

    def endpoint(self) -> Problem:
        return self.generator(0.0)


def _kernel_split(classifier, sig_to: InertiaSignature, target: InertiaSignature, tol: Tolerances):
    """Kernel eigenvectors of the classifier, split into the columns that get
    ``+t`` and those that get ``-t``."""
    w, V = nk.herm_eig(classifier, tol)
    tau = nk.spectral_threshold(np.max(np.abs(w)) if w.size else 0.0, tol)
    kernel = V[:, np.abs(w) <= tau]
    n_plus = target.r_plus - sig_to.r_plus
    n_minus = target.r_minus - sig_to.r_minus
    return kernel[:, :n_plus], kernel[:, n_plus:n_plus + n_minus]


def _kernel_bump(plus, minus, t: float) -> np.ndarray:
    return t * (plus @ plus.conj().T - minus @ minus.conj().T)


def _shift_S(chart: BoundaryChart, idx, bump) -> BoundaryChart:
    S = chart.S.copy()
    S[np.ix_(idx, idx)] += bump
    return chart.with_S(nk.herm_part(S))


def make_bc_path(eq: SLEquation, chart_at_singular: BoundaryChart, target: InertiaSignature,
                 t_max: float = T_MAX, steps: int = K_STEPS, tol: Tolerances | None = None) -> ParamPath:
    """Leave the chart's point into the area ``target`` of ``S_K^D`` by moving
    ``S`` on the indices ``{1..d} u K_2`` along kernel directions."""
    tol = tol or eq.tol
    chart = chart_at_singular
    sig_to = nk.inertia(SKD(eq, chart), tol)
    predict_jump(target, sig_to, "bc")
    plus, minus = _kernel_split(SKD(eq, chart), sig_to, target, tol)
    idx = list(range(eq.d)) + [k - 1 for k in chart.K2]

    def gen(t):
        return eq, _shift_S(chart, idx, _kernel_bump(plus, minus, t))

    return ParamPath(gen, t_max, steps, signature=lambda t: nk.inertia(SKD(*gen(t)), tol))


def make_atkinson_path(ap: AtkinsonProblem, chart_at_singular: BoundaryChart, target: InertiaSignature,
                       t_max: float = T_MAX, steps: int = K_STEPS, tol: Tolerances | None = None) -> ParamPath:
    """Same construction with ``S_K^A``: ``S`` moves on the indices in ``K``.
    Problems along the path are the reduced discrete ones."""
    tol = tol or ap.tol
    chart = chart_at_singular
    classifier = SKA(chart)
    sig_to = nk.inertia(classifier, tol)
    predict_jump(target, sig_to, "atkinson")
    plus, minus = _kernel_split(classifier, sig_to, target, tol)
    idx = [k - 1 for k in chart.K]
    eq = to_discrete(ap)

    def moved(t):
        return _shift_S(chart, idx, _kernel_bump(plus, minus, t))

    return ParamPath(lambda t: (eq, bc_transform(chart_to_raw(moved(t)))), t_max, steps,
                     signature=lambda t: nk.inertia(SKA(moved(t)), tol))


def make_eq_path(eq_at_singular: SLEquation, chart: BoundaryChart, target: InertiaSignature,
                 t_max: float = T_MAX, steps: int = K_STEPS, tol: Tolerances | None = None) -> ParamPath:
    """Move ``P_0^-1`` along kernel directions of ``T``; ``T`` shifts by the same amount."""
    eq = eq_at_singular
    tol = tol or eq.tol
    T = T_matrix(eq, chart, tol)
    sig_to = nk.inertia(T, tol)
    predict_jump(target, sig_to, "eq")
    plus, minus = _kernel_split(T, sig_to, target, tol)

    def gen(t):
        Pinv = eq.Pinv.copy()
        Pinv[0] = nk.herm_part(Pinv[0] + _kernel_bump(plus, minus, t))
        if nk.num_rank(Pinv[0], tol) < eq.d:
            raise LostInvertibility(f"P_0^-1 singular at t={t!r}")
        return eq.replace(Pinv=Pinv), chart

    path = ParamPath(gen, t_max, steps, signature=lambda t: nk.inertia(T_matrix(*gen(t), tol), tol))
    for t in path.ts:
        gen(t)
    return path


# -- tracing ------------------------------------------------------------------

@dataclass
class BranchTrace:
    """``values[k, n]`` is ``lambda_{n+1}`` at ``ts[k]``."""

    ts: np.ndarray
    spectra: list
    values: np.ndarray
    flags: list = field(default_factory=list)

    def _ordered(self):
        order = np.argsort(self.ts)
        return self.ts[order], self.values[order]

    def nondecreasing(self, slack: float = 1e-9) -> np.ndarray:
        """Per-branch flag: non-decreasing as ``t`` increases."""
        _, v = self._ordered()
        return np.all(np.diff(v, axis=0) >= -slack * (1 + np.abs(v[1:])), axis=0)

    def nonincreasing(self, slack: float = 1e-9) -> np.ndarray:
        _, v = self._ordered()
        return np.all(np.diff(v, axis=0) <= slack * (1 + np.abs(v[1:])), axis=0)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["t", "n", "lambda", "flag"])
        for n in range(self.values.shape[1]):
            flag = self.flags[n] if self.flags else ""
            for t, v in zip(self.ts, self.values[:, n]):
                w.writerow([repr(float(t)), n + 1, repr(float(v)), flag])
        return buf.getvalue()


def branch_trace(path: ParamPath, tol: Tolerances = DEFAULT_TOL) -> BranchTrace:
    ts = path.ts
    spectra = [eigenvalues(*path.at(t), tol) for t in ts]
    counts = {s.total for s in spectra}
    if len(counts) != 1:
        bad = [(float(t), s.total) for t, s in zip(ts, spectra)]
        raise CountChangedAlongPath(f"eigenvalue count varies along the path: {bad}")
    values = np.array([s.flat() for s in spectra]).reshape(len(ts), counts.pop())
    return BranchTrace(ts, spectra, values)


# -- jump experiment ----------------------------------------------------------

@dataclass
class JumpReport:
    prediction: JumpPrediction
    n_down: int
    n_up: int
    index_shift: int | None
    trace: BranchTrace
    endpoint: Spectrum

    @property
    def passed(self) -> bool:
        p = self.prediction
        return (self.n_down, self.n_up, self.index_shift) == (p.n_down, p.n_up, p.index_shift)

    def to_json(self) -> dict:
        p = self.prediction
        return {
            "status": "PASS" if self.passed else "FAIL",
            "predicted": {"n_down": p.n_down, "n_up": p.n_up, "index_shift": p.index_shift},
            "observed": {"n_down": self.n_down, "n_up": self.n_up, "index_shift": self.index_shift},
            "endpoint": self.endpoint.to_json(),
            "branches": [
                {"n": n + 1, "flag": self.trace.flags[n], "t_min": float(self.trace.ts[-1]),
                 "lambda": float(self.trace.values[-1, n])}
                for n in range(self.trace.values.shape[1])
            ],
        }


def _escapes(series: np.ndarray, threshold: float, sign: int) -> bool:
    tail = series[-(MONOTONE_STEPS + 1):]
    return bool(sign * series[-1] > threshold and np.all(sign * np.diff(tail) > 0))


def jump_experiment(path: ParamPath, prediction: JumpPrediction, tol: Tolerances = DEFAULT_TOL) -> JumpReport:
    """Classify each branch on the ladder (``t`` decreasing toward 0).

    Escaping: past ``divergence_threshold`` and strictly monotone over the last
    five steps.  Converging: the remaining branches, in order, end within
    ``1e-4 (1 + |mu|)`` of the endpoint eigenvalues ``mu``.
    """
    trace = branch_trace(path, tol)
    endpoint = eigenvalues(*path.endpoint(), tol)
    thr = tol.divergence_threshold
    vals = trace.values
    n_total = vals.shape[1]
    flags = []
    for n in range(n_total):
        if _escapes(vals[:, n], thr, -1):
            flags.append("down")
        elif _escapes(vals[:, n], thr, +1):
            flags.append("up")
        else:
            flags.append("")
    middle = [n for n in range(n_total) if not flags[n]]
    target = endpoint.flat()
    if len(middle) != target.size:
        raise Inconclusive(
            f"{len(middle)} branches stay bounded but the endpoint has {target.size} eigenvalues")
    for j, n in enumerate(middle):
        if abs(vals[-1, n] - target[j]) > CONVERGENCE_REL * (1 + abs(target[j])):
            raise Inconclusive(f"branch {n + 1} neither escapes nor reaches {target[j]!r} "
                               f"(last value {vals[-1, n]!r})")
        flags[n] = f"to:{j + 1}"
    shifts = {n - j for j, n in enumerate(middle)}
    n_down = flags.count("down")
    shift = shifts.pop() if len(shifts) == 1 else (n_down if not middle else None)
    trace.flags = flags
    return JumpReport(prediction, n_down, flags.count("up"), shift, trace, endpoint)
