"""Continuous problems of Atkinson type and their exact discrete reduction.

On ``a = a_0 < b_0 < a_1 < ... < a_N < b_N = b`` the coefficient ``P^-1``
vanishes on each ``[a_i, b_i]`` while ``Q`` and ``W`` vanish on each gap
``[b_{j-1}, a_j]``.  Solutions are then piecewise constant, and only the
integrals over the pieces matter:

    What_i  = int_{a_i}^{b_i} W,       Qhat_i = int_{a_i}^{b_i} Q,   0 <= i <= N
    Pinvhat_j = int_{b_{j-1}}^{a_j} P^-1,                          1 <= j <= N

The reduced discrete equation has ``N + 1`` interior points.  Unknown ``u_i``
(``-1 <= i <= N + 1``) is stored at discrete index ``i + 1``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import numkernel as nk
from .classify import SKA
from .errors import EmptyK, NotHermitian, NotPositiveDefinite, ValidationError
from .numkernel import DEFAULT_TOL, InertiaSignature, Tolerances
from .problem import BoundaryChart, BoundaryCondition, BoundaryRaw, SLEquation, as_raw, chart_to_raw
from .spectrum import Spectrum, eigenvalues


def _blocks(mats, count: int, d: int | None, name: str) -> np.ndarray:
    arr = np.array(mats, dtype=np.complex128)
    if arr.ndim == 1 and d in (None, 1):
        arr = arr.reshape(-1, 1, 1)
    if arr.ndim != 3 or arr.shape[0] != count or arr.shape[1] != arr.shape[2]:
        raise ValidationError(f"{name} must hold {count} square matrices, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValidationError(f"{name} has non-finite entries")
    return arr


@dataclass(frozen=True, eq=False)
class AtkinsonProblem:
    partition: np.ndarray
    What: np.ndarray
    Qhat: np.ndarray
    Pinvhat: np.ndarray
    tol: Tolerances = field(default=DEFAULT_TOL, repr=False)

    def __post_init__(self):
        What = np.array(self.What, dtype=np.complex128)
        count = What.shape[0] if What.ndim >= 1 else 0
        N = count - 1
        if N < 2:
            raise ValidationError(f"need N >= 2 (N + 1 >= 3 weight blocks), got N={N}")
        What = _blocks(What, N + 1, None, "What")
        d = What.shape[1]
        object.__setattr__(self, "What", What)
        object.__setattr__(self, "Qhat", _blocks(self.Qhat, N + 1, d, "Qhat"))
        object.__setattr__(self, "Pinvhat", _blocks(self.Pinvhat, N, d, "Pinvhat"))
        part = np.asarray(self.partition, dtype=float)
        if part.shape != (2 * N + 2,):
            raise ValidationError(f"partition needs {2 * N + 2} nodes a_0, b_0, ..., a_N, b_N; got {part.size}")
        if not np.all(np.isfinite(part)) or np.any(np.diff(part) <= 0):
            raise ValidationError("partition must be strictly increasing")
        object.__setattr__(self, "partition", part)
        for i, m in enumerate(self.What):
            if not nk.is_positive_definite(m, self.tol):
                raise NotPositiveDefinite(f"What_{i} not positive definite")
        for i, m in enumerate(self.Qhat):
            if not nk.is_hermitian(m, self.tol):
                raise NotHermitian(f"Qhat_{i} not Hermitian")
        for j, m in enumerate(self.Pinvhat, start=1):
            if not nk.is_hermitian(m, self.tol):
                raise NotHermitian(f"Pinvhat_{j} not Hermitian")
            if nk.num_rank(m, self.tol) < d:
                raise ValidationError(f"Pinvhat_{j} not invertible")

    @property
    def d(self) -> int:
        return self.What.shape[1]

    @property
    def N(self) -> int:
        return self.What.shape[0] - 1

    def replace(self, **changes) -> "AtkinsonProblem":
        data = dict(partition=self.partition, What=self.What, Qhat=self.Qhat,
                    Pinvhat=self.Pinvhat, tol=self.tol)
        data.update(changes)
        return AtkinsonProblem(**data)


def _integrate(pieces, length: float, name: str) -> np.ndarray:
    """``pieces`` is a constant matrix or a list of ``(sub_length, matrix)``."""
    if isinstance(pieces, (list, tuple)) and pieces and isinstance(pieces[0], tuple):
        total = sum(float(h) for h, _ in pieces)
        if abs(total - length) > 1e-12 * max(1.0, length):
            raise ValidationError(f"{name}: piece lengths sum to {total}, interval has {length}")
        return sum(float(h) * nk.as_cmatrix(m) for h, m in pieces)
    return length * nk.as_cmatrix(pieces)


def piecewise_constant(partition: Sequence[float], W, Q, Pinv, tol: Tolerances = DEFAULT_TOL) -> AtkinsonProblem:
    """Integrate piecewise-constant coefficients exactly.

    ``W[i]`` and ``Q[i]`` live on ``[a_i, b_i]``, ``Pinv[j - 1]`` on
    ``[b_{j-1}, a_j]``.  Each entry is either one matrix or a list of
    ``(sub_length, matrix)`` pieces covering the interval.
    """
    part = np.asarray(partition, dtype=float)
    N = len(W) - 1
    if part.shape != (2 * N + 2,):
        raise ValidationError(f"partition needs {2 * N + 2} nodes, got {part.size}")
    a, b = part[0::2], part[1::2]
    What = [_integrate(W[i], b[i] - a[i], f"W_{i}") for i in range(N + 1)]
    Qhat = [_integrate(Q[i], b[i] - a[i], f"Q_{i}") for i in range(N + 1)]
    Pinvhat = [_integrate(Pinv[j - 1], a[j] - b[j - 1], f"Pinv_{j}") for j in range(1, N + 1)]
    return AtkinsonProblem(part, What, Qhat, Pinvhat, tol=tol)


def to_discrete(ap: AtkinsonProblem) -> SLEquation:
    """Equivalent discrete equation with ``N + 1`` interior points; its
    ``P^-1`` sequence is ``(I, Pinvhat_1, ..., Pinvhat_N, I)``."""
    eye = np.eye(ap.d, dtype=np.complex128)[None]
    Pinv = np.concatenate([eye, ap.Pinvhat, eye])
    return SLEquation(Pinv, ap.Qhat, ap.What, tol=ap.tol)


def bc_transform(bc: BoundaryCondition) -> BoundaryRaw:
    """``[A | B]`` acts on ``(-u_0, u_N, Delta u_-1, Delta u_N)``; the
    returned ``[(A_1, A_2) | (B_1 - A_1, B_2)]`` is the same condition on the
    standard discrete boundary vector ``(-u_-1, u_N, Delta u_-1, Delta u_N)``."""
    raw = as_raw(bc)
    B = np.hstack([raw.B1 - raw.A1, raw.B2])
    return BoundaryRaw(raw.A, B, tol=raw.tol)


def atkinson_count(bc: BoundaryCondition, ap: AtkinsonProblem, tol: Tolerances | None = None) -> int:
    tol = tol or ap.tol
    return (ap.N - 1) * ap.d + nk.num_rank(as_raw(bc).B, tol)


def atkinson_spectrum(ap: AtkinsonProblem, bc: BoundaryCondition, tol: Tolerances | None = None) -> Spectrum:
    tol = tol or ap.tol
    return eigenvalues(to_discrete(ap), bc_transform(bc), tol)


@dataclass(frozen=True)
class AtkinsonSignature:
    K: tuple
    inertia: InertiaSignature
    layer: int

    def to_json(self, classifier=None) -> dict:
        out = {"K": list(self.K), "layer": self.layer, "inertia": self.inertia.as_list()}
        if classifier is not None:
            out["classifier"] = classifier
        return out


def atkinson_layer(bc: BoundaryCondition, tol: Tolerances = DEFAULT_TOL) -> int:
    """``r0(B)``; the count is ``(N + 1) d`` minus this."""
    B = as_raw(bc).B
    return B.shape[0] - nk.num_rank(B, tol)


def atkinson_classify(chart: BoundaryChart, tol: Tolerances | None = None) -> AtkinsonSignature:
    tol = tol or chart.tol
    if not chart.K:
        raise EmptyK("K is empty: every eigenvalue is continuous on this chart")
    sig = nk.inertia(SKA(chart), tol)
    return AtkinsonSignature(chart.K, sig, atkinson_layer(chart_to_raw(chart), tol))
