"""Hermitian classifiers of singular points and the jump counts they predict.

Eigenvalues can only escape to infinity where the number of eigenvalues
drops.  Three matrices detect that:

* ``SKD`` when the boundary condition moves and the equation is fixed;
* ``T_matrix`` when the equation moves and the chart is fixed;
* ``SKA`` for the Atkinson-type problem.

Each space splits into *layers* (fixed eigenvalue count) and *areas*
(fixed inertia of the classifier).  Both are recorded in the signature types.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np

from . import numkernel as nk
from .errors import (
    DegenerateBoundaryCondition,
    EmptyK,
    IncompatibleSignatures,
    P0NotPositiveDefinite,
    ValidationError,
)
from .numkernel import DEFAULT_TOL, InertiaSignature, Tolerances
from .problem import BoundaryChart, BoundaryCondition, SLEquation
from .spectrum import D_matrix

__all__ = [
    "BCAreaSignature", "EqAreaSignature", "JumpPrediction", "D_matrix", "F_matrix",
    "SKD", "SKA", "T_matrix", "nondegenerate", "bc_layer", "bc_signature",
    "eq_signature", "predict_jump", "admissible_areas",
]

SPACES = ("bc", "eq", "atkinson")


@dataclass(frozen=True)
class BCAreaSignature:
    K: tuple
    inertia: InertiaSignature
    layer: int

    def to_json(self, classifier=None) -> dict:
        out = {"K": list(self.K), "layer": self.layer, "inertia": self.inertia.as_list()}
        if classifier is not None:
            out["classifier"] = classifier
        return out


@dataclass(frozen=True)
class EqAreaSignature:
    inertia: InertiaSignature
    layer: int

    def to_json(self, classifier=None) -> dict:
        out = {"layer": self.layer, "inertia": self.inertia.as_list()}
        if classifier is not None:
            out["classifier"] = classifier
        return out


@dataclass(frozen=True)
class JumpPrediction:
    """How many eigenvalues run to -inf / +inf when approaching a singular point.

    The survivors converge to the eigenvalues at the singular point with
    their index shifted down by ``index_shift``.
    """

    n_down: int
    n_up: int
    index_shift: int

    @property
    def n_lost(self) -> int:
        return self.n_down + self.n_up


Signature = Union[InertiaSignature, BCAreaSignature, EqAreaSignature]


def F_matrix(eq: SLEquation, bc: BoundaryCondition) -> np.ndarray:
    """Same block as ``D_matrix``; named separately for the equation space."""
    return D_matrix(eq, bc)


def _require_p0_definite(eq: SLEquation):
    if not nk.is_positive_definite(eq.Pinv[0], eq.tol):
        raise P0NotPositiveDefinite("P_0^-1 must be positive definite")


def SKD(eq: SLEquation, chart: BoundaryChart) -> np.ndarray:
    """Classifier of the boundary-condition space, order ``d + #K_2``."""
    _require_p0_definite(eq)
    if chart.d != eq.d:
        raise ValidationError(f"chart has d={chart.d}, equation has d={eq.d}")
    d = eq.d
    eye = np.eye(d)
    E1 = chart.E.E1
    P0inv = eq.Pinv[0]
    G = ((E1 - eye) @ P0inv + E1) @ np.linalg.inv(E1 @ P0inv + eye - E1)
    top = chart.S1 + G
    if chart.r == 0:
        return top
    E0 = chart.E0
    S2E0 = chart.S2 @ E0
    return np.block([
        [top, S2E0],
        [S2E0.conj().T, E0.T @ chart.S3 @ E0],
    ])


def bc_layer(eq: SLEquation, bc: BoundaryCondition, tol: Tolerances | None = None) -> int:
    """``r0(D)``: the count is ``Nd`` minus this."""
    tol = tol or eq.tol
    return 2 * eq.d - nk.num_rank(D_matrix(eq, bc), tol)


def bc_signature(eq: SLEquation, chart: BoundaryChart, tol: Tolerances | None = None) -> BCAreaSignature:
    tol = tol or eq.tol
    sig = nk.inertia(SKD(eq, chart), tol)
    return BCAreaSignature(chart.K, sig, bc_layer(eq, chart, tol))


def _R(chart: BoundaryChart) -> np.ndarray:
    E1 = chart.E.E1
    return chart.S1 @ E1 + E1 - np.eye(chart.d)


def _invertible(m, tol: Tolerances) -> bool:
    if m.size == 0:
        return True
    return nk.num_rank(m, tol) == m.shape[0]


def _T2(chart: BoundaryChart, Rinv) -> np.ndarray:
    E0 = chart.E0
    S2 = chart.S2
    return E0.T @ (S2.conj().T @ chart.E.E1 @ Rinv @ S2 - chart.S3) @ E0


def nondegenerate(chart: BoundaryChart, tol: Tolerances | None = None) -> bool:
    tol = tol or chart.tol
    R = _R(chart)
    if not _invertible(R, tol):
        return False
    if chart.r == 0:
        return True
    return _invertible(_T2(chart, np.linalg.inv(R)), tol)


def T_matrix(eq: SLEquation, chart: BoundaryChart, tol: Tolerances | None = None) -> np.ndarray:
    """Classifier of the equation space for a fixed nondegenerate chart, order ``d``."""
    tol = tol or eq.tol
    if chart.d != eq.d:
        raise ValidationError(f"chart has d={chart.d}, equation has d={eq.d}")
    if not nondegenerate(chart, tol):
        raise DegenerateBoundaryCondition(f"chart K={chart.K} fails the nondegeneracy condition")
    eye = np.eye(eq.d)
    E1 = chart.E.E1
    Rinv = np.linalg.inv(_R(chart))
    T = eq.Pinv[0] + Rinv @ (chart.S1 @ (eye - E1) + E1)
    if chart.r:
        T1 = Rinv @ chart.S2 @ chart.E0
        T = T - T1 @ np.linalg.solve(_T2(chart, Rinv), T1.conj().T)
    return T


def eq_signature(eq: SLEquation, chart: BoundaryChart, tol: Tolerances | None = None) -> EqAreaSignature:
    tol = tol or eq.tol
    sig = nk.inertia(T_matrix(eq, chart, tol), tol)
    return EqAreaSignature(sig, 2 * eq.d - nk.num_rank(F_matrix(eq, chart), tol))


def SKA(chart: BoundaryChart) -> np.ndarray:
    """Principal submatrix of ``S`` on the indices in ``K``."""
    if not chart.K:
        raise EmptyK("the Atkinson classifier needs a nonempty K")
    idx = [k - 1 for k in chart.K]
    return chart.S[np.ix_(idx, idx)]


def _inertia_of(sig: Signature) -> InertiaSignature:
    if isinstance(sig, InertiaSignature):
        return sig
    if isinstance(sig, (BCAreaSignature, EqAreaSignature)):
        return sig.inertia
    try:
        r_minus, r_zero, r_plus = (int(v) for v in sig)
    except (TypeError, ValueError) as exc:
        raise IncompatibleSignatures(f"not a signature: {sig!r}") from exc
    return InertiaSignature(r_minus, r_zero, r_plus)


def predict_jump(sig_from: Signature, sig_to: Signature, space: str) -> JumpPrediction:
    """Jump counts when an area with ``sig_from`` approaches a point with ``sig_to``.

    In the boundary-condition and Atkinson spaces lost positive directions
    send eigenvalues to -inf; in the equation space the roles are reversed.
    """
    if space not in SPACES:
        raise ValidationError(f"space must be one of {SPACES}, got {space!r}")
    a, b = _inertia_of(sig_from), _inertia_of(sig_to)
    if min(a.as_list() + b.as_list()) < 0:
        raise IncompatibleSignatures("negative entry in a signature")
    if a.order != b.order:
        raise IncompatibleSignatures(f"orders differ: {a} vs {b}")
    if b.r_zero <= a.r_zero:
        raise IncompatibleSignatures(f"target {b} is not in an upper layer of {a}")
    if a.r_plus < b.r_plus or a.r_minus < b.r_minus:
        raise IncompatibleSignatures(f"{a} cannot degenerate to {b}")
    lost_plus, lost_minus = a.r_plus - b.r_plus, a.r_minus - b.r_minus
    if space == "eq":
        down, up = lost_minus, lost_plus
    else:
        down, up = lost_plus, lost_minus
    return JumpPrediction(down, up, down)


def admissible_areas(sig_to: Signature) -> list[InertiaSignature]:
    """Every area signature that can degenerate to ``sig_to``."""
    b = _inertia_of(sig_to)
    out = []
    for r_zero in range(b.r_zero):
        spare = b.r_zero - r_zero
        for extra_plus in range(spare + 1):
            out.append(InertiaSignature(b.r_minus + spare - extra_plus, r_zero, b.r_plus + extra_plus))
    return out
