"""Discrete Sturm-Liouville equations and self-adjoint boundary conditions.

The equation is

    -nabla(P_i Delta y_i) + Q_i y_i = lambda W_i y_i,   1 <= i <= N,

with ``d x d`` Hermitian coefficients, stored as ``Pinv = (P_0^-1 .. P_N^-1)``,
``Q = (Q_1 .. Q_N)`` and ``W = (W_1 .. W_N)`` (Python index ``i - 1`` for the
latter two).  A boundary condition is a pair ``(A, B)`` of ``2d x 2d``
matrices acting on ``(-y_0, y_N)`` and ``(P_0 Delta y_0, P_N Delta y_N)``;
it is only defined up to left multiplication by an invertible matrix, and
every class has a chart representative ``(S | I) E_K`` with ``S`` Hermitian.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence, Union

import numpy as np

from . import numkernel as nk
from .errors import (
    IndexOutOfRange,
    InconsistentProbabilities,
    InvalidBoundaryCondition,
    NoChartFound,
    NonPositiveCoefficient,
    NotHermitian,
    NotPositiveDefinite,
    ValidationError,
)
from .numkernel import DEFAULT_TOL, Tolerances


def _stack(mats, d: int | None, count: int, name: str) -> np.ndarray:
    arr = np.array(mats, dtype=np.complex128)
    if arr.ndim == 1 and d in (None, 1):
        arr = arr.reshape(-1, 1, 1)
    if arr.ndim != 3 or arr.shape[0] != count or arr.shape[1] != arr.shape[2]:
        raise ValidationError(f"{name} must hold {count} square matrices, got shape {arr.shape}")
    if d is not None and arr.shape[1] != d:
        raise ValidationError(f"{name} blocks must be {d}x{d}, got {arr.shape[1]}x{arr.shape[2]}")
    if not np.all(np.isfinite(arr)):
        raise ValidationError(f"{name} has non-finite entries")
    return arr


@dataclass(frozen=True, eq=False)
class SLEquation:
    """A point ``(P^-1, Q, W)`` of the space of discrete equations."""

    Pinv: np.ndarray
    Q: np.ndarray
    W: np.ndarray
    tol: Tolerances = field(default=DEFAULT_TOL, repr=False)

    def __post_init__(self):
        W = np.array(self.W, dtype=np.complex128)
        N = W.shape[0] if W.ndim >= 1 else 0
        if N < 2:
            raise ValidationError(f"need N >= 2 interior points, got N={N}")
        d = W.shape[1] if W.ndim == 3 else 1
        object.__setattr__(self, "Pinv", _stack(self.Pinv, d, N + 1, "Pinv"))
        object.__setattr__(self, "Q", _stack(self.Q, d, N, "Q"))
        object.__setattr__(self, "W", _stack(W, d, N, "W"))
        self.validate()

    @property
    def d(self) -> int:
        return self.W.shape[1]

    @property
    def N(self) -> int:
        return self.W.shape[0]

    def validate(self):
        tol = self.tol
        for j, m in enumerate(self.Pinv):
            if not nk.is_hermitian(m, tol):
                raise NotHermitian(f"Pinv_{j} not Hermitian")
            if nk.num_rank(m, tol) < self.d:
                raise ValidationError(f"Pinv_{j} not invertible")
        for i, m in enumerate(self.Q, start=1):
            if not nk.is_hermitian(m, tol):
                raise NotHermitian(f"Q_{i} not Hermitian")
        for i, m in enumerate(self.W, start=1):
            if not nk.is_hermitian(m, tol):
                raise NotHermitian(f"W_{i} not Hermitian")
            if not nk.is_positive_definite(m, tol):
                raise NotPositiveDefinite(f"W_{i} not positive definite")

    @cached_property
    def P(self) -> np.ndarray:
        """The coefficients ``P_0 .. P_N`` themselves."""
        return np.array([np.linalg.inv(m) for m in self.Pinv])

    def replace(self, Pinv=None, Q=None, W=None) -> "SLEquation":
        return SLEquation(
            self.Pinv if Pinv is None else Pinv,
            self.Q if Q is None else Q,
            self.W if W is None else W,
            tol=self.tol,
        )

    def perturbed(self, H=None, K=None, L=None, t: float = 1.0) -> "SLEquation":
        """``(P^-1 + tH, Q + tK, W + tL)``; missing directions count as zero."""
        Pinv = self.Pinv + t * np.asarray(H) if H is not None else self.Pinv
        Q = self.Q + t * np.asarray(K) if K is not None else self.Q
        W = self.W + t * np.asarray(L) if L is not None else self.W
        return self.replace(Pinv, Q, W)


@dataclass(frozen=True, eq=False)
class BoundaryRaw:
    """Boundary condition as an explicit pair ``(A, B)``."""

    A: np.ndarray
    B: np.ndarray
    tol: Tolerances = field(default=DEFAULT_TOL, repr=False)

    def __post_init__(self):
        A = nk.as_cmatrix(self.A, "A")
        B = nk.as_cmatrix(self.B, "B")
        if A.shape != B.shape or A.shape[0] != A.shape[1] or A.shape[0] % 2:
            raise InvalidBoundaryCondition(f"A and B must both be 2d x 2d, got {A.shape} and {B.shape}")
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "B", B)
        AB = np.hstack([A, B])
        if nk.num_rank(AB, self.tol) != A.shape[0]:
            raise InvalidBoundaryCondition("rank(A, B) != 2d")
        lhs, rhs = A @ B.conj().T, B @ A.conj().T
        scale = max(np.linalg.norm(AB) ** 2, 1e-300)
        if np.linalg.norm(lhs - rhs) > self.tol.herm_tol * scale:
            raise InvalidBoundaryCondition("A B* != B A* (boundary condition not self-adjoint)")

    @property
    def d(self) -> int:
        return self.A.shape[0] // 2

    @property
    def AB(self) -> np.ndarray:
        return np.hstack([self.A, self.B])

    @property
    def A1(self):
        return self.A[:, : self.d]

    @property
    def A2(self):
        return self.A[:, self.d:]

    @property
    def B1(self):
        return self.B[:, : self.d]

    @property
    def B2(self):
        return self.B[:, self.d:]


@dataclass(frozen=True, eq=False)
class EKMatrix:
    full: np.ndarray
    E1: np.ndarray
    E2: np.ndarray

    @property
    def top(self) -> np.ndarray:
        n = self.full.shape[0] // 2
        return self.full[:n]

    @property
    def bottom(self) -> np.ndarray:
        n = self.full.shape[0] // 2
        return self.full[n:]


def _normalize_K(d: int, K: Iterable[int]) -> tuple[int, ...]:
    out = tuple(sorted({int(k) for k in K}))
    for k in out:
        if not 1 <= k <= 2 * d:
            raise IndexOutOfRange(f"index {k} outside 1..{2 * d}")
    return out


def build_EK(d: int, K: Iterable[int]) -> EKMatrix:
    """Signed column-swap matrix: for each ``k`` in ``K`` negate column
    ``k + 2d`` of the identity and swap it with column ``k`` (1-based)."""
    if d < 1:
        raise ValidationError("d must be >= 1")
    K = _normalize_K(d, K)
    E = np.eye(4 * d)
    for k in K:
        i, j = k - 1, k - 1 + 2 * d
        E[:, j] *= -1
        E[:, [i, j]] = E[:, [j, i]]
    diag1 = np.array([0.0 if i in K else 1.0 for i in range(1, d + 1)])
    diag2 = np.array([0.0 if d + i in K else 1.0 for i in range(1, d + 1)])
    return EKMatrix(E, np.diag(diag1), np.diag(diag2))


def symplectic_J(d: int) -> np.ndarray:
    n = 2 * d
    return np.block([[np.zeros((n, n)), -np.eye(n)], [np.eye(n), np.zeros((n, n))]])


@dataclass(frozen=True, eq=False)
class BoundaryChart:
    """Chart representative ``[(S | I_2d) E_K]``."""

    K: tuple
    S: np.ndarray
    tol: Tolerances = field(default=DEFAULT_TOL, repr=False)

    def __post_init__(self):
        S = nk.as_cmatrix(self.S, "S")
        if S.shape[0] != S.shape[1] or S.shape[0] % 2:
            raise ValidationError(f"S must be 2d x 2d, got {S.shape}")
        if not nk.is_hermitian(S, self.tol):
            raise NotHermitian("S not Hermitian")
        object.__setattr__(self, "S", nk.herm_part(S))
        object.__setattr__(self, "K", _normalize_K(S.shape[0] // 2, self.K))

    @property
    def d(self) -> int:
        return self.S.shape[0] // 2

    @property
    def K1(self) -> tuple:
        return tuple(k for k in self.K if k <= self.d)

    @property
    def K2(self) -> tuple:
        return tuple(k for k in self.K if k > self.d)

    @property
    def r(self) -> int:
        return len(self.K2)

    @property
    def S1(self):
        return self.S[: self.d, : self.d]

    @property
    def S2(self):
        return self.S[: self.d, self.d:]

    @property
    def S3(self):
        return self.S[self.d:, self.d:]

    @cached_property
    def E(self) -> EKMatrix:
        return build_EK(self.d, self.K)

    @property
    def E0(self) -> np.ndarray:
        """Columns ``e_k`` of ``I_d`` for ``k + d`` in ``K_2``, ascending."""
        eye = np.eye(self.d)
        return eye[:, [k - self.d - 1 for k in self.K2]]

    def with_S(self, S) -> "BoundaryChart":
        return BoundaryChart(self.K, S, tol=self.tol)


BoundaryCondition = Union[BoundaryRaw, BoundaryChart]


def chart_to_raw(chart: BoundaryChart) -> BoundaryRaw:
    d = chart.d
    AB = np.hstack([chart.S, np.eye(2 * d)]) @ chart.E.full
    return BoundaryRaw(AB[:, : 2 * d], AB[:, 2 * d:], tol=chart.tol)


def as_raw(bc: BoundaryCondition) -> BoundaryRaw:
    return chart_to_raw(bc) if isinstance(bc, BoundaryChart) else bc


def all_index_sets(d: int) -> list[tuple[int, ...]]:
    idx = range(1, 2 * d + 1)
    return [K for size in range(2 * d + 1) for K in itertools.combinations(idx, size)]


def canonicalize(raw: BoundaryRaw) -> BoundaryChart:
    """Best-conditioned chart of ``[A | B]``.

    Tries every ``K`` and keeps the one whose right block ``D`` of
    ``(A, B) E_K*`` has the largest smallest singular value.
    """
    d = raw.d
    tol = raw.tol
    AB = raw.AB
    best = None
    for K in all_index_sets(d):
        CD = AB @ build_EK(d, K).full.conj().T
        smin = nk.singular_values(CD[:, 2 * d:], tol)[-1]
        if best is None or smin > best[0] * (1 + 1e-12):
            best = (smin, K, CD)
    smin, K, CD = best
    smax = nk.norm2(AB, tol)
    if smin <= tol.rank_tol * smax:
        raise NoChartFound("no chart has an invertible right block")
    S = np.linalg.solve(CD[:, 2 * d:], CD[:, : 2 * d])
    if not nk.is_hermitian(S, tol):
        raise InvalidBoundaryCondition("chart matrix S not Hermitian; input is not self-adjoint")
    return BoundaryChart(K, S, tol=tol)


def row_space_projector(M) -> np.ndarray:
    M = nk.as_cmatrix(M)
    return M.conj().T @ np.linalg.solve(M @ M.conj().T, M)


def boundary_distance(bc1: BoundaryCondition, bc2: BoundaryCondition) -> float:
    """Sine of the largest principal angle between the two row spaces."""
    p1 = row_space_projector(as_raw(bc1).AB)
    p2 = row_space_projector(as_raw(bc2).AB)
    return float(np.linalg.norm(p1 - p2, 2))


def same_boundary_condition(bc1: BoundaryCondition, bc2: BoundaryCondition, atol: float = 1e-8) -> bool:
    return boundary_distance(bc1, bc2) <= atol


def dirichlet(d: int = 1) -> BoundaryRaw:
    """``y_0 = y_N = 0``."""
    return BoundaryRaw(np.eye(2 * d), np.zeros((2 * d, 2 * d)))


def neumann(d: int = 1) -> BoundaryRaw:
    """``P_0 Delta y_0 = P_N Delta y_N = 0``."""
    return BoundaryRaw(np.zeros((2 * d, 2 * d)), np.eye(2 * d))


def _pinned_ends(p_last: float) -> BoundaryRaw:
    # y_0 = 0 and y_{N+1} = y_N + P_N^-1 (P_N Delta y_N) = 0
    return BoundaryRaw(np.eye(2), np.array([[0.0, 0.0], [0.0, 1.0 / p_last]]))


def vibrating_string(c: Sequence[float], m: Sequence[float]):
    """String of ``l`` beads with masses ``m`` and spring constants ``c``
    (``c_0 .. c_l``), both ends pinned."""
    c = np.asarray(c, dtype=float)
    m = np.asarray(m, dtype=float)
    l = m.size
    if l < 2 or c.size != l + 1:
        raise ValidationError(f"need l >= 2 masses and l + 1 stiffnesses, got {m.size} and {c.size}")
    if np.any(c <= 0) or np.any(m <= 0):
        raise NonPositiveCoefficient("stiffnesses and masses must be positive")
    eq = SLEquation(1.0 / c, np.zeros(l), m)
    return eq, _pinned_ends(c[-1])


def random_walk_weights(alpha: Sequence[float], beta: Sequence[float]):
    """Weights ``a_j`` and coefficients ``g_0 .. g_l`` with ``g_j = alpha_j a_j``
    and ``g_{j-1} = beta_j a_j``, normalized by ``a_1 = 1``."""
    alpha = np.asarray(alpha, dtype=float)
    beta = np.asarray(beta, dtype=float)
    l = alpha.size
    if l < 2 or beta.size != l:
        raise InconsistentProbabilities("alpha and beta must have the same length l >= 2")
    if np.any(alpha <= 0) or np.any(beta <= 0) or np.any(alpha + beta > 1 + 1e-15):
        raise InconsistentProbabilities("need alpha_j, beta_j > 0 and alpha_j + beta_j <= 1")
    a = np.empty(l)
    a[0] = 1.0
    for j in range(l - 1):
        a[j + 1] = alpha[j] * a[j] / beta[j + 1]
    g = np.concatenate([[beta[0] * a[0]], alpha * a])
    return a, g


def random_walk(alpha: Sequence[float], beta: Sequence[float]):
    """Walk on ``1..l`` that is lost when leaving the range."""
    a, g = random_walk_weights(alpha, beta)
    eq = SLEquation(1.0 / g, np.zeros(a.size), a)
    return eq, _pinned_ends(g[-1])


def random_walk_generator(alpha: Sequence[float], beta: Sequence[float]) -> np.ndarray:
    """The tridiagonal ``T`` with ``P(j + 1) = P(j)(I + T)``."""
    alpha = np.asarray(alpha, dtype=float)
    beta = np.asarray(beta, dtype=float)
    T = np.diag(-(alpha + beta)) + np.diag(alpha[:-1], 1) + np.diag(beta[1:], -1)
    return T


# -- random instances ---------------------------------------------------------

def random_equation(rng: np.random.Generator, d: int, N: int, *,
                    p_definite: bool = True, scale: float = 1.0) -> SLEquation:
    """Random point of the equation space.

    With ``p_definite`` every ``P_j^-1`` is positive definite; otherwise only
    ``P_0^-1`` is, and the rest are indefinite but well conditioned.
    """
    Pinv = []
    for j in range(N + 1):
        if p_definite or j == 0:
            Pinv.append(nk.random_positive_definite(rng, d))
        else:
            u = nk.random_unitary(rng, d)
            vals = rng.uniform(0.5, 2.0, d) * rng.choice([-1.0, 1.0], d)
            Pinv.append(nk.herm_part(u @ np.diag(vals) @ u.conj().T))
    Q = [nk.random_hermitian(rng, d, scale) for _ in range(N)]
    W = [nk.random_positive_definite(rng, d) for _ in range(N)]
    return SLEquation(np.array(Pinv), np.array(Q), np.array(W))


def random_chart(rng: np.random.Generator, d: int, K=None, scale: float = 1.0) -> BoundaryChart:
    if K is None:
        sets = all_index_sets(d)
        K = sets[rng.integers(len(sets))]
    return BoundaryChart(K, nk.random_hermitian(rng, 2 * d, scale))
