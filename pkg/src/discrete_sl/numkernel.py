"""Dense complex linear algebra used by every other module.

Matrices are plain ``numpy`` ``complex128`` arrays.  The Hermitian
eigensolver is a cyclic complex Jacobi method run in round-robin
(parallel) ordering so that each step applies ``n // 2`` disjoint
rotations at once.  Singular values come from the Hermitian dilation
``[[0, M], [M*, 0]]``, whose eigenvalues are ``+-sigma_i``; this keeps
the absolute accuracy at ``eps * ||M||`` instead of the ``sqrt(eps)``
one gets from the eigenvalues of ``M* M``.
"""
from __future__ import annotations

import functools
from dataclasses import dataclass

import numpy as np

from .errors import NoConvergence, NotHermitian, Singular, ValidationError

_EPS = np.finfo(float).eps


@dataclass(frozen=True)
class Tolerances:
    """Numerical thresholds shared by the whole package.

    ``herm_tol`` is relative to ``max(1, ||M||_F)``, ``rank_tol`` is relative to
    ``max(1, ||M||_2)``, ``root_cluster_tol`` is relative to ``1 + |lambda|``
    and ``divergence_threshold`` is the magnitude past which an eigenvalue
    counts as escaped.
    """

    herm_tol: float = 1e-8
    rank_tol: float = 1e-9
    root_cluster_tol: float = 1e-6
    divergence_threshold: float = 1e4

    def __post_init__(self):
        for name in ("herm_tol", "rank_tol", "root_cluster_tol", "divergence_threshold"):
            value = getattr(self, name)
            if not (np.isfinite(value) and value > 0):
                raise ValidationError(f"tolerance {name} must be positive, got {value!r}")


DEFAULT_TOL = Tolerances()


@dataclass(frozen=True)
class InertiaSignature:
    """Numbers of negative, zero and positive eigenvalues."""

    r_minus: int
    r_zero: int
    r_plus: int

    @property
    def order(self) -> int:
        return self.r_minus + self.r_zero + self.r_plus

    def as_list(self) -> list[int]:
        return [self.r_minus, self.r_zero, self.r_plus]

    def __str__(self):
        return f"(r-={self.r_minus}, r0={self.r_zero}, r+={self.r_plus})"


def as_cmatrix(m, name: str = "matrix") -> np.ndarray:
    """Coerce to a finite 2-D complex128 array."""
    a = np.array(m, dtype=np.complex128)
    if a.ndim == 0:
        a = a.reshape(1, 1)
    if a.ndim != 2:
        raise ValidationError(f"{name} must be 2-D, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValidationError(f"{name} has non-finite entries")
    return a


def _require_square(a: np.ndarray, name: str = "matrix"):
    if a.shape[0] != a.shape[1]:
        raise ValidationError(f"{name} must be square, got shape {a.shape}")


def is_hermitian(m, tol: Tolerances = DEFAULT_TOL) -> bool:
    a = as_cmatrix(m)
    if a.shape[0] != a.shape[1]:
        return False
    return np.linalg.norm(a - a.conj().T) <= tol.herm_tol * max(1.0, np.linalg.norm(a))


def check_hermitian(m, tol: Tolerances = DEFAULT_TOL, name: str = "matrix") -> np.ndarray:
    a = as_cmatrix(m, name)
    _require_square(a, name)
    if not is_hermitian(a, tol):
        raise NotHermitian(f"{name} is not Hermitian")
    return a


@functools.lru_cache(maxsize=None)
def _round_robin(n: int) -> tuple[tuple[np.ndarray, np.ndarray], ...]:
    """Disjoint index pairs covering every (p, q), p < q, once per sweep."""
    m = n + (n % 2)
    players = list(range(m))
    rounds = []
    for _ in range(m - 1):
        ps, qs = [], []
        for k in range(m // 2):
            i, j = players[k], players[m - 1 - k]
            if i < n and j < n:
                ps.append(min(i, j))
                qs.append(max(i, j))
        rounds.append((np.array(ps, dtype=int), np.array(qs, dtype=int)))
        players = [players[0]] + [players[-1]] + players[1:-1]
    return tuple(rounds)


def herm_eig(m, tol: Tolerances = DEFAULT_TOL, max_sweeps: int = 60, vectors: bool = True):
    """Eigen-decomposition of a Hermitian matrix by cyclic Jacobi rotations.

    Returns ``(w, V)`` with ``w`` ascending and ``m @ V ~= V @ diag(w)``;
    ``V`` is ``None`` when ``vectors`` is false.
    """
    a = check_hermitian(m, tol)
    n = a.shape[0]
    a = 0.5 * (a + a.conj().T)
    v = np.eye(n, dtype=np.complex128)
    scale = np.linalg.norm(a)
    if n == 1 or scale == 0:
        w = a.diagonal().real.copy()
        order = np.argsort(w, kind="stable")
        return w[order], (v[:, order] if vectors else None)

    stop = n * _EPS * scale
    offmask = ~np.eye(n, dtype=bool)
    rounds = _round_robin(n)
    for _ in range(max_sweeps):
        off = np.linalg.norm(a[offmask])
        if off <= stop:
            break
        for p, q in rounds:
            apq = a[p, q]
            mag = np.abs(apq)
            active = mag > _EPS * 1e-3 * scale
            if not np.any(active):
                continue
            p, q, apq, mag = p[active], q[active], apq[active], mag[active]
            phase = apq / mag
            zeta = (a[q, q].real - a[p, p].real) / (2.0 * mag)
            t = np.where(zeta >= 0, 1.0, -1.0) / (np.abs(zeta) + np.sqrt(1.0 + zeta * zeta))
            c = 1.0 / np.sqrt(1.0 + t * t)
            s = t * c
            cph = phase.conj()
            # columns: X <- X U
            for x in ((a, v) if vectors else (a,)):
                xp, xq = x[:, p].copy(), x[:, q].copy()
                x[:, p] = xp * c - xq * (s * cph)
                x[:, q] = xp * s + xq * (c * cph)
            # rows: A <- U* A
            rp, rq = a[p, :].copy(), a[q, :].copy()
            a[p, :] = c[:, None] * rp - (s * phase)[:, None] * rq
            a[q, :] = s[:, None] * rp + (c * phase)[:, None] * rq
            a[p, q] = 0.0
            a[q, p] = 0.0
            a[p, p] = a[p, p].real
            a[q, q] = a[q, q].real
    else:
        off = np.linalg.norm(a[offmask])
        if off > 1e-10 * scale:
            raise NoConvergence(f"Jacobi iteration stalled after {max_sweeps} sweeps (off={off:.3e})")

    w = a.diagonal().real.copy()
    order = np.argsort(w, kind="stable")
    return w[order], (v[:, order] if vectors else None)


def spectral_threshold(norm2: float, tol: Tolerances = DEFAULT_TOL) -> float:
    return tol.rank_tol * max(1.0, norm2)


def inertia(m, tol: Tolerances = DEFAULT_TOL) -> InertiaSignature:
    w, _ = herm_eig(m, tol, vectors=False)
    if w.size == 0:
        return InertiaSignature(0, 0, 0)
    tau = spectral_threshold(np.max(np.abs(w)), tol)
    neg = int(np.sum(w < -tau))
    pos = int(np.sum(w > tau))
    return InertiaSignature(neg, w.size - neg - pos, pos)


def _dilation(a: np.ndarray) -> np.ndarray:
    r, c = a.shape
    h = np.zeros((r + c, r + c), dtype=np.complex128)
    h[:r, r:] = a
    h[r:, :r] = a.conj().T
    return h


def singular_values(m, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """Singular values in descending order."""
    a = as_cmatrix(m)
    k = min(a.shape)
    if k == 0:
        return np.zeros(0)
    w, _ = herm_eig(_dilation(a), tol, vectors=False)
    return np.clip(w[::-1][:k], 0.0, None)


def gram_singular_values(m, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """Singular values (descending) from the eigenvalues of ``M* M``.

    Half the order of the dilation, but values below ``sqrt(eps) * sigma_max``
    are noise; only use it with thresholds well above that.
    """
    a = as_cmatrix(m)
    if a.shape[0] < a.shape[1]:
        a = a.conj().T
    w, _ = herm_eig(herm_part(a.conj().T @ a), tol, vectors=False)
    return np.sqrt(np.clip(w[::-1], 0.0, None))


def norm2(m, tol: Tolerances = DEFAULT_TOL) -> float:
    s = singular_values(m, tol)
    return float(s[0]) if s.size else 0.0


def num_rank(m, tol: Tolerances = DEFAULT_TOL) -> int:
    s = singular_values(m, tol)
    if s.size == 0:
        return 0
    return int(np.sum(s > spectral_threshold(s[0], tol)))


def nullspace(m, tol: Tolerances = DEFAULT_TOL, threshold: float | None = None) -> np.ndarray:
    """Orthonormal basis (as columns) of the numerical right kernel.

    ``threshold`` is the relative singular-value cut; defaults to ``rank_tol``.
    """
    a = as_cmatrix(m)
    r, c = a.shape
    rel = tol.rank_tol if threshold is None else threshold
    w, vecs = herm_eig(_dilation(a), tol)
    smax = np.max(np.abs(w)) if w.size else 0.0
    small = np.abs(w) <= rel * max(1.0, smax)
    x = vecs[r:, small]
    if x.shape[1] == 0:
        return np.zeros((c, 0), dtype=np.complex128)
    proj = x @ x.conj().T
    pw, pv = herm_eig(0.5 * (proj + proj.conj().T), tol)
    return pv[:, pw > 0.5]


def solve(m, rhs, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    a = as_cmatrix(m)
    _require_square(a)
    s = singular_values(a, tol)
    if s.size and s[-1] <= tol.rank_tol * s[0] or (s.size and s[0] == 0):
        raise Singular("matrix is numerically singular")
    b = np.asarray(rhs, dtype=np.complex128)
    return np.linalg.solve(a, b)


def inv(m, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    a = as_cmatrix(m)
    return solve(a, np.eye(a.shape[0], dtype=np.complex128), tol)


def is_positive_definite(m, tol: Tolerances = DEFAULT_TOL) -> bool:
    a = as_cmatrix(m)
    if a.shape[0] != a.shape[1] or not is_hermitian(a, tol):
        return False
    w, _ = herm_eig(a, tol, vectors=False)
    return bool(w[0] > spectral_threshold(np.max(np.abs(w)), tol))


def herm_part(m) -> np.ndarray:
    a = as_cmatrix(m)
    return 0.5 * (a + a.conj().T)


def random_hermitian(rng: np.random.Generator, n: int, scale: float = 1.0) -> np.ndarray:
    z = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return scale * 0.5 * (z + z.conj().T)


def random_unitary(rng: np.random.Generator, n: int) -> np.ndarray:
    z = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_positive_definite(rng: np.random.Generator, n: int, floor: float = 0.5) -> np.ndarray:
    z = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return herm_part(z @ z.conj().T / n + floor * np.eye(n))


def hermitian_with_inertia(rng: np.random.Generator, sig: InertiaSignature,
                           low: float = 0.5, high: float = 2.0) -> np.ndarray:
    """Random Hermitian matrix whose inertia is exactly ``sig``."""
    vals = np.concatenate([
        -rng.uniform(low, high, sig.r_minus),
        np.zeros(sig.r_zero),
        rng.uniform(low, high, sig.r_plus),
    ])
    u = random_unitary(rng, sig.order)
    return herm_part(u @ np.diag(vals) @ u.conj().T)
