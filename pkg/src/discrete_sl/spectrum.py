"""Finite spectrum of a discrete Sturm-Liouville problem.

Two independent routes to the eigenvalues:

* :func:`eigenvalues` works with ``Gamma(lambda) = det(A Phi + B Psi)``, built
  from the fundamental solutions of the forward recursion;
* :func:`pencil_oracle` works with ``det(L0 + lambda L1)`` for the
  ``(N+2)d`` square pencil over ``y_0 .. y_{N+1}``.

Both determinants are sampled at Chebyshev nodes and interpolated; the
interpolant's degree is checked against the rank formula for the number of
eigenvalues, and roots are isolated by derivative interlacing (every
derivative of a real-rooted polynomial is real-rooted) plus bisection.
Simple roots are then polished by bisection on the determinant itself.
"""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from numpy.polynomial import chebyshev as C
from numpy.polynomial import polynomial as Pn

from . import numkernel as nk
from .errors import (
    DegenerateEigenvalue,
    DegreeMismatch,
    MultiplicityMismatch,
    NotAnEigenvalue,
)
from .numkernel import DEFAULT_TOL, Tolerances
from .problem import BoundaryCondition, BoundaryRaw, SLEquation, as_raw

TRIM_TOL = 1e-10


# -- polynomial matrices ------------------------------------------------------

class PolyMatrix:
    """Matrix polynomial ``sum_k coeffs[k] * lambda**k``."""

    def __init__(self, coeffs):
        c = np.asarray(coeffs, dtype=np.complex128)
        if c.ndim == 2:
            c = c[None]
        self.coeffs = c

    @classmethod
    def constant(cls, m):
        return cls(np.asarray(m, dtype=np.complex128)[None])

    @property
    def shape(self):
        return self.coeffs.shape[1:]

    @property
    def degree(self) -> int:
        norms = np.abs(self.coeffs).reshape(len(self.coeffs), -1).max(axis=1)
        top = norms.max() if norms.size else 0.0
        nz = np.nonzero(norms > TRIM_TOL * top)[0]
        return int(nz[-1]) if nz.size else 0

    def __call__(self, lam) -> np.ndarray:
        out = np.zeros(self.shape, dtype=np.complex128)
        for c in self.coeffs[::-1]:
            out = out * lam + c
        return out

    def __add__(self, other: "PolyMatrix") -> "PolyMatrix":
        n = max(len(self.coeffs), len(other.coeffs))
        out = np.zeros((n,) + self.shape, dtype=np.complex128)
        out[: len(self.coeffs)] += self.coeffs
        out[: len(other.coeffs)] += other.coeffs
        return PolyMatrix(out)

    def __neg__(self):
        return PolyMatrix(-self.coeffs)

    def __sub__(self, other):
        return self + (-other)

    def lmul(self, m) -> "PolyMatrix":
        """Constant matrix times this polynomial."""
        return PolyMatrix(np.einsum("ij,kjl->kil", np.asarray(m, dtype=np.complex128), self.coeffs))

    def times_lambda(self) -> "PolyMatrix":
        z = np.zeros((1,) + self.shape, dtype=np.complex128)
        return PolyMatrix(np.concatenate([z, self.coeffs]))

    def vstack(self, other: "PolyMatrix") -> "PolyMatrix":
        n = max(len(self.coeffs), len(other.coeffs))
        a = np.zeros((n,) + self.shape, dtype=np.complex128)
        b = np.zeros((n,) + other.shape, dtype=np.complex128)
        a[: len(self.coeffs)] = self.coeffs
        b[: len(other.coeffs)] = other.coeffs
        return PolyMatrix(np.concatenate([a, b], axis=1))


def fundamental_solutions(eq: SLEquation) -> tuple[PolyMatrix, PolyMatrix]:
    """``Phi(lambda)`` and ``Psi(lambda)`` as exact matrix polynomials.

    Columns are the ``2d`` solutions with ``(y_0; P_0 Delta y_0) = I``;
    ``Phi`` stacks ``(-y_0; y_N)`` and ``Psi`` stacks
    ``(P_0 Delta y_0; P_N Delta y_N)``.
    """
    d, N = eq.d, eq.N
    eye = np.eye(d)
    zero = np.zeros((d, d))
    y = PolyMatrix.constant(np.hstack([eye, zero]))
    u = PolyMatrix.constant(np.hstack([zero, eye]))
    y0, u0 = y, u
    for i in range(1, N + 1):
        y = y + u.lmul(eq.Pinv[i - 1])
        u = u - y.lmul(eq.W[i - 1]).times_lambda() + y.lmul(eq.Q[i - 1])
    return (-y0).vstack(y), u0.vstack(u)


def solution_matrices(eq: SLEquation, lam) -> tuple[np.ndarray, np.ndarray]:
    """Numeric ``Phi(lambda), Psi(lambda)`` by plain recursion."""
    d, N = eq.d, eq.N
    y = np.hstack([np.eye(d), np.zeros((d, d))]).astype(np.complex128)
    u = np.hstack([np.zeros((d, d)), np.eye(d)]).astype(np.complex128)
    y0, u0 = y, u
    for i in range(1, N + 1):
        y = y + eq.Pinv[i - 1] @ u
        u = u - (lam * eq.W[i - 1] - eq.Q[i - 1]) @ y
    return np.vstack([-y0, y]), np.vstack([u0, u])


def full_solution(eq: SLEquation, lam, y0, u0) -> np.ndarray:
    """Solution ``y_0 .. y_{N+1}`` with ``y_0`` and ``P_0 Delta y_0`` given."""
    N = eq.N
    ys = [np.asarray(y0, dtype=np.complex128)]
    u = np.asarray(u0, dtype=np.complex128)
    for i in range(1, N + 1):
        ys.append(ys[-1] + eq.Pinv[i - 1] @ u)
        u = u - (lam * eq.W[i - 1] - eq.Q[i - 1]) @ ys[-1]
    ys.append(ys[-1] + eq.Pinv[N] @ u)
    return np.array(ys)


def transfer_matrix(eq: SLEquation, i: int, lam) -> np.ndarray:
    """One step ``(y_{i-1}; u_{i-1}) -> (y_i; u_i)`` with ``u = P Delta y``."""
    d = eq.d
    pinv = eq.Pinv[i - 1]
    c = lam * eq.W[i - 1] - eq.Q[i - 1]
    t = np.empty((2 * d, 2 * d), dtype=np.complex128)
    t[:d, :d] = np.eye(d)
    t[:d, d:] = pinv
    t[d:, :d] = -c
    t[d:, d:] = np.eye(d) - c @ pinv
    return t


def shooting_matrix(eq: SLEquation, bc: BoundaryCondition, lam) -> np.ndarray:
    """Bordered block-bidiagonal system whose determinant is ``Gamma(lambda)``.

    Unknowns are the states ``z_0 .. z_N`` (``z_i = (y_i; u_i)``); rows are
    the boundary condition ``[-A_1, B_1] z_0 + [A_2, B_2] z_N = 0`` followed
    by ``T_i z_{i-1} - z_i = 0``.  Eliminating ``z_1 .. z_N`` leaves
    ``A Phi + B Psi`` as the Schur complement, and the eliminated block has
    determinant one, so the determinants agree exactly.  Expanding
    ``A Phi + B Psi`` directly loses about ``|lambda|^{N d}`` to cancellation.
    """
    raw = as_raw(bc)
    d, N = eq.d, eq.N
    m = 2 * d
    M = np.zeros(((N + 1) * m, (N + 1) * m), dtype=np.complex128)
    M[:m, :m] = np.hstack([-raw.A1, raw.B1])
    M[:m, N * m:] = np.hstack([raw.A2, raw.B2])
    for i in range(1, N + 1):
        r = slice(i * m, (i + 1) * m)
        M[r, (i - 1) * m: i * m] = transfer_matrix(eq, i, lam)
        M[r, i * m: (i + 1) * m] = -np.eye(m)
    return M


def char_value(eq: SLEquation, bc: BoundaryCondition, lam) -> complex:
    """``Gamma(lambda) = det(A Phi(lambda) + B Psi(lambda))``."""
    return complex(np.linalg.det(shooting_matrix(eq, bc, lam)))


def char_value_direct(eq: SLEquation, bc: BoundaryCondition, lam) -> complex:
    """Same value from the explicit ``2d x 2d`` product; only accurate for
    small ``N d |lambda|``."""
    raw = as_raw(bc)
    Phi, Psi = solution_matrices(eq, lam)
    return complex(np.linalg.det(raw.A @ Phi + raw.B @ Psi))


# -- counting -----------------------------------------------------------------

def D_matrix(eq: SLEquation, bc: BoundaryCondition) -> np.ndarray:
    """``(A_1 P_0^-1 + B_1, B_2)``."""
    raw = as_raw(bc)
    return np.hstack([raw.A1 @ eq.Pinv[0] + raw.B1, raw.B2])


def count_formula(eq: SLEquation, bc: BoundaryCondition, tol: Tolerances = DEFAULT_TOL) -> int:
    """Number of eigenvalues, with multiplicity: ``(N-2)d + rank D``."""
    return (eq.N - 2) * eq.d + nk.num_rank(D_matrix(eq, bc), tol)


def sampling_radius(eq: SLEquation) -> float:
    """Coarse scale for the interpolation nodes."""
    rho = 0.0
    for i in range(1, eq.N + 1):
        winv = np.linalg.norm(np.linalg.inv(eq.W[i - 1]), 2)
        term = (np.linalg.norm(eq.Q[i - 1], 2) + 2 * np.linalg.norm(eq.P[i - 1], 2)
                + 2 * np.linalg.norm(eq.P[i], 2))
        rho = max(rho, winv * term)
    return 1.0 + rho


# -- scalar polynomials -------------------------------------------------------

@dataclass
class CharPoly:
    """Real Chebyshev series in ``x = lambda / radius``, scaled to leading
    coefficient one, plus the complex factor divided out:
    ``value(lambda) == lead * chebval(lambda / radius, coeffs)``."""

    coeffs: np.ndarray
    lead: complex
    imag_residue: float
    radius: float
    center: float = 0.0

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __call__(self, lam):
        return C.chebval((np.asarray(lam) - self.center) / self.radius, self.coeffs)

    def monic(self) -> np.ndarray:
        """Monic power-basis coefficients in ``lambda`` (ascending)."""
        mono_x = C.cheb2poly(self.coeffs)
        shift = np.array([-self.center / self.radius, 1.0 / self.radius])
        mono = np.zeros(1)
        for c in mono_x[::-1]:
            mono = Pn.polyadd(Pn.polymul(mono, shift), [c])
        return mono / mono[-1]

    def roots(self) -> np.ndarray:
        return self.center + self.radius * real_roots(self.coeffs, chebyshev=True)


def interpolate_determinant(fn: Callable[[float], complex], n_nodes: int, radius: float,
                            expected_degree: int | None = None, what: str = "Gamma",
                            center: float = 0.0) -> CharPoly:
    """Interpolate a scalar polynomial from ``n_nodes`` Chebyshev samples on
    ``[center - radius, center + radius]``; trim, check the degree and divide
    out the leading coefficient."""
    k = np.arange(n_nodes)
    x = np.cos(np.pi * (k + 0.5) / n_nodes)
    vals = np.array([fn(center + radius * xi) for xi in x])
    cheb = C.chebfit(x, vals, n_nodes - 1)
    mags = np.abs(cheb)
    top = mags.max()
    deg = int(np.nonzero(mags > TRIM_TOL * top)[0][-1]) if top > 0 else 0
    if expected_degree is not None and deg != expected_degree:
        raise DegreeMismatch(f"{what} has numerical degree {deg}, rank formula gives {expected_degree}")
    lead = cheb[deg]
    scaled = cheb[: deg + 1] / lead
    residue = float(np.abs(scaled.imag).max() / np.abs(scaled).max())
    return CharPoly(scaled.real.copy(), complex(lead), residue, radius, center)


def adaptive_interpolant(fn: Callable[[float], complex], n_nodes: int, radius: float,
                         expected_degree: int, what: str = "Gamma", max_widen: int = 12) -> CharPoly:
    """Interpolate on ``[-radius, radius]``, widening the interval by 16x while
    the numerical degree is below ``expected_degree``.

    Roots far outside the interval only show up in the top coefficients,
    which can sink below the trimming threshold; a wider interval lifts them.
    """
    for _ in range(max_widen + 1):
        poly = interpolate_determinant(fn, n_nodes, radius, what=what)
        if poly.degree >= expected_degree:
            break
        radius *= 16.0
    if poly.degree != expected_degree:
        raise DegreeMismatch(f"{what} has numerical degree {poly.degree}, rank formula gives {expected_degree}")
    return poly


def char_poly(eq: SLEquation, bc: BoundaryCondition, tol: Tolerances = DEFAULT_TOL) -> CharPoly:
    """``Gamma(lambda) = det(A Phi(lambda) + B Psi(lambda))``."""
    raw = as_raw(bc)
    n = count_formula(eq, raw, tol)
    return adaptive_interpolant(lambda lam: char_value(eq, raw, lam), eq.N * eq.d + 1,
                                sampling_radius(eq), n)


def _bisect(f, lo, hi, flo, fhi, maxiter=200):
    for _ in range(maxiter):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        fm = f(mid)
        if fm == 0:
            return mid
        if (fm < 0) == (flo < 0):
            lo, flo = mid, fm
        else:
            hi, fhi = mid, fm
    return lo if abs(flo) <= abs(fhi) else hi


def _cauchy_bound(c, chebyshev: bool) -> float:
    mono = C.cheb2poly(c) if chebyshev else np.asarray(c, dtype=float)
    return 2.0 * (1.0 + np.abs(mono[:-1] / mono[-1]).max())


def real_roots(coeffs, chebyshev: bool = False, bound: float | None = None) -> np.ndarray:
    """All roots of a real-rooted polynomial (ascending coefficients, power
    or Chebyshev basis).

    The critical points ``c_1 <= .. <= c_{n-1}`` (roots of the derivative,
    found recursively) interlace the roots, so each closed interval between
    consecutive points of ``-B, c_1, .., c_{n-1}, B`` holds exactly one root,
    ``B`` being twice the Cauchy bound.  An interval without a sign change
    holds a (numerically split) double root at its better endpoint.
    Returns ``n`` roots, ascending.
    """
    c = np.asarray(coeffs, dtype=float)
    c = c / c[-1]
    n = len(c) - 1
    if n <= 0:
        return np.zeros(0)
    if n == 1:
        return np.array([-c[0]])
    if bound is None:
        bound = _cauchy_bound(c, chebyshev)
    val = C.chebval if chebyshev else Pn.polyval
    der = C.chebder if chebyshev else Pn.polyder
    crit = real_roots(der(c), chebyshev, bound)
    pts = np.concatenate([[-bound], np.clip(crit, -bound, bound), [bound]])
    f = lambda t: val(t, c)  # noqa: E731
    roots = np.empty(n)
    for i in range(n):
        lo, hi = pts[i], pts[i + 1]
        flo, fhi = f(lo), f(hi)
        if flo == 0:
            roots[i] = lo
        elif fhi == 0:
            roots[i] = hi
        elif (flo < 0) != (fhi < 0):
            roots[i] = _bisect(f, lo, hi, flo, fhi)
        else:
            roots[i] = lo if abs(flo) <= abs(fhi) else hi
    return np.sort(roots)


def cluster(roots, rel_tol: float) -> list[tuple[float, int]]:
    out: list[list[float]] = []
    for r in np.sort(np.asarray(roots, dtype=float)):
        if out and r - out[-1][-1] <= rel_tol * (1 + abs(r)):
            out[-1].append(r)
        else:
            out.append([r])
    return [(float(np.mean(g)), len(g)) for g in out]


def polish(f, root: float, lower: float, upper: float) -> tuple[float, bool]:
    """Refine a simple root by bisection on ``f`` inside ``(lower, upper)``.

    Returns ``(root, True)`` when a sign change was bracketed, otherwise the
    input unchanged and ``False``.
    """
    scale = 1.0 + abs(root)
    lower, upper = max(lower, root - scale), min(upper, root + scale)
    delta = 1e-12 * scale
    if f(root) == 0:
        return root, True
    while True:
        lo, hi = max(root - delta, lower), min(root + delta, upper)
        flo, fhi = f(lo), f(hi)
        if (flo < 0) != (fhi < 0):
            return _bisect(f, lo, hi, flo, fhi), True
        if lo <= lower and hi >= upper:
            return root, False
        delta *= 8


# -- spectra ------------------------------------------------------------------

@dataclass
class Spectrum:
    """Distinct eigenvalues (ascending) with multiplicities."""

    values: np.ndarray
    mults: np.ndarray

    @classmethod
    def from_pairs(cls, pairs):
        pairs = list(pairs)
        return cls(np.array([p[0] for p in pairs], dtype=float),
                   np.array([p[1] for p in pairs], dtype=int))

    @property
    def total(self) -> int:
        return int(self.mults.sum())

    def flat(self) -> np.ndarray:
        """Eigenvalues repeated by multiplicity: ``lambda_1 <= lambda_2 <= ..``."""
        return np.repeat(self.values, self.mults)

    def pairs(self):
        return list(zip(self.values.tolist(), self.mults.tolist()))

    def to_json(self) -> dict:
        return {"eigenvalues": [{"lambda": float(v), "mult": int(m)} for v, m in self.pairs()]}

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["lambda", "mult"])
        for v, m in self.pairs():
            w.writerow([repr(float(v)), int(m)])
        return buf.getvalue()


def _hull(roots) -> tuple[float, float]:
    lo, hi = float(np.min(roots)), float(np.max(roots))
    pad = 0.1 * (hi - lo) + 1e-3 * (1 + max(abs(lo), abs(hi)))
    return 0.5 * (hi + lo), 0.5 * (hi - lo) + pad


def isolate_roots(fn, poly: CharPoly, tol: Tolerances) -> list[tuple[float, int]]:
    """Roots of ``fn`` (a real-rooted polynomial up to a constant complex
    factor) with multiplicities, starting from the interpolant ``poly``.

    Interpolation error is absolute in ``max |fn|`` over the sampling
    interval, so estimates from a wide interval can be poor.  Each round
    polishes every isolated estimate by bisection on ``fn`` itself (exact
    whenever a sign change is bracketed), divides the accepted roots out of
    ``fn`` and re-interpolates the remaining factor on the hull of its
    estimates.  What is left when no new root is accepted are clusters,
    which the final small-hull interpolant resolves.
    """
    lead = poly.lead
    accepted: list[float] = []
    est = poly.roots()
    for _ in range(poly.degree + 1):
        if est.size == 0:
            break
        acc = np.array(accepted)

        def h(lam, acc=acc):
            return fn(lam) / lead / np.prod(lam - acc)

        if accepted:
            center, radius = _hull(est)
            local = interpolate_determinant(h, est.size + 1, radius, center=center)
            if local.degree != est.size:
                break
            est = local.roots()
        groups = cluster(est, tol.root_cluster_tol)
        h_real = lambda lam: h(lam).real  # noqa: E731
        new, rest = [], []
        for idx, (val, m) in enumerate(groups):
            if m == 1:
                lower = 0.5 * (groups[idx - 1][0] + val) if idx > 0 else -np.inf
                upper = 0.5 * (groups[idx + 1][0] + val) if idx + 1 < len(groups) else np.inf
                root, ok = polish(h_real, val, lower, upper)
                if ok:
                    new.append(root)
                    continue
            rest.extend([val] * m)
        if not new:
            break
        accepted.extend(new)
        est = np.array(rest)
    pairs = [(a, 1) for a in accepted] + [(v, 1) for v in est]
    pairs.sort()
    merged: list[list] = []
    for val, m in pairs:
        if merged and val - merged[-1][0][-1] <= tol.root_cluster_tol * (1 + abs(val)):
            merged[-1][0].append(val)
        else:
            merged.append([[val]])
    exact = set(accepted)
    out = []
    for (vals,) in merged:
        pinned = [v for v in vals if v in exact]
        value = float(np.mean(pinned)) if pinned else float(np.mean(vals))
        out.append((value, len(vals)))
    return out


def pencil(eq: SLEquation, bc: BoundaryCondition) -> tuple[np.ndarray, np.ndarray]:
    """``(L0, L1)`` with ``(L0 + lambda L1) vec(y_0 .. y_{N+1}) = 0`` exactly
    for eigenfunctions: ``N d`` equation rows followed by ``2d`` boundary rows."""
    raw = as_raw(bc)
    d, N = eq.d, eq.N
    n = (N + 2) * d
    L0 = np.zeros((n, n), dtype=np.complex128)
    L1 = np.zeros((n, n), dtype=np.complex128)
    P = eq.P

    def blk(i):
        return slice(i * d, (i + 1) * d)

    for i in range(1, N + 1):
        r = blk(i - 1)
        # -P_i (y_{i+1} - y_i) + P_{i-1} (y_i - y_{i-1}) + Q_i y_i - lambda W_i y_i
        L0[r, blk(i + 1)] += -P[i]
        L0[r, blk(i)] += P[i] + P[i - 1] + eq.Q[i - 1]
        L0[r, blk(i - 1)] += -P[i - 1]
        L1[r, blk(i)] += -eq.W[i - 1]
    rows = slice(N * d, n)
    A1, A2, B1, B2 = raw.A1, raw.A2, raw.B1, raw.B2
    L0[rows, blk(0)] += -A1 - B1 @ P[0]
    L0[rows, blk(1)] += B1 @ P[0]
    L0[rows, blk(N)] += A2 - B2 @ P[N]
    L0[rows, blk(N + 1)] += B2 @ P[N]
    return L0, L1


def balanced_pencil(eq: SLEquation, bc: BoundaryCondition, lam: float) -> np.ndarray:
    """``L0 + lam L1`` with unit rows; same kernel, but far from ``lam = 0``
    the equation rows no longer swamp the boundary rows."""
    L0, L1 = pencil(eq, bc)
    M = L0 + lam * L1
    norms = np.linalg.norm(M, axis=1)
    return M / np.where(norms > 0, norms, 1.0)[:, None]


def kernel_threshold(lam: float, tol: Tolerances) -> float:
    """Relative singular-value cut for the balanced pencil at ``lam``.

    Near a singular point the pencil also has an eigenvalue close to
    infinity, and its distance shows up as a singular value of size about
    ``1 / |lam|``; the cut is scaled down accordingly (chordal distance).
    """
    return tol.root_cluster_tol / (1.0 + abs(lam))


def geometric_multiplicity(eq: SLEquation, bc: BoundaryCondition, lam: float,
                           tol: Tolerances = DEFAULT_TOL) -> int:
    cut = kernel_threshold(lam, tol)
    M = balanced_pencil(eq, bc, lam)
    # Gram values are noise below sqrt(eps) * sigma_max
    s = nk.gram_singular_values(M, tol) if cut >= 1e-7 else nk.singular_values(M, tol)
    return int(np.sum(s <= cut * max(1.0, s[0])))


def eigenvalues(eq: SLEquation, bc: BoundaryCondition, tol: Tolerances = DEFAULT_TOL,
                check_multiplicity: bool = True) -> Spectrum:
    raw = as_raw(bc)
    poly = char_poly(eq, raw, tol)
    if poly.degree == 0:
        return Spectrum.from_pairs([])
    pairs = isolate_roots(lambda lam: char_value(eq, raw, lam), poly, tol)
    if check_multiplicity:
        for val, m in pairs:
            g = geometric_multiplicity(eq, raw, val, tol)
            if g != m:
                raise MultiplicityMismatch(
                    f"eigenvalue {val!r}: root cluster size {m}, kernel dimension {g}")
    return Spectrum.from_pairs(pairs)


def pencil_oracle(eq: SLEquation, bc: BoundaryCondition, tol: Tolerances = DEFAULT_TOL) -> Spectrum:
    """Independent spectrum from ``det(L0 + lambda L1)``."""
    raw = as_raw(bc)
    L0, L1 = pencil(eq, raw)
    det = lambda lam: complex(np.linalg.det(L0 + lam * L1))  # noqa: E731
    n = count_formula(eq, raw, tol)
    poly = adaptive_interpolant(det, L0.shape[0] + 1, sampling_radius(eq), n,
                                what="pencil determinant")
    if poly.degree == 0:
        return Spectrum.from_pairs([])
    return Spectrum.from_pairs(isolate_roots(det, poly, tol))


# -- eigenfunctions -----------------------------------------------------------

@dataclass
class EigenFunction:
    """Normalized eigenfunction ``y_0 .. y_{N+1}`` (array of shape ``(N+2, d)``)."""

    y: np.ndarray
    lam: float
    eq: SLEquation = field(repr=False)

    @property
    def x(self) -> np.ndarray:
        """``P_i Delta y_i`` for ``i = 0 .. N``."""
        dy = np.diff(self.y, axis=0)
        return np.einsum("ijk,ik->ij", self.eq.P, dy)

    @property
    def Y(self) -> np.ndarray:
        """Boundary vector ``(-y_0, y_N, P_0 Delta y_0, P_N Delta y_N)``."""
        N = self.eq.N
        x = self.x
        return np.concatenate([-self.y[0], self.y[N], x[0], x[N]])

    def weighted_norm2(self) -> float:
        inner = self.y[1:-1]
        return float(np.einsum("ij,ijk,ik->", inner.conj(), self.eq.W, inner).real)

    def equation_residual(self) -> float:
        x = self.x
        res = 0.0
        for i in range(1, self.eq.N + 1):
            lhs = -(x[i] - x[i - 1]) + self.eq.Q[i - 1] @ self.y[i]
            res = max(res, np.abs(lhs - self.lam * self.eq.W[i - 1] @ self.y[i]).max())
        return float(res)

    def boundary_residual(self, bc: BoundaryCondition) -> float:
        return float(np.abs(as_raw(bc).AB @ self.Y).max())


def normalize_vector(y: np.ndarray, W: np.ndarray) -> np.ndarray:
    """Scale to unit ``sum y_i* W_i y_i`` over interior points; make the
    largest-magnitude entry real positive."""
    inner = y[1:-1]
    nrm = np.sqrt(np.einsum("ij,ijk,ik->", inner.conj(), W, inner).real)
    y = y / nrm
    flat = y.ravel()
    k = np.argmax(np.abs(flat))
    return y * (abs(flat[k]) / flat[k])


def eigenfunction(eq: SLEquation, bc: BoundaryCondition, lam: float,
                  tol: Tolerances = DEFAULT_TOL) -> EigenFunction:
    ker = nk.nullspace(balanced_pencil(eq, bc, lam), tol, threshold=kernel_threshold(lam, tol))
    if ker.shape[1] == 0:
        raise NotAnEigenvalue(f"{lam!r} is not an eigenvalue")
    if ker.shape[1] > 1:
        raise DegenerateEigenvalue(f"{lam!r} has geometric multiplicity {ker.shape[1]}")
    y = ker[:, 0].reshape(eq.N + 2, eq.d)
    return EigenFunction(normalize_vector(y, eq.W), float(lam), eq)
