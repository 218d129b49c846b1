import itertools

import numpy as np
import pytest
from hypothesis import given, strategies as st

from discrete_sl import numkernel as nk
from discrete_sl.errors import (
    InconsistentProbabilities,
    IndexOutOfRange,
    InvalidBoundaryCondition,
    NonPositiveCoefficient,
    NotHermitian,
    NotPositiveDefinite,
    ValidationError,
)
from discrete_sl.problem import (
    BoundaryChart,
    BoundaryRaw,
    SLEquation,
    all_index_sets,
    build_EK,
    canonicalize,
    chart_to_raw,
    dirichlet,
    neumann,
    random_chart,
    random_walk,
    random_walk_generator,
    same_boundary_condition,
    symplectic_J,
    vibrating_string,
)
from discrete_sl.spectrum import count_formula, eigenvalues

st_seed = st.integers(0, 2**32 - 1)


def test_ek_identity_for_empty_set():
    assert np.array_equal(build_EK(1, ()).full, np.eye(4))


def test_ek_full_swap_d1():
    expected = np.array([[0, 0, 1, 0], [0, 0, 0, 1], [-1, 0, 0, 0], [0, -1, 0, 0]])
    assert np.array_equal(build_EK(1, (1, 2)).full, expected)


@pytest.mark.parametrize("d", [1, 2, 3])
def test_ek_symplectic_and_unitary_exactly(d):
    J = symplectic_J(d)
    for K in all_index_sets(d):
        E = build_EK(d, K)
        assert np.array_equal(E.full.T @ J @ E.full, J)
        assert np.array_equal(E.full @ E.full.T, np.eye(4 * d))
        for i in range(1, d + 1):
            assert (E.E1[i - 1, i - 1] == 0) == (i in K)
            assert (E.E2[i - 1, i - 1] == 0) == (d + i in K)


def test_ek_rejects_bad_index():
    with pytest.raises(IndexOutOfRange):
        build_EK(1, (3,))


def test_chart_to_raw_examples():
    raw = chart_to_raw(BoundaryChart((1, 2), np.zeros((2, 2))))
    assert np.array_equal(raw.A, -np.eye(2)) and np.array_equal(raw.B, np.zeros((2, 2)))
    raw = chart_to_raw(BoundaryChart((), np.zeros((2, 2))))
    assert np.array_equal(raw.A, np.zeros((2, 2))) and np.array_equal(raw.B, np.eye(2))


@given(st_seed, st.integers(1, 3))
def test_chart_to_raw_is_self_adjoint(seed, d):
    rng = np.random.default_rng(seed)
    raw = chart_to_raw(random_chart(rng, d))
    assert nk.num_rank(raw.AB) == 2 * d
    assert np.allclose(raw.A @ raw.B.conj().T, raw.B @ raw.A.conj().T, atol=1e-12)


def test_canonicalize_examples():
    ch = canonicalize(dirichlet())
    assert ch.K == (1, 2) and np.allclose(ch.S, 0)
    ch = canonicalize(neumann())
    assert ch.K == () and np.allclose(ch.S, 0)


@given(st_seed, st.integers(1, 3))
def test_canonicalize_round_trip(seed, d):
    rng = np.random.default_rng(seed)
    chart = random_chart(rng, d)
    back = canonicalize(chart_to_raw(chart))
    assert same_boundary_condition(back, chart)
    assert nk.is_hermitian(back.S)
    if back.K == chart.K:
        assert np.abs(back.S - chart.S).max() <= 1e-10 * max(1.0, np.abs(chart.S).max())


@given(st_seed, st.integers(1, 3))
def test_canonicalize_recovers_hermitian_S_from_any_representative(seed, d):
    rng = np.random.default_rng(seed)
    raw = chart_to_raw(random_chart(rng, d))
    G = nk.random_unitary(rng, 2 * d) @ np.diag(rng.uniform(0.5, 3, 2 * d))
    mixed = BoundaryRaw(G @ raw.A, G @ raw.B)
    ch = canonicalize(mixed)
    assert np.linalg.norm(ch.S - ch.S.conj().T) <= 1e-8 * max(1.0, np.linalg.norm(ch.S))
    assert same_boundary_condition(ch, raw)


def test_raw_rejects_non_self_adjoint():
    with pytest.raises(InvalidBoundaryCondition):
        BoundaryRaw([[1, 0], [0, 1]], [[0, 1], [0, 0]])
    with pytest.raises(InvalidBoundaryCondition):
        BoundaryRaw(np.zeros((2, 2)), [[1, 0], [0, 0]])


def test_equation_validation():
    with pytest.raises(NotPositiveDefinite, match="W_2"):
        SLEquation([1, 1, 1], [0, 0], [1, -1])
    with pytest.raises(ValidationError, match="Pinv_1"):
        SLEquation([1, 0, 1], [0, 0], [1, 1])
    with pytest.raises(NotHermitian):
        SLEquation([1, 1, 1], [1j, 0], [1, 1])
    with pytest.raises(ValidationError):
        SLEquation([1, 1], [0], [1])


def test_chart_requires_hermitian_S():
    with pytest.raises(NotHermitian):
        BoundaryChart((), [[0, 1], [0, 0]])


def test_vibrating_string_unit():
    eq, bc = vibrating_string([1, 1, 1], [1, 1])
    spec = eigenvalues(eq, bc)
    assert spec.pairs() == pytest.approx([(1.0, 1), (3.0, 1)], abs=1e-10)
    assert count_formula(eq, bc) == 2


def test_vibrating_string_mass_scaling():
    eq, bc = vibrating_string([1.0, 2.0, 0.5, 1.5], [1.0, 3.0, 2.0])
    heavy, bc4 = vibrating_string([1.0, 2.0, 0.5, 1.5], [4.0, 12.0, 8.0])
    assert np.allclose(eigenvalues(heavy, bc4).flat(), eigenvalues(eq, bc).flat() / 4, atol=1e-10)


def test_vibrating_string_rejects_bad_input():
    with pytest.raises(NonPositiveCoefficient):
        vibrating_string([1, 0, 1], [1, 1])
    with pytest.raises(ValidationError):
        vibrating_string([1, 1], [1, 1])


@pytest.mark.parametrize("alpha, beta", [
    ([0.25, 0.25], [0.25, 0.25]),
    ([0.5, 0.3, 0.6], [0.5, 0.7, 0.4]),
    ([0.2, 0.4, 0.1, 0.3], [0.3, 0.5, 0.6, 0.2]),
])
def test_random_walk_matches_generator(alpha, beta):
    eq, bc = random_walk(alpha, beta)
    T = random_walk_generator(alpha, beta)
    expected = np.sort(np.linalg.eigvals(-T).real)
    spec = eigenvalues(eq, bc).flat()
    assert np.allclose(spec, expected, atol=1e-10)
    assert np.all((spec >= -1e-12) & (spec <= 2 + 1e-12))


def test_random_walk_stochastic_diagonal():
    T = random_walk_generator([0.3, 0.6], [0.7, 0.4])
    assert np.allclose(np.diag(-T), 1.0)


def test_random_walk_rejects_excess_probability():
    with pytest.raises(InconsistentProbabilities):
        random_walk([0.6, 0.6], [0.6, 0.6])


def test_all_index_sets_size():
    for d in (1, 2, 3):
        sets = all_index_sets(d)
        assert len(sets) == 2 ** (2 * d)
        assert len(set(sets)) == len(sets)
        assert all(list(K) == sorted(K) for K in sets)


def test_chart_blocks_and_selectors():
    S = np.arange(16).reshape(4, 4).astype(float)
    S = S + S.T
    ch = BoundaryChart((4, 1), S)
    assert ch.K == (1, 4) and ch.K1 == (1,) and ch.K2 == (4,) and ch.r == 1
    assert np.array_equal(ch.E0, np.array([[0.0], [1.0]]))
    for blk, ref in zip((ch.S1, ch.S2, ch.S3), (S[:2, :2], S[:2, 2:], S[2:, 2:])):
        assert np.array_equal(blk, ref)


def test_same_boundary_condition_ignores_row_mixing():
    raw = chart_to_raw(BoundaryChart((2,), np.diag([1.0, -2.0])))
    for perm in itertools.permutations(range(2)):
        P = np.eye(2)[list(perm)] * 3
        assert same_boundary_condition(raw, BoundaryRaw(P @ raw.A, P @ raw.B))
    assert not same_boundary_condition(dirichlet(), neumann())
