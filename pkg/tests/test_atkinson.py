import numpy as np
import pytest
from hypothesis import given, strategies as st

from discrete_sl import numkernel as nk
from discrete_sl.atkinson import (
    AtkinsonProblem,
    atkinson_classify,
    atkinson_count,
    atkinson_layer,
    atkinson_spectrum,
    bc_transform,
    piecewise_constant,
    to_discrete,
)
from discrete_sl.errors import EmptyK, NotPositiveDefinite, ValidationError
from discrete_sl.numkernel import InertiaSignature as IS
from discrete_sl.problem import (
    BoundaryChart,
    BoundaryRaw,
    as_raw,
    dirichlet,
    neumann,
    random_chart,
    same_boundary_condition,
)

from builders import random_atkinson
from oracles import atkinson_direct_spectrum

st_seed = st.integers(0, 2**32 - 1)


@pytest.fixture
def unit_ap():
    return AtkinsonProblem(np.arange(6.0), [1.0, 1.0, 1.0], [0.0, 0.0, 0.0], [1.0, 1.0])


def test_to_discrete_unit(unit_ap):
    eq = to_discrete(unit_ap)
    assert (eq.d, eq.N) == (1, 3)
    assert np.array_equal(eq.Pinv.ravel(), [1, 1, 1, 1])
    assert np.array_equal(eq.Q.ravel(), [0, 0, 0])
    assert np.array_equal(eq.W.ravel(), [1, 1, 1])


@given(st_seed, st.integers(1, 3), st.integers(2, 4))
def test_to_discrete_has_identity_ends(seed, d, N):
    ap = random_atkinson(np.random.default_rng(seed), d, N)
    eq = to_discrete(ap)
    assert eq.N == N + 1
    assert np.array_equal(eq.Pinv[0], np.eye(d)) and np.array_equal(eq.Pinv[-1], np.eye(d))
    assert np.array_equal(eq.Pinv[1:-1], ap.Pinvhat)


def test_bc_transform_dirichlet():
    out = bc_transform(dirichlet())
    assert np.array_equal(out.A, np.eye(2))
    assert np.array_equal(out.B, [[-1, 0], [0, 0]])


def test_bc_transform_keeps_pure_derivative_conditions():
    out = bc_transform(neumann(2))
    assert np.array_equal(out.B, np.eye(4))


@given(st_seed, st.integers(1, 3))
def test_bc_transform_is_self_adjoint(seed, d):
    raw = as_raw(random_chart(np.random.default_rng(seed), d))
    out = bc_transform(raw)
    assert nk.num_rank(out.AB) == 2 * d
    assert np.allclose(out.A @ out.B.conj().T, out.B @ out.A.conj().T, atol=1e-10)


def test_count_examples(unit_ap):
    assert atkinson_count(dirichlet(), unit_ap) == 1
    full = BoundaryRaw(np.zeros((2, 2)), np.eye(2))
    assert atkinson_count(full, unit_ap) == (unit_ap.N + 1) * unit_ap.d


def test_unit_dirichlet_spectrum(unit_ap):
    # u_0 = u_2 = 0 leaves 2 u_1 = lam u_1
    spec = atkinson_spectrum(unit_ap, dirichlet())
    assert spec.pairs() == pytest.approx([(2.0, 1)], abs=1e-10)


@given(st_seed, st.integers(1, 2), st.integers(2, 4))
def test_reduction_matches_continuous_side(seed, d, N):
    rng = np.random.default_rng(seed)
    ap = random_atkinson(rng, d, N)
    chart = random_chart(rng, d)
    spec = atkinson_spectrum(ap, chart)
    raw = as_raw(chart)
    ref = atkinson_direct_spectrum(ap.What, ap.Qhat, ap.Pinvhat, raw.A, raw.B)
    assert spec.total == atkinson_count(chart, ap) == ref.size
    assert np.all(np.abs(spec.flat() - ref) <= 1e-8 * (1 + np.abs(ref)))


@given(st_seed, st.floats(0.2, 5.0))
def test_weight_homogeneity(seed, s):
    rng = np.random.default_rng(seed)
    ap = random_atkinson(rng, 2, 3)
    chart = random_chart(rng, 2)
    base = atkinson_spectrum(ap, chart).flat()
    scaled = atkinson_spectrum(ap.replace(What=s * ap.What), chart).flat()
    assert np.allclose(scaled, base / s, rtol=1e-8, atol=1e-8)


def test_refinement_invariance():
    rng = np.random.default_rng(4)
    d, N = 2, 3
    W = [nk.random_positive_definite(rng, d) for _ in range(N + 1)]
    Q = [nk.random_hermitian(rng, d) for _ in range(N + 1)]
    Pinv = [nk.random_positive_definite(rng, d) for _ in range(N)]
    coarse = piecewise_constant(np.arange(2 * N + 2.0), W, Q, Pinv)
    # split every interval into unequal pieces carrying the same integral
    finer_W = [[(0.3, 2 * w), (0.7, (w - 0.6 * w) / 0.7)] for w in W]
    finer_P = [[(0.25, p), (0.5, 0.5 * p), (0.25, 2 * p)] for p in Pinv]
    fine = piecewise_constant(np.arange(2 * N + 2.0), finer_W, Q, finer_P)
    # another partition, coefficient values rescaled so the integrals stay put
    lengths = np.array([0.5, 1, 2, 0.5, 1, 1, 0.5, 1])
    nodes = np.cumsum(np.concatenate([[0.0], lengths[:-1]]))
    moved = piecewise_constant(
        nodes,
        [w / lengths[2 * i] for i, w in enumerate(W)],
        [q / lengths[2 * i] for i, q in enumerate(Q)],
        [p / lengths[2 * j + 1] for j, p in enumerate(Pinv)],
    )
    chart = random_chart(rng, d)
    base = atkinson_spectrum(coarse, chart).flat()
    assert np.allclose(atkinson_spectrum(fine, chart).flat(), base, rtol=1e-8, atol=1e-8)
    assert np.allclose(atkinson_spectrum(moved, chart).flat(), base, rtol=1e-8, atol=1e-8)


def test_piecewise_constant_checks_piece_lengths():
    with pytest.raises(ValidationError):
        piecewise_constant(np.arange(6.0), [[(0.5, 1.0)], 1.0, 1.0], [0.0] * 3, [1.0, 1.0])


def test_problem_validation():
    with pytest.raises(NotPositiveDefinite):
        AtkinsonProblem(np.arange(6.0), [1.0, -1.0, 1.0], [0.0] * 3, [1.0, 1.0])
    with pytest.raises(ValidationError):
        AtkinsonProblem(np.array([0, 1, 1, 2, 3, 4.0]), [1.0] * 3, [0.0] * 3, [1.0, 1.0])
    with pytest.raises(ValidationError):
        AtkinsonProblem(np.arange(6.0), [1.0] * 3, [0.0] * 3, [1.0, 0.0])
    with pytest.raises(ValidationError):
        AtkinsonProblem(np.arange(4.0), [1.0] * 2, [0.0] * 2, [1.0])


def test_equation_paths_are_continuous():
    rng = np.random.default_rng(8)
    ap = random_atkinson(rng, 2, 3)
    chart = random_chart(rng, 2, (1, 3))
    dW = [nk.random_hermitian(rng, 2, 0.1) for _ in range(4)]
    dQ = [nk.random_hermitian(rng, 2) for _ in range(4)]
    dP = [nk.random_hermitian(rng, 2, 0.1) for _ in range(3)]

    def at(t):
        return ap.replace(What=ap.What + t * np.array(dW), Qhat=ap.Qhat + t * np.array(dQ),
                          Pinvhat=ap.Pinvhat + t * np.array(dP))

    worst = []
    for h in (0.1, 0.05):
        ts = np.arange(0.0, 1.0 + h / 2, h)
        vals = np.array([atkinson_spectrum(at(t), chart).flat() for t in ts])
        assert vals.shape[1] == atkinson_count(chart, ap)
        worst.append(np.abs(np.diff(vals, axis=0)).max())
    assert worst[1] < 0.75 * worst[0]


def test_layer_examples():
    assert atkinson_layer(neumann(2)) == 0
    assert atkinson_layer(dirichlet(2)) == 4


def test_classify_dirichlet_chart():
    sig = atkinson_classify(BoundaryChart((1, 2), np.zeros((2, 2))))
    assert sig.layer == 2
    assert sig.inertia == IS(0, 2, 0)


@pytest.mark.parametrize("s11, expected", [(-1.5, IS(1, 0, 0)), (0.0, IS(0, 1, 0)), (2.0, IS(0, 0, 1))])
def test_classify_single_index(s11, expected):
    S = nk.random_hermitian(np.random.default_rng(1), 4)
    S[0, 0] = s11
    sig = atkinson_classify(BoundaryChart((1,), S))
    assert sig.inertia == expected
    assert sig.layer == 4 - nk.num_rank(as_raw(BoundaryChart((1,), S)).B)


def test_classify_needs_nonempty_k():
    with pytest.raises(EmptyK):
        atkinson_classify(BoundaryChart((), np.zeros((4, 4))))


@given(st_seed, st.integers(1, 2))
def test_layer_predicts_count(seed, d):
    rng = np.random.default_rng(seed)
    ap = random_atkinson(rng, d, 3)
    chart = random_chart(rng, d)
    assert atkinson_count(chart, ap) == (ap.N + 1) * d - atkinson_layer(chart)


def test_transform_does_not_change_the_condition_when_A_vanishes():
    raw = BoundaryRaw(np.zeros((4, 4)), nk.random_unitary(np.random.default_rng(3), 4))
    assert same_boundary_condition(bc_transform(raw), raw)
