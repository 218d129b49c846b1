import numpy as np
import pytest
from hypothesis import given, strategies as st

from discrete_sl.errors import DegenerateEigenvalue, NotAnEigenvalue
from discrete_sl.problem import (
    BoundaryChart,
    SLEquation,
    as_raw,
    dirichlet,
    neumann,
    random_chart,
    random_equation,
)
from discrete_sl.spectrum import (
    D_matrix,
    Spectrum,
    char_poly,
    char_value,
    char_value_direct,
    count_formula,
    eigenfunction,
    eigenvalues,
    fundamental_solutions,
    pencil_oracle,
    solution_matrices,
    transfer_matrix,
)

from oracles import scipy_spectrum_of

st_seed = st.integers(0, 2**32 - 1)


def test_fundamental_solutions_by_hand(unit_eq):
    # y1 = y0 + u0, u1 = u0 - lam y1, y2 = y1 + u1, u2 = u1 - lam y2
    Phi, Psi = fundamental_solutions(unit_eq)
    assert np.allclose(Phi.coeffs, [[[-1, 0], [1, 2]], [[0, 0], [-1, -1]]])
    assert np.allclose(Psi.coeffs, [[[0, 1], [0, 1]], [[0, 0], [-2, -3]], [[0, 0], [1, 1]]])
    # y_2 is linear in lambda
    assert Phi.degree == 1


@given(st_seed, st.integers(1, 3), st.integers(2, 6))
def test_fundamental_solutions_agree_with_numeric_recursion(seed, d, N):
    rng = np.random.default_rng(seed)
    eq = random_equation(rng, d, N)
    Phi, Psi = fundamental_solutions(eq)
    num0 = solution_matrices(eq, 0.0)
    assert np.allclose(Phi.coeffs[0], num0[0]) and np.allclose(Psi.coeffs[0], num0[1])
    lam = rng.uniform(-2, 2)
    num = solution_matrices(eq, lam)
    assert np.allclose(Phi(lam), num[0]) and np.allclose(Psi(lam), num[1])


@given(st_seed, st.integers(1, 3), st.integers(2, 6))
def test_transfer_matrices_invertible(seed, d, N):
    rng = np.random.default_rng(seed)
    eq = random_equation(rng, d, N)
    for lam in rng.uniform(-5, 5, 5):
        state = np.eye(2 * d)
        for i in range(1, N + 1):
            state = transfer_matrix(eq, i, lam) @ state
        # every step [[I, p], [-c, I - c p]] has determinant one
        assert abs(np.linalg.det(state) - 1) <= 1e-12 * np.linalg.norm(state) ** 2


def test_char_poly_dirichlet(unit_eq):
    poly = char_poly(unit_eq, dirichlet())
    assert poly.degree == 1
    assert np.allclose(poly.monic(), [-2, 1])


def test_char_poly_neumann(unit_eq):
    poly = char_poly(unit_eq, neumann())
    assert poly.degree == 2
    assert np.allclose(poly.monic(), [0, -2, 1], atol=1e-12)


def test_count_formula_fixtures(unit_eq):
    assert count_formula(unit_eq, dirichlet()) == 1
    assert count_formula(unit_eq, neumann()) == 2


def test_shooting_determinant_equals_direct_product():
    rng = np.random.default_rng(7)
    for _ in range(5):
        eq = random_equation(rng, 2, 3)
        bc = random_chart(rng, 2)
        lam = rng.uniform(-1, 1)
        assert char_value(eq, bc, lam) == pytest.approx(char_value_direct(eq, bc, lam), rel=1e-9)


@given(st_seed, st.integers(1, 3), st.integers(2, 6))
def test_degree_equals_count_and_real(seed, d, N):
    rng = np.random.default_rng(seed)
    eq = random_equation(rng, d, N)
    bc = random_chart(rng, d)
    poly = char_poly(eq, bc)
    n = count_formula(eq, bc)
    assert poly.degree == n
    assert (N - 2) * d <= n <= N * d
    assert poly.imag_residue <= 1e-8


def test_spectrum_fixtures(unit_eq):
    assert eigenvalues(unit_eq, dirichlet()).pairs() == pytest.approx([(2.0, 1)], abs=1e-10)
    neu = eigenvalues(unit_eq, neumann())
    assert neu.flat() == pytest.approx([0.0, 2.0], abs=1e-10)
    assert pencil_oracle(unit_eq, dirichlet()).flat() == pytest.approx([2.0], abs=1e-10)
    assert pencil_oracle(unit_eq, neumann()).flat() == pytest.approx([0.0, 2.0], abs=1e-10)


def test_repeated_eigenvalues_of_decoupled_copies():
    # two identical scalar strings: every eigenvalue doubles
    eye = np.eye(2)
    eq = SLEquation([eye] * 4, [0 * eye] * 3, [eye] * 3)
    # a double root of an interpolated determinant carries about sqrt(eps) error
    for spec in (eigenvalues(eq, dirichlet(2)), pencil_oracle(eq, dirichlet(2))):
        assert spec.mults.tolist() == [2, 2]
        assert spec.values == pytest.approx([1.0, 3.0], abs=1e-7)


@given(st_seed, st.integers(1, 2), st.integers(2, 5))
def test_oracles_agree(seed, d, N):
    rng = np.random.default_rng(seed)
    eq = random_equation(rng, d, N)
    bc = random_chart(rng, d)
    a = eigenvalues(eq, bc)
    b = pencil_oracle(eq, bc)
    assert a.mults.tolist() == b.mults.tolist()
    assert np.all(np.abs(a.values - b.values) <= 1e-8 * (1 + np.abs(a.values)))
    ref = scipy_spectrum_of(eq, bc)
    assert a.total == ref.size
    assert np.all(np.abs(a.flat() - ref) <= 1e-8 * (1 + np.abs(ref)))


@given(st_seed, st.floats(0.1, 10))
def test_weight_homogeneity(seed, s):
    rng = np.random.default_rng(seed)
    eq = random_equation(rng, 2, 3)
    bc = random_chart(rng, 2)
    base = eigenvalues(eq, bc).flat()
    scaled = eigenvalues(eq.replace(W=s * eq.W), bc).flat()
    assert np.allclose(scaled, base / s, rtol=1e-8, atol=1e-8)


def test_eigenfunction_neumann(unit_eq):
    ef = eigenfunction(unit_eq, neumann(), 0.0)
    r = 1 / np.sqrt(2)
    assert ef.y.ravel() == pytest.approx([r, r, r, r], abs=1e-10)
    ef = eigenfunction(unit_eq, neumann(), 2.0)
    assert ef.y.ravel() == pytest.approx([r, r, -r, -r], abs=1e-10)
    assert ef.weighted_norm2() == pytest.approx(1.0)


@given(st_seed, st.integers(1, 2), st.integers(2, 5))
def test_eigenfunction_residuals(seed, d, N):
    rng = np.random.default_rng(seed)
    eq = random_equation(rng, d, N)
    bc = random_chart(rng, d)
    spec = eigenvalues(eq, bc)
    for lam, m in spec.pairs():
        if m > 1 or abs(lam) > 1e3:
            continue
        ef = eigenfunction(eq, bc, lam)
        scale = 1 + abs(lam)
        assert ef.weighted_norm2() == pytest.approx(1.0, rel=1e-10)
        assert ef.equation_residual() <= 1e-8 * scale
        assert ef.boundary_residual(as_raw(bc)) <= 1e-8 * scale
        flat = ef.y.ravel()
        k = np.argmax(np.abs(flat))
        assert abs(flat[k].imag) < 1e-12 and flat[k].real > 0


def test_eigenfunction_errors(unit_eq):
    with pytest.raises(NotAnEigenvalue):
        eigenfunction(unit_eq, neumann(), 1.0)
    eye = np.eye(2)
    eq = SLEquation([eye] * 4, [0 * eye] * 3, [eye] * 3)
    with pytest.raises(DegenerateEigenvalue):
        eigenfunction(eq, dirichlet(2), 1.0)


def test_spectrum_serialization():
    spec = Spectrum.from_pairs([(0.5, 1), (2.0, 3)])
    assert spec.total == 4
    assert spec.to_json() == {"eigenvalues": [{"lambda": 0.5, "mult": 1}, {"lambda": 2.0, "mult": 3}]}
    assert spec.to_csv().splitlines() == ["lambda,mult", "0.5,1", "2.0,3"]


def test_chart_and_raw_give_same_spectrum():
    rng = np.random.default_rng(11)
    eq = random_equation(rng, 2, 4)
    chart = random_chart(rng, 2, (1, 4))
    assert np.allclose(eigenvalues(eq, chart).flat(), eigenvalues(eq, as_raw(chart)).flat())


def test_empty_spectrum_possible(unit_eq):
    # N = 2, d = 1 and D = 0: every eigenvalue has escaped
    chart = BoundaryChart((1, 2), np.diag([1.0, 0.0]))
    assert np.allclose(D_matrix(unit_eq, chart), 0)
    assert count_formula(unit_eq, chart) == 0
    assert eigenvalues(unit_eq, chart).total == 0
