import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from numpy.testing import assert_allclose, assert_array_equal

from eppert.bosehubbard import BHParams, build_hamiltonian
from eppert.config import Tolerances
from eppert.errors import ConvergenceError, SingularMatrixError
from eppert.jordan import jordan_block, shift_matrix
from eppert.l1 import build_A, build_A_inverse
from eppert.numkit import (ComplexPolynomial, PolyMatrix, char_poly, eig_oracle,
                           identity, mat_inv, mat_mul, match_distance, matrix_from_json,
                           matrix_to_json, poly_roots, quasi_hermiticity_residual)


def random_complex(rng, n, m=None):
    m = n if m is None else m
    return rng.normal(size=(n, m)) + 1j * rng.normal(size=(n, m))


def naive_matmul(a, b):
    out = np.zeros((a.shape[0], b.shape[1]), dtype=complex)
    for i in range(a.shape[0]):
        for j in range(b.shape[1]):
            for k in range(a.shape[1]):
                out[i, j] += a[i, k] * b[k, j]
    return out


# -- mat_mul -----------------------------------------------------------------

def test_mat_mul_identity():
    m = random_complex(np.random.default_rng(0), 3)
    assert_array_equal(mat_mul(identity(3), m), m)


def test_shift_cubed_vanishes():
    p = shift_matrix(3)
    assert_array_equal(mat_mul(mat_mul(p, p), p), np.zeros((3, 3)))


def test_mat_mul_matches_triple_loop():
    rng = np.random.default_rng(1)
    a, b = random_complex(rng, 4), random_complex(rng, 4)
    assert_allclose(mat_mul(a, b), naive_matmul(a, b), atol=1e-14)


def test_mat_mul_dimension_mismatch():
    with pytest.raises(ValueError):
        mat_mul(np.ones((2, 3)), np.ones((2, 3)))


# -- mat_inv -----------------------------------------------------------------

def test_inv_identity():
    assert_allclose(mat_inv(identity(5)), np.eye(5), atol=0)


def test_inv_of_A_is_two_diagonal():
    for eps in (0.3, 2.0 - 1.0j):
        assert_allclose(mat_inv(build_A(4)(eps)), build_A_inverse(4)(eps), atol=1e-12)


def test_inv_random_multiply_back():
    rng = np.random.default_rng(2)
    a = random_complex(rng, 6) + 4 * np.eye(6)
    assert_allclose(a @ mat_inv(a), np.eye(6), atol=1e-10)


def test_inv_singular_reports_pivot():
    a = np.array([[1.0, 2.0], [2.0, 4.0]])
    with pytest.raises(SingularMatrixError) as info:
        mat_inv(a)
    assert info.value.pivot is not None


def test_inv_rejects_ill_conditioned():
    a = np.diag([1.0, 1e-9])
    with pytest.raises(SingularMatrixError):
        mat_inv(a)


@settings(max_examples=40, deadline=None)
@given(st.integers(min_value=0, max_value=2**32 - 1), st.integers(min_value=1, max_value=7))
def test_double_inverse_roundtrip(seed, n):
    rng = np.random.default_rng(seed)
    a = random_complex(rng, n) + 3 * n * np.eye(n)
    assert np.linalg.cond(a) <= 1e6
    assert_allclose(mat_inv(mat_inv(a)), a, atol=1e-9 * np.abs(a).max())


# -- char_poly ---------------------------------------------------------------

def test_char_poly_nilpotent_block():
    assert char_poly(jordan_block(3, 0.0)) == ComplexPolynomial([0, 0, 0, 1])


def test_char_poly_diagonal():
    assert char_poly(np.diag([1.0, 2.0])).allclose(ComplexPolynomial([2, -3, 1]), atol=1e-14)


def test_char_poly_bose_hubbard_roots():
    roots = poly_roots(char_poly(build_hamiltonian(BHParams(4, 0.0))))
    assert match_distance(roots, [-3, -1, 1, 3]) < 1e-12


def test_char_poly_size_limit():
    with pytest.raises(ValueError):
        char_poly(np.eye(17))


def test_char_poly_block_diagonal_factorizes():
    rng = np.random.default_rng(3)
    a, b = random_complex(rng, 3), random_complex(rng, 4)
    full = np.zeros((7, 7), dtype=complex)
    full[:3, :3], full[3:, 3:] = a, b
    prod = char_poly(a) * char_poly(b)
    assert_allclose(char_poly(full).coeffs, prod.coeffs, atol=1e-10)


# -- poly_roots --------------------------------------------------------------

def test_roots_triple_zero():
    assert_array_equal(poly_roots(ComplexPolynomial([0, 0, 0, 1])), np.zeros(3))


def test_roots_quadratic():
    r = np.sort(poly_roots(ComplexPolynomial([2, -3, 1])).real)
    assert_allclose(r, [1, 2], atol=1e-14)


def test_roots_on_complex_circle():
    lam_x0 = 1e-6 * (0.3 + 0.4j)
    r = poly_roots(ComplexPolynomial([-lam_x0, 0, 0, 1]))
    assert_allclose(np.abs(r), abs(lam_x0) ** (1 / 3), rtol=1e-12)
    ang = np.sort(np.angle(r))
    gaps = np.diff(np.concatenate([ang, [ang[0] + 2 * np.pi]]))
    assert_allclose(gaps, 2 * np.pi / 3, atol=1e-12)


def test_roots_constant_rejected():
    with pytest.raises(ValueError):
        poly_roots(ComplexPolynomial([1.0]))


def test_roots_nonconvergence_reports_residuals():
    p = ComplexPolynomial(np.random.default_rng(4).normal(size=30))
    with pytest.raises(ConvergenceError) as info:
        poly_roots(p, Tolerances(max_iter=1))
    assert info.value.residuals is not None


@settings(max_examples=40, deadline=None)
@given(st.lists(st.complex_numbers(max_magnitude=5, allow_nan=False, allow_infinity=False),
                min_size=1, max_size=8))
def test_roots_residual_bound(roots):
    p = ComplexPolynomial.from_roots(roots)
    z = poly_roots(p)
    scale = np.abs(p.coeffs) @ np.abs(z[None, :]) ** np.arange(len(p.coeffs))[:, None]
    assert np.all(np.abs(p(z)) <= 1e-9 * np.maximum(scale, 1e-300))


# -- eig_oracle --------------------------------------------------------------

def test_oracle_nilpotent_direct_sum():
    j = np.zeros((4, 4))
    j[0, 1] = j[2, 3] = 1
    assert_array_equal(eig_oracle(j).roots, np.zeros(4))


def test_oracle_bose_hubbard_closed_form():
    roots = eig_oracle(build_hamiltonian(BHParams(5, 0.6))).roots
    assert match_distance(roots, 0.8 * np.array([-4, -2, 0, 2, 4])) < 1e-10


def test_oracle_matches_expanded_cubic():
    lam = 1e-6
    h = jordan_block(3, 0.0) + lam * np.ones((3, 3))
    # det(x - h) for this h, expanded by hand
    cubic = ComplexPolynomial([-lam, -2 * lam, -3 * lam, 1])
    assert match_distance(eig_oracle(h).roots, poly_roots(cubic)) < 1e-12


def test_oracle_reality_flags():
    rep = eig_oracle(np.array([[0.0, 1.0], [-1.0, 0.0]]))
    assert not rep.all_real
    rep = eig_oracle(np.diag([1.0, -2.0]))
    assert rep.all_real and rep.is_distinct()


@settings(max_examples=30, deadline=None)
@given(st.integers(min_value=0, max_value=2**32 - 1), st.integers(min_value=1, max_value=10))
def test_oracle_trace(seed, n):
    a = random_complex(np.random.default_rng(seed), n)
    s = eig_oracle(a).roots.sum()
    assert abs(s - np.trace(a)) <= 1e-8 * n * np.linalg.norm(a)


@settings(max_examples=30, deadline=None)
@given(st.lists(st.integers(min_value=-20, max_value=20).map(lambda k: k / 4),
                min_size=1, max_size=10))
def test_oracle_diagonal_with_repeats(d):
    assert match_distance(eig_oracle(np.diag(d)).roots, d) <= 1e-9 * max(1.0, max(map(abs, d)))


@settings(max_examples=30, deadline=None)
@given(st.integers(min_value=0, max_value=2**32 - 1), st.integers(min_value=1, max_value=10))
def test_oracle_diagonal_random(seed, n):
    d = np.random.default_rng(seed).uniform(-10, 10, n)
    assert match_distance(eig_oracle(np.diag(d)).roots, d) <= 1e-9 * max(1.0, np.abs(d).max())


def test_roots_multiple_merged():
    p = ComplexPolynomial.from_roots([0.1, 0.1, 0.1, -2.0, 3.0 + 1j, 3.0 + 1j])
    assert match_distance(poly_roots(p), [0.1, 0.1, 0.1, -2.0, 3 + 1j, 3 + 1j]) < 1e-12


def test_roots_close_but_distinct_kept():
    r = poly_roots(ComplexPolynomial.from_roots([1.0, 1.0 + 1e-4]))
    assert match_distance(r, [1.0, 1.0 + 1e-4]) < 1e-10


# -- quasi-Hermiticity -------------------------------------------------------

def test_quasi_hermitian_identity_metric():
    h = np.array([[1.0, 2 + 1j], [2 - 1j, -3.0]])
    assert quasi_hermiticity_residual(h, np.eye(2)) <= 1e-12
    assert quasi_hermiticity_residual(np.diag([1.0, 2.0]), np.eye(2)) == 0


def test_quasi_hermitian_random():
    h = random_complex(np.random.default_rng(5), 4)
    assert_allclose(quasi_hermiticity_residual(h, np.eye(4)), np.linalg.norm(h.conj().T - h), rtol=1e-14)


def test_quasi_hermitian_bad_metric():
    with pytest.raises(ValueError):
        quasi_hermiticity_residual(np.eye(2), np.array([[1.0, 1.0], [0.0, 1.0]]))
    with pytest.raises(ValueError):
        quasi_hermiticity_residual(np.eye(2), np.diag([1.0, -1.0]))


# -- serialization and polynomial matrices -----------------------------------

def test_matrix_json_roundtrip():
    a = random_complex(np.random.default_rng(6), 2, 3)
    obj = matrix_to_json(a)
    assert set(obj) == {"rows", "cols", "data"}
    assert_array_equal(matrix_from_json(obj), a)


@pytest.mark.parametrize("obj", [
    {"rows": 2, "cols": 2, "data": [[1, 0]]},
    {"rows": 1, "cols": 1},
    {"rows": 1, "cols": 1, "data": [[1, 0, 0]]},
])
def test_matrix_json_malformed(obj):
    with pytest.raises(ValueError):
        matrix_from_json(obj)


def test_non_finite_rejected():
    with pytest.raises(ValueError):
        mat_mul(np.array([[np.nan]]), np.eye(1))


def test_polymatrix_det_matches_numeric():
    rng = np.random.default_rng(7)
    pm = PolyMatrix(random_complex(rng, 9, 3).reshape(3, 3, 3))
    for x in (0.5, -1.2 + 0.3j):
        assert_allclose(pm.det()(x), np.linalg.det(pm(x)), rtol=1e-12)


def test_match_distance_size_mismatch():
    assert match_distance([1, 2], [1]) == np.inf
