import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from numpy.testing import assert_allclose, assert_array_equal

from eppert import l1
from eppert.errors import NumericalError
from eppert.jordan import PartitionSpec
from eppert.lgeq2 import (LProblem, build_block_A, build_block_Pi, build_r_L, dominant_roots,
                          in_domain, leading_order_system, normalize_omega, reassemble_psi,
                          rescaled_problem, rescaled_secular_polynomial, schrodinger_residual,
                          search_domain, series_solution_L, solve_compat_system,
                          solve_leading_order, solve_rescaled_leading_order)
from eppert.numkit import eig_oracle, match_distance


def random_V(rng, K):
    return rng.normal(size=(K, K)) + 1j * rng.normal(size=(K, K))


# -- building blocks ---------------------------------------------------------

def test_block_A():
    A = build_block_A(PartitionSpec((2, 2)))
    eps = 0.3
    expected = np.zeros((4, 4))
    expected[:2, :2] = expected[2:, 2:] = [[1, 0], [eps, 1]]
    assert_allclose(A(eps), expected)
    assert_array_equal(A(0.0), np.eye(4))
    inv = np.linalg.inv(build_block_A(PartitionSpec((3, 2)))(eps))
    assert_allclose(inv, np.eye(5) - eps * build_block_Pi(PartitionSpec((3, 2))), atol=1e-15)


def test_block_Pi():
    pi = build_block_Pi(PartitionSpec((2, 2)))
    expected = np.zeros((4, 4))
    expected[1, 0] = expected[3, 2] = 1
    assert_array_equal(pi, expected)
    pi = build_block_Pi(PartitionSpec((4, 2)))
    assert not np.any(np.linalg.matrix_power(pi, 4))
    assert not np.any(pi[4:, :4]) and not np.any(pi[:4, 4:])


def test_r_unperturbed():
    r = build_r_L(LProblem(PartitionSpec((3, 2)), np.ones((5, 5)), 0.0))
    w = np.array([0.6, 0.8])
    assert_allclose(r(0.5) @ w, [0.5 * 0.6, 0, 0, 0.5 * 0.8, 0])


def test_r_all_ones():
    lam, eps = 0.1, 0.3
    wa, wb = 0.6, 0.8
    r = build_r_L(LProblem(PartitionSpec((2, 2)), np.ones((4, 4)), lam))
    s = lam * (wa + wb)
    assert_allclose(r(eps) @ [wa, wb], [eps * wa - s, -s, eps * wb - s, -s])
    assert r.degree == 1


def test_problem_validation():
    with pytest.raises(ValueError):
        LProblem(PartitionSpec((2, 1)), np.ones((3, 3)), 0.1)
    with pytest.raises(ValueError):
        LProblem(PartitionSpec((2, 2)), np.ones((3, 3)), 0.1)


# -- series ------------------------------------------------------------------

def test_series_order0():
    p = LProblem(PartitionSpec((3, 2)), random_V(np.random.default_rng(0), 5), 0.01)
    s = series_solution_L(p, 0)
    assert s.y.equals(build_block_A(p.partition) @ build_r_L(p))


def test_unperturbed_compat():
    p = LProblem(PartitionSpec((3, 2)), random_V(np.random.default_rng(1), 5), 0.0)
    s = series_solution_L(p, 3)
    eps, w = 0.7, np.array([0.3, -1.2])
    assert_allclose(s.compat(eps) @ w, [eps**3 * w[0], eps**2 * w[1]], rtol=1e-14)


def test_compat_rows_are_block_ends():
    p = LProblem(PartitionSpec((3, 2, 2)), random_V(np.random.default_rng(2), 7), 0.01)
    s = series_solution_L(p, 2)
    assert_array_equal(s.compat.coeffs, s.y.coeffs[[2, 4, 6]])


def test_single_block_reduces_to_l1():
    V = random_V(np.random.default_rng(3), 4)
    a = series_solution_L(LProblem(PartitionSpec((4,)), V, 1e-3), 5)
    b = l1.series_solution(l1.L1Problem(V, 1e-3), 5)
    assert_array_equal(a.y.coeffs, b.y.coeffs)


def test_negative_order():
    with pytest.raises(ValueError):
        series_solution_L(LProblem(PartitionSpec((2, 2)), np.ones((4, 4)), 0.1), -1)


# -- leading order -----------------------------------------------------------

def test_leading_order_unperturbed():
    p = LProblem(PartitionSpec((3, 2)), random_V(np.random.default_rng(4), 5), 0.0)
    det = leading_order_system(p).determinant()
    assert_allclose(det.coeffs, [0, 0, 0, 0, 0, 1], atol=0)


def test_order0_compat_is_minus_leading_order():
    p = LProblem(PartitionSpec((3, 2)), random_V(np.random.default_rng(5), 5), 0.01)
    assert (series_solution_L(p, 0).compat + leading_order_system(p).matrix).equals(
        series_solution_L(p, 0).compat * 0)


def test_reduced_form_entries():
    V = random_V(np.random.default_rng(6), 5)
    lam = 0.01
    S = leading_order_system(LProblem(PartitionSpec((3, 2)), V, lam), reduced=True).matrix
    eps = 0.2
    expected = [[lam * V[2, 0] - eps**3, lam * V[2, 3]], [lam * V[4, 0], lam * V[4, 3] - eps**2]]
    assert_allclose(S(eps), expected, rtol=1e-14)


def test_equal_blocks_reduce_to_eigenproblem():
    V = random_V(np.random.default_rng(7), 6)
    lam = 0.01
    p = LProblem(PartitionSpec((3, 3)), V, lam)
    rep = solve_leading_order(p, reduced=True)
    x = lam * np.array([[V[2, 0], V[2, 3]], [V[5, 0], V[5, 3]]])
    assert match_distance(rep.roots**3, np.repeat(np.linalg.eigvals(x), 3)) < 1e-12


def test_leading_order_omega_in_kernel():
    p = LProblem(PartitionSpec((3, 2)), random_V(np.random.default_rng(8), 5), 1e-3)
    rep = solve_leading_order(p)
    S = leading_order_system(p).matrix
    for eps, w in zip(rep.roots, rep.vectors):
        assert_allclose(np.sum(w**2), 1, atol=1e-12)
        assert np.linalg.norm(S(eps) @ w) <= 1e-10


def test_equal_blocks_roots_on_circle():
    V = np.random.default_rng(9).uniform(-1, 1, (6, 6))
    rep = solve_leading_order(LProblem(PartitionSpec((3, 3)), V, 0.01), reduced=True)
    assert not rep.all_real
    x = rep.roots**3
    for i in range(6):
        group = rep.roots[np.abs(x - x[i]) <= 1e-8 * abs(x[i])]
        assert len(group) == 3
        ang = np.sort(np.angle(group))
        gaps = np.diff(np.concatenate([ang, [ang[0] + 2 * np.pi]]))
        assert_allclose(gaps, 2 * np.pi / 3, atol=1e-6)


def test_unequal_blocks_dominant_scaling():
    V = np.random.default_rng(10).uniform(-1, 1, (7, 7))
    part = PartitionSpec((4, 3))

    def dominant(lam):
        return dominant_roots(solve_leading_order(LProblem(part, V, lam), reduced=True), part)

    small, large = dominant(1e-8), dominant(1e-4)
    slope = np.log(np.mean(np.abs(large)) / np.mean(np.abs(small))) / np.log(1e4)
    assert abs(slope - 1 / 3) <= 0.05 / 3
    assert np.any(np.abs(small.imag) > 1e-8 * np.abs(small))


# -- rescaled regime ---------------------------------------------------------

def test_rescaled_lambda_one():
    W = np.random.default_rng(11).normal(size=(5, 5))
    assert_array_equal(rescaled_problem(W, PartitionSpec((3, 2)), 1.0).V, W)


def test_rescaled_scaling_map():
    W = np.random.default_rng(12).normal(size=(6, 6))
    lam = 0.01
    V = rescaled_problem(W, PartitionSpec((3, 3)), lam).V
    # lam * V on block first columns carries lam^((row index within block)/2)
    for col in (0, 3):
        for o in (0, 3):
            assert_allclose(lam * V[o:o + 3, col], lam ** (np.arange(1, 4) / 2) * W[o:o + 3, col])
    assert_array_equal(V[:, [1, 2, 4, 5]], W[:, [1, 2, 4, 5]])


def test_rescaled_rejects_bad_lambda():
    with pytest.raises(ValueError):
        rescaled_problem(np.eye(4), PartitionSpec((2, 2)), 0.0)


@pytest.mark.parametrize("parts", [(2, 2), (3, 2), (3, 3), (4, 2, 2)])
def test_e_polynomial_lambda_free(parts):
    part = PartitionSpec(parts)
    W = np.random.default_rng(13).uniform(-1, 1, (part.K, part.K))
    a = rescaled_secular_polynomial(W, part, 1e-2)
    b = rescaled_secular_polynomial(W, part, 1e-6)
    assert a.degree == part.K
    assert_allclose(a.coeffs, b.coeffs, atol=1e-12)


def test_rescaled_zero_W_degenerate():
    rep = solve_rescaled_leading_order(np.zeros((6, 6)), PartitionSpec((3, 3)), 0.01)
    assert_array_equal(rep.roots, np.zeros(6))
    assert not in_domain(rep)


def test_rescaled_roots_match_leading_order():
    W = np.random.default_rng(14).uniform(-1, 1, (5, 5))
    lam = 1e-4
    part = PartitionSpec((3, 2))
    E = solve_rescaled_leading_order(W, part, lam).roots
    lo = solve_leading_order(rescaled_problem(W, part, lam)).roots
    assert match_distance(np.sqrt(lam) * E, lo) < 1e-10


def test_search_domain():
    W, rep, tries = search_domain(PartitionSpec((3, 3)), seed=4)
    assert in_domain(rep) and len(rep.roots) == 6
    assert np.abs(W).max() <= 1
    again, _, tries2 = search_domain(PartitionSpec((3, 3)), seed=4)
    assert_array_equal(W, again) and tries == tries2


def test_search_domain_gives_up():
    with pytest.raises(NumericalError):
        search_domain(PartitionSpec((3, 3)), seed=0, max_tries=1)


# -- full compatibility system -----------------------------------------------

def test_compat_unperturbed_seed():
    p = LProblem(PartitionSpec((2, 2)), np.ones((4, 4)), 0.0)
    res = solve_compat_system(p, 3, seeds=[(0.0, [0.6, 0.8])])
    assert len(res) == 1 and res.roots[0].eps == 0


def test_compat_22_matches_oracle():
    p = LProblem(PartitionSpec((2, 2)), random_V(np.random.default_rng(15), 4), 1e-4)
    res = solve_compat_system(p, 6)
    assert match_distance(res.eps, eig_oracle(p.hamiltonian()).roots) < 1e-7
    assert all(r.residual <= 1e-10 for r in res)


def test_compat_singular_seed_isolated():
    p = LProblem(PartitionSpec((2, 2)), random_V(np.random.default_rng(16), 4), 1e-4)
    good = solve_compat_system(p, 4)
    seeds = [(np.nan, [1.0, 0.0])] + [(r.eps, r.omega) for r in good]
    res = solve_compat_system(p, 4, seeds=seeds, grid=False)
    assert len(res.failed) >= 1
    assert match_distance(res.eps, good.eps) < 1e-12


def test_nlo_improves():
    W, rep, _ = search_domain(PartitionSpec((2, 2)), seed=7)
    p = rescaled_problem(W, PartitionSpec((2, 2)), 1e-2)
    oracle = eig_oracle(p.hamiltonian()).roots
    err0 = match_distance(solve_compat_system(p, 0).eps, oracle)
    err1 = match_distance(solve_compat_system(p, 1).eps, oracle)
    assert err1 < err0


def test_omega_gauge():
    w = normalize_omega([-3.0, 4.0j])
    assert_allclose(np.sum(w**2), 1)
    assert w[0].real > 0 or (w[0].real == 0 and w[0].imag > 0)
    assert_allclose(normalize_omega([-3.0, 4.0]), [0.6, -0.8])
    assert_allclose(normalize_omega([0.0, -2.0]), [0, 1])


@settings(max_examples=12, deadline=None)
@given(st.sampled_from([(2, 2), (3, 2), (3, 3), (4, 2), (2, 2, 2), (4, 4)]),
       st.integers(min_value=0, max_value=2**32 - 1), st.sampled_from([1e-3, 1e-4, 1e-5]))
def test_exact_form_and_completeness(parts, seed, lam):
    part = PartitionSpec(parts)
    p = LProblem(part, random_V(np.random.default_rng(seed), part.K), lam)
    order = 2 * max(parts)
    series = series_solution_L(p, order)
    res = solve_compat_system(p, order)
    for r in res:
        psi = reassemble_psi(p, series, r.eps, r.omega)
        assert schrodinger_residual(p, r.eps, psi) <= 1e-8
    if part.K <= 6:
        assert match_distance(res.eps, eig_oracle(p.hamiltonian()).roots) <= 1e-6
