"""Perturbation series near a non-degenerate (L=1) exceptional point.

The eigenproblem ``(J^(K)(0) + lam V) Psi = eps Psi`` with ``Psi_1 = 1`` is
rewritten as ``(I + lam A Z) y = A r`` with ``y = (Psi_2, ..., Psi_K, Omega)``.
It is exact once ``Omega = y_K(eps) = 0``, which is the secular equation.
"""

from dataclasses import dataclass

import numpy as np

from .config import DEFAULT, Tolerances
from .errors import NumericalError
from .jordan import jordan_block, shift_matrix
from .numkit import (ComplexPolynomial, PolyMatrix, SpectrumReport, as_matrix,
                     as_square, poly_roots)


@dataclass(frozen=True, eq=False)
class L1Problem:
    V: np.ndarray
    lam: complex

    def __post_init__(self):
        v = as_square(self.V, "V")
        if v.shape[0] < 2:
            raise ValueError("K must be >= 2")
        object.__setattr__(self, "V", v)

    @property
    def K(self) -> int:
        return self.V.shape[0]

    def hamiltonian(self) -> np.ndarray:
        return as_matrix(jordan_block(self.K, 0.0) + self.lam * self.V)


@dataclass(frozen=True, eq=False)
class L1Series:
    order: int
    y: PolyMatrix                 # K x 1, entries polynomials in eps
    secular: ComplexPolynomial    # y_K, the component that must vanish


def build_A(K: int) -> PolyMatrix:
    """Lower-triangular ``A_{ij} = eps^(i-j)``."""
    c = np.zeros((K, K, K), dtype=complex)
    for i in range(K):
        for j in range(i + 1):
            c[i, j, i - j] = 1.0
    return PolyMatrix(c)


def build_A_inverse(K: int) -> PolyMatrix:
    """Two-diagonal inverse of :func:`build_A`: 1 on the diagonal, -eps below."""
    c = np.zeros((K, K, 2), dtype=complex)
    c[:, :, 0] = np.eye(K)
    c[:, :, 1] = -np.eye(K, k=-1)
    return PolyMatrix(c)


def build_r(problem: L1Problem) -> PolyMatrix:
    """First column of the equation moved to the right-hand side:
    ``r = (eps - lam V_11, -lam V_21, ..., -lam V_K1)``."""
    c = np.zeros((problem.K, 1, 2), dtype=complex)
    c[:, 0, 0] = -problem.lam * problem.V[:, 0]
    c[0, 0, 1] = 1.0
    return PolyMatrix(c)


def build_Z(V) -> np.ndarray:
    """V with its first column dropped and a zero column appended (= V Pi)."""
    V = as_square(V, "V")
    return as_matrix(V @ shift_matrix(V.shape[0]))


def series_terms(problem: L1Problem, order: int):
    """Terms ``(-lam)^t (A Z)^t A r`` for t = 0..order."""
    if order < 0:
        raise ValueError("order must be >= 0")
    A = build_A(problem.K)
    Z = build_Z(problem.V)
    term = A @ build_r(problem)
    terms = [term]
    for _ in range(order):
        term = A @ (Z @ term) * (-problem.lam)
        terms.append(term)
    return terms


def series_solution(problem: L1Problem, order: int) -> L1Series:
    terms = series_terms(problem, order)
    y = terms[0]
    for t in terms[1:]:
        y = y + t
    return L1Series(order, y, y[problem.K - 1, 0])


def default_order(K: int) -> int:
    return 2 * K


def solve_secular(problem: L1Problem, order=None, tol: Tolerances = DEFAULT) -> SpectrumReport:
    """All roots of the truncated secular polynomial ``y_K(eps)``.

    A truncation of order t has degree up to (t+1)(K-1)+1, so besides the K
    physical roots near eps=0 it has spurious ones far outside the region
    where the series converges; :meth:`SpectrumReport.smallest` with
    ``problem.K`` picks the physical branch.
    """
    order = default_order(problem.K) if order is None else order
    sec = series_solution(problem, order).secular
    if sec.is_zero():
        raise NumericalError("secular polynomial vanishes identically")
    if sec.degree == 0:
        raise NumericalError("secular polynomial is a nonzero constant; no roots")
    return SpectrumReport(poly_roots(sec, tol), "secular", tol.reality)


def reconstruct_psi(series: L1Series, eps) -> np.ndarray:
    """``Psi = (1, y_1(eps), ..., y_{K-1}(eps))``."""
    y = series.y(eps)[:, 0]
    return np.concatenate([[1.0 + 0j], y[:-1]])


def schrodinger_residual(problem: L1Problem, eps, psi) -> float:
    h = problem.hamiltonian()
    return float(np.linalg.norm(h @ psi - eps * psi))


def admissible_perturbation(mu, lam: float, upper=None) -> np.ndarray:
    """The admissible product ``lam * V``.

    Entry (j, k) is ``lam^((j-k+1)/2) mu_jk`` on and below the diagonal and
    ``upper_jk`` strictly above it (the upper triangle is unconstrained).
    """
    mu = as_square(mu, "mu")
    if not lam > 0:
        raise ValueError("lambda must be positive")
    K = mu.shape[0]
    upper = np.zeros((K, K)) if upper is None else as_square(upper, "upper")
    if upper.shape != mu.shape:
        raise ValueError("mu and upper must have the same shape")
    j, k = np.indices((K, K))
    lower = np.power(float(lam), (j - k + 1) / 2.0) * mu
    return as_matrix(np.where(j >= k, lower, upper))


def rescale_decomposition(admissible, lam: float):
    """Split ``lam V = lam^(1/2) B V_red B^-1`` with ``B_jj = lam^(j/2)``.

    Returns ``(B, V_red)``.
    """
    admissible = as_square(admissible, "admissible")
    if not lam > 0:
        raise ValueError("lambda must be positive")
    K = admissible.shape[0]
    b = np.power(float(lam), np.arange(1, K + 1) / 2.0)
    v_red = admissible * b[None, :] / b[:, None] / np.sqrt(lam)
    return as_matrix(np.diag(b)), as_matrix(v_red)
