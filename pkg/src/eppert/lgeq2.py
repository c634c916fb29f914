"""Perturbation theory near EPs of geometric multiplicity L >= 2.

The unperturbed Hamiltonian is the direct sum of L nilpotent Jordan blocks
of sizes ``N_1 >= ... >= N_L`` (for L=2 these are M and N). Each block of
``Psi`` is split as ``psi_j = e omega_j + Pi y_j``; the exact equation
becomes ``(I + lam Acal V Pi) y = Acal r`` and is equivalent to the
original eigenproblem once the last entry of every block of ``y`` vanishes.
Because ``r`` is linear in ``omega`` those L compatibility conditions read
``C(eps) omega = 0`` with an L x L matrix of polynomials ``C``.
"""

from dataclasses import dataclass, field
from itertools import combinations

import numpy as np
import scipy.linalg

from .config import DEFAULT, Tolerances
from .errors import NumericalError
from .jordan import JordanSpec, PartitionSpec, jordan_direct_sum, shift_matrix
from .l1 import build_A
from .numkit import (ComplexPolynomial, PolyMatrix, SpectrumReport, as_matrix,
                     as_square, block_diag_poly, poly_roots)


@dataclass(frozen=True, eq=False)
class LProblem:
    """``(J^(N_1) + ... + J^(N_L))(0) + lam V``, all parts >= 2.

    L=1 is accepted so that the single-block path can be compared against
    :mod:`eppert.l1`; the solvers below are meant for L >= 2.
    """

    partition: PartitionSpec
    V: np.ndarray
    lam: complex

    def __post_init__(self):
        if not isinstance(self.partition, PartitionSpec):
            object.__setattr__(self, "partition", PartitionSpec.parse(self.partition))
        v = as_square(self.V, "V")
        if v.shape[0] != self.partition.K:
            raise ValueError(f"V is {v.shape[0]}x{v.shape[0]}, partition sums to {self.partition.K}")
        if min(self.partition.parts) < 2:
            raise ValueError("all parts must be >= 2")
        object.__setattr__(self, "V", v)

    @property
    def K(self) -> int:
        return self.partition.K

    @property
    def L(self) -> int:
        return self.partition.L

    def block(self, j, k) -> np.ndarray:
        """The V^(N_j, N_k) sub-block."""
        o, p = self.partition.offsets, self.partition.parts
        return self.V[o[j]:o[j] + p[j], o[k]:o[k] + p[k]]

    def hamiltonian(self) -> np.ndarray:
        return as_matrix(jordan_direct_sum(JordanSpec(self.partition)) + self.lam * self.V)

    @property
    def last_indices(self):
        return [o + p - 1 for o, p in zip(self.partition.offsets, self.partition.parts)]


@dataclass(frozen=True, eq=False)
class LSeries:
    order: int
    y: PolyMatrix       # K x L: y(eps) @ omega is the solution vector
    compat: PolyMatrix  # L x L: rows of y at the last entry of each block

    def evaluate(self, eps, omega) -> np.ndarray:
        return self.y(eps) @ np.asarray(omega, dtype=complex)


def build_block_A(partition: PartitionSpec) -> PolyMatrix:
    return block_diag_poly([build_A(n) for n in partition.parts])


def build_block_Pi(partition: PartitionSpec) -> np.ndarray:
    return as_matrix(scipy.linalg.block_diag(*[shift_matrix(n) for n in partition.parts]))


def block_first_vectors(partition: PartitionSpec) -> np.ndarray:
    """K x L matrix whose column j is the first basis vector of block j."""
    e = np.zeros((partition.K, partition.L))
    for j, o in enumerate(partition.offsets):
        e[o, j] = 1.0
    return as_matrix(e)


def build_r_L(problem: LProblem) -> PolyMatrix:
    """``r = (eps E - lam V E) omega`` returned as the K x L coefficient
    matrix of omega."""
    E = block_first_vectors(problem.partition)
    c = np.zeros((problem.K, problem.L, 2), dtype=complex)
    c[:, :, 0] = -problem.lam * (problem.V @ E)
    c[:, :, 1] = E
    return PolyMatrix(c)


def series_solution_L(problem: LProblem, order: int) -> LSeries:
    """``y = sum_t (-lam Acal V Pi)^t Acal r`` truncated at ``order``."""
    if order < 0:
        raise ValueError("order must be >= 0")
    A = build_block_A(problem.partition)
    VPi = problem.V @ build_block_Pi(problem.partition)
    term = A @ build_r_L(problem)
    y = term
    for _ in range(order):
        term = A @ (VPi @ term) * (-problem.lam)
        y = y + term
    return LSeries(order, y, PolyMatrix(y.coeffs[problem.last_indices]))


# -- leading order ----------------------------------------------------------

@dataclass(frozen=True, eq=False)
class LeadingOrderSystem:
    """``S(eps) omega = 0`` with
    ``S_jk = sum_m eps^m lam V^(j,k)_{N_j - m, 1} - delta_jk eps^N_j``.

    The reduced form keeps only the m = 0 terms.
    """

    matrix: PolyMatrix
    reduced: bool

    @property
    def description(self) -> str:
        kind = "reduced dominant" if self.reduced else "leading-order"
        L = self.matrix.shape[0]
        return f"{kind} {L}x{L} generalized eigenvalue problem, det S(eps) = 0"

    def determinant(self) -> ComplexPolynomial:
        return self.matrix.det()


def leading_order_system(problem: LProblem, reduced: bool = False) -> LeadingOrderSystem:
    parts = problem.partition.parts
    L = problem.L
    deg = max(parts)
    c = np.zeros((L, L, deg + 1), dtype=complex)
    for j in range(L):
        nj = parts[j]
        for k in range(L):
            col = problem.block(j, k)[:, 0]
            for m in range(1 if reduced else nj):
                c[j, k, m] = problem.lam * col[nj - 1 - m]
        c[j, j, nj] -= 1.0
    return LeadingOrderSystem(PolyMatrix(c), reduced)


def normalize_omega(omega) -> np.ndarray:
    """Scale to sum(omega**2) = 1 (unconjugated) and fix the sign so that the
    first significant component has positive real part."""
    w = np.asarray(omega, dtype=complex)
    s = np.sqrt(np.sum(w * w))
    if abs(s) > 1e-12 * np.linalg.norm(w):
        w = w / s
    else:  # isotropic vector; fall back to the Hermitian norm
        w = w / np.linalg.norm(w)
    idx = np.flatnonzero(np.abs(w) > 1e-12 * np.max(np.abs(w)))[0]
    lead = w[idx]
    if lead.real < 0 or (lead.real == 0 and lead.imag < 0):
        w = -w
    return w


def _kernel_vector(m):
    _, _, vh = np.linalg.svd(m)
    return vh[-1].conj()


def solve_leading_order(problem: LProblem, reduced: bool = False,
                        tol: Tolerances = DEFAULT) -> SpectrumReport:
    """Roots of det S(eps) with the omega amplitudes from the kernel of S."""
    system = leading_order_system(problem, reduced)
    det = system.determinant()
    if det.is_zero():
        raise NumericalError("leading-order determinant vanishes identically")
    roots = poly_roots(det, tol)
    omegas = np.array([normalize_omega(_kernel_vector(system.matrix(e))) for e in roots])
    return SpectrumReport(roots, "leading-order", tol.reality, omegas).sorted()


def dominant_roots(report: SpectrumReport, partition: PartitionSpec) -> np.ndarray:
    """The smallest-block multiplet ``eps = O(lam^(1/N_L))``.

    These are the ``N_L`` roots of smallest modulus; they reduce to
    ``eps^(N_L) = lam x`` once the larger blocks are eliminated.
    """
    return report.smallest(partition.parts[-1]).roots


# -- rescaled (unitarity-compatible) regime ---------------------------------

def rescaled_problem(W, partition, lam: float) -> LProblem:
    """Perturbation whose leading-order data scale with lam.

    On the first column of every block, row ``N_j - m`` of block row j gets
    ``lam V = lam^((N_j - m)/2) W``; all other entries are ``V = W``.
    With ``eps = sqrt(lam) E`` every term of the leading-order system is
    then of order ``lam^(N_j/2)`` and lam drops out.
    """
    if not isinstance(partition, PartitionSpec):
        partition = PartitionSpec.parse(partition)
    if not lam > 0:
        raise ValueError("lambda must be positive")
    W = as_square(W, "W")
    if W.shape[0] != partition.K:
        raise ValueError("W dimension does not match the partition")
    V = np.array(W, dtype=complex)
    for o, n in zip(partition.offsets, partition.parts):
        rows = np.arange(n)  # row index i = N_j - m - 1 within the block
        factor = np.power(float(lam), (rows + 1) / 2.0 - 1.0)
        for ko in partition.offsets:
            V[o + rows, ko] = factor * W[o + rows, ko]
    return LProblem(partition, V, lam)


def rescaled_secular_polynomial(W, partition, lam: float) -> ComplexPolynomial:
    """det S(sqrt(lam) E) / lam^(K/2) as a polynomial in E.

    Row j of S is divided by lam^(N_j/2) and the coefficient of eps^m is
    multiplied by lam^(m/2) before taking the determinant.
    """
    problem = rescaled_problem(W, partition, lam)
    S = leading_order_system(problem).matrix.coeffs.copy()
    lam = float(lam)
    m = np.arange(S.shape[2])
    for j, nj in enumerate(problem.partition.parts):
        S[j] *= np.power(lam, (m - nj) / 2.0)[None, :]
    return PolyMatrix(S).det()


def solve_rescaled_leading_order(W, partition, lam: float,
                                 tol: Tolerances = DEFAULT) -> SpectrumReport:
    """The M+N (in general K) roots E; ``eps = sqrt(lam) E``."""
    poly = rescaled_secular_polynomial(W, partition, lam)
    if poly.is_zero():
        raise NumericalError("rescaled secular polynomial vanishes identically")
    return SpectrumReport(poly_roots(poly, tol), "leading-order", tol.reality).sorted()


def in_domain(report: SpectrumReport, tol: Tolerances = DEFAULT) -> bool:
    """All roots real and pairwise distinct (stable bound states)."""
    return report.all_real and report.is_distinct(tol)


def search_domain(partition, seed: int, max_tries: int = 20000, scale: float = 1.0,
                  tol: Tolerances = DEFAULT):
    """Randomized search for a bounded real W whose rescaled leading-order
    spectrum is all real and non-degenerate.

    Returns ``(W, report, tries)``; raises NumericalError if nothing is found.
    """
    if not isinstance(partition, PartitionSpec):
        partition = PartitionSpec.parse(partition)
    rng = np.random.default_rng(seed)
    K = partition.K
    for attempt in range(1, max_tries + 1):
        W = scale * rng.uniform(-1.0, 1.0, size=(K, K))
        report = solve_rescaled_leading_order(W, partition, 1.0, tol)
        if in_domain(report, tol):
            return as_matrix(W), report, attempt
    raise NumericalError(f"no all-real W found in {max_tries} tries (seed {seed})")


# -- full compatibility system ----------------------------------------------

@dataclass(frozen=True, eq=False)
class CompatRoot:
    eps: complex
    omega: np.ndarray
    residual: float


@dataclass(eq=False)
class CompatResult:
    roots: list
    failed: list = field(default_factory=list)  # (seed, reason)

    def __iter__(self):
        return iter(self.roots)

    def __len__(self):
        return len(self.roots)

    @property
    def eps(self) -> np.ndarray:
        return np.array([r.eps for r in self.roots], dtype=complex)


def _newton(compat: PolyMatrix, dcompat: PolyMatrix, eps, omega, max_iter):
    L = compat.shape[0]
    x = np.concatenate([[eps], omega]).astype(complex)

    def F(x):
        return np.concatenate([compat(x[0]) @ x[1:], [np.sum(x[1:] ** 2) - 1.0]])

    f = F(x)
    for _ in range(max_iter):
        if not np.any(f):
            break
        J = np.zeros((L + 1, L + 1), dtype=complex)
        J[:L, 0] = dcompat(x[0]) @ x[1:]
        J[:L, 1:] = compat(x[0])
        J[L, 1:] = 2 * x[1:]
        if not np.all(np.isfinite(J)) or np.linalg.cond(J) > 1e15:
            raise np.linalg.LinAlgError("singular Jacobian")
        step = np.linalg.solve(J, f)
        x_new = x - step
        f_new = F(x_new)
        x, f = x_new, f_new
        if np.linalg.norm(step) <= 1e-15 * max(1.0, np.linalg.norm(x)):
            break
    return x, float(np.linalg.norm(f))


def _omega_grid(L):
    grid = [np.eye(L)[j] for j in range(L)]
    for a, b in combinations(range(L), 2):
        for s in (1.0, -1.0):
            w = np.zeros(L)
            w[a], w[b] = 1.0, s
            grid.append(w / np.sqrt(2))
    return grid


def solve_compat_system(problem: LProblem, order: int, seeds=None, grid: bool = True,
                        max_iter: int = 60, tol: Tolerances = DEFAULT) -> CompatResult:
    """Newton refinement of ``C(eps) omega = 0, sum(omega**2) = 1``.

    ``seeds`` is a list of ``(eps, omega)``; by default the roots and kernel
    vectors of the full leading-order system. When the seeds do not yield
    as many distinct roots as there were seeds, the same eps values are
    retried with omega on a coarse grid of the unit sphere.
    """
    series = series_solution_L(problem, order)
    C, dC = series.compat, series.compat.deriv()
    if seeds is None:
        lo = solve_leading_order(problem, reduced=False, tol=tol)
        seeds = list(zip(lo.roots, lo.vectors))
    seeds = [(complex(e), normalize_omega(w)) for e, w in seeds]

    found, failed = [], []

    def attempt(e0, w0):
        try:
            x, res = _newton(C, dC, e0, w0, max_iter)
        except np.linalg.LinAlgError as exc:
            failed.append(((e0, w0), str(exc)))
            return
        if not np.all(np.isfinite(x)) or res > tol.compat_residual:
            failed.append(((e0, w0), f"residual {res:.3e}"))
            return
        root = CompatRoot(complex(x[0]), normalize_omega(x[1:]), res)
        for other in found:
            if (abs(other.eps - root.eps) <= 1e-8 * max(1.0, abs(root.eps))
                    and np.allclose(other.omega, root.omega, atol=1e-6)):
                return
        found.append(root)

    for e0, w0 in seeds:
        attempt(e0, w0)
    if grid and len(found) < len(seeds):
        for e0, _ in seeds:
            for w0 in _omega_grid(problem.L):
                attempt(e0, w0.astype(complex))
    found.sort(key=lambda r: (r.eps.real, r.eps.imag))
    return CompatResult(found, failed)


def reassemble_psi(problem: LProblem, series: LSeries, eps, omega) -> np.ndarray:
    """Rebuild ``Psi`` from ``omega`` and the leading N_j - 1 entries of each
    block of ``y``."""
    y = series.evaluate(eps, omega)
    psi = np.empty(problem.K, dtype=complex)
    for j, (o, n) in enumerate(zip(problem.partition.offsets, problem.partition.parts)):
        psi[o] = omega[j]
        psi[o + 1:o + n] = y[o:o + n - 1]
    return psi


def schrodinger_residual(problem: LProblem, eps, psi) -> float:
    return float(np.linalg.norm(problem.hamiltonian() @ psi - eps * psi))
