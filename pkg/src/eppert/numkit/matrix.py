"""Dense complex matrices.

Matrices are plain ``numpy`` complex128 arrays; :func:`as_matrix` is the one
entry point that validates shape and finiteness.
"""

import json

import numpy as np

from ..config import DEFAULT, Tolerances
from ..errors import NumericalError, SingularMatrixError


def as_matrix(a, name="matrix") -> np.ndarray:
    m = np.array(a, dtype=complex)
    if m.ndim == 1:
        m = m.reshape(-1, 1)
    if m.ndim != 2 or 0 in m.shape:
        raise ValueError(f"{name} must be a non-empty 2-D array, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError(f"{name} contains NaN or Inf")
    m.setflags(write=False)
    return m


def as_square(a, name="matrix") -> np.ndarray:
    m = as_matrix(a, name)
    if m.shape[0] != m.shape[1]:
        raise ValueError(f"{name} must be square, got shape {m.shape}")
    return m


def identity(n: int) -> np.ndarray:
    return as_matrix(np.eye(n))


def mat_mul(a, b) -> np.ndarray:
    a, b = as_matrix(a, "a"), as_matrix(b, "b")
    if a.shape[1] != b.shape[0]:
        raise ValueError(f"dimension mismatch: {a.shape} @ {b.shape}")
    return as_matrix(a @ b)


def mat_inv(a, tol: Tolerances = DEFAULT) -> np.ndarray:
    """Inverse by Gauss-Jordan elimination with partial pivoting.

    Raises SingularMatrixError when a pivot falls below
    ``tol.singular_pivot * ||a||_F`` or the condition number exceeds
    ``tol.max_condition``.
    """
    a = as_square(a, "a")
    n = a.shape[0]
    scale = np.linalg.norm(a)
    if scale == 0.0:
        raise SingularMatrixError("zero matrix", 0.0)
    cond = np.linalg.cond(a)
    if not cond <= tol.max_condition:
        raise SingularMatrixError(f"condition number {cond:.3e} exceeds bound",
                                  float(np.min(np.linalg.svd(a, compute_uv=False))))
    work = np.hstack([a, np.eye(n, dtype=complex)])
    for col in range(n):
        p = col + int(np.argmax(np.abs(work[col:, col])))
        piv = abs(work[p, col])
        if piv < tol.singular_pivot * scale:
            raise SingularMatrixError(f"matrix is singular at column {col}", piv)
        if p != col:
            work[[col, p]] = work[[p, col]]
        work[col] /= work[col, col]
        others = np.arange(n) != col
        work[others] -= np.outer(work[others, col], work[col])
    inv = work[:, n:]
    resid = np.linalg.norm(a @ inv - np.eye(n))
    if resid > tol.inverse_check * n:
        raise NumericalError(f"inverse check failed: ||a inv(a) - I|| = {resid:.3e}")
    return as_matrix(inv)


def quasi_hermiticity_residual(h, theta, tol: Tolerances = DEFAULT) -> float:
    """Frobenius norm of ``H^dagger Theta - Theta H``.

    ``theta`` must be Hermitian (to 1e-12) and positive definite.
    """
    from .oracle import eig_oracle

    h, theta = as_square(h, "h"), as_square(theta, "theta")
    if h.shape != theta.shape:
        raise ValueError("h and theta must have the same dimension")
    herm_err = np.linalg.norm(theta - theta.conj().T)
    if herm_err > 1e-12 * max(1.0, np.linalg.norm(theta)):
        raise ValueError(f"theta is not Hermitian (deviation {herm_err:.3e})")
    ev = eig_oracle(theta, tol).roots
    if np.min(ev.real) <= 0:
        raise ValueError("theta is not positive definite")
    return float(np.linalg.norm(h.conj().T @ theta - theta @ h))


# -- JSON wire format: {"rows": R, "cols": C, "data": [[re, im], ...]} ------

def matrix_to_json(a) -> dict:
    a = as_matrix(a)
    flat = a.reshape(-1)
    return {"rows": int(a.shape[0]), "cols": int(a.shape[1]),
            "data": [[float(z.real), float(z.imag)] for z in flat]}


def matrix_from_json(obj) -> np.ndarray:
    if isinstance(obj, str):
        obj = json.loads(obj)
    try:
        rows, cols, data = int(obj["rows"]), int(obj["cols"]), obj["data"]
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed matrix JSON: {exc}") from None
    if rows < 1 or cols < 1 or len(data) != rows * cols:
        raise ValueError(f"matrix JSON has {len(data)} entries, expected {rows}x{cols}")
    vals = []
    for pair in data:
        if len(pair) != 2:
            raise ValueError("matrix JSON entries must be [re, im] pairs")
        vals.append(complex(float(pair[0]), float(pair[1])))
    return as_matrix(np.array(vals).reshape(rows, cols))


def load_matrix(path) -> np.ndarray:
    with open(path) as fh:
        return matrix_from_json(json.load(fh))


def save_matrix(path, a) -> None:
    with open(path, "w") as fh:
        json.dump(matrix_to_json(a), fh)
