"""Canonical exceptional-point structures and Jordan chains.

At an EP of geometric multiplicity L the Hamiltonian is similar to a direct
sum of L Jordan blocks, ``H Q = Q (J^(M_1)(eta) + ... + J^(M_L)(eta))``.
"""

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .config import DEFAULT, Tolerances
from .errors import NumericalError, StructureError
from .numkit import as_matrix, as_square


@dataclass(frozen=True)
class PartitionSpec:
    """Block sizes ``M_1 >= M_2 >= ... >= M_L`` of a degenerate EP."""

    parts: tuple

    def __post_init__(self):
        parts = tuple(int(p) for p in self.parts)
        if not parts:
            raise ValueError("a partition needs at least one part")
        if any(p < 1 for p in parts):
            raise ValueError(f"parts must be positive, got {parts}")
        if any(a < b for a, b in zip(parts, parts[1:])):
            raise ValueError(f"parts must be non-increasing, got {parts}")
        object.__setattr__(self, "parts", parts)

    @classmethod
    def parse(cls, text) -> "PartitionSpec":
        """Accept ``"3,2"``, ``"3+2"``, ``[3, 2]`` or a JSON array string."""
        if isinstance(text, str):
            text = text.strip().strip("[]")
            items = [t for t in text.replace("+", ",").split(",") if t.strip()]
            try:
                return cls(tuple(int(t) for t in items))
            except ValueError:
                raise ValueError(f"cannot parse partition {text!r}") from None
        return cls(tuple(text))

    @property
    def K(self) -> int:
        return sum(self.parts)

    @property
    def L(self) -> int:
        return len(self.parts)

    @property
    def offsets(self) -> tuple:
        """Start index of each block."""
        out, acc = [], 0
        for p in self.parts:
            out.append(acc)
            acc += p
        return tuple(out)

    def to_json(self) -> list:
        return list(self.parts)

    def __str__(self):
        return "+".join(map(str, self.parts))


@dataclass(frozen=True)
class JordanSpec:
    partition: PartitionSpec
    eta: complex = 0.0


def jordan_block(m: int, eta=0.0) -> np.ndarray:
    if m < 1:
        raise ValueError("block size must be >= 1")
    return as_matrix(eta * np.eye(m) + np.eye(m, k=1))


def jordan_direct_sum(spec) -> np.ndarray:
    if isinstance(spec, PartitionSpec):
        spec = JordanSpec(spec)
    return as_matrix(scipy.linalg.block_diag(
        *[jordan_block(m, spec.eta) for m in spec.partition.parts]))


def shift_matrix(n: int) -> np.ndarray:
    """Lower shift: ones on the subdiagonal."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return as_matrix(np.eye(n, k=-1))


def first_basis_vector(n: int) -> np.ndarray:
    if n < 1:
        raise ValueError("n must be >= 1")
    e = np.zeros((n, 1))
    e[0, 0] = 1.0
    return as_matrix(e)


def _orth_range(x, tol_abs):
    """Orthonormal basis of range(x) by pivoted QR; rank by |R_ii| > tol_abs."""
    if x.shape[1] == 0:
        return np.zeros((x.shape[0], 0), dtype=complex)
    q, r, _ = scipy.linalg.qr(x, pivoting=True, mode="economic")
    rank = int(np.sum(np.abs(np.diag(r)) > tol_abs))
    return q[:, :rank]


def _null_space(x, tol_abs):
    """Orthonormal basis of ker(x) and of its orthogonal complement."""
    q, r, _ = scipy.linalg.qr(x.conj().T, pivoting=True, mode="full")
    diag = np.abs(np.diag(r))
    rank = int(np.sum(diag > tol_abs))
    return q[:, rank:], q[:, :rank]


def _kernel_chain(h, eta, rank_tol, tol):
    """Nested kernels of (H - eta I)^k, k = 1, 2, ...

    ker B^k = ker(C_{k-1}^H B) with C_{k-1} an orthonormal basis of the
    complement of ker B^{k-1}; every level is rank-tested at the same scale.
    """
    h = as_square(h, "h")
    n = h.shape[0]
    rel = tol.rank if rank_tol is None else rank_tol
    scale = np.linalg.norm(h) or 1.0
    tol_abs = rel * scale
    b = h - eta * np.eye(n)
    comp = np.eye(n, dtype=complex)
    kernels, dims = [], []
    while True:
        ker, comp_next = _null_space(comp.conj().T @ b, tol_abs)
        d = ker.shape[1]
        if dims and d <= dims[-1]:
            break
        kernels.append(ker)
        dims.append(d)
        comp = comp_next
        if d == n:
            break
    return b, kernels, dims


def _partition_from_dims(dims):
    ge = np.diff([0] + list(dims))          # blocks of size >= k
    exact = np.append(ge[:-1] - ge[1:], ge[-1])
    parts = []
    for size in range(len(exact), 0, -1):
        parts += [size] * int(exact[size - 1])
    return parts


def detect_jordan_structure(h, eta=0.0, rank_tol=None, tol: Tolerances = DEFAULT) -> PartitionSpec:
    """Infer the Jordan partition at ``eta`` from dim ker (H - eta I)^k.

    ``rank_tol`` is relative to ||H||_F (default ``tol.rank``). Raises
    StructureError if eta is not the only eigenvalue.
    """
    h = as_square(h, "h")
    if h.shape[0] > tol.oracle_max_dim:
        raise ValueError(f"structure detection is limited to K <= {tol.oracle_max_dim}")
    _, _, dims = _kernel_chain(h, eta, rank_tol, tol)
    if not dims or dims[-1] != h.shape[0]:
        raise StructureError(f"eta={eta} is not the only eigenvalue", dims)
    return PartitionSpec(tuple(_partition_from_dims(dims)))


def _normalize_head(v):
    v = v / np.linalg.norm(v)
    idx = np.flatnonzero(np.abs(v) > 1e-12)[0]
    return v * (abs(v[idx]) / v[idx])


def transition_matrix(h, spec: JordanSpec, rank_tol=None, tol: Tolerances = DEFAULT) -> np.ndarray:
    """Invertible Q with ``H Q = Q J`` for the canonical form ``J`` of ``spec``.

    Columns come in Jordan chains, longest blocks first; within a chain
    ``(H - eta) q_1 = 0`` and ``(H - eta) q_{k+1} = q_k``. Each chain head
    (its last column) has unit norm and a real positive first nonzero entry.
    """
    h = as_square(h, "h")
    n = h.shape[0]
    if n != spec.partition.K:
        raise ValueError(f"h is {n}x{n} but the partition sums to {spec.partition.K}")
    b, kernels, dims = _kernel_chain(h, spec.eta, rank_tol, tol)
    if not dims or dims[-1] != n or _partition_from_dims(dims) != list(spec.partition.parts):
        raise StructureError(f"H does not have Jordan structure {spec.partition}", dims)
    tol_abs = (tol.rank if rank_tol is None else rank_tol) * (np.linalg.norm(h) or 1.0)

    heads = []  # (size, head vector)
    for s in range(len(kernels), 0, -1):
        need = sum(1 for m in spec.partition.parts if m == s)
        if need == 0:
            continue
        covered = [np.linalg.matrix_power(b, size - s) @ v for size, v in heads]
        below = kernels[s - 2] if s >= 2 else np.zeros((n, 0), dtype=complex)
        span = np.column_stack([below] + covered) if covered else below
        u = _orth_range(span, tol_abs) if span.shape[1] else span
        cand = kernels[s - 1] - u @ (u.conj().T @ kernels[s - 1])
        q, _, _ = scipy.linalg.qr(cand, pivoting=True, mode="economic")
        for j in range(need):
            heads.append((s, _normalize_head(q[:, j])))

    cols = []
    for size, v in heads:
        chain = [v]
        for _ in range(size - 1):
            chain.append(b @ chain[-1])
        cols.extend(reversed(chain))
    q = as_matrix(np.column_stack(cols))
    resid = transition_residual(h, q, spec)
    if resid > _TRANSITION_TOL:
        raise NumericalError(f"Jordan chains inaccurate: relative residual {resid:.3e}")
    return q


_TRANSITION_TOL = 1e-8


def transition_residual(h, q, spec: JordanSpec) -> float:
    """||H Q - Q J||_F / (||H||_F ||Q||_F).

    Only chain heads are normalized, so the lower chain vectors (powers of
    H - eta applied to the head) carry arbitrary scale; dividing by ||Q||
    makes the residual scale-free.
    """
    h, q = as_square(h, "h"), as_square(q, "q")
    j = jordan_direct_sum(spec)
    denom = (np.linalg.norm(h) or 1.0) * np.linalg.norm(q)
    return float(np.linalg.norm(h @ q - q @ j) / denom)
