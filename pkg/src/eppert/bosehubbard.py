"""Two-mode PT-symmetric Bose-Hubbard Hamiltonian in a fixed-N sector."""

from dataclasses import dataclass

import numpy as np

from .config import DEFAULT, Tolerances
from .jordan import JordanSpec, detect_jordan_structure, transition_matrix, transition_residual
from .errors import StructureError
from .numkit import as_matrix


@dataclass(frozen=True)
class BHParams:
    K: int
    gamma: float
    v: float = 1.0
    c: float = 0.0

    def __post_init__(self):
        if int(self.K) != self.K or self.K < 2:
            raise ValueError("K must be an integer >= 2")
        object.__setattr__(self, "K", int(self.K))


def build_hamiltonian(p: BHParams) -> np.ndarray:
    """Occupation basis ``|n1, K-1-n1>`` with n1 ascending.

    Diagonal ``-i gamma (n1-n2) + (c/2)(n1-n2)^2``, hopping
    ``v sqrt((n1+1) n2)`` between n1 and n1+1.
    """
    n1 = np.arange(p.K)
    d = 2 * n1 - (p.K - 1)
    h = np.diag(-1j * p.gamma * d + 0.5 * p.c * d.astype(float) ** 2)
    hop = p.v * np.sqrt((n1[:-1] + 1.0) * (p.K - 1 - n1[:-1]))
    h = h + np.diag(hop, 1) + np.diag(hop, -1)
    return as_matrix(h)


def closed_form_spectrum(K: int, gamma: float):
    """``sqrt(1 - gamma^2) (1 - K + 2n)``, n = 0..K-1, ascending.

    Returns ``(values, is_real)``; for gamma^2 > 1 the spectrum is not real
    and ``values`` is empty.
    """
    if gamma * gamma > 1:
        return np.array([]), False
    s = np.sqrt(1.0 - gamma * gamma)
    return s * (1.0 - K + 2.0 * np.arange(K)), True


def epk_certificate(K: int, gamma_ep: float, tol: Tolerances = DEFAULT):
    """Certify that gamma = +-1 is an EP of order K.

    Returns ``(partition, transition_residual)``.
    """
    if gamma_ep not in (1, -1):
        raise ValueError("gamma_ep must be +1 or -1")
    h = build_hamiltonian(BHParams(K, float(gamma_ep)))
    part = detect_jordan_structure(h, 0.0, tol=tol)
    if part.parts != (K,):
        raise StructureError(f"expected a single block ({K}), found {part}")
    q = transition_matrix(h, JordanSpec(part), tol=tol)
    return part, transition_residual(h, q, JordanSpec(part))
