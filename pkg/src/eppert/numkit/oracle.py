"""Brute-force eigenvalue oracle: characteristic polynomial plus roots."""

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linear_sum_assignment

from ..config import DEFAULT, Tolerances
from . import _dd
from .matrix import as_square
from .poly import ComplexPolynomial
from .roots import cluster_roots, poly_roots


@dataclass(frozen=True, eq=False)
class SpectrumReport:
    """Roots with per-root reality flags.

    ``provenance`` is one of ``"oracle"``, ``"secular"``, ``"leading-order"``
    or ``"compat"``. ``vectors`` optionally holds one row per root (for
    instance the omega amplitudes of the L>=2 solver).
    """

    roots: np.ndarray
    provenance: str
    tol_reality: float = DEFAULT.reality
    vectors: np.ndarray = field(default=None, repr=False)

    @property
    def is_real(self) -> np.ndarray:
        r = np.asarray(self.roots)
        return np.abs(r.imag) <= self.tol_reality * np.maximum(1.0, np.abs(r))

    @property
    def all_real(self) -> bool:
        return bool(np.all(self.is_real))

    def multiplicities(self, tol: Tolerances = DEFAULT):
        """(representative root, multiplicity) for each cluster."""
        return [(complex(np.mean(self.roots[g])), len(g))
                for g in cluster_roots(self.roots, tol)]

    def is_distinct(self, tol: Tolerances = DEFAULT) -> bool:
        return all(m == 1 for _, m in self.multiplicities(tol))

    def smallest(self, n: int) -> "SpectrumReport":
        """The ``n`` roots of smallest modulus (physical branch of a
        truncated secular polynomial)."""
        order = np.argsort(np.abs(self.roots), kind="stable")[:n]
        vec = None if self.vectors is None else self.vectors[order]
        return SpectrumReport(self.roots[order], self.provenance, self.tol_reality, vec)

    def sorted(self) -> "SpectrumReport":
        order = np.lexsort((self.roots.imag, self.roots.real))
        vec = None if self.vectors is None else self.vectors[order]
        return SpectrumReport(self.roots[order], self.provenance, self.tol_reality, vec)

    def to_json(self) -> dict:
        flags = self.is_real
        out = {"provenance": self.provenance,
               "roots": [{"re": float(z.real), "im": float(z.imag), "is_real": bool(f)}
                         for z, f in zip(self.roots, flags)],
               "all_real": self.all_real}
        if self.vectors is not None:
            out["vectors"] = [[[float(v.real), float(v.imag)] for v in row]
                              for row in self.vectors]
        return out


def char_poly(a, tol: Tolerances = DEFAULT) -> ComplexPolynomial:
    """det(xI - a) by the Faddeev-LeVerrier recursion.

    The recursion is carried out in compensated (double-double) arithmetic:
    near exceptional points the coefficients come out of heavy cancellation
    between traces of large matrix powers, and plain double precision loses
    most digits there. The low halves are kept on the returned polynomial
    so that :func:`poly_roots` can polish against them.
    """
    a = as_square(a, "a")
    n = a.shape[0]
    if n > tol.oracle_max_dim:
        raise ValueError(f"oracle is limited to K <= {tol.oracle_max_dim}, got {n}")
    ch = np.zeros(n + 1, dtype=complex)
    cl = np.zeros(n + 1, dtype=complex)
    ch[n] = 1.0
    mh = np.zeros((n, n), dtype=complex)
    ml = np.zeros((n, n), dtype=complex)
    eye = np.eye(n, dtype=bool)
    for k in range(1, n + 1):
        # M_k = A M_{k-1} + c_{n-k+1} I
        if k > 1:
            mh, ml = _dd.cmatmul(a, mh, ml)
        dh, dl = _dd.cadd(mh[eye], ml[eye], ch[n - k + 1], cl[n - k + 1])
        mh, ml = mh.copy(), ml.copy()
        mh[eye], ml[eye] = dh, dl
        ph, pl = _dd.cmatmul(a, mh, ml)
        th, tl = _dd.csum(np.diag(ph), np.diag(pl))
        qh, ql = _dd.cdiv_real(th, tl, -float(k))
        ch[n - k], cl[n - k] = qh, ql
    return ComplexPolynomial(ch, lo=cl)


def eig_oracle(a, tol: Tolerances = DEFAULT) -> SpectrumReport:
    """Eigenvalues of ``a`` as the roots of its characteristic polynomial."""
    roots = poly_roots(char_poly(a, tol), tol)
    return SpectrumReport(roots, "oracle", tol.reality).sorted()


def match_distance(a, b) -> float:
    """Largest distance between two root multisets under their optimal
    one-to-one pairing (inf if the sizes differ)."""
    a = np.asarray(a, dtype=complex).ravel()
    b = np.asarray(b, dtype=complex).ravel()
    if len(a) != len(b):
        return float("inf")
    if len(a) == 0:
        return 0.0
    d = np.abs(a[:, None] - b[None, :])
    r, c = linear_sum_assignment(d)
    return float(d[r, c].max())
