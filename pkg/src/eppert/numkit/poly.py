"""Univariate complex polynomials and matrices of polynomials.

Coefficients are stored in ascending degree. A ``PolyMatrix`` keeps its
coefficients in a ``(rows, cols, degree + 1)`` array so that all the
perturbation-series algebra stays vectorized.
"""

from dataclasses import dataclass, field
from itertools import combinations

import numpy as np


def _trim(c):
    nz = np.flatnonzero(c)
    return c[: nz[-1] + 1] if nz.size else c[:1] * 0


@dataclass(frozen=True, eq=False)
class ComplexPolynomial:
    """Polynomial with complex coefficients in ascending degree.

    ``lo`` optionally carries the low-order halves of double-double
    coefficients; only the root polisher looks at it.
    """

    coeffs: np.ndarray
    lo: np.ndarray = field(default=None, repr=False)

    def __post_init__(self):
        c = np.atleast_1d(np.asarray(self.coeffs, dtype=complex))
        if c.ndim != 1:
            raise ValueError("coefficients must be one-dimensional")
        if not np.all(np.isfinite(c)):
            raise ValueError("coefficients contain NaN or Inf")
        c = _trim(c)
        object.__setattr__(self, "coeffs", c)
        if self.lo is not None:
            lo = np.zeros_like(c)
            given = np.atleast_1d(np.asarray(self.lo, dtype=complex))[: c.size]
            lo[: given.size] = given
            object.__setattr__(self, "lo", lo)

    @classmethod
    def monomial(cls, k, coeff=1.0):
        c = np.zeros(k + 1, dtype=complex)
        c[k] = coeff
        return cls(c)

    @classmethod
    def from_roots(cls, roots):
        c = np.ones(1, dtype=complex)
        for r in roots:
            c = np.convolve(c, [-r, 1.0])
        return cls(c)

    @property
    def degree(self) -> int:
        return -1 if self.is_zero() else self.coeffs.size - 1

    def is_zero(self) -> bool:
        return not np.any(self.coeffs)

    def __call__(self, x):
        return np.polynomial.polynomial.polyval(x, self.coeffs)

    def deriv(self) -> "ComplexPolynomial":
        if self.coeffs.size == 1:
            return ComplexPolynomial([0.0])
        return ComplexPolynomial(self.coeffs[1:] * np.arange(1, self.coeffs.size))

    def norm(self) -> float:
        return float(np.sum(np.abs(self.coeffs)))

    def __add__(self, other):
        other = _as_poly(other)
        n = max(self.coeffs.size, other.coeffs.size)
        return ComplexPolynomial(np.pad(self.coeffs, (0, n - self.coeffs.size))
                                 + np.pad(other.coeffs, (0, n - other.coeffs.size)))

    __radd__ = __add__

    def __neg__(self):
        return ComplexPolynomial(-self.coeffs)

    def __sub__(self, other):
        return self + (-_as_poly(other))

    def __rsub__(self, other):
        return _as_poly(other) - self

    def __mul__(self, other):
        return ComplexPolynomial(np.convolve(self.coeffs, _as_poly(other).coeffs))

    __rmul__ = __mul__

    def __eq__(self, other):
        other = _as_poly(other)
        return self.coeffs.size == other.coeffs.size and bool(np.all(self.coeffs == other.coeffs))

    def allclose(self, other, atol=0.0, rtol=0.0) -> bool:
        other = _as_poly(other)
        n = max(self.coeffs.size, other.coeffs.size)
        a = np.pad(self.coeffs, (0, n - self.coeffs.size))
        b = np.pad(other.coeffs, (0, n - other.coeffs.size))
        return bool(np.allclose(a, b, atol=atol, rtol=rtol))

    def __repr__(self):
        return f"ComplexPolynomial({np.array2string(self.coeffs, precision=6)})"


def _as_poly(x) -> ComplexPolynomial:
    if isinstance(x, ComplexPolynomial):
        return x
    return ComplexPolynomial(np.atleast_1d(np.asarray(x, dtype=complex)))


class PolyMatrix:
    """Matrix whose entries are polynomials in a single variable."""

    __slots__ = ("coeffs",)
    __array_ufunc__ = None  # make numpy defer to __rmatmul__ / __rmul__

    def __init__(self, coeffs):
        c = np.asarray(coeffs, dtype=complex)
        if c.ndim == 2:
            c = c[:, :, None]
        if c.ndim != 3:
            raise ValueError("PolyMatrix coefficients need shape (rows, cols, deg+1)")
        nz = np.flatnonzero(np.any(c != 0, axis=(0, 1)))
        keep = nz[-1] + 1 if nz.size else 1
        self.coeffs = c[:, :, :keep]

    @classmethod
    def constant(cls, m):
        return cls(np.asarray(m, dtype=complex)[:, :, None])

    @property
    def shape(self):
        return self.coeffs.shape[:2]

    @property
    def degree(self) -> int:
        return self.coeffs.shape[2] - 1

    def __call__(self, x) -> np.ndarray:
        out = np.zeros(self.shape, dtype=complex)
        for k in range(self.coeffs.shape[2] - 1, -1, -1):
            out = out * x + self.coeffs[:, :, k]
        return out

    def entry(self, i, j) -> ComplexPolynomial:
        return ComplexPolynomial(self.coeffs[i, j])

    def deriv(self) -> "PolyMatrix":
        n = self.coeffs.shape[2]
        if n == 1:
            return PolyMatrix(np.zeros_like(self.coeffs))
        return PolyMatrix(self.coeffs[:, :, 1:] * np.arange(1, n))

    def __getitem__(self, idx):
        rows, cols = idx
        sub = self.coeffs[rows, cols]
        if sub.ndim == 1:
            return ComplexPolynomial(sub)
        if sub.ndim == 2:
            sub = sub[None] if isinstance(rows, (int, np.integer)) else sub[:, None]
        return PolyMatrix(sub)

    def __matmul__(self, other):
        if isinstance(other, PolyMatrix):
            a, b = self.coeffs, other.coeffs
        else:
            a, b = self.coeffs, np.asarray(other, dtype=complex)[:, :, None]
        if a.shape[1] != b.shape[0]:
            raise ValueError(f"dimension mismatch: {a.shape[:2]} @ {b.shape[:2]}")
        out = np.zeros((a.shape[0], b.shape[1], a.shape[2] + b.shape[2] - 1), dtype=complex)
        for i in range(a.shape[2]):
            for j in range(b.shape[2]):
                out[:, :, i + j] += a[:, :, i] @ b[:, :, j]
        return PolyMatrix(out)

    def __rmatmul__(self, other):
        return PolyMatrix.constant(other) @ self

    def _binary(self, other, sign):
        other = other if isinstance(other, PolyMatrix) else PolyMatrix.constant(other)
        if other.shape != self.shape:
            raise ValueError("shape mismatch")
        n = max(self.coeffs.shape[2], other.coeffs.shape[2])
        pad = lambda c: np.pad(c, ((0, 0), (0, 0), (0, n - c.shape[2])))
        return PolyMatrix(pad(self.coeffs) + sign * pad(other.coeffs))

    def __add__(self, other):
        return self._binary(other, 1)

    def __sub__(self, other):
        return self._binary(other, -1)

    def __mul__(self, scalar):
        return PolyMatrix(self.coeffs * scalar)

    __rmul__ = __mul__

    def __neg__(self):
        return PolyMatrix(-self.coeffs)

    def equals(self, other) -> bool:
        other = other if isinstance(other, PolyMatrix) else PolyMatrix.constant(other)
        return (self.coeffs.shape == other.coeffs.shape
                and bool(np.all(self.coeffs == other.coeffs)))

    def det(self) -> ComplexPolynomial:
        """Exact polynomial determinant by Laplace expansion over row prefixes.

        Dynamic programming over column subsets keeps the cost at
        O(n 2^n) polynomial products, which is fine for the L <= 8 systems
        this is used on.
        """
        n, m = self.shape
        if n != m:
            raise ValueError("determinant needs a square matrix")
        # minors[S] = det of rows 0..|S|-1 restricted to columns S
        minors = {(): ComplexPolynomial([1.0])}
        for r in range(n):
            nxt = {}
            for cols in combinations(range(n), r + 1):
                acc = ComplexPolynomial([0.0])
                for pos, c in enumerate(cols):
                    rest = cols[:pos] + cols[pos + 1:]
                    term = minors[rest] * ComplexPolynomial(self.coeffs[r, c])
                    sign = -1 if (len(cols) - 1 - pos) % 2 else 1
                    acc = acc + term if sign > 0 else acc - term
                nxt[cols] = acc
            minors = nxt
        return minors[tuple(range(n))]

    def __repr__(self):
        return f"PolyMatrix(shape={self.shape}, degree={self.degree})"


def block_diag_poly(blocks) -> PolyMatrix:
    rows = sum(b.shape[0] for b in blocks)
    cols = sum(b.shape[1] for b in blocks)
    deg = max(b.coeffs.shape[2] for b in blocks)
    out = np.zeros((rows, cols, deg), dtype=complex)
    r = c = 0
    for b in blocks:
        h, w = b.shape
        out[r:r + h, c:c + w, : b.coeffs.shape[2]] = b.coeffs
        r, c = r + h, c + w
    return PolyMatrix(out)
