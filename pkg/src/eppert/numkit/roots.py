"""Aberth-Ehrlich simultaneous polynomial root finding."""

import numpy as np

from ..config import DEFAULT, Tolerances
from ..errors import ConvergenceError
from . import _dd
from .poly import ComplexPolynomial

_EPS = np.finfo(float).eps


def _newton_polygon_guesses(c):
    """Initial approximations on circles whose radii come from the upper
    convex hull of (k, log|c_k|) (Bini's starting points)."""
    n = c.size - 1
    with np.errstate(divide="ignore"):
        logs = np.log(np.abs(c))
    pts = [k for k in range(n + 1) if np.isfinite(logs[k])]
    hull = []
    for k in pts:
        while len(hull) >= 2:
            i, j = hull[-2], hull[-1]
            # drop j when it lies on or below segment i-k
            if (logs[j] - logs[i]) * (k - i) <= (logs[k] - logs[i]) * (j - i):
                hull.pop()
            else:
                break
        hull.append(k)
    guesses = []
    offset = 0.7  # break symmetry with real-axis clusters
    for i, j in zip(hull[:-1], hull[1:]):
        m = j - i
        radius = np.exp((logs[i] - logs[j]) / m)
        ang = 2 * np.pi * np.arange(m) / m + offset + 2 * np.pi * i / n
        guesses.extend(radius * np.exp(1j * ang))
    return np.array(guesses, dtype=complex)


def _ratio(c, abs_c, z):
    """Return (p/p', normalized |p|) at z, using the reversed polynomial
    outside the unit disk to avoid overflow."""
    n = c.size - 1
    if abs(z) <= 1.0:
        p = dp = 0j
        scale = 0.0
        for k in range(n, -1, -1):
            dp = dp * z + p
            p = p * z + c[k]
            scale = scale * abs(z) + abs_c[k]
        resid = abs(p) / scale if scale else 0.0
        if p == 0:
            return 0j, 0.0
        return (p / dp if dp != 0 else np.inf), resid
    w = 1.0 / z
    q = dq = 0j
    scale = 0.0
    for k in range(n + 1):
        dq = dq * w + q
        q = q * w + c[k]
        scale = scale * abs(w) + abs_c[k]
    resid = abs(q) / scale if scale else 0.0
    if q == 0:
        return 0j, 0.0
    denom = n * w - w * w * dq / q
    return (1.0 / denom if denom != 0 else np.inf), resid


def _aberth(c, z, max_iter, tol_stop=4.0):
    abs_c = np.abs(c)
    n = z.size
    done = np.zeros(n, dtype=bool)
    resid = np.full(n, np.inf)
    for it in range(max_iter):
        for i in range(n):
            if done[i]:
                continue
            ratio, resid[i] = _ratio(c, abs_c, z[i])
            if resid[i] <= tol_stop * (n + 1) * _EPS:
                done[i] = True
                continue
            diff = z[i] - np.delete(z, i)
            with np.errstate(divide="ignore", invalid="ignore"):
                s = np.sum(1.0 / diff[diff != 0])
            if not np.isfinite(ratio):
                corr = 0.0
            else:
                denom = 1.0 - ratio * s
                corr = ratio / denom if denom != 0 else ratio
            z[i] -= corr
            if abs(corr) <= 2 * _EPS * abs(z[i]):
                done[i] = True
        if done.all():
            return z, resid, it + 1
    for i in range(n):
        _, resid[i] = _ratio(c, abs_c, z[i])
    return z, resid, max_iter + 1  # exhausted


def _polish_dd(c, lo, z, rounds=10):
    """Aberth correction steps (all roots at once) with the numerator
    evaluated by compensated Horner on the double-double coefficients."""
    dc = np.polynomial.polynomial.polyder(c)
    n = z.size
    for _ in range(rounds):
        ph, pl = _dd.horner(c, lo, z)
        p = ph + pl
        dp = np.polynomial.polynomial.polyval(z, dc)
        diff = z[:, None] - z[None, :]
        diff[np.arange(n), np.arange(n)] = np.inf
        with np.errstate(divide="ignore", invalid="ignore"):
            s = np.sum(np.where(diff == 0, 0.0, 1.0 / diff), axis=1)
            ratio = np.where((p == 0) | (dp == 0), 0.0, p / dp)
            denom = 1.0 - ratio * s
            corr = np.where(denom == 0, ratio, ratio / denom)
        corr = np.where(np.isfinite(corr), corr, 0.0)
        z = z - corr
        if np.max(np.abs(corr) / np.maximum(1.0, np.abs(z))) < 4 * _EPS:
            break
    return z


def _derivative_coeffs(c, j):
    k = np.arange(c.size)
    fall = np.ones(c.size)
    for i in range(j):
        fall = fall * (k - i)
    return (c * fall)[j:]


def _refine_multiple(c, lo, z, m):
    """Centroid of ``z`` refined as a simple root of p^(m-1); None unless
    p, ..., p^(m-1) all vanish there to rounding level."""
    n = c.size - 1
    w = np.mean(z)
    q, dq = _derivative_coeffs(c, m - 1), _derivative_coeffs(c, m)
    for _ in range(8):
        qv = np.polynomial.polynomial.polyval(w, q)
        dqv = np.polynomial.polynomial.polyval(w, dq)
        if qv == 0 or dqv == 0:
            break
        step = qv / dqv
        w -= step
        if abs(step) <= 2 * _EPS * abs(w):
            break
    for j in range(m):
        ch, cl = _derivative_coeffs(c, j), _derivative_coeffs(lo, j)
        ph, pl = _dd.horner(ch, cl, w)
        scale = np.polynomial.polynomial.polyval(abs(w), np.abs(ch))
        if abs(ph + pl) > 16 * (n + 1) * _EPS * scale:
            return None
    return w


def _merge_multiple(c, lo, z, radii=(1e-1, 3e-2, 1e-2, 3e-3, 1e-3, 3e-4, 1e-4)):
    """Replace clusters that are numerically a single multiple root.

    Simple Aberth roots at an m-fold zero scatter over a radius of about
    eps^(1/m); the merged value is accurate to eps. Candidate clusters are
    taken from wide to narrow so that a cluster of distinct roots is split
    until its pieces pass or fail the derivative test on their own.
    """
    lo = np.zeros_like(c) if lo is None else lo
    out = z.copy()
    free = np.arange(z.size)
    for radius in radii:
        if free.size < 2:
            break
        merged = []
        for g in cluster_roots(z[free], Tolerances(cluster=radius)):
            if len(g) < 2:
                continue
            idx = free[g]
            w = _refine_multiple(c, lo, z[idx], len(idx))
            if w is not None:
                out[idx] = w
                merged.extend(idx)
        free = np.setdiff1d(free, merged)
    return out


def poly_roots(p, tol: Tolerances = DEFAULT) -> np.ndarray:
    """All complex roots of ``p``, repeated according to multiplicity.

    Exact zero roots are deflated first. The remaining roots are found by
    Aberth-Ehrlich iteration from Newton-polygon starting circles, then
    polished with compensated evaluation (using the double-double
    coefficient tails of ``p`` when present). Clusters that are numerically one
    multiple root are finally merged onto that root.

    Raises ConvergenceError if the iteration uses up ``tol.max_iter`` sweeps
    or some normalized residual
    ``|p(z)| / sum_k |c_k| |z|^k`` stays above ``tol.root_residual``.
    """
    if not isinstance(p, ComplexPolynomial):
        p = ComplexPolynomial(p)
    if p.degree < 1:
        raise ValueError("poly_roots needs a polynomial of degree >= 1")
    c = p.coeffs
    nzero = int(np.flatnonzero(c)[0])
    c = c[nzero:]
    zeros = np.zeros(nzero, dtype=complex)
    if c.size == 1:
        return zeros
    if c.size == 2:
        found = np.array([-c[0] / c[1]])
        resid = np.zeros(1)
    else:
        z0 = _newton_polygon_guesses(c)
        found, resid, iters = _aberth(c, z0, tol.max_iter)
        if iters > tol.max_iter:
            raise ConvergenceError(
                f"Aberth iteration did not settle in {tol.max_iter} sweeps "
                f"(max normalized residual {resid.max():.3e})", residuals=resid)
    lo = np.zeros_like(c) if p.lo is None else p.lo[nzero:]
    if found.size > 1:
        found = _merge_multiple(c, lo, _polish_dd(c, lo, found))
        abs_c = np.abs(c)
        resid = np.array([_ratio(c, abs_c, zi)[1] for zi in found])
    bad = resid > tol.root_residual
    if np.any(bad):
        raise ConvergenceError(
            f"{int(bad.sum())} of {found.size} roots did not converge "
            f"(max normalized residual {resid.max():.3e})", residuals=resid)
    return np.concatenate([zeros, found])


def cluster_roots(roots, tol: Tolerances = DEFAULT):
    """Group roots closer than ``tol.cluster * max(1, |z|)``.

    Returns a list of index lists; single-link clustering.
    """
    roots = np.asarray(roots, dtype=complex)
    n = roots.size
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(n):
        for j in range(i + 1, n):
            scale = max(1.0, abs(roots[i]), abs(roots[j]))
            if abs(roots[i] - roots[j]) <= tol.cluster * scale:
                parent[find(i)] = find(j)
    groups = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)
    return sorted(groups.values(), key=lambda g: g[0])
