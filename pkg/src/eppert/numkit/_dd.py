"""Error-free transformations for compensated (double-double) arithmetic.

Complex double-double values are carried as a pair of complex arrays
``(hi, lo)``; real and imaginary parts are compensated independently.
All helpers are vectorized over numpy arrays.
"""

import numpy as np

_SPLITTER = 134217729.0  # 2**27 + 1


def two_sum(a, b):
    s = a + b
    bb = s - a
    return s, (a - (s - bb)) + (b - bb)


def fast_two_sum(a, b):
    s = a + b
    return s, b - (s - a)


def _split(a):
    c = _SPLITTER * a
    hi = c - (c - a)
    return hi, a - hi


def two_prod(a, b):
    p = a * b
    ah, al = _split(a)
    bh, bl = _split(b)
    return p, ((ah * bh - p) + ah * bl + al * bh) + al * bl


def real_sum(pieces, axis=0):
    """Sum2 cascade along ``axis``; returns a renormalized (hi, lo) pair."""
    pieces = np.moveaxis(np.asarray(pieces, dtype=float), axis, 0)
    s = pieces[0].copy()
    err = np.zeros_like(s)
    for p in pieces[1:]:
        s, e = two_sum(s, p)
        err += e
    return fast_two_sum(s, err)


def _real_matmul(a, xh, xl):
    """(a @ (xh + xl)) for real double ``a`` and real double-double x.

    Returns the list of real pieces, shape (n_pieces, rows, cols).
    """
    p, e = two_prod(a[:, :, None], xh[None, :, :])
    small = a[:, :, None] * xl[None, :, :]
    # axis 1 is the contraction index
    return np.concatenate([p, e, small], axis=1).transpose(1, 0, 2)


def cmatmul(a, xh, xl):
    """Complex double matrix ``a`` times complex double-double matrix x."""
    ar, ai = a.real, a.imag
    re = np.concatenate([_real_matmul(ar, xh.real, xl.real),
                         _real_matmul(-ai, xh.imag, xl.imag)])
    im = np.concatenate([_real_matmul(ar, xh.imag, xl.imag),
                         _real_matmul(ai, xh.real, xl.real)])
    rh, rl = real_sum(re)
    ih, il = real_sum(im)
    return rh + 1j * ih, rl + 1j * il


def cadd(ah, al, bh, bl):
    rh, rl = two_sum(np.real(ah), np.real(bh))
    ih, il = two_sum(np.imag(ah), np.imag(bh))
    rh, rl = fast_two_sum(rh, rl + np.real(al) + np.real(bl))
    ih, il = fast_two_sum(ih, il + np.imag(al) + np.imag(bl))
    return rh + 1j * ih, rl + 1j * il


def csum(h, l):
    """Compensated sum of a 1-D complex double-double vector."""
    h, l = np.asarray(h), np.asarray(l)
    rh, rl = real_sum(np.concatenate([h.real, l.real]))
    ih, il = real_sum(np.concatenate([h.imag, l.imag]))
    return complex(rh, ih), complex(rl, il)


def cdiv_real(h, l, k):
    """(h + l) / k for a real double divisor."""
    out = []
    for part in (np.real, np.imag):
        hi, lo = part(h), part(l)
        q1 = hi / k
        p, e = two_prod(q1, k)
        q2 = (((hi - p) - e) + lo) / k
        out.append(fast_two_sum(q1, q2))
    (rh, rl), (ih, il) = out
    return rh + 1j * ih, rl + 1j * il


def horner(ch, cl, z):
    """Compensated Horner evaluation of sum (ch[k] + cl[k]) z**k at complex
    double points ``z`` (scalar or array); returns the double-double value."""
    z = np.asarray(z, dtype=complex)
    zr, zi = z.real, z.imag
    sh = np.full(z.shape, complex(ch[-1]))
    sl = np.full(z.shape, complex(cl[-1]))
    for k in range(len(ch) - 2, -1, -1):
        pr1, er1 = two_prod(sh.real, zr)
        pr2, er2 = two_prod(-sh.imag, zi)
        pi1, ei1 = two_prod(sh.real, zi)
        pi2, ei2 = two_prod(sh.imag, zr)
        re = [pr1, pr2, er1, er2, sl.real * zr, -sl.imag * zi,
              np.full(z.shape, ch[k].real), np.full(z.shape, cl[k].real)]
        im = [pi1, pi2, ei1, ei2, sl.real * zi, sl.imag * zr,
              np.full(z.shape, ch[k].imag), np.full(z.shape, cl[k].imag)]
        rh, rl = real_sum(re)
        ih, il = real_sum(im)
        sh, sl = rh + 1j * ih, rl + 1j * il
    return sh, sl
