"""Pure numpy implementations of the stepping and Bessel kernels.

The signatures mirror ``qwmarkov._kernels`` exactly; ``qwmarkov._backend``
picks one of the two at import time.
"""

import math

import numpy as np

BLOCK = 256
_RESCALE = 1e100

NAME = "python"


def buffer_length(n_final):
    """Buffer size for a window of ``n_final`` sites plus a zero guard on each side."""
    return ((n_final + 2 + BLOCK - 1) // BLOCK) * BLOCK


def _unitary_observables(a, b, sites):
    pl = a.real * a.real + a.imag * a.imag
    pr = b.real * b.real + b.imag * b.imag
    p = pl + pr
    beta = a.real * b.real + a.imag * b.imag
    return (p.sum(), (sites * p).sum(), (sites * sites * p).sum(),
            beta.sum(), (sites * beta).sum())


def unitary_run(a0, b0, origin, c, s, steps, record):
    n0 = len(a0)
    n = n0 + 2 * steps
    cap = buffer_length(n)
    off = 1 + steps
    a = np.zeros(cap, dtype=np.complex128)
    b = np.zeros(cap, dtype=np.complex128)
    na = np.zeros(cap, dtype=np.complex128)
    nb = np.zeros(cap, dtype=np.complex128)
    a[off:off + n0] = a0
    b[off:off + n0] = b0
    site_of = np.arange(cap, dtype=np.float64) + (origin - off)
    rows = np.empty((steps + 1, 5)) if record else None
    lo, hi = off, off + n0
    if record:
        rows[0] = _unitary_observables(a[lo:hi], b[lo:hi], site_of[lo:hi])
    for t in range(steps):
        lo -= 1
        hi += 1
        na[lo:hi] = c * a[lo + 1:hi + 1] + s * b[lo + 1:hi + 1]
        nb[lo:hi] = s * a[lo - 1:hi - 1] - c * b[lo - 1:hi - 1]
        a, na = na, a
        b, nb = nb, b
        if record:
            rows[t + 1] = _unitary_observables(a[lo:hi], b[lo:hi], site_of[lo:hi])
    return a[1:1 + n].copy(), b[1:1 + n].copy(), origin - steps, rows


def _master_observables(pl, pr, sites):
    p = pl + pr
    return p.sum(), (sites * p).sum(), (sites * sites * p).sum()


def master_run(pl0, pr0, origin, c2, s2, steps, record):
    n0 = len(pl0)
    n = n0 + 2 * steps
    cap = buffer_length(n)
    off = 1 + steps
    pl = np.zeros(cap)
    pr = np.zeros(cap)
    npl = np.zeros(cap)
    npr = np.zeros(cap)
    pl[off:off + n0] = pl0
    pr[off:off + n0] = pr0
    site_of = np.arange(cap, dtype=np.float64) + (origin - off)
    rows = np.empty((steps + 1, 3)) if record else None
    lo, hi = off, off + n0
    if record:
        rows[0] = _master_observables(pl[lo:hi], pr[lo:hi], site_of[lo:hi])
    for t in range(steps):
        lo -= 1
        hi += 1
        npl[lo:hi] = c2 * pl[lo + 1:hi + 1] + s2 * pr[lo + 1:hi + 1]
        npr[lo:hi] = s2 * pl[lo - 1:hi - 1] + c2 * pr[lo - 1:hi - 1]
        pl, npl = npl, pl
        pr, npr = npr, pr
        if record:
            rows[t + 1] = _master_observables(pl[lo:hi], pr[lo:hi], site_of[lo:hi])
    return pl[1:1 + n].copy(), pr[1:1 + n].copy(), origin - steps, rows


def bessel_downward(x, nmax, nstart):
    """J_0(x) .. J_nmax(x) by Miller's downward recurrence.

    The unnormalized sequence is scaled so that J_0^2 + 2 sum J_n^2 = 1,
    with the sign fixed by J_0 + 2 sum J_2k = 1.
    """
    out = np.zeros(nmax + 1)
    if x == 0.0:
        out[0] = 1.0
        return out
    two_over_x = 2.0 / x
    j_next = 0.0
    j_cur = 1.0
    sq = 0.0
    even = 0.0
    for k in range(nstart, 0, -1):
        # j_cur holds J_k, j_next holds J_{k+1}
        if k <= nmax:
            out[k] = j_cur
        sq += j_cur * j_cur
        if k % 2 == 0:
            even += j_cur
        j_prev = k * two_over_x * j_cur - j_next
        j_next = j_cur
        j_cur = j_prev
        if abs(j_cur) > _RESCALE:
            j_cur /= _RESCALE
            j_next /= _RESCALE
            out /= _RESCALE
            sq /= _RESCALE * _RESCALE  # 1e200, representable
            even /= _RESCALE
    out[0] = j_cur
    sq = 2.0 * sq + j_cur * j_cur
    even = 2.0 * even + j_cur
    scale = math.copysign(1.0 / math.sqrt(sq), even)
    return out * scale
