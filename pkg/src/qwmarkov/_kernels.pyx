# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled stepping and Bessel kernels.

Same signatures and semantics as ``qwmarkov._fallback``. The loops run
without the GIL so parameter sweeps can use threads.
"""

import numpy as np

from libc.math cimport sqrt, fabs, copysign

cdef Py_ssize_t BLOCK = 256
cdef double RESCALE = 1e100

NAME = "cython"


def buffer_length(Py_ssize_t n_final):
    return ((n_final + 2 + BLOCK - 1) // BLOCK) * BLOCK


ctypedef double complex cplx

cdef extern from *:
    """
    #if defined(__SSE2__) || defined(_M_X64)
    #include <xmmintrin.h>
    /* flush-to-zero and denormals-are-zero: tail values below 1e-308 become 0 */
    static unsigned int qw_ftz_on(void) {
        unsigned int old = _mm_getcsr();
        _mm_setcsr(old | 0x8040);
        return old;
    }
    static void qw_ftz_restore(unsigned int old) { _mm_setcsr(old); }
    #else
    static unsigned int qw_ftz_on(void) { return 0; }
    static void qw_ftz_restore(unsigned int old) { (void)old; }
    #endif
    """
    unsigned int qw_ftz_on() nogil
    void qw_ftz_restore(unsigned int) nogil


cdef void _unitary_obs(const cplx* a, const cplx* b, Py_ssize_t lo, Py_ssize_t hi,
                       double site0, double* row) noexcept nogil:
    cdef Py_ssize_t i
    cdef double ar, ai, br, bi, p, beta, x
    cdef double norm = 0.0, m1 = 0.0, m2 = 0.0, sb = 0.0, sib = 0.0
    for i in range(lo, hi):
        ar = a[i].real
        ai = a[i].imag
        br = b[i].real
        bi = b[i].imag
        x = site0 + i
        p = (ar * ar + ai * ai) + (br * br + bi * bi)
        beta = ar * br + ai * bi
        norm += p
        m1 += x * p
        m2 += x * x * p
        sb += beta
        sib += x * beta
    row[0] = norm
    row[1] = m1
    row[2] = m2
    row[3] = sb
    row[4] = sib


def unitary_run(const cplx[::1] a0, const cplx[::1] b0,
                long origin, double c, double s, long steps, bint record):
    cdef Py_ssize_t n0 = a0.shape[0]
    cdef Py_ssize_t n = n0 + 2 * steps
    cdef Py_ssize_t cap = buffer_length(n)
    cdef Py_ssize_t off = 1 + steps
    cdef Py_ssize_t i, t, lo, hi
    cdef double site0 = origin - off
    cdef double ar, ai, br, bi
    buf = np.zeros((4, cap), dtype=np.complex128)
    cdef cplx[:, ::1] bv = buf
    cdef cplx* a = &bv[0, 0]
    cdef cplx* b = &bv[1, 0]
    cdef cplx* na = &bv[2, 0]
    cdef cplx* nb = &bv[3, 0]
    cdef cplx* tmp
    rows_arr = np.empty((steps + 1 if record else 1, 5))
    cdef double[:, ::1] rv = rows_arr
    cdef double* rows = &rv[0, 0]
    for i in range(n0):
        a[off + i] = a0[i]
        b[off + i] = b0[i]
    lo = off
    hi = off + n0
    cdef unsigned int csr
    with nogil:
        csr = qw_ftz_on()
        if record:
            _unitary_obs(a, b, lo, hi, site0, rows)
        for t in range(steps):
            lo -= 1
            hi += 1
            for i in range(lo, hi):
                # real and imaginary parts spelled out so the loop vectorizes
                na[i].real = c * a[i + 1].real + s * b[i + 1].real
                na[i].imag = c * a[i + 1].imag + s * b[i + 1].imag
                nb[i].real = s * a[i - 1].real - c * b[i - 1].real
                nb[i].imag = s * a[i - 1].imag - c * b[i - 1].imag
            tmp = a
            a = na
            na = tmp
            tmp = b
            b = nb
            nb = tmp
            if record:
                _unitary_obs(a, b, lo, hi, site0, rows + 5 * (t + 1))
        qw_ftz_restore(csr)
    row_a = 0 if a == &bv[0, 0] else 2
    row_b = 1 if b == &bv[1, 0] else 3
    return (buf[row_a, 1:1 + n].copy(), buf[row_b, 1:1 + n].copy(), origin - steps,
            rows_arr if record else None)


cdef void _master_obs(const double* pl, const double* pr, Py_ssize_t lo, Py_ssize_t hi,
                      double site0, double* row) noexcept nogil:
    cdef Py_ssize_t i
    cdef double p, x
    cdef double norm = 0.0, m1 = 0.0, m2 = 0.0
    for i in range(lo, hi):
        x = site0 + i
        p = pl[i] + pr[i]
        norm += p
        m1 += x * p
        m2 += x * x * p
    row[0] = norm
    row[1] = m1
    row[2] = m2


def master_run(const double[::1] pl0, const double[::1] pr0, long origin,
               double c2, double s2, long steps, bint record):
    cdef Py_ssize_t n0 = pl0.shape[0]
    cdef Py_ssize_t n = n0 + 2 * steps
    cdef Py_ssize_t cap = buffer_length(n)
    cdef Py_ssize_t off = 1 + steps
    cdef Py_ssize_t i, t, lo, hi
    cdef double site0 = origin - off
    buf = np.zeros((4, cap))
    cdef double[:, ::1] bv = buf
    cdef double* pl = &bv[0, 0]
    cdef double* pr = &bv[1, 0]
    cdef double* npl = &bv[2, 0]
    cdef double* npr = &bv[3, 0]
    cdef double* tmp
    rows_arr = np.empty((steps + 1 if record else 1, 3))
    cdef double[:, ::1] rv = rows_arr
    cdef double* rows = &rv[0, 0]
    for i in range(n0):
        pl[off + i] = pl0[i]
        pr[off + i] = pr0[i]
    lo = off
    hi = off + n0
    cdef unsigned int csr
    with nogil:
        csr = qw_ftz_on()
        if record:
            _master_obs(pl, pr, lo, hi, site0, rows)
        for t in range(steps):
            lo -= 1
            hi += 1
            for i in range(lo, hi):
                npl[i] = c2 * pl[i + 1] + s2 * pr[i + 1]
                npr[i] = s2 * pl[i - 1] + c2 * pr[i - 1]
            tmp = pl
            pl = npl
            npl = tmp
            tmp = pr
            pr = npr
            npr = tmp
            if record:
                _master_obs(pl, pr, lo, hi, site0, rows + 3 * (t + 1))
        qw_ftz_restore(csr)
    row_l = 0 if pl == &bv[0, 0] else 2
    row_r = 1 if pr == &bv[1, 0] else 3
    return (buf[row_l, 1:1 + n].copy(), buf[row_r, 1:1 + n].copy(), origin - steps,
            rows_arr if record else None)


def bessel_downward(double x, long nmax, long nstart):
    out_arr = np.zeros(nmax + 1)
    cdef double[::1] out = out_arr
    if x == 0.0:
        out[0] = 1.0
        return out_arr
    cdef double two_over_x = 2.0 / x
    cdef double j_next = 0.0, j_cur = 1.0, j_prev
    cdef double sq = 0.0, even = 0.0, scale
    cdef long k
    cdef Py_ssize_t m
    with nogil:
        for k in range(nstart, 0, -1):
            if k <= nmax:
                out[k] = j_cur
            sq += j_cur * j_cur
            if k % 2 == 0:
                even += j_cur
            j_prev = k * two_over_x * j_cur - j_next
            j_next = j_cur
            j_cur = j_prev
            if fabs(j_cur) > RESCALE:
                j_cur /= RESCALE
                j_next /= RESCALE
                for m in range(nmax + 1):
                    out[m] /= RESCALE
                sq /= RESCALE * RESCALE
                even /= RESCALE
        out[0] = j_cur
        sq = 2.0 * sq + j_cur * j_cur
        even = 2.0 * even + j_cur
        scale = copysign(1.0 / sqrt(sq), even)
        for m in range(nmax + 1):
            out[m] *= scale
    return out_arr
