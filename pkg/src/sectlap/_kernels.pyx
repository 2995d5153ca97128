# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled quadrature kernel.

Operation-for-operation twin of ``_kernels_py.quad_sum``; keep the two in
sync (same anchored exponential, same pair order, same guard arithmetic).
"""
from libc.math cimport INFINITY, cos, exp, hypot, log, sin, sinh, sqrt, M_PI
from libc.stdint cimport int64_t
from libc.stdlib cimport free, malloc

BACKEND = "compiled"

cdef double _NEG_INF = -INFINITY


def quad_sum(double[::1] times, double[::1] x, double complex[::1] tprime,
             double complex[:, ::1] values, double lam, double h, double sa,
             double ca, bint guard, double log_cutoff,
             double complex[:, ::1] out, int64_t[::1] skipped):
    """See ``sectlap._kernels_py.quad_sum`` for the layout contract."""
    cdef Py_ssize_t K = x.shape[0]
    cdef Py_ssize_t n = (K - 1) // 2
    cdef Py_ssize_t D = values.shape[1]
    cdef Py_ssize_t T = times.shape[0]
    cdef double c = lam * h / (2.0 * M_PI)

    cdef double *q = <double *> malloc(K * sizeof(double))
    cdef double *p = <double *> malloc(K * sizeof(double))
    cdef double *lw = <double *> malloc(K * sizeof(double))
    cdef double *lv = <double *> malloc(K * sizeof(double))
    cdef double *accr = <double *> malloc(D * sizeof(double))
    cdef double *acci = <double *> malloc(D * sizeof(double))
    if q == NULL or p == NULL or lw == NULL or lv == NULL or accr == NULL or acci == NULL:
        free(q); free(p); free(lw); free(lv); free(accr); free(acci)
        raise MemoryError()

    cdef Py_ssize_t i, j, k, d, ip, im
    cdef double sh, acc, nrm, t, e0a, e0, tls, tlc
    cdef double er, ar, ewr, ewi, wr, wi
    cdef double wpr = 0.0, wpi = 0.0, wmr = 0.0, wmi = 0.0, w0r = 0.0, w0i = 0.0
    cdef bint skip_p, skip_m, skip_0
    cdef double pr, pi_, mr, mi, zr, zi
    cdef int64_t nskip

    try:
        for i in range(K):
            sh = sinh(x[i] / 2.0)
            q[i] = 2.0 * (sh * sh)
            p[i] = sinh(x[i])
            lw[i] = log(c * hypot(tprime[i].real, tprime[i].imag))
            acc = 0.0
            for d in range(D):
                acc += values[i, d].real * values[i, d].real + values[i, d].imag * values[i, d].imag
            nrm = sqrt(acc)
            lv[i] = log(nrm) if nrm > 0.0 else _NEG_INF

        for j in range(T):
            t = times[j]
            e0a = t * lam * (1.0 - sa)
            e0 = exp(e0a)
            tls = t * lam * sa
            tlc = t * lam * ca
            for d in range(D):
                accr[d] = 0.0
                acci[d] = 0.0
            nskip = 0

            for k in range(n, 0, -1):
                ip = n + k
                im = n - k
                skip_p = guard and (e0a - tls * q[ip]) + lv[ip] + lw[ip] < log_cutoff
                if skip_p:
                    nskip += 1
                else:
                    er = e0 * exp(-tls * q[ip])
                    ar = -tlc * p[ip]
                    ewr = er * cos(ar)
                    ewi = er * sin(ar)
                    wr = -c * ewi
                    wi = c * ewr
                    wpr = wr * tprime[ip].real - wi * tprime[ip].imag
                    wpi = wr * tprime[ip].imag + wi * tprime[ip].real
                skip_m = guard and (e0a - tls * q[im]) + lv[im] + lw[im] < log_cutoff
                if skip_m:
                    nskip += 1
                else:
                    er = e0 * exp(-tls * q[im])
                    ar = -tlc * p[im]
                    ewr = er * cos(ar)
                    ewi = er * sin(ar)
                    wr = -c * ewi
                    wi = c * ewr
                    wmr = wr * tprime[im].real - wi * tprime[im].imag
                    wmi = wr * tprime[im].imag + wi * tprime[im].real
                for d in range(D):
                    if skip_p:
                        pr = 0.0
                        pi_ = 0.0
                    else:
                        pr = wpr * values[ip, d].real - wpi * values[ip, d].imag
                        pi_ = wpr * values[ip, d].imag + wpi * values[ip, d].real
                    if skip_m:
                        mr = 0.0
                        mi = 0.0
                    else:
                        mr = wmr * values[im, d].real - wmi * values[im, d].imag
                        mi = wmr * values[im, d].imag + wmi * values[im, d].real
                    accr[d] += pr + mr
                    acci[d] += pi_ + mi

            skip_0 = guard and (e0a - tls * q[n]) + lv[n] + lw[n] < log_cutoff
            if skip_0:
                nskip += 1
            else:
                er = e0 * exp(-tls * q[n])
                ar = -tlc * p[n]
                ewr = er * cos(ar)
                ewi = er * sin(ar)
                wr = -c * ewi
                wi = c * ewr
                w0r = wr * tprime[n].real - wi * tprime[n].imag
                w0i = wr * tprime[n].imag + wi * tprime[n].real
            for d in range(D):
                if skip_0:
                    zr = 0.0
                    zi = 0.0
                else:
                    zr = w0r * values[n, d].real - w0i * values[n, d].imag
                    zi = w0r * values[n, d].imag + w0i * values[n, d].real
                accr[d] += zr
                acci[d] += zi

            for d in range(D):
                out[j, d] = accr[d] + acci[d] * 1j
            skipped[j] = nskip
    finally:
        free(q)
        free(p)
        free(lw)
        free(lv)
        free(accr)
        free(acci)
