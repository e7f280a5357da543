# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled Dormand-Prince 5(4) integrator for ``dy/dt = M y + c``.

Mirrors :mod:`plasmonsr._kernels_py` operation for operation.
"""

import numpy as np
from libc.math cimport sqrt, fabs, pow


cdef enum:
    NMAX = 8

cdef double A21 = 1.0 / 5.0
cdef double A31 = 3.0 / 40.0, A32 = 9.0 / 40.0
cdef double A41 = 44.0 / 45.0, A42 = -56.0 / 15.0, A43 = 32.0 / 9.0
cdef double A51 = 19372.0 / 6561.0, A52 = -25360.0 / 2187.0
cdef double A53 = 64448.0 / 6561.0, A54 = -212.0 / 729.0
cdef double A61 = 9017.0 / 3168.0, A62 = -355.0 / 33.0, A63 = 46732.0 / 5247.0
cdef double A64 = 49.0 / 176.0, A65 = -5103.0 / 18656.0
cdef double B1 = 35.0 / 384.0, B3 = 500.0 / 1113.0, B4 = 125.0 / 192.0
cdef double B5 = -2187.0 / 6784.0, B6 = 11.0 / 84.0
cdef double E1 = 71.0 / 57600.0, E3 = -71.0 / 16695.0, E4 = 71.0 / 1920.0
cdef double E5 = -17253.0 / 339200.0, E6 = 22.0 / 525.0, E7 = -1.0 / 40.0

cdef double SAFETY = 0.9
cdef double MIN_FACTOR = 0.2
cdef double MAX_FACTOR = 5.0
cdef double EPS = 2.220446049250313e-16

STATUS_OK = 0
STATUS_UNDERFLOW = 1
STATUS_MAX_STEPS = 2


cdef inline void _rhs(double[:, ::1] M, double[::1] c, double* y, double* out, int n) nogil:
    cdef int i, j
    cdef double acc
    for i in range(n):
        acc = c[i]
        for j in range(n):
            acc += M[i, j] * y[j]
        out[i] = acc


cdef inline double _min(double a, double b) nogil:
    return a if a < b else b


cdef inline double _max(double a, double b) nogil:
    return a if a > b else b


def integrate_affine(M, c, y0, t_samples, double rtol, double atol, long max_steps=1000000):
    """See :func:`plasmonsr._kernels_py.integrate_affine`."""
    cdef double[:, ::1] Mv = np.ascontiguousarray(M, dtype=np.float64)
    cdef double[::1] cv = np.ascontiguousarray(c, dtype=np.float64)
    cdef double[::1] y0v = np.ascontiguousarray(y0, dtype=np.float64)
    cdef double[::1] ts = np.ascontiguousarray(t_samples, dtype=np.float64)
    cdef int n = y0v.shape[0]
    cdef Py_ssize_t ns = ts.shape[0]
    if n > NMAX:
        raise ValueError("state dimension exceeds compiled maximum")
    out = np.empty((ns, n), dtype=np.float64)
    cdef double[:, ::1] ys = out
    if ns == 0:
        return out, STATUS_OK, 0, 0

    cdef double y[NMAX]
    cdef double k1[NMAX]
    cdef double k2[NMAX]
    cdef double k3[NMAX]
    cdef double k4[NMAX]
    cdef double k5[NMAX]
    cdef double k6[NMAX]
    cdef double k7[NMAX]
    cdef double tmp[NMAX]
    cdef double ynew[NMAX]
    cdef int i
    cdef Py_ssize_t k
    cdef double t, t_end, h, h_try, err, e, sc, fac, d0, d1
    cdef bint last
    cdef long n_acc = 0, n_rej = 0, steps = 0
    cdef int status = 0

    for i in range(n):
        y[i] = y0v[i]
        ys[0, i] = y[i]
    t = ts[0]
    _rhs(Mv, cv, y, k1, n)

    d0 = 0.0
    d1 = 0.0
    for i in range(n):
        sc = atol + rtol * fabs(y[i])
        d0 += (y[i] / sc) * (y[i] / sc)
        d1 += (k1[i] / sc) * (k1[i] / sc)
    d0 = sqrt(d0 / n)
    d1 = sqrt(d1 / n)
    if d0 < 1e-5 or d1 < 1e-5:
        h = 1e-6
    else:
        h = 0.01 * d0 / d1
    if ns > 1:
        h = _min(h, ts[ns - 1] - ts[0])

    with nogil:
        for k in range(1, ns):
            t_end = ts[k]
            while t < t_end:
                if steps >= max_steps:
                    status = 2
                    break
                steps += 1
                if h < 16.0 * EPS * _max(fabs(t), 1.0):
                    status = 1
                    break
                last = False
                if t + h >= t_end:
                    h_try = t_end - t
                    last = True
                else:
                    h_try = h

                for i in range(n):
                    tmp[i] = y[i] + h_try * (A21 * k1[i])
                _rhs(Mv, cv, tmp, k2, n)
                for i in range(n):
                    tmp[i] = y[i] + h_try * (A31 * k1[i] + A32 * k2[i])
                _rhs(Mv, cv, tmp, k3, n)
                for i in range(n):
                    tmp[i] = y[i] + h_try * (A41 * k1[i] + A42 * k2[i] + A43 * k3[i])
                _rhs(Mv, cv, tmp, k4, n)
                for i in range(n):
                    tmp[i] = y[i] + h_try * (A51 * k1[i] + A52 * k2[i] + A53 * k3[i] + A54 * k4[i])
                _rhs(Mv, cv, tmp, k5, n)
                for i in range(n):
                    tmp[i] = y[i] + h_try * (A61 * k1[i] + A62 * k2[i] + A63 * k3[i]
                                             + A64 * k4[i] + A65 * k5[i])
                _rhs(Mv, cv, tmp, k6, n)
                for i in range(n):
                    ynew[i] = y[i] + h_try * (B1 * k1[i] + B3 * k3[i] + B4 * k4[i]
                                              + B5 * k5[i] + B6 * k6[i])
                _rhs(Mv, cv, ynew, k7, n)

                err = 0.0
                for i in range(n):
                    e = h_try * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i]
                                 + E6 * k6[i] + E7 * k7[i])
                    sc = atol + rtol * _max(fabs(y[i]), fabs(ynew[i]))
                    err += (e / sc) * (e / sc)
                err = sqrt(err / n)

                if err <= 1.0:
                    n_acc += 1
                    if last:
                        t = t_end
                    else:
                        t = t + h_try
                    for i in range(n):
                        y[i] = ynew[i]
                        k1[i] = k7[i]
                    if err == 0.0:
                        fac = MAX_FACTOR
                    else:
                        fac = _min(MAX_FACTOR, _max(MIN_FACTOR, SAFETY * pow(err, -0.2)))
                    if last:
                        h = _max(h, h_try * fac)
                    else:
                        h = h_try * fac
                else:
                    n_rej += 1
                    h = h_try * _max(MIN_FACTOR, SAFETY * pow(err, -0.2))
            if status != 0:
                break
            for i in range(n):
                ys[k, i] = y[i]
    return out, status, n_acc, n_rej
