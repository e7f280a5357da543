"""Pure-Python Dormand-Prince 5(4) integrator for ``dy/dt = M y + c``.

Reference implementation and fallback for :mod:`plasmonsr._kernels`; both
must follow the same arithmetic so results agree to rounding.
"""

import math

import numpy as np

STATUS_OK = 0
STATUS_UNDERFLOW = 1
STATUS_MAX_STEPS = 2

# Dormand-Prince tableau
A21 = 1.0 / 5.0
A31, A32 = 3.0 / 40.0, 9.0 / 40.0
A41, A42, A43 = 44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0
A51, A52, A53, A54 = 19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0
A61, A62, A63, A64, A65 = (9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0,
                           49.0 / 176.0, -5103.0 / 18656.0)
B1, B3, B4, B5, B6 = 35.0 / 384.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0
E1, E3, E4, E5, E6, E7 = (71.0 / 57600.0, -71.0 / 16695.0, 71.0 / 1920.0,
                          -17253.0 / 339200.0, 22.0 / 525.0, -1.0 / 40.0)

SAFETY = 0.9
MIN_FACTOR = 0.2
MAX_FACTOR = 5.0
EPS = 2.220446049250313e-16


def _rhs(M, c, y, out):
    n = len(y)
    for i in range(n):
        acc = c[i]
        row = M[i]
        for j in range(n):
            acc += row[j] * y[j]
        out[i] = acc


def integrate_affine(M, c, y0, t_samples, rtol, atol, max_steps=1_000_000):
    """Integrate from ``t_samples[0]`` and return the state at every sample.

    Returns
    -------
    ys : ndarray, shape (len(t_samples), n)
    status : int
        0 on success, 1 on step-size underflow, 2 when ``max_steps`` is hit.
    n_accepted, n_rejected : int
    """
    M = [list(map(float, row)) for row in np.asarray(M, dtype=float)]
    c = [float(v) for v in np.asarray(c, dtype=float)]
    y = [float(v) for v in np.asarray(y0, dtype=float)]
    ts = [float(v) for v in np.asarray(t_samples, dtype=float)]
    n = len(y)
    ns = len(ts)
    ys = np.empty((ns, n))
    if ns == 0:
        return ys, STATUS_OK, 0, 0
    ys[0, :] = y
    t = ts[0]

    k1 = [0.0] * n
    k2 = [0.0] * n
    k3 = [0.0] * n
    k4 = [0.0] * n
    k5 = [0.0] * n
    k6 = [0.0] * n
    k7 = [0.0] * n
    tmp = [0.0] * n
    ynew = [0.0] * n
    _rhs(M, c, y, k1)

    # initial step from the scaled size of y and y'
    d0 = 0.0
    d1 = 0.0
    for i in range(n):
        sc = atol + rtol * abs(y[i])
        d0 += (y[i] / sc) * (y[i] / sc)
        d1 += (k1[i] / sc) * (k1[i] / sc)
    d0 = math.sqrt(d0 / n)
    d1 = math.sqrt(d1 / n)
    if d0 < 1e-5 or d1 < 1e-5:
        h = 1e-6
    else:
        h = 0.01 * d0 / d1
    if ns > 1:
        h = min(h, ts[ns - 1] - ts[0])

    n_acc = 0
    n_rej = 0
    steps = 0
    for k in range(1, ns):
        t_end = ts[k]
        while t < t_end:
            if steps >= max_steps:
                return ys, STATUS_MAX_STEPS, n_acc, n_rej
            steps += 1
            if h < 16.0 * EPS * max(abs(t), 1.0):
                return ys, STATUS_UNDERFLOW, n_acc, n_rej
            last = False
            if t + h >= t_end:
                h_try = t_end - t
                last = True
            else:
                h_try = h

            for i in range(n):
                tmp[i] = y[i] + h_try * (A21 * k1[i])
            _rhs(M, c, tmp, k2)
            for i in range(n):
                tmp[i] = y[i] + h_try * (A31 * k1[i] + A32 * k2[i])
            _rhs(M, c, tmp, k3)
            for i in range(n):
                tmp[i] = y[i] + h_try * (A41 * k1[i] + A42 * k2[i] + A43 * k3[i])
            _rhs(M, c, tmp, k4)
            for i in range(n):
                tmp[i] = y[i] + h_try * (A51 * k1[i] + A52 * k2[i] + A53 * k3[i] + A54 * k4[i])
            _rhs(M, c, tmp, k5)
            for i in range(n):
                tmp[i] = y[i] + h_try * (A61 * k1[i] + A62 * k2[i] + A63 * k3[i]
                                         + A64 * k4[i] + A65 * k5[i])
            _rhs(M, c, tmp, k6)
            for i in range(n):
                ynew[i] = y[i] + h_try * (B1 * k1[i] + B3 * k3[i] + B4 * k4[i]
                                          + B5 * k5[i] + B6 * k6[i])
            _rhs(M, c, ynew, k7)

            err = 0.0
            for i in range(n):
                e = h_try * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i]
                             + E6 * k6[i] + E7 * k7[i])
                sc = atol + rtol * max(abs(y[i]), abs(ynew[i]))
                err += (e / sc) * (e / sc)
            err = math.sqrt(err / n)

            if err <= 1.0:
                n_acc += 1
                t = t_end if last else t + h_try
                for i in range(n):
                    y[i] = ynew[i]
                    k1[i] = k7[i]
                if err == 0.0:
                    fac = MAX_FACTOR
                else:
                    fac = min(MAX_FACTOR, max(MIN_FACTOR, SAFETY * err ** -0.2))
                # a step clipped to a sample time does not grow the nominal step
                h = max(h, h_try * fac) if last else h_try * fac
            else:
                n_rej += 1
                h = h_try * max(MIN_FACTOR, SAFETY * err ** -0.2)
        ys[k, :] = y
    return ys, STATUS_OK, n_acc, n_rej
