"""numba-compiled kernels. Loop form of the functions in ``_numpy``."""

import numpy as np
from numba import njit


@njit(cache=True)
def scatter_lambda(A, s):
    n = A.shape[0]
    r_left = np.empty(n, dtype=np.complex128)
    t_left = np.empty(n, dtype=np.complex128)
    r_right = np.empty(n, dtype=np.complex128)
    t_right = np.empty(n, dtype=np.complex128)
    for i in range(n):
        a00 = A[i, 0, 0]
        a01 = A[i, 0, 1]
        a10 = A[i, 1, 0]
        a11 = A[i, 1, 1]
        si = s[i]
        den = si * (a00 + a11) - a10 - si * si * a01
        r_left[i] = -(si * (a00 - a11) - a10 + si * si * a01) / den
        t_right[i] = 2.0 * si / den
        t_left[i] = t_right[i] * (a00 * a11 - a01 * a10)
        r_right[i] = (si * (a00 - a11) + a10 - si * si * a01) / den
    return r_left, t_left, r_right, t_right


@njit(cache=True)
def odd_residual(theta, z, w, l0):
    n = theta.shape[0]
    out = np.empty(n)
    for i in range(n):
        e = np.exp(1j * theta[i])
        s = 2.0 * e * z[i].real
        p = 2.0j * e * w[i].imag
        top = abs(-1j - 0.5j * (s - p))
        bottom = abs(1.0 / l0 - (s + p) / (2.0 * l0))
        out[i] = max(top, bottom)
    return out


@njit(cache=True)
def rk4_steps(h, v0, vm, v1, k2):
    t00, t01, t10, t11 = 1.0, 0.0, 0.0, 1.0
    err = 0.0
    for j in range(h.shape[0]):
        hj = h[j]
        q0 = v0[j] - k2
        qm = vm[j] - k2
        q1 = v1[j] - k2
        # two columns of T advanced together; y = (psi, dpsi)
        for col in range(2):
            if col == 0:
                y0, y1 = t00, t10
            else:
                y0, y1 = t01, t11
            a0, a1 = y1, q0 * y0
            b0, b1 = y1 + 0.5 * hj * a1, qm * (y0 + 0.5 * hj * a0)
            c0, c1 = y1 + 0.5 * hj * b1, qm * (y0 + 0.5 * hj * b0)
            d0, d1 = y1 + hj * c1, q1 * (y0 + hj * c0)
            n0 = y0 + hj / 6.0 * (a0 + 2.0 * b0 + 2.0 * c0 + d0)
            n1 = y1 + hj / 6.0 * (a1 + 2.0 * b1 + 2.0 * c1 + d1)
            if col == 0:
                t00, t10 = n0, n1
            else:
                t01, t11 = n0, n1
        qmax = max(abs(q0), abs(qm), abs(q1))
        e = (hj * hj * qmax) ** 2.5 / 120.0
        if e > err:
            err = e
    T = np.empty((2, 2))
    T[0, 0] = t00
    T[0, 1] = t01
    T[1, 0] = t10
    T[1, 1] = t11
    return T, err


@njit(cache=True)
def delta_chain(pos, g, k):
    t00, t01, t10, t11 = 1.0, 0.0, 0.0, 1.0
    n = pos.shape[0]
    for i in range(n):
        if i > 0:
            gap = pos[i] - pos[i - 1]
            c = np.cos(k * gap)
            sn = np.sin(k * gap)
            n00 = c * t00 + sn / k * t10
            n01 = c * t01 + sn / k * t11
            n10 = -k * sn * t00 + c * t10
            n11 = -k * sn * t01 + c * t11
            t00, t01, t10, t11 = n00, n01, n10, n11
        t10 = t10 + g[i] * t00
        t11 = t11 + g[i] * t01
    T = np.empty((2, 2))
    T[0, 0] = t00
    T[0, 1] = t01
    T[1, 0] = t10
    T[1, 1] = t11
    return T
