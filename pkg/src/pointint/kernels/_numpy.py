"""Pure-numpy kernels. Same signatures as the numba versions."""

import numpy as np


def chain_product(mats):
    """``M[n-1] @ ... @ M[1] @ M[0]`` by pairwise reduction."""
    mats = np.asarray(mats)
    if len(mats) == 0:
        return np.eye(2, dtype=mats.dtype)
    while len(mats) > 1:
        if len(mats) % 2:
            eye = np.broadcast_to(np.eye(2, dtype=mats.dtype), (1, 2, 2))
            mats = np.concatenate([mats, eye])
        mats = mats[1::2] @ mats[0::2]
    return mats[0].copy()


def scatter_lambda(A, s):
    a00, a01, a10, a11 = A[:, 0, 0], A[:, 0, 1], A[:, 1, 0], A[:, 1, 1]
    det = a00 * a11 - a01 * a10
    den = s * (a00 + a11) - a10 - s * s * a01
    r_left = -(s * (a00 - a11) - a10 + s * s * a01) / den
    t_left = 2.0 * s * det / den
    t_right = 2.0 * s / den
    r_right = (s * (a00 - a11) + a10 - s * s * a01) / den
    return r_left, t_left, r_right, t_right


def odd_residual(theta, z, w, l0):
    """Largest entry of ``(A1 - A2 U~) + (A1 - A2 U)`` per sample."""
    e = np.exp(1j * theta)
    s = 2.0 * e * z.real  # diagonal of U + U~
    p = 2.0j * e * w.imag  # off-diagonal of U + U~
    # A2 (U + U~) = [[i(s-p)/2, -i(s-p)/2], [(s+p)/(2 l0), (s+p)/(2 l0)]]; 2 A1 = [[-i, i], [1/l0, 1/l0]]
    top = np.abs(-1j - 0.5j * (s - p))
    bottom = np.abs(1.0 / l0 - (s + p) / (2.0 * l0))
    return np.maximum(top, bottom)


def rk4_steps(h, v0, vm, v1, k2):
    """Transfer matrix of ``psi'' = (V - k^2) psi`` over consecutive RK4 steps.

    Returns ``(T, max_local_error_estimate)``.
    """
    n = len(h)
    if n == 0:
        return np.eye(2), 0.0
    q0, qm, q1 = v0 - k2, vm - k2, v1 - k2

    def gen(q):
        g = np.zeros((n, 2, 2))
        g[:, 0, 1] = 1.0
        g[:, 1, 0] = q
        return g

    eye = np.broadcast_to(np.eye(2), (n, 2, 2))
    hh = h[:, None, None]
    g0, gm, g1 = gen(q0), gen(qm), gen(q1)
    k1 = g0
    k2m = gm @ (eye + 0.5 * hh * k1)
    k3m = gm @ (eye + 0.5 * hh * k2m)
    k4m = g1 @ (eye + hh * k3m)
    steps = eye + hh / 6.0 * (k1 + 2.0 * k2m + 2.0 * k3m + k4m)
    qmax = np.maximum(np.maximum(np.abs(q0), np.abs(qm)), np.abs(q1))
    err = float(np.max((h * h * qmax) ** 2.5 / 120.0))
    return chain_product(steps), err


def delta_chain(pos, g, k):
    """Point matrices ``[[1,0],[g,1]]`` interleaved with free propagation."""
    n = len(pos)
    if n == 0:
        return np.eye(2)
    mats = np.zeros((2 * n - 1, 2, 2))
    mats[0::2, 0, 0] = 1.0
    mats[0::2, 1, 1] = 1.0
    mats[0::2, 1, 0] = g
    gaps = np.diff(pos)
    c, sn = np.cos(k * gaps), np.sin(k * gaps)
    mats[1::2, 0, 0] = c
    mats[1::2, 0, 1] = sn / k
    mats[1::2, 1, 0] = -k * sn
    mats[1::2, 1, 1] = c
    return chain_product(mats)
