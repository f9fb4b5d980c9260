"""Reference computations that share no code path with the package.

Each oracle builds its own matrices from the closed forms and uses a
different numerical method (power iteration, matrix powers, dense grids).
"""

import math

import numpy as np


def baseline_matrix(r, mu, alpha, d):
    """E @ C expanded entry by entry."""
    q = math.exp(-d / mu)
    c = math.exp(-alpha * d)
    e10 = 0.5 * r * (1 + q)
    e11 = 1 - e10
    e20, e21, e22 = r * q, r * (1 - q), 1 - r
    return np.array(
        [
            [1.0, 0.0, 0.0],
            [e10, e11 * (1 - c), e11 * c],
            [e20, e21 * (1 - c), e21 * c + e22],
        ]
    )


def power_iteration_rate(block, log2_iters=30):
    """Dominant eigenvalue of a nonnegative 2x2 block by power iteration.

    The iterate ``u B^n`` with n = 2**log2_iters is reached by repeated
    squaring with rescaling; the eigenvalue is the growth factor of one
    further multiplication.  The eigenvalue error after n steps is at most
    about 1/(e*n) over all spectral gaps, hence the large default n.
    """
    B = np.array(block, dtype=float)
    P = B.copy()
    for _ in range(log2_iters):
        P = P @ P
        scale = P.max()
        if scale == 0.0:
            return 0.0
        P /= scale
    v = np.array([0.5, 0.5]) @ P
    if v.sum() == 0.0:
        return 0.0
    return (v @ B).sum() / v.sum()


def stationary_by_powers(A, power=2**12):
    """Rows of A^power converge to the stationary distribution of an ergodic chain."""
    M = np.array(A, dtype=float)
    steps = 1
    while steps < power:
        M = M @ M
        steps *= 2
    return M[0]


def dense_grid(f, d_min, d_max, step):
    ds = np.arange(d_min, d_max + 0.5 * step, step)
    return ds, np.array([f(d) for d in ds])
