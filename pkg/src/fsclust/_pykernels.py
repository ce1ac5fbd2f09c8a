"""Pure numpy implementations of the O(n^2) kernels.

Used when the compiled ``_ckernels`` extension is unavailable (or disabled
with ``FSCLUST_PURE_PYTHON=1``). Both modules expose the same functions and
agree to rounding error.
"""
import math

import numpy as np

# doubles per temporary block; bounds peak memory of the vectorized sums
_BLOCK_ELEMS = 2_000_000


def _hermite(u, order):
    # probabilists' Hermite polynomials: phi^(r)(u) = He_r(u) * phi(u) for even r
    u2 = u * u
    if order == 0:
        return np.ones_like(u)
    if order == 2:
        return u2 - 1.0
    if order == 4:
        return (u2 - 6.0) * u2 + 3.0
    if order == 6:
        return ((u2 - 15.0) * u2 + 45.0) * u2 - 15.0
    raise ValueError(f"unsupported derivative order {order}")


def pair_hermite_sum(x, g, order):
    """Return sum over all ordered pairs (i, j) of He_r(u) exp(-u^2/2), u = (x_i - x_j)/g.

    The diagonal (i == j) is included.
    """
    x = np.ascontiguousarray(x, dtype=np.float64)
    n = x.shape[0]
    inv_g = 1.0 / g
    diag = n * float(_hermite(np.zeros(1), order)[0])
    rows = max(1, _BLOCK_ELEMS // max(n, 1))
    partial = []
    for a in range(0, n, rows):
        b = min(a + rows, n)
        u = (x[a:b, None] - x[None, a:]) * inv_g
        t = _hermite(u, order) * np.exp(-0.5 * u * u)
        # strictly upper triangle of the leading square block
        t[:, : b - a] = np.triu(t[:, : b - a], k=1)
        partial.append(float(t.sum()))
    return diag + 2.0 * math.fsum(partial)


def kde_grid(sample, h, points):
    """Unnormalized Gaussian kernel sums at each evaluation point.

    Returns ``(s0, s1)`` with ``s0[k] = sum_i exp(-u^2/2)`` and
    ``s1[k] = sum_i u exp(-u^2/2)`` where ``u = (points[k] - sample[i]) / h``.
    """
    sample = np.ascontiguousarray(sample, dtype=np.float64)
    points = np.ascontiguousarray(points, dtype=np.float64)
    n = sample.shape[0]
    m = points.shape[0]
    inv_h = 1.0 / h
    s0 = np.empty(m)
    s1 = np.empty(m)
    rows = max(1, _BLOCK_ELEMS // max(n, 1))
    for a in range(0, m, rows):
        b = min(a + rows, m)
        u = (points[a:b, None] - sample[None, :]) * inv_h
        e = np.exp(-0.5 * u * u)
        s0[a:b] = e.sum(axis=1)
        s1[a:b] = (u * e).sum(axis=1)
    return s0, s1
