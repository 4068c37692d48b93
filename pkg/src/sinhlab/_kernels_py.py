"""Pure NumPy implementations of the hot kernels.

Each function here has a compiled twin in ``_kernels.pyx`` with the same
signature; ``sinhlab._core`` picks one at import time.
"""

import numpy as np

from .errors import SeriesNotConverged

TWO_PI = 2.0 * np.pi
_SMALL_V = 1e-3


def _sin_terms(v, regularize):
    """log sin v and its first two v-derivatives; with ``regularize``, minus log v."""
    if not regularize:
        return np.log(np.sin(v)), 1.0 / np.tan(v), -1.0 / np.sin(v) ** 2
    logs = np.empty_like(v)
    d1 = np.empty_like(v)
    d2 = np.empty_like(v)
    small = np.abs(v) < _SMALL_V
    vs = v[small]
    v2 = vs * vs
    logs[small] = -v2 / 6.0 - v2 * v2 / 180.0
    d1[small] = -vs / 3.0 - vs * v2 / 45.0
    d2[small] = -1.0 / 3.0 - v2 / 15.0
    big = ~small
    vb = v[big]
    logs[big] = np.log(np.sin(vb) / vb)
    d1[big] = 1.0 / np.tan(vb) - 1.0 / vb
    d2[big] = -1.0 / np.sin(vb) ** 2 + 1.0 / (vb * vb)
    return logs, d1, d2


def _product_terms(v, q, tol, maxterms):
    """Sum over n of log(1 - q^2n e^{2iv}) + log(1 - q^2n e^{-2iv}) and derivatives."""
    ep = np.exp(2j * v)
    em = np.exp(-2j * v)
    s0 = np.zeros_like(v)
    s1 = np.zeros_like(v)
    s2 = np.zeros_like(v)
    q2 = q * q
    qn = 1.0
    for n in range(1, maxterms + 1):
        qn *= q2
        pp = qn * ep
        pm = qn * em
        s0 += np.log(1.0 - pp) + np.log(1.0 - pm)
        s1 += -2j * pp / (1.0 - pp) + 2j * pm / (1.0 - pm)
        s2 += 4.0 * pp / (1.0 - pp) ** 2 + 4.0 * pm / (1.0 - pm) ** 2
        pmax = max(np.max(np.abs(pp), initial=0.0), np.max(np.abs(pm), initial=0.0))
        # geometric tail bound on the remaining factors, with derivative weight
        tail = q2 * pmax / ((1.0 - q2) * max(1.0 - q2 * pmax, 1e-300) ** 2)
        if tail * 4.0 < tol:
            return s0, s1, s2
    raise SeriesNotConverged(f"rectangle image series did not reach {tol:g} in {maxterms} rows")


def rect_regular_part(x, y, a, b, tol=1e-13, maxterms=400):
    """Regular part H and derivatives for the rectangle (0,a) x (0,b).

    Convention: G(x,y) = -(1/2pi) log|x-y| - H(x,y).
    Returns (value, grad_x, grad_y, hess_xx, hess_xy) for each row of x, y.
    """
    x = np.ascontiguousarray(x, dtype=float).reshape(-1, 2)
    y = np.ascontiguousarray(y, dtype=float).reshape(-1, 2)
    z = x[:, 0] + 1j * x[:, 1]
    w = y[:, 0] + 1j * y[:, 1]
    wc = np.conj(w)
    k = np.pi / (2.0 * a)
    q = np.exp(-np.pi * b / a)
    n = z.shape[0]
    val = np.zeros(n)
    gx = np.zeros((n, 2))
    gy = np.zeros((n, 2))
    hxx = np.zeros((n, 2, 2))
    hxy = np.zeros((n, 2, 2))
    cx = (1.0, 1j)
    # (zeta, sign in H, y-coefficients, regularize)
    terms = (
        (z - w, 1.0, (-1.0, -1j), True),
        (z + w, 1.0, (1.0, 1j), False),
        (z - wc, -1.0, (-1.0, 1j), False),
        (z + wc, -1.0, (1.0, -1j), False),
    )
    for zeta, sgn, dy, reg in terms:
        v = k * zeta
        l0, l1, l2 = _sin_terms(v, reg)
        p0, p1, p2 = _product_terms(v, q, tol, maxterms)
        f0 = l0 + p0 + (np.log(k) if reg else 0.0)
        f1 = k * (l1 + p1)
        f2 = k * k * (l2 + p2)
        val += sgn * f0.real
        for i in range(2):
            gx[:, i] += sgn * (f1 * cx[i]).real
            gy[:, i] += sgn * (f1 * dy[i]).real
            for j in range(2):
                hxx[:, i, j] += sgn * (f2 * cx[i] * cx[j]).real
                hxy[:, i, j] += sgn * (f2 * cx[i] * dy[j]).real
    s = 1.0 / TWO_PI
    return val * s, gx * s, gy * s, hxx * s, hxy * s


def apply_stencil(u, nbr, wgt, bdiag):
    """out_i = bdiag_i u_i + sum_k wgt_ik (u_i - u[nbr_ik]), skipping nbr == -1.

    The difference form keeps rounding proportional to the local variation of
    ``u`` rather than to ``|u|`` times the (large) stencil weights.
    """
    u = np.asarray(u, dtype=float)
    mask = nbr >= 0
    gathered = u[np.where(mask, nbr, 0)]
    diff = np.where(mask, u[:, None] - gathered, 0.0)
    return bdiag * u + np.sum(wgt * diff, axis=1)


def tensor_bilinear(xs, ys, grid, px, py):
    """Bilinear interpolation of ``grid[iy, ix]`` on the tensor grid xs x ys."""
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    px = np.asarray(px, dtype=float)
    py = np.asarray(py, dtype=float)
    ix = np.clip(np.searchsorted(xs, px, side="right") - 1, 0, len(xs) - 2)
    iy = np.clip(np.searchsorted(ys, py, side="right") - 1, 0, len(ys) - 2)
    tx = (px - xs[ix]) / (xs[ix + 1] - xs[ix])
    ty = (py - ys[iy]) / (ys[iy + 1] - ys[iy])
    return (
        (1 - tx) * (1 - ty) * grid[iy, ix]
        + tx * (1 - ty) * grid[iy, ix + 1]
        + (1 - tx) * ty * grid[iy + 1, ix]
        + tx * ty * grid[iy + 1, ix + 1]
    )
