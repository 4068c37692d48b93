# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels; see ``_kernels_py`` for the reference semantics."""

import numpy as np
cimport numpy as cnp

from .errors import SeriesNotConverged

cdef extern from "complex.h" nogil:
    double complex cexp(double complex)
    double complex clog(double complex)
    double complex csin(double complex)
    double complex ccos(double complex)
    double cabs(double complex)
    double creal(double complex)

cdef extern from "math.h" nogil:
    double exp(double)
    double log(double)

cdef double PI = 3.141592653589793
cdef double SMALL_V = 1e-3


cdef inline void _sin_terms(double complex v, bint reg, double complex* out) nogil:
    cdef double complex s, c, v2
    if not reg:
        s = csin(v)
        c = ccos(v)
        out[0] = clog(s)
        out[1] = c / s
        out[2] = -1.0 / (s * s)
        return
    if cabs(v) < SMALL_V:
        v2 = v * v
        out[0] = -v2 / 6.0 - v2 * v2 / 180.0
        out[1] = -v / 3.0 - v * v2 / 45.0
        out[2] = -1.0 / 3.0 - v2 / 15.0
        return
    s = csin(v)
    c = ccos(v)
    out[0] = clog(s / v)
    out[1] = c / s - 1.0 / v
    out[2] = -1.0 / (s * s) + 1.0 / (v * v)


cdef inline int _product_terms(double complex v, double q, double tol, int maxterms,
                               double complex* out) nogil:
    cdef double complex ep = cexp(2j * v)
    cdef double complex em = cexp(-2j * v)
    cdef double complex pp, pm
    cdef double q2 = q * q
    cdef double qn = 1.0
    cdef double pmax, tail, d
    cdef int n
    out[0] = 0
    out[1] = 0
    out[2] = 0
    for n in range(1, maxterms + 1):
        qn *= q2
        pp = qn * ep
        pm = qn * em
        out[0] += clog(1.0 - pp) + clog(1.0 - pm)
        out[1] += -2j * pp / (1.0 - pp) + 2j * pm / (1.0 - pm)
        out[2] += 4.0 * pp / ((1.0 - pp) * (1.0 - pp)) + 4.0 * pm / ((1.0 - pm) * (1.0 - pm))
        pmax = cabs(pp)
        if cabs(pm) > pmax:
            pmax = cabs(pm)
        d = 1.0 - q2 * pmax
        if d < 1e-300:
            d = 1e-300
        tail = q2 * pmax / ((1.0 - q2) * d * d)
        if tail * 4.0 < tol:
            return 0
    return 1


def rect_regular_part(x, y, double a, double b, double tol=1e-13, int maxterms=400):
    cdef cnp.ndarray[cnp.float64_t, ndim=2] X = np.ascontiguousarray(x, dtype=np.float64).reshape(-1, 2)
    cdef cnp.ndarray[cnp.float64_t, ndim=2] Y = np.ascontiguousarray(y, dtype=np.float64).reshape(-1, 2)
    cdef Py_ssize_t n = X.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=1] val = np.zeros(n)
    cdef cnp.ndarray[cnp.float64_t, ndim=2] gx = np.zeros((n, 2))
    cdef cnp.ndarray[cnp.float64_t, ndim=2] gy = np.zeros((n, 2))
    cdef cnp.ndarray[cnp.float64_t, ndim=3] hxx = np.zeros((n, 2, 2))
    cdef cnp.ndarray[cnp.float64_t, ndim=3] hxy = np.zeros((n, 2, 2))
    cdef double k = PI / (2.0 * a)
    cdef double q = exp(-PI * b / a)
    cdef double logk = log(k)
    cdef double s = 1.0 / (2.0 * PI)
    cdef double complex z, w, wc, zeta, f0, f1, f2
    cdef double complex st[3]
    cdef double complex pt[3]
    cdef double complex cx[2]
    cdef double complex dy[2]
    cdef double sgn
    cdef bint reg
    cdef Py_ssize_t p
    cdef int t, i, j, bad = 0
    cx[0] = 1.0
    cx[1] = 1j
    with nogil:
        for p in range(n):
            z = X[p, 0] + 1j * X[p, 1]
            w = Y[p, 0] + 1j * Y[p, 1]
            wc = Y[p, 0] - 1j * Y[p, 1]
            for t in range(4):
                if t == 0:
                    zeta = z - w; sgn = 1.0; reg = True
                    dy[0] = -1.0; dy[1] = -1j
                elif t == 1:
                    zeta = z + w; sgn = 1.0; reg = False
                    dy[0] = 1.0; dy[1] = 1j
                elif t == 2:
                    zeta = z - wc; sgn = -1.0; reg = False
                    dy[0] = -1.0; dy[1] = 1j
                else:
                    zeta = z + wc; sgn = -1.0; reg = False
                    dy[0] = 1.0; dy[1] = -1j
                _sin_terms(k * zeta, reg, st)
                bad |= _product_terms(k * zeta, q, tol, maxterms, pt)
                f0 = st[0] + pt[0]
                if reg:
                    f0 = f0 + logk
                f1 = k * (st[1] + pt[1])
                f2 = k * k * (st[2] + pt[2])
                val[p] += sgn * creal(f0) * s
                for i in range(2):
                    gx[p, i] += sgn * creal(f1 * cx[i]) * s
                    gy[p, i] += sgn * creal(f1 * dy[i]) * s
                    for j in range(2):
                        hxx[p, i, j] += sgn * creal(f2 * cx[i] * cx[j]) * s
                        hxy[p, i, j] += sgn * creal(f2 * cx[i] * dy[j]) * s
    if bad:
        raise SeriesNotConverged(f"rectangle image series did not reach {tol:g} in {maxterms} rows")
    return val, gx, gy, hxx, hxy


def apply_stencil(u, nbr, wgt, bdiag):
    cdef cnp.ndarray[cnp.float64_t, ndim=1] U = np.ascontiguousarray(u, dtype=np.float64)
    cdef cnp.ndarray[cnp.int64_t, ndim=2] NB = np.ascontiguousarray(nbr, dtype=np.int64)
    cdef cnp.ndarray[cnp.float64_t, ndim=2] C = np.ascontiguousarray(wgt, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] D = np.ascontiguousarray(bdiag, dtype=np.float64)
    cdef Py_ssize_t n = U.shape[0], m = NB.shape[1], i, k
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = np.empty(n)
    cdef double acc, ui
    cdef long long j
    with nogil:
        for i in range(n):
            ui = U[i]
            acc = D[i] * ui
            for k in range(m):
                j = NB[i, k]
                if j >= 0:
                    acc += C[i, k] * (ui - U[j])
            out[i] = acc
    return out


def tensor_bilinear(xs, ys, grid, px, py):
    cdef cnp.ndarray[cnp.float64_t, ndim=1] XS = np.ascontiguousarray(xs, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] YS = np.ascontiguousarray(ys, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=2] GR = np.ascontiguousarray(grid, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] PX = np.ascontiguousarray(px, dtype=np.float64).ravel()
    cdef cnp.ndarray[cnp.float64_t, ndim=1] PY = np.ascontiguousarray(py, dtype=np.float64).ravel()
    cdef Py_ssize_t n = PX.shape[0], nx = XS.shape[0], ny = YS.shape[0], p, lo, hi, mid, ix, iy
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = np.empty(n)
    cdef double tx, ty
    with nogil:
        for p in range(n):
            # rightmost ix with xs[ix] <= px, clipped to [0, nx-2]
            lo = 0
            hi = nx - 1
            while hi - lo > 1:
                mid = (lo + hi) // 2
                if XS[mid] <= PX[p]:
                    lo = mid
                else:
                    hi = mid
            ix = lo
            lo = 0
            hi = ny - 1
            while hi - lo > 1:
                mid = (lo + hi) // 2
                if YS[mid] <= PY[p]:
                    lo = mid
                else:
                    hi = mid
            iy = lo
            tx = (PX[p] - XS[ix]) / (XS[ix + 1] - XS[ix])
            ty = (PY[p] - YS[iy]) / (YS[iy + 1] - YS[iy])
            out[p] = ((1 - tx) * (1 - ty) * GR[iy, ix] + tx * (1 - ty) * GR[iy, ix + 1]
                      + (1 - tx) * ty * GR[iy + 1, ix] + tx * ty * GR[iy + 1, ix + 1])
    return out.reshape(np.shape(px))
