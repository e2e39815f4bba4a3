# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels; same signatures and algorithms as ``_pycore``."""

import numpy as np
cimport numpy as cnp
from libc.math cimport exp, log, sqrt, lgamma, ceil, fabs, pow, M_PI

cnp.import_array()

cdef double SERIES_CROSSOVER = 40.0
cdef double TINY = 1e-17
cdef int MAX_HANKEL_TERMS = 80
cdef double EXP_UNDERFLOW = 745.0


cdef inline double _crossover(double nu) nogil:
    return SERIES_CROSSOVER if SERIES_CROSSOVER > nu * nu else nu * nu


cdef double _series(double nu, double z) nogil:
    cdef double q = 0.25 * z * z
    cdef double root, m0, logt0, total, r, m
    if q == 0.0:
        return exp(-nu * log(2.0) - lgamma(nu + 1.0))
    root = 0.5 * (-(nu + 2.0) + sqrt(nu * nu + 4.0 * q))
    m0 = ceil(root)
    if m0 < 0.0:
        m0 = 0.0
    logt0 = 2.0 * m0 * log(0.5 * z) - lgamma(m0 + 1.0) - lgamma(m0 + nu + 1.0) - z
    total = 1.0
    r = 1.0
    m = m0
    while True:
        r = r * q / ((m + 1.0) * (m + nu + 1.0))
        m += 1.0
        total += r
        if r <= TINY * total:
            break
    r = 1.0
    m = m0
    while m > 0.0:
        r = r * m * (m + nu) / q
        m -= 1.0
        total += r
        if r <= TINY * total:
            break
    return exp(logt0 - nu * log(2.0)) * total


cdef double _hankel_reduced(double nu, double z) nogil:
    cdef double mu = 4.0 * nu * nu
    cdef double total = 1.0
    cdef double term = 1.0
    cdef int j
    for j in range(1, MAX_HANKEL_TERMS):
        term = -term * (mu - (2 * j - 1) * (2 * j - 1)) / (8.0 * j * z)
        total += term
        if fabs(term) <= TINY * fabs(total):
            break
    return total * pow(z, -nu) / sqrt(2.0 * M_PI * z)


cdef double reduced_scalar(double nu, double z) nogil:
    if z <= _crossover(nu):
        return _series(nu, z)
    return _hankel_reduced(nu, z)


cdef double bracket_scalar(double k, double z, double s) nogil:
    cdef double nu = k - 0.5
    cdef double mu0, mu1, t0, t1, total, odd, scale
    cdef int j
    if k == 0.0:
        return sqrt(2.0 / M_PI) * 0.5 * ((1.0 + s) + (1.0 - s) * exp(-2.0 * z))
    if z <= _crossover(nu + 1.0):
        return reduced_scalar(nu, z) + s * z * reduced_scalar(nu + 1.0, z)
    mu0 = 4.0 * nu * nu
    mu1 = 4.0 * (nu + 1.0) * (nu + 1.0)
    t0 = 1.0
    t1 = 1.0
    total = 1.0 + s
    for j in range(1, MAX_HANKEL_TERMS):
        odd = (2 * j - 1) * (2 * j - 1)
        t0 = -t0 * (mu0 - odd) / (8.0 * j * z)
        t1 = -t1 * (mu1 - odd) / (8.0 * j * z)
        total += t0 + s * t1
        scale = fabs(t0) if fabs(t0) > fabs(t1) else fabs(t1)
        if scale <= TINY * fabs(total):
            break
    return total * pow(z, -nu) / sqrt(2.0 * M_PI * z)


cdef inline double _sign(double v) nogil:
    if v > 0.0:
        return 1.0
    if v < 0.0:
        return -1.0
    return 0.0


cdef double heat_scalar(double k, double t, double x, double y) nogil:
    cdef double gap = (fabs(x) - fabs(y)) * (fabs(x) - fabs(y)) / (4.0 * t)
    cdef double xy
    if gap >= EXP_UNDERFLOW:
        return 0.0
    xy = x * y
    return (pow(2.0, -k - 1.5) * pow(t, -k - 0.5) * exp(-gap)
            * bracket_scalar(k, fabs(xy) / (2.0 * t), _sign(xy)))


cdef double dunkl_scalar(double k, double x, double y, double pref) nogil:
    cdef double xy = x * y
    cdef double z
    if k == 0.0:
        return exp(xy)
    if xy == 0.0:
        return 1.0
    z = fabs(xy)
    return pref * exp(z) * bracket_scalar(k, z, _sign(xy))


def reduced_bessel(double nu, z):
    cdef cnp.ndarray[double, ndim=1] zf = np.ascontiguousarray(np.asarray(z, dtype=float).ravel())
    cdef Py_ssize_t i, n = zf.shape[0]
    cdef cnp.ndarray[double, ndim=1] out = np.empty(n)
    with nogil:
        for i in range(n):
            out[i] = reduced_scalar(nu, zf[i])
    return out.reshape(np.shape(z))


def kernel_bracket(double k, z, s):
    za = np.asarray(z, dtype=float)
    sa = np.broadcast_to(np.asarray(s, dtype=float), za.shape)
    cdef cnp.ndarray[double, ndim=1] zf = np.ascontiguousarray(za.ravel())
    cdef cnp.ndarray[double, ndim=1] sf = np.ascontiguousarray(sa.ravel())
    cdef Py_ssize_t i, n = zf.shape[0]
    cdef cnp.ndarray[double, ndim=1] out = np.empty(n)
    with nogil:
        for i in range(n):
            out[i] = bracket_scalar(k, zf[i], sf[i])
    return out.reshape(za.shape)


def dunkl_kernel_1d(double k, x, y):
    xa, ya = np.broadcast_arrays(np.asarray(x, float), np.asarray(y, float))
    cdef cnp.ndarray[double, ndim=1] xf = np.ascontiguousarray(xa.ravel())
    cdef cnp.ndarray[double, ndim=1] yf = np.ascontiguousarray(ya.ravel())
    cdef Py_ssize_t i, n = xf.shape[0]
    cdef cnp.ndarray[double, ndim=1] out = np.empty(n)
    cdef double pref = exp((k - 0.5) * log(2.0) + lgamma(k + 0.5))
    with nogil:
        for i in range(n):
            out[i] = dunkl_scalar(k, xf[i], yf[i], pref)
    return out.reshape(xa.shape)


def heat_kernel_1d(double k, double t, x, y):
    xa, ya = np.broadcast_arrays(np.asarray(x, float), np.asarray(y, float))
    cdef cnp.ndarray[double, ndim=1] xf = np.ascontiguousarray(xa.ravel())
    cdef cnp.ndarray[double, ndim=1] yf = np.ascontiguousarray(ya.ravel())
    cdef Py_ssize_t i, n = xf.shape[0]
    cdef cnp.ndarray[double, ndim=1] out = np.empty(n)
    with nogil:
        for i in range(n):
            out[i] = heat_scalar(k, t, xf[i], yf[i])
    return out.reshape(xa.shape)


def heat_matrix(double k, double t, x, y):
    cdef cnp.ndarray[double, ndim=1] xv = np.ascontiguousarray(np.asarray(x, float).ravel())
    cdef cnp.ndarray[double, ndim=1] yv = np.ascontiguousarray(np.asarray(y, float).ravel())
    cdef Py_ssize_t i, j, nx = xv.shape[0], ny = yv.shape[0]
    cdef cnp.ndarray[double, ndim=2] out = np.empty((nx, ny))
    with nogil:
        for i in range(nx):
            for j in range(ny):
                out[i, j] = heat_scalar(k, t, xv[i], yv[j])
    return out


def dunkl_matrix(double k, x, y):
    cdef cnp.ndarray[double, ndim=1] xv = np.ascontiguousarray(np.asarray(x, float).ravel())
    cdef cnp.ndarray[double, ndim=1] yv = np.ascontiguousarray(np.asarray(y, float).ravel())
    cdef Py_ssize_t i, j, nx = xv.shape[0], ny = yv.shape[0]
    cdef cnp.ndarray[double, ndim=2] out = np.empty((nx, ny))
    cdef double pref = exp((k - 0.5) * log(2.0) + lgamma(k + 0.5))
    with nogil:
        for i in range(nx):
            for j in range(ny):
                out[i, j] = dunkl_scalar(k, xv[i], yv[j], pref)
    return out


def poisson_pairs(k, double t, X, Y, v, w):
    cdef cnp.ndarray[double, ndim=1] kv = np.ascontiguousarray(np.asarray(k, float).ravel())
    cdef cnp.ndarray[double, ndim=2] Xa = np.ascontiguousarray(np.atleast_2d(np.asarray(X, float)))
    cdef cnp.ndarray[double, ndim=2] Ya = np.ascontiguousarray(np.atleast_2d(np.asarray(Y, float)))
    cdef cnp.ndarray[double, ndim=1] vv = np.ascontiguousarray(np.asarray(v, float).ravel())
    cdef cnp.ndarray[double, ndim=1] wv = np.ascontiguousarray(np.asarray(w, float).ravel())
    cdef Py_ssize_t P = Xa.shape[0], n = kv.shape[0], nv = vv.shape[0]
    cdef Py_ssize_t p, i, j
    cdef double ksum = 0.0, N, delta2, sigma, acc, val, a, sg, vi, d
    cdef cnp.ndarray[double, ndim=1] out = np.empty(P)
    cdef cnp.ndarray[double, ndim=1] base = np.empty(nv)
    for j in range(n):
        ksum += kv[j]
    N = n + 2.0 * ksum
    with nogil:
        for i in range(nv):
            base[i] = exp(-vv[i] * vv[i]) * pow(vv[i], N) * wv[i]
        for p in range(P):
            delta2 = 0.0
            for j in range(n):
                d = fabs(Xa[p, j]) - fabs(Ya[p, j])
                delta2 += d * d
            sigma = 1.0 / sqrt(1.0 + delta2 / (t * t))
            acc = 0.0
            for i in range(nv):
                vi = vv[i]
                val = base[i]
                if val == 0.0:
                    continue
                for j in range(n):
                    a = fabs(Xa[p, j] * Ya[p, j])
                    sg = _sign(Xa[p, j] * Ya[p, j])
                    val *= bracket_scalar(kv[j], a * 2.0 * sigma * sigma * vi * vi / (t * t), sg)
                acc += val
            out[p] = (2.0 / sqrt(M_PI)) * sigma * pow(2.0, ksum - 0.5 * n) * pow(sigma / t, N) * acc
    return out
