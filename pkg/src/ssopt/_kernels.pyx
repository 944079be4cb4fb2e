# cython: language_level=3
# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled evaluation kernels.

Function-for-function twin of ``ssopt._kernels_np``. The polynomial kernels
and the tridiagonal matvec follow the NumPy fallback's operation order
exactly (and the extension is compiled with -ffp-contract=off), so those
results agree bit for bit across backends; the transcendental kernels agree
to a few ulp.
"""
from libc.math cimport exp, expm1, sin, cos


def grad_expm1(const double[::1] x, double[::1] out):
    cdef Py_ssize_t i, n = x.shape[0]
    for i in range(n):
        out[i] = expm1(x[i])


def obj_exp_linear(const double[::1] x):
    cdef Py_ssize_t i, n = x.shape[0]
    cdef double s = 0.0
    for i in range(n):
        s += exp(x[i]) - x[i]
    return s


def grad_weighted_expm1(const double[::1] x, double[::1] out):
    cdef Py_ssize_t i, n = x.shape[0]
    for i in range(n):
        out[i] = expm1(x[i]) * ((i + 1) / 10.0)


def obj_weighted_exp_linear(const double[::1] x):
    cdef Py_ssize_t i, n = x.shape[0]
    cdef double s = 0.0
    for i in range(n):
        s += ((i + 1) / 10.0) * (exp(x[i]) - x[i])
    return s


def grad_banded_cubic(const double[::1] x, double[::1] out, double[::1] work):
    cdef Py_ssize_t i, n = x.shape[0]
    cdef double xi, acc
    for i in range(n):
        xi = x[i]
        work[i] = (5.0 - 3.0 * xi - xi * xi) * xi + 1.0
    for i in range(1, n):
        work[i] -= x[i - 1]
    for i in range(n - 1):
        work[i] -= 3.0 * x[i + 1]
    for i in range(n):
        xi = x[i]
        acc = 2.0 * work[i] * (5.0 - 6.0 * xi - 3.0 * xi * xi)
        if i >= 1:
            acc -= 6.0 * work[i - 1]
        if i <= n - 2:
            acc -= 2.0 * work[i + 1]
        out[i] = acc


def obj_banded_cubic(const double[::1] x):
    cdef Py_ssize_t i, n = x.shape[0]
    cdef double xi, r, s = 0.0
    for i in range(n):
        xi = x[i]
        r = (5.0 - 3.0 * xi - xi * xi) * xi + 1.0
        if i >= 1:
            r -= x[i - 1]
        if i <= n - 2:
            r -= 3.0 * x[i + 1]
        s += r * r
    return s


def grad_chained_rosenbrock(const double[::1] x, double[::1] out):
    cdef Py_ssize_t i, n = x.shape[0]
    cdef double t, acc
    for i in range(n):
        acc = 0.0
        if i <= n - 2:
            t = x[i + 1] - x[i] * x[i]
            acc = (-4.0 * x[i]) * t - 2.0 * (1.0 - x[i])
        if i >= 1:
            acc += 2.0 * (x[i] - x[i - 1] * x[i - 1])
        out[i] = acc


def obj_chained_rosenbrock(const double[::1] x):
    cdef Py_ssize_t i, n = x.shape[0]
    cdef double t, d, s = 0.0
    for i in range(n - 1):
        t = x[i + 1] - x[i] * x[i]
        d = 1.0 - x[i]
        s += t * t + d * d
    return s


def grad_cubic_rosenbrock(const double[::1] x, double[::1] out):
    cdef Py_ssize_t i, n = x.shape[0]
    cdef double t, acc
    for i in range(n):
        acc = 0.0
        if i <= n - 2:
            t = x[i + 1] - x[i] * x[i] * x[i]
            acc = (-6.0 * (x[i] * x[i])) * t - 2.0 * (1.0 - x[i])
        if i >= 1:
            acc += 2.0 * (x[i] - x[i - 1] * x[i - 1] * x[i - 1])
        out[i] = acc


def obj_cubic_rosenbrock(const double[::1] x):
    cdef Py_ssize_t i, n = x.shape[0]
    cdef double t, d, s = 0.0
    for i in range(n - 1):
        t = x[i + 1] - x[i] * x[i] * x[i]
        d = 1.0 - x[i]
        s += t * t + d * d
    return s


def grad_pair_trig(const double[::1] x, double[::1] out):
    cdef Py_ssize_t i, n = x.shape[0]
    cdef double u, v, q
    for i in range(0, n - 1, 2):
        u = x[i]
        v = x[i + 1]
        q = u * u + v * v + u * v
        out[i] = 2.0 * q * (2.0 * u + v) + sin(2.0 * u)
        out[i + 1] = 2.0 * q * (2.0 * v + u) - sin(2.0 * v)


def obj_pair_trig(const double[::1] x):
    cdef Py_ssize_t i, n = x.shape[0]
    cdef double u, v, q, su, cv, s = 0.0
    for i in range(0, n - 1, 2):
        u = x[i]
        v = x[i + 1]
        q = u * u + v * v + u * v
        su = sin(u)
        cv = cos(v)
        s += q * q + su * su + cv * cv
    return s


def tridiag_matvec(const double[::1] sub, const double[::1] diag,
                   const double[::1] sup, const double[::1] x,
                   double[::1] out):
    cdef Py_ssize_t i, n = x.shape[0]
    cdef double acc
    for i in range(n):
        acc = diag[i] * x[i]
        if i >= 1:
            acc += sub[i - 1] * x[i - 1]
        if i <= n - 2:
            acc += sup[i] * x[i + 1]
        out[i] = acc
