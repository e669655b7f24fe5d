# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled twins of the kernels in ``_pykernels``.

Same signatures, same operation order; see that module for semantics.
"""
from cpython cimport array
import array as _array

from libc.math cimport exp, floor, pow, isfinite

from .errors import DomainError

cdef array.array _template = _array.array("d", [])

cdef enum:
    IDENTITY = 0
    RELU = 1
    SIGMOID = 2
    DIO_LINEAR = 3
    DIO_QUADRATIC = 4
    DIO_EXPONENTIAL = 5


cdef inline array.array _zeros(Py_ssize_t n):
    return array.clone(_template, n, True)


def matmul(const double[::1] a, const double[::1] b, Py_ssize_t m, Py_ssize_t k, Py_ssize_t n):
    cdef array.array out = _zeros(m * n)
    cdef double[::1] o = out
    cdef Py_ssize_t i, j, p
    cdef double s
    for i in range(m):
        for j in range(n):
            s = 0.0
            for p in range(k):
                s += a[i * k + p] * b[p * n + j]
            o[i * n + j] = s
    return out


def axpy(double alpha, const double[::1] x, const double[::1] y):
    cdef Py_ssize_t i, n = x.shape[0]
    cdef array.array out = _zeros(n)
    cdef double[::1] o = out
    for i in range(n):
        o[i] = alpha * x[i] + y[i]
    return out


def mul(const double[::1] x, const double[::1] y):
    cdef Py_ssize_t i, n = x.shape[0]
    cdef array.array out = _zeros(n)
    cdef double[::1] o = out
    for i in range(n):
        o[i] = x[i] * y[i]
    return out


def sumsq(const double[::1] x):
    cdef Py_ssize_t i
    cdef double s = 0.0
    for i in range(x.shape[0]):
        s += x[i] * x[i]
    return s


def all_finite(const double[::1] x):
    cdef Py_ssize_t i
    for i in range(x.shape[0]):
        if not isfinite(x[i]):
            return False
    return True


def round_ties_to_zero(const double[::1] x):
    cdef Py_ssize_t i, n = x.shape[0]
    cdef array.array out = _zeros(n)
    cdef double[::1] o = out
    cdef double v, a, f, r
    for i in range(n):
        v = x[i]
        a = -v if v < 0.0 else v
        f = floor(a)
        r = f + 1.0 if a - f > 0.5 else f
        o[i] = (-r if v < 0.0 else r) + 0.0
    return out


def dense_forward(const double[::1] w, const double[::1] bias, const double[::1] x,
                  Py_ssize_t n, Py_ssize_t fan_in, Py_ssize_t fan_out):
    cdef array.array out = _zeros(n * fan_out)
    cdef double[::1] z = out
    cdef Py_ssize_t r, o, p
    cdef double s
    for r in range(n):
        for o in range(fan_out):
            s = 0.0
            for p in range(fan_in):
                s += w[o * fan_in + p] * x[r * fan_in + p]
            z[r * fan_out + o] = s + bias[o]
    return out


def dense_backward(const double[::1] w, const double[::1] x, const double[::1] g,
                   Py_ssize_t n, Py_ssize_t fan_in, Py_ssize_t fan_out):
    cdef array.array dw_arr = _zeros(fan_out * fan_in)
    cdef array.array db_arr = _zeros(fan_out)
    cdef array.array dx_arr = _zeros(n * fan_in)
    cdef double[::1] dw = dw_arr
    cdef double[::1] db = db_arr
    cdef double[::1] dx = dx_arr
    cdef Py_ssize_t r, o, p
    cdef double s
    for o in range(fan_out):
        s = 0.0
        for r in range(n):
            s += g[r * fan_out + o]
        db[o] = s
        for p in range(fan_in):
            s = 0.0
            for r in range(n):
                s += g[r * fan_out + o] * x[r * fan_in + p]
            dw[o * fan_in + p] = s
    for r in range(n):
        for p in range(fan_in):
            s = 0.0
            for o in range(fan_out):
                s += g[r * fan_out + o] * w[o * fan_in + p]
            dx[r * fan_in + p] = s
    return dw_arr, db_arr, dx_arr


cdef inline double _sigmoid(double v) nogil:
    cdef double e
    if v >= 0.0:
        return 1.0 / (1.0 + exp(-v))
    e = exp(v)
    return e / (1.0 + e)


def act_forward(int code, const double[::1] params, const double[::1] z):
    cdef Py_ssize_t i, n = z.shape[0]
    cdef array.array out = _zeros(n)
    cdef double[::1] o = out
    cdef double v, a, b, c, zc, d, k, u, inv_b
    if code == IDENTITY:
        for i in range(n):
            o[i] = z[i]
    elif code == RELU:
        for i in range(n):
            v = z[i]
            o[i] = v if v > 0.0 else 0.0
    elif code == SIGMOID:
        for i in range(n):
            o[i] = _sigmoid(z[i])
    elif code == DIO_LINEAR:
        a = params[0]; b = params[1]; c = params[2]
        for i in range(n):
            o[i] = (c - a * z[i]) / b
    elif code == DIO_QUADRATIC:
        a = params[0]; b = params[1]; c = params[2]; zc = params[3]; d = params[4]
        for i in range(n):
            v = z[i]
            o[i] = (c - a * v * v + b * v - zc) / d
    elif code == DIO_EXPONENTIAL:
        a = params[0]; b = params[1]; k = params[2]
        inv_b = 1.0 / b
        for i in range(n):
            v = z[i]
            u = pow(v, a) - k
            if u < 0.0:
                raise DomainError(f"x^a - k < 0 at x={v!r}")
            o[i] = pow(u, inv_b)
    else:
        raise ValueError(f"unknown activation code {code}")
    return out


def act_deriv(int code, const double[::1] params, const double[::1] z):
    cdef Py_ssize_t i, n = z.shape[0]
    cdef array.array out = _zeros(n)
    cdef double[::1] o = out
    cdef double v, a, b, d, k, u, y, den, s, slope, inv_b
    if code == IDENTITY:
        for i in range(n):
            o[i] = 1.0
    elif code == RELU:
        for i in range(n):
            o[i] = 1.0 if z[i] > 0.0 else 0.0
    elif code == SIGMOID:
        for i in range(n):
            s = _sigmoid(z[i])
            o[i] = s * (1.0 - s)
    elif code == DIO_LINEAR:
        slope = -params[0] / params[1]
        for i in range(n):
            o[i] = slope
    elif code == DIO_QUADRATIC:
        a = params[0]; b = params[1]; d = params[4]
        for i in range(n):
            o[i] = (-2.0 * a * z[i] + b) / d
    elif code == DIO_EXPONENTIAL:
        a = params[0]; b = params[1]; k = params[2]
        inv_b = 1.0 / b
        for i in range(n):
            v = z[i]
            u = pow(v, a) - k
            if u < 0.0:
                raise DomainError(f"x^a - k < 0 at x={v!r}")
            y = pow(u, inv_b)
            den = b * pow(y, b - 1.0)
            if den == 0.0:
                raise DomainError(f"activation not differentiable at x={v!r}")
            o[i] = a * pow(v, a - 1.0) / den
    else:
        raise ValueError(f"unknown activation code {code}")
    return out
