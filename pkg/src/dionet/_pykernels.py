"""Pure-Python reference kernels.

Every function here has a twin of the same name and signature in
``_kernels.pyx``. Both perform the same floating-point operations in the
same order, so the two backends agree bit for bit. Buffers are flat
``array('d')`` objects in row-major order.
"""
from array import array
import math

from .errors import DomainError

# activation codes, shared with _kernels.pyx
IDENTITY = 0
RELU = 1
SIGMOID = 2
DIO_LINEAR = 3
DIO_QUADRATIC = 4
DIO_EXPONENTIAL = 5


def _zeros(n):
    return array("d", bytes(8 * n))


def matmul(a, b, m, k, n):
    out = _zeros(m * n)
    for i in range(m):
        row = i * k
        for j in range(n):
            s = 0.0
            for p in range(k):
                s += a[row + p] * b[p * n + j]
            out[i * n + j] = s
    return out


def axpy(alpha, x, y):
    return array("d", [alpha * xi + yi for xi, yi in zip(x, y)])


def mul(x, y):
    return array("d", [xi * yi for xi, yi in zip(x, y)])


def sumsq(x):
    s = 0.0
    for v in x:
        s += v * v
    return s


def all_finite(x):
    isfinite = math.isfinite
    for v in x:
        if not isfinite(v):
            return False
    return True


def round_ties_to_zero(x):
    out = _zeros(len(x))
    floor = math.floor
    for i, v in enumerate(x):
        a = -v if v < 0.0 else v
        f = floor(a)
        r = f + 1.0 if a - f > 0.5 else f
        # + 0.0 turns -0.0 into 0.0
        out[i] = (-r if v < 0.0 else r) + 0.0
    return out


def dense_forward(w, bias, x, n, fan_in, fan_out):
    """Z = X W^T + b for a batch X of shape (n, fan_in)."""
    out = _zeros(n * fan_out)
    for r in range(n):
        xr = r * fan_in
        for o in range(fan_out):
            wo = o * fan_in
            s = 0.0
            for p in range(fan_in):
                s += w[wo + p] * x[xr + p]
            out[r * fan_out + o] = s + bias[o]
    return out


def dense_backward(w, x, g, n, fan_in, fan_out):
    """Return (dW, db, dX) for upstream gradient G of shape (n, fan_out)."""
    dw = _zeros(fan_out * fan_in)
    db = _zeros(fan_out)
    dx = _zeros(n * fan_in)
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
    return dw, db, dx


def _sigmoid(v):
    if v >= 0.0:
        return 1.0 / (1.0 + math.exp(-v))
    e = math.exp(v)
    return e / (1.0 + e)


def act_forward(code, params, z):
    out = _zeros(len(z))
    if code == IDENTITY:
        for i, v in enumerate(z):
            out[i] = v
    elif code == RELU:
        for i, v in enumerate(z):
            out[i] = v if v > 0.0 else 0.0
    elif code == SIGMOID:
        for i, v in enumerate(z):
            out[i] = _sigmoid(v)
    elif code == DIO_LINEAR:
        a, b, c = params[0], params[1], params[2]
        for i, v in enumerate(z):
            out[i] = (c - a * v) / b
    elif code == DIO_QUADRATIC:
        a, b, c, zc, d = params[0], params[1], params[2], params[3], params[4]
        for i, v in enumerate(z):
            out[i] = (c - a * v * v + b * v - zc) / d
    elif code == DIO_EXPONENTIAL:
        a, b, k = params[0], params[1], params[2]
        inv_b = 1.0 / b
        for i, v in enumerate(z):
            u = math.pow(v, a) - k
            if u < 0.0:
                raise DomainError(f"x^a - k < 0 at x={v!r}")
            out[i] = math.pow(u, inv_b)
    else:
        raise ValueError(f"unknown activation code {code}")
    return out


def act_deriv(code, params, z):
    out = _zeros(len(z))
    if code == IDENTITY:
        for i in range(len(z)):
            out[i] = 1.0
    elif code == RELU:
        for i, v in enumerate(z):
            out[i] = 1.0 if v > 0.0 else 0.0
    elif code == SIGMOID:
        for i, v in enumerate(z):
            s = _sigmoid(v)
            out[i] = s * (1.0 - s)
    elif code == DIO_LINEAR:
        slope = -params[0] / params[1]
        for i in range(len(z)):
            out[i] = slope
    elif code == DIO_QUADRATIC:
        a, b, d = params[0], params[1], params[4]
        for i, v in enumerate(z):
            out[i] = (-2.0 * a * v + b) / d
    elif code == DIO_EXPONENTIAL:
        a, b, k = params[0], params[1], params[2]
        inv_b = 1.0 / b
        for i, v in enumerate(z):
            u = math.pow(v, a) - k
            if u < 0.0:
                raise DomainError(f"x^a - k < 0 at x={v!r}")
            y = math.pow(u, inv_b)
            den = b * math.pow(y, b - 1.0)
            if den == 0.0:
                raise DomainError(f"activation not differentiable at x={v!r}")
            out[i] = a * math.pow(v, a - 1.0) / den
    else:
        raise ValueError(f"unknown activation code {code}")
    return out
