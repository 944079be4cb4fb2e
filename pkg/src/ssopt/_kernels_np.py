"""NumPy implementations of the evaluation kernels.

This module mirrors the compiled extension ``ssopt._kernels`` function for
function; ``ssopt._backend`` picks whichever is available. Gradient kernels
fill a caller-provided output array so both backends share one calling
convention. The polynomial kernels and the tridiagonal matvec perform the
same floating-point operations in the same order as the compiled versions,
so those results agree bit for bit across backends.
"""
import numpy as np


# -- separable exponential family ------------------------------------------

def grad_expm1(x, out):
    """out_i = e^{x_i} - 1, computed without cancellation near 0."""
    np.expm1(x, out=out)


def obj_exp_linear(x):
    return float(np.sum(np.exp(x) - x))


def grad_weighted_expm1(x, out):
    """out_i = (i/10) (e^{x_i} - 1) with 1-based i."""
    np.expm1(x, out=out)
    out *= np.arange(1, x.shape[0] + 1) / 10.0


def obj_weighted_exp_linear(x):
    w = np.arange(1, x.shape[0] + 1) / 10.0
    return float(np.sum(w * (np.exp(x) - x)))


# -- banded cubic system ----------------------------------------------------
# residuals r_i = (5 - 3 x_i - x_i^2) x_i - x_{i-1} - 3 x_{i+1} + 1 with the
# boundary terms dropped; objective sum r_i^2.

def grad_banded_cubic(x, out, work):
    np.multiply((5.0 - 3.0 * x - x * x), x, out=work)
    work += 1.0
    work[1:] -= x[:-1]
    work[:-1] -= 3.0 * x[1:]
    np.multiply(2.0 * work, (5.0 - 6.0 * x - 3.0 * x * x), out=out)
    out[1:] -= 6.0 * work[:-1]
    out[:-1] -= 2.0 * work[1:]


def obj_banded_cubic(x):
    r = (5.0 - 3.0 * x - x * x) * x + 1.0
    r[1:] -= x[:-1]
    r[:-1] -= 3.0 * x[1:]
    return float(np.sum(r * r))


# -- chained Rosenbrock (unit coefficients) ---------------------------------
# objective sum_{i<n} (x_{i+1} - x_i^2)^2 + (1 - x_i)^2

def grad_chained_rosenbrock(x, out):
    t = x[1:] - x[:-1] * x[:-1]
    out[-1] = 0.0
    np.multiply(-4.0 * x[:-1], t, out=out[:-1])
    out[:-1] -= 2.0 * (1.0 - x[:-1])
    out[1:] += 2.0 * t


def obj_chained_rosenbrock(x):
    t = x[1:] - x[:-1] * x[:-1]
    d = 1.0 - x[:-1]
    return float(np.sum(t * t + d * d))


# -- cubic variant of the chain ---------------------------------------------
# objective sum_{i<n} (x_{i+1} - x_i^3)^2 + (1 - x_i)^2

def grad_cubic_rosenbrock(x, out):
    t = x[1:] - x[:-1] * x[:-1] * x[:-1]
    out[-1] = 0.0
    np.multiply(-6.0 * (x[:-1] * x[:-1]), t, out=out[:-1])
    out[:-1] -= 2.0 * (1.0 - x[:-1])
    out[1:] += 2.0 * t


def obj_cubic_rosenbrock(x):
    t = x[1:] - x[:-1] * x[:-1] * x[:-1]
    d = 1.0 - x[:-1]
    return float(np.sum(t * t + d * d))


# -- pairwise quartic with trigonometric terms ------------------------------
# objective sum over pairs (u, v) of (u^2 + v^2 + uv)^2 + sin^2 u + cos^2 v

def grad_pair_trig(x, out):
    u = x[0::2]
    v = x[1::2]
    q = u * u + v * v + u * v
    out[0::2] = 2.0 * q * (2.0 * u + v) + np.sin(2.0 * u)
    out[1::2] = 2.0 * q * (2.0 * v + u) - np.sin(2.0 * v)


def obj_pair_trig(x):
    u = x[0::2]
    v = x[1::2]
    q = u * u + v * v + u * v
    su = np.sin(u)
    cv = np.cos(v)
    return float(np.sum(q * q + su * su + cv * cv))


# -- tridiagonal matvec -------------------------------------------------------

def tridiag_matvec(sub, diag, sup, x, out):
    """out = T x for T with diagonals (sub, diag, sup)."""
    np.multiply(diag, x, out=out)
    out[1:] += sub * x[:-1]
    out[:-1] += sup * x[1:]
