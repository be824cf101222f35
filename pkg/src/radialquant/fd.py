"""High-precision finite differences in complex coordinates.

Functions here take points of C^n as lists of ``mpmath.mpc`` and callables that
return numpy object arrays of mpmath numbers (scalars are 0-d arrays).  Work
happens at :data:`DPS` decimal digits so that differences can be nested three
deep (metric, Ricci form, Laplacian of the scalar curvature) without the
roundoff of one level swamping the next.
"""
from __future__ import annotations

import contextlib

import mpmath
import numpy as np

from .errors import OracleFailure

DPS = 70
# relative step; nested three deep: truncation ~1e-16, roundoff ~1e-70 / STEP**6
STEP = 1e-8

_re = np.frompyfunc(mpmath.re, 1, 1)
_im = np.frompyfunc(mpmath.im, 1, 1)
_conj = np.frompyfunc(mpmath.conj, 1, 1)


@contextlib.contextmanager
def precision():
    with mpmath.workdps(DPS):
        yield


def norm_sq(z):
    return mpmath.fsum(v.real ** 2 + v.imag ** 2 for v in z)


def as_point(z):
    return [mpmath.mpc(complex(v)) if not isinstance(v, mpmath.mpc) else v for v in z]


def step_for(scale):
    h = mpmath.mpf(STEP) * mpmath.mpf(scale)
    if h < mpmath.mpf(10) ** (-(DPS // 4)):
        raise OracleFailure(f"finite-difference step {mpmath.nstr(h, 3)} underflows "
                            f"the working precision")
    return h


def _shift(z, u, s):
    return [zi + s * ui for zi, ui in zip(z, u)]


def _unit(n, i, c=1):
    u = [mpmath.mpc(0)] * n
    u[i] = mpmath.mpc(c)
    return u


def _add(u, v):
    return [a + b for a, b in zip(u, v)]


def _value(f, z):
    v = f(z)
    return np.asarray(v, dtype=object) if isinstance(v, (list, tuple)) else v


def _levi_quadratic(f, z, u, h, f0):
    # sum_ij u_i conj(u_j) d_i dbar_j f, from second differences along u and i*u
    iu = [1j * ui for ui in u]
    acc = (_value(f, _shift(z, u, h)) + _value(f, _shift(z, u, -h))
           + _value(f, _shift(z, iu, h)) + _value(f, _shift(z, iu, -h)) - 4 * f0)
    return acc / (4 * h * h)


def complex_hessian(f, z, h):
    """``H[i, j, ...] = d_i dbar_j f(z)`` by polarized central differences.

    ``f`` may be complex and array valued; its real and imaginary parts are
    polarized separately, each giving a Hermitian matrix.
    """
    n = len(z)
    f0 = _value(f, z)
    shape = (n, n) + np.shape(f0)
    out = np.empty(shape, dtype=object)
    diag = [_levi_quadratic(f, z, _unit(n, i), h, f0) for i in range(n)]
    for i in range(n):
        out[i, i] = diag[i]
    for i in range(n):
        for j in range(i + 1, n):
            base = diag[i] + diag[j]
            q_real = _levi_quadratic(f, z, _add(_unit(n, i), _unit(n, j)), h, f0) - base
            q_imag = _levi_quadratic(f, z, _add(_unit(n, i), _unit(n, j, 1j)), h, f0) - base
            # Hermitian parts of Re f and Im f
            hr = (_re(q_real) + 1j * _re(q_imag)) / 2
            hi = (_im(q_real) + 1j * _im(q_imag)) / 2
            out[i, j] = hr + 1j * hi
            out[j, i] = _conj(hr) + 1j * _conj(hi)
    return out


def holomorphic_gradient(f, z, h):
    """``D[k, ...] = d_k f(z)`` by central differences along x_k and y_k."""
    n = len(z)
    rows = []
    for k in range(n):
        e = _unit(n, k)
        ie = _unit(n, k, 1j)
        dx = (_value(f, _shift(z, e, h)) - _value(f, _shift(z, e, -h))) / (2 * h)
        dy = (_value(f, _shift(z, ie, h)) - _value(f, _shift(z, ie, -h))) / (2 * h)
        rows.append((dx - 1j * dy) / 2)
    return np.array(rows, dtype=object)


def to_complex(a):
    return np.asarray(np.frompyfunc(complex, 1, 1)(a), dtype=complex)


def mp_matrix(a):
    a = np.asarray(a, dtype=object)
    return mpmath.matrix([[a[i, j] for j in range(a.shape[1])] for i in range(a.shape[0])])


def mp_inverse(a):
    inv = mp_matrix(a) ** -1
    n = inv.rows
    return np.array([[inv[i, j] for j in range(n)] for i in range(n)], dtype=object)


def mp_logdet(a):
    return mpmath.log(mpmath.re(mpmath.det(mp_matrix(a))))
