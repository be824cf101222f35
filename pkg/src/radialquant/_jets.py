"""Truncated Taylor series ("jets") in one real variable.

A jet of order N around t0 stores f(t0), f'(t0), f''(t0)/2!, ... f^(N)(t0)/N!.
Arithmetic truncates to the smaller order of the operands.
"""
from __future__ import annotations

import math

import numpy as np


class Jet:
    __slots__ = ("c",)

    def __init__(self, coeffs):
        self.c = np.asarray(coeffs, dtype=float)

    @classmethod
    def from_derivatives(cls, derivs):
        return cls([d / math.factorial(k) for k, d in enumerate(derivs)])

    @classmethod
    def variable(cls, t0, order):
        c = np.zeros(order + 1)
        c[0] = t0
        if order >= 1:
            c[1] = 1.0
        return cls(c)

    @property
    def order(self):
        return len(self.c) - 1

    def derivative_values(self):
        return [ck * math.factorial(k) for k, ck in enumerate(self.c)]

    def _coerce(self, other):
        if isinstance(other, Jet):
            n = min(len(self.c), len(other.c))
            return self.c[:n], other.c[:n]
        o = np.zeros_like(self.c)
        o[0] = other
        return self.c, o

    def __add__(self, other):
        a, b = self._coerce(other)
        return Jet(a + b)

    __radd__ = __add__

    def __neg__(self):
        return Jet(-self.c)

    def __sub__(self, other):
        a, b = self._coerce(other)
        return Jet(a - b)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, Jet):
            return Jet(self.c * other)
        a, b = self._coerce(other)
        return Jet(np.convolve(a, b)[: len(a)])

    __rmul__ = __mul__

    def reciprocal(self):
        a = self.c
        b = np.zeros_like(a)
        b[0] = 1.0 / a[0]
        for k in range(1, len(a)):
            b[k] = -b[0] * np.dot(a[1 : k + 1], b[k - 1 :: -1][:k])
        return Jet(b)

    def __truediv__(self, other):
        if not isinstance(other, Jet):
            return Jet(self.c / other)
        return self * other.reciprocal()

    def __rtruediv__(self, other):
        return self.reciprocal() * other

    def d(self):
        """Derivative; the order drops by one."""
        k = np.arange(1, len(self.c))
        return Jet(self.c[1:] * k)

    def log(self):
        dlog = self.d() / Jet(self.c[:-1])
        c = np.empty_like(self.c)
        c[0] = math.log(self.c[0])
        c[1:] = dlog.c / np.arange(1, len(self.c))
        return Jet(c)
