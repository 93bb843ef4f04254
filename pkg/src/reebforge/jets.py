"""Truncated Taylor arithmetic for higher derivatives of closed-form expressions.

A series holds normalised coefficients ``c[n] = f^(n)(x0) / n!``.
"""
from __future__ import annotations

import math

import numpy as np

MAX_ORDER = 12


class Series:
    __slots__ = ("c",)

    def __init__(self, coeffs):
        self.c = np.asarray(coeffs, dtype=float)

    @property
    def order(self) -> int:
        return len(self.c) - 1

    @classmethod
    def constant(cls, value, order):
        c = np.zeros(order + 1)
        c[0] = value
        return cls(c)

    def __add__(self, other):
        if isinstance(other, Series):
            return Series(self.c + other.c)
        out = self.c.copy()
        out[0] += other
        return Series(out)

    __radd__ = __add__

    def __neg__(self):
        return Series(-self.c)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, Series):
            return Series(self.c * other)
        n = len(self.c)
        return Series(np.convolve(self.c, other.c)[:n])

    __rmul__ = __mul__

    def __truediv__(self, other):
        if not isinstance(other, Series):
            return Series(self.c / other)
        p, d = self.c, other.c
        q = np.zeros_like(p)
        for n in range(len(p)):
            q[n] = (p[n] - np.dot(d[1:n + 1], q[n - 1::-1][:n])) / d[0]
        return Series(q)

    def __rtruediv__(self, other):
        return Series.constant(other, self.order) / self

    def exp(self):
        a = self.c
        e = np.zeros_like(a)
        e[0] = math.exp(a[0]) if a[0] < 709 else math.inf
        for n in range(1, len(a)):
            k = np.arange(1, n + 1)
            e[n] = np.dot(k * a[1:n + 1], e[n - 1::-1][:n]) / n
        return Series(e)

    def derivatives(self):
        """Coefficients scaled back to plain derivatives f, f', f'', ..."""
        fact = np.array([math.factorial(n) for n in range(len(self.c))], dtype=float)
        return self.c * fact


def smooth_step_series(x0: float, order: int) -> Series:
    """Series of ``exp(-1/x) / (exp(-1/x) + exp(-1/(1-x)))`` at an interior point."""
    n = np.arange(order + 1)
    # g = 1/x - 1/(1-x); the step equals 1 / (1 + exp(g))
    g = Series((-1.0) ** n / x0 ** (n + 1) - 1.0 / (1.0 - x0) ** (n + 1))
    if g.c[0] > 0:
        e = (-g).exp()
        return e / (e + 1.0)
    e = g.exp()
    return 1.0 / (e + 1.0)
