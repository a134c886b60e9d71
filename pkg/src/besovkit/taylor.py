"""Truncated Taylor arithmetic used for exact jet evaluation.

A :class:`Taylor` holds the coefficients ``c[0..K]`` of a local expansion
``f(w0 + h) = sum_k c[k] h**k + O(h**(K+1))``.  Every coefficient slot is a
numpy array, so one object carries the expansions at many base points at
once.  Derivatives are recovered as ``k! * c[k]``; nothing here uses finite
differences.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import BranchError, PoleError


class Taylor:
    __slots__ = ("c",)

    def __init__(self, c):
        self.c = np.asarray(c, dtype=complex)

    @classmethod
    def variable(cls, w0, order: int) -> "Taylor":
        w0 = np.asarray(w0, dtype=complex)
        c = np.zeros((order + 1,) + w0.shape, dtype=complex)
        c[0] = w0
        if order >= 1:
            c[1] = 1.0
        return cls(c)

    @classmethod
    def constant(cls, value, order: int, shape=()) -> "Taylor":
        c = np.zeros((order + 1,) + tuple(shape), dtype=complex)
        c[0] = value
        return cls(c)

    @property
    def order(self) -> int:
        return self.c.shape[0] - 1

    @property
    def shape(self):
        return self.c.shape[1:]

    def derivatives(self) -> np.ndarray:
        """Return ``f, f', f'', ...`` stacked along axis 0."""
        fact = np.array([math.factorial(k) for k in range(self.order + 1)], dtype=float)
        return self.c * fact.reshape((-1,) + (1,) * (self.c.ndim - 1))

    def _lift(self, other) -> "Taylor":
        if isinstance(other, Taylor):
            return other
        return Taylor.constant(other, self.order, self.shape)

    def __add__(self, other):
        other = self._lift(other)
        return Taylor(self.c + other.c)

    __radd__ = __add__

    def __neg__(self):
        return Taylor(-self.c)

    def __sub__(self, other):
        other = self._lift(other)
        return Taylor(self.c - other.c)

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        if not isinstance(other, Taylor):
            return Taylor(self.c * other)
        a, b = self.c, other.c
        K = self.order
        out = np.zeros(np.broadcast_shapes(a.shape, b.shape), dtype=complex)
        for k in range(K + 1):
            acc = a[0] * b[k]
            for j in range(1, k + 1):
                acc = acc + a[j] * b[k - j]
            out[k] = acc
        return Taylor(out)

    __rmul__ = __mul__

    def recip(self) -> "Taylor":
        a = self.c
        if np.any(a[0] == 0):
            raise PoleError("reciprocal of a series with vanishing constant term")
        K = self.order
        b = np.zeros_like(a)
        inv = 1.0 / a[0]
        b[0] = inv
        for k in range(1, K + 1):
            acc = a[1] * b[k - 1]
            for j in range(2, k + 1):
                acc = acc + a[j] * b[k - j]
            b[k] = -inv * acc
        return Taylor(b)

    def __truediv__(self, other):
        if not isinstance(other, Taylor):
            return Taylor(self.c / other)
        return self * other.recip()

    def __rtruediv__(self, other):
        return self._lift(other) * self.recip()

    def log(self, check_branch: bool = True) -> "Taylor":
        """Principal logarithm; the cut is the closed negative real axis."""
        a = self.c
        a0 = a[0]
        if np.any(a0 == 0):
            raise BranchError("logarithm of zero")
        if check_branch and np.any((a0.imag == 0) & (a0.real < 0)):
            raise BranchError("logarithm evaluated on its branch cut (-inf, 0]")
        K = self.order
        g = np.zeros_like(a)
        g[0] = np.log(a0)
        inv = 1.0 / a0
        for k in range(1, K + 1):
            acc = a[k] * k
            for j in range(1, k):
                acc = acc - j * g[j] * a[k - j]
            g[k] = acc * inv / k
        return Taylor(g)

    def powi(self, n: int) -> "Taylor":
        if n < 0:
            return self.recip().powi(-n)
        result = Taylor.constant(1.0, self.order, self.shape)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def deriv(self) -> "Taylor":
        """Expansion of the derivative, one order shorter."""
        K = self.order
        k = np.arange(1, K + 1, dtype=float).reshape((-1,) + (1,) * (self.c.ndim - 1))
        return Taylor(self.c[1:] * k)

    def truncate(self, order: int) -> "Taylor":
        return Taylor(self.c[: order + 1])

    def compose_into(self, h: "Taylor") -> "Taylor":
        """Evaluate the series ``sum c[k] h**k`` where ``h`` has zero constant term."""
        K = h.order
        c = self.c
        r = Taylor.constant(0.0, K, np.broadcast_shapes(c.shape[1:], h.shape))
        r.c[0] = c[K] if c.shape[0] > K else 0.0
        for m in range(K - 1, -1, -1):
            r = r * h
            r.c[0] = r.c[0] + c[m]
        return r
