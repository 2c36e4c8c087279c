"""Truncated power-series arithmetic.

Two small tools live here:

* :class:`Jet` -- forward-mode Taylor arithmetic.  A jet of order ``K`` at a
  base point ``x0`` carries the normalized Taylor coefficients
  ``c[k] = f^{(k)}(x0) / k!`` for ``k = 0..K``.  Base points may be arrays, in
  which case every coefficient is an array of the same shape.  Evaluating a
  potential on ``Jet.variable(x0, K)`` yields all derivatives up to order ``K``
  exactly (up to round-off), which is how custom potentials get their
  derivative tower.

* :class:`Laurent` -- a single truncated Laurent series in ``y = x - x0`` used
  by the WKB recursion near the well bottom, where quotients like
  ``(phi'' - phi''(x0)) / phi'`` have removable singularities or poles.
"""
from __future__ import annotations

import math

import numpy as np


def _coerce(other, like):
    """Turn a scalar/array into coefficient form compatible with ``like``."""
    if isinstance(other, Jet):
        return other.c
    arr = np.asarray(other)
    out = np.zeros_like(like, dtype=np.result_type(like, arr))
    out[0] = arr
    return out


class Jet:
    """Truncated Taylor series ``sum_k c[k] t**k`` about a (possibly array) point."""

    __array_priority__ = 1000  # make ndarray <op> Jet defer to Jet

    def __init__(self, coeffs):
        self.c = np.asarray(coeffs)
        if self.c.ndim == 0:
            raise ValueError("Jet needs at least one coefficient")

    @classmethod
    def variable(cls, x0, order: int) -> "Jet":
        """The identity function ``x`` expanded about ``x0``."""
        x0 = np.asarray(x0, dtype=float)
        c = np.zeros((order + 1,) + x0.shape)
        c[0] = x0
        if order >= 1:
            c[1] = 1.0
        return cls(c)

    @classmethod
    def constant(cls, value, order: int) -> "Jet":
        value = np.asarray(value)
        c = np.zeros((order + 1,) + value.shape, dtype=value.dtype if value.dtype.kind == "c" else float)
        c[0] = value
        return cls(c)

    @property
    def order(self) -> int:
        return self.c.shape[0] - 1

    @property
    def value(self):
        return self.c[0]

    def derivative(self, k: int = 1):
        """Value of the ``k``-th derivative at the base point."""
        if k > self.order:
            raise ValueError(f"jet of order {self.order} has no derivative of order {k}")
        return self.c[k] * math.factorial(k)

    def diff(self) -> "Jet":
        """Jet of the derivative, one order lower."""
        if self.order == 0:
            raise ValueError("cannot differentiate an order-0 jet")
        k = np.arange(1, self.order + 1).reshape((-1,) + (1,) * (self.c.ndim - 1))
        return Jet(self.c[1:] * k)

    def truncate(self, order: int) -> "Jet":
        return Jet(self.c[: order + 1])

    # -- arithmetic -------------------------------------------------------
    def __neg__(self):
        return Jet(-self.c)

    def __pos__(self):
        return self

    def __add__(self, other):
        o = _coerce(other, self.c)
        return Jet(self.c + o)

    __radd__ = __add__

    def __sub__(self, other):
        o = _coerce(other, self.c)
        return Jet(self.c - o)

    def __rsub__(self, other):
        o = _coerce(other, self.c)
        return Jet(o - self.c)

    def __mul__(self, other):
        if not isinstance(other, Jet):
            return Jet(self.c * np.asarray(other))
        K = min(self.order, other.order)
        a, b = self.c, other.c
        out = np.zeros((K + 1,) + np.broadcast_shapes(a.shape[1:], b.shape[1:]),
                       dtype=np.result_type(a, b))
        for k in range(K + 1):
            acc = a[0] * b[k]
            for j in range(1, k + 1):
                acc = acc + a[j] * b[k - j]
            out[k] = acc
        return Jet(out)

    __rmul__ = __mul__

    def reciprocal(self) -> "Jet":
        a = self.c
        out = np.zeros_like(a, dtype=np.result_type(a, float))
        out[0] = 1.0 / a[0]
        for k in range(1, self.order + 1):
            acc = a[1] * out[k - 1]
            for j in range(2, k + 1):
                acc = acc + a[j] * out[k - j]
            out[k] = -acc / a[0]
        return Jet(out)

    def __truediv__(self, other):
        if not isinstance(other, Jet):
            return Jet(self.c / np.asarray(other))
        return self * other.reciprocal()

    def __rtruediv__(self, other):
        return self.reciprocal() * np.asarray(other)

    def __pow__(self, p):
        if isinstance(p, Jet):
            return exp(log(self) * p)
        if float(p).is_integer():
            n = int(p)
            if n == 0:
                return Jet.constant(np.ones_like(self.c[0]), self.order)
            base = self if n > 0 else self.reciprocal()
            n = abs(n)
            result = None
            while n:
                if n & 1:
                    result = base if result is None else result * base
                n >>= 1
                if n:
                    base = base * base
            return result
        if float(p) == 0.5:
            return sqrt(self)
        return exp(log(self) * float(p))

    def __rpow__(self, base):
        return exp(self * np.log(base))

    def __repr__(self):
        return f"Jet(order={self.order}, value={self.c[0]!r})"


def exp(x):
    """exp for floats, arrays and jets."""
    if not isinstance(x, Jet):
        return np.exp(x)
    a = x.c
    out = np.zeros_like(a, dtype=np.result_type(a, float))
    out[0] = np.exp(a[0])
    for k in range(1, x.order + 1):
        acc = a[1] * out[k - 1]
        for j in range(2, k + 1):
            acc = acc + j * a[j] * out[k - j]
        out[k] = acc / k
    return Jet(out)


def log(x):
    if not isinstance(x, Jet):
        return np.log(x)
    a = x.c
    out = np.zeros_like(a, dtype=np.result_type(a, float))
    out[0] = np.log(a[0])
    for k in range(1, x.order + 1):
        acc = a[k] * k
        for j in range(1, k):
            acc = acc - j * out[j] * a[k - j]
        out[k] = acc / (k * a[0])
    return Jet(out)


def sqrt(x):
    if not isinstance(x, Jet):
        return np.sqrt(x)
    a = x.c
    out = np.zeros_like(a, dtype=np.result_type(a, float))
    out[0] = np.sqrt(a[0])
    for k in range(1, x.order + 1):
        acc = a[k]
        for j in range(1, k):
            acc = acc - out[j] * out[k - j]
        out[k] = acc / (2.0 * out[0])
    return Jet(out)


def value_of(x):
    """Plain value of a jet, or the argument itself."""
    return x.c[0] if isinstance(x, Jet) else x


# ---------------------------------------------------------------------------
# Laurent series
# ---------------------------------------------------------------------------

class Laurent:
    """Truncated Laurent series ``sum_k c[k] y**(val + k)``.

    The series is known up to and including the power ``val + len(c) - 1``;
    all operations propagate that precision.
    """

    def __init__(self, coeffs, val: int = 0):
        self.c = np.asarray(coeffs, dtype=complex)
        self.val = int(val)

    @classmethod
    def from_jet(cls, jet: Jet) -> "Laurent":
        return cls(np.asarray(jet.c, dtype=complex), 0)

    @property
    def top(self) -> int:
        """Highest known power."""
        return self.val + len(self.c) - 1

    def coeff(self, power: int) -> complex:
        k = power - self.val
        if k < 0:
            return 0j
        if k >= len(self.c):
            raise IndexError(f"power {power} beyond truncation order {self.top}")
        return complex(self.c[k])

    def _aligned(self, other: "Laurent"):
        lo = min(self.val, other.val)
        hi = min(self.top, other.top)
        a = np.zeros(hi - lo + 1, dtype=complex)
        b = np.zeros(hi - lo + 1, dtype=complex)
        na = max(0, min(len(self.c), hi - self.val + 1))
        nb = max(0, min(len(other.c), hi - other.val + 1))
        a[self.val - lo: self.val - lo + na] = self.c[:na]
        b[other.val - lo: other.val - lo + nb] = other.c[:nb]
        return a, b, lo

    def __add__(self, other):
        if not isinstance(other, Laurent):
            raise TypeError("add scalars with add_constant()")
        a, b, lo = self._aligned(other)
        return Laurent(a + b, lo)

    def __sub__(self, other):
        return self + (-other)

    def __neg__(self):
        return Laurent(-self.c, self.val)

    def scale(self, s) -> "Laurent":
        return Laurent(self.c * s, self.val)

    def add_constant(self, s) -> "Laurent":
        """Add ``s * y**0``."""
        if self.top < 0:
            raise ValueError("series does not reach the constant term")
        if self.val > 0:
            c = np.concatenate([np.zeros(self.val, dtype=complex), self.c])
            c[0] += s
            return Laurent(c, 0)
        c = self.c.copy()
        c[-self.val] += s
        return Laurent(c, self.val)

    def __mul__(self, other):
        if not isinstance(other, Laurent):
            return self.scale(other)
        n = min(len(self.c), len(other.c))
        out = np.convolve(self.c[:n], other.c[:n])[:n]
        return Laurent(out, self.val + other.val)

    __rmul__ = __mul__

    def normalized(self, tol: float = 0.0) -> "Laurent":
        """Drop leading coefficients whose modulus is <= tol * max modulus."""
        scale = np.max(np.abs(self.c)) if len(self.c) else 0.0
        k = 0
        while k < len(self.c) - 1 and abs(self.c[k]) <= tol * scale:
            k += 1
        return Laurent(self.c[k:], self.val + k)

    def reciprocal(self) -> "Laurent":
        s = self.normalized()
        b = s.c
        if b[0] == 0:
            raise ZeroDivisionError("reciprocal of a zero series")
        out = np.zeros_like(b)
        out[0] = 1.0 / b[0]
        for k in range(1, len(b)):
            out[k] = -np.dot(b[1: k + 1], out[k - 1:: -1][:k]) / b[0]
        return Laurent(out, -s.val)

    def __truediv__(self, other):
        if not isinstance(other, Laurent):
            return self.scale(1.0 / other)
        return self * other.reciprocal()

    def diff(self) -> "Laurent":
        powers = self.val + np.arange(len(self.c))
        if self.val == 0 and len(self.c) > 1:
            # the constant term differentiates to an exact zero; dropping it
            # keeps the series regular at y = 0
            return Laurent(self.c[1:] * powers[1:], 0)
        return Laurent(self.c * powers, self.val - 1)

    def residue(self) -> complex:
        return self.coeff(-1) if self.top >= -1 else 0j

    def integrate(self, residue_tol: float = 1e-8) -> "Laurent":
        """Antiderivative with zero constant term.

        The ``y**-1`` coefficient must vanish (up to ``residue_tol`` relative to
        the coefficient scale); it is discarded.
        """
        powers = self.val + np.arange(len(self.c))
        scale = max(np.max(np.abs(self.c)), 1e-300)
        c = self.c.astype(complex).copy()
        where = powers == -1
        if np.any(where) and abs(c[where][0]) > residue_tol * scale:
            raise ValueError(f"nonzero residue {c[where][0]!r} in integrate()")
        c[where] = 0.0
        newc = np.where(where, 0.0, c / np.where(where, 1.0, powers + 1))
        return Laurent(newc, self.val + 1)

    def sqrt(self) -> "Laurent":
        s = self.normalized()
        if s.val % 2:
            raise ValueError("odd valuation has no Laurent square root")
        b = s.c
        out = np.zeros_like(b)
        out[0] = np.sqrt(b[0])
        for k in range(1, len(b)):
            out[k] = (b[k] - np.dot(out[1:k], out[k - 1:0:-1])) / (2 * out[0])
        return Laurent(out, s.val // 2)

    def exp(self) -> "Laurent":
        if self.val < 0 and np.any(np.abs(self.c[: -self.val]) > 0):
            raise ValueError("exp of a series with a pole")
        if self.val > 0:
            c = np.concatenate([np.zeros(self.val, dtype=complex), self.c])
        else:
            c = self.c[-self.val:]
        out = np.zeros_like(c)
        out[0] = np.exp(c[0])
        for k in range(1, len(c)):
            j = np.arange(1, k + 1)
            out[k] = np.dot(j * c[1: k + 1], out[k - 1:: -1][:k]) / k
        return Laurent(out, 0)

    def truncate_to(self, top: int) -> "Laurent":
        n = top - self.val + 1
        return Laurent(self.c[: max(n, 0)], self.val)

    def __call__(self, y):
        y = np.asarray(y)
        acc = np.zeros(y.shape, dtype=complex)
        for ck in self.c[::-1]:
            acc = acc * y + ck
        if self.val:
            acc = acc * np.power(y.astype(complex), self.val)
        return acc

    def deriv_eval(self, y, k: int = 1):
        s = self
        for _ in range(k):
            s = s.diff()
        return s(y)

    def __repr__(self):
        return f"Laurent(val={self.val}, n={len(self.c)})"
