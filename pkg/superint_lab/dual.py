"""
Forward-mode automatic differentiation with vector-valued dual parts.

A `Dual` carries a value and its gradient with respect to every seeded
variable at once, so a single evaluation of a phase-space function built
from the helpers below (`sin`, `cos`, `sqrt`, `atan2`, ...) returns the
exact gradient over all of (q, p). Plain floats pass through every helper
untouched, which lets charts, potentials and observables be written once
and evaluated either numerically or with derivatives.
"""
import math

import numpy as np


class Dual:
    __slots__ = ("x", "dx")

    def __init__(self, x, dx):
        self.x = float(x)
        self.dx = dx

    def __repr__(self):
        return "Dual(%r, %r)" % (self.x, self.dx)

    def __float__(self):
        return self.x

    def __neg__(self):
        return Dual(-self.x, -self.dx)

    def __pos__(self):
        return self

    def __abs__(self):
        if self.x < 0:
            return -self
        return self

    def __add__(self, other):
        if isinstance(other, Dual):
            return Dual(self.x + other.x, self.dx + other.dx)
        return Dual(self.x + other, self.dx)

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, Dual):
            return Dual(self.x - other.x, self.dx - other.dx)
        return Dual(self.x - other, self.dx)

    def __rsub__(self, other):
        return Dual(other - self.x, -self.dx)

    def __mul__(self, other):
        if isinstance(other, Dual):
            return Dual(self.x * other.x, self.x * other.dx + other.x * self.dx)
        return Dual(self.x * other, self.dx * other)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Dual):
            return Dual(self.x / other.x, (self.dx * other.x - self.x * other.dx) / (other.x * other.x))
        return Dual(self.x / other, self.dx / other)

    def __rtruediv__(self, other):
        return Dual(other / self.x, -other * self.dx / (self.x * self.x))

    def __pow__(self, power):
        if isinstance(power, Dual):
            raise TypeError("Dual exponents are not supported")
        if power == 0:
            return Dual(1.0, 0.0 * self.dx)
        return Dual(self.x**power, power * self.x ** (power - 1) * self.dx)

    def __lt__(self, other):
        return self.x < value(other)

    def __le__(self, other):
        return self.x <= value(other)

    def __gt__(self, other):
        return self.x > value(other)

    def __ge__(self, other):
        return self.x >= value(other)


def value(v):
    if isinstance(v, Dual):
        return v.x
    return float(v)


def sin(v):
    if isinstance(v, Dual):
        return Dual(math.sin(v.x), math.cos(v.x) * v.dx)
    return math.sin(v)


def cos(v):
    if isinstance(v, Dual):
        return Dual(math.cos(v.x), -math.sin(v.x) * v.dx)
    return math.cos(v)


def tan(v):
    if isinstance(v, Dual):
        t = math.tan(v.x)
        return Dual(t, (1.0 + t * t) * v.dx)
    return math.tan(v)


def sqrt(v):
    if isinstance(v, Dual):
        root = math.sqrt(v.x)
        return Dual(root, v.dx / (2.0 * root))
    return math.sqrt(v)


def atan2(y, x):
    if isinstance(y, Dual) or isinstance(x, Dual):
        yv, xv = value(y), value(x)
        dy = y.dx if isinstance(y, Dual) else 0.0
        dx = x.dx if isinstance(x, Dual) else 0.0
        return Dual(math.atan2(yv, xv), (xv * dy - yv * dx) / (xv * xv + yv * yv))
    return math.atan2(y, x)


def seed(values):
    """
    Returns one `Dual` per entry of `values`, the i-th one carrying the
    i-th unit vector as its dual part.
    """
    size = len(values)
    identity = np.eye(size)
    return [Dual(v, identity[i]) for i, v in enumerate(values)]


def gradient(func, values):
    """
    Evaluates ``func(*seed(values))`` and returns ``(value, gradient)``.
    Functions that do not depend on their arguments return a float; their
    gradient is zero.
    """
    result = func(*seed(values))
    if isinstance(result, Dual):
        return result.x, np.asarray(result.dx, dtype=float)
    return float(result), np.zeros(len(values))
