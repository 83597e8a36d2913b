"""Forward-mode dual numbers with a fixed tangent width.

A :class:`Dual` carries a value and a tuple of partial derivatives (the
"tangents").  Arithmetic propagates tangents by the chain rule, so running a
formula on seeded duals yields the exact first derivatives of the formula, up
to rounding.  The value half of every operation performs the same float
operations a plain evaluation would, which keeps plain and dual evaluation of
the same formula bit-identical.

Width convention used throughout the package: the 2n+2 extended phase-space
coordinates are ordered (t, q1..qn, p1..pn, z).
"""

from __future__ import annotations

import math


class Dual:
    """value + tangent vector; immutable by convention."""

    __slots__ = ("v", "e")

    def __init__(self, v: float, e: tuple):
        self.v = v
        self.e = e

    @staticmethod
    def seed(value: float, index: int, width: int) -> "Dual":
        """A coordinate variable: unit tangent along one axis."""
        return Dual(float(value), tuple(1.0 if j == index else 0.0 for j in range(width)))

    @staticmethod
    def const(value: float, width: int) -> "Dual":
        return Dual(float(value), (0.0,) * width)

    def __repr__(self):
        return f"Dual({self.v!r}, {self.e!r})"

    # -- arithmetic ---------------------------------------------------------

    def __add__(self, o):
        if isinstance(o, Dual):
            return Dual(self.v + o.v, tuple(a + b for a, b in zip(self.e, o.e)))
        return Dual(self.v + o, self.e)

    __radd__ = __add__

    def __sub__(self, o):
        if isinstance(o, Dual):
            return Dual(self.v - o.v, tuple(a - b for a, b in zip(self.e, o.e)))
        return Dual(self.v - o, self.e)

    def __rsub__(self, o):
        return Dual(o - self.v, tuple(-a for a in self.e))

    def __neg__(self):
        return Dual(-self.v, tuple(-a for a in self.e))

    def __mul__(self, o):
        if isinstance(o, Dual):
            return Dual(
                self.v * o.v,
                tuple(self.v * b + o.v * a for a, b in zip(self.e, o.e)),
            )
        return Dual(self.v * o, tuple(a * o for a in self.e))

    __rmul__ = __mul__

    def __truediv__(self, o):
        if isinstance(o, Dual):
            v = self.v / o.v
            w = o.v * o.v
            return Dual(v, tuple((a * o.v - self.v * b) / w for a, b in zip(self.e, o.e)))
        return Dual(self.v / o, tuple(a / o for a in self.e))

    def __rtruediv__(self, o):
        v = o / self.v
        w = self.v * self.v
        return Dual(v, tuple(-o * a / w for a in self.e))

    def __pow__(self, o):
        if isinstance(o, int) or (isinstance(o, float) and o.is_integer()):
            return ipow(self, int(o))
        return dpow(self, o)

    def __rpow__(self, o):
        return dpow(o, self)


def value_of(x):
    """Float value of a float or a Dual."""
    return x.v if isinstance(x, Dual) else x


def dual_phase(t, q, p, z):
    """Seed a phase point as duals over the standard (t, q, p, z) basis."""
    n = len(q)
    m = 2 * n + 2
    T = Dual.seed(t, 0, m)
    Q = tuple(Dual.seed(qi, 1 + i, m) for i, qi in enumerate(q))
    P = tuple(Dual.seed(pi, 1 + n + i, m) for i, pi in enumerate(p))
    Z = Dual.seed(z, 2 * n + 1, m)
    return T, Q, P, Z


# -- powers ------------------------------------------------------------------


def ipow(x, k: int):
    """x**k for integer k by binary exponentiation.

    Works for negative bases (unlike the general power), and performs the
    same multiplication sequence for floats and duals so the two evaluation
    paths agree bit-for-bit.
    """
    if k == 0:
        return 1.0
    if k < 0:
        return 1.0 / ipow(x, -k)
    r = None
    b = x
    while True:
        if k & 1:
            r = b if r is None else r * b
        k >>= 1
        if not k:
            return r
        b = b * b


def dpow(x, y):
    """General power x**y; requires x > 0 (integer exponents go via ipow)."""
    xv = value_of(x)
    yv = value_of(y)
    if xv <= 0.0:
        raise ValueError("x^y is only defined for x > 0 when y is not an integer")
    v = xv ** yv
    if not isinstance(x, Dual) and not isinstance(y, Dual):
        return v
    lx = math.log(xv)
    width = len(x.e) if isinstance(x, Dual) else len(y.e)
    xe = x.e if isinstance(x, Dual) else (0.0,) * width
    ye = y.e if isinstance(y, Dual) else (0.0,) * width
    # d(x^y) = x^y * (y' ln x + y x'/x)
    return Dual(v, tuple(v * (b * lx + yv * a / xv) for a, b in zip(xe, ye)))


# -- elementary functions ------------------------------------------------------

def _lift(x, v, dv):
    """Wrap a function value and its derivative-at-x.v into a Dual if needed."""
    if isinstance(x, Dual):
        return Dual(v, tuple(dv * a for a in x.e))
    return v


def dexp(x):
    v = math.exp(value_of(x))
    return _lift(x, v, v)


def dlog(x):
    xv = value_of(x)
    v = math.log(xv)  # raises ValueError for xv <= 0
    return _lift(x, v, 1.0 / xv)


def dsqrt(x):
    xv = value_of(x)
    v = math.sqrt(xv)  # raises ValueError for xv < 0
    if isinstance(x, Dual):
        return Dual(v, tuple(0.5 / v * a for a in x.e))
    return v


def dsin(x):
    xv = value_of(x)
    return _lift(x, math.sin(xv), math.cos(xv))


def dcos(x):
    xv = value_of(x)
    return _lift(x, math.cos(xv), -math.sin(xv))


def dsinh(x):
    xv = value_of(x)
    return _lift(x, math.sinh(xv), math.cosh(xv))


def dcosh(x):
    xv = value_of(x)
    return _lift(x, math.cosh(xv), math.sinh(xv))


def dabs(x):
    xv = value_of(x)
    if isinstance(x, Dual):
        s = 1.0 if xv > 0.0 else (-1.0 if xv < 0.0 else 0.0)
        return Dual(abs(xv), tuple(s * a for a in x.e))
    return abs(xv)


# -- branch-free damped-oscillator kernels ------------------------------------
#
# shc(delta, x) = sinh(sqrt(delta) x)/sqrt(delta) and chx(delta, x) =
# cosh(sqrt(delta) x), continued through delta <= 0: both are even in
# sqrt(delta), hence real-analytic in delta, and flip to sin/cos for
# delta < 0.  Near delta x^2 = 0 a short Taylor series removes the
# removable singularity of shc and keeps chx smooth across the critical
# case.  Exact derivative rules: d/dx shc = chx and d/dx chx = delta*shc.

_SERIES_CUT = 1e-8


def _shc_val(delta: float, x: float) -> float:
    y = delta * x * x
    if abs(y) < _SERIES_CUT:
        return x * (1.0 + y * (1.0 / 6.0 + y * (1.0 / 120.0 + y / 5040.0)))
    r = math.sqrt(abs(delta))
    if delta > 0.0:
        return math.sinh(r * x) / r
    return math.sin(r * x) / r


def _chx_val(delta: float, x: float) -> float:
    y = delta * x * x
    if abs(y) < _SERIES_CUT:
        return 1.0 + y * (0.5 + y * (1.0 / 24.0 + y / 720.0))
    r = math.sqrt(abs(delta))
    if delta > 0.0:
        return math.cosh(r * x)
    return math.cos(r * x)


def shc(delta: float, x):
    """sinh(sqrt(delta)*x)/sqrt(delta), valid for any real delta."""
    if isinstance(x, Dual):
        return Dual(_shc_val(delta, x.v), tuple(_chx_val(delta, x.v) * a for a in x.e))
    return _shc_val(delta, x)


def chx(delta: float, x):
    """cosh(sqrt(delta)*x), valid for any real delta."""
    if isinstance(x, Dual):
        d = delta * _shc_val(delta, x.v)
        return Dual(_chx_val(delta, x.v), tuple(d * a for a in x.e))
    return _chx_val(delta, x)
