"""Vectorized double-double arithmetic (about 32 significant digits).

Used to evaluate generating functions where float64 rounding would swamp the
quantity of interest, e.g. a five-point second difference with step 1e-11.
Only the operations the closed forms need are provided: ``+ - * /``, unary
minus, and powers with exponent in {0.5, 1, 1.5, 2, 2.5, 3}.

Algorithms follow Dekker (1971) and the QD library (Hida, Li, Bailey).
"""

from __future__ import annotations

import numpy as np

_SPLITTER = 134217729.0  # 2**27 + 1


def _two_sum(a, b):
    s = a + b
    bb = s - a
    err = (a - (s - bb)) + (b - bb)
    return s, err


def _quick_two_sum(a, b):
    s = a + b
    return s, b - (s - a)


def _split(a):
    t = _SPLITTER * a
    hi = t - (t - a)
    return hi, a - hi


def _two_prod(a, b):
    p = a * b
    ah, al = _split(a)
    bh, bl = _split(b)
    err = ((ah * bh - p) + ah * bl + al * bh) + al * bl
    return p, err


class DD:
    """Array of double-double numbers ``hi + lo`` with ``|lo| <= ulp(hi)/2``."""

    __slots__ = ("hi", "lo")
    __array_priority__ = 100  # make ndarray defer to our reflected operators

    def __init__(self, hi, lo=None):
        self.hi = np.asarray(hi, dtype=np.float64)
        self.lo = np.zeros_like(self.hi) if lo is None else np.asarray(lo, dtype=np.float64)

    @staticmethod
    def _wrap(x) -> DD:
        return x if isinstance(x, DD) else DD(x)

    @classmethod
    def exact_sum(cls, a, b) -> DD:
        """``a + b`` for float arrays, represented without rounding."""
        return cls(*_two_sum(np.asarray(a, dtype=np.float64), np.asarray(b, dtype=np.float64)))

    def __float__(self) -> float:
        return float(self.hi + self.lo)

    def to_float(self) -> np.ndarray:
        return self.hi + self.lo

    def __neg__(self) -> DD:
        return DD(-self.hi, -self.lo)

    def __add__(self, other) -> DD:
        o = self._wrap(other)
        s, e = _two_sum(self.hi, o.hi)
        t, f = _two_sum(self.lo, o.lo)
        e = e + t
        s, e = _quick_two_sum(s, e)
        e = e + f
        return DD(*_quick_two_sum(s, e))

    __radd__ = __add__

    def __sub__(self, other) -> DD:
        return self + (-self._wrap(other))

    def __rsub__(self, other) -> DD:
        return self._wrap(other) + (-self)

    def __mul__(self, other) -> DD:
        o = self._wrap(other)
        p, e = _two_prod(self.hi, o.hi)
        e = e + (self.hi * o.lo + self.lo * o.hi)
        return DD(*_quick_two_sum(p, e))

    __rmul__ = __mul__

    def __truediv__(self, other) -> DD:
        o = self._wrap(other)
        q1 = self.hi / o.hi
        r = self - o * q1
        q2 = r.hi / o.hi
        r = r - o * q2
        q3 = r.hi / o.hi
        q1, q2 = _quick_two_sum(q1, q2)
        return DD(q1, q2) + q3

    def __rtruediv__(self, other) -> DD:
        return self._wrap(other) / self

    def sqrt(self) -> DD:
        s = np.sqrt(self.hi)
        p, e = _two_prod(s, s)
        # one Newton step on the residual a - s*s
        resid = ((self.hi - p) - e) + self.lo
        corr = resid / (2.0 * s)
        return DD(*_quick_two_sum(s, corr))

    def __pow__(self, k) -> DD:
        if k == 0.5:
            return self.sqrt()
        if k == 1:
            return self
        if k == 1.5:
            return self * self.sqrt()
        if k == 2:
            return self * self
        if k == 2.5:
            return self * self * self.sqrt()
        if k == 3:
            return self * self * self
        raise NotImplementedError(f"DD ** {k!r} is not supported")

    def __repr__(self) -> str:
        return f"DD(hi={self.hi!r}, lo={self.lo!r})"
