"""Exact Gaussian rationals, i.e. elements of Q(i)."""
from __future__ import annotations

from fractions import Fraction
from numbers import Rational


def _frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, Rational)):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x.strip())
    if isinstance(x, float):
        return Fraction(x)
    raise TypeError(f"cannot make an exact rational from {x!r}")


class QI:
    """Complex number with arbitrary-precision rational real and imaginary parts.

    Supports the field operations with other ``QI`` values and with Python
    ints and ``Fraction``. Mixing with ``float``/``complex`` is refused on
    purpose so exactness is never lost silently.
    """

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        if isinstance(re, QI):
            re, im = re.re, re.im + _frac(im)
        self.re = _frac(re)
        self.im = _frac(im)

    @classmethod
    def coerce(cls, x) -> "QI":
        if isinstance(x, QI):
            return x
        if isinstance(x, complex):
            return cls(Fraction(x.real), Fraction(x.imag))
        return cls(x)

    @staticmethod
    def _other(x):
        if isinstance(x, QI):
            return x
        if isinstance(x, (int, Fraction)):
            return QI(x)
        return NotImplemented

    def __add__(self, o):
        o = self._other(o)
        if o is NotImplemented:
            return o
        return QI(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __sub__(self, o):
        o = self._other(o)
        if o is NotImplemented:
            return o
        return QI(self.re - o.re, self.im - o.im)

    def __rsub__(self, o):
        o = self._other(o)
        if o is NotImplemented:
            return o
        return o - self

    def __mul__(self, o):
        o = self._other(o)
        if o is NotImplemented:
            return o
        if not self.im and not o.im:
            return QI(self.re * o.re)
        return QI(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def __truediv__(self, o):
        o = self._other(o)
        if o is NotImplemented:
            return o
        if not o.im:
            if not o.re:
                raise ZeroDivisionError("division by zero in Q(i)")
            return QI(self.re / o.re, self.im / o.re)
        n = o.re * o.re + o.im * o.im
        return QI((self.re * o.re + self.im * o.im) / n, (self.im * o.re - self.re * o.im) / n)

    def __rtruediv__(self, o):
        o = self._other(o)
        if o is NotImplemented:
            return o
        return o / self

    def __pow__(self, k: int):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return QI(1) / (self ** (-k))
        out, base = QI(1), self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __neg__(self):
        return QI(-self.re, -self.im)

    def __pos__(self):
        return self

    def conjugate(self) -> "QI":
        return QI(self.re, -self.im)

    def abs2(self) -> Fraction:
        return self.re * self.re + self.im * self.im

    def __abs__(self) -> float:
        return abs(complex(self))

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __eq__(self, o):
        if isinstance(o, QI):
            return self.re == o.re and self.im == o.im
        if isinstance(o, (int, Fraction)):
            return not self.im and self.re == o
        return NotImplemented

    def __hash__(self):
        if not self.im:
            return hash(self.re)
        return hash((self.re, self.im))

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def __repr__(self):
        return f"QI({self.re}, {self.im})"

    def __str__(self):
        if not self.im:
            return str(self.re)
        if not self.re:
            return f"{self.im}i"
        sign = "+" if self.im > 0 else "-"
        return f"{self.re}{sign}{abs(self.im)}i"


def is_exact(x) -> bool:
    return isinstance(x, (QI, int, Fraction))


def rationalize(x: complex, max_den: int = 10**6, tol: float = 1e-12) -> QI:
    """Snap a float complex number to Q(i) by continued fractions.

    Raises ValueError if the snapped value moves by more than ``tol``
    (relative to ``max(1, |x|)``).
    """
    x = complex(x)
    re = Fraction(x.real).limit_denominator(max_den)
    im = Fraction(x.imag).limit_denominator(max_den)
    q = QI(re, im)
    if abs(complex(q) - x) > tol * max(1.0, abs(x)):
        raise ValueError(f"{x!r} has no rational approximation with denominator <= {max_den}")
    return q
