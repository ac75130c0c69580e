"""Dense univariate polynomials over Q(i) (exact) or complex doubles (float)."""
from __future__ import annotations

from fractions import Fraction
from math import lcm

import numpy as np

from .errors import ModeMismatchError
from .scalars import QI, rationalize

#: degree reported for the zero polynomial
DEG_ZERO = -1


def _to_scalar(c, exact: bool):
    if exact:
        return QI.coerce(c)
    if isinstance(c, QI):
        return complex(c)
    return complex(c)


class Poly:
    """Immutable polynomial, ``coeffs[i]`` multiplies ``z**i``.

    ``exact=True`` stores ``QI`` coefficients, ``exact=False`` stores Python
    ``complex``. Trailing zero coefficients are stripped at construction so
    ``coeffs[-1]`` is nonzero unless the polynomial is zero (empty tuple).
    """

    __slots__ = ("coeffs", "exact")

    def __init__(self, coeffs=(), exact: bool | None = None):
        coeffs = list(coeffs)
        if exact is None:
            exact = all(isinstance(c, (QI, int, Fraction)) for c in coeffs)
        cs = [_to_scalar(c, exact) for c in coeffs]
        while cs and not cs[-1]:
            cs.pop()
        object.__setattr__(self, "coeffs", tuple(cs))
        object.__setattr__(self, "exact", bool(exact))

    def __setattr__(self, name, value):
        raise AttributeError("Poly is immutable")

    # construction helpers
    @classmethod
    def zero(cls, exact=True):
        return cls((), exact)

    @classmethod
    def const(cls, c, exact=True):
        return cls((c,), exact)

    @classmethod
    def monomial(cls, k: int, c=1, exact=True):
        return cls([0] * k + [c], exact)

    @classmethod
    def identity(cls, exact=True):
        return cls((0, 1), exact)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def lead(self):
        return self.coeffs[-1] if self.coeffs else self._zero()

    def _zero(self):
        return QI(0) if self.exact else 0j

    def coeff(self, i: int):
        return self.coeffs[i] if 0 <= i < len(self.coeffs) else self._zero()

    def padded(self, n: int) -> list:
        """Coefficient list padded with zeros to length ``n``."""
        return list(self.coeffs) + [self._zero()] * (n - len(self.coeffs))

    def as_array(self, n: int | None = None) -> np.ndarray:
        cs = self.coeffs if n is None else self.padded(n)
        return np.array([complex(c) for c in cs], dtype=complex)

    # mode handling
    def _check(self, other: "Poly"):
        if self.exact != other.exact:
            raise ModeMismatchError("cannot mix exact and float polynomials")

    def to_float(self) -> "Poly":
        return self if not self.exact else Poly([complex(c) for c in self.coeffs], exact=False)

    def to_exact(self, max_den: int = 10**6, tol: float = 1e-12) -> "Poly":
        if self.exact:
            return self
        return Poly([rationalize(c, max_den, tol) for c in self.coeffs], exact=True)

    # arithmetic
    def __add__(self, other):
        other = self._lift(other)
        self._check(other)
        n = max(len(self.coeffs), len(other.coeffs))
        a, b = self.padded(n), other.padded(n)
        return Poly([x + y for x, y in zip(a, b)], self.exact)

    __radd__ = __add__

    def __neg__(self):
        return Poly([-c for c in self.coeffs], self.exact)

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        other = self._lift(other)
        self._check(other)
        if self.is_zero() or other.is_zero():
            return Poly.zero(self.exact)
        if len(other.coeffs) == 1:
            return self.scale(other.coeffs[0])
        if len(self.coeffs) == 1:
            return other.scale(self.coeffs[0])
        if not self.exact:
            return Poly(np.convolve(self.as_array(), other.as_array()).tolist(), exact=False)
        return Poly(_exact_convolve(self.coeffs, other.coeffs), exact=True)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        out, base = Poly.const(1, self.exact), self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def _lift(self, x) -> "Poly":
        if isinstance(x, Poly):
            return x
        return Poly.const(x, self.exact)

    def scale(self, c) -> "Poly":
        c = _to_scalar(c, self.exact)
        return Poly([c * x for x in self.coeffs], self.exact)

    def monic(self) -> "Poly":
        if self.is_zero():
            return self
        inv = (QI(1) / self.lead) if self.exact else 1 / self.lead
        return self.scale(inv)

    def __call__(self, x):
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def deriv(self) -> "Poly":
        return Poly([i * c for i, c in enumerate(self.coeffs)][1:], self.exact)

    def __divmod__(self, other: "Poly"):
        self._check(other)
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        rem = list(self.coeffs)
        dq = other.degree
        inv = (QI(1) / other.lead) if self.exact else 1 / other.lead
        quo = [self._zero()] * max(len(rem) - dq, 0)
        for k in range(len(rem) - 1, dq - 1, -1):
            c = rem[k] * inv
            quo[k - dq] = c
            if c:
                for j in range(dq + 1):
                    rem[k - dq + j] = rem[k - dq + j] - c * other.coeffs[j]
        rem = rem[:dq] if dq > 0 else []
        return Poly(quo, self.exact), Poly(rem, self.exact)

    def __floordiv__(self, other):
        return divmod(self, other)[0]

    def __mod__(self, other):
        return divmod(self, other)[1]

    def compose(self, inner: "Poly") -> "Poly":
        """``self(inner(z))`` by Horner's scheme."""
        self._check(inner)
        acc = Poly.zero(self.exact)
        for c in reversed(self.coeffs):
            acc = acc * inner + c
        return acc

    def shift(self, c) -> "Poly":
        """``self(z + c)``."""
        return self.compose(Poly((c, 1), self.exact))

    def reverse(self, n: int) -> "Poly":
        """``z**n * self(1/z)`` for ``n >= degree``."""
        return Poly(self.padded(n + 1)[::-1], self.exact)

    def __eq__(self, other):
        if not isinstance(other, Poly):
            return NotImplemented
        return self.exact == other.exact and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.exact, self.coeffs))

    def __repr__(self):
        mode = "exact" if self.exact else "float"
        return f"Poly({[str(c) for c in self.coeffs]}, {mode})"

    def __str__(self):
        if self.is_zero():
            return "0"
        terms = []
        for i, c in enumerate(self.coeffs):
            if not c:
                continue
            cs = str(c) if self.exact else f"{c:.12g}"
            if i == 0:
                terms.append(f"({cs})")
            else:
                mono = "z" if i == 1 else f"z^{i}"
                terms.append(mono if c == 1 else f"({cs})*{mono}")
        return " + ".join(reversed(terms))


def _exact_convolve(a, b):
    # common denominators, then three integer convolutions (Gauss trick)
    da = lcm(*(c.re.denominator for c in a), *(c.im.denominator for c in a))
    db = lcm(*(c.re.denominator for c in b), *(c.im.denominator for c in b))
    ar = np.array([int(c.re * da) for c in a], dtype=object)
    ai = np.array([int(c.im * da) for c in a], dtype=object)
    br = np.array([int(c.re * db) for c in b], dtype=object)
    bi = np.array([int(c.im * db) for c in b], dtype=object)
    if not any(ai) and not any(bi):
        re = np.convolve(ar, br)
        den = da * db
        return [QI(Fraction(int(x), den)) for x in re]
    k1 = np.convolve(br, ar + ai)
    k2 = np.convolve(ar, bi - br)
    k3 = np.convolve(ai, br + bi)
    den = da * db
    return [QI(Fraction(int(x - z), den), Fraction(int(x + y), den)) for x, y, z in zip(k1, k2, k3)]


def poly_gcd(a: Poly, b: Poly) -> Poly:
    """Monic gcd by Euclid's algorithm (exact mode only)."""
    if not (a.exact and b.exact):
        raise ModeMismatchError("exact gcd requires exact polynomials")
    while not b.is_zero():
        a, b = b, a % b
    return a.monic() if not a.is_zero() else a


def squarefree_decomposition(p: Poly) -> list[tuple[Poly, int]]:
    """Yun's algorithm: ``p = c * prod(f_i ** i)`` with ``f_i`` squarefree, coprime.

    Returns ``[(f_i, i), ...]`` for the nonconstant factors.
    """
    if not p.exact:
        raise ModeMismatchError("squarefree decomposition requires exact mode")
    if p.degree < 1:
        return []
    dp = p.deriv()
    c = poly_gcd(p, dp)
    w = p // c
    y = dp // c
    z = y - w.deriv()
    out = []
    i = 1
    while w.degree > 0:
        g = poly_gcd(w, z)
        if g.degree > 0:
            out.append((g, i))
        w = w // g
        y = z // g
        z = y - w.deriv()
        i += 1
    return out
