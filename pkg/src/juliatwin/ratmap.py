"""Rational maps of the Riemann sphere: construction, evaluation, composition."""
from __future__ import annotations

import ast
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property

import numpy as np

from . import kernels
from .errors import CoprimalityError, DegreeBudgetError, MapFormatError, ModeMismatchError
from .poly import Poly, poly_gcd, squarefree_decomposition
from .roots import cluster_labels, polyroots
from .scalars import QI

DEFAULT_DEGREE_BUDGET = 4096
COPRIME_TOL = 1e-9
EQUAL_TOL = 1e-9
CRITICAL_CLUSTER_TOL = 1e-6


@dataclass(frozen=True)
class SpherePoint:
    """Point of C ∪ {∞} as a homogeneous pair ``(z0, z1)``; affine value ``z0/z1``.

    Float points are normalized to ``max(|z0|, |z1|) = 1``; exact points to
    ``(z, 1)`` or ``(1, 0)``.
    """

    z0: complex | QI
    z1: complex | QI
    exact: bool = False

    def __post_init__(self):
        z0, z1 = self.z0, self.z1
        if self.exact:
            z0, z1 = QI.coerce(z0), QI.coerce(z1)
            if not z0 and not z1:
                raise ValueError("(0, 0) is not a point of the sphere")
            z0, z1 = (z0 / z1, QI(1)) if z1 else (QI(1), QI(0))
        else:
            z0, z1 = complex(z0), complex(z1)
            s = max(abs(z0), abs(z1))
            if s == 0 or not np.isfinite(s):
                raise ValueError("invalid homogeneous coordinates")
            z0, z1 = z0 / s, z1 / s
        object.__setattr__(self, "z0", z0)
        object.__setattr__(self, "z1", z1)

    @classmethod
    def of(cls, value, exact: bool | None = None) -> "SpherePoint":
        if isinstance(value, SpherePoint):
            return value
        if exact is None:
            exact = isinstance(value, (QI, int, Fraction))
        if isinstance(value, (float, complex)) and not np.isfinite(complex(value)):
            return cls(1, 0, exact)
        if exact:
            return cls(QI.coerce(value), QI(1), True)
        z0, z1 = kernels.from_affine(complex(value))
        return cls(complex(z0), complex(z1), False)

    @classmethod
    def infinity(cls, exact: bool = False) -> "SpherePoint":
        return cls(1, 0, exact)

    @property
    def is_infinite(self) -> bool:
        return not self.z1

    @property
    def value(self):
        if self.is_infinite:
            return complex(np.inf, 0)
        return self.z0 / self.z1

    def to_float(self) -> "SpherePoint":
        return self if not self.exact else SpherePoint(complex(self.z0), complex(self.z1))

    def distance(self, other: "SpherePoint") -> float:
        return float(kernels.chordal(complex(self.z0), complex(self.z1),
                                     complex(other.z0), complex(other.z1)))

    def __str__(self):
        if self.is_infinite:
            return "inf"
        v = self.value
        return str(v) if self.exact else f"{v.real:.15g}{v.imag:+.15g}i"


class RatMap:
    """Quotient ``num/den`` of coprime polynomials in a single mode.

    Exact maps are reduced by an exact gcd; float maps are checked for
    root pairs of ``num`` and ``den`` closer than ``COPRIME_TOL`` (chordal),
    which are cancelled if the cancellation is clean and rejected otherwise.
    The denominator is normalized to be monic.
    """

    def __init__(self, num, den=None, exact: bool | None = None, *, check: bool = True):
        if not isinstance(num, Poly):
            num = Poly(num, exact)
        if den is None:
            den = Poly.const(1, num.exact)
        elif not isinstance(den, Poly):
            den = Poly(den, num.exact)
        if num.exact != den.exact:
            raise ModeMismatchError("numerator and denominator modes differ")
        if den.is_zero():
            raise ZeroDivisionError("zero denominator")
        if check:
            if num.exact:
                g = poly_gcd(num, den)
                if g.degree > 0:
                    num, den = num // g, den // g
            else:
                num, den = _float_coprime(num, den)
        s = den.lead
        if s != 1:
            inv = QI(1) / s if den.exact else 1 / s
            num, den = num.scale(inv), den.scale(inv)
        object.__setattr__(self, "num", num)
        object.__setattr__(self, "den", den)

    def __setattr__(self, name, value):
        if name in ("num", "den"):
            raise AttributeError("RatMap is immutable")
        object.__setattr__(self, name, value)

    @property
    def exact(self) -> bool:
        return self.num.exact

    @property
    def mode(self) -> str:
        return "exact" if self.exact else "float"

    @property
    def degree(self) -> int:
        return max(self.num.degree, self.den.degree, 0)

    @classmethod
    def identity(cls, exact=True):
        return cls(Poly.identity(exact), check=False)

    @classmethod
    def constant(cls, c, exact=True):
        return cls(Poly.const(c, exact), check=False)

    def hom_coeffs(self):
        """Numerator and denominator coefficients padded to ``degree + 1``."""
        n = self.degree + 1
        return self.num.padded(n), self.den.padded(n)

    @cached_property
    def hom(self) -> kernels.HomMap:
        p, q = self.hom_coeffs()
        return kernels.HomMap([complex(c) for c in p], [complex(c) for c in q])

    def to_float(self) -> "RatMap":
        if not self.exact:
            return self
        return RatMap(self.num.to_float(), self.den.to_float(), check=False)

    def to_exact(self, max_den: int = 10**6, tol: float = 1e-12) -> "RatMap":
        """Snap float coefficients to Q(i); raises ValueError if they are not near-rational."""
        if self.exact:
            return self
        return RatMap(self.num.to_exact(max_den, tol), self.den.to_exact(max_den, tol))

    def __call__(self, z):
        """Vectorized float evaluation on affine values (``inf`` allowed)."""
        a0, a1 = self.hom(*kernels.from_affine(z))
        out = kernels.to_affine(a0, a1)
        return out if np.ndim(z) else complex(out)

    # rational-function arithmetic (used by the expression parser)
    def _lift(self, o) -> "RatMap":
        if isinstance(o, RatMap):
            if o.exact != self.exact:
                raise ModeMismatchError("cannot mix exact and float maps")
            return o
        return RatMap.constant(o, self.exact)

    def __add__(self, o):
        o = self._lift(o)
        return RatMap(self.num * o.den + o.num * self.den, self.den * o.den)

    __radd__ = __add__

    def __neg__(self):
        return RatMap(-self.num, self.den, check=False)

    def __sub__(self, o):
        return self + (-self._lift(o))

    def __rsub__(self, o):
        return self._lift(o) - self

    def __mul__(self, o):
        o = self._lift(o)
        return RatMap(self.num * o.num, self.den * o.den)

    __rmul__ = __mul__

    def __truediv__(self, o):
        o = self._lift(o)
        if o.num.is_zero():
            raise ZeroDivisionError("division by the zero map")
        return RatMap(self.num * o.den, self.den * o.num)

    def __rtruediv__(self, o):
        return self._lift(o) / self

    def __pow__(self, k: int):
        if k < 0:
            return RatMap.constant(1, self.exact) / (self ** (-k))
        return RatMap(self.num ** k, self.den ** k, check=False)

    def __eq__(self, other):
        if not isinstance(other, RatMap):
            return NotImplemented
        return self.exact == other.exact and maps_equal(self, other)

    __hash__ = None

    def __repr__(self):
        return f"RatMap(({self.num}) / ({self.den}), {self.mode})"

    def __str__(self):
        if self.den.degree == 0:
            return str(self.num)
        return f"({self.num}) / ({self.den})"


def _float_coprime(num: Poly, den: Poly):
    """Cancel near-common roots of float ``num``/``den`` or raise."""
    for _ in range(max(num.degree, den.degree) + 1):
        if num.degree < 1 or den.degree < 1:
            return num, den
        rn = polyroots(num.as_array())
        rd = polyroots(den.as_array())
        d = kernels.chordal_affine(rn[:, None], rd[None, :])
        i, j = np.unravel_index(np.argmin(d), d.shape)
        if d[i, j] >= COPRIME_TOL:
            return num, den
        r = 0.5 * (rn[i] + rd[j])
        lin = Poly((-r, 1), exact=False)
        qn, remn = divmod(num, lin)
        qd, remd = divmod(den, lin)
        scale_n = max(abs(c) for c in num.coeffs)
        scale_d = max(abs(c) for c in den.coeffs)
        if abs(remn.coeff(0)) > 1e-7 * scale_n or abs(remd.coeff(0)) > 1e-7 * scale_d:
            raise CoprimalityError(f"numerator and denominator share a near-root at {r:.6g}"
                                   " that does not cancel cleanly")
        num, den = qn, qd
    return num, den


def _check_modes(*maps):
    if len({m.exact for m in maps}) > 1:
        raise ModeMismatchError("exact and float maps cannot be combined; convert explicitly")


def evaluate(f: RatMap, z) -> SpherePoint:
    """Image of ``z`` under ``f`` via homogeneous coordinates."""
    z = SpherePoint.of(z, exact=f.exact if not isinstance(z, SpherePoint) else None)
    if f.exact and z.exact:
        p, q = f.hom_coeffs()
        d = f.degree
        z0, z1 = z.z0, z.z1
        a = sum((c * z0 ** i * z1 ** (d - i) for i, c in enumerate(p)), QI(0))
        b = sum((c * z0 ** i * z1 ** (d - i) for i, c in enumerate(q)), QI(0))
        return SpherePoint(a, b, True)
    z = z.to_float()
    a0, a1 = f.hom(np.array([z.z0]), np.array([z.z1]))
    return SpherePoint(complex(a0[0]), complex(a1[0]))


def compose(f: RatMap, g: RatMap) -> RatMap:
    """``f ∘ g``.

    Homogeneous substitution of ``g = G0/G1`` into ``f`` gives numerator and
    denominator whose resultant is a power of the two input resultants, so
    the output is coprime without a gcd pass.
    """
    _check_modes(f, g)
    d = f.degree
    e = g.degree
    exact = f.exact
    G0, G1 = g.num, g.den
    if e == 0:
        w = evaluate(f, SpherePoint(G0.coeff(0), G1.coeff(0), exact))
        if w.is_infinite:
            raise ZeroDivisionError("composition yields the constant map ∞")
        return RatMap.constant(w.value, exact)
    p, q = f.hom_coeffs()
    pw0 = [Poly.const(1, exact)]
    pw1 = [Poly.const(1, exact)]
    poly_map = G1.degree == 0
    for _ in range(d):
        pw0.append(pw0[-1] * G0)
        if not poly_map:
            pw1.append(pw1[-1] * G1)
    if poly_map:
        c = G1.coeff(0)
        pw1 = [Poly.const(c ** k, exact) for k in range(d + 1)]
    num = Poly.zero(exact)
    den = Poly.zero(exact)
    for i in range(d + 1):
        term = pw0[i] * pw1[d - i]
        if p[i]:
            num = num + term.scale(p[i])
        if q[i]:
            den = den + term.scale(q[i])
    return RatMap(num, den, check=False)


def iterate(f: RatMap, k: int, budget: int = DEFAULT_DEGREE_BUDGET) -> RatMap:
    """``f^k``; ``f^0`` is the identity map."""
    if k < 0:
        raise ValueError("iteration count must be nonnegative")
    if f.degree ** k > budget:
        raise DegreeBudgetError(f"deg(f^{k}) = {f.degree}^{k} exceeds the degree budget {budget}")
    out = RatMap.identity(f.exact)
    for _ in range(k):
        out = compose(f, out)
    return out


def derivative(f: RatMap) -> RatMap:
    """``(P'Q - PQ')/Q^2`` reduced."""
    P, Q = f.num, f.den
    return RatMap(P.deriv() * Q - P * Q.deriv(), Q * Q)


def mobius_conjugate(f: RatMap, sigma: RatMap) -> RatMap:
    """``sigma ∘ f ∘ sigma^{-1}`` for a degree-1 map ``sigma``."""
    _check_modes(f, sigma)
    if sigma.degree != 1:
        raise ValueError("conjugating map must have degree 1")
    a, b = sigma.num.coeff(1), sigma.num.coeff(0)
    c, d = sigma.den.coeff(1), sigma.den.coeff(0)
    det = a * d - b * c
    if (det == 0) if sigma.exact else abs(det) < 1e-14:
        raise ValueError("conjugating map is not invertible")
    inv = RatMap(Poly((-b, d), sigma.exact), Poly((a, -c), sigma.exact), check=False)
    return compose(sigma, compose(f, inv))


def maps_equal(f: RatMap, g: RatMap, tol: float = EQUAL_TOL) -> bool:
    """Equality of maps by cross-multiplication ``P_f Q_g == P_g Q_f``.

    Float mode compares both cross-products after dividing each by its
    coefficient at the index where the first one has largest modulus.
    """
    _check_modes(f, g)
    left = f.num * g.den
    right = g.num * f.den
    if f.exact:
        return left == right
    n = max(len(left.coeffs), len(right.coeffs))
    a, b = left.as_array(n), right.as_array(n)
    if not a.any() or not b.any():
        return not a.any() and not b.any()
    k = int(np.argmax(np.abs(a)))
    if b[k] == 0:
        return False
    return bool(np.max(np.abs(a / a[k] - b / b[k])) < tol)


def power_map(lam, d: int) -> RatMap:
    """``lam * z**d``; a negative ``d`` gives ``lam / z**|d|``."""
    if abs(d) < 2:
        raise ValueError("power map needs |d| >= 2")
    exact = isinstance(lam, (QI, int, Fraction))
    if d > 0:
        return RatMap(Poly.monomial(d, lam, exact))
    return RatMap(Poly.const(lam, exact), Poly.monomial(-d, 1, exact))


def chebyshev_poly(d: int, exact: bool = True) -> Poly:
    t_prev, t = Poly.const(1, exact), Poly.identity(exact)
    if d == 0:
        return t_prev
    two_z = Poly((0, 2), exact)
    for _ in range(d - 1):
        t_prev, t = t, two_z * t - t_prev
    return t


def chebyshev(d: int, sign: int = 1) -> RatMap:
    """``sign * T_d`` with ``T_d(cos x) = cos(d x)``."""
    if d < 2:
        raise ValueError("Chebyshev map needs d >= 2")
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    t = chebyshev_poly(d)
    return RatMap(t if sign == 1 else -t, check=False)


def example_pair(h: RatMap, p: int, alpha) -> tuple[RatMap, RatMap]:
    """``f(z) = h(z^p)`` and ``g(z) = alpha * h(z^p)`` for a p-th root of unity ``alpha != 1``."""
    if p < 1:
        raise ValueError("p must be a positive integer")
    if h.exact:
        a = QI.coerce(alpha)
        if a == 1 or a ** p != 1:
            raise ValueError("alpha must be a p-th root of unity different from 1")
    else:
        a = complex(alpha)
        if abs(a - 1) < 1e-12 or abs(a ** p - 1) > 1e-12:
            raise ValueError("alpha must be a p-th root of unity different from 1")
    zp = RatMap(Poly.monomial(p, 1, h.exact), check=False)
    f = compose(h, zp)
    g = RatMap(f.num.scale(a), f.den, check=False)
    return f, g


def critical_points(f: RatMap) -> list[tuple[SpherePoint, int]]:
    """Critical points with multiplicities; the multiplicities sum to ``2 deg f - 2``."""
    d = f.degree
    if d < 2:
        raise ValueError("critical points need deg f >= 2")
    g = f
    if not f.exact:
        try:
            g = f.to_exact()
        except ValueError:
            g = f
    P, Q = g.num, g.den
    W = P.deriv() * Q - P * Q.deriv()
    out: list[tuple[SpherePoint, int]] = []
    if g.exact:
        for factor, mult in squarefree_decomposition(W):
            for r in polyroots(factor.as_array()):
                out.append((SpherePoint.of(complex(r), exact=False), mult))
        degW = W.degree
    else:
        c = W.as_array()
        scale = np.max(np.abs(c))
        keep = np.flatnonzero(np.abs(c) > 1e-14 * scale)
        c = c[: keep[-1] + 1]
        degW = len(c) - 1
        r = polyroots(c)
        z0, z1 = kernels.from_affine(r)
        labels = cluster_labels(z0, z1, CRITICAL_CLUSTER_TOL)
        for lab in range(labels.max() + 1 if len(labels) else 0):
            members = r[labels == lab]
            out.append((SpherePoint.of(complex(members.mean()), exact=False), len(members)))
    m_inf = 2 * d - 2 - degW
    if m_inf > 0:
        out.append((SpherePoint.infinity(), m_inf))
    return out


# --- expression parsing -----------------------------------------------------

_IMPLICIT_MUL = re.compile(r"(?<=[\dzijI)])\s*(?=[zijI(])")


def parse_map(text: str, exact: bool = True) -> RatMap:
    """Parse a shorthand rational expression in ``z`` such as ``"z^2 - 2"``.

    Supports ``+ - * / ^ **``, parentheses, integer and decimal literals and
    the imaginary unit ``i`` (or Python ``j`` suffixes). A number or closing
    parenthesis followed by ``z``, ``i`` or ``(`` multiplies, so ``2z^2 + 3i``
    works. Decimal literals are read exactly in exact mode.
    """
    src = _IMPLICIT_MUL.sub("*", text.strip()).replace("^", "**")
    try:
        tree = ast.parse(src, mode="eval")
    except SyntaxError as exc:
        raise MapFormatError(f"cannot parse map expression {text!r}: {exc.msg}") from None
    z = RatMap.identity(exact)

    def lit(v):
        if exact:
            if isinstance(v, complex):
                return QI(Fraction(repr(v.real)), Fraction(repr(v.imag)))
            if isinstance(v, float):
                return QI(Fraction(repr(v)))
            return QI(v)
        return complex(v)

    def ev(node):
        if isinstance(node, ast.Expression):
            return ev(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float, complex)):
            return RatMap.constant(lit(node.value), exact)
        if isinstance(node, ast.Name):
            if node.id == "z":
                return z
            if node.id in ("i", "I", "j"):
                return RatMap.constant(QI(0, 1) if exact else 1j, exact)
            raise MapFormatError(f"unknown symbol {node.id!r}")
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            v = ev(node.operand)
            return -v if isinstance(node.op, ast.USub) else v
        if isinstance(node, ast.BinOp):
            if isinstance(node.op, ast.Pow):
                e = node.right
                neg = isinstance(e, ast.UnaryOp) and isinstance(e.op, ast.USub)
                e = e.operand if neg else e
                if not (isinstance(e, ast.Constant) and isinstance(e.value, int)):
                    raise MapFormatError("exponents must be integer literals")
                k = -e.value if neg else e.value
                return ev(node.left) ** k
            a, b = ev(node.left), ev(node.right)
            if isinstance(node.op, ast.Add):
                return a + b
            if isinstance(node.op, ast.Sub):
                return a - b
            if isinstance(node.op, ast.Mult):
                return a * b
            if isinstance(node.op, ast.Div):
                return a / b
        raise MapFormatError(f"unsupported syntax in {text!r}")

    try:
        return ev(tree)
    except ZeroDivisionError as exc:
        raise MapFormatError(str(exc)) from None


def float_exact_pair(f: RatMap):
    """``(exact_or_None, float)`` views of ``f`` (exact view only if snapping works)."""
    if f.exact:
        return f, f.to_float()
    try:
        return f.to_exact(), f
    except ValueError:
        return None, f


__all__ = [
    "SpherePoint", "RatMap", "evaluate", "compose", "iterate", "derivative",
    "mobius_conjugate", "maps_equal", "power_map", "chebyshev", "chebyshev_poly",
    "example_pair", "critical_points", "parse_map", "DEFAULT_DEGREE_BUDGET",
]
