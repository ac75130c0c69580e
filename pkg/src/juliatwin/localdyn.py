"""Local dynamics at a fixed point: linearizers, parabolic normal form, petals, Fatou coordinates.

Series are kept as coefficient lists ``c[0..N]`` around a fixed point moved
to the origin. They are exact (``QI``) when the map and the fixed point are
exact, otherwise complex doubles.
"""
from __future__ import annotations

import cmath
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import NotParabolicError
from .poly import Poly
from .ratmap import RatMap, SpherePoint, mobius_conjugate
from .scalars import QI

DEFAULT_ORDER = 24
ORDER_CAP = 64
PARABOLIC_TOL = 1e-10
MAX_PULL = 200


@dataclass(frozen=True)
class PowerSeries:
    """Truncated series ``sum c_n t^n`` in the local coordinate of ``center``."""

    coeffs: tuple
    center: SpherePoint | None = None
    exact: bool = False

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    def __getitem__(self, n):
        return self.coeffs[n]

    def to_float(self) -> np.ndarray:
        return np.array([complex(c) for c in self.coeffs], dtype=complex)

    def __call__(self, t):
        c = self.to_float()
        t = np.asarray(t, dtype=complex)
        acc = np.full(t.shape, c[-1], dtype=complex)
        for a in c[-2::-1]:
            acc = acc * t + a
        return acc

    def radius(self) -> float:
        """Convergence radius guessed from the decay of the upper half of the coefficients."""
        c = np.abs(self.to_float())
        n = np.arange(len(c))
        sel = (n >= max(2, len(c) // 2)) & (c > 0)
        if not sel.any():
            return np.inf
        return float(np.min(c[sel] ** (-1.0 / n[sel])))


@dataclass(frozen=True)
class ParabolicData:
    p: int
    alpha: complex | QI
    normalized: bool = False
    fixed_point: SpherePoint | None = None
    residual_order: int | None = None

    def __post_init__(self):
        if self.p < 1:
            raise ValueError("p must be >= 1")
        if not self.alpha:
            raise ValueError("alpha must be nonzero")

    def to_dict(self) -> dict:
        a = complex(self.alpha)
        return {"p": self.p, "alpha": [a.real, a.imag], "normalized": self.normalized,
                "residual_order": self.residual_order}


@dataclass(frozen=True)
class PetalSpec:
    """``kind="attracting"`` is the petal Pi_k(a), ``"repelling"`` is Pi'_k(a)."""

    p: int
    a: float
    k: int
    kind: str = "attracting"

    def __post_init__(self):
        if self.a <= 0:
            raise ValueError("petal parameter a must be positive")
        if not 0 <= self.k < self.p:
            raise ValueError("petal index must satisfy 0 <= k < p")
        if self.kind not in ("attracting", "repelling"):
            raise ValueError("kind is 'attracting' or 'repelling'")

    @property
    def axis(self) -> float:
        shift = 0 if self.kind == "attracting" else 1
        return (2 * self.k + shift) * np.pi / self.p


# truncated series arithmetic on coefficient lists

def _zero(exact):
    return QI(0) if exact else 0j


def _mul(a, b, n, exact):
    out = [_zero(exact)] * (n + 1)
    for i, x in enumerate(a[:n + 1]):
        if not x:
            continue
        for j, y in enumerate(b[:n + 1 - i]):
            out[i + j] = out[i + j] + x * y
    return out


def series_compose(a: PowerSeries, b: PowerSeries) -> PowerSeries:
    """``a(b(t))`` truncated at the smaller order; ``b`` must vanish at 0."""
    if b.coeffs[0]:
        raise ValueError("inner series must have zero constant term")
    exact = a.exact and b.exact
    n = min(a.order, b.order)
    conv = (lambda x: QI.coerce(x)) if exact else complex
    ac = [conv(x) for x in a.coeffs[:n + 1]]
    bc = [conv(x) for x in b.coeffs[:n + 1]]
    acc = [ac[-1]] + [_zero(exact)] * n
    for c in reversed(ac[:-1]):
        acc = _mul(acc, bc, n, exact)
        acc[0] = acc[0] + c
    return PowerSeries(tuple(acc), b.center, exact)


def series_reverse(a: PowerSeries) -> PowerSeries:
    """Compositional inverse of a series with ``a0 = 0``, ``a1 != 0``."""
    if a.coeffs[0] or not a.coeffs[1]:
        raise ValueError("series must have a0 = 0 and a1 != 0")
    exact, n = a.exact, a.order
    one = QI(1) if exact else 1 + 0j
    inv1 = one / a.coeffs[1]
    b = [_zero(exact), inv1] + [_zero(exact)] * (n - 1)
    for m in range(2, n + 1):
        comp = series_compose(PowerSeries(a.coeffs[:m + 1], exact=exact),
                              PowerSeries(tuple(b[:m + 1]), exact=exact))
        b[m] = -comp.coeffs[m] * inv1
    return PowerSeries(tuple(b), a.center, exact)


def _localize(f: RatMap, point):
    """Conjugate ``f`` so the given point sits at 0; returns ``(map, SpherePoint)``."""
    if not isinstance(point, SpherePoint):
        point = SpherePoint.of(point, exact=f.exact and _exact_value(point))
    if f.exact and not point.exact:
        f = f.to_float()
    exact = f.exact
    z = RatMap.identity(exact)
    if point.is_infinite:
        sigma = RatMap(Poly.const(1, exact), Poly.identity(exact), check=False)
    else:
        v = point.value if exact else complex(point.value)
        sigma = z - RatMap.constant(v, exact)
    return mobius_conjugate(f, sigma), point


def _exact_value(x) -> bool:
    return isinstance(x, (int, Fraction, QI))


def taylor_series(f: RatMap, fixed_point, order: int = DEFAULT_ORDER) -> PowerSeries:
    """Taylor coefficients of ``f`` at a fixed point, in the coordinate centred there."""
    g, pt = _localize(f, fixed_point)
    exact = g.exact
    num = g.num.padded(order + 1)
    den = g.den.padded(order + 1)
    if not den[0]:
        raise ValueError("point is a pole of the localized map")
    one = QI(1) if exact else 1 + 0j
    inv = one / den[0]
    c = []
    for n in range(order + 1):
        acc = num[n]
        for j in range(1, n + 1):
            acc = acc - den[j] * c[n - j]
        c.append(acc * inv)
    fixed_err = c[0] if exact else abs(c[0]) > 1e-8
    if fixed_err:
        raise ValueError(f"{pt} is not a fixed point")
    c[0] = _zero(exact)
    return PowerSeries(tuple(c), pt, exact)


def local_map(f: RatMap, fixed_point) -> RatMap:
    """``f`` in the coordinate centred at the fixed point (``1/z`` at infinity)."""
    return _localize(f, fixed_point)[0]


def koenigs_series(f: RatMap, fixed_point, order: int = DEFAULT_ORDER) -> PowerSeries:
    """Linearizer ``phi`` with ``phi(0) = 0``, ``phi'(0) = 1`` and ``phi(lam t) = f(phi(t))``.

    Matching coefficients of ``t^n`` gives ``c_n (lam^n - lam) = [t^n] sum_{j>=2} a_j phi^j``,
    whose right side only involves ``c_1..c_{n-1}``. Powers of ``phi`` are
    tabulated so the whole solve is cubic in the order.
    """
    a = taylor_series(f, fixed_point, order)
    exact = a.exact
    lam = a.coeffs[1]
    if exact:
        bad = (not lam) or lam.abs2() == 1
    else:
        bad = abs(lam) < 1e-14 or abs(abs(lam) - 1) < 1e-12
    if bad:
        raise ValueError("Koenigs linearization needs 0 < |lambda| != 1")
    one = QI(1) if exact else 1 + 0j
    zero = _zero(exact)
    c = [zero, one] + [zero] * (order - 1)
    # pw[j][m] = [t^m] phi^j
    pw = [[zero] * (order + 1) for _ in range(order + 1)]
    pw[1] = c
    lam_n = lam
    for n in range(2, order + 1):
        lam_n = lam_n * lam
        s = zero
        for j in range(2, n + 1):
            acc = zero
            prev = pw[j - 1]
            for i in range(1, n - j + 2):
                if c[i] and prev[n - i]:
                    acc = acc + c[i] * prev[n - i]
            pw[j][n] = acc
            if a.coeffs[j]:
                s = s + a.coeffs[j] * acc
        c[n] = s / (lam_n - lam)
    return PowerSeries(tuple(c), a.center, exact)


def _local_eval(g: RatMap, s):
    return g.to_float()(np.asarray(s, dtype=complex))


def koenigs_residual(f: RatMap, phi: PowerSeries, r0: float, n_samples: int = 256) -> float:
    """``max |phi(lam t) - f(phi(t))|`` on ``|t| = r0`` (the disk maximum, by the maximum principle)."""
    g = local_map(f, phi.center)
    lam = complex(taylor_series(f, phi.center, 1).coeffs[1])
    t = r0 * np.exp(2j * np.pi * np.arange(n_samples) / n_samples)
    return float(np.max(np.abs(phi(lam * t) - _local_eval(g, phi(t)))))


def koenigs_extend(f: RatMap, phi: PowerSeries, z, depth: int | None = None,
                   max_iter: int = MAX_PULL, trust: float | None = None):
    """Evaluate ``phi`` beyond its disk by ``phi(z) = f^n(phi(z / lam^n))``.

    Values are in the local coordinate of the fixed point. ``depth`` forces
    ``n`` (it must still pull ``z`` into the trusted disk); by default the
    smallest sufficient ``n`` is used.
    """
    g = local_map(f, phi.center).to_float()
    lam = complex(taylor_series(f, phi.center, 1).coeffs[1])
    if abs(lam) <= 1:
        raise ValueError("extension needs a repelling fixed point (|lambda| > 1)")
    if trust is None:
        trust = min(0.5 * phi.radius(), 1.0)
    z = np.asarray(z, dtype=complex)
    need = np.ceil(np.log(np.maximum(np.abs(z), 1e-300) / trust) / np.log(abs(lam)))
    need = int(max(0, np.max(need)))
    n = need if depth is None else depth
    if n < need:
        raise ValueError(f"depth {n} does not reach the trusted disk (needs {need})")
    if n > max_iter:
        raise ValueError(f"pull-in depth {n} exceeds the cap {max_iter}")
    s = phi(z / lam ** n)
    for _ in range(n):
        s = g(s)
    return s


def parabolic_data(f, fixed_point=None, order_cap: int = ORDER_CAP,
                   tol: float = PARABOLIC_TOL) -> ParabolicData:
    """``p`` and ``alpha`` in ``f(z) = z + alpha z^(p+1) + ...`` at a multiplier-one fixed point.

    ``f`` is a ``RatMap`` (with ``fixed_point``) or a ``PowerSeries`` at 0.
    """
    series = f if isinstance(f, PowerSeries) else taylor_series(f, fixed_point, order_cap)
    c = series.coeffs
    exact = series.exact
    one_off = (c[1] - 1) if exact else abs(c[1] - 1) > tol
    if one_off:
        raise NotParabolicError(f"multiplier {complex(c[1])} is not 1")
    for j in range(2, len(c)):
        nonzero = bool(c[j]) if exact else abs(c[j]) > tol
        if nonzero:
            return ParabolicData(j - 1, c[j], False, series.center)
    raise NotParabolicError(f"all coefficients vanish up to order {series.order}; f may be the identity")


def normalize_alpha(f: RatMap, data: ParabolicData, order_cap: int = ORDER_CAP,
                    tol: float = PARABOLIC_TOL) -> tuple[RatMap, ParabolicData]:
    """Rescale ``t -> kappa t`` with ``kappa = (-alpha)^(1/p)`` (principal root) so that ``alpha = -1``.

    Returns the map in the new coordinate (fixed point at 0) and its data,
    whose ``residual_order`` is the first order past ``p+1`` with a nonzero
    coefficient; no further normalization is attempted.
    """
    g = local_map(f, data.fixed_point) if data.fixed_point is not None else f
    p, alpha = data.p, data.alpha
    if g.exact and isinstance(alpha, QI) and (p == 1 or -alpha == 1):
        kappa = -alpha
    else:
        g = g.to_float()
        kappa = complex(-complex(alpha)) ** (1.0 / p)
    exact = g.exact
    sigma = RatMap(Poly((0, kappa), exact), check=False)
    h = mobius_conjugate(g, sigma)
    series = taylor_series(h, 0 if exact else 0j, order_cap)
    c = series.coeffs
    residual = None
    for j in range(p + 2, len(c)):
        if (bool(c[j]) if exact else abs(c[j]) > tol):
            residual = j
            break
    return h, ParabolicData(p, c[p + 1], True, SpherePoint.of(0, exact), residual)


def _window_angle(theta, axis, p):
    # representative of theta closest to the petal axis
    return theta + 2 * np.pi * np.round((axis - theta) / (2 * np.pi))


def petal_contains(spec: PetalSpec, t) -> np.ndarray | bool:
    """Polar test ``0 < r^p < a(1 +- cos p theta)`` with ``|theta - axis| < pi/p``."""
    t = np.asarray(t, dtype=complex)
    r = np.abs(t)
    theta = _window_angle(np.angle(t), spec.axis, spec.p)
    sign = 1 if spec.kind == "attracting" else -1
    inside = (np.abs(theta - spec.axis) < np.pi / spec.p) & (r > 0)
    inside &= r ** spec.p < spec.a * (1 + sign * np.cos(spec.p * theta))
    return bool(inside) if inside.ndim == 0 else inside


def petal_sample(spec: PetalSpec, n: int, rng: np.random.Generator) -> np.ndarray:
    """Random points of the petal: angle uniform in the window, ``r^p`` uniform under the bound."""
    p = spec.p
    sign = 1 if spec.kind == "attracting" else -1
    theta = spec.axis + (np.pi / p) * rng.uniform(-1, 1, n)
    bound = spec.a * (1 + sign * np.cos(p * theta))
    r = (rng.uniform(0, 1, n) * bound) ** (1.0 / p)
    t = r * np.exp(1j * theta)
    return t[petal_contains(spec, t)]


def phi_chart(t, p: int):
    """``Phi(t) = t^-p``."""
    t = np.asarray(t, dtype=complex)
    if np.any(t == 0):
        raise ValueError("Phi is undefined at 0")
    return t ** (-p)


def psi_branch(k: int, w, p: int):
    """Inverse branch of ``Phi`` onto the sector ``|arg t - 2 pi k/p| < pi/p``.

    With ``w = r e^{i phi}``, ``phi`` in ``(-pi, pi)``, the branch is
    ``r^{-1/p} e^{-i phi/p} e^{2 pi i k/p}``. Points on the slit ``arg w = pi``
    are rejected.
    """
    w = np.asarray(w, dtype=complex)
    if np.any((w.imag == 0) & (w.real <= 0)):
        raise ValueError("w lies on the slit (arg w = pi) or at 0")
    return np.exp(-np.log(w) / p) * cmath.exp(2j * np.pi * k / p)


def chart_map(f: RatMap, k: int, w, p: int):
    """``v(w) = Phi(f(Psi_k(w)))``, close to ``w + p`` for large ``Re w``."""
    g = f if not f.exact else f.to_float()
    return phi_chart(g(psi_branch(k, w, p)), p)


@dataclass
class FatouValue:
    value: np.ndarray
    error: np.ndarray
    n_iter: int = field(default=0)


def chart_residue(f: RatMap, p: int) -> complex:
    """Coefficient ``b`` in ``v(w) = w + p + b/w + ...`` for normalized ``f``.

    With ``f(t) = t - t^(p+1) + c t^(2p+1) + ...`` and no terms strictly
    between, expanding ``f(t)^-p`` gives ``b = p(p+1)/2 - p c``.
    """
    c = complex(taylor_series(f, SpherePoint.of(0, f.exact), 2 * p + 1).coeffs[2 * p + 1])
    return p * (p + 1) / 2 - p * c


def fatou_coordinate(f: RatMap, k: int, w, n_iter: int, p: int | None = None) -> FatouValue:
    """Abel coordinate ``u(w) ~ v^n(w) - n p - (b/p) log v^n(w)`` with ``v = Phi o f o Psi_k``.

    ``f`` must be in normalized form at 0 (``f(t) = t - t^(p+1) + ...``).
    The ``1/w`` term of ``v`` makes the bare sum ``v^n(w) - n p`` drift like
    ``log n``; subtracting the logarithm with the residue ``b`` of
    ``chart_residue`` removes the drift, so the limit exists and the
    conjugacy defect falls from ``O(1/n)`` to ``O(1/n^2)``. The error
    estimate is that defect, ``u(v(w)) - u(w) - p``, read off the last step.
    """
    if p is None:
        p = parabolic_data(f, 0).p
    beta = chart_residue(f, p) / p
    g = f.to_float()
    w = np.array(w, dtype=complex)
    prev = w
    for _ in range(n_iter):
        prev = w
        w = chart_map(g, k, w, p)
        if not np.all(np.isfinite(w)) or np.any((w.imag == 0) & (w.real <= 0)):
            raise ValueError("orbit left the chart domain")
    u = w - n_iter * p - beta * np.log(w)
    if n_iter:
        err = np.abs(w - prev - p - beta * (np.log(w) - np.log(prev)))
    else:
        err = np.full(w.shape, np.inf)
    return FatouValue(u, err, n_iter)


def auto_petal_a(f: RatMap, p: int, n_samples: int = 1000, seed: int = 0,
                 a_max: float = 0.25, min_exp: int = 30) -> float:
    """Largest dyadic ``a <= a_max`` whose attracting petals are forward invariant on samples."""
    g = f.to_float()
    for e in range(int(np.ceil(-np.log2(a_max))), min_exp + 1):
        a = 2.0 ** -e
        rng = np.random.default_rng(seed)
        ok = True
        for k in range(p):
            spec = PetalSpec(p, a, k)
            t = petal_sample(spec, n_samples, rng)
            if not np.all(petal_contains(spec, g(t))):
                ok = False
                break
        if ok:
            return a
    raise ValueError("no petal parameter passed the invariance test")
