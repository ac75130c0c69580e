"""Vectorized double-precision kernels on homogeneous coordinates.

A point of the sphere is a pair ``(z0, z1)`` with affine value ``z0/z1``.
Arrays of points are kept normalized so that ``max(|z0|, |z1|) == 1``; every
evaluation factors out the larger coordinate, which keeps Horner's scheme on
a ratio of modulus at most one.
"""
from __future__ import annotations

import numpy as np


def normalize(z0, z1):
    z0 = np.asarray(z0, dtype=complex)
    z1 = np.asarray(z1, dtype=complex)
    s = np.maximum(np.abs(z0), np.abs(z1))
    s = np.where(s == 0, 1.0, s)
    return z0 / s, z1 / s


def from_affine(z):
    """Homogeneous pairs for affine values; ``inf`` (or nan) entries become ``(1, 0)``."""
    z = np.asarray(z, dtype=complex)
    bad = ~np.isfinite(z)
    big = np.abs(np.where(bad, 0, z)) > 1
    zz = np.where(bad, 0, z)
    z0 = np.where(bad, 1.0, np.where(big, 1.0, zz))
    z1 = np.where(bad, 0.0, np.where(big, 1.0 / np.where(big, zz, 1), 1.0))
    return z0.astype(complex), z1.astype(complex)


def to_affine(z0, z1):
    z0 = np.asarray(z0, dtype=complex)
    z1 = np.asarray(z1, dtype=complex)
    inf = z1 == 0
    with np.errstate(divide="ignore", invalid="ignore"):
        out = z0 / np.where(inf, 1, z1)
    return np.where(inf, complex(np.inf, 0), out)


def chordal(a0, a1, b0, b1):
    """Chordal distance ``2|z-w| / sqrt((1+|z|^2)(1+|w|^2))`` in homogeneous form."""
    num = 2 * np.abs(a0 * b1 - a1 * b0)
    den = np.sqrt((np.abs(a0) ** 2 + np.abs(a1) ** 2) * (np.abs(b0) ** 2 + np.abs(b1) ** 2))
    return num / den


def chordal_affine(z, w):
    return chordal(*from_affine(z), *from_affine(w))


def to_sphere(z0, z1):
    """Embed into the unit sphere of R^3 so that Euclidean chord length equals ``chordal``."""
    n2 = np.abs(z0) ** 2 + np.abs(z1) ** 2
    zeta = z0 * np.conj(z1)
    x = 2 * zeta.real / n2
    y = 2 * zeta.imag / n2
    h = (np.abs(z0) ** 2 - np.abs(z1) ** 2) / n2
    return np.stack([x, y, h], axis=-1)


def _horner2(c, r):
    """Values of the polynomial with coefficients ``c`` (low to high) and its derivative at ``r``."""
    p = np.full(r.shape, c[-1], dtype=complex)
    dp = np.zeros(r.shape, dtype=complex)
    for a in c[-2::-1]:
        dp = dp * r + p
        p = p * r + a
    return p, dp


def hom_eval(c, z0, z1):
    """Homogenized polynomial ``sum c_i z0^i z1^(d-i)`` with ``d = len(c)-1``.

    Returns ``(value, d/dz0, d/dz1)``. Inputs should be normalized.
    """
    c = np.asarray(c, dtype=complex)
    d = len(c) - 1
    z0 = np.asarray(z0, dtype=complex)
    z1 = np.asarray(z1, dtype=complex)
    small = np.abs(z0) <= np.abs(z1)
    safe1 = np.where(small, z1, 1)
    safe0 = np.where(small, 1, z0)
    # branch A: factor z1, r = z0/z1
    r = np.where(small, z0 / safe1, 0)
    p, dp = _horner2(c, r)
    # branch B: factor z0, s = z1/z0, reversed coefficients
    s = np.where(small, 0, z1 / safe0)
    q, dq = _horner2(c[::-1], s)
    if d == 0:
        zeros = np.zeros(z0.shape, dtype=complex)
        return np.full(z0.shape, c[0], dtype=complex), zeros, zeros
    p1 = safe1 ** (d - 1)
    q1 = safe0 ** (d - 1)
    val = np.where(small, safe1 * p1 * p, safe0 * q1 * q)
    d0 = np.where(small, p1 * dp, q1 * (d * q - s * dq))
    d1 = np.where(small, p1 * (d * p - r * dp), q1 * dq)
    return val, d0, d1


class HomMap:
    """Float evaluator for a rational map given by padded coefficient arrays."""

    def __init__(self, num, den):
        num = np.asarray(num, dtype=complex)
        den = np.asarray(den, dtype=complex)
        n = max(len(num), len(den))
        self.num = np.concatenate([num, np.zeros(n - len(num), complex)])
        self.den = np.concatenate([den, np.zeros(n - len(den), complex)])
        self.degree = n - 1

    def __call__(self, z0, z1):
        a = hom_eval(self.num, z0, z1)[0]
        b = hom_eval(self.den, z0, z1)[0]
        return normalize(a, b)

    def with_jet(self, z0, z1, dz0, dz1):
        """Image of the points and of the tangent vectors ``(dz0, dz1)``, jointly rescaled."""
        a, a0, a1 = hom_eval(self.num, z0, z1)
        b, b0, b1 = hom_eval(self.den, z0, z1)
        da = a0 * dz0 + a1 * dz1
        db = b0 * dz0 + b1 * dz1
        s = np.maximum(np.abs(a), np.abs(b))
        s = np.where(s == 0, 1.0, s)
        return a / s, b / s, da / s, db / s

    def iterate(self, z0, z1, n: int):
        for _ in range(n):
            z0, z1 = self(z0, z1)
        return z0, z1

    def chart_derivative(self, z0, z1, out0=None, out1=None):
        """Derivative of ``f`` in local charts at the input and output points.

        The chart at a point is ``z`` if ``|z| <= 1`` and ``1/z`` otherwise;
        the output chart is taken from ``(out0, out1)`` when given, so that the
        charts of an orbit can be chosen once and reused (needed for cycle
        multipliers to telescope).
        """
        z0, z1 = normalize(z0, z1)
        inv_in = np.abs(z0) > np.abs(z1)
        # tangent of the chart map w -> z1*(w, 1) or z0*(1, w)
        t0 = np.where(inv_in, 0, z1).astype(complex)
        t1 = np.where(inv_in, z0, 0).astype(complex)
        a, b, da, db = self.with_jet(z0, z1, t0, t1)
        if out0 is None:
            inv_out = np.abs(a) > np.abs(b)
        else:
            o0, o1 = normalize(out0, out1)
            inv_out = np.abs(o0) > np.abs(o1)
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            direct = (da * b - a * db) / (b * b)
            inverted = (db * a - b * da) / (a * a)
        return np.where(inv_out, inverted, direct)
