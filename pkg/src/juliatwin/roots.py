"""Simultaneous polynomial root finding (Aberth-Ehrlich) and root clustering."""
from __future__ import annotations

from typing import Callable

import numpy as np
from scipy.cluster.hierarchy import DisjointSet
from scipy.spatial import cKDTree

from .kernels import to_sphere

_CHUNK = 512


def circle_start(n: int, radius: float = 1.0) -> np.ndarray:
    # off-axis angle offset and a slight spiral keep the start points asymmetric
    k = np.arange(n)
    ang = 2 * np.pi * k / n + 0.4 / max(n, 1) + 0.25
    rad = radius * (1 + 0.01 * k / max(n, 1))
    return rad * np.exp(1j * ang)


def _repulsion(z, idx):
    """``sum_{k != j} 1/(z_j - z_k)`` for ``j`` in ``idx``."""
    out = np.empty(len(idx), dtype=complex)
    for s in range(0, len(idx), _CHUNK):
        sel = idx[s:s + _CHUNK]
        diff = z[sel, None] - z[None, :]
        diff[np.arange(len(sel)), sel] = 1.0
        inv = 1.0 / diff
        inv[np.arange(len(sel)), sel] = 0.0
        out[s:s + _CHUNK] = inv.sum(axis=1)
    return out


def aberth(ratio: Callable[[np.ndarray], np.ndarray], n: int, start=None,
           maxiter: int = 800, tol: float = 1e-14):
    """Aberth-Ehrlich iteration for a degree-``n`` polynomial given only ``p/p'``.

    ``ratio`` maps an array of points to the Newton quotients ``p(z)/p'(z)``;
    it never needs the coefficients, so implicitly defined polynomials
    (iterates evaluated by recursion) are fine. Returns ``(roots, converged)``
    where ``converged`` is a boolean mask.
    """
    z = circle_start(n) if start is None else np.array(start, dtype=complex)
    active = np.ones(n, dtype=bool)
    rng = np.random.default_rng(12345)
    for _ in range(maxiter):
        idx = np.flatnonzero(active)
        if len(idx) == 0:
            break
        w = ratio(z[idx])
        s = _repulsion(z, idx)
        with np.errstate(all="ignore"):
            corr = w / (1 - w * s)
        bad = ~np.isfinite(corr)
        if bad.any():
            corr[bad] = 1e-3 * (rng.standard_normal(bad.sum()) + 1j * rng.standard_normal(bad.sum()))
        z[idx] -= corr
        done = (np.abs(corr) <= tol * np.maximum(1.0, np.abs(z[idx]))) & ~bad
        active[idx[done]] = False
    return z, ~active


def poly_ratio(coeffs) -> Callable[[np.ndarray], np.ndarray]:
    """Newton quotient for an explicit polynomial (coefficients low to high).

    Points outside the unit disk are evaluated through the reversed
    polynomial to keep Horner's scheme stable.
    """
    c = np.asarray(coeffs, dtype=complex)
    n = len(c) - 1
    rev = c[::-1]

    def horner(cc, x):
        p = np.full(x.shape, cc[-1], dtype=complex)
        dp = np.zeros(x.shape, dtype=complex)
        for a in cc[-2::-1]:
            dp = dp * x + p
            p = p * x + a
        return p, dp

    def ratio(z):
        z = np.asarray(z, dtype=complex)
        out = np.empty(z.shape, dtype=complex)
        inside = np.abs(z) <= 1
        if inside.any():
            p, dp = horner(c, z[inside])
            with np.errstate(all="ignore"):
                out[inside] = p / dp
        if (~inside).any():
            x = z[~inside]
            u = 1 / x
            q, dq = horner(rev, u)
            # p(z) = z^n q(u), p'/p = n/z - u^2 q'(u)/q(u)
            with np.errstate(all="ignore"):
                out[~inside] = 1 / (n * u - u * u * dq / q)
        return out

    return ratio


def polyroots(coeffs, polish: int = 3) -> np.ndarray:
    """All roots of an explicit polynomial; leading zeros are not allowed."""
    c = np.asarray(coeffs, dtype=complex)
    n = len(c) - 1
    if n < 1:
        return np.zeros(0, dtype=complex)
    if c[-1] == 0:
        raise ValueError("leading coefficient is zero")
    nz = np.flatnonzero(c)
    low = nz[0]
    zeros = np.zeros(low, dtype=complex)
    c = c[low:]
    n = len(c) - 1
    if n == 0:
        return zeros
    if n == 1:
        return np.concatenate([zeros, [-c[0] / c[1]]])
    radius = abs(c[0] / c[-1]) ** (1.0 / n)
    ratio = poly_ratio(c)
    z, _ = aberth(ratio, n, start=circle_start(n, radius))
    for _ in range(polish):
        step = ratio(z)
        z = np.where(np.isfinite(step), z - step, z)
    return np.concatenate([zeros, z])


def cluster_labels(z0, z1, tol: float) -> np.ndarray:
    """Single-linkage clusters of sphere points at chordal distance ``tol``.

    Labels are consecutive integers in order of first appearance.
    """
    pts = to_sphere(np.asarray(z0), np.asarray(z1))
    n = len(pts)
    ds = DisjointSet(range(n))
    if n > 1:
        for i, j in cKDTree(pts).query_pairs(tol):
            ds.merge(i, j)
    labels = np.empty(n, dtype=int)
    seen: dict[int, int] = {}
    for i in range(n):
        root = ds[i]
        labels[i] = seen.setdefault(root, len(seen))
    return labels
