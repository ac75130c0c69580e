"""Julia-set sampling by random backward orbits and set-level comparison."""
from __future__ import annotations

import hashlib
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import cKDTree
from scipy.spatial.distance import directed_hausdorff

from . import kernels
from .errors import RootFinderError
from .ratmap import RatMap, SpherePoint, critical_points

DEFAULT_POINTS = 20_000
DEFAULT_BURN_IN = 50
COVER_CELL = 2.5e-4
COVER_MAX = 300_000
CHAINS_PER_BLOCK = 8
MAX_RETRIES = 20


def fingerprint(f: RatMap) -> str:
    num, den = f.hom_coeffs()
    text = repr(([str(c) for c in num], [str(c) for c in den], f.mode))
    return hashlib.sha256(text.encode()).hexdigest()[:16]


@dataclass(frozen=True, eq=False)
class PointCloud:
    """Sample of a Julia set as normalized homogeneous pairs."""

    z0: np.ndarray
    z1: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.z0.setflags(write=False)
        self.z1.setflags(write=False)

    def __len__(self):
        return len(self.z0)

    @property
    def n_points(self) -> int:
        return len(self.z0)

    @property
    def points(self) -> list[SpherePoint]:
        return [SpherePoint(complex(a), complex(b)) for a, b in zip(self.z0, self.z1)]

    def affine(self) -> np.ndarray:
        """Affine values, ``inf`` for the point at infinity."""
        return kernels.to_affine(self.z0, self.z1)

    def sphere(self) -> np.ndarray:
        return kernels.to_sphere(self.z0, self.z1)

    @classmethod
    def from_affine(cls, z, meta=None) -> "PointCloud":
        z0, z1 = kernels.normalize(*kernels.from_affine(z))
        return cls(z0, z1, dict(meta or {}))


def _threads() -> int:
    try:
        return max(1, int(os.environ.get("JULIATWIN_THREADS", "1")))
    except ValueError:
        return 1


def _start_points(f: RatMap, seed: int) -> np.ndarray:
    """Repelling periodic points (period 1, else 2) to start chains from."""
    from .spectrum import periodic_points

    for n in (1, 2):
        recs = [r for r in periodic_points(f, n, seed=seed) if r.cls.repelling]
        if recs:
            pts = [p for r in recs for p in r.points]
            return np.array([[p.z0, p.z1] for p in pts], dtype=complex)
    raise RootFinderError("no repelling periodic point of period <= 2 to start from")


def preimages(f: RatMap, z0, z1):
    """All ``d`` preimages of each point: arrays of shape ``(len(z0), d)``."""
    num, den = f.hom.num, f.hom.den
    d = f.degree
    z0 = np.asarray(z0, dtype=complex)
    z1 = np.asarray(z1, dtype=complex)
    # preimages of (z0:z1) are the roots of z1*P(w) - z0*Q(w) (homogeneous in w)
    c = z1[:, None] * num[None, :] - z0[:, None] * den[None, :]
    lead, tail = np.abs(c[:, -1]), np.abs(c[:, 0])
    flip = tail > lead
    cc = np.where(flip[:, None], c[:, ::-1], c)
    scale = np.abs(cc).max(axis=1)
    ok = np.abs(cc[:, -1]) > 1e-13 * scale
    w0 = np.empty((len(z0), d), dtype=complex)
    w1 = np.empty((len(z0), d), dtype=complex)
    idx = np.flatnonzero(ok)
    if len(idx):
        mon = cc[idx, :-1] / cc[idx, -1:]
        comp = np.zeros((len(idx), d, d), dtype=complex)
        comp[:, 0, :] = -mon[:, ::-1]
        if d > 1:
            comp[:, np.arange(1, d), np.arange(d - 1)] = 1
        r = np.linalg.eigvals(comp)
        fl = flip[idx, None]
        a0, a1 = np.where(fl, 1, r), np.where(fl, r, 1)
        w0[idx], w1[idx] = kernels.normalize(a0, a1)
    for i in np.flatnonzero(~ok):
        w0[i], w1[i] = _preimages_slow(c[i], d)
    return w0, w1


def _preimages_slow(c, d):
    """Homogeneous roots when both ends of the equation nearly vanish."""
    scale = np.abs(c).max()
    if scale == 0:
        raise RootFinderError("map is degenerate at this point")
    nz = np.flatnonzero(np.abs(c) > 1e-13 * scale)
    lo, hi = nz[0], nz[-1]
    r = np.roots(c[lo:hi + 1][::-1]) if hi > lo else np.zeros(0, complex)
    a0 = np.concatenate([np.zeros(lo), r, np.ones(d - hi)])
    a1 = np.concatenate([np.ones(lo), np.ones(len(r)), np.zeros(d - hi)])
    return kernels.normalize(a0.astype(complex), a1.astype(complex))


def _polish(f: RatMap, w0, w1, t0, t1):
    """One guarded Newton step on ``f(w) = t`` in the chart of ``w``."""
    F = f.hom
    inv = np.abs(w0) > np.abs(w1)
    tw0 = np.where(inv, 0, w1).astype(complex)
    tw1 = np.where(inv, w0, 0).astype(complex)
    a, b, da, db = F.with_jet(w0, w1, tw0, tw1)
    g = a * t1 - b * t0
    dg = da * t1 - db * t0
    with np.errstate(all="ignore"):
        step = g / dg
    step = np.where(np.isfinite(step) & (np.abs(step) < 1e-3), step, 0)
    n0 = np.where(inv, w0, w0 - step * w1)
    n1 = np.where(inv, w1 - step * w0, w1)
    n0, n1 = kernels.normalize(n0, n1)
    old = kernels.chordal(*F(w0, w1), t0, t1)
    new = kernels.chordal(*F(n0, n1), t0, t1)
    better = new < old
    return np.where(better, n0, w0), np.where(better, n1, w1)


def _run_chains(f: RatMap, starts, sizes, steps: int, burn_in: int, seed: int, first_block: int):
    """Advance a group of blocks together; block ``b`` draws from its own ``(seed, b)`` stream."""
    rngs = [np.random.default_rng(np.random.SeedSequence([seed, first_block + i]))
            for i in range(len(sizes))]
    n = sum(sizes)
    d = f.degree
    pick = np.concatenate([r.integers(len(starts), size=k) for r, k in zip(rngs, sizes)])
    c0, c1 = kernels.normalize(starts[pick, 0], starts[pick, 1])
    out0 = np.empty((steps, n), dtype=complex)
    out1 = np.empty((steps, n), dtype=complex)
    rows = np.arange(n)
    for s in range(burn_in + steps):
        w0, w1 = preimages(f, c0, c1)
        bad = ~(np.isfinite(w0) & np.isfinite(w1)).all(axis=1)
        tries = 0
        while bad.any():
            tries += 1
            if tries > MAX_RETRIES:
                raise RootFinderError("preimage solve failed repeatedly")
            # nudge the target and solve again
            jit = 1e-12 * (rngs[0].standard_normal(bad.sum()) + 1j * rngs[0].standard_normal(bad.sum()))
            b0, b1 = kernels.normalize(c0[bad] + jit * c1[bad], c1[bad])
            w0[bad], w1[bad] = preimages(f, b0, b1)
            bad = ~(np.isfinite(w0) & np.isfinite(w1)).all(axis=1)
        branch = np.concatenate([r.integers(d, size=k) for r, k in zip(rngs, sizes)])
        p0, p1 = c0, c1
        c0, c1 = w0[rows, branch], w1[rows, branch]
        if s == burn_in:
            head0, head1 = p0, p1
        if s >= burn_in:
            out0[s - burn_in], out1[s - burn_in] = c0, c1
    # each point is a preimage of its predecessor in the chain; polish all at once
    t0 = np.vstack([head0[None, :], out0[:-1]])
    t1 = np.vstack([head1[None, :], out1[:-1]])
    q0, q1 = _polish(f, out0.ravel(), out1.ravel(), t0.ravel(), t1.ravel())
    # chain-major order: each chain's points are contiguous
    return q0.reshape(steps, n).T.ravel(), q1.reshape(steps, n).T.ravel()


def inverse_iteration_sample(f: RatMap, n_points: int = DEFAULT_POINTS, burn_in: int = DEFAULT_BURN_IN,
                             seed: int = 0, n_chains: int | None = None) -> PointCloud:
    """Sample ``J_f`` by random backward orbits.

    Each chain starts at a repelling periodic point, takes a uniformly chosen
    preimage at every step and keeps the points after ``burn_in`` steps.
    Chains run in blocks seeded by ``(seed, block)``, so the cloud does not
    depend on the number of worker threads.
    """
    if f.degree < 2:
        raise ValueError("Julia sampling needs deg f >= 2")
    if n_points < 1:
        raise ValueError("n_points must be positive")
    fp = fingerprint(f)
    f = f.to_float()
    if n_chains is None:
        n_chains = int(np.clip(n_points // 1500, 1, 256))
    n_chains = min(n_chains, n_points)
    steps = -(-n_points // n_chains)
    starts = _start_points(f, seed)
    sizes = [min(CHAINS_PER_BLOCK, n_chains - b) for b in range(0, n_chains, CHAINS_PER_BLOCK)]
    n_groups = min(_threads(), len(sizes))
    cuts = np.linspace(0, len(sizes), n_groups + 1).astype(int)
    groups = [(int(a), sizes[a:b]) for a, b in zip(cuts[:-1], cuts[1:])]
    work = lambda g: _run_chains(f, starts, g[1], steps, burn_in, seed, g[0])
    with ThreadPoolExecutor(max_workers=n_groups) as pool:
        parts = list(pool.map(work, groups))
    z0 = np.concatenate([p[0] for p in parts])[:n_points]
    z1 = np.concatenate([p[1] for p in parts])[:n_points]
    z0, z1 = kernels.normalize(z0, z1)
    meta = {"map": fp, "seed": seed, "n_points": int(n_points), "burn_in": burn_in,
            "n_chains": n_chains, "method": "inverse_iteration"}
    return PointCloud(z0, z1, meta)


def cloud_distance(cloud: PointCloud, z0, z1) -> np.ndarray:
    """Chordal distance from each query point to the nearest cloud point."""
    tree = cKDTree(cloud.sphere())
    return tree.query(kernels.to_sphere(np.asarray(z0, complex), np.asarray(z1, complex)))[0]


def _directed_hausdorff(pa: np.ndarray, pb: np.ndarray, near: float = 1e-2) -> float:
    # kd-tree queries are fast for close sets and slow for far ones; early-break
    # scanning is the opposite, so points beyond ``near`` go to the latter
    d = cKDTree(pb).query(pa, distance_upper_bound=near)[0]
    far = ~np.isfinite(d)
    out = float(d[~far].max()) if (~far).any() else 0.0
    if far.any():
        out = max(out, float(directed_hausdorff(pa[far], pb, seed=0)[0]))
    return out


def hausdorff_distance(a: PointCloud, b: PointCloud) -> float:
    """Symmetric Hausdorff distance in the chordal metric.

    Points are embedded in the unit sphere of R^3 where the Euclidean chord
    equals the chordal distance, so nearest-neighbour distances are exact.
    """
    if len(a) == 0 or len(b) == 0:
        raise ValueError("Hausdorff distance of an empty cloud")
    pa, pb = a.sphere(), b.sphere()
    return max(_directed_hausdorff(pa, pb), _directed_hausdorff(pb, pa))


def forward_invariance(f: RatMap, cloud: PointCloud, tol: float = 1e-5) -> float:
    """Fraction of cloud points whose image lies within ``tol`` of the cloud."""
    g = f.to_float() if f.exact else f
    y0, y1 = g.hom(cloud.z0, cloud.z1)
    return float(np.mean(cloud_distance(cloud, y0, y1) < tol))


def merge_clouds(*clouds: PointCloud, meta=None) -> PointCloud:
    z0 = np.concatenate([c.z0 for c in clouds])
    z1 = np.concatenate([c.z1 for c in clouds])
    return PointCloud(z0, z1, dict(meta or {}))


def comparison_cloud(f: RatMap, n_points: int = DEFAULT_POINTS, seed: int = 0,
                     cell: float = COVER_CELL, max_points: int = COVER_MAX) -> PointCloud:
    """Random backward-orbit sample merged with a grid cover.

    The grid cover gives uniform resolution on sparse parts of ``J``; the
    random sample fills the square-root gaps the cover leaves next to
    critical values.
    """
    a = inverse_iteration_sample(f, n_points, seed=seed)
    b = grid_cover_sample(f, cell, max_points, seed=seed)
    meta = {"map": a.meta["map"], "seed": seed, "n_points": len(a) + len(b), "burn_in": DEFAULT_BURN_IN,
            "method": "inverse_iteration+grid_cover", "cell": cell,
            "truncated": b.meta["truncated"]}
    return merge_clouds(a, b, meta=meta)


def same_julia_test(f: RatMap, g: RatMap, n_points: int = DEFAULT_POINTS, seed: int = 0,
                    tol: float = 1e-3, cell: float = COVER_CELL, max_points: int = COVER_MAX,
                    return_clouds: bool = False) -> dict:
    """Compare sampled Julia sets of ``f`` and ``g`` in the Hausdorff chordal distance."""
    if f.degree < 2 or g.degree < 2:
        raise ValueError("same-Julia test needs deg f, deg g >= 2")
    a = comparison_cloud(f, n_points, seed, cell, max_points)
    b = comparison_cloud(g, n_points, seed, cell, max_points)
    dist = hausdorff_distance(a, b)
    out = {"verdict": bool(dist < tol), "distance": dist, "tol": tol,
           "n_points": [len(a), len(b)], "truncated": bool(a.meta["truncated"] or b.meta["truncated"])}
    if return_clouds:
        out["clouds"] = (a, b)
    return out


class _CellGrid:
    """Sphere cells of side ``cell``, refined dyadically towards the postcritical set.

    Preimages of points near a critical value spread out like a square root,
    so a uniform grid leaves gaps next to critical points, and the parents of
    points near a critical value sit near its forward images. Within ``rho``
    of the first ``depth`` images of each critical point the side is halved
    each time the distance halves, down to ``max_level`` halvings; those cells
    are indexed relative to the anchor point so the integers stay small.
    """

    def __init__(self, f: RatMap, cell: float, rho: float = 0.05, max_level: int = 24,
                 depth: int = 4):
        self.cell, self.rho, self.max_level = cell, rho, max_level
        anchors = []
        for c, _ in critical_points(f):
            c0, c1 = np.array([complex(c.z0)]), np.array([complex(c.z1)])
            for _ in range(depth):
                c0, c1 = f.hom(c0, c1)
                anchors.append(kernels.to_sphere(c0, c1)[0])
        anchors = np.array(anchors).reshape(-1, 3)
        keep = []
        for a in anchors:
            if all(np.linalg.norm(a - b) > 1e-9 for b in keep):
                keep.append(a)
        self.values = np.array(keep).reshape(-1, 3)

    def keys(self, z0, z1) -> np.ndarray:
        p = kernels.to_sphere(z0, z1)
        n = len(p)
        rows = np.zeros((n, 5), dtype=np.int64)
        rows[:, 2:] = np.floor((p + 1) / self.cell)
        if len(self.values):
            delta = p[:, None, :] - self.values[None, :, :]
            dist = np.linalg.norm(delta, axis=2)
            which = dist.argmin(axis=1)
            dmin = dist[np.arange(n), which]
            near = dmin < self.rho
            if near.any():
                with np.errstate(divide="ignore"):
                    lev = 1 + np.floor(np.log2(self.rho / dmin[near]))
                lev = np.minimum(lev, self.max_level).astype(np.int64)
                side = self.cell / 2.0 ** lev
                local = delta[near, which[near]] / side[:, None]
                rows[near, 0] = lev
                rows[near, 1] = which[near]
                rows[near, 2:] = np.floor(local)
        return np.ascontiguousarray(rows).view(np.dtype((np.void, 40))).ravel()


def grid_cover_sample(f: RatMap, cell: float = COVER_CELL, max_points: int = COVER_MAX,
                      seed: int = 0, n_seeds: int = 2000) -> PointCloud:
    """Cover ``J_f`` to a fixed spatial resolution.

    Starting from a short random backward-orbit sample, the preimage tree is
    walked breadth first and a preimage is kept only if it falls in a sphere
    cell (side ``cell``) not yet occupied. Unlike a single random orbit this
    does not follow the balanced measure, so sparse parts of a fractal Julia
    set get the same resolution as dense ones. Near the first few forward
    images of the critical points, where preimages pile up in a tiny
    neighbourhood, cells are refined dyadically so those spots are not
    represented by a single point.
    """
    if cell <= 0:
        raise ValueError("cell must be positive")
    base = inverse_iteration_sample(f, n_seeds, seed=seed)
    g = f.to_float()
    grid = _CellGrid(g, cell)
    keys, first = np.unique(grid.keys(base.z0, base.z1), return_index=True)
    seen = set(keys.tolist())
    f0, f1 = base.z0[np.sort(first)], base.z1[np.sort(first)]
    # every seed is kept, not just one per cell, so each seed's forward image
    # (its predecessor on the seeding orbit) stays in the cover
    parts0, parts1 = [base.z0], [base.z1]
    total = len(base)
    truncated = False
    while len(f0) and not truncated:
        w0, w1 = preimages(g, f0, f1)
        w0, w1 = w0.ravel(), w1.ravel()
        k = grid.keys(w0, w1)
        fresh = np.fromiter((x not in seen for x in k.tolist()), dtype=bool, count=len(k))
        k, w0, w1 = k[fresh], w0[fresh], w1[fresh]
        k, first = np.unique(k, return_index=True)
        order = np.sort(first)
        f0, f1 = w0[order], w1[order]
        if total + len(f0) > max_points:
            f0, f1 = f0[:max_points - total], f1[:max_points - total]
            truncated = True
        seen.update(k.tolist())
        parts0.append(f0)
        parts1.append(f1)
        total += len(f0)
    z0, z1 = kernels.normalize(np.concatenate(parts0), np.concatenate(parts1))
    meta = {"map": fingerprint(f), "seed": seed, "n_points": int(len(z0)), "burn_in": DEFAULT_BURN_IN,
            "method": "grid_cover", "cell": cell, "truncated": truncated}
    return PointCloud(z0, z1, meta)
