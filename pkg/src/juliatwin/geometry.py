"""Geometric probes on sampled Julia sets: tangent cones, circle/arc detection, lamination."""
from __future__ import annotations

import numpy as np
from scipy.cluster.hierarchy import DisjointSet
from scipy.spatial import cKDTree

from . import kernels
from .funceq import DEFAULT_BUDGET, DEFAULT_MAX_K, DEFAULT_MAX_M, search_functional_equation
from .julia import DEFAULT_POINTS, PointCloud, same_julia_test
from .ratmap import RatMap

BIN_WIDTH = 2 * np.pi / 90
MIN_PERSIST = 3
CIRCLE_TOL = 1e-6
LAMINATION_TOL = 1e-3


def _as_cloud(cloud) -> PointCloud:
    if isinstance(cloud, PointCloud):
        return cloud
    return PointCloud.from_affine(np.asarray(cloud, dtype=complex))


def _circ_dist(a, b):
    return np.abs(np.angle(np.exp(1j * (a - b))))


def _local(cloud: PointCloud, z0: complex):
    """Offsets from the base point, in the chart ``1/z`` when the base point is infinity."""
    if np.isinf(z0):
        z = kernels.to_affine(cloud.z1, cloud.z0)
        return z[np.isfinite(z)]
    z = cloud.affine()
    return z[np.isfinite(z)] - z0


def _modes(theta, n_bins, frac):
    """Circular runs of heavy histogram bins; returns the mean angle of each run."""
    idx = np.floor((theta + np.pi) / (2 * np.pi) * n_bins).astype(int) % n_bins
    counts = np.bincount(idx, minlength=n_bins)
    heavy = counts >= max(1, frac * len(theta))
    if not heavy.any():
        return []
    if heavy.all():
        return [np.nan]
    # start scanning just after a light bin so runs do not wrap
    start = int(np.flatnonzero(~heavy)[0])
    runs, cur = [], []
    for j in range(1, n_bins + 1):
        b = (start + j) % n_bins
        if heavy[b]:
            cur.append(b)
        elif cur:
            runs.append(cur)
            cur = []
    if cur:
        runs.append(cur)
    out = []
    for run in runs:
        sel = np.isin(idx, run)
        out.append(float(np.angle(np.mean(np.exp(1j * theta[sel])))))
    return out


def tangent_cone_directions(cloud, z0, radii=None, bin_width: float = BIN_WIDTH,
                            min_persist: int = MIN_PERSIST, frac: float = 0.02,
                            near_tol: float = 1e-6, min_count: int = 10) -> dict:
    """Directions of half-lines in the tangent cone of the cloud at ``z0``.

    For each radius ``r`` of a decreasing ladder, the arguments of ``z - z0``
    over the annulus ``r/2 < |z - z0| <= r`` are histogrammed; runs of bins
    holding at least ``frac`` of the annulus are modes. Annuli with fewer
    than ``min_count`` points are skipped and listed. A direction is kept
    when it is matched (within two bins) on at least ``min_persist``
    consecutive rungs, counted from the finest populated one.
    """
    cloud = _as_cloud(cloud)
    z0 = complex(z0)
    zz0, zz1 = kernels.from_affine(np.array([z0]))
    gap = float(kernels.chordal(cloud.z0, cloud.z1, zz0[0], zz1[0]).min())
    if gap > near_tol:
        raise ValueError(f"base point is {gap:.3g} away from the cloud")
    local = _local(cloud, z0)
    r = np.abs(local)
    if radii is None:
        rmax = 0.5 * float(r.max())
        radii = rmax * 0.5 ** np.arange(10)
    radii = np.sort(np.asarray(radii, dtype=float))[::-1]
    if np.any(radii <= 0):
        raise ValueError("radii must be positive")
    n_bins = max(4, int(round(2 * np.pi / bin_width)))
    rungs, skipped = [], []
    for rad in radii:
        sel = (r > rad / 2) & (r <= rad)
        if sel.sum() < min_count:
            skipped.append(float(rad))
            rungs.append(None)
            continue
        rungs.append(_modes(np.angle(local[sel]), n_bins, frac))
    live = [i for i, m in enumerate(rungs) if m is not None]
    directions, persistence = [], []
    if live and not any(np.isnan(x) for x in rungs[live[-1]]):
        tol = 2 * 2 * np.pi / n_bins
        for d in rungs[live[-1]]:
            count, cur = 1, d
            for i in reversed(live[:-1]):
                cand = [x for x in rungs[i] if not np.isnan(x)]
                if not cand:
                    break
                best = min(cand, key=lambda x: _circ_dist(x, cur))
                if _circ_dist(best, cur) > tol:
                    break
                count, cur = count + 1, best
            if count >= min_persist:
                directions.append(float(d))
                persistence.append(count)
    order = np.argsort(directions)
    return {
        "directions": [directions[i] for i in order],
        "persistence": [persistence[i] for i in order],
        "count": len(directions),
        "radii": [float(x) for x in radii],
        "skipped_radii": skipped,
        "bin_width": 2 * np.pi / n_bins,
    }


def _fit_rows(cloud: PointCloud):
    n = np.sqrt(np.abs(cloud.z0) ** 2 + np.abs(cloud.z1) ** 2)
    a, b = cloud.z0 / n, cloud.z1 / n
    zeta = a * np.conj(b)
    return np.column_stack([np.abs(a) ** 2, 2 * zeta.real, 2 * zeta.imag, np.abs(b) ** 2])


def circle_fit(cloud) -> dict:
    """Least-squares generalized circle ``A|z|^2 + 2 Re(conj(B) z) + C = 0``.

    Works on sphere-normalized homogeneous points, so lines (``A = 0``) and
    points near infinity need no special case. The fit is done with the
    centroid of the finite points moved to 0, which makes the residual
    invariant under translations and rotations of the cloud; ``(A, B, C)``
    is the right singular vector of the smallest singular value mapped back
    to the original coordinate and rescaled to ``A^2+|B|^2+C^2 = 1``, with
    the largest component positive.
    """
    cloud = _as_cloud(cloud)
    if len(cloud) < 4:
        raise ValueError("circle fit needs at least 4 points")
    if np.ptp(cloud.sphere(), axis=0).max() < 1e-12:
        raise ValueError("degenerate cloud: all points coincide")
    z = cloud.affine()
    finite = np.isfinite(z)
    shift = complex(np.mean(z[finite])) if finite.any() else 0j
    moved = PointCloud(cloud.z0 - shift * cloud.z1, cloud.z1)
    m = _fit_rows(moved)
    _, _, vt = np.linalg.svd(m, full_matrices=False)
    v = vt[-1]
    rms = float(np.linalg.norm(m @ v) / np.sqrt(len(m)))
    # undo w = z - shift
    A, Bw, Cw = v[0], complex(v[1], v[2]), v[3]
    B = Bw - A * shift
    C = Cw + A * abs(shift) ** 2 - 2 * (np.conj(Bw) * shift).real
    out = np.array([A, B.real, B.imag, C])
    out /= np.linalg.norm(out)
    out *= np.sign(out[np.argmax(np.abs(out))])
    return {"A": float(out[0]), "B": complex(out[1], out[2]), "C": float(out[3]), "rms_residual": rms}


def _angular_parameter(cloud: PointCloud, fit: dict) -> np.ndarray:
    A, B, C = fit["A"], fit["B"], fit["C"]
    z = cloud.affine()
    if abs(A) > 1e-9 * max(abs(B), abs(C), 1e-300):
        center = -B / A
        finite = np.isfinite(z)
        return np.angle(z[finite] - center)
    # line 2 Re(conj(B) z) + C = 0 through infinity: z = base + s * i B/|B|
    direction = 1j * B / abs(B)
    base = -C * B / (2 * abs(B) ** 2)
    s = np.where(np.isfinite(z), ((np.where(np.isfinite(z), z, 0) - base) * np.conj(direction)).real, np.inf)
    return 2 * np.arctan(s)


def arc_or_circle_verdict(cloud, tol: float = CIRCLE_TOL, fit: dict | None = None) -> dict:
    """``full_circle``, ``arc`` or ``neither`` for a cloud.

    A cloud lies on a generalized circle when the fit residual is below
    ``tol``. It then covers the whole circle when no gap of its angular
    parameter exceeds twice the expected largest gap of ``n`` uniform points,
    ``2 pi H_n / n``; one such gap makes it an arc, more make it neither.
    """
    cloud = _as_cloud(cloud)
    fit = fit or circle_fit(cloud)
    out = {"fit": {"A": fit["A"], "B": [fit["B"].real, fit["B"].imag], "C": fit["C"],
                   "rms_residual": fit["rms_residual"]}}
    if fit["rms_residual"] >= tol:
        out["verdict"] = "neither"
        return out
    theta = np.sort(_angular_parameter(cloud, fit))
    n = len(theta)
    gaps = np.diff(np.concatenate([theta, [theta[0] + 2 * np.pi]]))
    harmonic = np.log(n) + 0.5772156649 + 0.5 / n
    threshold = 2 * (2 * np.pi / n) * harmonic
    big = int(np.sum(gaps > threshold))
    out.update({"largest_gap": float(gaps.max()), "gap_threshold": float(threshold), "big_gaps": big})
    out["verdict"] = "full_circle" if big == 0 else "arc" if big == 1 else "neither"
    return out


def _window_mask(z, center, window):
    kind = window[0]
    if kind == "annulus":
        r = np.abs(z - center)
        return (r > window[1]) & (r <= window[2])
    if kind == "disk":
        return np.abs(z - complex(window[1])) <= window[2]
    raise ValueError("window is ('annulus', r_in, r_out) or ('disk', point, radius)")


def _components(pts, link):
    ds = DisjointSet(range(len(pts)))
    for i, j in cKDTree(pts).query_pairs(link):
        ds.merge(i, j)
    return [np.array(sorted(s)) for s in ds.subsets()]


def lamination_probe(cloud, center, window, tol: float = LAMINATION_TOL, link: float | None = None,
                     degree: int = 3, min_points: int = 8) -> dict:
    """Is the cloud, inside a window avoiding ``center``, a union of disjoint smooth arcs?

    Points in the window are chained into clusters by single linkage at
    distance ``link`` (default: ten times the median nearest-neighbour
    spacing). Each cluster is rotated onto its principal axis and fitted by a
    polynomial graph of the given degree; the cloud counts as laminated when
    every relative fit residual (rms over cluster extent) is below ``tol``.
    A branching cluster is not a graph over any axis and fails the fit.
    """
    cloud = _as_cloud(cloud)
    z = cloud.affine()
    z = z[np.isfinite(z)]
    center = complex(center)
    z = z[_window_mask(z, center, window)]
    if len(z) < min_points:
        raise ValueError(f"only {len(z)} points in the window")
    pts = np.column_stack([z.real, z.imag])
    if link is None:
        nn = cKDTree(pts).query(pts, k=2)[0][:, 1]
        link = 10 * float(np.median(nn))
        if link <= 0:
            raise ValueError("duplicate points leave no linking scale; pass link explicitly")
    # thin to one point per cell of side link/4 so dense spots cannot make
    # the neighbour graph quadratic
    _, keep = np.unique(np.floor(pts / (link / 4)).astype(np.int64), axis=0, return_index=True)
    pts = pts[np.sort(keep)]
    clusters = [c for c in _components(pts, link) if len(c) >= min_points]
    rms_list = []
    for c in clusters:
        q = pts[c] - pts[c].mean(axis=0)
        _, _, vt = np.linalg.svd(q, full_matrices=False)
        s, t = q @ vt[0], q @ vt[1]
        extent = float(np.ptp(s)) or 1.0
        deg = min(degree, len(c) - 1)
        coef = np.polynomial.polynomial.polyfit(s / extent, t / extent, deg)
        resid = t / extent - np.polynomial.polynomial.polyval(s / extent, coef)
        rms_list.append(float(np.sqrt(np.mean(resid ** 2))))
    laminated = bool(clusters) and all(x < tol for x in rms_list)
    return {"laminated": laminated, "curve_count": len(clusters), "rms": rms_list, "link": link,
            "n_points": int(len(z))}


def classify_pair(f: RatMap, g: RatMap, n_points: int = DEFAULT_POINTS, seed: int = 0,
                  hausdorff_tol: float = 1e-3, circle_tol: float = CIRCLE_TOL,
                  max_m: int = DEFAULT_MAX_M, max_k: int = DEFAULT_MAX_K,
                  degree_budget: int = DEFAULT_BUDGET) -> dict:
    """Which alternative holds for a pair sharing a Julia set.

    Checks the shared Julia set first (cheap, decisive for the model
    families), then searches for a composition identity. A pair whose sampled
    Julia sets differ is reported as ``precondition_failed``.
    """
    same = same_julia_test(f, g, n_points, seed, hausdorff_tol, return_clouds=True)
    cloud_f, _ = same.pop("clouds")
    report = {"same_julia": same, "budgets": {"max_m": max_m, "max_k": max_k,
                                              "degree_budget": degree_budget}}
    if not same["verdict"]:
        report["verdict"] = "precondition_failed"
        return report
    shape = arc_or_circle_verdict(cloud_f, circle_tol)
    report["shape"] = shape
    if shape["verdict"] != "neither":
        report["verdict"] = "condition_1"
        report["condition_1"] = shape["verdict"]
        return report
    search = search_functional_equation(f, g, max_m, max_k, degree_budget)
    report["funceq"] = search.to_dict()
    if search.witness is not None:
        report["verdict"] = "condition_2"
        report["witness"] = search.witness.to_dict()
    else:
        report["verdict"] = "unresolved"
    return report
