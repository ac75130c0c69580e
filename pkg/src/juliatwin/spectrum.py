"""Periodic points, multipliers and their classification."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
from scipy.spatial import cKDTree

from . import kernels
from .errors import DegreeBudgetError, RootFinderError
from .ratmap import RatMap, SpherePoint, critical_points
from .roots import aberth, cluster_labels

ROOT_BUDGET = 4097
CLUSTER_TOL = 1e-6
PARABOLIC_CLUSTER_TOL = 1e-3
GROUP_TOL = 1e-7
RESIDUAL_TOL = 1e-8
CLASS_TOL = 1e-6
Q_MAX = 64


class MultiplierClass(NamedTuple):
    kind: str
    q: int | None = None

    def __str__(self):
        return f"{self.kind}({self.q})" if self.q is not None else self.kind

    @property
    def repelling(self) -> bool:
        return self.kind == "repelling"


def classify_multiplier(lam: complex, q_max: int = Q_MAX, tol: float = CLASS_TOL) -> MultiplierClass:
    """Superattracting / attracting / repelling / (ir)rationally indifferent."""
    if q_max < 1:
        raise ValueError("q_max must be >= 1")
    lam = complex(lam)
    r = abs(lam)
    if r <= tol:
        return MultiplierClass("superattracting")
    if r < 1 - tol:
        return MultiplierClass("attracting")
    if r > 1 + tol:
        return MultiplierClass("repelling")
    power = 1 + 0j
    for q in range(1, q_max + 1):
        power *= lam
        if abs(power - 1) < tol:
            return MultiplierClass("rationally_indifferent", q)
    return MultiplierClass("irrationally_indifferent")


@dataclass(frozen=True)
class OrbitRecord:
    period: int
    points: tuple[SpherePoint, ...]
    multiplier: complex
    cls: MultiplierClass
    residual: float
    multiplicity: int = 1
    flagged: bool = field(default=False)

    def to_dict(self) -> dict:
        return {
            "period": self.period,
            "points": [_point_json(p) for p in self.points],
            "multiplier": [self.multiplier.real, self.multiplier.imag],
            "class": str(self.cls),
            "residual": self.residual,
            "multiplicity": self.multiplicity,
            "flagged": self.flagged,
        }


def _point_json(p: SpherePoint):
    if p.is_infinite:
        return "inf"
    v = complex(p.value)
    return [v.real, v.imag]


def _key(z0, z1):
    if abs(z1) < 1e-300:
        return (1, 0.0, 0.0)
    v = z0 / z1
    return (0, round(v.real, 9), round(v.imag, 9))


def cycle_multiplier(f: RatMap, z0, z1) -> complex:
    """Product of chart derivatives of ``f`` around the cycle ``(z0[i], z1[i])``.

    Each point's chart is fixed once, so the product is chart independent.
    """
    z0 = np.atleast_1d(np.asarray(z0, dtype=complex))
    z1 = np.atleast_1d(np.asarray(z1, dtype=complex))
    nxt0, nxt1 = np.roll(z0, -1), np.roll(z1, -1)
    factors = f.hom.chart_derivative(z0, z1, nxt0, nxt1)
    return complex(np.prod(factors))


def _rotation(f: RatMap, n: int, seed: int):
    """Unitary Möbius change of coordinates whose pole is not a fixed point of ``f^n``."""
    rng = np.random.default_rng(seed)
    a = 0.31 + 0.47j
    for _ in range(64):
        w0, w1 = kernels.normalize(np.array([1.0 + 0j]), np.array([-np.conj(a)]))
        y0, y1 = f.hom.iterate(w0, w1, n)
        if kernels.chordal(y0, y1, w0, w1)[0] > 1e-3:
            return a
        a = complex(rng.uniform(-1, 1), rng.uniform(-1, 1))
    raise RootFinderError("could not find a rotation avoiding the periodic points")


def periodic_points(f: RatMap, n: int, budget: int = ROOT_BUDGET, seed: int = 0,
                    q_max: int = Q_MAX, class_tol: float = CLASS_TOL) -> list[OrbitRecord]:
    """All orbits whose period divides ``n``, with multiplicities.

    The fixed-point equation of ``f^n`` is solved in a rotated coordinate
    ``zeta = (z - a)/(conj(a) z + 1)`` chosen so that none of the ``d^n + 1``
    solutions sits at ``zeta = ∞``. The polynomial is never expanded: the
    Newton quotient is evaluated by iterating ``f`` homogeneously together
    with its tangent vector, which stays well conditioned at any degree.
    """
    d = f.degree
    if d < 2:
        raise ValueError("periodic points need deg f >= 2")
    if n < 1:
        raise ValueError("period must be a positive integer")
    D = d ** n + 1
    if D > budget:
        raise DegreeBudgetError(f"{D} fixed points of f^{n} exceed the root budget {budget}")
    F = f.hom
    a = _rotation(f, n, seed)
    ac = np.conj(a)

    def solve_eq(zeta):
        x0, x1 = zeta + a, -ac * zeta + 1
        dx0 = np.ones_like(zeta)
        dx1 = np.full_like(zeta, -ac)
        s = np.maximum(np.abs(x0), np.abs(x1))
        x0, x1, dx0, dx1 = x0 / s, x1 / s, dx0 / s, dx1 / s
        for _ in range(n):
            x0, x1, dx0, dx1 = F.with_jet(x0, x1, dx0, dx1)
        y0, y1 = x0 - a * x1, ac * x0 + x1
        dy0, dy1 = dx0 - a * dx1, ac * dx0 + dx1
        p = y0 - zeta * y1
        dp = dy0 - y1 - zeta * dy1
        return p, dp, y0, y1

    def ratio(zeta):
        p, dp, _, _ = solve_eq(zeta)
        with np.errstate(all="ignore"):
            return p / dp

    def back(zeta):
        return kernels.normalize(zeta + a, -ac * zeta + 1)

    def residual(zeta):
        x0, x1 = back(zeta)
        y0, y1 = F.iterate(x0, x1, n)
        return kernels.chordal(y0, y1, x0, x1)

    zeta, _ = aberth(ratio, D)
    res = residual(zeta)
    for _ in range(4):
        cand = zeta - ratio(zeta)
        ok = np.isfinite(cand)
        cres = np.where(ok, residual(np.where(ok, cand, zeta)), np.inf)
        better = cres < res
        zeta = np.where(better, cand, zeta)
        res = np.where(better, cres, res)

    x0, x1 = back(zeta)
    lam_n = _fixed_point_multipliers(f, x0, x1, n)

    labels = cluster_labels(x0, x1, CLUSTER_TOL)
    para = np.flatnonzero(np.abs(lam_n - 1) < 1e-3)
    if len(para) > 1:
        sub = cluster_labels(x0[para], x1[para], PARABOLIC_CLUSTER_TOL)
        for lab in np.unique(sub):
            members = para[sub == lab]
            labels[np.isin(labels, labels[members])] = labels[members[0]]

    reps0, reps1, mults = [], [], []
    for lab in np.unique(labels):
        idx = np.flatnonzero(labels == lab)
        if len(idx) == 1:
            r0, r1 = x0[idx[0]], x1[idx[0]]
        else:
            r0, r1 = back(np.array([zeta[idx].mean()]))
            r0, r1 = r0[0], r1[0]
        reps0.append(r0)
        reps1.append(r1)
        mults.append(len(idx))
    reps0, reps1 = _snap(np.array(reps0), np.array(reps1))
    mults = np.array(mults)
    y0, y1 = F.iterate(reps0, reps1, n)
    rep_res = kernels.chordal(y0, y1, reps0, reps1)

    return _assemble_orbits(f, n, reps0, reps1, mults, rep_res, q_max, class_tol)


def _snap(z0, z1):
    z0, z1 = kernels.normalize(z0, z1)
    z1 = np.where(np.abs(z1) < 1e-15, 0, z1)
    z0 = np.where(np.abs(z0) < 1e-15, 0, z0)
    return kernels.normalize(z0, z1)


def _fixed_point_multipliers(f: RatMap, x0, x1, n):
    lam = np.ones(len(x0), dtype=complex)
    c0, c1 = x0, x1
    for k in range(n):
        n0, n1 = f.hom(c0, c1)
        # last step lands in the chart of the starting point
        o0, o1 = (x0, x1) if k == n - 1 else (n0, n1)
        lam *= f.hom.chart_derivative(c0, c1, o0, o1)
        c0, c1 = n0, n1
    return lam


def _assemble_orbits(f, n, z0, z1, mults, res, q_max, class_tol):
    F = f.hom
    m = len(z0)
    order = sorted(range(m), key=lambda i: _key(z0[i], z1[i]))
    tree = cKDTree(kernels.to_sphere(z0, z1))
    divisors = [k for k in range(1, n + 1) if n % k == 0]
    assigned = np.zeros(m, dtype=bool)
    records = []
    for i in order:
        if assigned[i]:
            continue
        period = n
        c0, c1 = np.array([z0[i]]), np.array([z1[i]])
        for k in divisors:
            y0, y1 = F.iterate(c0, c1, k)
            if kernels.chordal(y0, y1, c0, c1)[0] < GROUP_TOL or k == n:
                period = k
                break
        members = [i]
        step_res = []
        cur = i
        for _ in range(period - 1):
            y0, y1 = F(np.array([z0[cur]]), np.array([z1[cur]]))
            dist, cand = tree.query(kernels.to_sphere(y0, y1), k=min(4, m))
            dist, cand = np.atleast_1d(dist[0]), np.atleast_1d(cand[0])
            close = [(res[j], j, dd) for dd, j in zip(dist, cand) if dd < GROUP_TOL and j not in members]
            if close:
                _, nxt, dd = min(close)
            else:
                nxt, dd = int(cand[0]), float(dist[0])
            step_res.append(dd)
            members.append(int(nxt))
            cur = int(nxt)
        # closing step
        y0, y1 = F(np.array([z0[cur]]), np.array([z1[cur]]))
        step_res.append(float(kernels.chordal(y0, y1, np.array([z0[i]]), np.array([z1[i]]))[0]))
        assigned[members] = True
        lam = cycle_multiplier(f, z0[members], z1[members])
        residual = float(max(max(step_res), max(res[members])))
        pts = tuple(SpherePoint(complex(z0[j]), complex(z1[j])) for j in members)
        records.append(OrbitRecord(
            period=period, points=pts, multiplier=lam,
            cls=classify_multiplier(lam, q_max, class_tol), residual=residual,
            multiplicity=int(mults[i]), flagged=residual > RESIDUAL_TOL,
        ))
    records.sort(key=lambda r: (r.period, _key(r.points[0].z0, r.points[0].z1)))
    return records


def fixed_point_count(records) -> int:
    """Multiplicity-weighted number of points over a list of orbit records."""
    return sum(len(r.points) * r.multiplicity for r in records)


def nonrepelling_census(f: RatMap, n_max: int, **kw) -> dict:
    """Non-repelling orbits of period dividing ``n`` for ``n = 1..n_max``."""
    per_n = []
    signatures = []
    for n in range(1, n_max + 1):
        recs = periodic_points(f, n, **kw)
        counts: dict[str, int] = {}
        for r in recs:
            counts[r.cls.kind] = counts.get(r.cls.kind, 0) + 1
        nonrep = [r for r in recs if not r.cls.repelling]
        sig = sorted(tuple(sorted(_key(p.z0, p.z1) for p in r.points)) for r in nonrep)
        signatures.append(sig)
        per_n.append({
            "n": n,
            "counts": dict(sorted(counts.items())),
            "weighted_points": fixed_point_count(recs),
            "nonrepelling": [r.to_dict() for r in nonrep],
        })
    constant = all(_same_signature(signatures[0], s) for s in signatures[1:])
    return {"per_period": per_n, "nonrepelling_constant": constant}


def _same_signature(a, b, tol=1e-6):
    if len(a) != len(b):
        return False
    for oa, ob in zip(a, b):
        if len(oa) != len(ob):
            return False
        for pa, pb in zip(oa, ob):
            if pa[0] != pb[0] or abs(pa[1] - pb[1]) > tol or abs(pa[2] - pb[2]) > tol:
                return False
    return True


def critical_orbit_report(f: RatMap, cloud, n_steps: int = 200, tol: float = 1e-2,
                          close_tol: float = 1e-9) -> dict:
    """Check that critical points lying on the Julia set are preperiodic repelling.

    ``cloud`` is a sampled Julia set (``PointCloud``). A critical point is
    taken to lie on J when it is within ``tol`` (chordal) of the cloud. Its
    orbit is followed for ``n_steps``; it counts as preperiodic when it returns
    within ``close_tol`` of an earlier orbit point. Orbits that never close
    (for instance those creeping into a parabolic point) are reported as
    ``"unknown"`` whether or not they start on the cloud.
    """
    tree = cKDTree(kernels.to_sphere(cloud.z0, cloud.z1))
    F = f.hom
    entries = []
    for c, mult in critical_points(f):
        c0, c1 = np.array([complex(c.z0)]), np.array([complex(c.z1)])
        dist = float(tree.query(kernels.to_sphere(c0, c1))[0][0])
        in_j = dist < tol
        orb0, orb1 = [c0[0]], [c1[0]]
        closed_at = None
        for _ in range(n_steps):
            y0, y1 = F(np.array([orb0[-1]]), np.array([orb1[-1]]))
            dd = kernels.chordal(np.array(orb0), np.array(orb1), y0[0], y1[0])
            hit = np.flatnonzero(dd < close_tol)
            if len(hit):
                closed_at = int(hit[0])
                break
            orb0.append(y0[0])
            orb1.append(y1[0])
        entry = {
            "point": _point_json(c), "multiplicity": mult,
            "distance_to_cloud": dist, "in_julia": in_j,
        }
        if closed_at is None:
            entry["status"] = "unknown"
        else:
            cyc0, cyc1 = orb0[closed_at:], orb1[closed_at:]
            lam = cycle_multiplier(f, cyc0, cyc1)
            cls = classify_multiplier(lam)
            entry.update({
                "preperiod": closed_at, "cycle_period": len(cyc0),
                "cycle_multiplier": [lam.real, lam.imag], "cycle_class": str(cls),
            })
            if not in_j:
                entry["status"] = "fatou"
            elif cls.repelling:
                entry["status"] = "preperiodic_repelling"
            else:
                entry["status"] = "preperiodic_nonrepelling"
        entries.append(entry)
    statuses = [e["status"] for e in entries]
    if "preperiodic_nonrepelling" in statuses:
        ok = False
    elif "unknown" in statuses:
        ok = None
    else:
        ok = True
    return {"critical_points": entries, "hypothesis_satisfied": ok}
