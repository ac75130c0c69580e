"""Exact search for composition identities ``f^m1 g ... f^mk g = f^m``."""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product

from .errors import DegreeBudgetError
from .ratmap import RatMap, compose, iterate, maps_equal

DEFAULT_MAX_K = 3
DEFAULT_MAX_M = 8
DEFAULT_BUDGET = 4096


@dataclass(frozen=True)
class FunEqWitness:
    exponents: tuple[int, ...]
    m: int
    certified: bool
    word_degree: int

    @property
    def k(self) -> int:
        return len(self.exponents)

    def to_dict(self) -> dict:
        return {"k": self.k, "exponents": list(self.exponents), "m": self.m,
                "certified": self.certified, "word_degree": self.word_degree}


@dataclass
class SearchReport:
    """Outcome of a bounded search; ``witness`` is ``None`` if nothing was found."""

    witness: FunEqWitness | None
    max_m: int
    max_k: int
    degree_budget: int
    candidates: int = 0
    certified_checks: int = 0
    skipped_budget: int = 0
    log: list = field(default_factory=list)

    def to_dict(self) -> dict:
        out = {
            "found": self.witness is not None,
            "searched": {"max_m": self.max_m, "max_k": self.max_k, "degree_budget": self.degree_budget,
                         "candidates": self.candidates, "certified_checks": self.certified_checks,
                         "skipped_budget": self.skipped_budget},
        }
        if self.witness is not None:
            out["witness"] = self.witness.to_dict()
        return out


def _exact(f: RatMap) -> RatMap:
    # identity claims must be exact; float maps are snapped to Q(i) or rejected
    return f if f.exact else f.to_exact()


def degree_identity(df: int, dg: int, exponents, m: int) -> bool:
    """Necessary condition ``df**sum(exponents) * dg**k == df**m``."""
    return df ** sum(exponents) * dg ** len(exponents) == df ** m


class _Words:
    """Memoized iterates and word tails so shared suffixes are built once."""

    def __init__(self, f: RatMap, g: RatMap, budget: int):
        self.f, self.g, self.budget = f, g, budget
        self._iter = {0: RatMap.identity(exact=f.exact)}
        self._tail: dict[tuple, RatMap] = {(): RatMap.identity(exact=f.exact)}

    def fpow(self, n: int) -> RatMap:
        if n not in self._iter:
            self._iter[n] = iterate(self.f, n, self.budget)
        return self._iter[n]

    def word(self, exponents) -> RatMap:
        key = tuple(exponents)
        if key in self._tail:
            return self._tail[key]
        # f^m1 g (rest): build from the right so tails are shared
        rest = self.word(key[1:])
        block = compose(self.fpow(key[0]), self.g) if key[0] else self.g
        out = compose(block, rest)
        if out.degree > self.budget:
            raise DegreeBudgetError(f"word degree {out.degree} exceeds budget {self.budget}")
        self._tail[key] = out
        return out


def compose_word(f: RatMap, g: RatMap, exponents, budget: int = DEFAULT_BUDGET) -> RatMap:
    """``f^m1 ∘ g ∘ f^m2 ∘ g ∘ ... ∘ f^mk ∘ g``."""
    exponents = tuple(int(e) for e in exponents)
    if not exponents:
        raise ValueError("need at least one exponent")
    if any(e < 0 for e in exponents):
        raise ValueError("exponents must be nonnegative")
    if f.exact != g.exact:
        f, g = _exact(f), _exact(g)
    df, dg = f.degree, g.degree
    deg = df ** sum(exponents) * dg ** len(exponents)
    if deg > budget:
        raise DegreeBudgetError(f"word degree {deg} exceeds budget {budget}")
    return _Words(f, g, budget).word(exponents)


def commute_check(f: RatMap, g: RatMap, tol: float | None = None) -> bool:
    if f.exact != g.exact:
        f, g = _exact(f), _exact(g)
    kw = {} if tol is None else {"tol": tol}
    return maps_equal(compose(f, g), compose(g, f), **kw)


def search_functional_equation(f: RatMap, g: RatMap, max_m: int = DEFAULT_MAX_M,
                               max_k: int = DEFAULT_MAX_K,
                               degree_budget: int = DEFAULT_BUDGET) -> SearchReport:
    """Smallest witness of ``f^m1 g ... f^mk g = f^m`` in the bounded region.

    Candidates are ordered by ``m``, then ``k``, then the exponent tuple;
    since the word must have the degree of ``f^m``, ``sum(m_i) < m`` and
    only tuples passing the integer degree identity are ever composed.
    """
    if f.degree < 2 or g.degree < 2:
        raise ValueError("functional-equation search needs deg f, deg g >= 2")
    f, g = _exact(f), _exact(g)
    df, dg = f.degree, g.degree
    report = SearchReport(None, max_m, max_k, degree_budget)
    words = _Words(f, g, degree_budget)
    for m in range(1, max_m + 1):
        target_deg = df ** m
        if target_deg > degree_budget:
            report.log.append({"m": m, "skipped": "degree budget"})
            report.skipped_budget += 1
            continue
        for k in range(1, max_k + 1):
            for exps in product(range(m), repeat=k):
                if sum(exps) >= m:
                    continue
                report.candidates += 1
                if not degree_identity(df, dg, exps, m):
                    continue
                report.certified_checks += 1
                word = words.word(exps)
                ok = maps_equal(word, words.fpow(m))
                report.log.append({"m": m, "exponents": list(exps), "equal": ok})
                if ok:
                    report.witness = FunEqWitness(tuple(exps), m, True, word.degree)
                    return report
    return report
