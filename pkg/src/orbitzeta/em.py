"""Preimage sets E_m of curve vertices along itineraries of vertex neighbourhoods.

Points of the Jordan curve C are exact rationals in [0, M), M = card post f,
with 0-edge i occupying [i, i + 1].  f|_C is affine on every on-curve 1-edge.
For a level-m vertex p the arc ``ae(p, m)`` is the union of the two level-m
curve edges meeting at p.

``E_m(p_n, ..., p_1; q)`` is the set of x with f^n(x) = q and
f^i(x) in ae(p_{n-i}, m) for i = 0, ..., n - 1.
"""

from __future__ import annotations

import math
from bisect import bisect_left, bisect_right
from functools import lru_cache
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, FrozenSet, List, Optional, Sequence, Tuple

from .subdivision import SubdivisionRule

Point = Fraction


class NotOnCurveError(ValueError):
    pass


class EmBoundViolation(AssertionError):
    pass


# --------------------------------------------------------------------------
# curve geometry


def _M(rule: SubdivisionRule) -> int:
    return rule.m


def _norm(rule: SubdivisionRule, x) -> Fraction:
    return Fraction(x) % _M(rule)


@lru_cache(maxsize=None)
def _table(rule: SubdivisionRule):
    edges = rule.curve_edges_sorted
    return edges, [rule.curve_interval(e)[0] for e in edges], [rule.curve_interval(e)[1] for e in edges]


def edge_on_side(rule: SubdivisionRule, x: Fraction, side: int) -> Tuple[str, Fraction]:
    """The on-curve 1-edge just after (side=+1) or before (side=-1) x.

    Returns the edge and x lifted into that edge's closed interval.
    """
    M = _M(rule)
    x = x % M
    if side < 0 and x == 0:
        x = Fraction(M)
    edges, los, his = _table(rule)
    i = bisect_right(los, x) - 1 if side > 0 else bisect_left(his, x)
    return edges[i], x


def forward(rule: SubdivisionRule, x) -> Fraction:
    """f|_C in the affine model."""
    e, y = edge_on_side(rule, Fraction(x), +1)
    return rule.curve_map(e, y) % _M(rule)


def preimages(rule: SubdivisionRule, q) -> List[Fraction]:
    """f|_C^{-1}(q), sorted."""
    M = _M(rule)
    q = Fraction(q) % M
    out = set()
    for e in rule.curve_order:
        img = rule.zero_edge_index(rule.edge[e].image_zero_edge)
        for y in (q, q + M):
            if img <= y <= img + 1:
                out.add(rule.curve_inverse(e, y) % M)
    return sorted(out)


def level(rule: SubdivisionRule, x, limit: int = 200) -> int:
    """Smallest j with f^j(x) a postcritical point (x is then a level-j vertex)."""
    y = Fraction(x) % _M(rule)
    for j in range(limit + 1):
        if y.denominator == 1:
            return j
        y = forward(rule, y)
    raise NotOnCurveError(f"{x} is not a curve vertex of level <= {limit}")


def is_vertex(rule: SubdivisionRule, x, m: int) -> bool:
    y = Fraction(x) % _M(rule)
    for _ in range(m):
        if y.denominator == 1:
            return True
        y = forward(rule, y)
    return y.denominator == 1


def neighbor(rule: SubdivisionRule, x, side: int, m: int) -> Fraction:
    """Nearest level-m curve vertex strictly on the given side of x."""
    x = Fraction(x) % _M(rule)
    return _neighbor(rule, x if not (side < 0 and x == 0) else Fraction(_M(rule)), side, m) % _M(rule)


def _neighbor(rule: SubdivisionRule, x: Fraction, side: int, m: int) -> Fraction:
    # x is a lifted coordinate in [0, M]; the result stays on the same lift
    if m == 0:
        return Fraction(math.floor(x) + 1) if side > 0 else Fraction(math.ceil(x) - 1)
    e, y = edge_on_side(rule, x, side)
    shift = x - y
    img_side = side if rule.curve_preserving(e) else -side
    z = _neighbor(rule, rule.curve_map(e, y), img_side, m - 1)
    return rule.curve_inverse(e, z) + shift


@dataclass(frozen=True)
class Arc:
    """Closed arc [lo, hi] on the lifted line, lo <= hi, length < M."""

    lo: Fraction
    hi: Fraction

    def contains(self, x: Fraction, M: int) -> bool:
        return (x - self.lo) % M <= self.hi - self.lo


def edge_pair(rule: SubdivisionRule, p, m: int) -> Arc:
    """ae(p, m): the two level-m curve edges meeting at p."""
    M = _M(rule)
    p = Fraction(p) % M
    if not is_vertex(rule, p, m):
        raise NotOnCurveError(f"{p} is not a level-{m} vertex of C")
    left = neighbor(rule, p, -1, m)
    right = neighbor(rule, p, +1, m)
    return Arc(p - (p - left) % M, p + (right - p) % M)


# --------------------------------------------------------------------------
# E_m, recursive


def one_step(rule: SubdivisionRule, m: int, p, q, arc: Optional[Arc] = None) -> FrozenSet[Fraction]:
    """E_m(p; q): preimages of q inside ae(p, m)."""
    arc = arc or edge_pair(rule, p, m)
    return frozenset(x for x in preimages(rule, q) if arc.contains(x, _M(rule)))


def _check_itinerary(rule: SubdivisionRule, m: int, points: Sequence) -> None:
    for p in points:
        if not is_vertex(rule, p, m):
            raise NotOnCurveError(f"itinerary point {p} is not a level-{m} vertex of C")


def enumerate_Em(rule: SubdivisionRule, m: int, itinerary: Sequence, q) -> FrozenSet[Fraction]:
    """E_m(p_n, ..., p_1; q) via the one-step recursion.

    ``itinerary`` lists (p_n, ..., p_1) in that order.
    """
    _check_itinerary(rule, m, list(itinerary) + [q])
    current = frozenset([Fraction(q) % _M(rule)])
    for p in reversed(list(itinerary)):
        arc = edge_pair(rule, p, m)
        current = frozenset().union(*(one_step(rule, m, p, x, arc) for x in current)) \
            if current else frozenset()
    return current


# --------------------------------------------------------------------------
# E_m, direct: forward propagation of affine pieces


@dataclass(frozen=True)
class _Piece:
    # domain [dlo, dhi] (lifted); g(x) = a x + b maps it onto [ilo, ihi] up to order
    dlo: Fraction
    dhi: Fraction
    a: Fraction
    b: Fraction

    def image(self) -> Tuple[Fraction, Fraction]:
        u, v = self.a * self.dlo + self.b, self.a * self.dhi + self.b
        return (u, v) if u <= v else (v, u)

    def restrict(self, lo: Fraction, hi: Fraction) -> Optional["_Piece"]:
        """Restrict to the part whose image lies in [lo, hi]."""
        u, v = self.image()
        lo, hi = max(lo, u), min(hi, v)
        if lo > hi:
            return None
        x1, x2 = (lo - self.b) / self.a, (hi - self.b) / self.a
        return _Piece(min(x1, x2), max(x1, x2), self.a, self.b)


def _shifts(u: Fraction, v: Fraction, lo: Fraction, hi: Fraction, M: int) -> List[int]:
    """Multiples s of M with [lo + s, hi + s] meeting [u, v]."""
    k0 = math.floor((u - hi) / M)
    k1 = math.ceil((v - lo) / M)
    return [k * M for k in range(k0, k1 + 1) if lo + k * M <= v and hi + k * M >= u]


def _apply_f(rule: SubdivisionRule, piece: _Piece) -> List[_Piece]:
    M = _M(rule)
    u, v = piece.image()
    out = []
    for e in rule.curve_edges_sorted:
        lo, hi = rule.curve_interval(e)
        for s in _shifts(u, v, lo, hi, M):
            sub = piece.restrict(lo + s, hi + s)
            if sub is None:
                continue
            if u < v and sub.dlo == sub.dhi:
                continue  # boundary point of a nondegenerate piece, kept by its neighbour
            img = rule.zero_edge_index(rule.edge[e].image_zero_edge)
            k = 1 / (hi - lo)
            # f_e(y) = img + (y - s - lo) k, or img + 1 - (y - s - lo) k
            if rule.curve_preserving(e):
                a2, b2 = k, img - (s + lo) * k
            else:
                a2, b2 = -k, img + 1 + (s + lo) * k
            out.append(_Piece(sub.dlo, sub.dhi, a2 * sub.a, a2 * sub.b + b2))
            if u == v:
                return out
    return out


def _dedupe(pieces: List[_Piece]) -> List[_Piece]:
    seen, out = set(), []
    for p in pieces:
        key = (p.dlo, p.dhi, p.a, p.b)
        if key not in seen:
            seen.add(key)
            out.append(p)
    return out


def direct_Em(rule: SubdivisionRule, m: int, itinerary: Sequence, q) -> FrozenSet[Fraction]:
    """E_m straight from its definition, without the one-step recursion.

    The constraint set is carried forward as affine pieces of f^i restricted
    to the points that have satisfied every constraint so far.
    """
    M = _M(rule)
    its = list(itinerary)
    _check_itinerary(rule, m, its + [q])
    n = len(its)
    q = Fraction(q) % M
    if n == 0:
        return frozenset([q])
    a0 = edge_pair(rule, its[0], m)
    pieces = [_Piece(a0.lo, a0.hi, Fraction(1), Fraction(0))]
    for i in range(1, n + 1):
        pieces = _dedupe([p2 for p in pieces for p2 in _apply_f(rule, p)])
        if i == n:
            break
        arc = edge_pair(rule, its[i], m)
        kept = []
        for p in pieces:
            u, v = p.image()
            for s in _shifts(u, v, arc.lo, arc.hi, M):
                r = p.restrict(arc.lo + s, arc.hi + s)
                if r is not None:
                    kept.append(r)
        pieces = _dedupe(kept)
    out = set()
    for p in pieces:
        u, v = p.image()
        for s in _shifts(u, v, q, q, M):
            out.add(((q + s - p.b) / p.a) % M)
    return frozenset(out)


def brute_Em(rule: SubdivisionRule, m: int, itinerary: Sequence, q) -> FrozenSet[Fraction]:
    """Filter of the full preimage set f|_C^{-n}(q); exponential in n."""
    M = _M(rule)
    its = list(itinerary)
    n = len(its)
    cands = [Fraction(q) % M]
    for _ in range(n):
        cands = [x for y in cands for x in preimages(rule, y)]
    arcs = [edge_pair(rule, p, m) for p in its]
    out = set()
    for x in set(cands):
        y, ok = x, True
        for i in range(n):
            if not arcs[i].contains(y, M):
                ok = False
                break
            y = forward(rule, y)
        if ok and y == Fraction(q) % M:
            out.add(x)
    return frozenset(out)


# --------------------------------------------------------------------------
# sampling and the bound


def em_bound(m: int, n: int) -> float:
    return m * 2.0 ** (n / m)


def random_vertex(rule: SubdivisionRule, m: int, rng: random.Random) -> Fraction:
    y = Fraction(rng.randrange(_M(rule)))
    for _ in range(rng.randrange(m + 1)):
        pre = preimages(rule, y)
        if not pre:  # f(C) need not cover C
            break
        y = rng.choice(pre)
    return y


def sample_itinerary(rule: SubdivisionRule, m: int, n: int,
                     rng: random.Random) -> Tuple[List[Fraction], Fraction]:
    """A random backward walk giving (p_n, ..., p_1) and q with E_m nonempty."""
    for _ in range(1000):
        try:
            return _walk(rule, m, n, rng)
        except LookupError:
            continue
    raise RuntimeError("could not sample a backward walk on C")


def _walk(rule: SubdivisionRule, m: int, n: int, rng: random.Random):
    q = random_vertex(rule, m, rng)
    x, rev = q, []
    for _ in range(n):
        # stay inside the part of C that keeps having preimages
        pre = [y for y in preimages(rule, x) if preimages(rule, y)]
        if not pre:
            raise LookupError
        x = rng.choice(pre)
        cands = {neighbor(rule, x, -1, m), neighbor(rule, x, +1, m)}
        if is_vertex(rule, x, m):
            cands.add(x)
        rev.append(rng.choice(sorted(cands)))
    return list(reversed(rev)), q


@dataclass
class EmTrial:
    n: int
    itinerary: Tuple[Fraction, ...]
    q: Fraction
    size: int
    bound: float
    matches_direct: bool

    @property
    def ratio(self) -> float:
        return self.size / self.bound


@dataclass
class EmBoundReport:
    m: int
    trials: List[EmTrial] = field(default_factory=list)

    @property
    def max_ratio(self) -> float:
        return max((t.ratio for t in self.trials), default=0.0)

    @property
    def all_within_bound(self) -> bool:
        return all(t.size <= t.bound for t in self.trials)

    @property
    def all_match_direct(self) -> bool:
        return all(t.matches_direct for t in self.trials)

    @property
    def ok(self) -> bool:
        return self.all_within_bound and self.all_match_direct


def check_Em_bound(rule: SubdivisionRule, m: int = 14, trials: int = 200, n_max: int = 28,
                   seed: int = 0, strict: bool = True,
                   oracle: Callable = direct_Em) -> EmBoundReport:
    """Sample itineraries and test card E_m <= m 2^(n/m) and recursion vs oracle."""
    if m < 14:
        raise ValueError("the bound is stated for m >= 14")
    rng = random.Random(seed)
    report = EmBoundReport(m)
    for _ in range(trials):
        n = rng.randint(1, n_max)
        its, q = sample_itinerary(rule, m, n, rng)
        rec = enumerate_Em(rule, m, its, q)
        ref = oracle(rule, m, its, q)
        trial = EmTrial(n, tuple(its), q, len(rec), em_bound(m, n), rec == ref)
        report.trials.append(trial)
        if strict and trial.size > trial.bound:
            path = ", ".join(str(p) for p in its)
            raise EmBoundViolation(f"card E_{m}({path}; {q}) = {trial.size} > {trial.bound:.4f}")
    return report
