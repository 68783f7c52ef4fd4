"""Periodic words, classification of periodic points, and primitive orbits.

Words over a system with S states are packed into unsigned 64-bit codes,
``bits = ceil(log2 S)`` bits per letter, first letter most significant,
so that numeric order is lexicographic order over state indices.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import cached_property
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

import numpy as np

from .potential import Potential, Weights, induced_weights
from .shifts import TransitionSystem, count_fixed, edge_color_shift, edge_shift, \
    restricted_trace, tile_shift, vertex_system
from .subdivision import CellWord, Color, SubdivisionRule, vertex_local_degree

DEFAULT_CAP = 10 ** 7
KIND_NAMES = ("interior", "curve_nonvertex", "postcritical")


class BudgetExceeded(RuntimeError):
    def __init__(self, estimate: int, cap: int):
        super().__init__(f"enumeration needs {estimate} words, cap is {cap}")
        self.estimate = estimate
        self.cap = cap


class NotPeriodicError(ValueError):
    pass


def letter_bits(ts: TransitionSystem) -> int:
    return max(1, math.ceil(math.log2(max(ts.size, 2))))


def _threads() -> int:
    try:
        return max(1, int(os.environ.get("ORBITZETA_THREADS", "1")))
    except ValueError:
        return 1


def _rot(codes: np.ndarray, j: int, n: int, bits: int) -> np.ndarray:
    """Rotate packed words left by j letters."""
    if j % n == 0:
        return codes
    total = bits * n
    mask = np.uint64((1 << total) - 1)
    left = np.uint64(bits * j)
    right = np.uint64(bits * (n - j))
    return ((codes << left) & mask) | (codes >> right)


def _partition(ts: TransitionSystem, n: int, a: int, bits: int, canonical: bool) -> np.ndarray:
    codes = np.array([a], dtype=np.uint64)
    last = np.array([a], dtype=np.intp)
    lo = a if canonical else 0
    b = np.uint64(bits)
    for _ in range(n - 1):
        new_codes, new_last = [], []
        for s in np.unique(last):
            sel = codes[last == s]
            for j in ts.succ[s]:
                if j < lo:
                    continue
                new_codes.append((sel << b) | np.uint64(j))
                new_last.append(np.full(sel.shape, j, dtype=np.intp))
        if not new_codes:
            return np.zeros(0, dtype=np.uint64)
        codes = np.concatenate(new_codes)
        last = np.concatenate(new_last)
    closes = np.array([a in ts.succ[s] for s in range(ts.size)], dtype=bool)
    codes = codes[closes[last]]
    if canonical and n > 1:
        keep = np.ones(codes.shape, dtype=bool)
        for j in range(1, n):
            keep &= codes < _rot(codes, j, n, bits)
        codes = codes[keep]
    return codes


def cyclic_codes(ts: TransitionSystem, n: int, canonical: bool = False,
                 cap: int = DEFAULT_CAP) -> np.ndarray:
    """Packed words of Fix(sigma^n); with ``canonical`` only minimal rotations of
    primitive words (one per primitive orbit of exact period n)."""
    if n < 1:
        raise ValueError("n must be at least 1")
    bits = letter_bits(ts)
    if bits * n > 63:
        raise BudgetExceeded(ts.size ** n, cap)
    estimate = count_fixed(ts, n)
    if canonical:
        estimate = -(-estimate // n)
    if estimate > cap:
        raise BudgetExceeded(estimate, cap)
    starts = range(ts.size)
    workers = _threads()
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            parts = list(pool.map(lambda a: _partition(ts, n, a, bits, canonical), starts))
    else:
        parts = [_partition(ts, n, a, bits, canonical) for a in starts]
    out = np.concatenate(parts) if parts else np.zeros(0, dtype=np.uint64)
    return np.sort(out)


def encode(word: Sequence[int], bits: int) -> int:
    c = 0
    for x in word:
        c = (c << bits) | int(x)
    return c


def decode(code: int, n: int, bits: int) -> Tuple[int, ...]:
    mask = (1 << bits) - 1
    return tuple((int(code) >> (bits * (n - 1 - p))) & mask for p in range(n))


def exact_period(word: Sequence) -> int:
    n = len(word)
    for d in range(1, n + 1):
        if n % d == 0 and all(word[i] == word[(i + d) % n] for i in range(n)):
            return d
    return n


def canonical_rotation(word: Sequence) -> Tuple:
    n = len(word)
    return min(tuple(word[i:]) + tuple(word[:i]) for i in range(n))


@dataclass(frozen=True, eq=False)
class WordSet:
    """Fix(sigma^n) of a system as packed codes."""

    system: TransitionSystem
    n: int
    codes: np.ndarray

    @property
    def bits(self) -> int:
        return letter_bits(self.system)

    def __len__(self) -> int:
        return int(self.codes.size)

    def __iter__(self) -> Iterator[Tuple[str, ...]]:
        for c in self.codes:
            yield tuple(self.system.labels[i] for i in decode(int(c), self.n, self.bits))

    def indices(self) -> Iterator[Tuple[int, ...]]:
        for c in self.codes:
            yield decode(int(c), self.n, self.bits)


def fixed_words(ts: TransitionSystem, n: int, cap: int = DEFAULT_CAP) -> WordSet:
    return WordSet(ts, n, cyclic_codes(ts, n, cap=cap))


# --------------------------------------------------------------------------
# vertex codings


def _vertex_orbit(rule: SubdivisionRule, v: str, n: int) -> List[str]:
    orbit = [v]
    for _ in range(n - 1):
        orbit.append(rule.vertex[orbit[-1]].image)
    if rule.vertex[orbit[-1]].image != v:
        raise NotPeriodicError(f"{v} is not fixed by f^{n}")
    return orbit


def _cells_at(rule: SubdivisionRule, ts: TransitionSystem, x: str) -> List[int]:
    if ts.kind == "tile":
        return [ts.index[t] for t in rule.tiles_at_vertex[x]]
    if ts.kind == "edge":
        return [i for i, e in enumerate(ts.states) if x in rule.edge[e].endpoints]
    if ts.kind == "edge_color":
        return [i for i, (e, _) in enumerate(ts.states) if x in rule.edge[e].endpoints]
    raise ValueError(ts.kind)


def vertex_allowed(rule: SubdivisionRule, ts: TransitionSystem, v: str, n: int) -> List[List[int]]:
    return [_cells_at(rule, ts, x) for x in _vertex_orbit(rule, v, n)]


def vertex_coded_words(rule: SubdivisionRule, ts: TransitionSystem, v: str, n: int) -> List[Tuple[int, ...]]:
    """Cyclic words w of length n with f^i(v) in w_i for every i."""
    allowed = vertex_allowed(rule, ts, v, n)
    sets = [set(a) for a in allowed]
    out: List[Tuple[int, ...]] = []

    def walk(prefix):
        i = len(prefix)
        if i == n:
            if ts.allows(prefix[-1], prefix[0]):
                out.append(tuple(prefix))
            return
        for b in ts.succ[prefix[-1]]:
            if b in sets[i]:
                walk(prefix + [b])

    for s in allowed[0]:
        walk([s])
    return sorted(out)


def periodic_post(rule: SubdivisionRule, n: int) -> List[str]:
    """Postcritical vertices fixed by f^n."""
    out = []
    for v in rule.post:
        x = v
        for _ in range(n):
            x = rule.vertex[x].image
        if x == v:
            out.append(v)
    return out


@dataclass(frozen=True)
class MCounts:
    M_tile: int
    M_edge_color: int
    M_edge: int
    M_vertex: int
    deg: int

    def as_tuple(self) -> Tuple[int, int, int, int, int]:
        return (self.M_tile, self.M_edge_color, self.M_edge, self.M_vertex, self.deg)

    @property
    def identity_holds(self) -> bool:
        return self.M_tile - self.M_edge_color + self.M_edge + self.M_vertex == self.deg


def vertex_M_counts(rule: SubdivisionRule, v: str, n: int) -> MCounts:
    """(M_tile, M_edge_color, M_edge, M_vertex, deg_{f^n}(v)) at a postcritical v."""
    if v not in rule.post:
        raise NotPeriodicError(f"{v} is not postcritical")
    orbit = _vertex_orbit(rule, v, n)
    counts = []
    for ts in (tile_shift(rule), edge_color_shift(rule), edge_shift(rule)):
        counts.append(restricted_trace(ts, [_cells_at(rule, ts, x) for x in orbit]))
    deg = 1
    for x in orbit:
        deg *= vertex_local_degree(rule, x)
    return MCounts(counts[0], counts[1], counts[2], 1, deg)


# --------------------------------------------------------------------------
# aggregate identity


@dataclass(frozen=True)
class IdentityRow:
    n: int
    trace_tile: int
    trace_edge_color: int
    trace_edge: int
    n_vertex: int
    lhs: int
    rhs: int

    @property
    def equal(self) -> bool:
        return self.lhs == self.rhs


def aggregate_identity(rule: SubdivisionRule, n: int) -> IdentityRow:
    tt = count_fixed(tile_shift(rule), n)
    tp = count_fixed(edge_color_shift(rule), n)
    te = count_fixed(edge_shift(rule), n)
    nv = count_fixed(vertex_system(rule), n)
    return IdentityRow(n, tt, tp, te, nv, tt - tp + te + nv, 1 + rule.degree ** n)


# --------------------------------------------------------------------------
# classification


@dataclass(frozen=True)
class PeriodicClass:
    kind: str
    address: Tuple[str, ...]  # tile word, edge word, or (vertex id,)
    period: int  # exact period of the point
    degree: int


@dataclass(frozen=True, eq=False)
class Systems:
    rule: SubdivisionRule

    @cached_property
    def tile(self) -> TransitionSystem:
        return tile_shift(self.rule)

    @cached_property
    def edge(self) -> TransitionSystem:
        return edge_shift(self.rule)

    @cached_property
    def edge_color(self) -> TransitionSystem:
        return edge_color_shift(self.rule)

    @cached_property
    def vertex(self) -> TransitionSystem:
        return vertex_system(self.rule)

    @cached_property
    def h_tile(self) -> np.ndarray:
        """Tile index of X^1(e, c) for every edge-color state."""
        r = self.rule
        return np.array([self.tile.index[r.edge_tile(e, c)] for e, c in self.edge_color.states],
                        dtype=np.uint64)

    @cached_property
    def forget(self) -> np.ndarray:
        return np.array([self.edge.index[e] for e, _ in self.edge_color.states], dtype=np.uint64)


def _recode(codes: np.ndarray, n: int, bits_in: int, bits_out: int, letter_map: np.ndarray) -> np.ndarray:
    mask = np.uint64((1 << bits_in) - 1)
    out = np.zeros(codes.shape, dtype=np.uint64)
    for p in range(n):
        letter = (codes >> np.uint64(bits_in * (n - 1 - p))) & mask
        out = (out << np.uint64(bits_out)) | letter_map[letter.astype(np.intp)]
    return out


def _all_rotations(codes: np.ndarray, n: int, bits: int) -> np.ndarray:
    if codes.size == 0:
        return codes
    return np.unique(np.concatenate([_rot(codes, j, n, bits) for j in range(n)]))


@dataclass(frozen=True, eq=False)
class CurveCodings:
    """Curve-side codings at level n: what must be removed from the tile words."""

    curve_edge_codes: np.ndarray  # fixed edge words coding non-vertex points
    vertex_edge_codes: np.ndarray
    h_tile_codes: np.ndarray  # tile codings of non-vertex curve points
    vertex_tile_codes: np.ndarray


def curve_codings(sy: Systems, n: int, cap: int = DEFAULT_CAP) -> CurveCodings:
    rule = sy.rule
    eb, tb, cb = letter_bits(sy.edge), letter_bits(sy.tile), letter_bits(sy.edge_color)
    post = periodic_post(rule, n)
    vertex_edge = sorted({encode(w, eb) for v in post for w in vertex_coded_words(rule, sy.edge, v, n)})
    vertex_tile = sorted({encode(w, tb) for v in post for w in vertex_coded_words(rule, sy.tile, v, n)})
    vertex_edge = np.array(vertex_edge, dtype=np.uint64)
    edges = cyclic_codes(sy.edge, n, cap=cap)
    curve = np.setdiff1d(edges, vertex_edge)
    ec = cyclic_codes(sy.edge_color, n, cap=cap)
    proj = _recode(ec, n, cb, eb, sy.forget)
    ec = ec[np.isin(proj, curve)]
    h = np.unique(_recode(ec, n, cb, tb, sy.h_tile))
    return CurveCodings(curve, vertex_edge, h, np.array(vertex_tile, dtype=np.uint64))


@dataclass(frozen=True, eq=False)
class Classification:
    """All points fixed by f^n, one entry per geometric point."""

    rule: SubdivisionRule
    n: int
    interior_codes: np.ndarray
    curve_codes: np.ndarray
    post: Tuple[Tuple[str, int, int], ...]  # (vertex, exact period, deg_{f^n})
    systems: Systems

    def __len__(self) -> int:
        return int(self.interior_codes.size + self.curve_codes.size + len(self.post))

    def weighted_count(self) -> int:
        return int(self.interior_codes.size + self.curve_codes.size + sum(d for _, _, d in self.post))

    def __iter__(self) -> Iterator[PeriodicClass]:
        sy, n = self.systems, self.n
        tb, eb = letter_bits(sy.tile), letter_bits(sy.edge)
        for c in self.interior_codes:
            w = decode(int(c), n, tb)
            yield PeriodicClass("interior", tuple(sy.tile.labels[i] for i in w), exact_period(w), 1)
        for c in self.curve_codes:
            w = decode(int(c), n, eb)
            yield PeriodicClass("curve_nonvertex", tuple(sy.edge.labels[i] for i in w), exact_period(w), 1)
        for v, p, d in self.post:
            yield PeriodicClass("postcritical", (v,), p, d)


def _vertex_period(rule: SubdivisionRule, v: str) -> int:
    x, p = rule.vertex[v].image, 1
    while x != v:
        x, p = rule.vertex[x].image, p + 1
        if p > len(rule.post):
            raise NotPeriodicError(v)
    return p


def classify_periodic_points(rule: SubdivisionRule, n: int, cap: int = DEFAULT_CAP,
                             systems: Optional[Systems] = None) -> Classification:
    sy = systems or Systems(rule)
    cc = curve_codings(sy, n, cap)
    tiles = cyclic_codes(sy.tile, n, cap=cap)
    removed = np.union1d(cc.h_tile_codes, cc.vertex_tile_codes)
    interior = tiles[~np.isin(tiles, removed)]
    post = []
    for v in periodic_post(rule, n):
        post.append((v, _vertex_period(rule, v), vertex_M_counts(rule, v, n).deg))
    return Classification(rule, n, interior, cc.curve_edge_codes, tuple(post), sy)


# --------------------------------------------------------------------------
# primitive orbits


@dataclass(frozen=True)
class OrbitRecord:
    period: int
    kind: str
    address: Tuple[str, ...]
    weight: float
    degree: int


@dataclass(frozen=True, eq=False)
class OrbitTable:
    """Columnar store of primitive periodic orbits (iterates as OrbitRecord)."""

    period: np.ndarray
    kind: np.ndarray  # index into KIND_NAMES
    code: np.ndarray
    weight: np.ndarray
    degree: np.ndarray
    n_max: int
    systems: Systems
    min_step: float  # smallest value of the potential along any window

    def __len__(self) -> int:
        return int(self.period.size)

    def address(self, i: int) -> Tuple[str, ...]:
        sy = self.systems
        kind, p, c = int(self.kind[i]), int(self.period[i]), int(self.code[i])
        if kind == 0:
            return tuple(sy.tile.labels[j] for j in decode(c, p, letter_bits(sy.tile)))
        if kind == 1:
            return tuple(sy.edge.labels[j] for j in decode(c, p, letter_bits(sy.edge)))
        return (sy.vertex.labels[c],)

    def record(self, i: int) -> OrbitRecord:
        return OrbitRecord(int(self.period[i]), KIND_NAMES[int(self.kind[i])], self.address(i),
                           float(self.weight[i]), int(self.degree[i]))

    def __iter__(self) -> Iterator[OrbitRecord]:
        for i in range(len(self)):
            yield self.record(i)

    def count_by_period(self) -> Dict[int, int]:
        ps, cs = np.unique(self.period, return_counts=True)
        return {int(p): int(c) for p, c in zip(ps, cs)}

    def to_csv_rows(self) -> Iterator[Tuple]:
        order = np.lexsort((self.code, self.kind, self.period))
        for i in order:
            r = self.record(int(i))
            yield (r.period, r.kind, "-".join(r.address), r.weight, r.degree)


def primitive_orbits(rule: SubdivisionRule, n_max: int, potential: Potential,
                     cap: int = DEFAULT_CAP, curve_color: Color = Color.white) -> OrbitTable:
    """Primitive periodic orbits of f with period at most n_max."""
    sy = Systems(rule)
    iw = induced_weights(rule, potential, curve_color)
    tb, eb = letter_bits(sy.tile), letter_bits(sy.edge)
    cols: Dict[str, List[np.ndarray]] = {k: [] for k in ("period", "kind", "code", "weight", "degree")}

    def push(period, kind, codes, weight, degree):
        m = codes.size
        cols["period"].append(np.full(m, period, dtype=np.int16))
        cols["kind"].append(np.full(m, kind, dtype=np.int8))
        cols["code"].append(codes.astype(np.uint64))
        cols["weight"].append(np.asarray(weight, dtype=float))
        cols["degree"].append(np.asarray(degree, dtype=np.int64))

    for n in range(1, n_max + 1):
        cc = curve_codings(sy, n, cap)
        removed = np.union1d(cc.h_tile_codes, cc.vertex_tile_codes)
        tiles = cyclic_codes(sy.tile, n, canonical=True, cap=cap)
        tiles = tiles[~np.isin(tiles, removed)]
        push(n, 0, tiles, iw.tile.code_sums(tiles, n, tb), np.ones(tiles.size, dtype=np.int64))
        curve = cc.curve_edge_codes
        if n > 1 and curve.size:
            keep = np.ones(curve.shape, dtype=bool)
            for j in range(1, n):
                keep &= curve < _rot(curve, j, n, eb)
            curve = curve[keep]
        push(n, 1, curve, iw.edge.code_sums(curve, n, eb), np.ones(curve.size, dtype=np.int64))
        vs = sy.vertex
        for v in periodic_post(rule, n):
            if _vertex_period(rule, v) != n:
                continue
            orbit = _vertex_orbit(rule, v, n)
            if v != min(orbit, key=lambda x: vs.index[x]):
                continue
            w = math.fsum(float(iw.vertex.table[vs.index[x]]) for x in orbit)
            d = vertex_M_counts(rule, v, n).deg
            push(n, 2, np.array([vs.index[v]], dtype=np.uint64), [w], [d])

    cat = {k: (np.concatenate(v) if v else np.zeros(0)) for k, v in cols.items()}
    min_step = float(min(np.nanmin(w.table) for w in (iw.tile, iw.edge, iw.vertex)))
    return OrbitTable(cat["period"], cat["kind"], cat["code"], cat["weight"], cat["degree"],
                      n_max, sy, min_step)
