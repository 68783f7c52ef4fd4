"""The four symbolic systems attached to a rule, and their block recodings.

Transition relations are stored as successor lists.  Traces of matrix
powers are computed with exact Python integers by dynamic programming
over (state, remaining length).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Dict, Hashable, List, Optional, Sequence, Tuple

import numpy as np

from .subdivision import Color, SubdivisionRule

KINDS = ("tile", "edge", "edge_color", "vertex")


@dataclass(frozen=True, eq=False)
class TransitionSystem:
    states: Tuple[Hashable, ...]
    succ: Tuple[Tuple[int, ...], ...]
    kind: str
    labels: Tuple[str, ...] = ()

    def __post_init__(self):
        if not self.labels:
            object.__setattr__(self, "labels", tuple(str(s) for s in self.states))

    @property
    def size(self) -> int:
        return len(self.states)

    @cached_property
    def index(self) -> Dict[Hashable, int]:
        return {s: i for i, s in enumerate(self.states)}

    @cached_property
    def label_index(self) -> Dict[str, int]:
        return {s: i for i, s in enumerate(self.labels)}

    @cached_property
    def matrix(self) -> np.ndarray:
        a = np.zeros((self.size, self.size), dtype=np.int64)
        for i, row in enumerate(self.succ):
            a[i, list(row)] = 1
        a.setflags(write=False)
        return a

    @cached_property
    def pred(self) -> Tuple[Tuple[int, ...], ...]:
        out: List[List[int]] = [[] for _ in range(self.size)]
        for i, row in enumerate(self.succ):
            for j in row:
                out[j].append(i)
        return tuple(tuple(p) for p in out)

    def allows(self, i: int, j: int) -> bool:
        return j in self.succ[i]

    def admissible(self, word: Sequence[int], cyclic: bool = False) -> bool:
        pairs = list(zip(word, word[1:]))
        if cyclic and word:
            pairs.append((word[-1], word[0]))
        return all(self.allows(a, b) for a, b in pairs)


@dataclass(frozen=True, eq=False)
class BlockSystem(TransitionSystem):
    base: Optional[TransitionSystem] = None
    k: int = 1

    @property
    def words(self) -> Tuple[Tuple[int, ...], ...]:
        return self.states  # type: ignore[return-value]


# --------------------------------------------------------------------------
# constructions


def tile_shift(rule: SubdivisionRule) -> TransitionSystem:
    ids = sorted(t.id for t in rule.one_tiles)
    host = {c: [i for i, t in enumerate(ids) if rule.tile[t].host_color == c] for c in Color}
    succ = tuple(tuple(host[rule.tile[t].image_color]) for t in ids)
    return TransitionSystem(tuple(ids), succ, "tile")


def edge_shift(rule: SubdivisionRule) -> TransitionSystem:
    ids = sorted(rule.curve_edges)
    by_host: Dict[int, List[int]] = {}
    for i, e in enumerate(ids):
        by_host.setdefault(rule.host_zero_edge(e), []).append(i)
    succ = tuple(
        tuple(by_host.get(rule.zero_edge_index(rule.edge[e].image_zero_edge), ())) for e in ids
    )
    return TransitionSystem(tuple(ids), succ, "edge")


def edge_color_shift(rule: SubdivisionRule) -> TransitionSystem:
    """States (e, c); (e1, c1) -> (e2, c2) iff f(e1) contains e2 and c2 = f(X^1(e1, c1))."""
    base = edge_shift(rule)
    colors = sorted(Color, key=lambda c: c.value)
    states = tuple((e, c) for e in base.states for c in colors)
    index = {s: i for i, s in enumerate(states)}
    succ = []
    for e, c in states:
        image = rule.tile[rule.edge_tile(e, c)].image_color
        i = base.index[e]
        succ.append(tuple(index[(base.states[j], image)] for j in base.succ[i]))
    labels = tuple(f"{e}/{c.value}" for e, c in states)
    return TransitionSystem(states, tuple(succ), "edge_color", labels)


def vertex_system(rule: SubdivisionRule) -> TransitionSystem:
    ids = tuple(rule.post)
    succ = tuple((ids.index(rule.vertex[v].image),) for v in ids)
    return TransitionSystem(ids, succ, "vertex")


def forget_color(ec: TransitionSystem, edge: TransitionSystem) -> np.ndarray:
    """Letter map from edge-color states to edge states."""
    return np.array([edge.index[e] for e, _ in ec.states], dtype=np.int64)


def higher_block(ts: TransitionSystem, k: int) -> BlockSystem:
    """Higher-block presentation on admissible k-words with (k-1)-overlaps."""
    if k < 1:
        raise ValueError("block length must be at least 1")
    words: List[Tuple[int, ...]] = [(i,) for i in range(ts.size)]
    for _ in range(k - 1):
        words = [w + (j,) for w in words for j in ts.succ[w[-1]]]
    words.sort()
    index = {w: i for i, w in enumerate(words)}
    succ = tuple(tuple(index[w[1:] + (j,)] for j in ts.succ[w[-1]]) for w in words)
    labels = tuple("-".join(ts.labels[i] for i in w) for w in words)
    return BlockSystem(tuple(words), succ, ts.kind, labels, base=ts, k=k)


def as_block(ts: TransitionSystem, k: int) -> BlockSystem:
    if isinstance(ts, BlockSystem) and ts.k == k:
        return ts
    base = ts.base if isinstance(ts, BlockSystem) and ts.base is not None else ts
    return higher_block(base, k)


# --------------------------------------------------------------------------
# queries


def is_mixing(ts: TransitionSystem, horizon: Optional[int] = None) -> bool:
    """True iff some power n <= horizon of the matrix is entrywise positive."""
    return mixing_exponent(ts, horizon) is not None


def mixing_exponent(ts: TransitionSystem, horizon: Optional[int] = None) -> Optional[int]:
    n_max = ts.size ** 2 if horizon is None else horizon
    a = ts.matrix.astype(bool)
    p = a.copy()
    for n in range(1, n_max + 1):
        if p.all():
            return n
        p = (p.astype(np.int64) @ a.astype(np.int64)) > 0
    return None


def count_fixed(ts: TransitionSystem, n: int) -> int:
    """trace(A^n) in exact integer arithmetic; equals card Fix(sigma^n)."""
    if n < 1:
        raise ValueError("n must be at least 1")
    total = 0
    for s in range(ts.size):
        # walks of length j from s, by end state
        vec = {s: 1}
        for _ in range(n):
            nxt: Dict[int, int] = {}
            for i, c in vec.items():
                for j in ts.succ[i]:
                    nxt[j] = nxt.get(j, 0) + c
            vec = nxt
        total += vec.get(s, 0)
    return total


def count_words(ts: TransitionSystem, n: int) -> int:
    """Number of admissible words of length n."""
    if n < 1:
        return 0
    vec = [1] * ts.size
    for _ in range(n - 1):
        nxt = [0] * ts.size
        for i, c in enumerate(vec):
            for j in ts.succ[i]:
                nxt[j] += c
        vec = nxt
    return sum(vec)


def restricted_trace(ts: TransitionSystem, allowed: Sequence[Sequence[int]]) -> int:
    """Number of cyclic words w with w_i in allowed[i] for all i (exact)."""
    n = len(allowed)
    sets = [set(a) for a in allowed]
    total = 0
    for s in sets[0]:
        vec = {s: 1}
        for i in range(1, n + 1):
            target = sets[i % n]
            nxt: Dict[int, int] = {}
            for a, c in vec.items():
                for b in ts.succ[a]:
                    if b in target:
                        nxt[b] = nxt.get(b, 0) + c
            vec = nxt
        total += vec.get(s, 0)
    return total
