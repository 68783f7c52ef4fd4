"""Locally constant potentials and their induced versions on the curve systems.

A tile potential of level k assigns a value to every admissible k-word of
the tile shift.  The curve systems read tile windows through the h-map
tiles X^1(e, c):

* edge-color states (e, c) use the window of tiles X^1(e_j, c_j);
* edge states fix the color of the first letter (``curve_color``) and
  propagate colors forward, c_{j+1} = image color of X^1(e_j, c_j);
* a postcritical vertex v uses the window that starts at the on-curve
  1-edge leaving v along C, with the same color rule.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from functools import cached_property
from itertools import product
from pathlib import Path
from typing import Callable, Dict, Iterable, Mapping, Optional, Sequence, Tuple

import numpy as np

from .shifts import BlockSystem, TransitionSystem, edge_color_shift, edge_shift, higher_block, \
    tile_shift, vertex_system
from .subdivision import Color, SubdivisionRule


class PotentialError(ValueError):
    pass


def admissible_words(ts: TransitionSystem, k: int):
    words = [(i,) for i in range(ts.size)]
    for _ in range(k - 1):
        words = [w + (j,) for w in words for j in ts.succ[w[-1]]]
    return words


@dataclass(frozen=True, eq=False)
class Weights:
    """Values of a level-k locally constant function on a transition system.

    ``table`` has shape (S,) * k and holds NaN on inadmissible windows.
    """

    system: TransitionSystem
    k: int
    table: np.ndarray

    @cached_property
    def block(self) -> BlockSystem:
        return higher_block(self.system, self.k)

    @cached_property
    def block_values(self) -> np.ndarray:
        return np.array([self.table[w] for w in self.block.words], dtype=float)

    @property
    def finite_values(self) -> np.ndarray:
        return self.table[np.isfinite(self.table)]

    def window(self, word: Sequence[int], i: int) -> float:
        n = len(word)
        return float(self.table[tuple(word[(i + j) % n] for j in range(self.k))])

    def cyclic_sum(self, word: Sequence[int]) -> float:
        return math.fsum(self.window(word, i) for i in range(len(word)))

    def scaled(self, c: float) -> "Weights":
        return Weights(self.system, self.k, self.table * c)

    def code_sums(self, codes: np.ndarray, n: int, bits: int) -> np.ndarray:
        """Cyclic Birkhoff sums of packed words (first letter most significant)."""
        codes = np.asarray(codes, dtype=np.uint64)
        mask = np.uint64((1 << bits) - 1)
        letters = [((codes >> np.uint64(bits * (n - 1 - p))) & mask).astype(np.intp)
                   for p in range(n)]
        total = np.zeros(codes.shape, dtype=float)
        flat = self.table.reshape(-1)
        S = self.system.size
        for i in range(n):
            idx = np.zeros(codes.shape, dtype=np.intp)
            for j in range(self.k):
                idx = idx * S + letters[(i + j) % n]
            total += flat[idx]
        return total


@dataclass(frozen=True, eq=False)
class Potential:
    """Tile-shift potential: value per admissible k-word of tile ids."""

    k: int
    values: Mapping[Tuple[str, ...], float]

    def __post_init__(self):
        if self.k < 1:
            raise PotentialError("block level k must be at least 1")
        for w, v in self.values.items():
            if len(w) != self.k:
                raise PotentialError(f"word {'-'.join(w)} has length {len(w)}, expected {self.k}")
            if not math.isfinite(v):
                raise PotentialError(f"value at {'-'.join(w)} is not finite")

    # constructors --------------------------------------------------------

    @classmethod
    def constant(cls, rule: SubdivisionRule, c: float, k: int = 1) -> "Potential":
        ts = tile_shift(rule)
        return cls(k, {tuple(ts.states[i] for i in w): float(c) for w in admissible_words(ts, k)})

    @classmethod
    def from_tile_values(cls, values: Mapping[str, float]) -> "Potential":
        return cls(1, {(t,): float(v) for t, v in values.items()})

    @classmethod
    def from_function(cls, rule: SubdivisionRule, k: int,
                      fn: Callable[[Tuple[str, ...]], float]) -> "Potential":
        ts = tile_shift(rule)
        words = [tuple(ts.states[i] for i in w) for w in admissible_words(ts, k)]
        return cls(k, {w: float(fn(w)) for w in words})

    @classmethod
    def random(cls, rule: SubdivisionRule, k: int = 1, low: float = 0.8, high: float = 1.2,
               seed: int = 0) -> "Potential":
        rng = np.random.default_rng(seed)
        ts = tile_shift(rule)
        words = [tuple(ts.states[i] for i in w) for w in admissible_words(ts, k)]
        vals = rng.uniform(low, high, size=len(words))
        return cls(k, {w: float(v) for w, v in zip(words, vals)})

    @classmethod
    def from_document(cls, doc: Mapping) -> "Potential":
        if "k" not in doc:
            raise PotentialError("potential document lacks key 'k'")
        k = int(doc["k"])
        vals = {tuple(key.split("-")): float(v) for key, v in doc.items() if key != "k"}
        return cls(k, vals)

    @classmethod
    def load(cls, path) -> "Potential":
        return cls.from_document(json.loads(Path(path).read_text(encoding="utf-8")))

    def to_document(self) -> dict:
        doc: Dict[str, float] = {"k": self.k}
        for w in sorted(self.values):
            doc["-".join(w)] = self.values[w]
        return doc

    # arithmetic ----------------------------------------------------------

    def scaled(self, c: float) -> "Potential":
        return Potential(self.k, {w: c * v for w, v in self.values.items()})

    def combine(self, other: "Potential", a: float = 1.0, b: float = 1.0) -> "Potential":
        if other.k != self.k:
            raise PotentialError("potentials live on different block levels")
        return Potential(self.k, {w: a * v + b * other.values[w] for w, v in self.values.items()})

    def is_constant(self) -> bool:
        vals = list(self.values.values())
        return all(v == vals[0] for v in vals)

    @property
    def min_value(self) -> float:
        return min(self.values.values())

    # evaluation on the tile shift ------------------------------------------

    def check(self, ts: TransitionSystem) -> None:
        for w in admissible_words(ts, self.k):
            key = tuple(ts.states[i] for i in w)
            if key not in self.values:
                raise PotentialError(f"no value for admissible word {'-'.join(key)}")

    def weights(self, ts: TransitionSystem) -> Weights:
        if ts.kind != "tile":
            raise PotentialError("tile potentials evaluate on the tile shift; use induced weights")
        self.check(ts)
        table = np.full((ts.size,) * self.k, np.nan)
        for w in admissible_words(ts, self.k):
            table[w] = self.values[tuple(ts.states[i] for i in w)]
        return Weights(ts, self.k, table)

    def value(self, word: Sequence[str]) -> float:
        return self.values[tuple(word)]


# --------------------------------------------------------------------------
# induced weights


def _color_window(rule: SubdivisionRule, edges: Sequence[str], c0: Color):
    tiles, c = [], c0
    for e in edges:
        t = rule.edge_tile(e, c)
        tiles.append(t)
        c = rule.tile[t].image_color
    return tuple(tiles)


def edge_weights(rule: SubdivisionRule, pot: Potential, curve_color: Color = Color.white,
                 es: Optional[TransitionSystem] = None) -> Weights:
    es = es or edge_shift(rule)
    table = np.full((es.size,) * pot.k, np.nan)
    for w in admissible_words(es, pot.k):
        table[w] = pot.value(_color_window(rule, [es.states[i] for i in w], curve_color))
    return Weights(es, pot.k, table)


def edge_color_weights(rule: SubdivisionRule, pot: Potential,
                       ec: Optional[TransitionSystem] = None) -> Weights:
    """h-map convention: the window of tiles X^1(e_j, c_j)."""
    ec = ec or edge_color_shift(rule)
    table = np.full((ec.size,) * pot.k, np.nan)
    for w in admissible_words(ec, pot.k):
        tiles = tuple(rule.edge_tile(*ec.states[i]) for i in w)
        table[w] = pot.value(tiles)
    return Weights(ec, pot.k, table)


def lifted_edge_weights(rule: SubdivisionRule, pot: Potential, curve_color: Color = Color.white,
                        ec: Optional[TransitionSystem] = None) -> Weights:
    """Edge weights composed with the color-forgetting factor map."""
    ec = ec or edge_color_shift(rule)
    es = edge_shift(rule)
    base = edge_weights(rule, pot, curve_color, es)
    table = np.full((ec.size,) * pot.k, np.nan)
    for w in admissible_words(ec, pot.k):
        table[w] = base.table[tuple(es.index[ec.states[i][0]] for i in w)]
    return Weights(ec, pot.k, table)


def leaving_edge(rule: SubdivisionRule, v: str) -> str:
    """The on-curve 1-edge that leaves the vertex v in the direction of C."""
    for e in rule.curve_order:
        if rule.curve_start(e) == v:
            return e
    raise PotentialError(f"vertex {v} is not on the curve")


def vertex_window(rule: SubdivisionRule, v: str, k: int, curve_color: Color = Color.white):
    """Tile window of length k read along the orbit of the postcritical vertex v."""
    edges = [leaving_edge(rule, v)]
    x = v
    for _ in range(k - 1):
        e = edges[-1]
        x = rule.vertex[x].image
        target = rule.zero_edge_index(rule.edge[e].image_zero_edge)
        hits = [g for g in rule.curve_order
                if rule.host_zero_edge(g) == target and x in rule.edge[g].endpoints]
        if len(hits) != 1:
            raise PotentialError(f"vertex window at {v} is ambiguous")
        edges.append(hits[0])
    return _color_window(rule, edges, curve_color)


def vertex_weights(rule: SubdivisionRule, pot: Potential, curve_color: Color = Color.white,
                   vs: Optional[TransitionSystem] = None) -> Weights:
    vs = vs or vertex_system(rule)
    table = np.array([pot.value(vertex_window(rule, v, pot.k, curve_color)) for v in vs.states])
    return Weights(vs, 1, table)


@dataclass(frozen=True, eq=False)
class InducedWeights:
    tile: Weights
    edge: Weights
    edge_color: Weights
    vertex: Weights


def induced_weights(rule: SubdivisionRule, pot: Potential,
                    curve_color: Color = Color.white) -> InducedWeights:
    """Weights on all four systems, using the h-map convention on Sigma_||."""
    return InducedWeights(
        tile=pot.weights(tile_shift(rule)),
        edge=edge_weights(rule, pot, curve_color),
        edge_color=edge_color_weights(rule, pot),
        vertex=vertex_weights(rule, pot, curve_color),
    )
