"""Combinatorial data of a Thurston map with an invariant Jordan curve.

A rule lists the level-1 cells over the two-tile level-0 complex and the
cellular action of the map.  Level-n cells are never built; they exist
as admissible words.  The invariant curve C is modelled as the circle
R / mZ with 0-edge i occupying [i, i + 1]; each 0-edge is cut uniformly
by its on-curve 1-edges and f maps each 1-edge affinely onto its image
0-edge.  This model has the same combinatorics as f restricted to C.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence, Tuple


class Color(str, enum.Enum):
    black = "black"
    white = "white"

    def other(self) -> "Color":
        return Color.white if self is Color.black else Color.black


class RuleParseError(ValueError):
    """Schema violation; ``path`` names the offending location."""

    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path


class InvalidRuleError(ValueError):
    pass


class WordError(ValueError):
    pass


@dataclass(frozen=True)
class ZeroComplex:
    postcritical_vertices: Tuple[str, ...]
    zero_edges: Tuple[str, ...]

    @property
    def m(self) -> int:
        return len(self.postcritical_vertices)


@dataclass(frozen=True)
class OneTile:
    id: str
    image_color: Color
    host_color: Color
    boundary: Tuple[str, ...]  # e0, v0, e1, v1, ...; v_i joins e_i and e_{i+1}

    @property
    def edges(self) -> Tuple[str, ...]:
        return self.boundary[0::2]

    @property
    def vertices(self) -> Tuple[str, ...]:
        return self.boundary[1::2]


@dataclass(frozen=True)
class OneEdge:
    id: str
    endpoints: Tuple[str, str]
    on_curve: bool
    image_zero_edge: str
    orientation_preserving: bool


@dataclass(frozen=True)
class OneVertex:
    id: str
    image: str
    is_postcritical: bool


@dataclass(frozen=True)
class CellWord:
    kind: str  # "tile" or "edge"
    letters: Tuple[str, ...]

    def __len__(self) -> int:
        return len(self.letters)


@dataclass(frozen=True, eq=False)
class SubdivisionRule:
    degree: int
    zero: ZeroComplex
    one_tiles: Tuple[OneTile, ...]
    one_edges: Tuple[OneEdge, ...]
    one_vertices: Tuple[OneVertex, ...]
    curve_order: Tuple[str, ...]
    name: str = "rule"

    # lookups -------------------------------------------------------------

    @cached_property
    def tile(self) -> Dict[str, OneTile]:
        return {t.id: t for t in self.one_tiles}

    @cached_property
    def edge(self) -> Dict[str, OneEdge]:
        return {e.id: e for e in self.one_edges}

    @cached_property
    def vertex(self) -> Dict[str, OneVertex]:
        return {v.id: v for v in self.one_vertices}

    @property
    def m(self) -> int:
        return self.zero.m

    @property
    def post(self) -> Tuple[str, ...]:
        return self.zero.postcritical_vertices

    @cached_property
    def tiles_at_vertex(self) -> Dict[str, Tuple[str, ...]]:
        out: Dict[str, List[str]] = {v.id: [] for v in self.one_vertices}
        for t in self.one_tiles:
            for v in set(t.vertices):
                out.setdefault(v, []).append(t.id)
        return {v: tuple(sorted(ts)) for v, ts in out.items()}

    @cached_property
    def tiles_at_edge(self) -> Dict[str, Tuple[str, ...]]:
        out: Dict[str, List[str]] = {e.id: [] for e in self.one_edges}
        for t in self.one_tiles:
            for e in t.edges:
                out.setdefault(e, []).append(t.id)
        return {e: tuple(ts) for e, ts in out.items()}

    @cached_property
    def curve_edges(self) -> Tuple[str, ...]:
        return tuple(sorted(e.id for e in self.one_edges if e.on_curve))

    def edge_tile(self, e: str, c: Color) -> str:
        """X^1(e, c): the 1-tile containing the on-curve edge e inside X^0_c."""
        hits = [t for t in self.tiles_at_edge.get(e, ()) if self.tile[t].host_color == c]
        if len(hits) != 1:
            raise InvalidRuleError(f"no unique 1-tile containing {e} with host color {c.value}")
        return hits[0]

    # affine model of C ---------------------------------------------------

    @cached_property
    def _curve_model(self):
        """Host 0-edge index, position interval and start vertex per on-curve edge."""
        order = list(self.curve_order)
        post = self.post
        first = self.edge[order[0]].endpoints
        start0 = first[0]
        if len(order) > 1:
            rest = set(first) - set(self.edge[order[1]].endpoints)
            if len(rest) == 1:
                (start0,) = rest
        starts: Dict[str, str] = {}
        cur = start0
        for e in order:
            starts[e] = cur
            a, b = self.edge[e].endpoints
            cur = b if a == cur else a
        idx = [i for i, e in enumerate(order) if starts[e] == post[0]]
        if not idx:
            raise InvalidRuleError("curve_order does not pass through the first postcritical vertex")
        order = order[idx[0]:] + order[:idx[0]]
        blocks: List[List[str]] = [[] for _ in range(self.m)]
        host = 0
        for n, e in enumerate(order):
            if n and starts[e] in post:
                host += 1
                if host >= self.m or starts[e] != post[host]:
                    raise InvalidRuleError("curve_order visits postcritical vertices out of cyclic order")
            blocks[host].append(e)
        if any(not b for b in blocks):
            raise InvalidRuleError("a 0-edge carries no on-curve 1-edge")
        info = {}
        for i, block in enumerate(blocks):
            k = len(block)
            for j, e in enumerate(block):
                lo = Fraction(i) + Fraction(j, k)
                info[e] = (i, lo, Fraction(1, k), starts[e])
        return info

    def host_zero_edge(self, e: str) -> int:
        return self._curve_model[e][0]

    def zero_edge_index(self, zid: str) -> int:
        return self.zero.zero_edges.index(zid)

    def curve_interval(self, e: str) -> Tuple[Fraction, Fraction]:
        _, lo, w, _ = self._curve_model[e]
        return lo, lo + w

    def curve_start(self, e: str) -> str:
        return self._curve_model[e][3]

    def curve_preserving(self, e: str) -> bool:
        """Whether f|_e respects the orientation of C (derived from vertex images)."""
        img = self.zero_edge_index(self.edge[e].image_zero_edge)
        return self.vertex[self.curve_start(e)].image == self.post[img]

    def curve_map(self, e: str, x: Fraction) -> Fraction:
        """f|_e in the affine model; x must lie in the interval of e."""
        lo, hi = self.curve_interval(e)
        img = self.zero_edge_index(self.edge[e].image_zero_edge)
        u = (x - lo) / (hi - lo)
        return Fraction(img) + (u if self.curve_preserving(e) else 1 - u)

    def curve_inverse(self, e: str, y: Fraction) -> Fraction:
        """(f|_e)^{-1}(y) for y in the image 0-edge interval (taken mod m)."""
        lo, hi = self.curve_interval(e)
        img = self.zero_edge_index(self.edge[e].image_zero_edge)
        u = y - img
        if self.curve_preserving(e):
            return lo + u * (hi - lo)
        return hi - u * (hi - lo)

    @cached_property
    def curve_vertex_position(self) -> Dict[str, Fraction]:
        """Position on C of every 1-vertex lying on C."""
        pos: Dict[str, Fraction] = {}
        for e in self.curve_order:
            lo, hi = self.curve_interval(e)
            a = self.curve_start(e)
            b = [v for v in self.edge[e].endpoints if v != a] or [a]
            pos.setdefault(a, lo)
            pos.setdefault(b[0], hi % self.m)
        return pos

    @cached_property
    def curve_edges_sorted(self) -> Tuple[str, ...]:
        return tuple(sorted(self.curve_order, key=lambda e: self.curve_interval(e)[0]))


# --------------------------------------------------------------------------
# parsing

_REQUIRED = ("degree", "post", "zero_edges", "one_tiles", "one_edges", "one_vertices", "curve_order")


def _need(obj: dict, key: str, path: str):
    if not isinstance(obj, dict) or key not in obj:
        raise RuleParseError(f"{path}.{key}" if path else key, "missing required field")
    return obj[key]


def _color(value, path: str) -> Color:
    try:
        return Color(value)
    except ValueError:
        raise RuleParseError(path, f"unknown color {value!r}") from None


def _bool(value, path: str) -> bool:
    if not isinstance(value, bool):
        raise RuleParseError(path, "expected a boolean")
    return value


def parse_rule(document) -> SubdivisionRule:
    """Parse a rule from JSON text, bytes, or an already decoded dict."""
    if isinstance(document, (str, bytes)):
        text = document.decode("utf-8") if isinstance(document, bytes) else document
        if not text.strip():
            raise RuleParseError("<document>", "empty document")
        try:
            document = json.loads(text)
        except json.JSONDecodeError as exc:
            raise RuleParseError("<document>", f"invalid JSON ({exc.msg})") from None
    if not isinstance(document, dict) or not document:
        raise RuleParseError("<document>", "empty document")
    for key in _REQUIRED:
        _need(document, key, "")

    degree = document["degree"]
    if not isinstance(degree, int) or isinstance(degree, bool):
        raise RuleParseError("degree", "expected an integer")
    post = tuple(str(p) for p in document["post"])
    zero_edges = tuple(str(z) for z in document["zero_edges"])

    vertices = []
    for i, v in enumerate(document["one_vertices"]):
        p = f"one_vertices[{i}]"
        vertices.append(OneVertex(
            id=str(_need(v, "id", p)),
            image=str(_need(v, "image", p)),
            is_postcritical=_bool(_need(v, "is_postcritical", p), f"{p}.is_postcritical"),
        ))
    vids = {v.id for v in vertices}

    edges = []
    for i, e in enumerate(document["one_edges"]):
        p = f"one_edges[{i}]"
        ends = _need(e, "endpoints", p)
        if not isinstance(ends, list) or len(ends) != 2:
            raise RuleParseError(f"{p}.endpoints", "expected two vertex ids")
        for j, v in enumerate(ends):
            if str(v) not in vids:
                raise RuleParseError(f"{p}.endpoints[{j}]", f"dangling vertex id {v!r}")
        image = str(_need(e, "image_zero_edge", p))
        if image not in zero_edges:
            raise RuleParseError(f"{p}.image_zero_edge", f"dangling 0-edge id {image!r}")
        edges.append(OneEdge(
            id=str(_need(e, "id", p)),
            endpoints=(str(ends[0]), str(ends[1])),
            on_curve=_bool(_need(e, "on_curve", p), f"{p}.on_curve"),
            image_zero_edge=image,
            orientation_preserving=_bool(_need(e, "orientation_preserving", p),
                                         f"{p}.orientation_preserving"),
        ))
    eids = {e.id for e in edges}

    tiles = []
    for i, t in enumerate(document["one_tiles"]):
        p = f"one_tiles[{i}]"
        boundary = _need(t, "boundary", p)
        if not isinstance(boundary, list):
            raise RuleParseError(f"{p}.boundary", "expected a list")
        for j, c in enumerate(boundary):
            pool = eids if j % 2 == 0 else vids
            if str(c) not in pool:
                kind = "edge" if j % 2 == 0 else "vertex"
                raise RuleParseError(f"{p}.boundary[{j}]", f"dangling {kind} id {c!r}")
        tiles.append(OneTile(
            id=str(_need(t, "id", p)),
            image_color=_color(_need(t, "image_color", p), f"{p}.image_color"),
            host_color=_color(_need(t, "host_color", p), f"{p}.host_color"),
            boundary=tuple(str(c) for c in boundary),
        ))

    for i, v in enumerate(vertices):
        if v.image not in vids and v.image not in post:
            raise RuleParseError(f"one_vertices[{i}].image", f"dangling vertex id {v.image!r}")
    for i, pv in enumerate(post):
        if pv not in vids:
            raise RuleParseError(f"post[{i}]", f"postcritical vertex {pv!r} missing from one_vertices")
    curve = tuple(str(e) for e in document["curve_order"])
    for i, e in enumerate(curve):
        if e not in eids:
            raise RuleParseError(f"curve_order[{i}]", f"dangling edge id {e!r}")

    return SubdivisionRule(
        degree=degree,
        zero=ZeroComplex(post, zero_edges),
        one_tiles=tuple(tiles),
        one_edges=tuple(edges),
        one_vertices=tuple(vertices),
        curve_order=curve,
        name=str(document.get("name", "rule")),
    )


def rule_to_document(rule: SubdivisionRule) -> dict:
    return {
        "name": rule.name,
        "degree": rule.degree,
        "post": list(rule.post),
        "zero_edges": list(rule.zero.zero_edges),
        "one_tiles": [
            {"id": t.id, "image_color": t.image_color.value, "host_color": t.host_color.value,
             "boundary": list(t.boundary)} for t in rule.one_tiles
        ],
        "one_edges": [
            {"id": e.id, "endpoints": list(e.endpoints), "on_curve": e.on_curve,
             "image_zero_edge": e.image_zero_edge,
             "orientation_preserving": e.orientation_preserving} for e in rule.one_edges
        ],
        "one_vertices": [
            {"id": v.id, "image": v.image, "is_postcritical": v.is_postcritical}
            for v in rule.one_vertices
        ],
        "curve_order": list(rule.curve_order),
    }


DATA_DIR = Path(__file__).resolve().parent / "data"


def load_rule(path_or_name) -> SubdivisionRule:
    """Load a rule from a file path or the name of a shipped rule."""
    p = Path(path_or_name)
    if not p.exists():
        candidate = DATA_DIR / f"{path_or_name}.json"
        if candidate.exists():
            p = candidate
        else:
            raise FileNotFoundError(str(path_or_name))
    return parse_rule(p.read_text(encoding="utf-8"))


def shipped_rules() -> List[str]:
    return sorted(p.stem for p in DATA_DIR.glob("*.json") if not p.stem.startswith("potential_"))


# --------------------------------------------------------------------------
# validation


@dataclass(frozen=True)
class Violation:
    invariant: str
    detail: str


@dataclass
class ValidationReport:
    violations: List[Violation] = field(default_factory=list)
    info: Dict[str, object] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return not self.violations

    def cites(self, invariant: str) -> bool:
        return any(v.invariant == invariant for v in self.violations)

    def to_dict(self) -> dict:
        return {
            "ok": self.ok,
            "violations": [{"invariant": v.invariant, "detail": v.detail} for v in self.violations],
            "info": self.info,
        }


def validate_rule(rule: SubdivisionRule) -> ValidationReport:
    """Check every structural invariant; an empty violation list means valid."""
    rep = ValidationReport()
    bad = rep.violations.append
    m, d = rule.m, rule.degree

    if m < 3:
        bad(Violation("zero_complex", f"need at least 3 postcritical vertices, got {m}"))
    if len(rule.zero.zero_edges) != m:
        bad(Violation("zero_complex", "number of 0-edges differs from number of 0-vertices"))
    if d < 2:
        bad(Violation("degree", f"degree must be at least 2, got {d}"))
    if len(rule.one_tiles) != 2 * d:
        bad(Violation("tile_count", f"{len(rule.one_tiles)} 1-tiles, expected {2 * d}"))
    if len(rule.one_edges) != m * d:
        bad(Violation("edge_count", f"{len(rule.one_edges)} 1-edges, expected {m * d}"))
    for c in Color:
        n_host = sum(t.host_color == c for t in rule.one_tiles)
        n_img = sum(t.image_color == c for t in rule.one_tiles)
        if n_host != d or n_img != d:
            bad(Violation("color_balance", f"{c.value}: {n_host} hosted, {n_img} mapped; expected {d} each"))
    for pv in rule.post:
        if not rule.vertex[pv].is_postcritical:
            bad(Violation("postcritical_flags", f"{pv} is in post but not flagged"))
    for v in rule.one_vertices:
        if v.is_postcritical and v.id not in rule.post:
            bad(Violation("postcritical_flags", f"{v.id} flagged but not in post"))
        if v.image not in rule.post:
            bad(Violation("vertex_image", f"{v.id} maps to {v.image}, which is not a 0-vertex"))

    # m-gon boundaries
    for t in rule.one_tiles:
        b = t.boundary
        if len(b) != 2 * m:
            bad(Violation("m_gon", f"{t.id} has boundary length {len(b)}, expected {2 * m}"))
            continue
        es, vs = t.edges, t.vertices
        for i in range(m):
            e1, e2 = rule.edge[es[i]], rule.edge[es[(i + 1) % m]]
            if vs[i] not in e1.endpoints or vs[i] not in e2.endpoints:
                bad(Violation("m_gon", f"{t.id}: vertex {vs[i]} is not shared by {e1.id} and {e2.id}"))

    # each edge on exactly two tiles of opposite image color
    for e in rule.one_edges:
        ts = rule.tiles_at_edge.get(e.id, ())
        if len(ts) != 2:
            bad(Violation("edge_two_tiles", f"{e.id} lies on {len(ts)} tile boundaries"))
            continue
        c1, c2 = (rule.tile[t].image_color for t in ts)
        if c1 == c2:
            bad(Violation("opposite_color_adjacency", f"tiles {ts[0]}, {ts[1]} across {e.id} share image color {c1.value}"))
        if e.on_curve:
            h1, h2 = (rule.tile[t].host_color for t in ts)
            if h1 == h2:
                bad(Violation("curve_separates", f"on-curve edge {e.id} has both tiles in the {h1.value} 0-tile"))

    # flowers
    local: Dict[str, int] = {}
    for v in rule.one_vertices:
        k = len(rule.tiles_at_vertex.get(v.id, ()))
        if k == 0 or k % 2:
            bad(Violation("flower_parity", f"{v.id} lies on {k} tiles"))
        else:
            local[v.id] = k // 2
    for pv in rule.post:
        s = sum(local.get(v.id, 0) for v in rule.one_vertices if v.image == pv)
        if s != d:
            bad(Violation("local_degree_sum", f"local degrees over preimages of {pv} sum to {s}, expected {d}"))

    # curve
    curve = list(rule.curve_order)
    on = sorted(e.id for e in rule.one_edges if e.on_curve)
    if sorted(curve) != on or len(set(curve)) != len(curve):
        bad(Violation("curve_order", "curve_order must list every on-curve edge exactly once"))
    else:
        for i, e in enumerate(curve):
            nxt = curve[(i + 1) % len(curve)]
            if not set(rule.edge[e].endpoints) & set(rule.edge[nxt].endpoints):
                bad(Violation("curve_order", f"consecutive edges {e}, {nxt} do not share an endpoint"))
        try:
            model = rule._curve_model
        except InvalidRuleError as exc:
            bad(Violation("curve_order", str(exc)))
            model = None
        if model is not None:
            for e in curve:
                oe = rule.edge[e]
                img = rule.zero_edge_index(oe.image_zero_edge)
                want = {rule.post[img], rule.post[(img + 1) % m]}
                got = {rule.vertex[v].image for v in oe.endpoints}
                if got != want:
                    bad(Violation("curve_invariance", f"{e} does not map onto 0-edge {oe.image_zero_edge}"))
                    continue
                if oe.endpoints[0] != rule.curve_start(e):
                    bad(Violation("curve_direction", f"{e} lists its endpoints against the direction of C"))
                if oe.orientation_preserving != rule.curve_preserving(e):
                    bad(Violation("orientation_flag", f"{e} orientation flag disagrees with its vertex images"))
    for e in rule.one_edges:
        img = rule.zero_edge_index(e.image_zero_edge)
        want = {rule.post[img], rule.post[(img + 1) % m]}
        got = {rule.vertex[v].image for v in e.endpoints if v in rule.vertex}
        if got != want and not e.on_curve:
            bad(Violation("cellular_map", f"{e.id} endpoints do not map onto {e.image_zero_edge}"))

    # Euler characteristic
    chi = len(rule.one_vertices) - len(rule.one_edges) + len(rule.one_tiles)
    if chi != 2:
        bad(Violation("euler_characteristic", f"V - E + F = {chi}"))

    if rep.ok:
        from . import shifts

        ts = shifts.tile_shift(rule)
        mixing = shifts.is_mixing(ts)
        if not mixing:
            bad(Violation("tile_shift_mixing", "tile shift is not topologically mixing"))
        try:
            joins = [t.id for t in rule.one_tiles
                     if joins_opposite_sides(rule, CellWord("tile", (t.id,)))]
        except InvalidRuleError as exc:
            joins = [f"error: {exc}"]
        rep.info["tiles_joining_opposite_sides"] = joins
        rep.info["no_tile_joins_opposite_sides"] = not joins
        rep.info["tile_count"] = len(rule.one_tiles)
        rep.info["edge_count"] = len(rule.one_edges)
    return rep


# --------------------------------------------------------------------------
# queries


def vertex_local_degree(rule: SubdivisionRule, v: str) -> int:
    if v not in rule.vertex:
        raise InvalidRuleError(f"unknown vertex {v!r}")
    k = len(rule.tiles_at_vertex.get(v, ()))
    if k == 0 or k % 2:
        raise InvalidRuleError(f"vertex {v} has an odd flower of {k} tiles")
    return k // 2


def word_cell_degree(rule: SubdivisionRule, word: CellWord, v: Sequence[str]) -> int:
    """deg_{f^n} at a vertex identified by its itinerary (v, f(v), ..., f^{n-1}(v)).

    ``word`` is the cell the vertex sits on; when given, each f^i(v) must lie
    on the i-th letter.
    """
    itin = list(v)
    if not itin:
        raise WordError("empty itinerary")
    for a, b in zip(itin, itin[1:]):
        if a not in rule.vertex or rule.vertex[a].image != b:
            raise WordError(f"itinerary step {a} -> {b} is not the vertex map")
    if word is not None and len(word.letters):
        for i, (x, c) in enumerate(zip(itin, word.letters)):
            cells = rule.tiles_at_vertex.get(x, ()) if word.kind == "tile" else \
                [e for e in rule.curve_edges if x in rule.edge[e].endpoints]
            if c not in cells:
                raise WordError(f"vertex {x} is not on letter {i} ({c})")
    out = 1
    for x in itin:
        out *= vertex_local_degree(rule, x)
    return out


def check_tile_word(rule: SubdivisionRule, letters: Sequence[str]) -> None:
    if not letters:
        raise WordError("word of length 0 has no cell")
    for i, x in enumerate(letters):
        if x not in rule.tile:
            raise WordError(f"letter {i} ({x!r}) is not a 1-tile")
    for i, (a, b) in enumerate(zip(letters, letters[1:])):
        if rule.tile[a].image_color != rule.tile[b].host_color:
            raise WordError(f"inadmissible transition {a} -> {b} at position {i}")


Interval = Tuple[Fraction, Fraction]


def _tile_curve_pieces(rule: SubdivisionRule, t: str):
    """On-curve edges of a 1-tile and its on-curve corners not covered by them."""
    tile = rule.tile[t]
    edges = [e for e in tile.edges if rule.edge[e].on_curve]
    covered = {v for e in edges for v in rule.edge[e].endpoints}
    pos = rule.curve_vertex_position
    points = [v for v in tile.vertices if v in pos and v not in covered]
    return edges, points


def _intersect_zero_edge(intervals: Iterable[Interval], j: int, m: int) -> List[Interval]:
    out = []
    for lo, hi in intervals:
        for sh in (-m, 0, m):
            a, b = max(lo + sh, Fraction(j)), min(hi + sh, Fraction(j + 1))
            if a <= b:
                out.append((a, b))
    return out


def _contains(intervals: Iterable[Interval], x: Fraction, m: int) -> bool:
    x = x % m
    for lo, hi in intervals:
        for sh in (-m, 0, m):
            if lo + sh <= x <= hi + sh:
                return True
    return False


def tile_word_curve_set(rule: SubdivisionRule, letters: Sequence[str]) -> List[Interval]:
    """X^n(w) intersected with C, as closed intervals in the affine model."""
    check_tile_word(rule, letters)
    m = rule.m
    pos = rule.curve_vertex_position
    current: Optional[List[Interval]] = None
    for t in reversed(letters):
        edges, points = _tile_curve_pieces(rule, t)
        nxt: List[Interval] = []
        if current is None:
            for e in edges:
                nxt.append(rule.curve_interval(e))
            for v in points:
                nxt.append((pos[v], pos[v]))
        else:
            for e in edges:
                img = rule.zero_edge_index(rule.edge[e].image_zero_edge)
                for a, b in _intersect_zero_edge(current, img, m):
                    u, w = rule.curve_inverse(e, a), rule.curve_inverse(e, b)
                    nxt.append((min(u, w), max(u, w)))
            for v in points:
                image = rule.vertex[v].image
                if _contains(current, Fraction(rule.post.index(image)), m):
                    nxt.append((pos[v], pos[v]))
        current = nxt
    return current or []


def joins_opposite_sides(rule: SubdivisionRule, word: CellWord) -> bool:
    if word.kind != "tile":
        raise WordError("joins_opposite_sides takes a tile word")
    pieces = tile_word_curve_set(rule, word.letters)
    m = rule.m
    met = {j for j in range(m) if _intersect_zero_edge(pieces, j, m)}
    if m == 3:
        return len(met) == 3
    for i in met:
        for j in met:
            if (i - j) % m not in (0, 1, m - 1):
                return True
    return False
