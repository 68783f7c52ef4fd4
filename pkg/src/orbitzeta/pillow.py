"""Build subdivision rules for Lattès-type maps of the square pillow.

The pillow is the quotient of the plane by z -> z + 2, z -> z + 2i and
z -> -z.  A fundamental domain is [0, 2] x [0, 1]; the front face
[0, 1]^2 is white and the back face [1, 2] x [0, 1] is black.  The
equator C is the boundary of the front face, oriented a -> b -> c -> d
with the white face on its left, where a, b, c, d are the images of
0, 1, 1 + i, i.

A map is given by an integer matrix L preserving the lattice 2Z[i].
Level-1 cells are the pillow images of the grid cells of L^{-1}(Z^2-grid).
All coordinates are exact rationals.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction as Fr
from typing import Dict, List, Tuple

Point = Tuple[Fr, Fr]

POST = ("a", "b", "c", "d")
ZERO_EDGES = ("e0", "e1", "e2", "e3")
_CORNERS = {
    (Fr(0), Fr(0)): "a",
    (Fr(1), Fr(0)): "b",
    (Fr(1), Fr(1)): "c",
    (Fr(0), Fr(1)): "d",
}


def canonical(p: Point) -> Point:
    """Representative of a plane point in the fundamental domain."""
    x, y = p[0] % 2, p[1] % 2
    if y > 1:
        x, y = (-x) % 2, 2 - y
    if y in (0, 1) and x > 1:
        x = 2 - x
    return (x, y)


def face_color(p: Point) -> str:
    """Color of the face holding the interior point p."""
    x, _ = canonical(p)
    return "white" if x < 1 else "black"


def zero_edge_of(p: Point) -> str:
    """0-edge holding a canonical point of C that is not a corner."""
    x, y = p
    if y == 0:
        return "e0"
    if x == 1:
        return "e1"
    if y == 1:
        return "e2"
    if x == 0:
        return "e3"
    raise ValueError(f"point {p} is not on the equator")


def curve_param(p: Point) -> Fr:
    """Position along C in [0, 4), with 0-edge i occupying [i, i + 1]."""
    x, y = p
    if y == 0:
        return x
    if x == 1:
        return 1 + y
    if y == 1:
        return 2 + (1 - x)
    if x == 0:
        return (3 + (1 - y)) % 4
    raise ValueError(f"point {p} is not on the equator")


def on_equator(p: Point) -> bool:
    x, y = p
    return y in (0, 1) or x in (0, 1)


@dataclass(frozen=True)
class PillowMap:
    """Integer matrix L = [[p, q], [r, s]] acting on the plane."""

    name: str
    matrix: Tuple[Tuple[int, int], Tuple[int, int]]
    grid: Tuple[int, int]  # level-1 grid is (Z / gx) x (Z / gy)

    def apply(self, p: Point) -> Point:
        (a, b), (c, d) = self.matrix
        return (a * p[0] + b * p[1], c * p[0] + d * p[1])

    @property
    def degree(self) -> int:
        (a, b), (c, d) = self.matrix
        return abs(a * d - b * c)


BUILTIN_MAPS = {
    "pillow2x2": PillowMap("pillow2x2", ((2, 0), (0, 2)), (2, 2)),
    "pillow3x3": PillowMap("pillow3x3", ((3, 0), (0, 3)), (3, 3)),
    "pillow_rot2": PillowMap("pillow_rot2", ((0, -1), (2, 0)), (2, 1)),
}


def _midpoint(p: Point, q: Point) -> Point:
    return ((p[0] + q[0]) / 2, (p[1] + q[1]) / 2)


def build_rule(pmap: PillowMap) -> dict:
    """Return the rule document (a JSON-ready dict) for the given map."""
    gx, gy = pmap.grid
    hx, hy = Fr(1, gx), Fr(1, gy)
    if gx * gy != pmap.degree:
        raise ValueError("grid does not match the degree of L")

    vertices: Dict[Point, str] = {}
    edges: Dict[Point, dict] = {}
    tiles: List[dict] = []

    def vertex_key(p: Point) -> Point:
        c = canonical(p)
        vertices.setdefault(c, "")
        return c

    def edge_key(p: Point, q: Point) -> Point:
        m = canonical(_midpoint(p, q))
        if m not in edges:
            edges[m] = {"ends": (vertex_key(p), vertex_key(q)), "rep": (p, q)}
        return m

    for i in range(2 * gx):
        for j in range(gy):
            x0, x1 = i * hx, (i + 1) * hx
            y0, y1 = j * hy, (j + 1) * hy
            corners = [(x0, y0), (x1, y0), (x1, y1), (x0, y1)]
            sides = [edge_key(corners[s], corners[(s + 1) % 4]) for s in range(4)]
            verts = [vertex_key(corners[(s + 1) % 4]) for s in range(4)]
            center = ((x0 + x1) / 2, (y0 + y1) / 2)
            tiles.append({
                "center": canonical(center),
                "host_color": face_color(center),
                "image_color": face_color(pmap.apply(center)),
                "sides": sides,
                "verts": verts,
            })

    # ids: post corners keep their letters, other cells are numbered in
    # order of their canonical coordinates
    vid: Dict[Point, str] = {}
    others = sorted(p for p in vertices if p not in _CORNERS)
    width = len(str(len(others)))
    for p, name in _CORNERS.items():
        vid[p] = name
    for n, p in enumerate(others):
        vid[p] = f"v{n:0{width}d}"

    on_curve = sorted((m for m in edges if on_equator(m)), key=curve_param)
    off_curve = sorted((m for m in edges if not on_equator(m)))
    ordered_edges = on_curve + off_curve
    width = len(str(len(ordered_edges) - 1))
    eid = {m: f"E{n:0{width}d}" for n, m in enumerate(ordered_edges)}

    tiles.sort(key=lambda t: t["center"])
    width = len(str(len(tiles) - 1))
    for n, t in enumerate(tiles):
        t["id"] = f"X{n:0{width}d}"

    def image_vertex(p: Point) -> str:
        q = canonical(pmap.apply(p))
        if q not in _CORNERS:
            raise ValueError(f"vertex {p} does not map to a corner")
        return _CORNERS[q]

    one_vertices = []
    for p in sorted(vertices, key=lambda p: vid[p]):
        one_vertices.append({
            "id": vid[p],
            "image": image_vertex(p),
            "is_postcritical": p in _CORNERS,
        })

    one_edges = []
    for m in ordered_edges:
        p, q = edges[m]["rep"]
        cp, cq = canonical(p), canonical(q)
        curve = on_equator(m)
        if curve:
            # list the endpoints in the direction of C
            host = zero_edge_of(m)
            lo = int(ZERO_EDGES.index(host))
            tp, tq = curve_param(cp), curve_param(cq)
            if tp == 0 and lo == 3:
                tp = Fr(4)
            if tq == 0 and lo == 3:
                tq = Fr(4)
            if tp > tq:
                cp, cq, p, q = cq, cp, q, p
        image_mid = canonical(pmap.apply(_midpoint(p, q)))
        target = zero_edge_of(image_mid)
        start = POST[ZERO_EDGES.index(target)]
        one_edges.append({
            "id": eid[m],
            "endpoints": [vid[cp], vid[cq]],
            "on_curve": curve,
            "image_zero_edge": target,
            "orientation_preserving": image_vertex(p) == start,
        })

    one_tiles = []
    for t in tiles:
        boundary: List[str] = []
        for s in range(4):
            boundary += [eid[t["sides"][s]], vid[t["verts"][s]]]
        one_tiles.append({
            "id": t["id"],
            "image_color": t["image_color"],
            "host_color": t["host_color"],
            "boundary": boundary,
        })

    return {
        "name": pmap.name,
        "degree": pmap.degree,
        "post": list(POST),
        "zero_edges": list(ZERO_EDGES),
        "one_tiles": one_tiles,
        "one_edges": one_edges,
        "one_vertices": one_vertices,
        "curve_order": [eid[m] for m in on_curve],
    }
