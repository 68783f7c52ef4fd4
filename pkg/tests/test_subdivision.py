import copy
import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from fractions import Fraction as F

from orbitzeta.pillow import BUILTIN_MAPS, build_rule, canonical
from orbitzeta.shifts import count_words, edge_shift, tile_shift
from orbitzeta.subdivision import (CellWord, Color, DATA_DIR, InvalidRuleError, RuleParseError, WordError,
                                   check_tile_word, joins_opposite_sides, load_rule, parse_rule,
                                   rule_to_document, shipped_rules, validate_rule, vertex_local_degree,
                                   word_cell_degree)


def doc(name="pillow2x2"):
    return json.loads((DATA_DIR / f"{name}.json").read_text())


def test_color_involution():
    assert {c.value for c in Color} == {"black", "white"}
    for c in Color:
        assert c.other().other() is c and c.other() is not c


@pytest.mark.parametrize("name", sorted(BUILTIN_MAPS))
def test_shipped_files_match_generator(name):
    assert doc(name) == json.loads(json.dumps(build_rule(BUILTIN_MAPS[name])))


def test_parse_pillow2x2(p2):
    assert p2.degree == 4 and p2.m == 4
    assert len(p2.one_tiles) == 8 and len(p2.one_edges) == 16


def test_round_trip(any_rule):
    again = parse_rule(rule_to_document(any_rule))
    assert rule_to_document(again) == rule_to_document(any_rule)


@pytest.mark.parametrize("bad", ["", "   ", b"", "{}"])
def test_empty_document(bad):
    with pytest.raises(RuleParseError):
        parse_rule(bad)


def test_missing_field_names_path():
    d = doc()
    del d["one_edges"][3]["endpoints"]
    with pytest.raises(RuleParseError, match=r"one_edges\[3\]"):
        parse_rule(d)


def test_dangling_vertex():
    d = doc()
    d["one_edges"][0]["endpoints"][0] = "nowhere"
    with pytest.raises(RuleParseError, match="nowhere"):
        parse_rule(d)


def test_non_boolean_flag():
    d = doc()
    d["one_edges"][0]["on_curve"] = "yes"
    with pytest.raises(RuleParseError):
        parse_rule(d)


def test_load_missing():
    with pytest.raises(FileNotFoundError):
        load_rule("no_such_rule")


def test_shipped_rule_names():
    assert shipped_rules() == ["pillow2x2", "pillow3x3", "pillow_rot2"]


def test_validate_shipped(any_rule):
    rep = validate_rule(any_rule)
    assert rep.ok, rep.violations
    assert len(any_rule.one_tiles) == 2 * any_rule.degree
    assert len(any_rule.one_edges) == any_rule.m * any_rule.degree


def test_validate_idempotent(p2):
    assert validate_rule(p2).to_dict() == validate_rule(p2).to_dict()


def test_flipped_image_color_fault():
    d = doc()
    t = d["one_tiles"][0]
    t["image_color"] = "black" if t["image_color"] == "white" else "white"
    rep = validate_rule(parse_rule(d))
    assert rep.cites("opposite_color_adjacency")


def test_extra_boundary_edge_fault():
    d = doc()
    b = d["one_tiles"][0]["boundary"]
    b.extend(b[:2])
    rep = validate_rule(parse_rule(d))
    assert rep.cites("m_gon")


def test_edge_count_fault():
    d = doc()
    d["degree"] = 5
    rep = validate_rule(parse_rule(d))
    assert rep.cites("tile_count") and rep.cites("edge_count")


def test_orientation_fault():
    d = doc()
    e = next(e for e in d["one_edges"] if e["on_curve"])
    e["orientation_preserving"] = not e["orientation_preserving"]
    assert not validate_rule(parse_rule(d)).ok


def test_local_degrees(p2):
    assert vertex_local_degree(p2, "a") == 1
    for v in p2.post:
        assert vertex_local_degree(p2, v) == 1
    centers = [v.id for v in p2.one_vertices if v.image == "c" and v.id not in p2.post]
    assert centers and all(vertex_local_degree(p2, v) == 2 for v in centers)
    # local degrees over each postcritical value sum to deg f
    for q in p2.post:
        assert sum(vertex_local_degree(p2, v.id) for v in p2.one_vertices if v.image == q) == 4


def test_local_degree_unknown(p2):
    with pytest.raises(InvalidRuleError):
        vertex_local_degree(p2, "zz")


def test_word_cell_degree(p2):
    assert word_cell_degree(p2, None, ["a"]) == 1
    center = next(v.id for v in p2.one_vertices if v.image == "c" and v.id not in p2.post)
    assert word_cell_degree(p2, None, [center, "c"]) == 2
    assert word_cell_degree(p2, None, ["b", "a", "a"]) == 1
    with pytest.raises(WordError):
        word_cell_degree(p2, None, ["a", "b"])
    with pytest.raises(WordError):
        word_cell_degree(p2, None, [])


def test_joins_opposite_sides_pillow2x2(p2):
    for t in p2.one_tiles:
        assert not joins_opposite_sides(p2, CellWord("tile", (t.id,)))


def test_joins_opposite_sides_rot2():
    r = load_rule("pillow_rot2")
    assert all(joins_opposite_sides(r, CellWord("tile", (t.id,))) for t in r.one_tiles)


def test_joins_opposite_sides_longer_words(p2):
    ts = tile_shift(p2)
    for a in range(ts.size):
        for b in ts.succ[a]:
            w = CellWord("tile", (ts.states[a], ts.states[b]))
            assert not joins_opposite_sides(p2, w)


def test_word_errors(p2):
    with pytest.raises(WordError):
        check_tile_word(p2, [])
    with pytest.raises(WordError):
        joins_opposite_sides(p2, CellWord("tile", ()))
    ts = tile_shift(p2)
    bad = next((ts.states[a], ts.states[b]) for a in range(ts.size) for b in range(ts.size)
               if b not in ts.succ[a])
    with pytest.raises(WordError):
        check_tile_word(p2, bad)


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_tile_word_counts(any_rule, n):
    assert count_words(tile_shift(any_rule), n) == 2 * any_rule.degree ** n


def test_edge_word_counts(p2):
    # on-curve n-edges: C is cut into 2^n pieces per 0-edge by z -> 2z
    es = edge_shift(p2)
    assert count_words(es, 1) == 8


def test_checkerboard(any_rule):
    for e, tiles in any_rule.tiles_at_edge.items():
        assert len(tiles) == 2
        a, b = (any_rule.tile[t] for t in tiles)
        assert a.image_color != b.image_color


def test_curve_model(p2):
    pos = p2.curve_vertex_position
    assert [pos[v] for v in p2.post] == [0, 1, 2, 3]
    lengths = [p2.curve_interval(e)[1] - p2.curve_interval(e)[0] for e in p2.curve_order]
    assert sum(lengths) == 4


coords = st.fractions(min_value=-6, max_value=6, max_denominator=12)


@settings(max_examples=200, deadline=None)
@given(coords, coords)
def test_canonical_is_group_invariant(x, y):
    p = canonical((x, y))
    assert 0 <= p[0] <= 2 and 0 <= p[1] <= 1
    for q in [(x + 2, y), (x, y + 2), (-x, -y)]:
        assert canonical(q) == p
    assert canonical(p) == p
