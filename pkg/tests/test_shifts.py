import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from orbitzeta.periodic import fixed_words
from orbitzeta.shifts import (TransitionSystem, count_fixed, count_words, edge_color_shift, edge_shift,
                              forget_color, higher_block, is_mixing, mixing_exponent, restricted_trace,
                              tile_shift, vertex_system)
from orbitzeta.subdivision import Color


def brute_trace(ts, n):
    A = ts.matrix.astype(object)
    P = np.identity(ts.size, dtype=object)
    for _ in range(n):
        P = P.dot(A)
    return int(sum(P[i, i] for i in range(ts.size)))


def test_tile_shift_pillow2x2(p2):
    ts = tile_shift(p2)
    assert ts.size == 8
    assert (ts.matrix.sum(axis=1) == 4).all()


def test_tile_rows_equal_degree(any_rule):
    ts = tile_shift(any_rule)
    assert (ts.matrix.sum(axis=1) == any_rule.degree).all()


def test_tile_transition_is_color_containment(any_rule):
    ts = tile_shift(any_rule)
    for i, a in enumerate(ts.states):
        for j, b in enumerate(ts.states):
            assert ts.allows(i, j) == (any_rule.tile[a].image_color == any_rule.tile[b].host_color)


def test_edge_shift_pillow2x2(p2):
    es = edge_shift(p2)
    assert es.size == 8
    assert (es.matrix.sum(axis=1) == 2).all()
    assert count_fixed(es, 1) == brute_trace(es, 1)


def test_edge_color_shift(p2):
    ec = edge_color_shift(p2)
    es = edge_shift(p2)
    assert ec.size == 16
    proj = forget_color(ec, es)
    # two-to-one fibres
    assert sorted(np.bincount(proj).tolist()) == [2] * es.size
    # the factor map intertwines the shifts, and colors propagate deterministically
    for i, row in enumerate(ec.succ):
        targets = [proj[j] for j in row]
        assert len(targets) == len(set(targets))
        assert set(targets) == set(es.succ[proj[i]])


def test_edge_color_transition_rule(p2):
    ec = edge_color_shift(p2)
    for i, (e1, c1) in enumerate(ec.states):
        img = p2.tile[p2.edge_tile(e1, c1)].image_color
        for j, (e2, c2) in enumerate(ec.states):
            expect = (p2.host_zero_edge(e2) == p2.zero_edge_index(p2.edge[e1].image_zero_edge)
                      and c2 == img)
            assert ec.allows(i, j) == expect


def test_nonempty_rows(any_rule):
    for ts in (tile_shift(any_rule), edge_shift(any_rule), edge_color_shift(any_rule)):
        assert all(len(r) > 0 for r in ts.succ)


def test_vertex_system(p2):
    vs = vertex_system(p2)
    assert vs.size == 4
    assert all(len(r) == 1 for r in vs.succ)
    fixed = [v for i, v in enumerate(vs.states) if vs.succ[i] == (i,)]
    assert fixed == ["a"]
    assert all(count_fixed(vs, n) == 1 for n in range(1, 9))
    assert not is_mixing(vs)


def test_higher_block(p2):
    ts = tile_shift(p2)
    b1 = higher_block(ts, 1)
    assert b1.size == ts.size and b1.succ == ts.succ
    b2 = higher_block(ts, 2)
    assert b2.size == 32
    b3 = higher_block(ts, 3)
    for n in range(2, 7):
        assert count_fixed(b2, n) == count_fixed(ts, n) == count_fixed(b3, n)
    with pytest.raises(ValueError):
        higher_block(ts, 0)


def test_mixing(p2):
    ts = tile_shift(p2)
    assert is_mixing(ts)
    # rows hit only one host color, so A itself has zeros; A^2 is positive
    assert mixing_exponent(ts) == 2


def test_permutation_not_mixing():
    perm = TransitionSystem(("x", "y", "z"), ((1,), (2,), (0,)), "tile")
    assert not is_mixing(perm, horizon=10)


def test_fixed_tile_count_n1(p2):
    ts = tile_shift(p2)
    stable = [t for t in ts.states if p2.tile[t].image_color == p2.tile[t].host_color]
    assert count_fixed(ts, 1) == len(stable) == 4


@pytest.mark.parametrize("n", range(1, 7))
def test_count_fixed_matches_enumeration(p2, n):
    for ts in (tile_shift(p2), edge_shift(p2), edge_color_shift(p2), vertex_system(p2)):
        c = count_fixed(ts, n)
        assert c == brute_trace(ts, n) == len(fixed_words(ts, n))


def test_count_fixed_bound(any_rule):
    for ts in (tile_shift(any_rule), edge_shift(any_rule), edge_color_shift(any_rule),
               vertex_system(any_rule)):
        for n in range(1, 11):
            assert count_fixed(ts, n) <= ts.size ** n


def test_count_fixed_rejects_zero(p2):
    with pytest.raises(ValueError):
        count_fixed(tile_shift(p2), 0)


def test_restricted_trace_full_sets(p2):
    ts = tile_shift(p2)
    everything = list(range(ts.size))
    assert restricted_trace(ts, [everything] * 3) == count_fixed(ts, 3)


@st.composite
def random_systems(draw):
    n = draw(st.integers(1, 6))
    succ = tuple(tuple(sorted(draw(st.sets(st.integers(0, n - 1), min_size=1)))) for _ in range(n))
    return TransitionSystem(tuple(f"s{i}" for i in range(n)), succ, "tile")


@settings(max_examples=60, deadline=None)
@given(random_systems(), st.integers(1, 6))
def test_count_fixed_random(ts, n):
    assert count_fixed(ts, n) == brute_trace(ts, n)
    assert count_fixed(ts, n) <= ts.size ** n


@settings(max_examples=40, deadline=None)
@given(random_systems(), st.integers(1, 3), st.integers(3, 6))
def test_block_conjugacy_random(ts, k, n):
    assert count_fixed(higher_block(ts, k), n) == count_fixed(ts, n)
