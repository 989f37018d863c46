import math
import random

import pytest
from hypothesis import given, settings, strategies as st

from twkit.decompose import (alg1, alg_alpha, approximate, compress1,
                             compress_alpha, find_partial_td, find_td,
                             mode_width_bound, rs_4approx, search_min_k)
from twkit.exact import exact_treewidth
from twkit.graph import Graph
from twkit.tables import DsState, TW_EXCEEDS
from twkit.td import min_degree_decomposition, validate, width

from conftest import (complete_graph, cycle_graph, grid_graph, ktree,
                      path_graph, random_connected_graph, random_graph,
                      random_tree)


def check_accepted(g, td, bound):
    assert validate(g, td) is None
    assert width(td) <= bound


# ------------------------------------------------------------ rs_4approx

@given(st.integers(1, 10), st.floats(0.1, 0.8), st.integers(0, 10**6),
       st.integers(0, 4))
@settings(max_examples=80, deadline=None)
def test_rs4_contract_random(n, p, seed, k):
    g = random_graph(n, p, seed)
    res = rs_4approx(g, k)
    tw = exact_treewidth(g)
    if res == TW_EXCEEDS:
        assert tw > k
    else:
        check_accepted(g, res, 4 * k + 3)
    if k >= tw:
        assert res != TW_EXCEEDS


def test_rs4_k2_rejects_k6():
    assert rs_4approx(complete_graph(6), 2) == TW_EXCEEDS


# ------------------------------------------------- alg1 / alg_alpha

@given(st.integers(1, 10), st.floats(0.1, 0.8), st.integers(0, 10**6),
       st.integers(0, 4))
@settings(max_examples=50, deadline=None)
def test_alg1_contract_random(n, p, seed, k):
    g = random_graph(n, p, seed)
    res = alg1(g, k)
    tw = exact_treewidth(g)
    if res == TW_EXCEEDS:
        assert tw > k
    else:
        check_accepted(g, res, 3 * k + 4)
    if k >= tw:
        assert res != TW_EXCEEDS


@given(st.integers(1, 10), st.floats(0.1, 0.8), st.integers(0, 10**6),
       st.integers(0, 4))
@settings(max_examples=50, deadline=None)
def test_alg_alpha_contract_random(n, p, seed, k):
    g = random_graph(n, p, seed)
    res = alg_alpha(2, g, k)
    tw = exact_treewidth(g)
    if res == TW_EXCEEDS:
        assert tw > k
    else:
        check_accepted(g, res, 5 * k + 4)
    if k >= tw:
        assert res != TW_EXCEEDS


def test_alpha_one_matches_3approx_bound():
    g = grid_graph(3, 4)
    res = alg_alpha(1, g, 3)
    check_accepted(g, res, 3 * 3 + 4)


# --------------------------------------------------------- compress

def test_compress1_shrinks_width():
    g = ktree(40, 2, seed=9)
    wide = min_degree_decomposition(g)
    # pad to something wide but under the data-structure cap
    res = compress1(g, 2, frozenset(), wide)
    assert res != TW_EXCEEDS
    check_accepted(g, res, 3 * 2 + 4)
    assert res.bags[res.root] == frozenset()


def test_compress1_rejects_low_k():
    g = complete_graph(8)
    res = compress1(g, 2, frozenset(), min_degree_decomposition(g))
    assert res == TW_EXCEEDS


def test_compress_alpha_bound():
    g = ktree(60, 3, seed=4)
    res = compress_alpha(2, g, 3, frozenset(), min_degree_decomposition(g))
    assert res != TW_EXCEEDS
    check_accepted(g, res, 5 * 3 + 4)


# ------------------------------------------- find_td / find_partial_td

def make_ds(g, k):
    return DsState(g, k, min_degree_decomposition(g))


def test_find_td_bag_count_and_width():
    for seed in range(5):
        g = random_connected_graph(18, 0.15, seed=seed)
        k = exact_treewidth(g)
        ds = make_ds(g, k)
        before = ds.snapshot()
        res = find_td(ds)
        assert ds.snapshot() == before
        if res == TW_EXCEEDS:
            pytest.fail("find_td rejected at k = exact treewidth")
        assert validate(g, res) is None
        assert res.node_count() <= 2 * g.n
        # documented cap: bag size <= |S| + k + 2 with |S| <= 2k+3
        assert width(res) <= (2 * k + 3) + (k + 2) - 1


def test_find_partial_td_bounds():
    for seed in range(4):
        n = 300
        g = ktree(n, 2, seed=seed)
        k = 2
        ds = make_ds(g, k)
        before = ds.snapshot()
        log_threshold = max(2, math.ceil(math.log2(n)))
        res = find_partial_td(ds, log_threshold)
        assert ds.snapshot() == before
        assert res != TW_EXCEEDS
        partial, covered = res
        assert partial.node_count() <= 42 * n / math.log2(n)
        # uncovered components are small, with small bag-contained borders
        uncovered = set(range(n)) - set(covered)
        seen = set()
        from twkit.td import build_forgotten_map, locate_bag_containing
        fmap = build_forgotten_map(partial)
        for v in sorted(uncovered):
            if v in seen:
                continue
            comp = {v}
            stack = [v]
            seen.add(v)
            while stack:
                a = stack.pop()
                for b in g.adjacency[a]:
                    if b in uncovered and b not in seen:
                        seen.add(b)
                        comp.add(b)
                        stack.append(b)
            assert len(comp) < log_threshold
            border = {w for x in comp for w in g.adjacency[x]
                      if w not in uncovered}
            assert len(border) <= 4 * k + 3
            assert locate_bag_containing(partial, fmap, border) is not None


# --------------------------------------------------------- end-to-end

def test_mode_width_bound():
    assert mode_width_bound("rs4", 2) == 11
    assert mode_width_bound("three", 2) == 10
    assert mode_width_bound("five", 2) == 14


def test_approximate_disconnected_graph():
    g = Graph(7, [(0, 1), (2, 3), (3, 4), (5, 6)])
    res = approximate(g, 1, "three")
    check_accepted(g, res, 3 * 1 + 4)


def test_approximate_edgeless_and_tiny():
    res = approximate(Graph(1, []), 0, "five")
    check_accepted(Graph(1, []), res, 4)
    res = approximate(Graph(3, []), 0, "three")
    check_accepted(Graph(3, []), res, 4)


def test_approximate_structured():
    cases = [(path_graph(200), 1), (cycle_graph(150), 2),
             (grid_graph(4, 5), 4), (ktree(120, 3, seed=1), 3),
             (random_tree(150, seed=2), 1)]
    for g, k in cases:
        for mode in ("rs4", "three", "five"):
            res = approximate(g, k, mode)
            assert res != TW_EXCEEDS, (mode, k)
            check_accepted(g, res, mode_width_bound(mode, k))


def test_search_min_k():
    g = grid_graph(3, 4)  # treewidth 3
    k, td = search_min_k(g, "five")
    assert k <= 3
    check_accepted(g, td, mode_width_bound("five", k))
    assert exact_treewidth(g) <= width(td) + 0  # sanity: valid decomposition
