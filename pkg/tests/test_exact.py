import pytest
from hypothesis import given, settings, strategies as st

from twkit.exact import (bb_treewidth, decide_tw_le, decomposition_from_order,
                         exact_decomposition, exact_treewidth)
from twkit.td import validate, width

from conftest import (complete_graph, cycle_graph, grid_graph, ktree,
                      path_graph, random_graph, random_tree)


def test_known_treewidths():
    assert exact_treewidth(path_graph(8)) == 1
    assert exact_treewidth(cycle_graph(8)) == 2
    assert exact_treewidth(complete_graph(6)) == 5
    assert exact_treewidth(grid_graph(3, 4)) == 3
    assert exact_treewidth(random_tree(15, seed=1)) == 1
    assert exact_treewidth(ktree(12, 3, seed=2)) == 3
    # edgeless and singleton graphs
    from twkit.graph import Graph
    assert exact_treewidth(Graph(1, [])) == 0
    assert exact_treewidth(Graph(5, [])) == 0


@given(st.integers(1, 11), st.floats(0.1, 0.9), st.integers(0, 10**6))
@settings(max_examples=80, deadline=None)
def test_exact_agrees_with_branch_and_bound(n, p, seed):
    g = random_graph(n, p, seed)
    tw = exact_treewidth(g)
    assert tw == bb_treewidth(g)
    assert decide_tw_le(g, tw)
    if tw > 0:
        assert not decide_tw_le(g, tw - 1)


@given(st.integers(1, 11), st.floats(0.1, 0.9), st.integers(0, 10**6))
@settings(max_examples=60, deadline=None)
def test_exact_decomposition_is_valid_and_optimal(n, p, seed):
    g = random_graph(n, p, seed)
    td = exact_decomposition(g)
    assert validate(g, td) is None
    assert width(td) == exact_treewidth(g)


def test_decomposition_from_order():
    g = cycle_graph(5)
    td = decomposition_from_order(g, list(range(5)))
    assert validate(g, td) is None
    assert width(td) >= 2
