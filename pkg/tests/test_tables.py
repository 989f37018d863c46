import random
from fractions import Fraction

import pytest

from twkit.exact import bb_treewidth, naive_query_answers
from twkit.graph import Graph
from twkit.separators import check_balanced
from twkit.tables import OVERFLOW, TW_EXCEEDS, DsState
from twkit.td import min_degree_decomposition

from conftest import (OracleState, cycle_graph, path_graph,
                      random_connected_graph, random_tree)


def ds_depth(ds):
    return max(ds.node_depth) if ds.ntd is not None else 0


def component_of(g, v, removed):
    comp = {v}
    stack = [v]
    while stack:
        a = stack.pop()
        for b in g.adjacency[a]:
            if b not in removed and b not in comp:
                comp.add(b)
                stack.append(b)
    return comp


def check_queries(ds, g, k):
    """All four queries against from-scratch recomputation."""
    naive = naive_query_answers(g, k, OracleState(ds))
    u = component_of(g, ds.pin, ds.s_set)

    assert ds.card_u() == len(u)

    nbhd = ds.find_neighborhood()
    if nbhd is OVERFLOW:
        assert len(naive["neighborhood"]) > 4 * k + 3
    else:
        assert nbhd == naive["neighborhood"]

    ds.set_whatsep("s")
    ssep = ds.find_s_separator()
    if ssep is TW_EXCEEDS:
        assert naive["s_separator"] is None
    else:
        assert naive["s_separator"] is not None
        assert len(ssep) <= k + 1
        ground = sorted(ds.s_set | u)
        assert check_balanced(g, ground, ds.s_set, set(ssep),
                              Fraction(1, 2))

    npin = ds.find_next_pin()
    if npin is None:
        assert naive["next_pin"] is None
    else:
        assert naive["next_pin"] is not None
        size, comps = naive["next_pin"]
        assert npin[1] == size
        assert any(npin[0] in c for c in comps)

    ds.set_whatsep("u")
    usep = ds.find_u_separator()
    ds.set_whatsep("s")
    if usep is TW_EXCEEDS:
        sub, _ = g.induced_subgraph(sorted(u))
        assert bb_treewidth(sub) > k
    else:
        assert len(usep) <= k + 1
        assert set(usep) <= u
        if len(u) > 1:
            assert check_balanced(g, sorted(u), u, set(usep),
                                  Fraction(8, 9))


def run_session(g, k, rng, n_updates, table_width_threshold=5,
                small_u_threshold=None, check_locality=False):
    td = min_degree_decomposition(g)
    ds = DsState(g, k, td, table_width_threshold=table_width_threshold,
                 small_u_threshold=small_u_threshold)
    n = g.n
    depth = ds_depth(ds)
    check_queries(ds, g, k)
    for _ in range(n_updates):
        op = rng.randrange(6)
        if op == 0 and len(ds.s_set) < n - 1:
            v = rng.choice([w for w in range(n)
                            if w not in ds.s_set and w != ds.pin])
            ds.insert_s(v)
        elif op == 1 and ds.s_set:
            ds.remove_s(rng.choice(sorted(ds.s_set)))
        elif op == 2:
            outside = [w for w in range(n) if w not in ds.s_set]
            ds.set_pin(rng.choice(outside))
        else:
            u = component_of(g, ds.pin, ds.s_set)
            if op == 3:
                cand = [w for w in u if w not in ds.x_set]
                if cand:
                    ds.insert_x(rng.choice(cand))
            elif op == 4 and ds.x_set:
                ds.remove_x(rng.choice(sorted(ds.x_set)))
            elif op == 5:
                if ds.f_set and rng.random() < 0.5:
                    ds.remove_f(rng.choice(sorted(ds.f_set)))
                else:
                    cand = [w for w in u if w not in ds.f_set]
                    if cand:
                        ds.insert_f(rng.choice(cand))
        # X and F must track S/pin moves: drop strays outside U
        u = component_of(g, ds.pin, ds.s_set)
        for v in sorted(ds.x_set - u):
            ds.remove_x(v)
        for v in sorted(ds.f_set - u):
            ds.remove_f(v)
        if check_locality:
            assert ds.last_recomputed <= 2 * (depth + 1)
        check_queries(ds, g, k)
    return ds


def test_table_mode_equivalence_path():
    rng = random.Random(11)
    g = path_graph(14)
    ds = run_session(g, 1, rng, 25, check_locality=True)
    assert ds.ntd is not None  # width-1 input stays in table mode


def test_table_mode_equivalence_tree():
    rng = random.Random(12)
    g = random_tree(16, seed=5)
    ds = run_session(g, 1, rng, 25, check_locality=True)
    assert ds.ntd is not None


def test_table_mode_equivalence_cycle():
    rng = random.Random(13)
    g = cycle_graph(12)
    ds = run_session(g, 2, rng, 20, table_width_threshold=8,
                     check_locality=True)
    assert ds.ntd is not None


def test_table_mode_traced_u_separator():
    # small_u_threshold=2 forces the trace/path-table route for |U| >= 2
    rng = random.Random(14)
    g = path_graph(12)
    ds = run_session(g, 1, rng, 15, small_u_threshold=2)
    assert ds.ntd is not None


def test_direct_mode_equivalence_random():
    rng = random.Random(15)
    for trial in range(6):
        n = rng.randint(8, 16)
        g = random_connected_graph(n, 0.3, seed=100 + trial)
        k = rng.randint(1, 3)
        ds = run_session(g, k, rng, 12)
        # dense-ish random graphs exceed the default width threshold


def test_direct_mode_updates_are_constant_size():
    g = random_connected_graph(20, 0.3, seed=42)
    td = min_degree_decomposition(g)
    ds = DsState(g, 2, td)
    if ds.ntd is None:
        ds.insert_s(ds.pin + 1 if ds.pin == 0 else 0)
        assert ds.last_recomputed == 0


def test_width_cap_rejected():
    from conftest import complete_graph
    g = complete_graph(25)
    td = min_degree_decomposition(g)  # width 24 > 10*1+9
    with pytest.raises(ValueError):
        DsState(g, 1, td)


def test_pin_in_s_rejected():
    g = path_graph(6)
    ds = DsState(g, 1, min_degree_decomposition(g))
    with pytest.raises(ValueError):
        ds.insert_s(ds.pin)
    ds.insert_s(5 if ds.pin != 5 else 4)
    with pytest.raises(ValueError):
        ds.set_pin(5 if ds.pin != 5 else 4)


def test_initial_state():
    g = path_graph(6)
    ds = DsState(g, 1, min_degree_decomposition(g), s0=(0, 1))
    assert set(ds.get_s()) == {0, 1}
    assert ds.get_pin() == 2
    assert ds.whatsep == "s"
