"""Shared generators and helpers for the test suite."""
import random
from itertools import combinations

import pytest

from twkit.graph import Graph


def random_graph(n, p, seed):
    rng = random.Random(seed)
    edges = [(u, v) for u in range(n) for v in range(u + 1, n)
             if rng.random() < p]
    return Graph(n, edges)


def random_connected_graph(n, p, seed):
    """Random G(n, p) plus a random spanning tree to force connectivity."""
    rng = random.Random(seed)
    edges = set()
    order = list(range(n))
    rng.shuffle(order)
    for i in range(1, n):
        u, v = order[i], order[rng.randrange(i)]
        edges.add((min(u, v), max(u, v)))
    for u in range(n):
        for v in range(u + 1, n):
            if rng.random() < p:
                edges.add((u, v))
    return Graph(n, sorted(edges))


def path_graph(n):
    return Graph(n, [(i, i + 1) for i in range(n - 1)])


def cycle_graph(n):
    return Graph(n, [(i, (i + 1) % n) for i in range(n)])


def grid_graph(a, b):
    edges = []
    for i in range(a):
        for j in range(b):
            v = i * b + j
            if j + 1 < b:
                edges.append((v, v + 1))
            if i + 1 < a:
                edges.append((v, v + b))
    return Graph(a * b, edges)


def complete_graph(n):
    return Graph(n, list(combinations(range(n), 2)))


def random_tree(n, seed):
    rng = random.Random(seed)
    edges = [(rng.randrange(i), i) for i in range(1, n)]
    return Graph(n, edges)


def ktree(n, k, seed):
    """Random k-tree: K_{k+1} plus vertices attached to existing
    k-cliques.  Treewidth is exactly k for n > k."""
    assert n >= k + 1
    rng = random.Random(seed)
    edges = list(combinations(range(k + 1), 2))
    cliques = [list(c) for c in combinations(range(k + 1), k)]
    for v in range(k + 1, n):
        c = cliques[rng.randrange(len(cliques))]
        for u in c:
            edges.append((min(u, v), max(u, v)))
        for idx in range(k):
            nc = c[:]
            nc[idx] = v
            cliques.append(nc)
    return Graph(n, edges)


def partial_ktree(n, k, keep, seed):
    """Random subgraph of a k-tree: treewidth at most k."""
    rng = random.Random(seed)
    full = ktree(n, k, seed)
    edges = [e for e in full.edges() if rng.random() < keep]
    return Graph(n, edges)


class OracleState(object):
    """Adapter exposing DsState state sets under the naive-oracle
    attribute names."""

    def __init__(self, ds):
        self.s = set(ds.s_set)
        self.x = set(ds.x_set)
        self.f = set(ds.f_set)
        self.pin = ds.pin


def connected_graphs_upto(max_n):
    """All connected graphs with at most max_n vertices, one per
    isomorphism class (networkx atlas, max_n <= 7)."""
    import networkx as nx
    assert max_n <= 7
    out = []
    for h in nx.graph_atlas_g():
        n = h.number_of_nodes()
        if n < 1 or n > max_n:
            continue
        if not nx.is_connected(h):
            continue
        relabel = {v: i for i, v in enumerate(h.nodes())}
        out.append(Graph(n, [(relabel[u], relabel[v])
                             for (u, v) in h.edges()]))
    return out


@pytest.fixture(autouse=True)
def _reset_stats():
    from twkit import tables
    tables.reset_stats()
    yield
