"""Immutable graphs and the reduction primitives used by the decomposer.

Vertices are 0..n-1.  A Graph is frozen after construction; everything that
"modifies" a graph (contraction, improvement) returns a new Graph.
"""

from collections import deque


class Graph(object):
    """Undirected simple graph with sorted adjacency lists."""

    __slots__ = ("n", "adjacency", "_adjset", "m")

    def __init__(self, n, edges):
        if n < 0:
            raise ValueError("negative vertex count")
        adj = [[] for _ in range(n)]
        seen = set()
        for (u, v) in edges:
            if not (0 <= u < n and 0 <= v < n):
                raise ValueError("vertex id out of range: (%d, %d)" % (u, v))
            if u == v:
                raise ValueError("self-loop at %d" % u)
            key = (u, v) if u < v else (v, u)
            if key in seen:
                raise ValueError("duplicate edge %r" % (key,))
            seen.add(key)
            adj[u].append(v)
            adj[v].append(u)
        self.n = n
        self.adjacency = tuple(tuple(sorted(a)) for a in adj)
        self._adjset = None
        self.m = len(seen)

    @property
    def adjset(self):
        # built on first use: most subgraphs never need set-form rows
        if self._adjset is None:
            self._adjset = tuple(frozenset(a) for a in self.adjacency)
        return self._adjset

    def neighbors(self, v):
        return self.adjacency[v]

    def has_edge(self, u, v):
        return v in self.adjset[u]

    def degree(self, v):
        return len(self.adjacency[v])

    def edges(self):
        for u in range(self.n):
            for v in self.adjacency[u]:
                if u < v:
                    yield (u, v)

    def vertices(self):
        return range(self.n)

    def induced_subgraph(self, vertices):
        """Return (subgraph, old_of_new) with vertices relabeled 0..len-1.

        old_of_new[i] is the original id of new vertex i; the relabeling is
        by ascending original id.
        """
        old_of_new = sorted(vertices)
        new_of_old = {old: new for new, old in enumerate(old_of_new)}
        # build adjacency directly: parent lists are sorted and the
        # relabeling is monotone, so filtered lists stay sorted
        adjacency = []
        m2 = 0
        for u in old_of_new:
            row = [new_of_old[v] for v in self.adjacency[u]
                   if v in new_of_old]
            adjacency.append(tuple(row))
            m2 += len(row)
        sub = Graph.__new__(Graph)
        sub.n = len(old_of_new)
        sub.adjacency = tuple(adjacency)
        sub._adjset = None
        sub.m = m2 // 2
        return sub, old_of_new

    @classmethod
    def _from_rows(cls, rows):
        """Trusted constructor: rows must already be sorted, deduplicated,
        symmetric adjacency lists without self-loops."""
        g = cls.__new__(cls)
        g.n = len(rows)
        g.adjacency = tuple(tuple(r) for r in rows)
        g._adjset = None
        g.m = sum(len(r) for r in rows) // 2
        return g

    def __eq__(self, other):
        return (isinstance(other, Graph) and self.n == other.n
                and self.adjacency == other.adjacency)

    def __hash__(self):
        return hash((self.n, self.adjacency))

    def __repr__(self):
        return "Graph(n=%d, m=%d)" % (self.n, self.m)


def edge_bound_check(g, k):
    """'pass' unless m > n*k, in which case treewidth must exceed k."""
    return "too_many_edges" if g.m > g.n * k else "pass"


def connected_components(g, forbidden=()):
    """Components of g minus `forbidden`, ordered by smallest member."""
    forbidden = set(forbidden)
    seen = set(forbidden)
    out = []
    for s in range(g.n):
        if s in seen:
            continue
        comp = []
        queue = deque([s])
        seen.add(s)
        while queue:
            u = queue.popleft()
            comp.append(u)
            for v in g.adjacency[u]:
                if v not in seen:
                    seen.add(v)
                    queue.append(v)
        out.append(sorted(comp))
    out.sort(key=lambda c: c[0])
    return out


def maximal_matching(g):
    """Greedy maximal matching over edges in (min, max) lexicographic order."""
    matched = set()
    edges = []
    for u in range(g.n):
        if u in matched:
            continue
        for v in g.adjacency[u]:
            if v > u and v not in matched:
                edges.append((u, v))
                matched.add(u)
                matched.add(v)
                break
    return edges


def contract_matching(g, matching):
    """Contract each matched edge; returns (new graph, old->new vertex map).

    The merged vertex takes the id rank of the smaller endpoint among all
    representatives, so the result is deterministic.
    """
    rep = list(range(g.n))
    for (u, v) in matching:
        lo, hi = (u, v) if u < v else (v, u)
        rep[hi] = lo
    reps = sorted(set(rep))
    new_id = {r: i for i, r in enumerate(reps)}
    vertex_map = [new_id[rep[v]] for v in range(g.n)]
    rows = [set() for _ in range(len(reps))]
    for u in range(g.n):
        a = vertex_map[u]
        row = rows[a]
        for v in g.adjacency[u]:
            b = vertex_map[v]
            if a != b:
                row.add(b)
    return Graph._from_rows([sorted(r) for r in rows]), vertex_map


def decontract_decomposition(td, vertex_map):
    """Replace each bag vertex of a contracted-graph td by its preimages."""
    from .td import TreeDecomposition
    pre = {}
    for old, new in enumerate(vertex_map):
        pre.setdefault(new, []).append(old)
    bags = [frozenset(x for v in bag for x in pre[v]) for bag in td.bags]
    return TreeDecomposition(bags, list(td.parent), td.root)


def improved_graph(g, k):
    """g plus an edge for every non-adjacent pair with >= k+1 common
    neighbors of degree <= k (degrees taken in g)."""
    counts = {}
    for v in range(g.n):
        nb = g.adjacency[v]
        if len(nb) > k:
            continue
        for i in range(len(nb)):
            for j in range(i + 1, len(nb)):
                key = (nb[i], nb[j])
                counts[key] = counts.get(key, 0) + 1
    extra = [key for key, c in counts.items()
             if c >= k + 1 and not g.has_edge(*key)]
    if not extra:
        return g
    added = {}
    for (u, v) in extra:
        added.setdefault(u, []).append(v)
        added.setdefault(v, []).append(u)
    rows = [sorted(g.adjacency[v] + tuple(added[v])) if v in added
            else g.adjacency[v] for v in range(g.n)]
    return Graph._from_rows(rows)


def i_simplicial_vertices(g, k, gi=None):
    """Vertices simplicial in improved_graph(g, k) with improved degree <= k,
    greedily filtered (ascending id) to a pairwise non-adjacent subset."""
    if gi is None:
        gi = improved_graph(g, k)
    picked = []
    picked_set = set()
    for v in range(gi.n):
        nb = gi.adjacency[v]
        if len(nb) > k:
            continue
        if any(u in picked_set for u in nb):
            continue
        clique = all(gi.has_edge(nb[i], nb[j])
                     for i in range(len(nb))
                     for j in range(i + 1, len(nb)))
        if clique:
            picked.append(v)
            picked_set.add(v)
    return picked


def reintroduce_simplicial(td, x, g, k, gi=None):
    """Attach each I-simplicial vertex v of x back under a bag containing
    its improved-graph neighborhood.  Returns the new decomposition or the
    string 'tw_exceeds'."""
    from .td import build_forgotten_map, locate_bag_containing, TreeDecomposition
    if not x:
        return td
    if gi is None:
        gi = improved_graph(g, k)
    bags = list(td.bags)
    parent = list(td.parent)
    forgotten = build_forgotten_map(td)
    x_set = set(x)
    for v in sorted(x):
        nb = frozenset(gi.adjacency[v]) - x_set
        if len(nb) > k:
            return "tw_exceeds"
        host = locate_bag_containing(td, forgotten, nb)
        if host is None:
            return "tw_exceeds"
        bags.append(nb | {v})
        parent.append(host)
    return TreeDecomposition(bags, parent, td.root)
