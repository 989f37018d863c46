"""Tree decompositions: validation, metrics, nice form, rebalancing."""

from collections import deque


class TreeDecomposition(object):
    """Rooted tree of bags.  bags[i] is a frozenset, parent[i] is a node id
    or None for the root."""

    __slots__ = ("bags", "parent", "root", "children")

    def __init__(self, bags, parent, root):
        self.bags = [frozenset(b) for b in bags]
        self.parent = list(parent)
        self.root = root
        children = [[] for _ in bags]
        for i, p in enumerate(self.parent):
            if p is not None:
                children[p].append(i)
        self.children = children

    def node_count(self):
        return len(self.bags)

    def __repr__(self):
        return "TreeDecomposition(nodes=%d, width=%d)" % (
            len(self.bags), width(self))


def width(td):
    return max(len(b) for b in td.bags) - 1


def depth(td):
    """Max root-to-leaf node count minus one (iterative, tds can be deep)."""
    d = {td.root: 0}
    best = 0
    stack = [td.root]
    while stack:
        i = stack.pop()
        best = max(best, d[i])
        for c in td.children[i]:
            d[c] = d[i] + 1
            stack.append(c)
    return best


def metrics(td):
    return {"width": width(td), "depth": depth(td),
            "node_count": td.node_count()}


def validate(g, td):
    """None if td is a valid decomposition of g, else a violation report."""
    n = len(td.bags)
    if not (0 <= td.root < n) or td.parent[td.root] is not None:
        return "structure: bad root"
    seen = 0
    stack = [td.root]
    while stack:
        i = stack.pop()
        seen += 1
        stack.extend(td.children[i])
    if seen != n:
        return "structure: tree not connected from root"
    covered = set()
    for b in td.bags:
        for v in b:
            if not (0 <= v < g.n):
                return "vertex id %d out of range" % v
        covered |= b
    for v in range(g.n):
        if v not in covered:
            return "vertex %d in no bag" % v
    covered_pairs = set()
    for b in td.bags:
        sb = sorted(b)
        for ii in range(len(sb)):
            for jj in range(ii + 1, len(sb)):
                covered_pairs.add((sb[ii], sb[jj]))
    for (u, v) in g.edges():
        if (min(u, v), max(u, v)) not in covered_pairs:
            return "edge (%d,%d) uncovered" % (u, v)
    # connectivity: for each vertex the nodes containing it form a subtree
    owner = {}
    order = []
    stack = [td.root]
    while stack:
        i = stack.pop()
        order.append(i)
        stack.extend(td.children[i])
    for i in order:  # root-first
        p = td.parent[i]
        for v in td.bags[i]:
            if p is not None and v in td.bags[p]:
                continue
            if v in owner:
                return "subtree of vertex %d disconnected" % v
            owner[v] = i
    return None


def build_forgotten_map(td):
    """forgotten[v] = the topmost node whose bag contains v."""
    forgotten = {}
    stack = [td.root]
    while stack:
        i = stack.pop()
        p = td.parent[i]
        for v in td.bags[i]:
            if p is None or v not in td.bags[p]:
                forgotten[v] = i
        stack.extend(td.children[i])
    return forgotten


def locate_bag_containing(td, forgotten_map, y):
    """A node whose bag contains all of y, searched among the topmost bags
    of y's members; None if there is no such bag.  y=empty -> root."""
    y = frozenset(y)
    if not y:
        return td.root
    for v in sorted(y):
        i = forgotten_map[v]
        if y <= td.bags[i]:
            return i
    return None


def build_from_parts(s, x, children):
    """Two-bag spine B=s over B'=s|x with child decompositions under B'."""
    s = frozenset(s)
    bags = [s, s | frozenset(x)]
    parent = [None, 0]
    for sub in children:
        off = len(bags)
        bags.extend(sub.bags)
        for i, p in enumerate(sub.parent):
            parent.append(off + p if p is not None else 1)
    return TreeDecomposition(bags, parent, 0)


def attach_subtree(td, host_node, sub):
    """New decomposition with sub's root attached as a child of host_node."""
    bags = list(td.bags) + list(sub.bags)
    off = td.node_count()
    parent = list(td.parent)
    for i, p in enumerate(sub.parent):
        parent.append(off + p if p is not None else host_node)
    return TreeDecomposition(bags, parent, td.root)


LEAF, INTRODUCE, FORGET, JOIN = "leaf", "introduce", "forget", "join"


class NiceTreeDecomposition(object):
    """Binary nice decomposition: every node Leaf/Introduce/Forget/Join,
    empty leaf and root bags, bag-local edge lists precomputed."""

    __slots__ = ("bags", "kind", "vert", "children", "parent", "root",
                 "bag_edges", "depth")

    def __init__(self):
        self.bags = []      # sorted tuples
        self.kind = []
        self.vert = []      # introduced/forgotten vertex or None
        self.children = []  # tuples
        self.parent = []
        self.root = None
        self.bag_edges = None
        self.depth = 0

    def _add(self, kind, bag, vert, children):
        i = len(self.bags)
        self.bags.append(tuple(sorted(bag)))
        self.kind.append(kind)
        self.vert.append(vert)
        self.children.append(tuple(children))
        self.parent.append(None)
        for c in children:
            self.parent[c] = i
        return i

    def node_count(self):
        return len(self.bags)

    def width(self):
        return max(len(b) for b in self.bags) - 1

    def as_tree_decomposition(self):
        return TreeDecomposition([frozenset(b) for b in self.bags],
                                 self.parent, self.root)

    def _finish(self, g):
        self.parent[self.root] = None
        d = {self.root: 0}
        best = 0
        stack = [self.root]
        while stack:
            i = stack.pop()
            best = max(best, d[i])
            for c in self.children[i]:
                d[c] = d[i] + 1
                stack.append(c)
        self.depth = best
        self.bag_edges = []
        for b in self.bags:
            bs = set(b)
            self.bag_edges.append(tuple(
                (u, v) for u in b for v in g.adjacency[u]
                if v in bs and u < v))


def _chain_up(ntd, top_from, bag_from, bag_to):
    """Extend the nice tree from a node with bag_from up to bag_to:
    forget departing vertices (ascending), then introduce arriving ones
    (ascending).  Returns the new top node."""
    cur, bag = top_from, set(bag_from)
    for v in sorted(set(bag_from) - set(bag_to)):
        bag.discard(v)
        cur = ntd._add(FORGET, bag, v, [cur])
    for v in sorted(set(bag_to) - set(bag_from)):
        bag.add(v)
        cur = ntd._add(INTRODUCE, bag, v, [cur])
    return cur


def to_nice(g, td):
    """Convert a valid decomposition into nice form of equal width."""
    ntd = NiceTreeDecomposition()
    # iterative post-order over td
    result = {}
    stack = [(td.root, False)]
    while stack:
        i, done = stack.pop()
        if not done:
            stack.append((i, True))
            for c in td.children[i]:
                stack.append((c, False))
            continue
        subs = []
        for c in td.children[i]:
            top = _chain_up(ntd, result[c], td.bags[c], td.bags[i])
            subs.append(top)
        if not subs:
            leaf = ntd._add(LEAF, (), None, [])
            result[i] = _chain_up(ntd, leaf, (), td.bags[i])
        else:
            while len(subs) > 1:
                nxt = []
                for j in range(0, len(subs) - 1, 2):
                    nxt.append(ntd._add(JOIN, td.bags[i], None,
                                        [subs[j], subs[j + 1]]))
                if len(subs) % 2:
                    nxt.append(subs[-1])
                subs = nxt
            result[i] = subs[0]
    ntd.root = _chain_up(ntd, result[td.root], td.bags[td.root], ())
    ntd._finish(g)
    return ntd


def _binarize(td):
    """Copy td so every node has at most 2 children (same-bag copies)."""
    bags = list(td.bags)
    parent = list(td.parent)
    children = [list(c) for c in td.children]
    i = 0
    while i < len(bags):
        while len(children[i]) > 2:
            # keep one child, push the rest under a copy of bag i
            kept = children[i][0]
            rest = children[i][1:]
            j = len(bags)
            bags.append(bags[i])
            parent.append(i)
            children.append(rest)
            for r in rest:
                parent[r] = j
            children[i] = [kept, j]
        i += 1
    return TreeDecomposition(bags, parent, td.root)


def _centroid(adj, comp, start):
    """Centroid of the subtree `comp` (a set) of the tree `adj`."""
    n = len(comp)
    order = []
    par = {start: None}
    stack = [start]
    while stack:
        u = stack.pop()
        order.append(u)
        for v in adj[u]:
            if v in comp and v is not par[u] and v != par[u]:
                par[v] = u
                stack.append(v)
    sz = {u: 1 for u in comp}
    for u in reversed(order):
        if par[u] is not None:
            sz[par[u]] += sz[u]
    for u in order:
        heaviest = n - sz[u]
        for v in adj[u]:
            if v in comp and v != par[u]:
                heaviest = max(heaviest, sz[v])
        if 2 * heaviest <= n:
            return u
    return start  # unreachable for a tree


def rebalance_log_depth(g, td):
    """Binary decomposition of width <= 3*width(td)+2 and logarithmic depth.

    Recursive splitting of the decomposition tree: each step removes a
    split node c and recurses into the components, carrying at most two
    boundary nodes whose bags join c's bag in the new root.  When two
    boundary nodes are present the split node is chosen on the path
    between them so they end up in different components; plain centroids
    are used otherwise.  Component sizes halve at least every other level.
    """
    td = _binarize(td)
    n = td.node_count()
    if n == 1:
        return TreeDecomposition(list(td.bags), [None], 0)
    adj = [[] for _ in range(n)]
    for i, p in enumerate(td.parent):
        if p is not None:
            adj[i].append(p)
            adj[p].append(i)

    out_bags = []
    out_parent = []

    def emit(bag, parent_id):
        out_bags.append(bag)
        out_parent.append(parent_id)
        return len(out_bags) - 1

    def solve(comp, boundary, parent_id):
        size = len(comp)
        bnd = sorted(set(boundary))
        if len(bnd) == 2:
            d1, d2 = bnd
            # path d1 -> d2 inside comp
            par = {d1: None}
            queue = deque([d1])
            while queue:
                u = queue.popleft()
                if u == d2:
                    break
                for v in adj[u]:
                    if v in comp and v not in par:
                        par[v] = u
                        queue.append(v)
            path = [d2]
            while path[-1] != d1:
                path.append(par[path[-1]])
            path.reverse()
            # subtree sizes rooted at d2
            order = []
            rpar = {d2: None}
            stack = [d2]
            while stack:
                u = stack.pop()
                order.append(u)
                for v in adj[u]:
                    if v in comp and v != rpar[u]:
                        rpar[v] = u
                        stack.append(v)
            sz = {u: 1 for u in comp}
            for u in reversed(order):
                if rpar[u] is not None:
                    sz[rpar[u]] += sz[u]
            # last node on the path whose d1-side has <= size/2 nodes
            c = d1
            for t in range(1, len(path)):
                if 2 * sz[path[t - 1]] <= size:
                    c = path[t]
                else:
                    break
        else:
            c = _centroid(adj, comp, next(iter(comp)))

        root_bag = set(td.bags[c])
        for d in bnd:
            root_bag |= td.bags[d]
        me = emit(frozenset(root_bag), parent_id)

        # split comp at c
        pieces = []
        rest = set(comp)
        rest.discard(c)
        for a in adj[c]:
            if a in rest:
                piece = set()
                queue = deque([a])
                rest.discard(a)
                piece.add(a)
                while queue:
                    u = queue.popleft()
                    for v in adj[u]:
                        if v in rest:
                            rest.discard(v)
                            piece.add(v)
                            queue.append(v)
                pieces.append((a, piece))
        hosts = [me]
        if len(pieces) > 2:
            # keep the output binary with a same-bag helper node
            aux = emit(frozenset(root_bag), me)
            hosts = [me, aux]
        for idx, (a, piece) in enumerate(pieces):
            host = hosts[0] if idx == 0 else hosts[-1] if len(pieces) > 2 \
                else hosts[0]
            sub_bnd = [a] + [d for d in bnd if d in piece]
            solve(piece, sub_bnd, host)

    # degree <= 3 after binarize, so at most 3 pieces per split
    import sys
    old = sys.getrecursionlimit()
    sys.setrecursionlimit(max(old, 10000))
    try:
        solve(set(range(n)), [], None)
    finally:
        sys.setrecursionlimit(old)
    # hosts for 3 pieces: first under root, others under aux; with the
    # loop above piece 0 -> me, pieces 1,2 -> aux (binary everywhere)
    return TreeDecomposition(out_bags, out_parent, 0)


def min_degree_decomposition(g):
    """Greedy minimum-degree elimination decomposition (heuristic width,
    always valid).  Works on disconnected graphs."""
    if g.n == 0:
        return TreeDecomposition([frozenset()], [None], 0)
    bags, parent = _min_degree_elimination(g)
    return TreeDecomposition(bags, parent, g.n - 1)


def _min_degree_elimination(g):
    """Raw (bags, parent) arrays of the min-degree decomposition for g.n >= 1;
    parent[i] > i except parent[n-1] = None (the root is last)."""
    n = g.n
    adj = [set(a) for a in g.adjacency]
    # bucket queue over degrees; the cursor only needs to back up to
    # d-1 after eliminating a degree-d vertex (neighbors lose one edge,
    # fill-in only raises degrees), so extract-min stays amortized O(1)
    buckets = [[] for _ in range(n)]
    deg = [len(adj[v]) for v in range(n)]
    for v in range(n - 1, -1, -1):
        buckets[deg[v]].append(v)
    eliminated = [False] * n
    cursor = 0
    order = []
    bags = []
    parent_vertex = []
    pos = {}
    for _ in range(n):
        while True:  # lazy deletion: skip stale / eliminated entries
            while not buckets[cursor]:
                cursor += 1
            v = buckets[cursor].pop()
            if not eliminated[v] and deg[v] == cursor:
                break
        eliminated[v] = True
        pos[v] = len(order)
        order.append(v)
        nb = sorted(adj[v])
        bags.append(frozenset([v] + nb))
        parent_vertex.append(nb[0] if nb else None)
        for a in nb:
            for b in nb:
                if b > a and b not in adj[a]:
                    adj[a].add(b)
                    adj[b].add(a)
        for u in nb:
            adj[u].discard(v)
            d = len(adj[u])
            if d != deg[u]:
                deg[u] = d
                buckets[d].append(u)
        adj[v] = set()
        cursor = max(0, cursor - 1)
    parent = [None] * n
    for i, v in enumerate(order):
        pv = parent_vertex[i]
        if pv is not None:
            # parent bag: the earliest-eliminated remaining neighbor
            parent[i] = min(pos[u] for u in bags[i] if u != v)
        elif i + 1 < n:
            parent[i] = i + 1  # spine link keeps disconnected parts joined
    return bags, parent


def elimination_centroid_bag(bags, parent, weight):
    """Centroid bag of an elimination decomposition given as raw arrays
    (parent[i] > i, root last): every component of g minus the returned
    bag holds at most half of `weight` (all vertices when weight is None).

    Each weighted vertex is charged to one bag containing it; a component
    of g minus bag i lies within a single side of the tree at i, so the
    centroid's half-bound on side sums carries over to components."""
    n = len(bags)
    own = [0] * n
    seen = set()
    for i in range(n - 1, -1, -1):  # parents first: topmost owner wins
        for v in bags[i]:
            if v not in seen and (weight is None or v in weight):
                seen.add(v)
                own[i] += 1
    total = sum(own)
    if total == 0:
        return bags[n - 1]
    sub = own[:]
    for i in range(n - 1):
        sub[parent[i]] += sub[i]
    heaviest_child = [0] * n
    for i in range(n - 1):
        p = parent[i]
        if sub[i] > heaviest_child[p]:
            heaviest_child[p] = sub[i]
    best, best_side = None, None
    for i in range(n):
        side = max(heaviest_child[i], total - sub[i])
        if best_side is None or side < best_side:
            best, best_side = i, side
    assert 2 * best_side <= total
    return bags[best]


def balanced_separator_bag(g, td, weight_set):
    """A bag whose removal splits g into components each holding at most
    half of weight_set, found as a weighted centroid of the decomposition
    tree.  Returns the bag (frozenset); verification is the caller's job."""
    n = td.node_count()
    # topmost bag owning each weighted vertex
    owner_weight = [0] * n
    seen = set()
    stack = [td.root]
    post = []
    while stack:
        i = stack.pop()
        post.append(i)
        for v in td.bags[i]:
            if v in weight_set and v not in seen:
                seen.add(v)
                owner_weight[i] += 1
        stack.extend(td.children[i])
    total = sum(owner_weight)
    if total == 0:
        return td.bags[td.root]
    sub = owner_weight[:]
    for i in reversed(post):
        p = td.parent[i]
        if p is not None:
            sub[p] += sub[i]
    best, best_side = None, None
    for i in range(n):
        side = max([sub[c] for c in td.children[i]]
                   + [total - sub[i]] or [0])
        if best_side is None or side < best_side:
            best, best_side = i, side
    assert 2 * best_side <= total
    return td.bags[best]
