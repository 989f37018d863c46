"""Brute-force ground truth: exact treewidth, optimal decompositions,
pushed-separation enumeration, and naive recomputation of the dynamic
data structure's query answers."""

from collections import deque
from itertools import combinations

from .graph import connected_components
from .separators import Separation

_HARD_LIMIT = 20


def _adj_masks(g):
    masks = [0] * g.n
    for u in range(g.n):
        for v in g.adjacency[u]:
            masks[u] |= 1 << v
    return masks


def _elim_cost(adjm, mask, v):
    """Back-degree of v eliminated after the vertex set `mask`:
    neighbors, outside mask|{v}, of v's component inside mask|{v}."""
    inside = mask | (1 << v)
    comp = 0
    frontier = 1 << v
    nball = 0
    while frontier:
        comp |= frontier
        f = frontier
        nb = 0
        while f:
            low = f & -f
            nb |= adjm[low.bit_length() - 1]
            f ^= low
        nball |= nb
        frontier = nb & inside & ~comp
    return bin(nball & ~inside).count("1")


def _min_degree_lower_bound(g):
    """Max-min-degree lower bound on treewidth."""
    adj = [set(a) for a in g.adjacency]
    alive = set(range(g.n))
    best = 0
    while alive:
        v = min(alive, key=lambda u: (len(adj[u]), u))
        best = max(best, len(adj[v]))
        for u in adj[v]:
            adj[u].discard(v)
        alive.discard(v)
    return best


def _min_fill_upper_bound(g):
    """Width of a greedy min-fill elimination order (upper bound)."""
    adj = [set(a) for a in g.adjacency]
    alive = set(range(g.n))
    width = -1
    while alive:
        def fill(u):
            nb = adj[u]
            return sum(1 for a, b in combinations(sorted(nb), 2)
                       if b not in adj[a])
        v = min(alive, key=lambda u: (fill(u), len(adj[u]), u))
        width = max(width, len(adj[v]))
        nb = sorted(adj[v])
        for a, b in combinations(nb, 2):
            adj[a].add(b)
            adj[b].add(a)
        for u in nb:
            adj[u].discard(v)
        adj[v] = set()
        alive.discard(v)
    return width


def decide_tw_le(g, k):
    """Subset-DP decision: is tw(g) <= k?  Explores only elimination
    prefixes all of whose back-degrees stay <= k."""
    if g.n == 0 or k >= g.n - 1:
        return True
    if k < 0:
        return False
    adjm = _adj_masks(g)
    full = (1 << g.n) - 1
    seen = {0}
    stack = [0]
    while stack:
        mask = stack.pop()
        if mask == full:
            return True
        rest = full & ~mask
        r = rest
        while r:
            low = r & -r
            r ^= low
            v = low.bit_length() - 1
            nm = mask | low
            if nm in seen:
                continue
            if _elim_cost(adjm, mask, v) <= k:
                seen.add(nm)
                stack.append(nm)
    return full in seen


def exact_treewidth(g):
    """Exact treewidth via subset DP over elimination orders (n <= 20)."""
    if g.n > _HARD_LIMIT:
        return "too_large"
    if g.n == 0:
        return -1
    lo = _min_degree_lower_bound(g)
    hi = _min_fill_upper_bound(g)
    k = lo
    while k < hi and not decide_tw_le(g, k):
        k += 1
    return k


def _optimal_elimination_order(g, k):
    """An elimination order all of whose back-degrees are <= k."""
    adjm = _adj_masks(g)
    full = (1 << g.n) - 1
    memo = {full: True}

    def ok(mask):
        if mask in memo:
            return memo[mask]
        rest = full & ~mask
        good = False
        r = rest
        while r and not good:
            low = r & -r
            r ^= low
            v = low.bit_length() - 1
            if _elim_cost(adjm, mask, v) <= k and ok(mask | low):
                good = True
        memo[mask] = good
        return good

    import sys
    old = sys.getrecursionlimit()
    sys.setrecursionlimit(max(old, g.n * 50 + 100))
    try:
        order = []
        mask = 0
        while mask != full:
            for v in range(g.n):
                bit = 1 << v
                if mask & bit:
                    continue
                if _elim_cost(adjm, mask, v) <= k and ok(mask | bit):
                    order.append(v)
                    mask |= bit
                    break
            else:
                raise AssertionError("no completion though decision said yes")
    finally:
        sys.setrecursionlimit(old)
    return order


def decomposition_from_order(g, order):
    """Tree decomposition from an elimination order (fill-in construction);
    width equals the order's maximum back-degree."""
    from .td import TreeDecomposition
    adj = [set(a) for a in g.adjacency]
    pos = {v: i for i, v in enumerate(order)}
    bags = []
    parent_vertex = []
    for v in order:
        nb = sorted(adj[v])
        bags.append(frozenset([v] + nb))
        parent_vertex.append(min(nb, key=lambda u: pos[u]) if nb else None)
        for a, b in combinations(nb, 2):
            adj[a].add(b)
            adj[b].add(a)
        for u in nb:
            adj[u].discard(v)
        adj[v] = set()
    n = len(order)
    parent = [None] * n
    for i, v in enumerate(order):
        if parent_vertex[i] is not None:
            parent[i] = pos[parent_vertex[i]]
        elif i + 1 < n:
            parent[i] = i + 1  # spine link keeps the tree connected
    root = n - 1
    return TreeDecomposition(bags, parent, root)


def exact_decomposition(g):
    """An optimal-width decomposition (n <= 20)."""
    from .td import TreeDecomposition
    if g.n > _HARD_LIMIT:
        return "too_large"
    if g.n == 0:
        return TreeDecomposition([frozenset()], [None], 0)
    k = exact_treewidth(g)
    order = _optimal_elimination_order(g, k)
    return decomposition_from_order(g, order)


def bb_treewidth(g):
    """Independent branch-and-bound over elimination orders (tiny graphs
    only; the double-check oracle for exact_treewidth)."""
    n = g.n
    if n == 0:
        return -1
    best = [n - 1]

    def rec(adj, alive, cur):
        if cur >= best[0]:
            return
        if len(alive) <= 1:
            best[0] = cur
            return
        for v in sorted(alive):
            d = len(adj[v])
            w = max(cur, d)
            if w >= best[0]:
                continue
            nadj = {u: set(adj[u]) for u in alive if u != v}
            nb = adj[v]
            for a in nb:
                nadj[a].discard(v)
                nadj[a].update(nb - {a})
            rec(nadj, alive - {v}, w)

    rec({u: set(g.adjacency[u]) for u in range(n)}, frozenset(range(n)), 0)
    return best[0]


def brute_pushed_separation(g, spec, side):
    """The pushed terminal separation maximizing one side, by enumerating
    all cuts of size <= spec.order_bound (n <= 22); None if no terminal
    separation of that order exists.  Ties: lexicographically smallest cut."""
    if g.n > 22:
        raise ValueError("ground set too large for brute force")
    t_l = frozenset(spec.t_left)
    t_r = frozenset(spec.t_right)
    assert not (t_l & t_r)
    others = sorted(set(range(g.n)) - t_l - t_r)
    best = None  # (-(side size), cut tuple, separation)
    for size in range(min(spec.order_bound, len(others)) + 1):
        for cut in combinations(others, size):
            cset = set(cut)
            left = set(t_l)
            right = set(t_r)
            free = []
            bad = False
            for comp in connected_components(g, cset):
                cs = set(comp)
                hit_l = bool(cs & t_l)
                hit_r = bool(cs & t_r)
                if hit_l and hit_r:
                    bad = True
                    break
                if hit_l:
                    left |= cs
                elif hit_r:
                    right |= cs
                else:
                    free.append(cs)
            if bad:
                continue
            for cs in free:
                if side == "left":
                    left |= cs
                else:
                    right |= cs
            score = len(left) if side == "left" else len(right)
            key = (-score, tuple(cut))
            if best is None or key < best[0]:
                best = (key, Separation(frozenset(left), frozenset(cut),
                                        frozenset(right)))
    return best[1] if best else None


def _component_of(g, v, removed):
    comp = {v}
    queue = deque([v])
    while queue:
        u = queue.popleft()
        for w in g.adjacency[u]:
            if w not in removed and w not in comp:
                comp.add(w)
                queue.append(w)
    return comp


def naive_query_answers(g, k, state):
    """From-scratch recomputation of all four data-structure queries.

    `state` needs attributes s, x, f, pin.  Returns a dict:
      neighborhood: sorted list N(U) & S
      s_separator:  witness list | None  (1/2-balanced on S over G[S+U])
      next_pin:     (size, eligible components) | None
      u_separator:  witness list | None  (1/2-balanced subset of G[U])
    """
    if g.n > 60:
        raise ValueError("too large for the naive oracle")
    s = set(state.s)
    x = set(state.x)
    f = set(state.f)
    pin = state.pin
    assert pin is not None and pin not in s
    u = _component_of(g, pin, s)
    nbhd = sorted({w for v in u for w in g.adjacency[v] if w in s})

    ground = sorted(s | u)
    s_witness = None
    for size in range(k + 2):
        for cand in combinations(ground, size):
            if _balanced_on(g, ground, s, set(cand), 1, 2):
                s_witness = list(cand)
                break
        if s_witness is not None:
            break

    comps = []
    removed = s | x
    seen = set(removed)
    for v in sorted(u):
        if v in seen:
            continue
        comp = _component_of(g, v, removed)
        seen |= comp
        comps.append(comp)
    eligible = [c for c in comps if not (c & f)]
    if eligible:
        size = max(len(c) for c in eligible)
        next_pin = (size, [c for c in eligible if len(c) == size])
    else:
        next_pin = None

    u_ground = sorted(u)
    u_witness = None
    for size in range(k + 2):
        for cand in combinations(u_ground, size):
            if _balanced_on(g, u_ground, u, set(cand), 1, 2):
                u_witness = list(cand)
                break
        if u_witness is not None:
            break

    return {"neighborhood": nbhd, "s_separator": s_witness,
            "next_pin": next_pin, "u_separator": u_witness}


def _balanced_on(g, ground, s, cand, num, den):
    """Each component of g[ground] minus cand holds <= (num/den)*|s&ground|
    vertices of s (integer arithmetic)."""
    gset = set(ground)
    total = len(s & gset)
    removed = cand | (set(range(g.n)) - gset)
    seen = set(removed)
    for v in ground:
        if v in seen:
            continue
        comp = _component_of(g, v, removed)
        seen |= comp
        if den * len(comp & s) > num * total:
            return False
    return True
