"""Balanced-separator primitives: flow-based minimum vertex cuts, the
2/3-balanced S-separator, and small helpers shared by the pipelines."""

from collections import deque, namedtuple
from fractions import Fraction
import heapq

from .graph import connected_components

# (L, X, R): partition of a ground set with no L-R edge; order = |X|
Separation = namedtuple("Separation", ["left", "cut", "right"])

# terminal sets and the order bound for pushed separations
TerminalSpec = namedtuple("TerminalSpec", ["t_left", "t_right", "order_bound"])


def min_vertex_cut(g, a, b, limit):
    """Minimum a-b vertex cut disjoint from a and b, if of size <= limit.

    Vertex-splitting max-flow with unit capacities and BFS augmentation;
    after limit+1 augmenting paths the answer is 'exceeds'.  Also returns
    'exceeds' when a touches b directly (no cut exists at all).
    """
    a = set(a)
    b = set(b)
    if a & b:
        return "exceeds"
    for u in a:
        if b & g.adjset[u]:
            return "exceeds"
    n = g.n
    # node 2v = v_in, 2v+1 = v_out; arcs that must never be cut (edge arcs
    # and the internal arc of a terminal) get effectively infinite capacity
    INF = 1 << 30
    cap = [dict() for _ in range(2 * n)]

    def add(u, v, c):
        cap[u][v] = cap[u].get(v, 0) + c
        cap[v].setdefault(u, 0)

    for v in range(n):
        add(2 * v, 2 * v + 1, 1 if v not in a and v not in b else INF)
    for (u, v) in g.edges():
        add(2 * u + 1, 2 * v, INF)
        add(2 * v + 1, 2 * u, INF)

    sources = [2 * u + 1 for u in a]
    sinks = set(2 * v for v in b)

    flow = 0
    while flow <= limit:
        prev = {}
        queue = deque()
        for s in sources:
            prev[s] = None
            queue.append(s)
        reached = None
        while queue and reached is None:
            u = queue.popleft()
            for v, c in cap[u].items():
                if c > 0 and v not in prev:
                    prev[v] = u
                    if v in sinks:
                        reached = v
                        break
                    queue.append(v)
        if reached is None:
            # min cut: vertices whose in-node is reachable, out-node not
            cut = [v for v in range(n)
                   if 2 * v in prev and 2 * v + 1 not in prev]
            return sorted(cut)
        flow += 1
        v = reached
        while prev[v] is not None:
            u = prev[v]
            cap[u][v] -= 1
            cap[v][u] = cap[v].get(u, 0) + 1
            v = u
    return "exceeds"


def check_balanced(g, ground, s, x, beta):
    """True iff each component of g[ground] minus x has <= beta*|s| vertices
    of s.  Exact rational arithmetic, no floats."""
    ground = set(ground)
    s = set(s) & ground
    x = set(x)
    beta = Fraction(beta)
    forbidden = (set(range(g.n)) - ground) | x
    bound = beta * len(s)
    for comp in connected_components(g, forbidden):
        if Fraction(len(s & set(comp))) > bound:
            return False
    return True


def _ternary_partitions(items):
    """All assignments of items into (L, X, R), ternary-counter order."""
    for code in range(3 ** len(items)):
        part = ([], [], [])
        c = code
        for it in items:
            part[c % 3].append(it)
            c //= 3
        yield part


def _cut_avoiding(g, a, b, removed, limit):
    """min_vertex_cut in g with `removed` vertices deleted, ids restored."""
    if limit < 0:
        return "exceeds"
    if not removed:
        return min_vertex_cut(g, a, b, limit)
    keep = [v for v in range(g.n) if v not in removed]
    sub, old_of_new = g.induced_subgraph(keep)
    new_of_old = {o: i for i, o in enumerate(old_of_new)}
    cut = min_vertex_cut(sub, [new_of_old[v] for v in a],
                         [new_of_old[v] for v in b], limit)
    if cut == "exceeds":
        return cut
    return [old_of_new[v] for v in cut]


def flow_s_separator(g, s, k, require_split=False):
    """A set x, |x| <= k+1, such that every component of g minus x holds at
    most 2/3 |s| vertices of s; 'tw_exceeds' if no partition works (then
    tw(g) > k).

    Enumerates partitions s = S_L + S_X + S_R (ternary counter over sorted
    s, first feasible wins) with both sides <= 2/3 |s|, and looks for an
    S_L/S_R vertex cut of size <= (k+1) - |S_X| in g minus S_X.  A hit
    gives x = S_X + cut: each component of g minus x meets s within S_L
    only or S_R only, hence the balance bound.

    With require_split=True only partitions with both sides nonempty are
    admitted; then no component of g minus x can contain all of s minus x,
    which guarantees recursion progress for the caller.
    """
    s = sorted(set(s))
    if len(s) > 6 * k + 6:
        raise ValueError("separator ground set too large: %d" % len(s))
    for (s_l, s_x, s_r) in _ternary_partitions(s):
        if len(s_x) > k + 1:
            continue
        if 3 * len(s_l) > 2 * len(s) or 3 * len(s_r) > 2 * len(s):
            continue
        if require_split and (not s_l or not s_r):
            continue
        if not s_l or not s_r:
            # empty side: S_X alone separates; components hold at most
            # max(|S_L|, |S_R|) <= 2/3 |s| vertices of s
            x = sorted(s_x)
        else:
            cut = _cut_avoiding(g, s_l, s_r, set(s_x), (k + 1) - len(s_x))
            if cut == "exceeds":
                continue
            x = sorted(set(cut) | set(s_x))
        assert check_balanced(g, range(g.n), s, x, Fraction(2, 3))
        return x
    return "tw_exceeds"


def td_based_s_separator(td, s):
    """A bag B of td such that every component of G minus B holds <= |s|/2
    vertices of s.

    Walks from the root toward the side holding more than half of s; a
    vertex of s counts toward the unique subtree containing its topmost
    bag.  Ties broken toward the smaller node id.
    """
    s = set(s)
    if not s:
        return td.bags[td.root]
    from .td import build_forgotten_map
    forgotten = build_forgotten_map(td)
    order = []
    stack = [td.root]
    while stack:
        i = stack.pop()
        order.append(i)
        stack.extend(td.children[i])
    below = [0] * td.node_count()
    for v in s:
        below[forgotten[v]] += 1
    for i in reversed(order):
        for c in td.children[i]:
            below[i] += below[c]
    total = len(s)
    i = td.root
    while True:
        nxt = None
        for c in sorted(td.children[i]):
            if 2 * below[c] > total:
                nxt = c
                break
        if nxt is None:
            # parent side cannot exceed half either: when we stepped into
            # i it held more than half below, so above holds less
            return td.bags[i]
        i = nxt


def partition_into_three(weights, q):
    """Indices grouped into three sets each summing <= q/2, by repeatedly
    merging the two lightest groups (requires each weight <= q/2)."""
    assert sum(weights) == q
    heap = [(w, [i]) for i, w in enumerate(weights)]
    heapq.heapify(heap)
    while len(heap) > 3:
        w1, g1 = heapq.heappop(heap)
        w2, g2 = heapq.heappop(heap)
        heapq.heappush(heap, (w1 + w2, sorted(g1 + g2)))
    groups = [[], [], []]
    for slot, (_, grp) in enumerate(sorted(heap)):
        groups[slot] = grp
    return groups


# --------------------------------------------------------------------------
# Exact balanced separators computed directly on a component, used by the
# dynamic data structure when its decomposition is too wide for the
# per-node tables to stay small.  All three routes are exact, so the
# query contracts (and the soundness of rejections) are unchanged.

def _brute_balanced(g, s, k, num, den):
    """Smallest X (<= k+1) with every component of g - X holding at most
    (num/den)*|s| vertices of s, by exhaustive enumeration."""
    from itertools import combinations
    beta = Fraction(num, den)
    verts = list(range(g.n))
    for size in range(k + 2):
        for cand in combinations(verts, size):
            if check_balanced(g, verts, s, set(cand), beta):
                return list(cand)
    return None


def half_balanced_s_separator(g, s, k, brute_limit=24):
    """X of size <= k+1 such that every component of g - X has at most
    floor(|s|/2) vertices of s, or None (certifying tw(g) > k).

    g is the component subgraph G[S u U]; s its S-vertices.  Route:
    centroid bag of a min-degree decomposition when that is thin enough,
    exhaustive search on small graphs, exact interface DP otherwise.
    """
    from .td import min_degree_decomposition, balanced_separator_bag, width
    s = set(s)
    if not s:
        return []
    td_h = min_degree_decomposition(g)
    if width(td_h) <= k:
        # the weighted-centroid bag of a valid decomposition is
        # half-balanced by construction: every component of g - bag lies
        # within one side of the tree, and each side holds <= |s|/2
        return sorted(balanced_separator_bag(g, td_h, s))
    if g.n <= brute_limit:
        return _brute_balanced(g, s, k, 1, 2)
    return _s_interface_dp(g, td_h, s, k)


def balanced_u_separator(g, k, brute_limit=24):
    """X of size <= k+1 whose removal leaves components of at most half
    of g's vertices, or None (certifying tw(g) > k).  g is G[U]."""
    from .td import min_degree_decomposition, balanced_separator_bag, width
    if g.n <= 1:
        return []
    everything = set(range(g.n))
    td_h = min_degree_decomposition(g)
    if width(td_h) <= k:
        # centroid bag of a valid decomposition: balanced by construction
        return sorted(balanced_separator_bag(g, td_h, everything))
    # exact but exponential in n; outside the thin-decomposition case the
    # callers keep components small enough for this to stay affordable
    return _brute_balanced(g, everything, k, 1, 2)


def _s_interface_dp(g, td_h, s, k):
    """Exact search for a half-balanced S-separator of order <= k+1 via a
    partition DP over a nice form of the given decomposition.

    Per node we keep, for every satisfiable partition of the bag into
    (M1, M2, M3, X), the satisfiable counter tuples (m1, m2, m3, x) --
    m_j counting forgotten S-vertices placed in M_j, capped at
    floor(|s|/2), and x counting forgotten X-vertices, capped at k+1 --
    each with a witness list of the forgotten X-vertices."""
    from .td import to_nice, LEAF, INTRODUCE, FORGET, JOIN
    nice = to_nice(g, td_h)
    m_cap = len(s) // 2
    x_cap = k + 1
    empty = frozenset()
    tables = {}
    order = []
    stack = [nice.root]
    while stack:
        i = stack.pop()
        order.append(i)
        stack.extend(nice.children[i])
    for i in reversed(order):
        kind = nice.kind[i]
        if kind == LEAF:
            tables[i] = {(empty, empty, empty, empty):
                         {(0, 0, 0, 0): empty}}
            continue
        if kind == JOIN:
            j1, j2 = nice.children[i]
            t1, t2 = tables[j1], tables[j2]
            out = {}
            for roles, d1 in t1.items():
                d2 = t2.get(roles)
                if d2 is None:
                    continue
                target = out.setdefault(roles, {})
                for (a1, a2, a3, ax), w1 in d1.items():
                    for (b1, b2, b3, bx), w2 in d2.items():
                        if (a1 + b1 > m_cap or a2 + b2 > m_cap
                                or a3 + b3 > m_cap or ax + bx > x_cap):
                            continue
                        ckey = (a1 + b1, a2 + b2, a3 + b3, ax + bx)
                        if ckey not in target:
                            target[ckey] = w1 | w2
            tables[i] = out
            del tables[j1], tables[j2]
            continue
        j = nice.children[i][0]
        child = tables[j]
        v = nice.vert[i]
        out = {}
        if kind == INTRODUCE:
            adj = set()
            for (a, b) in nice.bag_edges[i]:
                if a == v:
                    adj.add(b)
                elif b == v:
                    adj.add(a)
            for (m1, m2, m3, xs), d in child.items():
                groups = (m1, m2, m3)
                for q in range(3):
                    if adj & (groups[(q + 1) % 3] | groups[(q + 2) % 3]):
                        continue
                    roles = tuple(grp | {v} if idx == q else grp
                                  for idx, grp in enumerate(groups)) + (xs,)
                    tgt = out.setdefault(roles, {})
                    for ckey, wit in d.items():
                        tgt.setdefault(ckey, wit)
                roles = (m1, m2, m3, xs | {v})
                tgt = out.setdefault(roles, {})
                for ckey, wit in d.items():
                    tgt.setdefault(ckey, wit)
        else:  # forget v
            in_s = v in s
            for (m1, m2, m3, xs), d in child.items():
                groups = (m1, m2, m3)
                if v in xs:
                    roles = (m1, m2, m3, xs - {v})
                    tgt = out.setdefault(roles, {})
                    for (c1, c2, c3, cx), wit in d.items():
                        if cx + 1 > x_cap:
                            continue
                        tgt.setdefault((c1, c2, c3, cx + 1), wit | {v})
                    continue
                for q in range(3):
                    if v in groups[q]:
                        roles = tuple(grp - {v} if idx == q else grp
                                      for idx, grp in enumerate(groups)
                                      ) + (xs,)
                        tgt = out.setdefault(roles, {})
                        for (c1, c2, c3, cx), wit in d.items():
                            cnt = [c1, c2, c3]
                            if in_s:
                                cnt[q] += 1
                                if cnt[q] > m_cap:
                                    continue
                            tgt.setdefault((cnt[0], cnt[1], cnt[2], cx),
                                           wit)
                        break
        tables[i] = out
        del tables[j]
    root_entries = tables[nice.root].get((empty, empty, empty, empty), {})
    best = None
    for ckey, wit in root_entries.items():
        cand = sorted(wit)
        if best is None or (len(cand), cand) < (len(best), best):
            best = cand
    return best
