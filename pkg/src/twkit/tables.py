"""The dynamic tree-decomposition data structure.

State (S, X, F, pin, whatsep) over a nice logarithmic-depth decomposition,
with per-node DP tables C/CardU, T1 (neighborhood lists), T2 (balanced
S-separator interfaces), T3 (next-pin component tracking) and T4 (pushed
terminal separations).  Tables are evaluated on demand and memoized per
node; an update recomputes the memoized entries of every node on the path
from the changed vertex's forget node to the root, which is what keeps
updates local (the recomputed-node counter is exactly that path length).

Entries are keyed by signatures: hypothetical intersections of S and U
with the bag.  A signature's extension over the forgotten vertices below
the node is unique, because the membership of a forgotten vertex is
determined by the live state (read at its forget node) plus reachability,
so caches off the update path never go stale.
"""

from collections import deque
from itertools import combinations
import sys

from .td import (LEAF, INTRODUCE, FORGET, JOIN, rebalance_log_depth,
                 to_nice, depth as td_depth)

BOT = "bot"
OVERFLOW = "overflow"
TW_EXCEEDS = "tw_exceeds"

EMPTY = frozenset()

# process-wide instrumentation, read by the CLI's stats/bench commands
STATS = {"updates": 0, "recomputed_nodes": 0, "max_path_nodes": 0,
         "table_entries_peak": 0}


def reset_stats():
    for key in STATS:
        STATS[key] = 0


def _canonical(parts):
    return tuple(sorted((frozenset(c) for c in parts if c), key=min))


def _join_partitions(p1, p2):
    """Finest common coarsening of two partitions of (subsets of) a set."""
    parent = {}

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    def union(a, b):
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[ra] = rb

    for p in (p1, p2):
        for cls in p:
            it = iter(cls)
            first = next(it)
            parent.setdefault(first, first)
            for v in it:
                parent.setdefault(v, v)
                union(first, v)
    groups = {}
    for v in parent:
        groups.setdefault(find(v), set()).add(v)
    return _canonical(groups.values())


class DsState(object):
    """Single-owner dynamic data structure over one immutable graph."""

    def __init__(self, g, k, td_apx, s0=(), width_cap=None,
                 small_u_threshold=None, table_width_threshold=5):
        from .td import width as td_width
        self.g = g
        self.k = k
        self.ell = 4 * k + 3
        # global counter caps for T2/T4; counters only grow towards the
        # root and the root queries never need more than these values
        # (|S| stays at most 4k+3, so m_j <= floor(|S|/2) <= 2k+1)
        self._m_cap = 2 * k + 1
        self._x_cap = k + 1
        cap = width_cap if width_cap is not None else 10 * k + 9
        if td_width(td_apx) > cap:
            raise ValueError("width_too_large: %d > cap %d"
                             % (td_width(td_apx), cap))
        n_nodes = td_apx.node_count()
        bal = td_apx
        # skip the rebalancing pass when the input is already shallow;
        # the contract (3t+2 width, log depth) holds either way
        log_bound = 2 * max(1, (n_nodes + 1).bit_length())
        need_rebalance = td_depth(td_apx) > log_bound or \
            any(len(c) > 2 for c in td_apx.children)
        if need_rebalance:
            projected = 3 * td_width(td_apx) + 2
        else:
            projected = td_width(td_apx)
        self._small_u_threshold = small_u_threshold

        # the per-node tables are exponential in the bag size, so past a
        # width threshold the queries switch to exact direct computation
        # on the component (identical contracts, no tables kept)
        # version-keyed caches for the direct query routes: U and the
        # component split of U minus X change only with S/X/pin updates,
        # not with F marks, so repeated next-pin sweeps stay linear
        self._state_ver = 0
        self._u_ver = -1
        self._u_cache = None
        self._np_ver = -1
        self._np_comps = None
        self._np_map = None
        self._np_token = None
        self._np_ptr = 0

        if projected > table_width_threshold:
            self.ntd = None
            self.t = projected
            self.s_set = set(s0)
            self.x_set = set()
            self.f_set = set()
            rest = [v for v in range(g.n) if v not in self.s_set]
            self.pin = min(rest) if rest else None
            self.whatsep = "s"
            self.last_recomputed = 0
            self._entry_count = 0
            return

        if need_rebalance:
            bal = rebalance_log_depth(g, td_apx)
        self.ntd = to_nice(g, bal)
        self.t = self.ntd.width()

        ntd = self.ntd
        self.root = ntd.root
        n_nt = ntd.node_count()
        self.bagset = [frozenset(b) for b in ntd.bags]
        # bag-local adjacency per node
        self.bag_adj = []
        for i in range(n_nt):
            adj = {v: set() for v in ntd.bags[i]}
            for (u, v) in ntd.bag_edges[i]:
                adj[u].add(v)
                adj[v].add(u)
            self.bag_adj.append({v: frozenset(a) for v, a in adj.items()})
        # Euler intervals and depths
        self.tin = [0] * n_nt
        self.tout = [0] * n_nt
        self.node_depth = [0] * n_nt
        clock = 0
        stack = [(self.root, False)]
        while stack:
            i, done = stack.pop()
            if done:
                self.tout[i] = clock
                continue
            self.tin[i] = clock
            clock += 1
            stack.append((i, True))
            for c in ntd.children[i]:
                self.node_depth[c] = self.node_depth[i] + 1
                stack.append((c, False))
        self.forget_node = {}
        for i in range(n_nt):
            if ntd.kind[i] == FORGET:
                self.forget_node[ntd.vert[i]] = i
        assert len(self.forget_node) == g.n

        # mutable state
        self.s_set = set(s0)
        self.x_set = set()
        self.f_set = set()
        rest = [v for v in range(g.n) if v not in self.s_set]
        self.pin = min(rest) if rest else None
        self.whatsep = "s"
        self.last_recomputed = 0

        # memoized tables, one dict per node
        self._entry_count = 0
        self.C = [dict() for _ in range(n_nt)]
        self.T1 = [dict() for _ in range(n_nt)]
        self.T2 = [dict() for _ in range(n_nt)]
        self.T3 = [dict() for _ in range(n_nt)]
        self.T4 = [dict() for _ in range(n_nt)]

    # ---------------------------------------------------------- state ops

    def snapshot(self):
        return (frozenset(self.s_set), frozenset(self.x_set),
                frozenset(self.f_set), self.pin, self.whatsep)

    def get_s(self):
        return sorted(self.s_set)

    def get_pin(self):
        return self.pin

    def _path_to_root(self, v):
        i = self.forget_node[v]
        path = []
        while i is not None:
            path.append(i)
            i = self.ntd.parent[i]
        return path

    def _recompute(self, nodes):
        if self.ntd is None:
            self.last_recomputed = 0
            STATS["updates"] += 1
            return
        nodes = sorted(set(nodes), key=lambda i: -self.node_depth[i])
        for i in nodes:
            for table, compute in ((self.C, self._compute_c),
                                   (self.T1, self._compute_t1),
                                   (self.T2, self._compute_t2),
                                   (self.T3, self._compute_t3),
                                   (self.T4, self._compute_t4)):
                tbl = table[i]
                for key in list(tbl.keys()):
                    tbl[key] = compute(i, key)
        self.last_recomputed = len(nodes)
        STATS["updates"] += 1
        STATS["recomputed_nodes"] += len(nodes)
        if len(nodes) > STATS["max_path_nodes"]:
            STATS["max_path_nodes"] = len(nodes)
        if self._entry_count > STATS["table_entries_peak"]:
            STATS["table_entries_peak"] = self._entry_count

    def _update_vertex(self, v):
        if self.ntd is None:
            self._recompute([])
            return
        self._recompute(self._path_to_root(v))

    def insert_s(self, v):
        if v == self.pin:
            raise ValueError("pin_in_S")
        if v in self.s_set:
            raise ValueError("already in S")
        self._state_ver += 1
        self.s_set.add(v)
        self._update_vertex(v)

    def remove_s(self, v):
        self._state_ver += 1
        self.s_set.remove(v)
        self._update_vertex(v)

    def insert_x(self, v):
        if v in self.x_set:
            raise ValueError("already in X")
        self._state_ver += 1
        self.x_set.add(v)
        self._update_vertex(v)

    def remove_x(self, v):
        self._state_ver += 1
        self.x_set.remove(v)
        self._update_vertex(v)

    def insert_f(self, v):
        if v in self.f_set:
            raise ValueError("already in F")
        self.f_set.add(v)
        self._update_vertex(v)

    def remove_f(self, v):
        # F shrinking can re-enable skipped components
        self._np_ptr = 0
        self.f_set.remove(v)
        self._update_vertex(v)

    def clear_s(self):
        for v in sorted(self.s_set):
            self.remove_s(v)

    def clear_x(self):
        for v in sorted(self.x_set):
            self.remove_x(v)

    def clear_f(self):
        for v in sorted(self.f_set):
            self.remove_f(v)

    def set_pin(self, v):
        if v is not None and v in self.s_set:
            raise ValueError("pin_in_S")
        self._state_ver += 1
        if self.ntd is None:
            self.pin = v
            self._recompute([])
            return
        nodes = []
        if self.pin is not None:
            nodes += self._path_to_root(self.pin)
        self.pin = v
        if v is not None:
            nodes += self._path_to_root(v)
        self._recompute(nodes)

    def set_whatsep(self, flag):
        assert flag in ("s", "u")
        self.whatsep = flag
        self.last_recomputed = 0

    # ------------------------------------------------------------ helpers

    def _p(self, i):
        """True iff the pin lies strictly below bag i (pin in W_i)."""
        if self.pin is None:
            return False
        r = self.forget_node[self.pin]
        return self.tin[i] <= self.tin[r] and self.tout[r] <= self.tout[i]

    def _c(self, i, key):
        tbl = self.C[i]
        val = tbl.get(key)
        if val is None:
            val = self._compute_c(i, key)
            tbl[key] = val
            self._entry_count += 1
        return val

    def _t1(self, i, key):
        tbl = self.T1[i]
        val = tbl.get(key)
        if val is None:
            val = self._compute_t1(i, key)
            tbl[key] = val
            self._entry_count += 1
        return val

    def _t2(self, i, key):
        tbl = self.T2[i]
        val = tbl.get(key)
        if val is None:
            val = self._compute_t2(i, key)
            tbl[key] = val
            self._entry_count += 1 if val is BOT else 1 + len(val)
        return val

    def _t3(self, i, key):
        tbl = self.T3[i]
        val = tbl.get(key)
        if val is None:
            val = self._compute_t3(i, key)
            tbl[key] = val
            self._entry_count += 1
        return val

    def _t4(self, i, key):
        tbl = self.T4[i]
        val = tbl.get(key)
        if val is None:
            val = self._compute_t4(i, key)
            tbl[key] = val
            self._entry_count += 1 if val is BOT else 1 + len(val)
        return val

    def _forget_info(self, i, s_i, u_i):
        """Resolve the child signature under a forget node.

        Returns (s_j, u_j, w_to, w_with_pin) where w_to says where the
        forgotten vertex w lands ('S', 'U' or 'out') and w_with_pin is
        True when w's component in the child's extension is known to
        contain the pin.  None when the signature is invalid.
        """
        w = self.ntd.vert[i]
        if w in self.s_set:
            return (s_i | {w}, u_i, "S", False)
        if w == self.pin:
            return (s_i, u_i | {w}, "U", True)
        j = self.ntd.children[i][0]
        c_u = self._c(j, (s_i, u_i | {w}))
        c_0 = self._c(j, (s_i, u_i))
        if c_u is BOT and c_0 is BOT:
            return None
        if c_0 is BOT:
            return (s_i, u_i | {w}, "U", True)
        return (s_i, u_i, "out", False)

    # ------------------------------------------------------- C and CardU

    def _compute_c(self, i, key):
        s_i, u_i = key
        kind = self.ntd.kind[i]
        if kind == LEAF:
            return ((), 0)
        if kind == INTRODUCE:
            j = self.ntd.children[i][0]
            v = self.ntd.vert[i]
            if v in s_i:
                return self._c(j, (s_i - {v}, u_i))
            if v in u_i:
                if self.bag_adj[i][v] - s_i - u_i:
                    return BOT  # v touches a bag vertex outside S_i+U_i
                if u_i == frozenset((v,)) and self._p(i):
                    return BOT  # pin's component below cannot reach v
                val = self._c(j, (s_i, u_i - {v}))
                if val is BOT:
                    return BOT
                parts, cardu = val
                nbrs = self.bag_adj[i][v] & u_i
                merged = {v}
                rest = []
                for cls in parts:
                    if cls & nbrs:
                        merged |= cls
                    else:
                        rest.append(cls)
                return (_canonical(rest + [merged]), cardu)
            # v outside the signature: must not touch U below
            if self.bag_adj[i][v] & u_i:
                return BOT
            return self._c(j, (s_i, u_i))
        if kind == FORGET:
            j = self.ntd.children[i][0]
            info = self._forget_info(i, s_i, u_i)
            if info is None:
                return BOT
            s_j, u_j, w_to, w_pi = info
            val = self._c(j, (s_j, u_j))
            if val is BOT:
                return BOT
            if w_to != "U":
                return val
            w = self.ntd.vert[i]
            parts, cardu = val
            new_parts = []
            for cls in parts:
                if w in cls:
                    if len(cls) == 1:
                        # w's whole component is forgotten; this kills the
                        # signature when it was the pin's component and
                        # there is still U_i to connect to
                        if w_pi and u_i:
                            return BOT
                    else:
                        new_parts.append(cls - {w})
                else:
                    new_parts.append(cls)
            return (_canonical(new_parts), cardu + 1)
        # join
        j1, j2 = self.ntd.children[i]
        v1 = self._c(j1, key)
        if v1 is BOT:
            return BOT
        v2 = self._c(j2, key)
        if v2 is BOT:
            return BOT
        parts = _join_partitions(v1[0], v2[0])
        return (parts, v1[1] + v2[1])

    # ----------------------------------------------------------------- T1

    def _compute_t1(self, i, key):
        if self._c(i, key) is BOT:
            return BOT
        s_i, u_i = key
        kind = self.ntd.kind[i]
        if kind == LEAF:
            return EMPTY
        if kind == INTRODUCE:
            j = self.ntd.children[i][0]
            v = self.ntd.vert[i]
            if v in s_i:
                val = self._t1(j, (s_i - {v}, u_i))
                if val is BOT or val is OVERFLOW:
                    return val
                if self.bag_adj[i][v] & u_i:
                    val = val | {v}
                return OVERFLOW if len(val) > self.ell else val
            if v in u_i:
                val = self._t1(j, (s_i, u_i - {v}))
                if val is BOT or val is OVERFLOW:
                    return val
                val = val | (self.bag_adj[i][v] & s_i)
                return OVERFLOW if len(val) > self.ell else val
            return self._t1(j, key)
        if kind == FORGET:
            j = self.ntd.children[i][0]
            info = self._forget_info(i, s_i, u_i)
            if info is None:
                return BOT
            s_j, u_j, _, _ = info
            return self._t1(j, (s_j, u_j))
        j1, j2 = self.ntd.children[i]
        v1 = self._t1(j1, key)
        v2 = self._t1(j2, key)
        if v1 is BOT or v2 is BOT:
            return BOT
        if v1 is OVERFLOW or v2 is OVERFLOW:
            return OVERFLOW
        val = v1 | v2
        return OVERFLOW if len(val) > self.ell else val

    # ----------------------------------------------------------------- T2
    #
    # Entries are grouped by (signature, role partition): the value is a
    # dict mapping counter tuples (m1, m2, m3, x) to a witness set of x
    # forgotten X-vertices, holding every satisfiable counter tuple within
    # the global caps.  Counters only grow towards the root, so capping
    # them at every node never loses an answer the root query could use,
    # and a join combines two small dicts instead of enumerating the full
    # counter product per query.

    def _compute_t2(self, i, key):
        sig, roles = key
        if self._c(i, sig) is BOT:
            return BOT
        s_i, u_i = sig
        m1s, m2s, m3s, xs = roles
        kind = self.ntd.kind[i]
        if kind == LEAF:
            return {(0, 0, 0, 0): EMPTY}
        if kind == INTRODUCE:
            j = self.ntd.children[i][0]
            v = self.ntd.vert[i]
            if v not in s_i and v not in u_i:
                return self._t2(j, key)
            sig_j = (s_i - {v}, u_i - {v})
            adj = self.bag_adj[i][v]
            groups = (m1s, m2s, m3s)
            for q in range(3):
                if v in groups[q]:
                    for other in range(3):
                        if other != q and adj & groups[other]:
                            return {}
                    new_roles = tuple(grp - {v} if idx == q else grp
                                      for idx, grp in enumerate(groups)
                                      ) + (xs,)
                    val = self._t2(j, (sig_j, new_roles))
                    return val if val is not BOT else {}
            if v in xs:
                val = self._t2(j, (sig_j, (m1s, m2s, m3s, xs - {v})))
                return val if val is not BOT else {}
            return {}  # role partition does not cover v
        if kind == FORGET:
            j = self.ntd.children[i][0]
            info = self._forget_info(i, s_i, u_i)
            if info is None:
                return BOT
            s_j, u_j, w_to, _ = info
            sig_j = (s_j, u_j)
            if w_to == "out":
                val = self._t2(j, (sig_j, roles))
                return val if val is not BOT else {}
            w = self.ntd.vert[i]
            in_s = (w_to == "S")
            groups = (m1s, m2s, m3s)
            out = {}
            for q in range(3):
                new_roles = tuple(grp | {w} if idx == q else grp
                                  for idx, grp in enumerate(groups)) + (xs,)
                sub = self._t2(j, (sig_j, new_roles))
                if sub is BOT:
                    continue
                for (m1, m2, m3, x), wit in sub.items():
                    cnt = [m1, m2, m3]
                    if in_s:
                        cnt[q] += 1
                        if cnt[q] > self._m_cap:
                            continue
                    ckey = (cnt[0], cnt[1], cnt[2], x)
                    if ckey not in out:
                        out[ckey] = wit
            sub = self._t2(j, (sig_j, (m1s, m2s, m3s, xs | {w})))
            if sub is not BOT:
                for (m1, m2, m3, x), wit in sub.items():
                    if x + 1 > self._x_cap:
                        continue
                    ckey = (m1, m2, m3, x + 1)
                    if ckey not in out:
                        out[ckey] = wit | {w}
            return out
        j1, j2 = self.ntd.children[i]
        d1 = self._t2(j1, key)
        d2 = self._t2(j2, key)
        if d1 is BOT or d2 is BOT:
            return BOT
        out = {}
        for (a1, a2, a3, ax), w1 in d1.items():
            for (b1, b2, b3, bx), w2 in d2.items():
                if (a1 + b1 > self._m_cap or a2 + b2 > self._m_cap
                        or a3 + b3 > self._m_cap or ax + bx > self._x_cap):
                    continue
                ckey = (a1 + b1, a2 + b2, a3 + b3, ax + bx)
                if ckey not in out:
                    out[ckey] = w1 | w2
        return out

    # ----------------------------------------------------------------- T3

    def _compute_t3(self, i, key):
        s_i, u_i, x_i, f_i = key
        if self._c(i, (s_i, u_i)) is BOT:
            return BOT
        kind = self.ntd.kind[i]
        if kind == LEAF:
            return ((), (), (None, None))
        if kind == INTRODUCE:
            j = self.ntd.children[i][0]
            v = self.ntd.vert[i]
            if v not in s_i and v not in u_i:
                return self._t3(j, key)
            key_j = (s_i - {v}, u_i - {v}, x_i - {v}, f_i - {v})
            if v in s_i or v in x_i:
                return self._t3(j, key_j)
            # v in U_i outside X_i: joins the tracked ground set
            val = self._t3(j, key_j)
            if val is BOT:
                return BOT
            parts, counts, champ = val
            nbrs = self.bag_adj[i][v] & (u_i - x_i)
            merged = {v}
            merged_count = 0
            rest, rest_counts = [], []
            for cls, cnt in zip(parts, counts):
                if cls & nbrs:
                    merged |= cls
                    if merged_count is None or cnt is None:
                        merged_count = None
                    else:
                        merged_count += cnt
                else:
                    rest.append(cls)
                    rest_counts.append(cnt)
            if v in f_i:
                merged_count = None
            rest.append(frozenset(merged))
            rest_counts.append(merged_count)
            order = sorted(range(len(rest)), key=lambda idx: min(rest[idx]))
            return (tuple(frozenset(rest[idx]) for idx in order),
                    tuple(rest_counts[idx] for idx in order), champ)
        if kind == FORGET:
            j = self.ntd.children[i][0]
            info = self._forget_info(i, s_i, u_i)
            if info is None:
                return BOT
            s_j, u_j, w_to, _ = info
            w = self.ntd.vert[i]
            x_j = x_i | ({w} if (w_to == "U" and w in self.x_set) else set())
            f_j = f_i | ({w} if (w_to == "U" and w in self.f_set
                                 and w not in self.x_set) else set())
            val = self._t3(j, (s_j, u_j, x_j, f_j))
            if val is BOT:
                return BOT
            if w_to != "U" or w in x_j:
                return val
            parts, counts, champ = val
            new_parts, new_counts = [], []
            for cls, cnt in zip(parts, counts):
                if w in cls:
                    if len(cls) == 1:
                        # component fully forgotten: championship contender
                        if cnt is not None:
                            size = cnt + 1
                            if champ[1] is None or size > champ[1]:
                                champ = (w, size)
                    else:
                        new_parts.append(cls - {w})
                        new_counts.append(None if cnt is None else cnt + 1)
                else:
                    new_parts.append(cls)
                    new_counts.append(cnt)
            if new_parts:
                order = sorted(range(len(new_parts)),
                               key=lambda idx: min(new_parts[idx]))
                return (tuple(new_parts[idx] for idx in order),
                        tuple(new_counts[idx] for idx in order), champ)
            return ((), (), champ)
        j1, j2 = self.ntd.children[i]
        v1 = self._t3(j1, key)
        if v1 is BOT:
            return BOT
        v2 = self._t3(j2, key)
        if v2 is BOT:
            return BOT
        parts = _join_partitions(v1[0], v2[0])
        counts = []
        for cls in parts:
            total = 0
            for (cparts, ccounts) in ((v1[0], v1[1]), (v2[0], v2[1])):
                for sub, cnt in zip(cparts, ccounts):
                    if sub & cls:
                        if cnt is None or total is None:
                            total = None
                        else:
                            total += cnt
            counts.append(total)
        champ = v1[2]
        other = v2[2]
        if champ[1] is None or (other[1] is not None
                                and other[1] > champ[1]):
            champ = other
        return (parts, tuple(counts), champ)

    # ----------------------------------------------------------------- T4
    #
    # Grouped like T2: keyed by (signature, (L, X, R) role partition), the
    # value maps the forgotten-X count x to (max r, witness) where r is
    # the number of forgotten R-vertices in a best pushed separation.

    def _compute_t4(self, i, key):
        sig, roles = key
        if self._c(i, sig) is BOT:
            return BOT
        s_i, u_i = sig
        ls, xs, rs = roles
        kind = self.ntd.kind[i]
        if kind == LEAF:
            return {0: (0, EMPTY)}
        if kind == INTRODUCE:
            j = self.ntd.children[i][0]
            v = self.ntd.vert[i]
            if v not in u_i:
                sig_j = (s_i - {v}, u_i) if v in s_i else sig
                val = self._t4(j, (sig_j, roles))
                return val if val is not BOT else {}
            sig_j = (s_i, u_i - {v})
            adj = self.bag_adj[i][v]
            if v in ls:
                if adj & rs:
                    return {}
                val = self._t4(j, (sig_j, (ls - {v}, xs, rs)))
            elif v in rs:
                if adj & ls:
                    return {}
                val = self._t4(j, (sig_j, (ls, xs, rs - {v})))
            else:
                val = self._t4(j, (sig_j, (ls, xs - {v}, rs)))
            return val if val is not BOT else {}
        if kind == FORGET:
            j = self.ntd.children[i][0]
            info = self._forget_info(i, s_i, u_i)
            if info is None:
                return BOT
            s_j, u_j, w_to, _ = info
            sig_j = (s_j, u_j)
            if w_to != "U":
                val = self._t4(j, (sig_j, roles))
                return val if val is not BOT else {}
            w = self.ntd.vert[i]
            out = {}

            def offer(x, r, wit):
                cur = out.get(x)
                if cur is None or r > cur[0]:
                    out[x] = (r, wit)

            sub = self._t4(j, (sig_j, (ls | {w}, xs, rs)))
            if sub is not BOT:
                for x, (r, wit) in sub.items():
                    offer(x, r, wit)
            sub = self._t4(j, (sig_j, (ls, xs | {w}, rs)))
            if sub is not BOT:
                for x, (r, wit) in sub.items():
                    if x + 1 <= self._x_cap:
                        offer(x + 1, r, wit | {w})
            sub = self._t4(j, (sig_j, (ls, xs, rs | {w})))
            if sub is not BOT:
                for x, (r, wit) in sub.items():
                    offer(x, r + 1, wit)
            return out
        j1, j2 = self.ntd.children[i]
        d1 = self._t4(j1, key)
        d2 = self._t4(j2, key)
        if d1 is BOT or d2 is BOT:
            return BOT
        out = {}
        for x1, (r1, w1) in d1.items():
            for x2, (r2, w2) in d2.items():
                if x1 + x2 > self._x_cap:
                    continue
                cur = out.get(x1 + x2)
                if cur is None or r1 + r2 > cur[0]:
                    out[x1 + x2] = (r1 + r2, w1 | w2)
        return out

    # ------------------------------------------------------------ queries

    def _require_pin(self):
        if self.pin is None:
            raise ValueError("no_pin")

    def _root_key(self):
        return (EMPTY, EMPTY)

    def card_u(self):
        """|U| read from the root CardU entry."""
        self._require_pin()
        if self.ntd is None:
            return len(self.extract_u())
        val = self._c(self.root, self._root_key())
        assert val is not BOT
        return val[1]

    def find_neighborhood(self):
        self._require_pin()
        if self.ntd is None:
            np_map = self._np_map
            if (np_map is not None and not self.x_set
                    and self.pin in np_map
                    and self._np_token == self.s_set):
                border = np_map[self.pin][1]
                return OVERFLOW if len(border) > self.ell else sorted(border)
            u = self.extract_u()
            nbhd = {w for v in u for w in self.g.adjacency[v]
                    if w in self.s_set}
            return OVERFLOW if len(nbhd) > self.ell else sorted(nbhd)
        val = self._t1(self.root, self._root_key())
        assert val is not BOT
        return OVERFLOW if val is OVERFLOW else sorted(val)

    def find_s_separator(self):
        self._require_pin()
        if self.ntd is None:
            return self._direct_s_separator()
        half = len(self.s_set) // 2
        entries = self._t2(self.root, (self._root_key(),
                                       (EMPTY, EMPTY, EMPTY, EMPTY)))
        assert entries is not BOT
        best = None
        for (m1, m2, m3, x), wit in entries.items():
            if m1 <= half and m2 <= half and m3 <= half \
                    and x <= self.k + 1:
                cand = sorted(wit)
                if best is None or (len(cand), cand) < (len(best), best):
                    best = cand
        return TW_EXCEEDS if best is None else best

    def _direct_s_separator(self):
        from .separators import half_balanced_s_separator
        u = self.extract_u()
        keep = sorted(self.s_set | u)
        sub, old_of_new = self.g.induced_subgraph(keep)
        new_of_old = {o: i for i, o in enumerate(old_of_new)}
        wit = half_balanced_s_separator(
            sub, {new_of_old[v] for v in self.s_set}, self.k)
        if wit is None:
            return TW_EXCEEDS
        return sorted(old_of_new[v] for v in wit)

    def find_next_pin(self):
        if self.ntd is None:
            return self._direct_next_pin()
        val = self._t3(self.root, (EMPTY, EMPTY, EMPTY, EMPTY))
        assert val is not BOT
        champ = val[2]
        if champ[0] is None:
            return None
        return champ

    def _direct_next_pin(self):
        self._require_pin()
        if self._np_ver != self._state_ver:
            u = self.extract_u()
            removed = self.x_set
            adjacency = self.g.adjacency
            seen = set()
            comps = []
            np_map = {}
            for v in sorted(u):
                if v in seen or v in removed:
                    continue
                comp = {v}
                border = set()
                queue = deque([v])
                seen.add(v)
                while queue:
                    a = queue.popleft()
                    for b in adjacency[a]:
                        if b in u and b not in removed:
                            if b not in seen:
                                seen.add(b)
                                comp.add(b)
                                queue.append(b)
                        else:
                            border.add(b)
                comps.append((len(comp), v, comp))
                np_map[v] = (comp, border)
            comps.sort(key=lambda t: (-t[0], t[1]))
            self._np_comps = comps
            # components and their S/X borders stay valid for any later
            # state whose S equals this S+X (e.g. after the separator is
            # promoted into S), letting queries skip the re-traversal
            self._np_map = np_map
            self._np_token = frozenset(self.s_set | self.x_set)
            self._np_ptr = 0
            self._np_ver = self._state_ver
        comps = self._np_comps
        ptr = self._np_ptr
        # F only grows between rebuilds (remove_f resets the pointer), so
        # components skipped once stay ineligible
        while ptr < len(comps) and (comps[ptr][2] & self.f_set):
            ptr += 1
        self._np_ptr = ptr
        if ptr == len(comps):
            return None
        size, vmin, _ = comps[ptr]
        return (vmin, size)

    def extract_u(self):
        """The pin's component of G minus S, by direct search (cached per
        S/X/pin state version)."""
        self._require_pin()
        if self._u_ver == self._state_ver:
            return self._u_cache
        np_map = self._np_map
        if (np_map is not None and not self.x_set and self.pin in np_map
                and self._np_token == self.s_set):
            comp = np_map[self.pin][0]
            self._u_cache = comp
            self._u_ver = self._state_ver
            return comp
        comp = {self.pin}
        queue = deque([self.pin])
        while queue:
            v = queue.popleft()
            for w in self.g.adjacency[v]:
                if w not in self.s_set and w not in comp:
                    comp.add(w)
                    queue.append(w)
        self._u_cache = comp
        self._u_ver = self._state_ver
        return comp

    def find_u_separator(self):
        self._require_pin()
        size_u = self.card_u()
        if size_u <= 1:
            return []
        if self.ntd is None:
            return self._direct_u_separator()
        threshold = self._small_u_threshold
        if threshold is None:
            threshold = 36 * (self.k + self.t + 2)
        if size_u < threshold:
            return self._small_u_separator()
        return self._traced_u_separator(size_u)

    def _direct_u_separator(self):
        from .separators import balanced_u_separator
        keep = sorted(self.extract_u())
        sub, old_of_new = self.g.induced_subgraph(keep)
        wit = balanced_u_separator(sub, self.k)
        if wit is None:
            return TW_EXCEEDS
        return sorted(old_of_new[v] for v in wit)

    def _small_u_separator(self):
        u = sorted(self.extract_u())
        total = len(u)
        uset = set(u)
        for size in range(self.k + 2):
            for cand in combinations(u, size):
                cset = set(cand)
                seen = set(cset)
                ok = True
                for v in u:
                    if v in seen:
                        continue
                    comp = {v}
                    queue = deque([v])
                    seen.add(v)
                    while queue:
                        a = queue.popleft()
                        for b in self.g.adjacency[a]:
                            if b in uset and b not in seen:
                                seen.add(b)
                                comp.add(b)
                                queue.append(b)
                    if 2 * len(comp) > total:
                        ok = False
                        break
                if ok:
                    return list(cand)
        return TW_EXCEEDS

    def trace_heavy_node(self):
        """First node (descending from the root) whose below-the-bag share
        of U drops under |U|/2; that share is then >= |U|/4."""
        self._require_pin()
        size_u = self.card_u()
        i = self.root
        s_i, u_i = self._root_key()
        while True:
            kind = self.ntd.kind[i]
            if kind == LEAF:
                return (i, u_i, s_i)
            if kind == INTRODUCE:
                j = self.ntd.children[i][0]
                v = self.ntd.vert[i]
                nxt = (j, s_i - {v}, u_i - {v})
            elif kind == FORGET:
                j = self.ntd.children[i][0]
                info = self._forget_info(i, s_i, u_i)
                assert info is not None
                nxt = (j, info[0], info[1])
            else:
                j1, j2 = self.ntd.children[i]
                c1 = self._c(j1, (s_i, u_i))
                c2 = self._c(j2, (s_i, u_i))
                assert c1 is not BOT and c2 is not BOT
                nxt = (j1, s_i, u_i) if c1[1] >= c2[1] else (j2, s_i, u_i)
            j, s_j, u_j = nxt
            val = self._c(j, (s_j, u_j))
            assert val is not BOT
            if 2 * val[1] < size_u:
                assert 4 * val[1] >= size_u or self._small_u_threshold \
                    is not None
                return (j, u_j, s_j)
            i, s_i, u_i = j, s_j, u_j

    def _traced_u_separator(self, size_u):
        i0, u_i0, s_i0 = self.trace_heavy_node()
        n2 = self._c(i0, (s_i0, u_i0))[1]
        n1 = size_u - n2 - len(u_i0)
        path = []
        i = i0
        while i is not None:
            path.append(i)
            i = self.ntd.parent[i]
        bag_terms = sorted(u_i0)
        # enumerate partitions (T_L, X_B, T_R) of the bag's U part
        for code in range(3 ** len(bag_terms)):
            t_l, x_b, t_r = set(), set(), set()
            c = code
            for v in bag_terms:
                (t_l, x_b, t_r)[c % 3].add(v)
                c //= 3
            if len(x_b) > self.k + 1:
                continue
            if any(self.bag_adj[i0][a] & t_r for a in t_l):
                continue
            t_l, x_b, t_r = frozenset(t_l), frozenset(x_b), frozenset(t_r)
            memo = {}
            d_val = self._d_eval_factory(path, (s_i0, u_i0),
                                         (t_r, x_b, t_l), memo)
            top_dict = d_val(len(path) - 1,
                             ((EMPTY, EMPTY), (EMPTY, EMPTY, EMPTY)))
            below_dict = self._t4(i0, ((s_i0, u_i0), (t_l, x_b, t_r)))
            if top_dict is BOT or below_dict is BOT:
                continue
            for x_tot in range(len(x_b), self.k + 2):
                if x_tot not in top_dict:
                    continue
                r_star, x0d = top_dict[x_tot]
                for kp in range(self.k + 2 - x_tot):
                    if kp not in below_dict:
                        continue
                    r2, x2 = below_dict[kp]
                    left = r_star + n2 - r2 - kp
                    right = r2 + len(t_r) + n1 - (r_star - len(t_l)) \
                        - (x_tot - len(x_b))
                    if left < 0 or right < 0:
                        continue
                    if 9 * left <= 8 * size_u and 9 * right <= 8 * size_u:
                        sep = sorted(x0d | x2)
                        assert len(sep) <= self.k + 1
                        return sep
        return TW_EXCEEDS

    def _d_eval_factory(self, path, sig0, seed_roles, memo):
        """Path DP for the 'outside the heavy subtree' pushed separation.

        Mirrors the T4 recurrences along the i0->root path; at i0 itself a
        dummy table answers only the seeded interface (terminals swapped,
        zero forgotten-X count), which excludes everything below i0."""
        pos = {node: t for t, node in enumerate(path)}

        def d(t, key):
            mk = (t, key)
            if mk in memo:
                return memo[mk]
            val = self._d_compute(d, path, pos, sig0, seed_roles, t, key)
            memo[mk] = val
            return val

        return d

    def _d_compute(self, d, path, pos, sig0, seed_roles, t, key):
        sig, roles = key
        s_i, u_i = sig
        ls, xs, rs = roles
        if t == 0:
            if sig == sig0 and (ls, xs, rs) == seed_roles:
                return {0: (0, EMPTY)}
            return {}
        i = path[t]
        kind = self.ntd.kind[i]
        if kind == INTRODUCE:
            v = self.ntd.vert[i]
            if v not in u_i:
                sig_j = (s_i - {v}, u_i) if v in s_i else sig
                return d(t - 1, (sig_j, roles))
            sig_j = (s_i, u_i - {v})
            adj = self.bag_adj[i][v]
            if v in ls:
                if adj & rs:
                    return {}
                return d(t - 1, (sig_j, (ls - {v}, xs, rs)))
            if v in rs:
                if adj & ls:
                    return {}
                return d(t - 1, (sig_j, (ls, xs, rs - {v})))
            return d(t - 1, (sig_j, (ls, xs - {v}, rs)))
        if kind == FORGET:
            info = self._forget_info(i, s_i, u_i)
            if info is None:
                return {}
            s_j, u_j, w_to, _ = info
            sig_j = (s_j, u_j)
            if w_to != "U":
                return d(t - 1, (sig_j, roles))
            w = self.ntd.vert[i]
            out = {}

            def offer(x, r, wit):
                cur = out.get(x)
                if cur is None or r > cur[0]:
                    out[x] = (r, wit)

            for x, (r, wit) in d(t - 1, (sig_j, (ls | {w}, xs, rs))).items():
                offer(x, r, wit)
            for x, (r, wit) in d(t - 1, (sig_j, (ls, xs | {w}, rs))).items():
                if x + 1 <= self._x_cap:
                    offer(x + 1, r, wit | {w})
            for x, (r, wit) in d(t - 1, (sig_j, (ls, xs, rs | {w}))).items():
                offer(x, r + 1, wit)
            return out
        # join: one child continues the path, the other is a full subtree
        # handled via its regular T4 table
        j1, j2 = self.ntd.children[i]
        on_path = path[t - 1]
        off = j2 if j1 == on_path else j1
        d1 = d(t - 1, key)
        d2 = self._t4(off, key)
        if d2 is BOT:
            return {}
        out = {}
        for x1, (r1, w1) in d1.items():
            for x2, (r2, w2) in d2.items():
                if x1 + x2 > self._x_cap:
                    continue
                cur = out.get(x1 + x2)
                if cur is None or r1 + r2 > cur[0]:
                    out[x1 + x2] = (r1 + r2, w1 | w2)
        return out


def ensure_recursion_headroom(extra=200000):
    if sys.getrecursionlimit() < extra:
        sys.setrecursionlimit(extra)
