"""Approximation pipelines.

rs_4approx        width <= 4k+3, quadratic-ish baseline
alg1/compress1    width <= 3k+4 via the dynamic data structure (find_td)
alg_alpha/...     width <= 5k+4 via partial decompositions (find_partial_td)
approximate       driver: per-component dispatch plus self-validation
search_min_k      outer search for the smallest accepted k
"""

import gc
from collections import namedtuple

from .graph import (edge_bound_check, connected_components, maximal_matching,
                    contract_matching, decontract_decomposition,
                    improved_graph, i_simplicial_vertices,
                    reintroduce_simplicial)
from .separators import flow_s_separator
from .td import (TreeDecomposition, width as td_width, validate,
                 build_forgotten_map, locate_bag_containing,
                 build_from_parts)
from .tables import (DsState, TW_EXCEEDS, OVERFLOW,
                     ensure_recursion_headroom)

C_RED = 16  # reduction-threshold constant (see ledger)

PartialResult = namedtuple("PartialResult", ["partial", "covered"])


def mode_width_bound(mode, k):
    return {"rs4": 4 * k + 3, "three": 3 * k + 4, "five": 5 * k + 4}[mode]


def relabel_decomposition(td, old_of_new):
    """Map bag contents through old_of_new (new id -> original id)."""
    bags = [frozenset(old_of_new[v] for v in bag) for bag in td.bags]
    return TreeDecomposition(bags, list(td.parent), td.root)


def _merge_same_root(root_bag, tds):
    """Combine decompositions that all share root_bag as their root bag."""
    bags = [frozenset(root_bag)]
    parent = [None]
    for td in tds:
        assert td.bags[td.root] == bags[0]
        off = len(bags)
        remap = {}
        order = [td.root]
        i = 0
        while i < len(order):
            order.extend(td.children[order[i]])
            i += 1
        for node in order:
            if node == td.root:
                remap[node] = 0
                continue
            remap[node] = len(bags)
            bags.append(td.bags[node])
            parent.append(None)
        for node in order:
            if node != td.root:
                parent[remap[node]] = remap[td.parent[node]]
    return TreeDecomposition(bags, parent, 0)


# --------------------------------------------------------------- baseline

def rs_4approx(g, k, s=()):
    """Width <= 4k+3 decomposition with top bag containing s, or tw_exceeds.

    Each step pads the boundary to exactly 3k+3 vertices, splits it with a
    2/3-balanced flow separator (both sides nonempty, so every component
    loses a boundary vertex and the recursion strictly shrinks), and
    recurses per component.
    """
    s = frozenset(s)
    if len(s) > 3 * k + 3:
        raise ValueError("boundary too large: %d > %d" % (len(s), 3 * k + 3))
    if g.n == 0:
        return TreeDecomposition([frozenset()], [None], 0)
    if edge_bound_check(g, k) == "too_many_edges":
        return TW_EXCEEDS
    bags = []
    parent = []
    stack = [(frozenset(range(g.n)), s, None)]
    while stack:
        verts, cur_s, par = stack.pop()
        assert cur_s <= verts
        if len(verts) <= 4 * k + 4:
            bags.append(verts)
            parent.append(par)
            continue
        pad = sorted(verts - cur_s)[:3 * k + 3 - len(cur_s)]
        w = cur_s | frozenset(pad)
        sub, old_of_new = g.induced_subgraph(verts)
        new_of_old = {o: i for i, o in enumerate(old_of_new)}
        x_new = flow_s_separator(sub, [new_of_old[v] for v in w], k,
                                 require_split=True)
        if x_new == "tw_exceeds":
            return TW_EXCEEDS
        x = frozenset(old_of_new[v] for v in x_new)
        bag = w | x
        assert len(bag) <= 4 * k + 4
        bags.append(bag)
        parent.append(par)
        me = len(bags) - 1
        comp_forbidden = (set(range(g.n)) - set(verts)) | set(x)
        for comp in connected_components(g, comp_forbidden):
            comp = frozenset(comp)
            child_verts = comp | x
            assert child_verts < verts, "separator made no progress"
            stack.append((child_verts, (w & comp) | x, me))
    return TreeDecomposition(bags, parent, 0)


# ----------------------------------------------------- find_td (3-approx)

class _Frame(object):
    __slots__ = ("old_s", "old_pin", "sep", "pins", "bags", "idx",
                 "children")

    def __init__(self):
        self.old_s = None
        self.old_pin = None
        self.sep = None
        self.pins = []
        self.bags = []
        self.idx = 0
        self.children = []


def _set_state(ds, s_target, pin_target):
    s_target = set(s_target)
    ds.set_pin(None)
    for v in sorted(ds.s_set - s_target):
        ds.remove_s(v)
    for v in sorted(s_target - ds.s_set):
        ds.insert_s(v)
    ds.set_pin(pin_target)


def _enumerate_pins(ds, sep, min_size=1):
    """Pins of the components of U minus sep, via F-marking; components
    smaller than min_size are skipped (sizes arrive non-increasing)."""
    for v in sorted(set(sep) - ds.s_set):
        ds.insert_x(v)
    pins = []
    while True:
        hit = ds.find_next_pin()
        if hit is None:
            break
        u, size = hit
        if size < min_size:
            break
        pins.append(u)
        ds.insert_f(u)
    ds.clear_f()
    ds.clear_x()
    return pins


def _open_frame(ds, k, s_cap, use_pin_in_sep, min_size=1):
    """Shared opening phase of find_td / find_partial_td frames: choose a
    separator, enumerate child pins, move S to old_S+sep, and collect each
    child's neighborhood bag.  Returns a _Frame or tw_exceeds."""
    f = _Frame()
    f.old_s = frozenset(ds.s_set)
    f.old_pin = ds.pin
    assert f.old_pin is not None
    assert len(f.old_s) <= s_cap, (len(f.old_s), s_cap)
    if ds.whatsep == "u":
        sep = ds.find_u_separator()
    else:
        sep = ds.find_s_separator()
    if sep == TW_EXCEEDS:
        return TW_EXCEEDS
    sep = set(sep)
    if use_pin_in_sep:
        sep.add(ds.pin)
    f.sep = frozenset(sep)
    f.pins = _enumerate_pins(ds, sep, min_size)
    _set_state(ds, f.old_s | f.sep, None)
    for u in f.pins:
        ds.set_pin(u)
        nb = ds.find_neighborhood()
        if nb == OVERFLOW:
            return TW_EXCEEDS
        f.bags.append(frozenset(nb))
    return f


def _close_frame(ds, f):
    _set_state(ds, f.old_s, f.old_pin)
    return build_from_parts(f.old_s, f.sep - f.old_s, f.children)


def _unwind(ds, stack):
    for f in reversed(stack):
        _set_state(ds, f.old_s, f.old_pin)


def _single_bag_shortcut(ds, bag_cap):
    """When S+U fits in one bag under the cap: the two-bag decomposition
    (root S, child S+U), or tw_exceeds if the edge count of G[S+U] already
    rules out treewidth k.  None when the component is too large."""
    s = ds.s_set
    if len(s) + ds.card_u() > bag_cap:
        return None
    comp = ds.extract_u() | s
    adjacency = ds.g.adjacency
    twice_m = sum(1 for v in comp for w in adjacency[v] if w in comp)
    if twice_m > 2 * len(comp) * ds.k:
        return TW_EXCEEDS
    return build_from_parts(frozenset(s), frozenset(ds.extract_u()), [])


def find_td(ds, s_cap=None):
    """Decomposition of G[S+U] with the current S as root bag, width at
    most |S|+k+2 bag size, or tw_exceeds.  Explicit work stack; the data
    structure state is restored exactly on exit."""
    k = ds.k
    if s_cap is None:
        s_cap = 2 * k + 3
    bag_cap = s_cap + k + 2  # every produced bag must stay under this
    before = ds.snapshot()
    assert ds.whatsep == "s"
    short = _single_bag_shortcut(ds, bag_cap)
    if short is not None:
        return short
    stack = []
    f = _open_frame(ds, k, s_cap, use_pin_in_sep=True)
    if f == TW_EXCEEDS:
        _set_state(ds, before[0], before[3])
        return TW_EXCEEDS
    stack.append(f)
    result = None
    while stack:
        f = stack[-1]
        if f.idx < len(f.pins):
            u, bag = f.pins[f.idx], f.bags[f.idx]
            f.idx += 1
            _set_state(ds, bag, u)
            short = _single_bag_shortcut(ds, bag_cap)
            if short is not None:
                if short == TW_EXCEEDS:
                    _set_state(ds, f.old_s | f.sep, None)
                    _unwind(ds, stack)
                    return TW_EXCEEDS
                _set_state(ds, f.old_s | f.sep, None)
                f.children.append(short)
                continue
            child = _open_frame(ds, k, s_cap, use_pin_in_sep=True)
            if child == TW_EXCEEDS:
                _set_state(ds, f.old_s | f.sep, None)
                _unwind(ds, stack)
                return TW_EXCEEDS
            stack.append(child)
        else:
            stack.pop()
            td = _close_frame(ds, f)
            if stack:
                # back at the parent: restore its working S for the next
                # child transition
                parent = stack[-1]
                _set_state(ds, parent.old_s | parent.sep, None)
                parent.children.append(td)
            else:
                result = td
    assert ds.snapshot() == before, "state not rolled back"
    return result


def find_partial_td(ds, log_threshold):
    """Partial decomposition: like find_td, but alternates S- and
    U-separators (whatsep flag) and stops recursing into components
    smaller than log_threshold, leaving them uncovered."""
    k = ds.k
    min_size = max(log_threshold, 2)
    before = ds.snapshot()

    def cap():
        return 4 * k + 3 if ds.whatsep == "s" else 3 * k + 2

    def toggle():
        ds.set_whatsep("u" if ds.whatsep == "s" else "s")

    whatsep0 = ds.whatsep
    stack = []
    flags = []
    f = _open_frame(ds, k, cap(), use_pin_in_sep=False, min_size=min_size)
    if f == TW_EXCEEDS:
        _set_state(ds, before[0], before[3])
        ds.set_whatsep(whatsep0)
        return TW_EXCEEDS
    stack.append(f)
    flags.append(ds.whatsep)
    result = None
    while stack:
        f = stack[-1]
        if f.idx < len(f.pins):
            u, bag = f.pins[f.idx], f.bags[f.idx]
            f.idx += 1
            _set_state(ds, bag, u)
            ds.set_whatsep("u" if flags[-1] == "s" else "s")
            child = _open_frame(ds, k, cap(), use_pin_in_sep=False,
                                min_size=min_size)
            if child == TW_EXCEEDS:
                _set_state(ds, f.old_s | f.sep, None)
                _unwind(ds, stack)
                ds.set_whatsep(whatsep0)
                return TW_EXCEEDS
            stack.append(child)
            flags.append(ds.whatsep)
        else:
            stack.pop()
            flags.pop()
            td = _close_frame(ds, f)
            if stack:
                parent = stack[-1]
                _set_state(ds, parent.old_s | parent.sep, None)
                ds.set_whatsep(flags[-1])
                parent.children.append(td)
            else:
                result = td
    ds.set_whatsep(whatsep0)
    assert ds.snapshot() == before, "state not rolled back"
    covered = frozenset().union(*result.bags) if result.bags else frozenset()
    return PartialResult(result, covered)


# ------------------------------------------------------------- compress

def compress1(g, k, s0, td_apx, s_cap=None):
    """Recompress td_apx to width <= 3k+4 (<= 5k+4 under the relaxed cap)
    with root bag exactly s0, or tw_exceeds."""
    s0 = frozenset(s0)
    if not (set(range(g.n)) - s0):
        return TreeDecomposition([s0], [None], 0)
    ds = DsState(g, k, td_apx, s0)
    parts = []
    for comp in connected_components(g, s0):
        ds.set_pin(min(comp))
        td = find_td(ds, s_cap=s_cap)
        if td == TW_EXCEEDS:
            return TW_EXCEEDS
        parts.append(td)
    return _merge_same_root(s0, parts)


def compress_alpha(alpha, g, k, s0, td_apx):
    """Width <= 5k+4 decomposition with root bag s0, or tw_exceeds; at
    alpha > 1 decompose partially and recurse on the leftover (small)
    components."""
    assert alpha >= 1
    s0 = frozenset(s0)
    if alpha == 1:
        return compress1(g, k, s0, td_apx, s_cap=4 * k + 3)
    if not (set(range(g.n)) - s0):
        return TreeDecomposition([s0], [None], 0)
    log_threshold = max(1, (max(g.n, 2) - 1).bit_length())  # ceil(log2 n)
    ds = DsState(g, k, td_apx, s0)
    parts = []
    for comp in connected_components(g, s0):
        ds.set_pin(min(comp))
        pr = find_partial_td(ds, log_threshold)
        if pr == TW_EXCEEDS:
            return TW_EXCEEDS
        parts.append(pr.partial)
    partial = _merge_same_root(s0, parts)
    covered = frozenset().union(*partial.bags)
    forgotten = build_forgotten_map(partial)
    # accumulate all attachments into flat lists; repeated attach_subtree
    # calls would copy the whole decomposition per component
    bags = list(partial.bags)
    parent = list(partial.parent)
    for comp in connected_components(g, covered):
        nbr = frozenset(v for c in comp for v in g.adjacency[c]) - set(comp)
        assert nbr <= covered
        if len(nbr) > 4 * k + 3:
            return TW_EXCEEDS  # interface too large for a width-k graph
        sub_g, old_of_new = g.induced_subgraph(set(comp) | nbr)
        new_of_old = {o: i for i, o in enumerate(old_of_new)}
        sub_s0 = frozenset(new_of_old[v] for v in nbr)
        sub_td = alg_alpha(alpha - 1, sub_g, k, sub_s0)
        if sub_td == TW_EXCEEDS:
            return TW_EXCEEDS
        host = locate_bag_containing(partial, forgotten, nbr)
        assert host is not None, "component interface not inside a bag"
        off = len(bags)
        bags.extend(frozenset(old_of_new[v] for v in b) for b in sub_td.bags)
        parent.extend(off + p if p is not None else host
                      for p in sub_td.parent)
    return TreeDecomposition(bags, parent, partial.root)


# -------------------------------------------------------- reduction loop

def _trivial_or_exact(g, k, s0):
    """Base case for tiny graphs: exact rejection when feasible, else the
    two-bag decomposition rooted at s0."""
    from .exact import exact_treewidth
    if g.n <= 18:
        tw = exact_treewidth(g)
        if tw > k:
            return TW_EXCEEDS
    return build_from_parts(s0, frozenset(range(g.n)) - set(s0), [])


def _reduction_pipeline(g, k, s0, param, compress_fn):
    """Shared skeleton of alg1 / alg_alpha: reduce (matching contraction or
    I-simplicial removal), recurse, lift, recompress."""
    s0 = frozenset(s0)
    if g.n <= 3 * k + 5:
        return _trivial_or_exact(g, k, s0)
    if edge_bound_check(g, k) == "too_many_edges":
        return TW_EXCEEDS

    def self_call(g2, s2):
        return _reduction_pipeline(g2, k, s2, param, compress_fn)

    matching = maximal_matching(g)
    gi = None
    if not s0:
        gi = improved_graph(g, param)
        xsimp = i_simplicial_vertices(g, param, gi=gi)
    else:
        xsimp = []
    # never used on graphs carrying a boundary: reductions must not touch s0
    if s0:
        matching = [e for e in matching
                    if e[0] not in s0 and e[1] not in s0]
    threshold = max(1, g.n // (C_RED * max(k, 1) ** 6))
    use_simplicial = (len(xsimp) >= len(matching)
                      and len(xsimp) >= threshold)
    if use_simplicial:
        # recurse on the improved graph minus the simplicial set: each
        # removed vertex's neighborhood is a clique there, so the child
        # decomposition has a bag that can host the reattached leaf
        xsimp_set = set(xsimp)
        keep = [v for v in range(g.n) if v not in xsimp_set]
        sub_g, old_of_new = gi.induced_subgraph(keep)
        sub = self_call(sub_g, frozenset())
        if sub == TW_EXCEEDS:
            return TW_EXCEEDS
        lifted = relabel_decomposition(sub, old_of_new)
        lifted = reintroduce_simplicial(lifted, xsimp, g, param, gi=gi)
        if lifted == "tw_exceeds":
            return TW_EXCEEDS
        del sub_g, sub, old_of_new  # keep peak memory down
    elif matching:
        sub_g, vertex_map = contract_matching(g, matching)
        new_s0 = frozenset(vertex_map[v] for v in s0)
        sub = self_call(sub_g, new_s0)
        if sub == TW_EXCEEDS:
            return TW_EXCEEDS
        lifted = decontract_decomposition(sub, vertex_map)
        del sub_g, sub, vertex_map  # keep peak memory down
    else:
        # edgeless residual outside s0: the two-bag decomposition is exact
        if g.m == 0 or all(u in s0 or v in s0 for (u, v) in g.edges()):
            return build_from_parts(s0, frozenset(range(g.n)) - s0, [])
        lifted = rs_4approx(g, k)
        if lifted == TW_EXCEEDS:
            return TW_EXCEEDS
    gi = None  # drop the improved graph before the compression phase
    return compress_fn(g, k, s0, lifted)


def alg1(g, k, s0=()):
    """3-approximation: width <= 3k+4 with root bag s0, or tw_exceeds."""
    ensure_recursion_headroom()
    return _reduction_pipeline(g, k, s0, 3 * k + 4,
                               lambda g2, k2, s2, td: compress1(
                                   g2, k2, s2, td))


def alg_alpha(alpha, g, k, s0=()):
    """5-approximation family: width <= 5k+4 with root bag s0."""
    ensure_recursion_headroom()
    return _reduction_pipeline(g, k, s0, 5 * k + 4,
                               lambda g2, k2, s2, td: compress_alpha(
                                   alpha, g2, k2, s2, td))


# ---------------------------------------------------------------- driver

def approximate(g, k, mode="five", alpha=2):
    """Decompose g (any shape, disconnected allowed) or report tw_exceeds.

    Validates its own output and the mode's width bound before returning.
    """
    if k < 0:
        raise ValueError("negative k")
    if mode not in ("rs4", "three", "five"):
        raise ValueError("unknown mode %r" % (mode,))
    if g.n == 0:
        return TreeDecomposition([frozenset()], [None], 0)
    # the hot paths allocate heavily but create no reference cycles, so
    # cyclic-GC passes over the large live heap are pure overhead here
    gc_was_enabled = gc.isenabled()
    if gc_was_enabled and g.n > 4096:
        gc.collect()
        gc.disable()
    try:
        return _approximate(g, k, mode, alpha)
    finally:
        if gc_was_enabled and not gc.isenabled():
            gc.enable()


def _approximate(g, k, mode, alpha):
    comps = connected_components(g)
    parts = []
    for comp in comps:
        sub_g, old_of_new = g.induced_subgraph(comp)
        if mode == "rs4":
            td = rs_4approx(sub_g, k)
        elif mode == "three":
            td = alg1(sub_g, k)
        else:
            td = alg_alpha(alpha, sub_g, k)
        if td == TW_EXCEEDS:
            return TW_EXCEEDS
        parts.append(relabel_decomposition(td, old_of_new))
    if len(parts) == 1:
        out = parts[0]
    else:
        bags = [frozenset()]
        parent = [None]
        for td in parts:
            off = len(bags)
            bags.extend(td.bags)
            for i, p in enumerate(td.parent):
                parent.append(off + p if p is not None else 0)
        out = TreeDecomposition(bags, parent, 0)
    issue = validate(g, out)
    assert issue is None, issue
    assert td_width(out) <= mode_width_bound(mode, k)
    return out


def search_min_k(g, mode="five", alpha=2):
    """Smallest k in a doubling-then-binary schedule accepted by
    approximate(); certifies rejection at k_found - 1."""
    if approximate(g, 0, mode, alpha) != TW_EXCEEDS:
        return 0, approximate(g, 0, mode, alpha)
    lo, hi = 0, 1  # lo: rejected, hi: candidate
    while approximate(g, hi, mode, alpha) == TW_EXCEEDS:
        lo, hi = hi, hi * 2
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if approximate(g, mid, mode, alpha) == TW_EXCEEDS:
            lo = mid
        else:
            hi = mid
    td = approximate(g, hi, mode, alpha)
    assert td != TW_EXCEEDS
    assert approximate(g, hi - 1, mode, alpha) == TW_EXCEEDS
    return hi, td
