"""Command-line front end: PACE-format I/O and the decompose / validate /
exact / stats / bench commands.

Exit codes: 0 decomposition written (or command succeeded), 1 treewidth
exceeds k, 2 invalid input, 3 internal invariant failure.
"""

import argparse
import json
import logging
import os
import sys
import time

from .graph import Graph
from .td import TreeDecomposition, validate, width as td_width
from .exact import exact_treewidth
from .decompose import approximate, search_min_k, mode_width_bound
from . import tables

log = logging.getLogger("twkit")


class ParseError(ValueError):
    pass


def parse_gr(text):
    """PACE 2017 graph format: header 'p tw <n> <m>', 1-based edge lines."""
    n = None
    edges = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        parts = line.split()
        if parts[0] == "p":
            if n is not None:
                raise ParseError("line %d: duplicate header" % lineno)
            if len(parts) != 4 or parts[1] != "tw":
                raise ParseError("line %d: bad header %r" % (lineno, raw))
            n, m_declared = int(parts[2]), int(parts[3])
            continue
        if n is None:
            raise ParseError("line %d: edge before header" % lineno)
        if len(parts) != 2:
            raise ParseError("line %d: bad edge line %r" % (lineno, raw))
        u, v = int(parts[0]), int(parts[1])
        if not (1 <= u <= n and 1 <= v <= n):
            raise ParseError("line %d: vertex id out of range" % lineno)
        edges.append((u - 1, v - 1))
    if n is None:
        raise ParseError("missing 'p tw' header")
    if len(edges) != m_declared:
        raise ParseError("edge count %d does not match header %d"
                         % (len(edges), m_declared))
    try:
        return Graph(n, edges)
    except ValueError as exc:
        raise ParseError(str(exc))


def emit_td(td, g):
    """PACE 2017 .td format; deterministic byte output."""
    lines = ["s td %d %d %d" % (td.node_count(), td_width(td) + 1, g.n)]
    for i, bag in enumerate(td.bags):
        lines.append(" ".join(["b", str(i + 1)]
                              + [str(v + 1) for v in sorted(bag)]))
    tree_edges = sorted(
        (min(i, p) + 1, max(i, p) + 1)
        for i, p in enumerate(td.parent) if p is not None)
    for (a, b) in tree_edges:
        lines.append("%d %d" % (a, b))
    return "\n".join(lines) + "\n"


def parse_td(text):
    """Parse the .td format back into a TreeDecomposition (rooted at the
    first node)."""
    header = None
    bags = {}
    tree_edges = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        parts = line.split()
        if parts[0] == "s":
            if header is not None:
                raise ParseError("line %d: duplicate header" % lineno)
            if len(parts) != 5 or parts[1] != "td":
                raise ParseError("line %d: bad header" % lineno)
            header = (int(parts[2]), int(parts[3]), int(parts[4]))
            continue
        if header is None:
            raise ParseError("line %d: content before header" % lineno)
        if parts[0] == "b":
            i = int(parts[1]) - 1
            if i in bags:
                raise ParseError("line %d: duplicate bag %d" % (lineno, i + 1))
            bags[i] = frozenset(int(v) - 1 for v in parts[2:])
            continue
        if len(parts) != 2:
            raise ParseError("line %d: bad line %r" % (lineno, raw))
        tree_edges.append((int(parts[0]) - 1, int(parts[1]) - 1))
    if header is None:
        raise ParseError("missing 's td' header")
    count = header[0]
    if sorted(bags) != list(range(count)):
        raise ParseError("bag ids are not 1..%d" % count)
    adj = [[] for _ in range(count)]
    for (a, b) in tree_edges:
        if not (0 <= a < count and 0 <= b < count):
            raise ParseError("tree edge out of range")
        adj[a].append(b)
        adj[b].append(a)
    parent = [None] * count
    seen = [False] * count
    stack = [0] if count else []
    if stack:
        seen[0] = True
    while stack:
        u = stack.pop()
        for v in adj[u]:
            if not seen[v]:
                seen[v] = True
                parent[v] = u
                stack.append(v)
    if count and not all(seen):
        raise ParseError("decomposition tree is not connected")
    return TreeDecomposition([bags[i] for i in range(count)], parent,
                             0 if count else None)


def _read(path):
    with open(path, "r") as fh:
        return fh.read()


def _run_decompose(args):
    g = parse_gr(_read(args.input))
    tables.reset_stats()
    start = time.monotonic()
    if args.search:
        k, td = search_min_k(g, args.mode, args.alpha)
    else:
        k = args.k
        if k is None:
            raise ParseError("--k is required without --search")
        td = approximate(g, k, args.mode, args.alpha)
    elapsed = time.monotonic() - start
    report = {
        "input": os.path.basename(args.input),
        "n": g.n, "m": g.m, "k": k, "mode": args.mode,
        "wall_time_s": round(elapsed, 6),
        "updates": tables.STATS["updates"],
        "recomputed_nodes": tables.STATS["recomputed_nodes"],
        "max_update_path_nodes": tables.STATS["max_path_nodes"],
        "peak_table_entries": tables.STATS["table_entries_peak"],
    }
    if td == "tw_exceeds":
        report["outcome"] = "tw_exceeds"
        return 1, None, report
    issue = validate(g, td)
    if issue is not None:
        raise AssertionError("output failed validation: %s" % issue)
    report["outcome"] = "decomposition"
    report["width"] = td_width(td)
    report["bag_count"] = td.node_count()
    return 0, td, report


def cmd_decompose(args):
    code, td, report = _run_decompose(args)
    if code == 0:
        sys.stdout.write(emit_td(td, parse_gr(_read(args.input))))
    else:
        sys.stdout.write("c treewidth exceeds %d\n" % report["k"])
    return code


def cmd_stats(args):
    code, _, report = _run_decompose(args)
    if args.json:
        sys.stdout.write(json.dumps(report, sort_keys=True) + "\n")
    else:
        for key in sorted(report):
            sys.stdout.write("%s: %s\n" % (key, report[key]))
    return 0 if code in (0, 1) else code


def cmd_validate(args):
    g = parse_gr(_read(args.input))
    td = parse_td(_read(args.decomposition))
    issue = validate(g, td)
    if issue is None:
        sys.stdout.write("valid, width %d\n" % td_width(td))
        return 0
    sys.stdout.write("invalid: %s\n" % issue)
    return 2


def cmd_exact(args):
    g = parse_gr(_read(args.input))
    if g.n > 20:
        sys.stderr.write("exact solver is limited to n <= 20 (got %d)\n"
                         % g.n)
        return 2
    sys.stdout.write("%d\n" % exact_treewidth(g))
    return 0


def cmd_bench(args):
    import random
    random.seed(args.seed)
    suite = sorted(f for f in os.listdir(args.suite) if f.endswith(".gr"))
    if not suite:
        sys.stderr.write("no .gr fixtures in %s\n" % args.suite)
        return 2
    rows = []
    for name in suite:
        g = parse_gr(_read(os.path.join(args.suite, name)))
        tables.reset_stats()
        start = time.monotonic()
        td = approximate(g, args.k, args.mode, args.alpha)
        elapsed = time.monotonic() - start
        outcome = ("tw_exceeds" if td == "tw_exceeds"
                   else "w=%d" % td_width(td))
        rows.append((name, g.n, g.m, args.k, args.mode, outcome,
                     "%.3fs" % elapsed))
    widths = [max(len(str(r[c])) for r in rows) for c in range(len(rows[0]))]
    header = ("name", "n", "m", "k", "mode", "outcome", "time")
    widths = [max(w, len(h)) for w, h in zip(widths, header)]
    fmt = "  ".join("%%-%ds" % w for w in widths)
    sys.stdout.write(fmt % header + "\n")
    for r in rows:
        sys.stdout.write(fmt % tuple(str(c) for c in r) + "\n")
    return 0


def _build_parser():
    ap = argparse.ArgumentParser(
        prog="twkit", description="treewidth approximation toolkit")
    sub = ap.add_subparsers(dest="command", required=True)

    def add_run_opts(p):
        p.add_argument("--k", type=int, default=None)
        p.add_argument("--mode", choices=("rs4", "three", "five"),
                       default="five")
        p.add_argument("--alpha", type=int, default=2)
        p.add_argument("--search", action="store_true",
                       help="search the smallest accepted k")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("input")

    p = sub.add_parser("decompose", help="write a .td decomposition")
    add_run_opts(p)
    p.set_defaults(fn=cmd_decompose)

    p = sub.add_parser("stats", help="emit a run report")
    add_run_opts(p)
    p.add_argument("--json", action="store_true")
    p.set_defaults(fn=cmd_stats)

    p = sub.add_parser("validate", help="validate a .td against a .gr")
    p.add_argument("input")
    p.add_argument("decomposition")
    p.set_defaults(fn=cmd_validate)

    p = sub.add_parser("exact", help="exact treewidth of a small graph")
    p.add_argument("input")
    p.set_defaults(fn=cmd_exact)

    p = sub.add_parser("bench", help="run a fixture directory")
    p.add_argument("--suite", required=True)
    p.add_argument("--k", type=int, default=3)
    p.add_argument("--mode", choices=("rs4", "three", "five"),
                   default="five")
    p.add_argument("--alpha", type=int, default=2)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(fn=cmd_bench)
    return ap


def main(argv=None):
    level = os.environ.get("TWKIT_LOG", "WARNING").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING))
    args = _build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except (ParseError, OSError, ValueError) as exc:
        sys.stderr.write("error: %s\n" % exc)
        return 2
    except AssertionError as exc:
        sys.stderr.write("internal invariant failure: %s\n" % exc)
        return 3


if __name__ == "__main__":
    sys.exit(main())
