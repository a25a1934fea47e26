"""Command-line front end.

Exit codes: 0 success or true, 1 false / NOT-MET / invalid certificate,
2 usage or parse error, 3 computational refusal (caps, unsupported input).
A file argument of ``-`` reads standard input.
"""

from __future__ import annotations

import argparse
import os
import re
import sys
from dataclasses import dataclass, field

from . import abelian, almost_aut, completion, homology, multigraph, patterns, shift_space
from .abelian import DEFAULT_GROUP_CAP
from .errors import ComputationRefused, ShiftGroupsError
from .exact_linalg import format_matrix
from .patterns import DEFAULT_CLOSURE_CAP

EXIT_OK, EXIT_FALSE, EXIT_USAGE, EXIT_REFUSED = 0, 1, 2, 3

_BUILTIN = [
    (re.compile(r"^r(\d+)$"), lambda m: multigraph.loops_graph(int(m[1]))),
    (re.compile(r"^m(\d+)$"), lambda m: multigraph.mp_graph(int(m[1]))),
    (re.compile(r"^matui_d(\d+)_k(\d+)$"), lambda m: multigraph.matui_graph(int(m[1]), int(m[2]))),
]


class UsageError(ShiftGroupsError):
    pass


def read_text(path: str, stdin=None) -> tuple[str, str]:
    if path == "-":
        return (stdin or sys.stdin).read(), "<stdin>"
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read(), path
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None


@dataclass
class Workspace:
    """Graphs and clopen sets loaded from the global flags, by name."""

    graphs: dict = field(default_factory=dict)
    clopens: dict = field(default_factory=dict)
    stdin: object = None

    def add_graph(self, g: multigraph.MultiGraph):
        old = self.graphs.get(g.name)
        if old is not None and old != g:
            raise UsageError(f"two different graphs are named {g.name!r}")
        self.graphs[g.name] = g

    def load_graph(self, path: str) -> multigraph.MultiGraph:
        """A graph file, ``-`` for stdin, or a built-in name such as r2, m3, matui_d2_k3."""
        if path != "-" and not os.path.exists(path) and any(pat.match(path) for pat, _ in _BUILTIN):
            return self.graph_named(path)
        text, src = read_text(path, self.stdin)
        g = multigraph.parse_graph(text, src)
        self.add_graph(g)
        return g

    def graph_named(self, name: str, near: str | None = None) -> multigraph.MultiGraph:
        """Loaded graph, else ``<name>.graph`` beside `near`, else a built-in family name."""
        if name in self.graphs:
            return self.graphs[name]
        if near and near != "-":
            cand = os.path.join(os.path.dirname(near), f"{name}.graph")
            if os.path.exists(cand):
                g = self.load_graph(cand)
                if g.name == name:
                    return g
        for pat, make in _BUILTIN:
            m = pat.match(name)
            if m:
                g = make(m)
                self.add_graph(g)
                return g
        raise UsageError(f"unknown graph {name!r} (pass it with --graph)")

    def clopen(self, g: multigraph.MultiGraph, arg: str) -> shift_space.ClopenSet:
        """``X``, a clopen file (``file`` or ``file#name``), or an inline path list."""
        if arg == "X":
            return shift_space.full_space(g)
        path, _, name = arg.partition("#")
        if path == "-" or os.path.exists(path):
            text, src = read_text(path, self.stdin)
            named = shift_space.parse_clopen_file(g, text, src)
            if name:
                if name not in named:
                    raise UsageError(f"{path} has no clopen named {name!r}")
                return named[name]
            if len(named) != 1:
                raise UsageError(f"{path} holds {len(named)} clopen sets; choose one with {path}#<name>")
            return next(iter(named.values()))
        return shift_space.parse_clopen_paths(g, arg, "<argument>")

    def clopens_for(self, g: multigraph.MultiGraph) -> dict:
        return self.clopens.get(g.name, {})

    def load_element(self, path: str) -> almost_aut.PrefixExchange:
        text, src = read_text(path, self.stdin)
        head = next((ln.split("#", 1)[0].split() for ln in text.splitlines() if ln.split("#", 1)[0].strip()), [])
        if len(head) >= 3 and head[:2] == ["element", "over"]:
            self.graph_named(head[2], near=path)
            g = self.graphs[head[2]]
            return almost_aut.parse_element(text, self.graphs, self.clopens_for(g), src)
        return almost_aut.parse_element(text, self.graphs, {}, src)


def _fmt_bool(b: bool) -> str:
    return "true" if b else "false"


def cmd_check_graph(ws, args, out):
    g = ws.load_graph(args.graph)
    di, nc = multigraph.is_diconnected(g), multigraph.is_non_circular(g)
    out.write(f"graph {g.name}: {len(g.vertices)} vertices, {len(g.edges)} edges\n")
    out.write(f"diconnected: {_fmt_bool(di)}\n")
    out.write(f"non_circular: {_fmt_bool(nc)}\n")
    out.write(f"admissible: {_fmt_bool(di and nc)}\n")
    out.write("adjacency:\n" + format_matrix(multigraph.adjacency_matrix(g)))
    return EXIT_OK if di and nc else EXIT_FALSE


def cmd_homology(ws, args, out):
    g = ws.load_graph(args.graph)
    degrees = [args.degree] if args.degree is not None else [0, 1]
    for n in degrees:
        out.write(f"H{n} = {homology.homology_group(g, n)}\n")
    return EXIT_OK


def cmd_abelianization(ws, args, out):
    g = ws.load_graph(args.graph)
    out.write(f"abelianization = {homology.abelianization(g)}\n")
    return EXIT_OK


def cmd_class_of(ws, args, out):
    g = ws.load_graph(args.graph)
    homology.require_admissible(g)
    y = ws.clopen(g, args.clopen)
    out.write(f"H0 = {homology.homology_group(g, 0)}\n")
    out.write(f"class([Y]) = {abelian.format_element(homology.class_of_clopen(g, y).element)}\n")
    return EXIT_OK


def cmd_realize_class(ws, args, out):
    g = ws.load_graph(args.graph)
    homology.require_admissible(g)
    h0 = homology.zeroth_homology(g)
    elem = abelian.parse_element(args.coords, h0.group, "<argument>")
    y = homology.realize_class(g, homology.HomologyClass(elem))
    out.write(f"clopen realized: {shift_space.format_clopen_paths(y)}\n")
    return EXIT_OK


def cmd_matsumoto(ws, args, out):
    g1 = ws.load_graph(args.graph1)
    y1 = ws.clopen(g1, args.clopen1)
    g2 = ws.load_graph(args.graph2)
    y2 = ws.clopen(g2, args.clopen2)
    try:
        met = homology.matsumoto_equivalent(g1, y1, g2, y2, args.cap_group_order)
    except ComputationRefused:
        out.write("matsumoto: UNSUPPORTED\n")
        raise
    out.write(f"matsumoto: {'MET' if met else 'NOT-MET'}\n")
    return EXIT_OK if met else EXIT_FALSE


def _parse_primes(text: str) -> list[int]:
    if text.strip() in ("", "none"):
        return []
    try:
        return [int(p) for p in text.split(",")]
    except ValueError:
        raise UsageError(f"--primes expects a comma-separated list of primes, got {text!r}") from None


def cmd_build_completion(ws, args, out):
    g = ws.load_graph(args.graph)
    y = ws.clopen(g, args.clopen)
    try:
        cert = completion.build_completion(g, y, _parse_primes(args.primes),
                                           args.cap_group_order, args.cap_closure)
    except completion.CompletionFailed as exc:
        sys.stderr.write(exc.report)
        return EXIT_FALSE
    text = completion.format_certificate(cert)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        out.write(text)
    return EXIT_OK


def cmd_validate_certificate(ws, args, out):
    text, src = read_text(args.certificate, ws.stdin)
    ok, checks = completion.validate_certificate(text, args.cap_group_order, args.cap_closure, source=src)
    out.write(completion.format_checks(checks))
    out.write(f"certificate: {'VALID' if ok else 'INVALID'}\n")
    return EXIT_OK if ok else EXIT_FALSE


def cmd_elem(ws, args, out):
    verb = args.verb
    if verb == "random":
        g = ws.load_graph(args.first)
        y = ws.clopen(g, args.restrict) if args.restrict else None
        seed = args.seed if args.elem_seed is None else args.elem_seed
        e = almost_aut.random_element(g, y, args.depth, seed)
        out.write(almost_aut.format_element(e))
        return EXIT_OK
    f = ws.load_element(args.first)
    if verb == "canon":
        out.write(almost_aut.format_element(f))
        return EXIT_OK
    if verb == "invert":
        out.write(almost_aut.format_element(almost_aut.invert(f)))
        return EXIT_OK
    if verb == "apply":
        pt = shift_space.parse_point(f.graph, args.second, "<argument>")
        out.write(shift_space.format_point(almost_aut.apply(f, pt)) + "\n")
        return EXIT_OK
    if args.second is None:
        raise UsageError(f"elem {verb} needs two element files")
    h = ws.load_element(args.second)
    if verb == "compose":
        out.write(almost_aut.format_element(almost_aut.compose(f, h)))
        return EXIT_OK
    same = almost_aut.equals(f, h)
    out.write(f"{_fmt_bool(same)}\n")
    return EXIT_OK if same else EXIT_FALSE


def cmd_matui(ws, args, out):
    try:
        g = multigraph.matui_graph(args.d, args.k)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    out.write(multigraph.format_graph(g))
    return EXIT_OK


def cmd_export_dot(ws, args, out):
    out.write(multigraph.to_dot(ws.load_graph(args.graph)))
    return EXIT_OK


def _load_pattern(ws, g, path):
    text, src = read_text(path, ws.stdin)
    return patterns.parse_pattern(g, text, src)


def cmd_lpc(ws, args, out):
    g = ws.load_graph(args.graph)
    pat = _load_pattern(ws, g, args.pattern)
    for v in g.vertices:
        out.write(f"|F_{v}| = {patterns.pattern_group_order(pat, v, args.cap_closure)}\n")
    lpc = sorted(patterns.local_prime_content(pat, args.cap_closure))
    out.write(f"lpc = {{{','.join(map(str, lpc))}}}\n")
    return EXIT_OK


def cmd_fix_index(ws, args, out):
    g = ws.load_graph(args.graph)
    pat = _load_pattern(ws, g, args.pattern)
    t = ws.clopen(g, args.clopen)
    leaf = shift_space.parse_path(g, args.leaf, "<argument>")
    res = patterns.fix_quotient_index(g, pat, t, leaf, args.cap_closure)
    out.write(f"index = {res.index}\n")
    if res.enumerated is None:
        out.write("enumeration: skipped (too many points), unverified\n")
        return EXIT_OK
    out.write(f"enumeration: {res.enumerated} ({'verified' if res.verified else 'MISMATCH'})\n")
    return EXIT_OK if res.verified else EXIT_FALSE


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="shiftgroups", description=__doc__.splitlines()[0])
    p.add_argument("--cap-group-order", type=int, default=DEFAULT_GROUP_CAP,
                   help="largest finite group searched for marked isomorphisms")
    p.add_argument("--cap-closure", type=int, default=DEFAULT_CLOSURE_CAP,
                   help="largest permutation group enumerated by closure")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--graph", dest="graph_files", action="append", default=[], metavar="FILE",
                   help="graph file made available to element files (repeatable)")
    p.add_argument("--clopens", dest="clopen_files", action="append", default=[], metavar="GRAPH:FILE",
                   help="named clopen sets for element restrictions (repeatable)")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("check-graph", help="admissibility predicates and adjacency matrix")
    s.add_argument("graph")
    s.set_defaults(func=cmd_check_graph)

    s = sub.add_parser("homology", help="H0 and H1 (or one degree)")
    s.add_argument("graph")
    s.add_argument("--degree", type=int)
    s.set_defaults(func=cmd_homology)

    s = sub.add_parser("abelianization")
    s.add_argument("graph")
    s.set_defaults(func=cmd_abelianization)

    s = sub.add_parser("class-of", help="class of a clopen set in H0")
    s.add_argument("graph")
    s.add_argument("clopen")
    s.set_defaults(func=cmd_class_of)

    s = sub.add_parser("realize-class", help="a nonempty clopen set with the given H0 class")
    s.add_argument("graph")
    s.add_argument("coords", help="element literal such as '(1;)'")
    s.set_defaults(func=cmd_realize_class)

    s = sub.add_parser("matsumoto", help="decide the isomorphism criterion")
    for a in ("graph1", "clopen1", "graph2", "clopen2"):
        s.add_argument(a)
    s.set_defaults(func=cmd_matsumoto)

    s = sub.add_parser("build-completion", help="emit a prime-content certificate")
    s.add_argument("graph")
    s.add_argument("clopen")
    s.add_argument("--primes", default="")
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_build_completion)

    s = sub.add_parser("validate-certificate")
    s.add_argument("certificate")
    s.set_defaults(func=cmd_validate_certificate)

    s = sub.add_parser("elem", help="element calculus: compose|invert|eq|canon|apply|random")
    s.add_argument("verb", choices=["compose", "invert", "eq", "canon", "apply", "random"])
    s.add_argument("first", help="element file (a graph for 'random')")
    s.add_argument("second", nargs="?", help="second element file, or a point for 'apply'")
    s.add_argument("--depth", type=int, default=2, help="depth for 'random'")
    s.add_argument("--restrict", help="restriction for 'random'")
    s.add_argument("--seed", dest="elem_seed", type=int, help="overrides the global --seed")
    s.set_defaults(func=cmd_elem)

    s = sub.add_parser("matui", help="print the graph whose full group is V_{d,k}")
    s.add_argument("--d", type=int, required=True)
    s.add_argument("--k", type=int, required=True)
    s.set_defaults(func=cmd_matui)

    s = sub.add_parser("export-dot")
    s.add_argument("graph")
    s.set_defaults(func=cmd_export_dot)

    s = sub.add_parser("lpc", help="local prime content of a pattern")
    s.add_argument("graph")
    s.add_argument("pattern")
    s.set_defaults(func=cmd_lpc)

    s = sub.add_parser("fix-index", help="index of Fix(T') in Fix(T), with enumeration check")
    for a in ("graph", "pattern", "clopen", "leaf"):
        s.add_argument(a)
    s.set_defaults(func=cmd_fix_index)
    return p


def _load_globals(ws: Workspace, args):
    for path in args.graph_files:
        ws.load_graph(path)
    for item in args.clopen_files:
        gname, sep, path = item.partition(":")
        if not sep:
            raise UsageError(f"--clopens expects GRAPH:FILE, got {item!r}")
        g = ws.graph_named(gname)
        text, src = read_text(path, ws.stdin)
        named = ws.clopens.setdefault(g.name, {})
        for name, c in shift_space.parse_clopen_file(g, text, src).items():
            if name in named:
                raise UsageError(f"clopen {name!r} for {g.name} defined twice")
            named[name] = c


def run(argv, stdout=None, stderr=None, stdin=None) -> int:
    out = stdout or sys.stdout
    err = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    ws = Workspace(stdin=stdin)
    try:
        _load_globals(ws, args)
        return args.func(ws, args, out)
    except ComputationRefused as exc:
        err.write(f"refused: {type(exc).__name__}: {exc}\n")
        return EXIT_REFUSED
    except (ShiftGroupsError, ValueError) as exc:
        err.write(f"error: {exc}\n")
        return EXIT_USAGE


def main(argv=None) -> int:
    return run(sys.argv[1:] if argv is None else argv)


if __name__ == "__main__":
    sys.exit(main())
