"""Network model for k-pairs instances.

A network is a simple directed or undirected graph with positive rational
edge capacities (default 1) plus a list of source-sink commodities.  This
module holds the data types, the line-oriented text format, the incidence
queries used by the cut bounds and the entropy machinery, and generators
for the standard instance families.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Iterable

_NAME = re.compile(r"[A-Za-z0-9_]+\Z")


class ParseError(ValueError):
    """Malformed network or certificate text.  `line` is 1-based."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


@dataclass(frozen=True, order=True)
class Arc:
    """A directed edge, either of a directed network or of the directed
    expansion of an undirected one."""

    tail: str
    head: str

    def __str__(self) -> str:
        return f"{self.tail}>{self.head}"


@dataclass(frozen=True)
class Edge:
    u: str
    v: str
    capacity: Fraction = Fraction(1)

    def __post_init__(self):
        object.__setattr__(self, "capacity", Fraction(self.capacity))
        if self.capacity <= 0:
            raise ValueError(f"edge {self.u}-{self.v}: capacity must be positive")

    def label(self, directed: bool) -> str:
        return f"{self.u}>{self.v}" if directed else f"{self.u}-{self.v}"


@dataclass(frozen=True)
class Commodity:
    id: str
    source: str
    sink: str


@dataclass(frozen=True)
class Network:
    directed: bool
    nodes: tuple[str, ...]
    edges: tuple[Edge, ...]
    commodities: tuple[Commodity, ...]

    def __post_init__(self):
        object.__setattr__(self, "nodes", tuple(self.nodes))
        object.__setattr__(self, "edges", tuple(self.edges))
        object.__setattr__(self, "commodities", tuple(self.commodities))
        seen = set()
        for name in self.nodes:
            if not _NAME.match(name):
                raise ValueError(f"bad node name {name!r}")
            if name in seen:
                raise ValueError(f"duplicate node {name!r}")
            seen.add(name)
        ekeys = set()
        for e in self.edges:
            if e.u == e.v:
                raise ValueError(f"self-loop at {e.u!r}")
            for x in (e.u, e.v):
                if x not in seen:
                    raise ValueError(f"edge references unknown node {x!r}")
            key = (e.u, e.v) if self.directed else frozenset((e.u, e.v))
            if key in ekeys:
                raise ValueError(f"duplicate edge {e.u!r}-{e.v!r}")
            ekeys.add(key)
        cids = set()
        for c in self.commodities:
            if not _NAME.match(c.id):
                raise ValueError(f"bad commodity id {c.id!r}")
            if c.id in cids:
                raise ValueError(f"duplicate commodity id {c.id!r}")
            cids.add(c.id)
            for x in (c.source, c.sink):
                if x not in seen:
                    raise ValueError(f"commodity {c.id!r} references unknown node {x!r}")
            if c.source == c.sink:
                raise ValueError(f"commodity {c.id!r}: source equals sink")

    def commodity(self, cid: str) -> Commodity:
        for c in self.commodities:
            if c.id == cid:
                return c
        raise KeyError(cid)


def arcs(net: Network) -> tuple[Arc, ...]:
    """All directed arcs: the edges themselves for a directed network, both
    orientations of every edge for an undirected one."""
    if net.directed:
        return tuple(Arc(e.u, e.v) for e in net.edges)
    out = []
    for e in net.edges:
        out.append(Arc(e.u, e.v))
        out.append(Arc(e.v, e.u))
    return tuple(out)


def directed_expansion(net: Network):
    """Arcs of an undirected network plus the coupling of each (u,v)/(v,u)
    pair with its shared capacity."""
    if net.directed:
        raise ValueError("directed_expansion applies to undirected networks only")
    arc_list = []
    couples = []
    for e in net.edges:
        fwd, bwd = Arc(e.u, e.v), Arc(e.v, e.u)
        arc_list += [fwd, bwd]
        couples.append((fwd, bwd, e.capacity))
    return tuple(arc_list), tuple(couples)


def _check_known(net: Network, U: Iterable[str]) -> frozenset[str]:
    U = frozenset(U)
    unknown = U - set(net.nodes)
    if unknown:
        raise ValueError(f"unknown node(s): {', '.join(sorted(unknown))}")
    return U


def in_set(net: Network, U: Iterable[str]) -> frozenset[Arc]:
    """Arcs entering U: head inside, tail outside."""
    U = _check_known(net, U)
    return frozenset(a for a in arcs(net) if a.head in U and a.tail not in U)


def out_set(net: Network, U: Iterable[str]) -> frozenset[Arc]:
    """Arcs leaving U: tail inside, head outside."""
    U = _check_known(net, U)
    return frozenset(a for a in arcs(net) if a.tail in U and a.head not in U)


def sources_in(net: Network, U: Iterable[str]) -> frozenset[str]:
    U = _check_known(net, U)
    return frozenset(c.id for c in net.commodities if c.source in U)


def sinks_in(net: Network, U: Iterable[str]) -> frozenset[str]:
    U = _check_known(net, U)
    return frozenset(c.id for c in net.commodities if c.sink in U)


# ---------------------------------------------------------------------------
# text format
#
#   directed 0|1
#   node <name>            (or: nodes <n1> <n2> ...)
#   edge <u> <v> [<p>/<q>]
#   commodity <id> <src> <dst>
#
# '#' starts a comment, blank lines are ignored, the directed line comes
# first, nodes must be declared before use.


def parse_network(text: str) -> Network:
    directed: bool | None = None
    nodes: list[str] = []
    node_set: set[str] = set()
    edges: list[Edge] = []
    edge_keys: set = set()
    commodities: list[Commodity] = []
    cids: set[str] = set()

    def err(msg, ln):
        raise ParseError(msg, ln)

    def declare_node(name, ln):
        if not _NAME.match(name):
            err(f"bad node name {name!r}", ln)
        if name in node_set:
            err(f"duplicate node {name!r}", ln)
        node_set.add(name)
        nodes.append(name)

    def need_node(name, ln):
        if name not in node_set:
            err(f"unknown node {name!r}", ln)

    for ln, raw in enumerate(text.splitlines(), 1):
        tokens = raw.split("#", 1)[0].split()
        if not tokens:
            continue
        kw, args = tokens[0], tokens[1:]
        if directed is None:
            if kw != "directed":
                err("first line must be 'directed 0|1'", ln)
            if len(args) != 1 or args[0] not in ("0", "1"):
                err("expected 'directed 0' or 'directed 1'", ln)
            directed = args[0] == "1"
        elif kw == "directed":
            err("repeated 'directed' line", ln)
        elif kw == "node":
            if len(args) != 1:
                err("expected 'node <name>'", ln)
            declare_node(args[0], ln)
        elif kw == "nodes":
            if not args:
                err("expected 'nodes <n1> <n2> ...'", ln)
            for name in args:
                declare_node(name, ln)
        elif kw == "edge":
            if len(args) not in (2, 3):
                err("expected 'edge <u> <v> [<capacity>]'", ln)
            u, v = args[0], args[1]
            need_node(u, ln)
            need_node(v, ln)
            if u == v:
                err(f"self-loop at {u!r}", ln)
            cap = Fraction(1)
            if len(args) == 3:
                try:
                    cap = Fraction(args[2])
                except (ValueError, ZeroDivisionError):
                    err(f"bad capacity {args[2]!r}", ln)
                if cap <= 0:
                    err(f"capacity must be positive, got {args[2]!r}", ln)
            key = (u, v) if directed else frozenset((u, v))
            if key in edge_keys:
                err(f"duplicate edge {u!r} {v!r}", ln)
            edge_keys.add(key)
            edges.append(Edge(u, v, cap))
        elif kw == "commodity":
            if len(args) != 3:
                err("expected 'commodity <id> <src> <dst>'", ln)
            cid, src, dst = args
            if not _NAME.match(cid):
                err(f"bad commodity id {cid!r}", ln)
            if cid in cids:
                err(f"duplicate commodity id {cid!r}", ln)
            need_node(src, ln)
            need_node(dst, ln)
            if src == dst:
                err(f"commodity {cid!r}: source equals sink", ln)
            cids.add(cid)
            commodities.append(Commodity(cid, src, dst))
        else:
            err(f"unknown keyword {kw!r}", ln)
    if directed is None:
        raise ParseError("empty input: missing 'directed' line")
    return Network(directed, tuple(nodes), tuple(edges), tuple(commodities))


def serialize_network(net: Network) -> str:
    lines = [f"directed {1 if net.directed else 0}"]
    lines += [f"node {n}" for n in net.nodes]
    for e in net.edges:
        cap = "" if e.capacity == 1 else f" {e.capacity}"
        lines.append(f"edge {e.u} {e.v}{cap}")
    lines += [f"commodity {c.id} {c.source} {c.sink}" for c in net.commodities]
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# instance families


def gen_n1(k: int) -> Network:
    """Directed k-commodity family: every source feeds the two-node
    bottleneck u->v, every sink hangs off v, and sink t(i) additionally
    receives a direct edge from s(j) for every j > i."""
    if k < 2:
        raise ValueError("k must be >= 2")
    sources = [f"s{i}" for i in range(1, k + 1)]
    sinks = [f"t{i}" for i in range(1, k + 1)]
    nodes = sources + ["u", "v"] + sinks
    edges = [Edge(s, "u") for s in sources]
    edges.append(Edge("u", "v"))
    edges += [Edge("v", t) for t in sinks]
    for i in range(1, k + 1):
        for j in range(i + 1, k + 1):
            edges.append(Edge(f"s{j}", f"t{i}"))
    commodities = [Commodity(str(i), f"s{i}", f"t{i}") for i in range(1, k + 1)]
    return Network(True, tuple(nodes), tuple(edges), tuple(commodities))


def gen_hu() -> Network:
    """Undirected three-commodity instance on six nodes: g and h see a, b, c;
    f sees only a and c.  Demands are a->c, b->f and g->h."""
    nodes = ("a", "b", "c", "g", "h", "f")
    edges = tuple(
        Edge(u, v)
        for u, v in [("a", "g"), ("b", "g"), ("c", "g"),
                     ("a", "h"), ("b", "h"), ("c", "h"),
                     ("a", "f"), ("c", "f")]
    )
    commodities = (
        Commodity("a", "a", "c"),
        Commodity("b", "b", "f"),
        Commodity("g", "g", "h"),
    )
    return Network(False, nodes, edges, commodities)


def gen_bipartite(kind: str, m: int, n: int) -> Network:
    """Complete bipartite instance on partitions v1..vm and w1..wn.

    kind "I":  one commodity per unordered pair inside each partition.
    kind "II": one commodity per unordered pair of distinct vertices.
    The lexicographically smaller endpoint is the source.
    """
    kind = kind.upper()
    if kind not in ("I", "II"):
        raise ValueError(f"kind must be 'I' or 'II', got {kind!r}")
    if m < 2 or n < 2:
        raise ValueError("both partition sizes must be >= 2")
    vs = [f"v{i}" for i in range(1, m + 1)]
    ws = [f"w{i}" for i in range(1, n + 1)]
    edges = tuple(Edge(v, w) for v in vs for w in ws)
    if kind == "I":
        pairs = list(combinations(sorted(vs), 2)) + list(combinations(sorted(ws), 2))
    else:
        pairs = list(combinations(sorted(vs + ws), 2))
    commodities = tuple(Commodity(f"{a}_{b}", a, b) for a, b in pairs)
    return Network(False, tuple(vs + ws), edges, commodities)


def two_coloring(net: Network) -> tuple[frozenset[str], frozenset[str]]:
    """2-color the underlying undirected graph; raises ValueError when some
    component has an odd cycle.  The first declared node of each component
    gets color 0, so the coloring is deterministic."""
    adj: dict[str, list[str]] = {n: [] for n in net.nodes}
    for e in net.edges:
        adj[e.u].append(e.v)
        adj[e.v].append(e.u)
    color: dict[str, int] = {}
    for root in net.nodes:
        if root in color:
            continue
        color[root] = 0
        queue = [root]
        while queue:
            x = queue.pop(0)
            for y in adj[x]:
                if y not in color:
                    color[y] = 1 - color[x]
                    queue.append(y)
                elif color[y] == color[x]:
                    raise ValueError(f"graph is not bipartite: odd cycle through {y!r}")
    side0 = frozenset(n for n in net.nodes if color[n] == 0)
    side1 = frozenset(n for n in net.nodes if color[n] == 1)
    return side0, side1
