"""Cut bounds computed by explicit enumeration.

Sparsity and meagerness are worst-case exponential, so both enumerate edge
subsets under a hard cap and refuse larger instances instead of
approximating.  Subsets are scanned by increasing size; a size s cannot beat
the incumbent once s/k does not, which keeps the standard families cheap.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Iterable

from .model import Commodity, Edge, Network


class CapExceeded(RuntimeError):
    """Instance is larger than the enumeration cap."""


@dataclass(frozen=True)
class CutReport:
    value: Fraction
    witness_edges: frozenset[Edge]
    witness_commodities: frozenset[str]


@dataclass(frozen=True)
class DistanceTable:
    hops: dict

    def get(self, u: str, v: str):
        """Hop count from u to v, None when unreachable."""
        return self.hops[(u, v)]


class _Indexed:
    """Integer-indexed adjacency view used by the enumeration inner loops."""

    def __init__(self, net: Network):
        self.net = net
        self.n = len(net.nodes)
        self.m = len(net.edges)
        nidx = {name: i for i, name in enumerate(net.nodes)}
        out = [[] for _ in range(self.n)]
        for ei, e in enumerate(net.edges):
            u, v = nidx[e.u], nidx[e.v]
            out[u].append((ei, v))
            if not net.directed:
                out[v].append((ei, u))
        self.out = out
        self.pairs = [(nidx[c.source], nidx[c.sink]) for c in net.commodities]


def _reach(idx: _Indexed, start: int, blocked) -> bytearray:
    vis = bytearray(idx.n)
    vis[start] = 1
    stack = [start]
    out = idx.out
    while stack:
        x = stack.pop()
        for ei, y in out[x]:
            if not blocked[ei] and not vis[y]:
                vis[y] = 1
                stack.append(y)
    return vis


def _separated_ids(idx: _Indexed, blocked) -> list[int]:
    """Commodity indices whose sink is unreachable from their source."""
    cache: dict[int, bytearray] = {}
    sep = []
    for ci, (s, t) in enumerate(idx.pairs):
        vis = cache.get(s)
        if vis is None:
            vis = _reach(idx, s, blocked)
            cache[s] = vis
        if not vis[t]:
            sep.append(ci)
    return sep


def _edge_index_map(net: Network):
    key = (lambda e: (e.u, e.v)) if net.directed else (lambda e: frozenset((e.u, e.v)))
    return {key(e): i for i, e in enumerate(net.edges)}, key


def _edges_to_indices(net: Network, A: Iterable[Edge]) -> list[int]:
    lookup, key = _edge_index_map(net)
    out = []
    for e in A:
        k = key(e)
        if k not in lookup:
            raise ValueError(f"edge {e.u!r}-{e.v!r} is not in the network")
        out.append(lookup[k])
    return out


def separates(net: Network, A: Iterable[Edge], commodity) -> bool:
    """True when removing A leaves no path from the commodity's source to
    its sink (directed paths for directed networks)."""
    if isinstance(commodity, Commodity):
        commodity = commodity.id
    com = net.commodity(commodity)
    idx = _Indexed(net)
    blocked = bytearray(idx.m)
    for ei in _edges_to_indices(net, A):
        blocked[ei] = 1
    nidx = {name: i for i, name in enumerate(net.nodes)}
    vis = _reach(idx, nidx[com.source], blocked)
    return not vis[nidx[com.sink]]


def isolates(net: Network, A: Iterable[Edge], J: Iterable[str]) -> bool:
    """True when removing A cuts every s(i)->t(j) path for all i, j in J
    (including i = j).  Vacuously true for empty J."""
    if not net.directed:
        raise ValueError("isolates applies to directed networks")
    J = list(J)
    coms = [net.commodity(c.id if isinstance(c, Commodity) else c) for c in J]
    idx = _Indexed(net)
    blocked = bytearray(idx.m)
    for ei in _edges_to_indices(net, A):
        blocked[ei] = 1
    nidx = {name: i for i, name in enumerate(net.nodes)}
    sinks = [nidx[c.sink] for c in coms]
    for c in coms:
        vis = _reach(idx, nidx[c.source], blocked)
        if any(vis[t] for t in sinks):
            return False
    return True


# ---------------------------------------------------------------------------
# sparsity

# A candidate is (ratio, combo, sep_ids) with ratio a Fraction; the scan keeps
# the lexicographically first combo among minimizers of (ratio, size), which
# the (ratio, combo) ordering reproduces because sizes are scanned ascending.


def _sparsity_chunk(net: Network, size: int, firsts: list[int]):
    idx = _Indexed(net)
    m = idx.m
    blocked = bytearray(m)
    best = None
    for first in firsts:
        for rest in combinations(range(first + 1, m), size - 1):
            combo = (first,) + rest
            for ei in combo:
                blocked[ei] = 1
            sep = _separated_ids(idx, blocked)
            for ei in combo:
                blocked[ei] = 0
            if sep:
                cand = (Fraction(size, len(sep)), combo, tuple(sep))
                if best is None or cand[:2] < best[:2]:
                    best = cand
    return best


def sparsity(net: Network, cap_edges: int = 20, jobs: int = 1) -> CutReport:
    """Minimum over edge subsets A of |A| divided by the number of
    commodities A separates, with a witness attaining it."""
    if not net.commodities:
        raise ValueError("sparsity requires at least one commodity")
    m = len(net.edges)
    if m > cap_edges:
        raise CapExceeded(f"|E| = {m} exceeds the enumeration cap {cap_edges}")
    k = len(net.commodities)
    idx = _Indexed(net)

    best = None
    disconnected = _separated_ids(idx, bytearray(m))
    if disconnected:
        best = (Fraction(0), (), tuple(disconnected))
    for size in range(1, m + 1):
        if best is not None and Fraction(size, k) >= best[0]:
            break
        cand = _scan_size(net, size, jobs, _sparsity_chunk)
        if cand is not None and (best is None or cand[:2] < best[:2]):
            best = cand
    assert best is not None
    return _cut_report(net, best)


def _scan_size(net: Network, size: int, jobs: int, worker):
    m = len(net.edges)
    firsts = list(range(m - size + 1))
    if jobs <= 1 or len(firsts) < 2:
        return worker(net, size, firsts)
    chunks = [firsts[w::jobs] for w in range(jobs) if firsts[w::jobs]]
    with ProcessPoolExecutor(max_workers=len(chunks)) as pool:
        results = list(pool.map(worker, [net] * len(chunks), [size] * len(chunks), chunks))
    best = None
    for cand in results:
        if cand is not None and (best is None or cand[:2] < best[:2]):
            best = cand
    return best


def _cut_report(net: Network, cand) -> CutReport:
    ratio, combo, sep = cand
    return CutReport(
        value=ratio,
        witness_edges=frozenset(net.edges[i] for i in combo),
        witness_commodities=frozenset(net.commodities[i].id for i in sep),
    )


# ---------------------------------------------------------------------------
# meagerness


def _max_isolated(rows: list[int], t_rows: list[int], k: int):
    """Largest commodity subset J with no s(i)->t(j) reachability inside J.

    rows[i] is the bitmask of sinks reachable from s(i); t_rows[j] the mask
    of sources reaching t(j).  Returns the first maximum-size mask, or 0.
    """
    size = 1 << k
    ok = bytearray(size)
    ok[0] = 1
    best_mask, best_count = 0, 0
    for mask in range(1, size):
        low = mask & -mask
        lo = low.bit_length() - 1
        rest = mask ^ low
        if ok[rest] and not rows[lo] & mask and not t_rows[lo] & rest:
            ok[mask] = 1
            count = bin(mask).count("1")
            if count > best_count:
                best_mask, best_count = mask, count
    return best_mask, best_count


def _meagerness_chunk(net: Network, size: int, firsts: list[int]):
    idx = _Indexed(net)
    m = idx.m
    k = len(idx.pairs)
    blocked = bytearray(m)
    sinks = [t for (_, t) in idx.pairs]
    best = None
    for first in firsts:
        for rest in combinations(range(first + 1, m), size - 1):
            combo = (first,) + rest
            for ei in combo:
                blocked[ei] = 1
            cache: dict[int, bytearray] = {}
            rows = []
            for s, _ in idx.pairs:
                vis = cache.get(s)
                if vis is None:
                    vis = _reach(idx, s, blocked)
                    cache[s] = vis
                row = 0
                for j, t in enumerate(sinks):
                    if vis[t]:
                        row |= 1 << j
                rows.append(row)
            for ei in combo:
                blocked[ei] = 0
            t_rows = [0] * k
            for i in range(k):
                row = rows[i]
                while row:
                    low = row & -row
                    t_rows[low.bit_length() - 1] |= 1 << i
                    row ^= low
            mask, count = _max_isolated(rows, t_rows, k)
            if count:
                members = tuple(i for i in range(k) if mask >> i & 1)
                cand = (Fraction(size, count), combo, members)
                if best is None or cand[:2] < best[:2]:
                    best = cand
    return best


def meagerness(net: Network, cap_edges: int = 16, cap_commodities: int = 10,
               jobs: int = 1) -> CutReport:
    """Minimum over edge subsets A of |A| divided by the size of the largest
    commodity set A isolates, with a witness attaining it."""
    if not net.directed:
        raise ValueError("meagerness applies to directed networks")
    if not net.commodities:
        raise ValueError("meagerness requires at least one commodity")
    m, k = len(net.edges), len(net.commodities)
    if m > cap_edges:
        raise CapExceeded(f"|E| = {m} exceeds the enumeration cap {cap_edges}")
    if k > cap_commodities:
        raise CapExceeded(f"k = {k} exceeds the commodity cap {cap_commodities}")

    # size 0 matters only when some commodity pair is already disconnected
    best = _meagerness_size_zero(net)
    for size in range(1, m + 1):
        if best is not None and Fraction(size, k) >= best[0]:
            break
        cand = _scan_size(net, size, jobs, _meagerness_chunk)
        if cand is not None and (best is None or cand[:2] < best[:2]):
            best = cand
    if best is None:
        raise ValueError("no edge subset isolates a nonempty commodity set")
    return _cut_report(net, best)


def _meagerness_size_zero(net: Network):
    idx = _Indexed(net)
    k = len(idx.pairs)
    blocked = bytearray(idx.m)
    sinks = [t for (_, t) in idx.pairs]
    cache: dict[int, bytearray] = {}
    rows = []
    for s, _ in idx.pairs:
        vis = cache.get(s)
        if vis is None:
            vis = _reach(idx, s, blocked)
            cache[s] = vis
        rows.append(sum(1 << j for j, t in enumerate(sinks) if vis[t]))
    t_rows = [0] * k
    for i in range(k):
        for j in range(k):
            if rows[i] >> j & 1:
                t_rows[j] |= 1 << i
    mask, count = _max_isolated(rows, t_rows, k)
    if not count:
        return None
    members = tuple(i for i in range(k) if mask >> i & 1)
    return (Fraction(0), (), members)


# ---------------------------------------------------------------------------
# distances and the Wiener bound


def distance_table(net: Network) -> DistanceTable:
    """All-pairs hop counts by BFS (directed hops for directed networks)."""
    idx = _Indexed(net)
    hops = {}
    for si, s in enumerate(net.nodes):
        dist = [None] * idx.n
        dist[si] = 0
        queue = [si]
        head = 0
        while head < len(queue):
            x = queue[head]
            head += 1
            for _, y in idx.out[x]:
                if dist[y] is None:
                    dist[y] = dist[x] + 1
                    queue.append(y)
        for ti, t in enumerate(net.nodes):
            hops[(s, t)] = dist[ti]
    return DistanceTable(hops)


def wiener_bound(net: Network) -> Fraction:
    """|E| divided by the total hop distance between commodity endpoints."""
    if net.directed:
        raise ValueError("the Wiener bound applies to undirected networks")
    if not net.commodities:
        raise ValueError("the Wiener bound requires at least one commodity")
    table = distance_table(net)
    total = 0
    for c in net.commodities:
        d = table.get(c.source, c.sink)
        if d is None:
            raise ValueError(f"commodity {c.id!r}: endpoints are disconnected")
        total += d
    return Fraction(len(net.edges), total)
