"""Shared test utilities: seeded random instances and independent oracles.

The oracles here deliberately avoid the code paths they are checking:
sparsity via path enumeration instead of BFS separation, routing via a
path-formulation LP instead of the arc formulation, and entropies via
brute-force marginalization of explicit distributions.
"""

from __future__ import annotations

import math
from fractions import Fraction
from itertools import combinations, product

from kpairs import Commodity, Edge, LinearProgram, Network, arcs, simplex_solve


def reachable(net: Network, start: str) -> set[str]:
    adj: dict[str, list[str]] = {n: [] for n in net.nodes}
    for a in arcs(net):
        adj[a.tail].append(a.head)
    vis = {start}
    stack = [start]
    while stack:
        x = stack.pop()
        for y in adj[x]:
            if y not in vis:
                vis.add(y)
                stack.append(y)
    return vis


def random_network(rng, directed=None, max_nodes=6, max_edges=8, max_k=3) -> Network:
    """Random simple network; every commodity's sink is reachable from its
    source so the routing LP and the Wiener bound are both defined."""
    if directed is None:
        directed = rng.random() < 0.5
    while True:
        n = rng.randint(3, max_nodes)
        names = [f"n{i}" for i in range(n)]
        if directed:
            pool = [(u, v) for u in names for v in names if u != v]
        else:
            pool = list(combinations(names, 2))
        rng.shuffle(pool)
        m = rng.randint(2, min(max_edges, len(pool)))
        edges = tuple(Edge(u, v) for u, v in pool[:m])
        skeleton = Network(directed, tuple(names), edges, ())
        reach = {u: reachable(skeleton, u) for u in names}
        pairs = [(s, t) for s in names for t in names if s != t and t in reach[s]]
        if not pairs:
            continue
        k = rng.randint(1, max_k)
        comms = tuple(Commodity(f"c{i}", *pairs[rng.randrange(len(pairs))])
                      for i in range(k))
        return Network(directed, tuple(names), edges, comms)


def scale_capacities(net: Network, factor) -> Network:
    factor = Fraction(factor)
    return Network(net.directed, net.nodes,
                   tuple(Edge(e.u, e.v, e.capacity * factor) for e in net.edges),
                   net.commodities)


# ---------------------------------------------------------------------------
# path enumeration and the path-formulation routing LP


def simple_paths(net: Network, source: str, sink: str, limit: int | None = None):
    """All simple paths from source to sink as tuples of arcs; returns None
    as soon as more than `limit` paths exist."""
    adj: dict[str, list] = {n: [] for n in net.nodes}
    for a in arcs(net):
        adj[a.tail].append(a)
    out = []
    visited = {source}
    acc = []

    def dfs(node):
        if limit is not None and len(out) > limit:
            return
        if node == sink:
            out.append(tuple(acc))
            return
        for a in adj[node]:
            if a.head not in visited:
                visited.add(a.head)
                acc.append(a)
                dfs(a.head)
                acc.pop()
                visited.remove(a.head)

    dfs(source)
    if limit is not None and len(out) > limit:
        return None
    return out


def path_lp_rate(net: Network, max_paths: int | None = None):
    """Concurrent-flow optimum from a per-path LP; None when some commodity
    has more than `max_paths` simple paths."""
    lp = LinearProgram()
    lp.add_variable("r")
    lp.set_objective({"r": 1})
    ekey = (lambda a: (a.tail, a.head)) if net.directed else (lambda a: frozenset((a.tail, a.head)))
    edge_loads: dict = {}
    for c in net.commodities:
        paths = simple_paths(net, c.source, c.sink, limit=max_paths)
        if paths is None:
            return None
        demand = {"r": Fraction(-1)}
        for pi, path in enumerate(paths):
            x = lp.add_variable(f"x[{c.id},{pi}]")
            demand[x] = Fraction(1)
            for a in path:
                edge_loads.setdefault(ekey(a), {})[x] = Fraction(1)
        lp.add_constraint(demand, "=", 0, name=f"demand[{c.id}]")
    for e in net.edges:
        key = (e.u, e.v) if net.directed else frozenset((e.u, e.v))
        lp.add_constraint(edge_loads.get(key, {}), "<=", e.capacity, name=f"cap{e.u}_{e.v}")
    res = simplex_solve(lp)
    assert res.status == "optimal"
    return res.value


def sparsity_oracle(net: Network) -> Fraction:
    """Sparsity by path enumeration: A separates a commodity exactly when
    each of its simple paths uses an edge of A."""
    ekey = (lambda a: (a.tail, a.head)) if net.directed else (lambda a: frozenset((a.tail, a.head)))
    paths = {}
    for c in net.commodities:
        paths[c.id] = [frozenset(ekey(a) for a in p)
                       for p in simple_paths(net, c.source, c.sink)]
    m = len(net.edges)
    keys = [(e.u, e.v) if net.directed else frozenset((e.u, e.v)) for e in net.edges]
    best = None
    for size in range(0, m + 1):
        for combo in combinations(range(m), size):
            chosen = {keys[i] for i in combo}
            sep = [c for c in net.commodities
                   if all(p & chosen for p in paths[c.id])]
            if sep:
                ratio = Fraction(size, len(sep))
                if best is None or ratio < best:
                    best = ratio
    return best


# ---------------------------------------------------------------------------
# brute-force entropies of explicit joint distributions


def random_pmf(rng, nvars: int) -> dict:
    outcomes = list(product((0, 1), repeat=nvars))
    weights = [rng.random() + 1e-9 for _ in outcomes]
    total = sum(weights)
    return {o: w / total for o, w in zip(outcomes, weights)}


def product_pmf(rng, nvars: int) -> dict:
    """Joint distribution of independent binary variables."""
    ps = [rng.uniform(0.05, 0.95) for _ in range(nvars)]
    pmf = {}
    for o in product((0, 1), repeat=nvars):
        p = 1.0
        for bit, q in zip(o, ps):
            p *= q if bit else 1.0 - q
        pmf[o] = p
    return pmf


def entropy_of_coords(pmf: dict, coords) -> float:
    marg: dict = {}
    for outcome, p in pmf.items():
        key = tuple(outcome[i] for i in coords)
        marg[key] = marg.get(key, 0.0) + p
    return -sum(p * math.log2(p) for p in marg.values() if p > 1e-15)


# ---------------------------------------------------------------------------
# exact LP optimality certification


def assert_optimal_certificates(lp: LinearProgram, res) -> None:
    """Exact optimality conditions for a maximization: primal feasibility,
    dual sign feasibility, dual constraint feasibility, strong duality."""
    assert res.status == "optimal"
    x, y = res.primal, res.dual
    value = sum(x[v] * c for v, c in lp.objective.items())
    assert value == res.value
    for v in lp.variables:
        if v not in lp.free:
            assert x[v] >= 0, f"negative value for {v}"
    for coeffs, rel, rhs, name in lp.constraints:
        lhs = sum(x[v] * c for v, c in coeffs.items())
        if rel == "<=":
            assert lhs <= rhs, name
            assert y[name] >= 0, name
        elif rel == ">=":
            assert lhs >= rhs, name
            assert y[name] <= 0, name
        else:
            assert lhs == rhs, name
    assert sum(y[name] * rhs for _, _, rhs, name in lp.constraints) == res.value
    col = {v: Fraction(0) for v in lp.variables}
    for coeffs, _rel, _rhs, name in lp.constraints:
        for v, c in coeffs.items():
            col[v] += y[name] * c
    for v in lp.variables:
        cv = lp.objective.get(v, Fraction(0))
        if v in lp.free:
            assert col[v] == cv, f"dual equality fails on free {v}"
        else:
            assert col[v] >= cv, f"dual feasibility fails on {v}"
