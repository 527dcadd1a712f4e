"""Maximum concurrent multicommodity flow in exact arithmetic.

Flow variables live on directed arcs; an undirected edge contributes both
orientations and a single shared capacity row, so opposite-direction flows
compete for the same capacity.  The LP optimum is the fractional routing
rate: the largest r at which every commodity simultaneously ships r units.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .model import Arc, Network, arcs
from .simplex import LinearProgram, SimplexResult, simplex_solve

_Z = Fraction(0)


def flow_var(cid: str, arc: Arc) -> str:
    return f"f[{cid},{arc}]"


def build_concurrent_flow_lp(net: Network) -> LinearProgram:
    """Variables f[i,arc] >= 0 and the common rate r; conservation at
    interior nodes, net outflow r at sources, net inflow r at sinks, and one
    capacity row per edge.  Objective: maximize r."""
    lp = LinearProgram()
    arc_list = arcs(net)
    for c in net.commodities:
        for a in arc_list:
            lp.add_variable(flow_var(c.id, a))
    lp.add_variable("r")
    lp.set_objective({"r": 1})

    by_head: dict[str, list[Arc]] = {n: [] for n in net.nodes}
    by_tail: dict[str, list[Arc]] = {n: [] for n in net.nodes}
    for a in arc_list:
        by_head[a.head].append(a)
        by_tail[a.tail].append(a)

    for c in net.commodities:
        for node in net.nodes:
            coeffs = {flow_var(c.id, a): Fraction(1) for a in by_head[node]}
            for a in by_tail[node]:
                coeffs[flow_var(c.id, a)] = Fraction(-1)
            if node == c.source:
                coeffs["r"] = Fraction(1)  # inflow - outflow + r = 0
                lp.add_constraint(coeffs, "=", 0, name=f"source[{c.id}]")
            elif node == c.sink:
                coeffs["r"] = Fraction(-1)  # inflow - outflow - r = 0
                lp.add_constraint(coeffs, "=", 0, name=f"sink[{c.id}]")
            else:
                lp.add_constraint(coeffs, "=", 0, name=f"conserve[{c.id},{node}]")

    for e in net.edges:
        if net.directed:
            coeffs = {flow_var(c.id, Arc(e.u, e.v)): Fraction(1) for c in net.commodities}
        else:
            coeffs = {}
            for c in net.commodities:
                coeffs[flow_var(c.id, Arc(e.u, e.v))] = Fraction(1)
                coeffs[flow_var(c.id, Arc(e.v, e.u))] = Fraction(1)
        lp.add_constraint(coeffs, "<=", e.capacity, name=f"cap[{e.label(net.directed)}]")
    return lp


@dataclass(frozen=True)
class RoutingScheme:
    """Per-commodity arc flows achieving `rate`; zero flows omitted."""

    rate: Fraction
    flows: dict  # (commodity id, Arc) -> Fraction


def routing_rate(net: Network) -> tuple[Fraction, RoutingScheme]:
    """Exact fractional routing rate plus a flow scheme achieving it."""
    if not net.commodities:
        raise ValueError("routing rate requires at least one commodity")
    lp = build_concurrent_flow_lp(net)
    res = simplex_solve(lp)
    if res.status != "optimal":
        raise RuntimeError(f"concurrent flow LP came back {res.status}")
    flows = {}
    for c in net.commodities:
        for a in arcs(net):
            val = res.primal[flow_var(c.id, a)]
            if val:
                flows[(c.id, a)] = val
    scheme = RoutingScheme(rate=res.value, flows=flows)
    verify_scheme(net, scheme)
    return res.value, scheme


def verify_scheme(net: Network, scheme: RoutingScheme) -> bool:
    """Exact re-check of a routing scheme: nonnegativity, conservation, the
    rate at every terminal, and edge capacities.  Raises on violation."""
    flows = scheme.flows
    get = lambda cid, a: flows.get((cid, a), _Z)
    arc_list = arcs(net)
    for (cid, a), val in flows.items():
        if val < 0:
            raise ValueError(f"negative flow on {a} for commodity {cid!r}")
        if a not in arc_list:
            raise ValueError(f"flow on unknown arc {a}")
    for c in net.commodities:
        for node in net.nodes:
            balance = sum(get(c.id, a) for a in arc_list if a.head == node) \
                - sum(get(c.id, a) for a in arc_list if a.tail == node)
            if node == c.source:
                want = -scheme.rate
            elif node == c.sink:
                want = scheme.rate
            else:
                want = _Z
            if balance != want:
                raise ValueError(
                    f"commodity {c.id!r}: balance {balance} at {node!r}, expected {want}")
    for e in net.edges:
        if net.directed:
            load = sum(get(c.id, Arc(e.u, e.v)) for c in net.commodities)
        else:
            load = sum(get(c.id, Arc(e.u, e.v)) + get(c.id, Arc(e.v, e.u))
                       for c in net.commodities)
        if load > e.capacity:
            raise ValueError(f"edge {e.u}-{e.v} overloaded: {load} > {e.capacity}")
    return True
