"""Certificate generators for the standard families, a Shannon-polyhedron
validator for the n-set submodularity inequality, and the bundled
certificate files.

Each generator emits the full telescoping chain of axiom steps; nothing is
left to the checker beyond summation, so perturbing any single step breaks
the exact cancellation.
"""

from __future__ import annotations

from fractions import Fraction
from importlib import resources

from .entropy import Axiom, CertStep, Certificate, SideConditionError, arc_var, msg_var
from .model import Network, arcs, gen_bipartite, gen_hu, gen_n1, in_set, out_set, two_coloring
from .simplex import LinearProgram, simplex_solve

_ONE = Fraction(1)


def _split_steps(varset) -> list[Axiom]:
    """Subadditivity chain decomposing H(S) into singleton entropies."""
    toks = sorted(varset, key=lambda t: (not t.startswith("msg:"), t))
    steps = []
    acc = {toks[0]}
    for tok in toks[1:]:
        steps.append(Axiom.subadditivity(frozenset(acc), frozenset({tok})))
        acc.add(tok)
    return steps


def gen_certificate_n1(k: int) -> Certificate:
    """Rate-bound certificate sum r_i <= 1 for the bottleneck family: each
    sink's message is peeled off the bottleneck arc in turn, then source
    independence and the unit capacity of u>v close the chain."""
    if k < 2:
        raise ValueError("k must be >= 2")
    e = arc_var("u", "v")
    steps: list[CertStep] = []

    def add(ax: Axiom, coeff=_ONE):
        steps.append(CertStep(Fraction(coeff), ax))

    ctx = frozenset({e})
    for j in range(k, 0, -1):
        mj = msg_var(str(j))
        added = [arc_var("v", f"t{j}")]
        add(Axiom.functional(added[0], ctx, "edge_local"))
        for jp in range(j + 1, k + 1):
            cross = arc_var(f"s{jp}", f"t{j}")
            add(Axiom.functional(cross, ctx | set(added), "edge_local"))
            added.append(cross)
        add(Axiom.functional(mj, ctx | set(added), "sink_decoding"))
        add(Axiom.monotonicity(ctx | {mj}, ctx | {mj} | set(added)))
        ctx = ctx | {mj}
    all_msgs = frozenset(msg_var(str(i)) for i in range(1, k + 1))
    add(Axiom.monotonicity(all_msgs, all_msgs | {e}))
    add(Axiom.independence(all_msgs, "ge"))
    for i in range(1, k + 1):
        add(Axiom.rate(str(i)))
    add(Axiom.capacity("u>v"))
    return Certificate(steps=tuple(steps), bound=_ONE,
                       alphas=tuple((str(i), _ONE) for i in range(1, k + 1)))


def gen_certificate_hu() -> Certificate:
    """Certificate 2 r_a + 3 r_b + 2 r_g <= 8 for the three-commodity
    network: two accounting chains (one charging the arcs into g, h, f, one
    charging the arcs into a, b, c) plus the eight coupled capacities."""
    A, B, G = msg_var("a"), msg_var("b"), msg_var("g")
    in_g = frozenset(arc_var(x, "g") for x in "abc")
    out_g = frozenset(arc_var("g", x) for x in "abc")
    in_h = frozenset(arc_var(x, "h") for x in "abc")
    out_h = frozenset(arc_var("h", x) for x in "abc")
    in_f = frozenset(arc_var(x, "f") for x in "ac")
    out_f = frozenset(arc_var("f", x) for x in "ac")
    in_a = frozenset(arc_var(x, "a") for x in "ghf")
    out_a = frozenset(arc_var("a", x) for x in "ghf")
    in_b = frozenset(arc_var(x, "b") for x in "gh")
    out_b = frozenset(arc_var("b", x) for x in "gh")
    in_c = frozenset(arc_var(x, "c") for x in "ghf")
    out_c = frozenset(arc_var("c", x) for x in "ghf")
    e_all = in_g | out_g | in_h | out_h | in_f | out_f
    e_no_f = e_all - (in_f | out_f)
    e_no_b = e_all - (in_b | out_b)

    steps: list[CertStep] = []

    def add(ax: Axiom, coeff=_ONE):
        steps.append(CertStep(Fraction(coeff), ax))

    # chain charging the arcs into g, h and f
    add(Axiom.input_output({"g"}))
    add(Axiom.input_output({"h"}))
    add(Axiom.submodularity({G} | in_g | out_g, {G} | in_h | out_h))
    add(Axiom.subadditivity({G}, in_g))
    add(Axiom.functional(B, {G} | e_no_f, "source_out"))
    add(Axiom.input_output({"f"}))
    add(Axiom.submodularity({B, G} | e_no_f, {B} | in_f | out_f))
    add(Axiom.functional(A, {B, G} | e_all, "sink_decoding"))
    for ax in _split_steps(in_g) + _split_steps(in_h) + _split_steps(in_f):
        add(ax)
    add(Axiom.monotonicity({A, B, G}, {A, B, G} | e_all))
    add(Axiom.independence({A, B, G}, "ge"))

    # chain charging the arcs into a, c and b
    add(Axiom.input_output({"a"}))
    add(Axiom.input_output({"c"}))
    add(Axiom.submodularity({A} | in_a | out_a, {A} | in_c | out_c))
    add(Axiom.subadditivity({A}, in_a))
    add(Axiom.functional(B, {A} | e_no_b, "sink_decoding"))
    add(Axiom.input_output({"b"}))
    add(Axiom.submodularity({A, B} | e_no_b, {B} | in_b | out_b))
    add(Axiom.subadditivity({B}, in_b))
    add(Axiom.functional(G, {A, B} | e_all, "sink_decoding"))
    for ax in _split_steps(in_a) + _split_steps(in_c) + _split_steps(in_b):
        add(ax)
    add(Axiom.monotonicity({A, B, G}, {A, B, G} | e_all))
    add(Axiom.independence({A, B, G}, "ge"))

    for u, v in [("a", "g"), ("b", "g"), ("c", "g"), ("a", "h"),
                 ("b", "h"), ("c", "h"), ("a", "f"), ("c", "f")]:
        add(Axiom.capacity(f"{u}-{v}"))
    add(Axiom.rate("a"), 2)
    add(Axiom.rate("b"), 3)
    add(Axiom.rate("g"), 2)
    return Certificate(steps=tuple(steps), bound=Fraction(8),
                       alphas=(("a", Fraction(2)), ("b", Fraction(3)), ("g", Fraction(2))))


def gen_certificate_bipartite(net: Network) -> Certificate:
    """Certificate  sum_i r_i + sum_{within} r_i <= sum capacities  for any
    undirected bipartite network: per-node accounting inside each partition,
    the n-set submodularity inequality to pool it, and sink decodings to pull
    in the opposite partition's internal messages."""
    if net.directed:
        raise ValueError("bipartite certificates apply to undirected networks")
    if not net.commodities:
        raise ValueError("at least one commodity is required")
    side_v, side_w = two_coloring(net)
    all_msgs = frozenset(msg_var(c.id) for c in net.commodities)
    all_arcs = frozenset(arc_var(a) for a in arcs(net))

    steps: list[CertStep] = []

    def add(ax: Axiom, coeff=_ONE):
        steps.append(CertStep(Fraction(coeff), ax))

    for part in (side_v, side_w):
        a_sets = []
        for v in (n for n in net.nodes if n in part):
            s_msgs = frozenset(msg_var(c.id) for c in net.commodities if c.source == v)
            t_msgs = frozenset(msg_var(c.id) for c in net.commodities if c.sink == v)
            ins = frozenset(arc_var(a) for a in in_set(net, {v}))
            outs = frozenset(arc_var(a) for a in out_set(net, {v}))
            a_v = s_msgs | t_msgs | ins | outs
            if not a_v:
                continue
            a_sets.append(a_v)
            if outs or t_msgs:
                add(Axiom.input_output({v}))
            if s_msgs and ins:
                add(Axiom.subadditivity(s_msgs, ins))
            if len(ins) > 1:
                for ax in _split_steps(ins):
                    add(ax)
            if len(s_msgs) > 1:
                for ax in _split_steps(s_msgs):
                    add(ax)
        if len(a_sets) > 1:
            add(Axiom.generalized_submodularity(*a_sets))
        # messages living entirely in the opposite partition enter by
        # decoding at their sinks, in dependency order
        have = frozenset(msg_var(c.id) for c in net.commodities
                         if c.source in part or c.sink in part)
        base = have | all_arcs
        added: frozenset = frozenset()
        remaining = [c for c in net.commodities
                     if c.source not in part and c.sink not in part]
        while remaining:
            pick = None
            for c in remaining:
                need = {msg_var(x.id) for x in net.commodities if x.source == c.sink}
                if need <= have | added:
                    pick = c
                    break
            if pick is None:
                cyc = ", ".join(c.id for c in remaining)
                raise SideConditionError(f"cyclic decoding dependency among: {cyc}")
            add(Axiom.functional(msg_var(pick.id), base | added, "sink_decoding"))
            added = added | {msg_var(pick.id)}
            remaining.remove(pick)
        big = base | added
        if all_msgs != big:
            add(Axiom.monotonicity(all_msgs, big))
        if len(all_msgs) > 1:
            add(Axiom.independence(all_msgs, "ge"))
        within = frozenset(msg_var(c.id) for c in net.commodities
                           if c.source in part and c.sink in part)
        if len(within) > 1:
            add(Axiom.independence(within, "ge"))

    for e in net.edges:
        add(Axiom.capacity(f"{e.u}-{e.v}"))
    alphas = []
    for c in net.commodities:
        same = ((c.source in side_v) == (c.sink in side_v))
        alphas.append((c.id, Fraction(2) if same else _ONE))
        add(Axiom.rate(c.id), alphas[-1][1])
    bound = sum((e.capacity for e in net.edges), Fraction(0))
    return Certificate(steps=tuple(steps), bound=bound, alphas=tuple(sorted(alphas)))


# ---------------------------------------------------------------------------
# Shannon-polyhedron validation of the n-set submodularity inequality


def verify_shannon_type(n_sets: int, flip: bool = False) -> bool:
    """Exact LP check that  sum H(A_i) >= H(union) + H(union of pairwise
    intersections)  holds for every entropy vector satisfying the elemental
    Shannon inequalities.

    The n sets are modeled over 2^n - 1 atom ground variables; the LP
    minimizes the inequality's slack over the Shannon polyhedron and the
    inequality is Shannon-provable iff the minimum is exactly zero.  With
    flip=True the reversed inequality is tested instead (it should fail).
    """
    if n_sets not in (2, 3):
        raise ValueError("n_sets must be 2 or 3")
    atoms = list(range(1, 1 << n_sets))
    n_ground = len(atoms)
    full = (1 << n_ground) - 1

    lp = LinearProgram()
    for mask in range(1, full + 1):
        lp.add_variable(f"h{mask}")

    obj: dict[str, Fraction] = {}

    def bump(mask: int, c: int):
        if mask:
            name = f"h{mask}"
            obj[name] = obj.get(name, Fraction(0)) + c

    # maximize the negation of (sum H(A_i) - H(union) - H(pairwise))
    for i in range(n_sets):
        a_mask = 0
        for p, atom in enumerate(atoms):
            if atom >> i & 1:
                a_mask |= 1 << p
        bump(a_mask, -1)
    bump(full, 1)
    pair_mask = 0
    for p, atom in enumerate(atoms):
        if bin(atom).count("1") >= 2:
            pair_mask |= 1 << p
    bump(pair_mask, 1)
    if flip:
        obj = {v: -c for v, c in obj.items()}
    lp.set_objective({v: c for v, c in obj.items() if c})

    # elemental inequalities, written as <= 0 rows
    for x in range(n_ground):
        xa = 1 << x
        lp.add_constraint({f"h{full ^ xa}": 1, f"h{full}": -1}, "<=", 0,
                          name=f"hcond[{x}]")
    for x in range(n_ground):
        for y in range(x + 1, n_ground):
            xa, ya = 1 << x, 1 << y
            others = full ^ xa ^ ya
            k = others
            while True:
                coeffs = {f"h{k | xa | ya}": Fraction(1),
                          f"h{k | xa}": Fraction(-1),
                          f"h{k | ya}": Fraction(-1)}
                if k:
                    coeffs[f"h{k}"] = Fraction(1)
                lp.add_constraint(coeffs, "<=", 0, name=f"cmi[{x},{y},{k}]")
                if k == 0:
                    break
                k = (k - 1) & others
    res = simplex_solve(lp)
    return res.status == "optimal" and res.value == 0


# ---------------------------------------------------------------------------
# bundled certificates


def bundled_builders() -> dict:
    """Network, certificate and label for every bundled certificate name."""
    out = {}
    for k in range(2, 7):
        out[f"n1-k{k}"] = (lambda k=k: (gen_n1(k), gen_certificate_n1(k),
                                        f"bottleneck family n1 with k={k}"))
    out["hu"] = lambda: (gen_hu(), gen_certificate_hu(), "three-commodity network hu")
    out["type1-2-3"] = lambda: (gen_bipartite("I", 2, 3),
                                gen_certificate_bipartite(gen_bipartite("I", 2, 3)),
                                "complete bipartite (2,3), within-partition demands")
    out["type2-2-2"] = lambda: (gen_bipartite("II", 2, 2),
                                gen_certificate_bipartite(gen_bipartite("II", 2, 2)),
                                "complete bipartite (2,2), all-pairs demands")
    return out


def bundled_names() -> tuple[str, ...]:
    return tuple(sorted(bundled_builders()))


def bundled_certificate(name: str) -> str:
    """Text of a bundled certificate file."""
    if name not in bundled_builders():
        raise ValueError(f"unknown bundled certificate {name!r}; "
                         f"available: {', '.join(bundled_names())}")
    return resources.files("kpairs").joinpath("data", f"{name}.cert").read_text("utf-8")
