"""Formal entropy reasoning over a network's information variables.

Variables are tokens: ``msg:<id>`` for a commodity's message and
``arc:<tail>><head>`` for the random variable carried by a directed arc.
An EntropyExpr is a rational linear combination of joint entropies H(S),
rate symbols, and a constant.  Every axiom expands to an expression whose
value is <= 0 for the entropies of any network code, so a nonnegative
combination of axiom instances that telescopes to  sum alpha_i r_i - C
proves the rate bound  sum alpha_i r_i <= C.  That combination is a
Certificate; the checker verifies the telescoping exactly.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable

from .model import Arc, Network, ParseError, arcs as network_arcs, in_set, out_set

_Z = Fraction(0)

_MSG_RE = re.compile(r"msg:(\w+)\Z")
_ARC_RE = re.compile(r"arc:(\w+)>(\w+)\Z")


class SideConditionError(ValueError):
    """An axiom instance violates its applicability condition."""


def msg_var(cid: str) -> str:
    return f"msg:{cid}"


def arc_var(tail, head: str | None = None) -> str:
    if head is None:
        return f"arc:{tail.tail}>{tail.head}"
    return f"arc:{tail}>{head}"


def _check_token(tok: str, line: int | None = None) -> str:
    if _MSG_RE.match(tok) or _ARC_RE.match(tok):
        return tok
    raise ParseError(f"bad variable token {tok!r}", line)


def _var_key(tok: str):
    return (0, tok) if tok.startswith("msg:") else (1, tok)


def fmt_varset(vs: Iterable[str]) -> str:
    vs = sorted(vs, key=_var_key)
    if not vs:
        raise ValueError("cannot format an empty variable set")
    return ",".join(vs)


def parse_varset(text: str, line: int | None = None) -> frozenset[str]:
    return frozenset(_check_token(tok, line) for tok in text.split(","))


class EntropyExpr:
    """sum coeff * H(varset) + sum alpha * r_commodity + constant.

    Canonical form: zero coefficients dropped, the empty set never stored
    (H of a constant is zero).
    """

    __slots__ = ("terms", "rates", "const")

    def __init__(self, terms=None, rates=None, const=0):
        acc: dict[frozenset, Fraction] = {}
        for s, c in (terms or {}).items():
            s = frozenset(s)
            if not s:
                continue
            c = Fraction(c)
            if s in acc:
                acc[s] += c
            else:
                acc[s] = c
        self.terms = {s: c for s, c in acc.items() if c}
        racc: dict[str, Fraction] = {}
        for cid, a in (rates or {}).items():
            a = Fraction(a)
            racc[cid] = racc.get(cid, _Z) + a
        self.rates = {cid: a for cid, a in racc.items() if a}
        self.const = Fraction(const)

    @staticmethod
    def H(varset, coeff=1) -> "EntropyExpr":
        return EntropyExpr(terms={frozenset(varset): Fraction(coeff)})

    def scaled(self, f) -> "EntropyExpr":
        f = Fraction(f)
        return EntropyExpr(
            terms={s: f * c for s, c in self.terms.items()},
            rates={cid: f * a for cid, a in self.rates.items()},
            const=f * self.const,
        )

    def __add__(self, other: "EntropyExpr") -> "EntropyExpr":
        terms = dict(self.terms)
        for s, c in other.terms.items():
            terms[s] = terms.get(s, _Z) + c
        rates = dict(self.rates)
        for cid, a in other.rates.items():
            rates[cid] = rates.get(cid, _Z) + a
        return EntropyExpr(terms, rates, self.const + other.const)

    def __sub__(self, other: "EntropyExpr") -> "EntropyExpr":
        return self + other.scaled(-1)

    def __eq__(self, other) -> bool:
        return (isinstance(other, EntropyExpr) and self.terms == other.terms
                and self.rates == other.rates and self.const == other.const)

    def is_zero(self) -> bool:
        return not self.terms and not self.rates and not self.const

    def evaluate(self, entropy_of, rate_values=None):
        """Numeric value given a joint-entropy callback over variable sets."""
        total = float(self.const)
        for s, c in self.terms.items():
            total += float(c) * entropy_of(s)
        for cid, a in self.rates.items():
            total += float(a) * float((rate_values or {})[cid])
        return total

    def __str__(self) -> str:
        parts = []
        for s in sorted(self.terms, key=lambda s: (len(s), fmt_varset(s))):
            c = self.terms[s]
            parts.append((c, f"H({fmt_varset(s)})"))
        for cid in sorted(self.rates):
            parts.append((self.rates[cid], f"r[{cid}]"))
        if self.const:
            parts.append((self.const, ""))
        if not parts:
            return "0"
        out = []
        for c, sym in parts:
            mag = abs(c)
            body = sym if (mag == 1 and sym) else (f"{mag} {sym}".strip() if sym else str(mag))
            if not out:
                out.append(body if c > 0 else f"-{body}")
            else:
                out.append(f"+ {body}" if c > 0 else f"- {body}")
        return " ".join(out)

    __repr__ = __str__


# ---------------------------------------------------------------------------
# axioms

_JUSTIFICATIONS = ("edge_local", "sink_decoding", "source_out")


@dataclass(frozen=True)
class Axiom:
    kind: str
    sets: tuple[frozenset, ...] = ()
    var: str = ""  # functional: the determined variable
    nodes: frozenset = frozenset()  # input_output
    just: str = ""  # functional justification
    edge: str = ""  # capacity: "u>v" (directed) or "u-v" (undirected)
    commodity: str = ""  # rate
    direction: str = ""  # independence: "ge" or "le"

    @staticmethod
    def monotonicity(small, large) -> "Axiom":
        return Axiom("monotonicity", sets=(frozenset(small), frozenset(large)))

    @staticmethod
    def submodularity(a, b) -> "Axiom":
        return Axiom("submodularity", sets=(frozenset(a), frozenset(b)))

    @staticmethod
    def subadditivity(a, b) -> "Axiom":
        return Axiom("subadditivity", sets=(frozenset(a), frozenset(b)))

    @staticmethod
    def generalized_submodularity(*sets) -> "Axiom":
        return Axiom("generalized_submodularity", sets=tuple(frozenset(s) for s in sets))

    @staticmethod
    def input_output(nodes) -> "Axiom":
        return Axiom("input_output", nodes=frozenset(nodes))

    @staticmethod
    def functional(var: str, basis, just: str) -> "Axiom":
        return Axiom("functional", var=var, sets=(frozenset(basis),), just=just)

    @staticmethod
    def independence(messages, direction: str = "ge") -> "Axiom":
        return Axiom("independence", sets=(frozenset(messages),), direction=direction)

    @staticmethod
    def capacity(edge_token: str) -> "Axiom":
        return Axiom("capacity", edge=edge_token)

    @staticmethod
    def rate(cid: str) -> "Axiom":
        return Axiom("rate", commodity=cid)


def _network_vars(net: Network):
    return ({c.id for c in net.commodities},
            {arc_var(a) for a in network_arcs(net)})


def _validate_vars(net: Network, vs: Iterable[str], msgs, arc_tokens):
    for tok in vs:
        m = _MSG_RE.match(tok)
        if m:
            if m.group(1) not in msgs:
                raise SideConditionError(f"unknown message variable {tok!r}")
            continue
        if _ARC_RE.match(tok):
            if tok not in arc_tokens:
                raise SideConditionError(f"{tok!r} is not an arc of the network")
            continue
        raise SideConditionError(f"bad variable token {tok!r}")


def expand_axiom(net: Network, ax: Axiom) -> EntropyExpr:
    """Rewrite the axiom instance in the normal form LHS - RHS <= 0,
    checking its side conditions against the network."""
    msgs, arc_tokens = _network_vars(net)
    H = EntropyExpr.H

    def checked(vs):
        _validate_vars(net, vs, msgs, arc_tokens)
        return frozenset(vs)

    kind = ax.kind
    if kind == "monotonicity":
        small, large = (checked(s) for s in ax.sets)
        extra = small - large
        if extra:
            raise SideConditionError(
                f"monotonicity requires containment; not in the larger set: {fmt_varset(extra)}")
        return H(small) - H(large)
    if kind == "submodularity":
        a, b = (checked(s) for s in ax.sets)
        return H(a | b) + H(a & b) - H(a) - H(b)
    if kind == "subadditivity":
        a, b = (checked(s) for s in ax.sets)
        return H(a | b) - H(a) - H(b)
    if kind == "generalized_submodularity":
        sets = [checked(s) for s in ax.sets]
        if not sets:
            raise SideConditionError("generalized_submodularity needs at least one set")
        union = frozenset().union(*sets)
        pairwise = frozenset()
        for i in range(len(sets)):
            for j in range(i + 1, len(sets)):
                pairwise |= sets[i] & sets[j]
        expr = H(union) + H(pairwise) if pairwise else H(union)
        for s in sets:
            expr = expr - H(s)
        return expr
    if kind == "input_output":
        unknown = ax.nodes - set(net.nodes)
        if unknown:
            raise SideConditionError(f"unknown node(s): {', '.join(sorted(unknown))}")
        ins = {arc_var(a) for a in in_set(net, ax.nodes)}
        outs = {arc_var(a) for a in out_set(net, ax.nodes)}
        srcs = {msg_var(c.id) for c in net.commodities if c.source in ax.nodes}
        snks = {msg_var(c.id) for c in net.commodities if c.sink in ax.nodes}
        return H(ins | srcs | outs | snks) - H(ins | srcs)
    if kind == "functional":
        basis = checked(ax.sets[0])
        _validate_vars(net, [ax.var], msgs, arc_tokens)
        if ax.just not in _JUSTIFICATIONS:
            raise SideConditionError(f"unknown justification {ax.just!r}")
        if ax.just == "edge_local":
            m = _ARC_RE.match(ax.var)
            if not m:
                raise SideConditionError("edge_local determines an arc variable")
            tail = m.group(1)
            need = {arc_var(a) for a in in_set(net, {tail})}
            need |= {msg_var(c.id) for c in net.commodities if c.source == tail}
        elif ax.just == "sink_decoding":
            m = _MSG_RE.match(ax.var)
            if not m:
                raise SideConditionError("sink_decoding determines a message variable")
            t = net.commodity(m.group(1)).sink
            need = {arc_var(a) for a in in_set(net, {t})}
            need |= {msg_var(c.id) for c in net.commodities if c.source == t}
        else:  # source_out
            m = _MSG_RE.match(ax.var)
            if not m:
                raise SideConditionError("source_out determines a message variable")
            s = net.commodity(m.group(1)).source
            need = {arc_var(a) for a in out_set(net, {s})}
        missing = need - basis
        if missing:
            raise SideConditionError(
                f"functional({ax.just}) for {ax.var}: basis is missing {fmt_varset(missing)}")
        return H(basis | {ax.var}) - H(basis)
    if kind == "independence":
        m_set = checked(ax.sets[0])
        non_msg = {tok for tok in m_set if not tok.startswith("msg:")}
        if non_msg:
            raise SideConditionError(
                f"independence applies to message variables only, got {fmt_varset(non_msg)}")
        if ax.direction not in ("ge", "le"):
            raise SideConditionError(f"independence direction must be ge or le, got {ax.direction!r}")
        total = EntropyExpr()
        for tok in m_set:
            total = total + H({tok})
        if ax.direction == "ge":  # joint >= sum of parts (independent sources)
            return total - H(m_set)
        return H(m_set) - total
    if kind == "capacity":
        tok = ax.edge
        if net.directed:
            m = re.match(r"(\w+)>(\w+)\Z", tok)
            if not m:
                raise SideConditionError(f"directed capacity edge must be 'u>v', got {tok!r}")
            u, v = m.groups()
            for e in net.edges:
                if (e.u, e.v) == (u, v):
                    return H({arc_var(u, v)}) + EntropyExpr(const=-e.capacity)
            raise SideConditionError(f"no directed edge {u}>{v}")
        m = re.match(r"(\w+)-(\w+)\Z", tok)
        if not m:
            raise SideConditionError(f"undirected capacity edge must be 'u-v', got {tok!r}")
        u, v = m.groups()
        for e in net.edges:
            if {e.u, e.v} == {u, v}:
                return (H({arc_var(e.u, e.v)}) + H({arc_var(e.v, e.u)})
                        + EntropyExpr(const=-e.capacity))
        raise SideConditionError(f"no undirected edge {u}-{v}")
    if kind == "rate":
        if ax.commodity not in msgs:
            raise SideConditionError(f"unknown commodity {ax.commodity!r}")
        return EntropyExpr(rates={ax.commodity: 1}) - H({msg_var(ax.commodity)})
    raise ValueError(f"unknown axiom kind {ax.kind!r}")


# ---------------------------------------------------------------------------
# certificates


@dataclass(frozen=True)
class CertStep:
    coeff: Fraction
    axiom: Axiom

    def __post_init__(self):
        object.__setattr__(self, "coeff", Fraction(self.coeff))


@dataclass(frozen=True)
class Certificate:
    """Nonnegative combination of axiom instances with a target rate bound
    sum alpha_i r_i <= bound."""

    steps: tuple[CertStep, ...]
    bound: Fraction
    alphas: tuple[tuple[str, Fraction], ...]  # sorted by commodity id

    def __post_init__(self):
        object.__setattr__(self, "steps", tuple(self.steps))
        object.__setattr__(self, "bound", Fraction(self.bound))
        alphas = tuple(sorted((cid, Fraction(a)) for cid, a in dict(self.alphas).items()))
        if not alphas or any(a <= 0 for _, a in alphas):
            raise ValueError("target needs at least one commodity, all alphas positive")
        object.__setattr__(self, "alphas", alphas)

    def alpha_dict(self) -> dict:
        return dict(self.alphas)

    def symmetric_bound(self) -> Fraction:
        """The bound on the common rate r when every commodity runs at r."""
        return self.bound / sum(a for _, a in self.alphas)


@dataclass
class Verdict:
    valid: bool
    bound: Fraction | None = None
    alphas: dict | None = None
    residual: EntropyExpr | None = None
    notes: tuple[str, ...] = ()


def check_certificate(net: Network, cert: Certificate) -> Verdict:
    """Expand every step, sum with coefficients, and demand that the entropy
    terms cancel exactly, leaving sum alpha_i r_i - bound."""
    total = EntropyExpr()
    source_out_steps = []
    for idx, step in enumerate(cert.steps, 1):
        if step.coeff < 0:
            raise ValueError(f"step {idx}: negative coefficient {step.coeff}")
        expr = expand_axiom(net, step.axiom)
        total = total + expr.scaled(step.coeff)
        if step.axiom.kind == "functional" and step.axiom.just == "source_out":
            source_out_steps.append(idx)
    notes = ()
    if source_out_steps:
        notes = (
            "step(s) %s use source_out: that a message is recoverable from its "
            "source's outgoing arcs is assumed, not derived from the other axioms"
            % ",".join(map(str, source_out_steps)),
        )
    target = EntropyExpr(rates=dict(cert.alphas), const=-cert.bound)
    residual = total - target
    if residual.is_zero():
        return Verdict(valid=True, bound=cert.bound, alphas=cert.alpha_dict(), notes=notes)
    return Verdict(valid=False, residual=residual, notes=notes)


# ---------------------------------------------------------------------------
# file format
#
#   step <coeff> <axiom> <args...>
#   target <C> <id>:<alpha> ...
#
# Variable sets are comma-separated tokens (msg:a, arc:a>g).  The target is
# written first so a truncated file still parses and fails the check rather
# than erroring out.


def serialize_certificate(cert: Certificate, label: str | None = None) -> str:
    lines = []
    if label:
        lines.append(f"# {label}")
    alpha_txt = " ".join(f"{cid}:{a}" for cid, a in cert.alphas)
    lines.append(f"target {cert.bound} {alpha_txt}")
    for step in cert.steps:
        lines.append(f"step {step.coeff} {_axiom_args(step.axiom)}")
    return "\n".join(lines) + "\n"


def _axiom_args(ax: Axiom) -> str:
    k = ax.kind
    if k in ("monotonicity", "submodularity", "subadditivity", "generalized_submodularity"):
        return " ".join([k] + [fmt_varset(s) for s in ax.sets])
    if k == "input_output":
        return f"{k} {','.join(sorted(ax.nodes))}"
    if k == "functional":
        return f"{k} {ax.var} {fmt_varset(ax.sets[0])} {ax.just}"
    if k == "independence":
        return f"{k} {fmt_varset(ax.sets[0])} {ax.direction}"
    if k == "capacity":
        return f"{k} {ax.edge}"
    if k == "rate":
        return f"{k} {ax.commodity}"
    raise ValueError(f"unknown axiom kind {k!r}")


def parse_certificate(text: str) -> Certificate:
    steps: list[CertStep] = []
    target: tuple[Fraction, dict] | None = None

    def frac(tok, ln):
        try:
            return Fraction(tok)
        except (ValueError, ZeroDivisionError):
            raise ParseError(f"bad rational {tok!r}", ln)

    for ln, raw in enumerate(text.splitlines(), 1):
        tokens = raw.split("#", 1)[0].split()
        if not tokens:
            continue
        kw = tokens[0]
        if kw == "target":
            if target is not None:
                raise ParseError("repeated target line", ln)
            if len(tokens) < 3:
                raise ParseError("expected 'target <C> <id>:<alpha> ...'", ln)
            bound = frac(tokens[1], ln)
            alphas = {}
            for pair in tokens[2:]:
                if ":" not in pair:
                    raise ParseError(f"bad target term {pair!r}", ln)
                cid, a = pair.split(":", 1)
                if cid in alphas:
                    raise ParseError(f"repeated commodity {cid!r} in target", ln)
                alphas[cid] = frac(a, ln)
                if alphas[cid] <= 0:
                    raise ParseError(f"alpha for {cid!r} must be positive", ln)
            target = (bound, alphas)
        elif kw == "step":
            if len(tokens) < 3:
                raise ParseError("expected 'step <coeff> <axiom> <args...>'", ln)
            coeff = frac(tokens[1], ln)
            if coeff < 0:
                raise ParseError("step coefficient must be nonnegative", ln)
            steps.append(CertStep(coeff, _parse_axiom(tokens[2], tokens[3:], ln)))
        else:
            raise ParseError(f"unknown keyword {kw!r}", ln)
    if target is None:
        raise ParseError("missing target line")
    return Certificate(steps=tuple(steps), bound=target[0],
                       alphas=tuple(sorted(target[1].items())))


def _parse_axiom(kind: str, args: list[str], ln: int) -> Axiom:
    def need(n):
        if len(args) != n:
            raise ParseError(f"{kind} takes {n} argument(s), got {len(args)}", ln)

    if kind in ("monotonicity", "submodularity", "subadditivity"):
        need(2)
        return Axiom(kind, sets=(parse_varset(args[0], ln), parse_varset(args[1], ln)))
    if kind == "generalized_submodularity":
        if not args:
            raise ParseError(f"{kind} needs at least one set", ln)
        return Axiom(kind, sets=tuple(parse_varset(a, ln) for a in args))
    if kind == "input_output":
        need(1)
        return Axiom.input_output(args[0].split(","))
    if kind == "functional":
        need(3)
        if args[2] not in _JUSTIFICATIONS:
            raise ParseError(f"unknown justification {args[2]!r}", ln)
        return Axiom.functional(_check_token(args[0], ln), parse_varset(args[1], ln), args[2])
    if kind == "independence":
        need(2)
        if args[1] not in ("ge", "le"):
            raise ParseError(f"independence direction must be ge or le, got {args[1]!r}", ln)
        return Axiom.independence(parse_varset(args[0], ln), args[1])
    if kind == "capacity":
        need(1)
        return Axiom.capacity(args[0])
    if kind == "rate":
        need(1)
        return Axiom.rate(args[0])
    raise ParseError(f"unknown axiom {kind!r}", ln)
