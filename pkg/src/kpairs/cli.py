"""Command-line front end: gen | bounds | route | check | gap.

Reports default to a human-readable view (exact fractions plus rounded
decimals and timings).  ``--format machine`` emits a stable key/value tree
with exact ``p/q`` values only, suitable for scripting; timings are left
out of it unless ``--timing`` is given, so repeated runs are byte-identical.
"""

from __future__ import annotations

import argparse
import sys
import time
from fractions import Fraction

from . import __version__
from .bounds import CapExceeded, meagerness, sparsity, wiener_bound
from .certs import (bundled_certificate, bundled_names, gen_certificate_bipartite,
                    gen_certificate_hu, gen_certificate_n1)
from .entropy import SideConditionError, check_certificate, parse_certificate
from .model import (ParseError, gen_bipartite, gen_hu, gen_n1, parse_network,
                    serialize_network, two_coloring)
from .routing import routing_rate


class _Report:
    """Ordered sections of (key, value) pairs plus per-computation timings."""

    def __init__(self):
        self.sections = []  # (name, [(key, value), ...])
        self.timings = {}  # section name -> milliseconds
        self.notes = []

    def add(self, name, pairs):
        self.sections.append((name, list(pairs)))

    def timed(self, name, fn, *args, **kwargs):
        t0 = time.perf_counter()
        out = fn(*args, **kwargs)
        self.timings[name] = (time.perf_counter() - t0) * 1000.0
        return out


def _fmt_value(v) -> str:
    if isinstance(v, bool):
        return "1" if v else "0"
    if isinstance(v, Fraction):
        return str(v)
    return str(v)


def _render_machine(report: _Report, with_timing: bool) -> str:
    lines = []
    for name, pairs in report.sections:
        lines.append(f"{name}:")
        for key, value in pairs:
            lines.append(f"  {key}: {_fmt_value(value)}")
        if with_timing and name in report.timings:
            lines.append(f"  time_ms: {report.timings[name]:.1f}")
    for note in report.notes:
        lines.append(f"note: {note}")
    return "\n".join(lines) + "\n"


def _render_human(report: _Report) -> str:
    lines = []
    for name, pairs in report.sections:
        ms = report.timings.get(name)
        suffix = f"  [{ms:.0f} ms]" if ms is not None else ""
        head_done = False
        for key, value in pairs:
            shown = _fmt_value(value)
            if isinstance(value, Fraction) and value.denominator != 1:
                shown += f" (~{float(value):.6g})"
            if not head_done:
                if key == "value":
                    lines.append(f"{name}: {shown}{suffix}")
                else:
                    lines.append(f"{name}:{suffix}")
                    lines.append(f"  {key}: {shown}")
                head_done = True
            else:
                lines.append(f"  {key}: {shown}")
    for note in report.notes:
        lines.append(f"note: {note}")
    return "\n".join(lines) + "\n"


def _emit(report: _Report, args) -> None:
    if args.format == "machine":
        sys.stdout.write(_render_machine(report, args.timing))
    else:
        sys.stdout.write(_render_human(report))


def _read_text(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    with open(path, "r", encoding="utf-8") as fh:
        return fh.read()


def _load_network(path: str):
    return parse_network(_read_text(path))


def _network_section(net):
    return [("directed", net.directed), ("nodes", len(net.nodes)),
            ("edges", len(net.edges)), ("commodities", len(net.commodities))]


def _caps(args) -> dict:
    caps = {}
    if args.cap_edges is not None:
        caps["cap_edges"] = args.cap_edges
    return caps


# ---------------------------------------------------------------------------
# subcommands


def cmd_gen(args) -> int:
    if args.family == "n1":
        if args.k is None:
            raise ValueError("gen n1 requires --k")
        net = gen_n1(args.k)
    elif args.family == "hu":
        net = gen_hu()
    else:
        if args.type is None or args.m is None or args.n is None:
            raise ValueError("gen bipartite requires --type, --m and --n")
        net = gen_bipartite(args.type, args.m, args.n)
    sys.stdout.write(serialize_network(net))
    return 0


def cmd_bounds(args) -> int:
    net = _load_network(args.network)
    report = _Report()
    report.add("network", _network_section(net))
    caps = _caps(args)
    sp = report.timed("sparsity", sparsity, net, jobs=args.jobs, **caps)
    report.add("sparsity", [
        ("value", sp.value),
        ("witness_edges", " ".join(sorted(e.label(net.directed) for e in sp.witness_edges))),
        ("witness_commodities", " ".join(sorted(sp.witness_commodities))),
    ])
    if net.directed:
        mcaps = dict(caps)
        if args.cap_commodities is not None:
            mcaps["cap_commodities"] = args.cap_commodities
        mg = report.timed("meagerness", meagerness, net, jobs=args.jobs, **mcaps)
        report.add("meagerness", [
            ("value", mg.value),
            ("witness_edges", " ".join(sorted(e.label(True) for e in mg.witness_edges))),
            ("witness_commodities", " ".join(sorted(mg.witness_commodities))),
        ])
    else:
        wb = report.timed("wiener_bound", wiener_bound, net)
        report.add("wiener_bound", [("value", wb)])
    _emit(report, args)
    return 0


def cmd_route(args) -> int:
    net = _load_network(args.network)
    report = _Report()
    report.add("network", _network_section(net))
    rate, scheme = report.timed("routing_rate", routing_rate, net)
    report.add("routing_rate", [("value", rate)])
    if args.scheme:
        pairs = [("rate", scheme.rate)]
        for c in net.commodities:
            entries = [(a, v) for (cid, a), v in scheme.flows.items() if cid == c.id]
            for a, v in sorted(entries, key=lambda t: (t[0].tail, t[0].head)):
                pairs.append((f"flow[{c.id},{a}]", v))
        report.add("scheme", pairs)
    _emit(report, args)
    return 0


def _certificate_from_args(args, net):
    """(certificate, origin label) per --certificate/--bundled, else by
    recognizing the network; None when nothing applies."""
    if getattr(args, "certificate", None):
        return parse_certificate(_read_text(args.certificate)), args.certificate
    if getattr(args, "bundled", None):
        return parse_certificate(bundled_certificate(args.bundled)), f"bundled:{args.bundled}"
    k = len(net.commodities)
    if net.directed and k >= 2 and net == gen_n1(k):
        return gen_certificate_n1(k), f"generated:n1-k{k}"
    if not net.directed and net == gen_hu():
        return gen_certificate_hu(), "generated:hu"
    if not net.directed and net.commodities:
        try:
            two_coloring(net)
        except ValueError:
            return None
        return gen_certificate_bipartite(net), "generated:bipartite"
    return None


def cmd_check(args) -> int:
    net = _load_network(args.network)
    if args.cert is not None and args.bundled is not None:
        raise ValueError("give either a certificate file or --bundled, not both")
    if args.cert is not None:
        cert, origin = parse_certificate(_read_text(args.cert)), args.cert
    elif args.bundled is not None:
        cert, origin = parse_certificate(bundled_certificate(args.bundled)), f"bundled:{args.bundled}"
    else:
        raise ValueError("check needs a certificate file or --bundled NAME")
    report = _Report()
    report.add("network", _network_section(net))
    verdict = report.timed("check", check_certificate, net, cert)
    pairs = [("certificate", origin), ("steps", len(cert.steps)), ("valid", verdict.valid)]
    if verdict.valid:
        pairs += [
            ("bound", cert.bound),
            ("target", " ".join(f"{cid}:{a}" for cid, a in cert.alphas)),
            ("symmetric_bound", cert.symmetric_bound()),
        ]
    else:
        pairs.append(("residual", str(verdict.residual)))
    report.add("check", pairs)
    report.notes.extend(verdict.notes)
    _emit(report, args)
    return 0


def cmd_gap(args) -> int:
    net = _load_network(args.network)
    report = _Report()
    report.add("network", _network_section(net))
    rate, _scheme = report.timed("routing_rate", routing_rate, net)
    report.add("routing_rate", [("value", rate)])
    caps = _caps(args)
    sp = report.timed("sparsity", sparsity, net, jobs=args.jobs, **caps)
    report.add("sparsity", [("value", sp.value)])
    mg = None
    if net.directed:
        mcaps = dict(caps)
        if args.cap_commodities is not None:
            mcaps["cap_commodities"] = args.cap_commodities
        mg = report.timed("meagerness", meagerness, net, jobs=args.jobs, **mcaps)
        report.add("meagerness", [("value", mg.value)])
    else:
        wb = report.timed("wiener_bound", wiener_bound, net)
        report.add("wiener_bound", [("value", wb)])

    found = _certificate_from_args(args, net)
    coding = None
    if found is not None:
        cert, origin = found
        verdict = report.timed("coding_bound", check_certificate, net, cert)
        if not verdict.valid:
            raise ValueError(
                f"certificate {origin} does not validate on this network; "
                f"residual: {verdict.residual}")
        coding = cert.symmetric_bound()
        report.add("coding_bound", [("value", coding), ("certificate", origin)])
        report.notes.extend(verdict.notes)
    if coding is not None:
        if not net.directed:
            if rate == coding:
                report.add("conjecture", [("value", "confirmed on this instance")])
            else:
                report.add("conjecture", [("value", f"open here: routing {rate} < coding bound {coding}")])
        if mg is not None:
            report.add("meagerness_to_coding_ratio", [("value", mg.value / coding)])
    _emit(report, args)
    return 0


# ---------------------------------------------------------------------------


def _add_report_flags(p):
    p.add_argument("--format", choices=("human", "machine"), default="human",
                   help="report rendering (default: human)")
    p.add_argument("--timing", action="store_true",
                   help="include timings in machine output")


def _add_cap_flags(p):
    p.add_argument("--cap-edges", type=int, default=None,
                   help="override the edge-subset enumeration cap")
    p.add_argument("--cap-commodities", type=int, default=None,
                   help="override the commodity cap of the meagerness search")
    p.add_argument("--jobs", type=int, default=1,
                   help="parallel workers for subset enumeration (default 1)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="kpairs",
        description="Routing and coding rate bounds for k-pairs networks.")
    parser.add_argument("--version", action="version", version=f"kpairs {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="emit a generated network file on stdout")
    p.add_argument("family", choices=("n1", "hu", "bipartite"))
    p.add_argument("--k", type=int, help="commodity count for n1")
    p.add_argument("--type", choices=("I", "II"), help="bipartite demand pattern")
    p.add_argument("--m", type=int, help="size of the first partition")
    p.add_argument("--n", type=int, help="size of the second partition")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("bounds", help="sparsity plus meagerness (directed) or the Wiener bound (undirected)")
    p.add_argument("network", help="network file, or - for stdin")
    _add_cap_flags(p)
    _add_report_flags(p)
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("route", help="exact maximum concurrent routing rate")
    p.add_argument("network", help="network file, or - for stdin")
    p.add_argument("--scheme", action="store_true", help="dump an optimal flow scheme")
    _add_report_flags(p)
    p.set_defaults(func=cmd_route)

    p = sub.add_parser("check", help="verify an entropy certificate against a network")
    p.add_argument("network", help="network file, or - for stdin")
    p.add_argument("cert", nargs="?", help="certificate file, or - for stdin")
    p.add_argument("--bundled", metavar="NAME",
                   help="use a bundled certificate: " + ", ".join(bundled_names()))
    _add_report_flags(p)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("gap", help="juxtapose routing rate, cut bounds and the coding bound")
    p.add_argument("network", help="network file, or - for stdin")
    p.add_argument("--certificate", help="explicit certificate file")
    p.add_argument("--bundled", metavar="NAME",
                   help="use a bundled certificate: " + ", ".join(bundled_names()))
    _add_cap_flags(p)
    _add_report_flags(p)
    p.set_defaults(func=cmd_gap)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ParseError, SideConditionError, CapExceeded, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
