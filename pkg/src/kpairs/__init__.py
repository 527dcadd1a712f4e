"""Rate bounds for k-pairs networks.

Exact (rational) computation of sparsity, meagerness, the Wiener bound and
the maximum concurrent fractional routing rate, plus a checker and
generators for entropy-inequality certificates of coding-rate upper bounds.
"""

from .model import (
    Arc,
    Commodity,
    Edge,
    Network,
    ParseError,
    arcs,
    directed_expansion,
    gen_bipartite,
    gen_hu,
    gen_n1,
    in_set,
    out_set,
    parse_network,
    serialize_network,
    sinks_in,
    sources_in,
    two_coloring,
)
from .bounds import (
    CapExceeded,
    CutReport,
    DistanceTable,
    distance_table,
    isolates,
    meagerness,
    separates,
    sparsity,
    wiener_bound,
)
from .simplex import LinearProgram, SimplexResult, simplex_solve
from .routing import RoutingScheme, build_concurrent_flow_lp, routing_rate, verify_scheme
from .entropy import (
    Axiom,
    CertStep,
    Certificate,
    EntropyExpr,
    SideConditionError,
    Verdict,
    arc_var,
    check_certificate,
    expand_axiom,
    msg_var,
    parse_certificate,
    serialize_certificate,
)
from .certs import (
    bundled_certificate,
    bundled_names,
    gen_certificate_bipartite,
    gen_certificate_hu,
    gen_certificate_n1,
    verify_shannon_type,
)

__version__ = "0.1.0"
