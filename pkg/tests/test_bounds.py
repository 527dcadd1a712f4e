import random
from fractions import Fraction

import pytest

from kpairs import (
    CapExceeded,
    Commodity,
    Edge,
    Network,
    distance_table,
    gen_bipartite,
    gen_hu,
    gen_n1,
    isolates,
    meagerness,
    parse_network,
    separates,
    sparsity,
    wiener_bound,
)
from helpers import random_network, sparsity_oracle


def _edges(net, *pairs):
    want = [frozenset(p) for p in pairs]
    return [e for e in net.edges if frozenset((e.u, e.v)) in want]


def test_separates_examples():
    hu = gen_hu()
    cut_a = _edges(hu, ("a", "g"), ("a", "h"), ("a", "f"))
    assert separates(hu, cut_a, "a")
    assert not separates(hu, [], "a")
    assert not separates(hu, _edges(hu, ("b", "g")), "b")


def test_separates_rejects_foreign_edge():
    with pytest.raises(ValueError, match="not in the network"):
        separates(gen_hu(), [Edge("a", "b")], "a")


def test_sparsity_hu():
    rep = sparsity(gen_hu())
    assert rep.value == Fraction(4, 3)
    assert len(rep.witness_edges) == 4
    assert rep.witness_commodities == {"a", "b", "g"}


def test_sparsity_type1_23():
    assert sparsity(gen_bipartite("I", 2, 3)).value == 1


def test_sparsity_single_edge():
    net = parse_network("directed 0\nnodes a b\nedge a b\ncommodity x a b\n")
    rep = sparsity(net)
    assert rep.value == 1
    assert rep.witness_edges == frozenset(net.edges)
    assert rep.witness_commodities == {"x"}


def test_sparsity_witness_is_consistent():
    rng = random.Random(7)
    for _ in range(25):
        net = random_network(rng)
        rep = sparsity(net)
        separated = {c.id for c in net.commodities
                     if separates(net, rep.witness_edges, c.id)}
        assert separated == rep.witness_commodities
        assert rep.value == Fraction(len(rep.witness_edges), len(rep.witness_commodities))


def test_sparsity_requires_commodities_and_cap():
    bare = parse_network("directed 0\nnodes a b\nedge a b\n")
    with pytest.raises(ValueError, match="commodity"):
        sparsity(bare)
    with pytest.raises(CapExceeded, match="cap 4"):
        sparsity(gen_hu(), cap_edges=4)


def test_sparsity_matches_path_oracle_small():
    rng = random.Random(11)
    checked = 0
    while checked < 30:
        net = random_network(rng, max_edges=6)
        if len(net.edges) > 6:
            continue
        assert sparsity(net).value == sparsity_oracle(net)
        checked += 1


def test_sparsity_jobs_parallel_matches():
    hu = gen_hu()
    seq = sparsity(hu)
    par = sparsity(hu, jobs=2)
    assert (par.value, par.witness_edges, par.witness_commodities) == \
        (seq.value, seq.witness_edges, seq.witness_commodities)


def test_isolates_examples():
    n1 = gen_n1(2)
    cut = [e for e in n1.edges if (e.u, e.v) in {("u", "v"), ("s2", "t1")}]
    assert isolates(n1, cut, ["1", "2"])
    bottleneck = [e for e in n1.edges if (e.u, e.v) == ("u", "v")]
    assert not isolates(n1, bottleneck, ["1", "2"])
    assert isolates(n1, [], [])
    with pytest.raises(ValueError, match="directed"):
        isolates(gen_hu(), [], [])


def test_meagerness_n1():
    assert meagerness(gen_n1(2)).value == 1
    assert meagerness(gen_n1(3)).value == 1


def test_meagerness_single_edge():
    net = parse_network("directed 1\nnodes s t\nedge s t\ncommodity x s t\n")
    rep = meagerness(net)
    assert rep.value == 1
    assert rep.witness_commodities == {"x"}


def test_meagerness_witness_isolates():
    for k in (2, 3, 4):
        net = gen_n1(k)
        rep = meagerness(net)
        assert isolates(net, rep.witness_edges, rep.witness_commodities)
        assert rep.value == Fraction(len(rep.witness_edges), len(rep.witness_commodities))


def test_meagerness_requires_directed_and_caps():
    with pytest.raises(ValueError, match="directed"):
        meagerness(gen_hu())
    with pytest.raises(CapExceeded, match="cap 3"):
        meagerness(gen_n1(2), cap_edges=3)
    big = gen_n1(2)
    with pytest.raises(CapExceeded, match="commodity cap"):
        meagerness(big, cap_commodities=1)


def test_meagerness_at_least_sparsity():
    rng = random.Random(13)
    done = 0
    while done < 30:
        net = random_network(rng, directed=True)
        assert meagerness(net).value >= sparsity(net).value
        done += 1


def test_distance_table_properties():
    for net in [gen_hu(), gen_bipartite("I", 2, 3)]:
        table = distance_table(net)
        nodes = net.nodes
        for u in nodes:
            assert table.get(u, u) == 0
            for v in nodes:
                assert table.get(u, v) == table.get(v, u)
        for u in nodes:
            for v in nodes:
                for w in nodes:
                    duv, dvw, duw = table.get(u, v), table.get(v, w), table.get(u, w)
                    if duv is not None and dvw is not None:
                        assert duw is not None and duw <= duv + dvw


def test_distance_table_directed_asymmetry():
    net = parse_network("directed 1\nnodes a b\nedge a b\n")
    table = distance_table(net)
    assert table.get("a", "b") == 1
    assert table.get("b", "a") is None


def test_wiener_hu():
    assert wiener_bound(gen_hu()) == Fraction(8, 7)


def test_wiener_type1_23():
    assert wiener_bound(gen_bipartite("I", 2, 3)) == Fraction(3, 4)


def test_wiener_single_edge():
    net = parse_network("directed 0\nnodes a b\nedge a b\ncommodity x a b\n")
    assert wiener_bound(net) == 1


def test_wiener_errors():
    with pytest.raises(ValueError):
        wiener_bound(gen_n1(2))
    disconnected = parse_network(
        "directed 0\nnodes a b c d\nedge a b\nedge c d\ncommodity x a c\n")
    with pytest.raises(ValueError, match="disconnected"):
        wiener_bound(disconnected)
    bare = parse_network("directed 0\nnodes a b\nedge a b\n")
    with pytest.raises(ValueError, match="commodity"):
        wiener_bound(bare)


def test_wiener_weakly_decreases_with_added_commodity():
    rng = random.Random(17)
    done = 0
    while done < 20:
        net = random_network(rng, directed=False)
        table = distance_table(net)
        pairs = [(u, v) for u in net.nodes for v in net.nodes
                 if u != v and table.get(u, v) is not None]
        if not pairs:
            continue
        extra = pairs[rng.randrange(len(pairs))]
        bigger = Network(False, net.nodes, net.edges,
                         net.commodities + (Commodity("extra", *extra),))
        assert wiener_bound(bigger) <= wiener_bound(net)
        done += 1
