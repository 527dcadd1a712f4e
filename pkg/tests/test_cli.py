import io
from fractions import Fraction

import pytest

from kpairs import gen_bipartite, gen_hu, gen_n1, parse_network, serialize_network
from kpairs.certs import bundled_certificate
from kpairs.cli import main


def run_cli(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def machine_value(text, section, key):
    current = None
    for line in text.splitlines():
        if not line.startswith(" "):
            current = line.rstrip(":")
        elif current == section:
            k, _, v = line.strip().partition(": ")
            if k == key:
                return v
    raise KeyError(f"{section}.{key} not in output:\n{text}")


@pytest.fixture
def hu_file(tmp_path):
    path = tmp_path / "hu.net"
    path.write_text(serialize_network(gen_hu()))
    return str(path)


def test_gen_n1(capsys):
    code, out, _ = run_cli(capsys, "gen", "n1", "--k", "3")
    assert code == 0
    net = parse_network(out)
    assert net == gen_n1(3)
    assert (len(net.nodes), len(net.edges)) == (8, 10)


def test_gen_hu_and_bipartite(capsys):
    code, out, _ = run_cli(capsys, "gen", "hu")
    assert code == 0
    assert parse_network(out) == gen_hu()
    code, out, _ = run_cli(capsys, "gen", "bipartite", "--type", "II", "--m", "2", "--n", "2")
    assert code == 0
    assert len(parse_network(out).commodities) == 6


def test_gen_bad_params(capsys):
    code, _out, err = run_cli(capsys, "gen", "n1", "--k", "1")
    assert code == 1
    assert "error:" in err
    code, _out, err = run_cli(capsys, "gen", "bipartite", "--type", "I", "--m", "2")
    assert code == 1
    assert "error:" in err


def test_bounds_hu(capsys, hu_file):
    code, out, _ = run_cli(capsys, "bounds", hu_file, "--format", "machine")
    assert code == 0
    assert machine_value(out, "sparsity", "value") == "4/3"
    assert machine_value(out, "wiener_bound", "value") == "8/7"


def test_bounds_human_has_decimals(capsys, hu_file):
    code, out, _ = run_cli(capsys, "bounds", hu_file)
    assert code == 0
    assert "4/3" in out and "1.33333" in out
    assert "8/7" in out and "1.14286" in out


def test_bounds_n1_meagerness(capsys, tmp_path):
    path = tmp_path / "n1.net"
    path.write_text(serialize_network(gen_n1(2)))
    code, out, _ = run_cli(capsys, "bounds", str(path), "--format", "machine")
    assert code == 0
    assert machine_value(out, "meagerness", "value") == "1"


def test_bounds_type1_23(capsys, tmp_path):
    path = tmp_path / "t1.net"
    path.write_text(serialize_network(gen_bipartite("I", 2, 3)))
    code, out, _ = run_cli(capsys, "bounds", str(path), "--format", "machine")
    assert code == 0
    assert machine_value(out, "sparsity", "value") == "1"
    assert machine_value(out, "wiener_bound", "value") == "3/4"


def test_bounds_cap_exceeded(capsys, hu_file):
    code, _out, err = run_cli(capsys, "bounds", hu_file, "--cap-edges", "4")
    assert code == 1
    assert "cap" in err


def test_route_hu(capsys, hu_file):
    code, out, _ = run_cli(capsys, "route", hu_file, "--format", "machine")
    assert code == 0
    assert machine_value(out, "routing_rate", "value") == "8/7"


def test_route_scheme_dump(capsys, hu_file):
    code, out, _ = run_cli(capsys, "route", hu_file, "--scheme", "--format", "machine")
    assert code == 0
    assert "scheme:" in out
    assert "flow[" in out


def test_check_bundled_hu(capsys, hu_file):
    code, out, _ = run_cli(capsys, "check", hu_file, "--bundled", "hu", "--format", "machine")
    assert code == 0
    assert machine_value(out, "check", "valid") == "1"
    assert machine_value(out, "check", "symmetric_bound") == "8/7"
    assert machine_value(out, "check", "target") == "a:2 b:3 g:2"


def test_check_certificate_file(capsys, hu_file, tmp_path):
    cpath = tmp_path / "hu.cert"
    cpath.write_text(bundled_certificate("hu"))
    code, out, _ = run_cli(capsys, "check", hu_file, str(cpath), "--format", "machine")
    assert code == 0
    assert machine_value(out, "check", "valid") == "1"


def test_check_truncated_certificate_reports_residual(capsys, hu_file, tmp_path):
    lines = bundled_certificate("hu").strip().splitlines()
    cpath = tmp_path / "trunc.cert"
    cpath.write_text("\n".join(lines[:-1]) + "\n")
    code, out, _ = run_cli(capsys, "check", hu_file, str(cpath), "--format", "machine")
    assert code == 0
    assert machine_value(out, "check", "valid") == "0"
    assert "residual" in out


def test_check_unknown_bundled(capsys, hu_file):
    code, _out, err = run_cli(capsys, "check", hu_file, "--bundled", "nope")
    assert code == 1
    assert "available" in err


def test_check_requires_certificate(capsys, hu_file):
    code, _out, err = run_cli(capsys, "check", hu_file)
    assert code == 1
    assert "certificate" in err


def test_gap_hu_confirms_conjecture(capsys, hu_file):
    code, out, _ = run_cli(capsys, "gap", hu_file, "--format", "machine")
    assert code == 0
    assert machine_value(out, "routing_rate", "value") == "8/7"
    assert machine_value(out, "coding_bound", "value") == "8/7"
    assert machine_value(out, "sparsity", "value") == "4/3"
    assert machine_value(out, "conjecture", "value") == "confirmed on this instance"


def test_gap_n1_ratio(capsys, tmp_path):
    path = tmp_path / "n1k4.net"
    path.write_text(serialize_network(gen_n1(4)))
    code, out, _ = run_cli(capsys, "gap", str(path), "--format", "machine")
    assert code == 0
    assert machine_value(out, "meagerness", "value") == "1"
    assert machine_value(out, "coding_bound", "value") == "1/4"
    assert machine_value(out, "meagerness_to_coding_ratio", "value") == "4"
    assert "conjecture" not in out  # directed instance


def test_gap_type2_22(capsys, tmp_path):
    path = tmp_path / "t2.net"
    path.write_text(serialize_network(gen_bipartite("II", 2, 2)))
    code, out, _ = run_cli(capsys, "gap", str(path), "--format", "machine")
    assert code == 0
    assert machine_value(out, "coding_bound", "value") == "1/2"
    assert machine_value(out, "conjecture", "value") == "confirmed on this instance"


def test_gap_type1_23(capsys, tmp_path):
    path = tmp_path / "t1.net"
    path.write_text(serialize_network(gen_bipartite("I", 2, 3)))
    code, out, _ = run_cli(capsys, "gap", str(path), "--format", "machine")
    assert code == 0
    assert machine_value(out, "routing_rate", "value") == "3/4"
    assert machine_value(out, "coding_bound", "value") == "3/4"
    assert machine_value(out, "conjecture", "value") == "confirmed on this instance"


def test_gap_rate_never_exceeds_reported_bounds(capsys, tmp_path):
    cases = [("hu.net", gen_hu()), ("n1.net", gen_n1(3)),
             ("t2.net", gen_bipartite("II", 2, 2))]
    for name, net in cases:
        path = tmp_path / name
        path.write_text(serialize_network(net))
        code, out, _ = run_cli(capsys, "gap", str(path), "--format", "machine")
        assert code == 0
        rate = Fraction(machine_value(out, "routing_rate", "value"))
        assert rate <= Fraction(machine_value(out, "sparsity", "value"))
        if not net.directed:
            assert rate <= Fraction(machine_value(out, "wiener_bound", "value"))
            assert rate <= Fraction(machine_value(out, "coding_bound", "value"))


def test_pipe_transparency(capsys, monkeypatch, hu_file):
    code, want, _ = run_cli(capsys, "bounds", hu_file, "--format", "machine")
    assert code == 0
    monkeypatch.setattr("sys.stdin", io.StringIO(serialize_network(gen_hu())))
    code, got, _ = run_cli(capsys, "bounds", "-", "--format", "machine")
    assert code == 0
    assert got == want


def test_machine_output_stable(capsys, hu_file):
    outs = []
    for _ in range(2):
        code, out, _ = run_cli(capsys, "gap", hu_file, "--format", "machine")
        assert code == 0
        outs.append(out)
    assert outs[0] == outs[1]


def test_machine_timing_flag(capsys, hu_file):
    code, out, _ = run_cli(capsys, "route", hu_file, "--format", "machine")
    assert "time_ms" not in out
    code, out, _ = run_cli(capsys, "route", hu_file, "--format", "machine", "--timing")
    assert "time_ms" in out


def test_parse_error_exit(capsys, tmp_path):
    bad = tmp_path / "bad.net"
    bad.write_text("nodes a b\n")
    code, _out, err = run_cli(capsys, "bounds", str(bad))
    assert code == 1
    assert "line 1" in err
