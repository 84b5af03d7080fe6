import json
import subprocess
import sys

import numpy as np
import pytest

from mastergraph.cli import main
from mastergraph.network import parse_network, serialize_network
from mastergraph.steady_state import steady_state_basis

from helpers import EIGHT_STATE_TEXT, eight_state_net, three_state_net


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, (json.loads(out) if code == 0 and out else None), err


@pytest.fixture
def eight(tmp_path):
    path = tmp_path / "eight.tsv"
    path.write_text(EIGHT_STATE_TEXT)
    return path


@pytest.fixture
def cycle(tmp_path):
    path = tmp_path / "cycle.tsv"
    path.write_text("1\t2\t1\n2\t3\t1\n3\t1\t1\n")
    return path


def test_analyze_eight_state(capsys, eight):
    code, doc, _ = run(capsys, "analyze", eight)
    assert code == 0
    assert doc["kernel_dimension"] == 3 and doc["relaxing"] is False
    assert sorted(map(sorted, doc["minimal_absorbing_sets"])) == [["3"], ["4", "5"], ["6", "7", "8"]]
    assert doc["network"] == {"states": 8, "edges": 10, "labels": doc["network"]["labels"]}
    assert doc["dominance"]["is_wcdd"] is True
    assert doc["limit"] is None
    assert len(doc["basis"]) == doc["kernel_dimension"]
    assert set(doc["timing_ms"]) >= {"condense", "basis"}


def test_analyze_three_cycle(capsys, cycle):
    code, doc, _ = run(capsys, "analyze", cycle)
    assert code == 0 and doc["relaxing"] is True
    np.testing.assert_allclose(doc["basis"][0]["vector"], [1 / 3] * 3, atol=1e-15)
    assert doc["dominance"] is None


def test_malformed_line_exit_2(capsys, tmp_path):
    path = tmp_path / "bad.tsv"
    path.write_text("1\t2\t1\n2\t3\tfast\n")
    code, _, err = run(capsys, "analyze", path)
    assert code == 2
    assert "line 2" in err


def test_missing_file_exit_2(capsys, tmp_path):
    code, _, err = run(capsys, "analyze", tmp_path / "nope.tsv")
    assert code == 2 and "nope.tsv" in err


def test_trees_root_2(capsys, tmp_path):
    path = tmp_path / "three.json"
    path.write_text(serialize_network(three_state_net(), "json"))
    code, doc, _ = run(capsys, "trees", path, "--root", "2")
    assert code == 0
    (entry,) = doc
    assert entry["root"] == "2" and entry["count"] == 2
    assert sorted(map(sorted, entry["trees"])) == [[["1", "2"], ["3", "2"]], [["1", "3"], ["3", "2"]]]
    assert sum(entry["weights"]) == pytest.approx(entry["cofactor"], rel=1e-12)


def test_trees_cap_exit_4(capsys, eight):
    code, _, err = run(capsys, "trees", eight, "--cap", "5")
    assert code == 4


def test_evolve_time_zero_echoes_p0(capsys, eight, tmp_path):
    p0 = tmp_path / "p0.json"
    values = [0.1, 0.2, 0.05, 0.05, 0.2, 0.1, 0.1, 0.2]
    p0.write_text(json.dumps(values))
    code, doc, _ = run(capsys, "evolve", eight, "--t", "0", "--p0", p0)
    assert code == 0 and doc == values


def test_evolve_negative_time(capsys, eight):
    code, _, _ = run(capsys, "evolve", eight, "--t", "-1", "--p0", "uniform")
    assert code == 2


def test_steady_with_p0(capsys, eight):
    code, doc, _ = run(capsys, "steady", eight, "--p0", "state:1")
    assert code == 0
    assert set(doc) == {"n", "relaxing", "basis", "lambda", "p_infinity"}
    assert doc["n"] == 3
    assert sum(doc["lambda"]) == pytest.approx(1.0, abs=1e-12)
    assert sum(doc["p_infinity"]) == pytest.approx(1.0, abs=1e-12)


def test_steady_without_p0(capsys, cycle):
    code, doc, _ = run(capsys, "steady", cycle)
    assert set(doc) == {"n", "relaxing", "basis"}
    assert doc["basis"][0]["support"] == ["1", "2", "3"]


def test_simulate(capsys, cycle):
    code, doc, _ = run(capsys, "simulate", cycle, "--T", "20", "--n", "4000", "--seed", "1",
                       "--start", "1")
    assert code == 0
    assert set(doc) == {"states", "T", "n", "seed", "estimate", "stderr"}
    assert sum(doc["estimate"]) == pytest.approx(1.0)
    np.testing.assert_allclose(doc["estimate"], [1 / 3] * 3, atol=0.05)
    _, again, _ = run(capsys, "simulate", cycle, "--T", "20", "--n", "4000", "--seed", "1",
                      "--start", "state:1")
    assert again == doc


def test_output_flag(capsys, eight, tmp_path):
    out = tmp_path / "report.json"
    code = main(["steady", str(eight), "-o", str(out)])
    assert code == 0 and capsys.readouterr().out == ""
    assert json.loads(out.read_text())["n"] == 3


def test_floats_round_trip_exactly(capsys, tmp_path):
    path = tmp_path / "odd.json"
    net = three_state_net(0.1, 0.7, 1 / 3, 2 ** 0.5)
    path.write_text(serialize_network(net, "json"))
    code, doc, _ = run(capsys, "steady", path)
    np.testing.assert_array_equal(doc["basis"][0]["vector"], steady_state_basis(net).vectors[0])


def test_json_and_edge_list_inputs_agree(capsys, tmp_path):
    net = eight_state_net()
    a, b = tmp_path / "net.json", tmp_path / "net.tsv"
    a.write_text(serialize_network(net, "json"))
    b.write_text(serialize_network(net, "edge_list"))
    assert parse_network(a.read_text(), "json") == parse_network(b.read_text(), "edge_list")
    _, doc_a, _ = run(capsys, "analyze", a)
    _, doc_b, _ = run(capsys, "analyze", b)
    doc_a.pop("timing_ms"), doc_b.pop("timing_ms")
    assert doc_a == doc_b


def test_module_entry_point(eight):
    proc = subprocess.run([sys.executable, "-m", "mastergraph", "steady", str(eight)],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["relaxing"] is False
