import json
from pathlib import Path

import pytest

from regstruct.cli import dumps, main

GOLDEN = Path(__file__).parent / "golden"


def run(tmp_path, *args):
    return main(list(args) + ["--out", str(tmp_path)])


@pytest.mark.parametrize(
    "command,name,fmt,produced",
    [
        ("symbols", "phi4_d3.json", "text", "phi4_d3.txt"),
        ("symbols", "phi4_d3.json", "csv", "phi4_d3.csv"),
        ("symbols", "polynomial.json", "text", "polynomial.txt"),
        ("renorm", "renorm_phi4_d3.json", "text", "renorm_phi4_d3.txt"),
        ("renorm", "renorm_counit.json", "text", "renorm_counit.txt"),
        ("counterterm", "counterterm_phi4_d3.json", "text", "counterterm_phi4_d3.txt"),
        ("counterterm", "counterterm_phi4_d2.json", "text", "counterterm_phi4_d2.txt"),
        ("counterterm", "counterterm_counit.json", "text", "counterterm_counit.txt"),
        ("powercount", "graphs_variance.json", "text", "graphs_variance.txt"),
        ("powercount", "graph_forbidden.json", "text", "graph_forbidden.txt"),
        ("powercount", "graph_single_edge.json", "text", "graph_single_edge.txt"),
    ],
)
def test_golden_files(tmp_path, command, name, fmt, produced):
    assert run(tmp_path, command, "--input", name, "--format", fmt) == 0
    assert (tmp_path / produced).read_text() == (GOLDEN / produced).read_text()


def test_golden_content_is_what_we_expect():
    assert "I(Xi)^2*I(I(Xi)^2)                      0 - 4k  yes" in (GOLDEN / "phi4_d3.txt").read_text()
    assert "dual: c -> c + 3*c1 - 9*c2" in (GOLDEN / "counterterm_phi4_d3.txt").read_text()
    assert "dual: c -> c + 3*c1\n" in (GOLDEN / "counterterm_phi4_d2.txt").read_text()
    assert "dual: c -> c\n" in (GOLDEN / "counterterm_counit.txt").read_text()
    assert "divergent, margin -1/2, subgraph sum 10.5 > 10" in (GOLDEN / "graph_forbidden.txt").read_text()
    assert ": convergent" in (GOLDEN / "graph_single_edge.txt").read_text()
    renorm = (GOLDEN / "renorm_phi4_d3.txt").read_text()
    assert "M_g <I(Xi)^3> = -3*c1 <I(Xi)> + <I(Xi)^3>" in renorm
    assert "group law: pass" in renorm


def test_non_subcritical_exit_code(tmp_path, capsys):
    assert run(tmp_path, "symbols", "--input", "phi4_d4.json") == 2
    assert "non-subcritical" in capsys.readouterr().out
    diag = json.loads((tmp_path / "phi4_d4.diagnostics.json").read_text())
    assert diag["verdict"] == "non-subcritical"
    assert (tmp_path / "phi4_d4.diagnostics.json").read_text() == (GOLDEN / "phi4_d4.diagnostics.json").read_text()


def test_malformed_spec(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text('{"dimension": 3,\n "shapes": [}')
    assert run(tmp_path, "symbols", "--input", str(bad)) == 1
    assert "bad.json:2:" in capsys.readouterr().err


def test_missing_input(tmp_path):
    assert run(tmp_path, "symbols", "--input", "nowhere.json") == 1


def test_character_outside_the_negative_sector(tmp_path, capsys):
    f = tmp_path / "c.json"
    f.write_text(json.dumps({"noise_degrees": ["-5/2 - k"], "character": {"values": [["I(I(Xi)^2)", "1"]]}, "trees": ["Xi"]}))
    assert run(tmp_path, "renorm", "--input", str(f)) == 1
    assert "degree" in capsys.readouterr().err


def test_residual_terms_exit_code(tmp_path, capsys):
    f = tmp_path / "r.json"
    f.write_text(json.dumps({"dimension": 3, "character": {"values": [["I(Xi)", "c0"]]}}))
    assert run(tmp_path, "counterterm", "--input", str(f)) == 3
    assert "residual terms" in capsys.readouterr().err


def test_disconnected_graph(tmp_path):
    f = tmp_path / "g.json"
    f.write_text(json.dumps({"dimension": 5, "edges": [["a", "b", "P"], ["c", "d", "P"]]}))
    assert run(tmp_path, "powercount", "--input", str(f)) == 1


def test_gamma_override(tmp_path):
    assert run(tmp_path, "symbols", "--input", "phi4_d3.json", "--gamma", "2", "--format", "json") == 0
    data = json.loads((tmp_path / "phi4_d3.json").read_text())
    assert data["gamma"] == "2"
    assert len(data["symbols"]) > 39
    assert run(tmp_path, "symbols", "--input", "phi4_d3.json", "--gamma", "two") == 1


def test_env_var_sets_the_output_directory(tmp_path, monkeypatch):
    monkeypatch.setenv("REGSTRUCT_OUT", str(tmp_path / "env"))
    assert main(["powercount", "--input", "graph_single_edge.json"]) == 0
    assert (tmp_path / "env" / "graph_single_edge.txt").exists()


def test_toy_dist(tmp_path):
    assert run(tmp_path, "toy-dist", "--input", "toy_dist.json", "--format", "csv", "--epsilon-ladder", "1/10,1/100,1/1000") == 0
    summary = json.loads((tmp_path / "toy_dist_summary.json").read_text())
    assert summary["rates"]["flat"] == pytest.approx(2.0, abs=0.1)
    assert summary["dM_dc2"] == pytest.approx(summary["minus_phi0"], abs=1e-10)
    lines = (tmp_path / "toy_dist.csv").read_text().splitlines()
    assert lines[0] == "eta,eps,value,error"
    assert len(lines) == 7


def test_simulate_is_deterministic(tmp_path):
    cfg = tmp_path / "sim.json"
    cfg.write_text(
        json.dumps({"grid": {"d": 2, "N": 16, "dt": 0.002, "T": 0.1}, "epsilon_ladder": [0.25, 0.125, 0.0625], "seed": 3, "save_every": 5})
    )
    outs = []
    for sub in ("a", "b"):
        assert main(["simulate", "--input", str(cfg), "--out", str(tmp_path / sub)]) == 0
        outs.append(((tmp_path / sub / "sim_trajectories.csv").read_bytes(), (tmp_path / sub / "sim_summary.json").read_bytes()))
    assert outs[0] == outs[1]
    header = outs[0][0].decode().splitlines()[0]
    assert header == "replica,eps,kind,t,pairing"
    assert main(["simulate", "--input", str(cfg), "--out", str(tmp_path / "c"), "--seed", "4"]) == 0
    assert (tmp_path / "c" / "sim_summary.json").read_bytes() != outs[0][1]


def test_bad_epsilon_ladder(tmp_path):
    assert run(tmp_path, "toy-dist", "--input", "toy_dist.json", "--epsilon-ladder", "0.1,2") == 1


def test_serialisation_precision():
    from fractions import Fraction

    assert dumps(0.1) == "0.10000000000000001"
    assert dumps(Fraction(-1, 2)) == '"-1/2"'
    assert dumps({"a": [1, 2.5]}) == '{\n  "a": [1, 2.5]\n}'
