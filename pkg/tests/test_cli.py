import json

import pytest

from sftpij import cli, core
from sftpij.joining import make_bernoulli_rule, make_periodic_rule, make_projection_rule


@pytest.fixture
def files(tmp_path):
    def put(name, data):
        path = tmp_path / name
        path.write_text(json.dumps(data))
        return str(path)

    return {
        "triangle": put("triangle.json", {"alphabet": ["0", "1", "2"],
                                          "matrix": [[0, 1, 1], [1, 0, 1], [1, 1, 0]]}),
        "sqrt2": put("sqrt2.json", {"alphabet": ["0", "1", "2", "3"],
                                    "matrix": [[0, 0, 1, 0], [0, 0, 0, 1], [1, 1, 0, 0], [1, 1, 0, 0]]}),
        "full2": put("full2.json", core.full_shift(2).to_json()),
        "cycle3": put("cycle3.json", core.cycle_matrix(3).to_json()),
        "xor": put("xor.json", make_bernoulli_rule(2).to_json()),
        "periodic": put("periodic.json", make_periodic_rule(3).to_json()),
        "proj": put("proj.json", make_projection_rule(core.full_shift(2)).to_json()),
        "cfg": put("cfg.json", {"F": 2, "Fp": 2, "C": [[0, 0], [1, 1]]}),
        "bad": put("bad.json", {"alphabet": ["0"], "matrix": [[2]]}),
        "tmp": tmp_path,
    }


def run(argv, capsys):
    code = cli.main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_analyze_triangle(files, capsys):
    code, out, _ = run(["analyze", files["triangle"], "--json"], capsys)
    data = json.loads(out)
    assert code == 3
    assert data["irreducible"] and data["period"] == 1 and data["uniform"] == 2
    assert data["perron"]["value"] == 2 and data["report"]["verdict"] == "excluded"
    div = next(c for c in data["report"]["checks"] if c["name"] == "divisibility")
    assert div["status"] == "fail" and div["witness"]["prime"] == 3


def test_analyze_full2_and_sqrt2(files, capsys):
    assert run(["analyze", files["full2"]], capsys)[0] == 0
    code, out, _ = run(["analyze", files["sqrt2"], "--json"], capsys)
    data = json.loads(out)
    assert code == 0 and data["period"] == 2 and data["perron"]["kind"] == "bracket"
    assert data["perron"]["factor_str"] == "X^2 - 2"


def test_analyze_text(files, capsys):
    code, out, _ = run(["analyze", files["triangle"]], capsys)
    assert "verdict: excluded" in out and "X^3 - 3X - 2" in out


def test_verify_exit_codes(files, capsys):
    assert run(["verify", "--matrix", files["full2"], "--rule", files["xor"], "--depth", "6"], capsys)[0] == 0
    assert run(["verify", "--matrix", files["cycle3"], "--rule", files["periodic"], "--depth", "6"],
               capsys)[0] == 0
    code, out, _ = run(["verify", "--matrix", files["full2"], "--rule", files["proj"], "--depth", "1",
                        "--json"], capsys)
    data = json.loads(out)
    assert code == 3 and data["overall"] == "refuted-at-1"
    assert data["witness"]["joint"] == "1/2" and data["witness"]["product"] == "1/4"


def test_verify_with_exported_measure(files, capsys):
    code, out, _ = run(["measure", "--matrix", files["full2"], "--json"], capsys)
    mpath = files["tmp"] / "mu.json"
    mpath.write_text(out)
    assert json.loads(out)["stationary"] == ["1/2", "1/2"]
    assert run(["verify", "--measure", str(mpath), "--rule", files["xor"], "--depth", "3"], capsys)[0] == 0


def test_search_and_pij_star(files, capsys):
    code, out, _ = run(["search", "--matrix", files["full2"], "--p", "0", "--depth", "4", "--json"], capsys)
    assert code == 0 and json.loads(out)["count"] == 2
    code, out, _ = run(["pij-star", "--rule", files["xor"], "--q-max", "1", "--json"], capsys)
    assert code == 0 and json.loads(out)["q"] == 0


def test_ind_commands(files, capsys):
    code, out, _ = run(["ind", "solve", "--config", files["cfg"], "--json"], capsys)
    assert code == 0 and json.loads(out)["solution"]["value"] == "1/2"
    code, out, _ = run(["ind", "value", "--config", files["cfg"]], capsys)
    assert out.strip() == "1/2"
    code, out, _ = run(["ind", "check-lemma", "--config", files["cfg"], "--trials", "3", "--json"], capsys)
    assert code == 0 and json.loads(out)["all_equal"]


def test_gallery_commands(capsys):
    code, out, _ = run(["gallery", "triangle"], capsys)
    assert code == 0 and "expected excluded, observed excluded" in out
    code, out, _ = run(["gallery", "ashley"], capsys)
    assert code == 0 and "matrix externally sourced" in out
    assert run(["gallery", "nope"], capsys)[0] == 2
    assert run(["gallery"], capsys)[0] == 2


def test_input_errors(files, capsys):
    assert run(["analyze", files["bad"]], capsys)[0] == 2
    assert run(["analyze", str(files["tmp"] / "missing.json")], capsys)[0] == 2
    assert run(["verify", "--matrix", files["triangle"], "--rule", files["xor"]], capsys)[0] == 2
    assert run(["frobnicate"], capsys)[0] == 2


def test_budget_flag(files, capsys):
    code, _, err = run(["search", "--matrix", files["full2"], "--budget", "2"], capsys)
    assert code == 2 and "budget" in err


def test_json_is_deterministic(files, capsys):
    outs = {run(["analyze", files["sqrt2"], "--json"], capsys)[1] for _ in range(2)}
    assert len(outs) == 1
    outs = {run(["ind", "check-lemma", "--config", files["cfg"], "--json", "--seed", "3"], capsys)[1]
            for _ in range(2)}
    assert len(outs) == 1
