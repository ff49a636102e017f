import json

import numpy as np
import pytest

from unilateral.cli import main
from unilateral.io import InputFormatError, load_system, parse_system, round_sig, to_dot


def run(argv, capsys):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


def write(tmp_path, name, doc):
    p = tmp_path / name
    p.write_text(doc if isinstance(doc, str) else json.dumps(doc))
    return p


def test_analyze_sample(sample_file, capsys):
    code, out, _ = run(["analyze", sample_file], capsys)
    assert code == 0
    rep = json.loads(out)
    assert rep["cone"]["lineality_dim"] == 5
    assert rep["subset"]["controllable_subset"] == [1, 2, 3, 4, 5, 6]
    assert rep["spectrum"]["block_sizes"] == [1] * 7
    assert rep["header"]["tolerances"] == {"eig": 1e-8, "zero": 1e-9, "lp": 1e-7}
    assert len(rep["Q"]["columns"]) == 2
    assert {"block", "level", "case", "part", "kind", "vector"} <= set(rep["cone"]["generators"][0])


def test_report_roundtrip(sample_file, tmp_path, capsys):
    first = tmp_path / "a.json"
    second = tmp_path / "b.json"
    assert run(["analyze", sample_file, "-o", first], capsys)[0] == 0
    assert run(["analyze", first, "-o", second], capsys)[0] == 0
    assert first.read_text() == second.read_text()
    original = json.loads(sample_file.read_text())
    assert json.loads(first.read_text())["input"]["A"] == original["A"]


@pytest.mark.parametrize("B, Vs", [([{"node": 1, "sign": 1}], []),
                                   ([{"node": 1, "sign": 1}, {"node": 1, "sign": -1}], [1])])
def test_scalar_analyze(tmp_path, capsys, B, Vs):
    p = write(tmp_path, "s.json", {"A": [[0]], "B": B})
    code, out, _ = run(["analyze", p], capsys)
    assert code == 0
    rep = json.loads(out)
    assert rep["subset"]["controllable_subset"] == Vs
    if len(B) == 1:
        assert len(rep["cone"]["generators"]) == 1 and rep["cone"]["generators"][0]["kind"] == "ray"


def test_place_with_override_and_dot(sample_file, tmp_path, capsys):
    dot = tmp_path / "g.dot"
    code, out, _ = run(["place", sample_file, "--override=-e6,-e2", "--dot", dot], capsys)
    assert code == 0
    rep = json.loads(out)
    assert rep["placement"]["B_text"] == "-e6,-e2"
    assert rep["subset"]["controllable_subset"] == [1, 2, 3, 4, 5, 6]
    assert [t["k"] for t in rep["placement"]["trace"]] == [1, 2]
    text = dot.read_text()
    assert 'v6 [label="6", style=filled, fillcolor=red' in text
    assert "v7 -> v3" in text


def test_place_full_lineality(tmp_path, capsys):
    p = write(tmp_path, "d.json", {"A": [[1, 0], [0, 2]]})
    code, out, _ = run(["place", p, "-m", 4], capsys)
    assert code == 0 and json.loads(out)["subset"]["controllable_subset"] == [1, 2]


def test_place_rejects_zero_budget(sample_file, capsys):
    code, _, err = run(["place", sample_file, "-m", 0], capsys)
    assert code == 2 and "budget" in err


def test_verify_trivial(tmp_path, capsys):
    p = write(tmp_path, "s.json", {"A": [[0]], "B": [{"node": 1, "sign": 1}]})
    code, out, _ = run(["verify", p, "--samples", 20, "--subsets"], capsys)
    rep = json.loads(out)
    assert code == 0 and rep["agreement"]["fraction"] == 1.0 and rep["passed"]


def test_verify_below_threshold_exits_one(tmp_path, capsys):
    p = write(tmp_path, "s.json", {"A": [[2, -1], [-2, 0]], "B": [{"node": 1, "sign": 1}]})
    code, out, _ = run(["verify", p, "--samples", 40, "--threshold", 0.99], capsys)
    assert code == 1 and not json.loads(out)["passed"]


@pytest.mark.parametrize("content", ['{"A": [[1, 2], [3]]}', "{not json", '{"A": [[1]], "B": [{"node": 2, "sign": 1}]}',
                                     '{"A": [[1]], "B": [{"node": 1, "sign": 0}]}', '{"B": []}'])
def test_malformed_input_exits_two(tmp_path, capsys, content):
    p = write(tmp_path, "bad.json", content)
    code, _, err = run(["analyze", p], capsys)
    assert code == 2 and "error" in err


def test_missing_inputs_exit_two(tmp_path, capsys):
    p = write(tmp_path, "a.json", {"A": [[1]]})
    assert run(["analyze", p], capsys)[0] == 2
    assert run(["analyze", p, "--inputs", "e1"], capsys)[0] == 0


def test_analysis_failure_exits_one(tmp_path, capsys):
    p = write(tmp_path, "big.json", {"A": [[800]], "B": [{"node": 1, "sign": 1}]})
    code, _, err = run(["verify", p, "--horizon", "4", "--samples", 2], capsys)
    assert code == 1 and "horizon" in err


def test_csv_input(tmp_path, capsys):
    p = write(tmp_path, "a.csv", "# comment\n1,0\n0,2\n")
    system = load_system(p)
    assert system.A.shape == (2, 2) and system.B is None
    code, out, _ = run(["analyze", p, "--inputs", "e1,-e1"], capsys)
    assert code == 0 and json.loads(out)["subset"]["controllable_subset"] == [1]
    bad = write(tmp_path, "b.csv", "1,x\n0,2\n")
    with pytest.raises(InputFormatError, match="line 1"):
        load_system(bad)


def test_parse_errors_name_the_field():
    with pytest.raises(InputFormatError, match="'A'"):
        parse_system({"A": [[1, "x"]]})
    with pytest.raises(InputFormatError, match="'B'"):
        parse_system({"A": [[1]], "B": "e5"})
    with pytest.raises(InputFormatError, match="'m'"):
        parse_system({"A": [[1]], "m": 1.5})


def test_round_sig():
    assert round_sig(1 / 3) == float("0.333333333333")
    assert round_sig(0.0) == 0.0


def test_dot_edges():
    text = to_dot(np.array([[0, 0], [3, 0]]), drivers=[1], controllable=[2])
    assert "v1 -> v2" in text and "v2 -> v1" not in text
    assert "doublecircle" in text and "fillcolor=red" in text
