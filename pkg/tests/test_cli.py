import json
import os

import pytest

from src.cli.main import main
from src.cli.schema import describe


def _run(capsys, *argv):
    code = main(list(argv))
    return code, capsys.readouterr().out


def _write_doc(tmp_path, doc, name="input.json") -> str:
    path = tmp_path / name
    path.write_text(json.dumps(doc), encoding="utf-8")
    return str(path)


def test_run_prints_the_trace(capsys, fixture_file, tmp_path):
    code, out = _run(capsys, "run", "--input", fixture_file("ex_toric2"), "--out", str(tmp_path))
    assert code == 0
    doc = json.loads(out)
    assert doc["schema_version"] == "1.0"
    assert doc["classes"] == ["[0,1/2)", "{1/2}", "(1/2,3/2)", "[3/2,2)", "{2}"]
    assert [s["kind"] for s in doc["steps"]] == ["flip", "divisorial", "mori_fibration"]
    assert doc["steps"][1]["dropped_rows"] == ["x2"]
    assert doc["picard_sequence"] == [3, 3, 2]
    assert doc["terminal"]["fiber"]["weights"] == [2, 1, 1]
    assert os.path.exists(tmp_path / "trace.json")


def test_run_as_text(capsys, fixture_file):
    code, out = _run(capsys, "run", "--input", fixture_file("ex_horo4"), "--format", "text")
    assert code == 0
    assert "kind: flip" in out
    assert "kind: mori_fibration" in out
    assert "picard_sequence: [2, 2]" in out


def test_classes(capsys, fixture_file):
    code, out = _run(capsys, "classes", "--input", fixture_file("ex_toric1"))
    assert code == 0
    doc = json.loads(out)
    assert doc["classes"] == ["[0,1)", "[1,2)", "{2}"]
    assert doc["eps_max"] == "2"
    assert doc["hops"][0] == {"epsilon": "1", "case": "full_dim", "dropped_rows": ["x2"]}


def test_classes_to_the_left(capsys, fixture_file):
    code, out = _run(capsys, "classes", "--input", fixture_file("ex_horo3"), "--direction", "left")
    assert code == 0
    doc = json.loads(out)
    assert doc["direction"] == "left"
    assert doc["classes"] == ["(-inf,0]"]
    assert doc["eps_max"] is None


def test_oracles_agree_from_the_command_line(capsys, fixture_file):
    code, out = _run(capsys, "classes", "--input", fixture_file("ex_toric2"), "--oracle", "both")
    assert code == 0
    code, out = _run(capsys, "classes", "--input", fixture_file("ex_toric2"), "--oracle", "brute")
    assert code == 0
    assert json.loads(out)["classes"][-1] == "{2}"


def test_check(capsys, fixture_file):
    code, out = _run(capsys, "check", "--input", fixture_file("ex_horo5"))
    assert code == 0
    doc = json.loads(out)
    assert doc["q_gorenstein"] is True
    assert doc["q_factorial"] is False
    assert doc["q_factorial_reason"] == "wall of a2 meets the polytope in dimension 0"
    assert doc["family"]["B_tilde"] == ["-3", "0", "-1", "-1", "-1"]
    assert doc["family"]["K"] == ["a1", "a2"]
    assert doc["genericity"]["q_factorial_generic"] is False


def test_fiber(capsys, fixture_file):
    code, out = _run(capsys, "fiber", "--input", fixture_file("ex_toric2"))
    assert code == 0
    term = json.loads(out)["terminal"]
    assert term["base_dimension"] == 1
    assert term["tight_rows"] == ["x1", "x5", "x6"]
    assert term["fiber"]["is_simplex"] is True


def test_render_writes_frames_and_vertices(capsys, fixture_file, tmp_path):
    code, out = _run(capsys, "render", "--input", fixture_file("ex_horo5"), "--out", str(tmp_path))
    assert code == 0
    doc = json.loads(out)
    assert doc["supported"] is True
    assert len(doc["frames"]) == 4, "one frame per class"
    assert all(os.path.exists(p) for p in doc["frames"])
    with open(doc["csv"], encoding="utf-8") as f:
        header = f.readline().strip()
    assert header == "class,interval,epsilon,vertex,w1,w2"


def test_missing_and_malformed_inputs(capsys, tmp_path, embedding):
    assert main(["run", "--input", str(tmp_path / "nope.json")]) == 2

    bad = tmp_path / "bad.json"
    bad.write_text("{", encoding="utf-8")
    assert main(["run", "--input", str(bad)]) == 2

    doc = describe(embedding("ex_horo4"))
    doc["extra"] = 1
    assert main(["run", "--input", _write_doc(tmp_path, doc)]) == 2

    with pytest.raises(SystemExit):
        main(["run"])


def test_non_ample_divisor_exits_with_4(tmp_path, embedding):
    doc = describe(embedding("ex_toric1"))
    doc["divisor"]["g_stable"][1] = "100"
    assert main(["run", "--input", _write_doc(tmp_path, doc)]) == 4

    doc["divisor"]["g_stable"][1] = "5"
    doc["divisor"]["g_stable"][0] = "-10"
    assert main(["run", "--input", _write_doc(tmp_path, doc, "empty.json")]) == 4


def test_invariant_failures_exit_with_3(tmp_path, embedding, trace):
    Y = trace("ex_toric2").varieties[1]
    doc = describe(embedding("ex_toric2"))
    doc["fan"] = [{"generators": [list(r) for r in c.rays], "colors": []} for c in Y.fan.sorted_cones()]
    doc["divisor"]["g_stable"] = ["1/2", "9/2", "7/2", "7/2", "5/2", "5/2"]
    assert main(["run", "--input", _write_doc(tmp_path, doc)]) == 3

    colored = {
        "root_system": {"type": "A", "rank": 2},
        "R": ["alpha"],
        "M_basis": [[0, 1]],
        "rays": [[-1]],
        "fan": [{"generators": [[-1]]}, {"generators": [], "colors": ["alpha"]}],
        "divisor": {"g_stable": ["1"], "colors": {"beta": "1"}},
    }
    assert main(["run", "--input", _write_doc(tmp_path, colored, "colored.json")]) == 3

    assert main(["run", "--input", _write_doc(tmp_path, describe(embedding("ex_horo5")), "x.json"), "--q-factorial"]) == 3


def test_minimal_model_message(capsys, fixture_file, nef_at_start):
    code, out = _run(capsys, "run", "--input", fixture_file("ex_toric2"))
    assert code == 0
    doc = json.loads(out)
    assert doc["message"] == "K nef at 0: no step"
    assert doc["minimal_model"] is True
    assert doc["steps"] == []
    assert doc["classes"] == ["[0,+inf)"]

    code, out = _run(capsys, "fiber", "--input", fixture_file("ex_toric2"))
    assert code == 0
    assert json.loads(out)["message"] == "K nef at 0: no step"
