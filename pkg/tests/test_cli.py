import json

import pytest

from seqspace.cli import main


def run(capsys, *argv):
    rc = main(list(argv))
    out, err = capsys.readouterr()
    return rc, out, err


def test_transform_text(capsys):
    rc, out, _ = run(capsys, "transform", "--matrix", "omega",
                     "--seq", "const:1", "--n", "4")
    assert rc == 0
    assert out.splitlines() == ["1\t1", "2\t3", "3\t6", "4\t10"]


def test_transform_json(capsys):
    rc, out, _ = run(capsys, "transform", "--matrix", "gamma",
                     "--seq", "const:1", "--n", "3", "--json")
    assert rc == 0
    doc = json.loads(out)
    assert doc["command"] == "transform"
    assert doc["values"] == ["1", "3/2", "11/6"]
    assert doc["mode"] == "exact"
    assert "version" in doc


def test_transform_float_mode(capsys):
    rc, out, _ = run(capsys, "transform", "--matrix", "cesaro",
                     "--seq", "const:1", "--n", "3", "--mode", "float", "--json")
    assert rc == 0
    assert json.loads(out)["values"] == [1.0, 1.0, 1.0]


def test_check_class_exit_codes(capsys):
    assert run(capsys, "check-class", "--matrix", "cesaro",
               "--from", "c0", "--to", "c")[0] == 0
    assert run(capsys, "check-class", "--matrix", "gamma",
               "--from", "c0", "--to", "linf")[0] == 1
    assert run(capsys, "check-class", "--matrix", "omega-inv",
               "--from", "bs", "--to", "c0")[0] == 2


def test_check_class_json_both_routes(capsys):
    rc, out, _ = run(capsys, "check-class", "--matrix", "cesaro",
                     "--from", "c0", "--to", "c", "--route", "both", "--json")
    assert rc == 0
    doc = json.loads(out)
    assert doc["verdict"] == "satisfied"
    assert doc["routes_agree"] is True
    assert doc["oracle"]["verdict"] == "satisfied"
    assert [c["condition"] for c in doc["conditions"]] == \
        ["bounded-rows", "columns-converge"]


def test_dual_exit_codes(capsys):
    rc, out, _ = run(capsys, "dual", "--space", "c0(omega)", "--a", "power:1")
    assert rc == 0
    assert "satisfied" in out
    assert run(capsys, "dual", "--space", "c0(omega)", "--a", "power:2")[0] == 1
    rc, out, _ = run(capsys, "dual", "--space", "c0(gamma)", "--a", "power:-1",
                     "--json")
    assert rc == 0
    assert json.loads(out)["verdict"] == "satisfied"


def test_regularity(capsys):
    rc, out, _ = run(capsys, "regularity", "--matrix", "cesaro", "--json")
    assert rc == 0
    doc = json.loads(out)
    assert doc["verdict"] == "satisfied"
    assert doc["row_sums"]["limit"] == pytest.approx(1.0, abs=1e-9)
    assert run(capsys, "regularity", "--matrix", "omega")[0] == 1


def test_basis(capsys):
    rc, out, _ = run(capsys, "basis", "--matrix", "omega", "--k", "2", "--json")
    assert rc == 0
    doc = json.loads(out)
    assert doc["entries"] == {"2": "1/2", "3": "-1/3"}
    assert doc["closed_form_route"] is True
    assert doc["route_delta"] == 0.0


def test_errors_exit_3(capsys):
    rc, _, err = run(capsys, "transform", "--matrix", "nope",
                     "--seq", "const:1", "--n", "2")
    assert rc == 3
    assert "error:" in err
    with pytest.raises(SystemExit) as exc:
        main(["no-such-command"])
    assert exc.value.code == 3


def test_json_output_is_deterministic(capsys):
    argv = ["check-class", "--matrix", "euler:1/2", "--from", "c0", "--to", "c",
            "--route", "both", "--seed", "7", "--json"]
    runs = []
    for _ in range(3):
        assert main(list(argv)) == 0
        runs.append(capsys.readouterr().out)
    assert runs[0] == runs[1] == runs[2]
