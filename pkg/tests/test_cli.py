import json

import pytest

from spherebound.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_series_command(capsys):
    code, out, _ = run(capsys, "series", "EllS", "--order", "16")
    data = json.loads(out)
    assert code == 0 and data["schemaVersion"] == 1
    assert data["series"]["c"][:2] == ["-16", "-64/3"] and data["series"]["e2"][:2] == [1, 3]
    code, out, _ = run(capsys, "series", "Delta", "--order", "8")
    assert json.loads(out)["series"]["c"] == ["1", "-24", "252"]
    code, out, _ = run(capsys, "series", "U", "--order", "8")
    assert json.loads(out)["series"]["c"] == ["1", "8", "24", "32", "24", "48", "96", "64"]


def test_unknown_generator_is_usage_error(capsys):
    code, _, err = run(capsys, "series", "Foo")
    assert code == 1 and "unknown generator" in err


def test_solve_and_round_trip(capsys, tmp_path):
    code, out, _ = run(capsys, "solve", "--dim", "8", "--side", "plus", "--json")
    data = json.loads(out)
    assert code == 0
    coeffs = [int(x) for x in data["candidate"]["coeffs"]]
    assert coeffs in ([1, -2, 0, 1], [-1, 2, 0, -1])
    assert data["candidate"]["labels"][0] == "E2^2*E4^2"
    path = tmp_path / "cand.json"
    path.write_text(out)
    _, direct, _ = run(capsys, "eval", "--dim", "8", "--side", "plus", "--r", "0.5", "1.4142135624")
    _, loaded, _ = run(capsys, "eval", "--candidate-file", str(path), "--r", "0.5", "1.4142135624")
    assert json.loads(direct)["values"] == json.loads(loaded)["values"]
    assert json.loads(direct)["candidateHash"] == data["candidateHash"]


def test_eval_near_root(capsys):
    code, out, _ = run(capsys, "eval", "--dim", "8", "--side", "plus", "--r", "1.4142135624", "--method", "closed")
    assert code == 0 and abs(float(json.loads(out)["values"][0]["value"])) < 1e-8


def test_bound_and_determinism(capsys):
    code, first, _ = run(capsys, "bound", "--dim", "24")
    _, second, _ = run(capsys, "bound", "--dim", "24")
    assert code == 0 and first == second
    assert json.loads(first)["bound"] == "0.00193"


def test_table_csv(capsys):
    code, out, _ = run(capsys, "table", "--dims", "8,16", "--format", "csv", "--annotate", "--no-construct")
    lines = out.strip().splitlines()
    assert code == 0
    assert lines[0].startswith("d,n_plus,n_minus,r0,bound,max_violation")
    assert lines[1].split(",")[4] == "0.2537"


def test_verify_exit_codes(capsys):
    code, out, _ = run(capsys, "verify", "--dim", "8", "--c", "0", "--grid-max", "3", "--grid-step", "0.1")
    assert code == 3 and json.loads(out)["verify"]["violations"] > 0
    code, out, _ = run(capsys, "verify", "--dim", "8", "--c", "7/6", "--grid-max", "3", "--grid-step", "0.1")
    assert code == 0


def test_infeasible_exit_code(capsys):
    code, _, err = run(capsys, "solve", "--dim", "48", "--side", "minus", "--n", "3")
    assert code == 2 and "construction failed" in err


@pytest.mark.parametrize("argv", [["solve", "--side", "plus"], ["verify", "--dim", "8", "--c", "x/y"], ["bogus"]])
def test_usage_errors(capsys, argv):
    assert run(capsys, *argv)[0] == 1
