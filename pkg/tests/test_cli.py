import json

import pytest

from finehyp.cli import RunConfig, build_parser, cmd_report, config_from_args, main, run
from finehyp.generators import random_tree
from finehyp.graph import write_graph


def _run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr().out
    return code, out


def test_delta_tree(capsys):
    code, out = _run(["delta", "--gen", "random-tree:20", "--seed", "3"], capsys)
    doc = json.loads(out)
    assert code == 0 and doc["constants"]["delta"] == 0 and doc["constants"]["delta_working"] == 1


def test_delta_from_file(tmp_path, capsys):
    f = tmp_path / "t.json"
    write_graph(random_tree(12, 1), str(f))
    code, out = _run(["delta", "--graph", str(f)], capsys)
    assert code == 0 and json.loads(out)["ok"]


def test_audit_passes_on_cycle(capsys):
    code, out = _run(["audit", "--gen", "cycle:6"], capsys)
    doc = json.loads(out)
    assert code == 0 and all(c["ok"] for c in doc["checks"])


def test_audit_flags_forced_zero_delta(tmp_path, capsys):
    # in K4 every angle is 1, so a zero threshold makes angle forcing fail
    f = tmp_path / "k4.txt"
    f.write_text("0 1\n0 2\n0 3\n1 2\n1 3\n2 3\n")
    code, out = _run(["audit", "--graph", str(f), "--delta", "0"], capsys)
    doc = json.loads(out)
    bad = [c for c in doc["checks"] if not c["ok"]]
    assert code == 1 and bad and bad[0]["witness"] is not None


def test_disconnected_is_usage_error(tmp_path, capsys):
    f = tmp_path / "d.txt"
    f.write_text("0 1\n2 3\n")
    code, out = _run(["delta", "--graph", str(f)], capsys)
    assert code == 2 and json.loads(out)["kind"] == "usage"


def test_missing_file(tmp_path, capsys):
    code, _ = _run(["delta", "--graph", str(tmp_path / "nope.txt")], capsys)
    assert code == 2


def test_budget_exceeded(capsys):
    code, out = _run(["verify", "--gen", "Z*Z", "--radius", "5", "--budget-vertices", "50"], capsys)
    assert code == 2 and json.loads(out)["kind"] == "budget"


def test_both_sources_rejected():
    with pytest.raises(SystemExit):
        build_parser().parse_args(["delta", "--gen", "cycle:5", "--graph", "x"])
    code, _ = run(RunConfig(command="delta"))
    assert code == 2


def test_verify_coned_off(capsys):
    code, out = _run(["verify", "--gen", "Z2*Z3", "--radius", "3", "--max-n", "2"], capsys)
    doc = json.loads(out)
    assert code == 0, [c for c in doc["checks"] if not c["ok"]]
    assert "growth" in doc["tables"] and "basepoint" in doc["tables"]


def test_verify_tree_with_oracle(capsys):
    argv = ["verify", "--gen", "random-tree:25", "--tree-oracle", "--max-n", "4", "--displacement", "3"]
    code, out = _run(argv, capsys)
    doc = json.loads(out)
    names = {c["name"] for c in doc["checks"]}
    assert code == 0 and {"tree_oracle_agreement", "tree_supports"} <= names


def test_csv_output(tmp_path):
    out = tmp_path / "r.csv"
    code = main(["verify", "--gen", "tree:3", "--radius", "3", "--format", "csv", "--out", str(out)])
    text = out.read_text()
    assert code == 0 and text.endswith("\n") and "\r" not in text
    assert text.splitlines()[0].split(",")[0] in ("table", "x_prime", "check", "fixture")


def test_config_round_trip():
    cfg = config_from_args(["verify", "--gen", "Z*Z", "--radius", "4", "--seed", "7", "--ordered"])
    assert cfg.radius == 4 and cfg.seed == 7 and cfg.ordered and cfg.gen == "Z*Z"


def test_report_deterministic_small():
    cfg = RunConfig(command="report", gen="cycle:5", seed=4)
    a = cmd_report(cfg).dumps("json")
    b = cmd_report(cfg).dumps("json")
    assert a == b and json.loads(a)["ok"]
