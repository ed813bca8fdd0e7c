import json
import subprocess
import sys

import pytest

from dtmlab.cli import execute, main
from dtmlab.report import dumps
from dtmlab.topology import grid1d

LAM1 = {"space": {"kind": "discrete", "size": [3]},
        "function": {"flavor": "cell_sum", "weights": {"a": 2, "b": -3, "c": 1}}}


def write(tmp_path, cfg, name="cfg.json"):
    p = tmp_path / name
    p.write_text(json.dumps(cfg))
    return str(p)


def test_lemma_suite_task(tmp_path):
    cfg = dict(LAM1, tasks=["identities"])
    out = tmp_path / "out"
    assert main(["run", write(tmp_path, cfg), "--out", str(out)]) == 0
    rep = json.loads((out / "report.json").read_text())
    inner = rep["data"]["reports"]["lambda/identities"]
    assert inner["passed"] and len(inner["checks"]) == 11


def test_full_task_list_writes_tables(tmp_path):
    cfg = dict(LAM1, tasks=["variations", "axioms", "extension", "minimality", "regularity",
                            "classify", "constructions", "resolution"], seed=4, trials=5)
    out = tmp_path / "out"
    assert main(["run", write(tmp_path, cfg), "--out", str(out)]) == 0
    names = sorted(p.name for p in out.iterdir())
    assert names == ["lambda_dtm.csv", "lambda_measure.csv", "lambda_outer.csv",
                     "lambda_plus.csv", "report.json"]
    head = (out / "lambda_plus.csv").read_text().splitlines()[0]
    assert head == "region_key,value_num,value_den,value_inf_flag"


def test_additivity_violation_exits_one(tmp_path, capsys):
    cfg = {"space": {"kind": "discrete", "size": [2]},
           "function": {"flavor": "table", "entries": [[[], 0], [["a"], 0], [["b"], 0],
                                                        [["a", "b"], 1]]},
           "tasks": ["axioms"]}
    assert main(["run", write(tmp_path, cfg)]) == 1
    rep = json.loads(capsys.readouterr().out)
    checks = rep["data"]["reports"]["lambda/axioms"]["data"]["reports"][0]["checks"]
    assert checks[0]["witnesses"]


@pytest.mark.parametrize("cfg", [
    {"tasks": []},
    {"tasks": ["bogus"]},
    dict(LAM1, tasks=["minimality"]),
    dict(LAM1, tasks=["identities"], refine=3),
    {"tasks": ["identities"]},
])
def test_bad_configs_exit_two(tmp_path, cfg):
    assert main(["run", write(tmp_path, cfg)]) == 2


def test_unreadable_config_exits_two(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert main(["run", str(bad)]) == 2


def test_capacity_error_reports_count(tmp_path, capsys):
    cfg = {"space": {"kind": "grid2d", "size": [3, 3]},
           "function": {"flavor": "cell_sum", "weights": {}}, "tasks": ["identities"]}
    assert main(["run", write(tmp_path, cfg)]) == 2
    assert "offending count" in capsys.readouterr().err


def test_shorthands_with_items(tmp_path):
    assert main(["classify", "--item", "solid_indicator", "--out", str(tmp_path / "a")]) == 0
    assert main(["check", "--item", "point_counting", "--out", str(tmp_path / "b")]) == 0
    assert main(["construct", "--item", "overlap_gadget", "--out", str(tmp_path / "c")]) == 0
    assert main(["classify"]) == 2


def test_refine_option(tmp_path):
    cfg = {"space": {"kind": "grid1d", "size": [2]},
           "function": {"flavor": "solid_indicator", "D": ["v0", "e01", "v1"]},
           "tasks": ["variations"]}
    out = tmp_path / "r"
    assert main(["run", write(tmp_path, cfg), "--refine", "1", "--out", str(out)]) == 0
    rep = json.loads((out / "report.json").read_text())
    assert rep["data"]["refine"] == 1
    rows = (out / "lambda_plus.csv").read_text().strip().splitlines()[1:]
    assert len(rows) == len(grid1d(4).admissible_sets())


def test_execute_is_deterministic():
    cfg = dict(LAM1, tasks=["minimality", "classify"], seed=9, trials=5)
    a, fa = execute(dict(cfg))
    b, fb = execute(dict(cfg))
    assert dumps(a) == dumps(b) and fa == fb


def test_gallery_subset_and_list(capsys):
    assert main(["gallery", "--item", "point_counting", "--no-constructions", "--seed", "2"]) == 0
    rep = json.loads(capsys.readouterr().out)
    items = rep["data"]["reports"]["gallery"]["data"]["items"]
    assert items[0]["expected"] == items[0]["computed"]
    assert main(["list"]) == 0
    assert "solid_indicator" in capsys.readouterr().out


def test_console_module_entry(tmp_path):
    cfg = write(tmp_path, dict(LAM1, tasks=["variations"]))
    proc = subprocess.run([sys.executable, "-m", "dtmlab.cli", "run", cfg],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["passed"] is True


def test_legacy_task_name_is_accepted():
    rep, _ = execute(dict(LAM1, tasks=["lemma23"]))
    assert rep.passed and rep.checks[0].name == "lambda/identities"
