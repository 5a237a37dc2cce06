import json
import shutil
import subprocess

import pytest

from seeds import seeded_violations
from sliceiso.cli import main
from sliceiso.fixtures import tiny, tiny_q5
from sliceiso.scenario_io import dumps_scenario, scenario_to_dict


@pytest.fixture
def files(tmp_path):
    paths = {}
    for name, sc in {"tiny": tiny(), "q5": tiny_q5(), "eq3": seeded_violations()["Eq3"]}.items():
        paths[name] = tmp_path / f"{name}.json"
        paths[name].write_text(dumps_scenario(sc))
    doc = scenario_to_dict(tiny())
    del doc["pairs"][0]["costs"]
    paths["nocosts"] = tmp_path / "nocosts.json"
    paths["nocosts"].write_text(json.dumps(doc))
    paths["garbled"] = tmp_path / "garbled.json"
    paths["garbled"].write_text('{"slices": [\n  {"id": 1,, }\n]}')
    paths["dir"] = tmp_path
    return paths


def test_validate(files, capsys):
    assert main(["validate", str(files["tiny"])]) == 0
    assert main(["validate", str(files["eq3"])]) == 2
    assert "Eq3" in capsys.readouterr().out
    assert main(["validate", str(files["nocosts"])]) == 2
    assert "STRUCT" in capsys.readouterr().out
    assert main(["validate", str(files["garbled"])]) == 2
    assert "line 2" in capsys.readouterr().out
    assert main(["validate", str(files["dir"] / "missing.json")]) == 2


def test_solve_both_methods_identical(files, capsys):
    out_e, out_b = files["dir"] / "e.json", files["dir"] / "b.json"
    assert main(["solve", str(files["tiny"]), "--method", "exhaustive", "--out", str(out_e)]) == 0
    assert main(["solve", str(files["tiny"]), "--method", "bnb", "--out", str(out_b)]) == 0
    assert out_e.read_bytes() == out_b.read_bytes()
    plan = json.loads(out_e.read_text())
    assert plan["objective"] == 7.0
    layers = plan["slices"][0]["layers"]
    assert [(l["isolation_level"], l["tenant_control"], l["virtualized"]) for l in layers] == [(1, 0.4, 1), (2, 0.8, 1)]
    assert "objective: 7" in capsys.readouterr().out


def test_solve_infeasible_explains(files, capsys):
    assert main(["solve", str(files["q5"]), "--out", str(files["dir"] / "q5.plan")]) == 3
    out = capsys.readouterr().out
    assert "qos unsatisfiable" in out and "max q=4" in out


def test_solve_rejects_invalid(files, capsys):
    assert main(["solve", str(files["eq3"])]) == 2
    assert "Eq3" in capsys.readouterr().err


def test_solve_limit(files, capsys):
    out = files["dir"] / "lim.json"
    assert main(["solve", str(files["tiny"]), "--method", "bnb", "--node-limit", "1", "--out", str(out)]) == 4
    plan = json.loads(out.read_text())
    assert plan["status"] == "LIMIT" and plan["objective"] == 8.0 and plan["gap"] > 0
    assert "gap" in capsys.readouterr().out


def test_sweep_and_frontier(files, capsys):
    out = files["dir"] / "sweep.csv"
    assert main(["sweep", str(files["tiny"]), "--dim", "isolation_floor", "--slice", "1", "--out", str(out)]) == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "forced_value,optimal_cost,q,s,tenant_control_sum,mno_control_sum,feasible"
    assert lines[2].startswith("2.0,8.0,")
    fr = files["dir"] / "front.csv"
    assert main(["sweep", str(files["tiny"]), "--dim", "frontier", "--slice", "1", "--out", str(fr)]) == 0
    assert "1,7.0,2.7," in fr.read_text()
    bad = ["sweep", str(files["tiny"]), "--dim", "tenant_control_floor", "--slice", "1", "--values", "0.5"]
    assert main(bad) == 2
    assert main(["sweep", str(files["tiny"]), "--dim", "frontier", "--slice", "4"]) == 2
    assert main(["sweep", str(files["tiny"]), "--dim", "isolation_floor", "--slice", "1", "--values", "x"]) == 2


def test_report_and_presets(files, capsys):
    plan = files["dir"] / "p.json"
    main(["solve", str(files["tiny"]), "--out", str(plan)])
    capsys.readouterr()
    assert main(["report", str(files["tiny"]), "--plan", str(plan), "--format", "text"]) == 0
    assert "Layer VIII" in capsys.readouterr().out
    assert main(["report", str(files["tiny"]), "--plan", str(plan)]) == 0
    assert json.loads(capsys.readouterr().out)["decisions"]
    assert main(["report", str(files["tiny"]), "--plan", str(files["garbled"])]) == 2
    assert main(["presets"]) == 0
    assert "URLLC" in capsys.readouterr().out


def test_lp_dump(files, capsys):
    assert main(["lp", str(files["tiny"]), "--slice", "1"]) == 0
    assert "Subject To" in capsys.readouterr().out
    assert main(["lp", str(files["tiny"]), "--slice", "2"]) == 2


@pytest.mark.skipif(shutil.which("sliceiso") is None, reason="console script not installed")
def test_console_script(files):
    r = subprocess.run(["sliceiso", "solve", str(files["q5"])], capture_output=True, text=True)
    assert r.returncode == 3
    assert '"INFEASIBLE"' in r.stdout
