import json
import shutil
import subprocess
import sys
from pathlib import Path

import pytest

from bethekit import InvalidInputError
from bethekit.cli import main
from bethekit.run import ConfigError, preset_fm, run, validate_config

CONFIGS = Path(__file__).resolve().parents[1] / "demos" / "configs"


def _run(argv, capsys):
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def test_six_vertex_verify(capsys):
    code, out, err = _run(["verify", str(CONFIGS / "six_vertex_n2.json")], capsys)
    assert code == 0 and err.startswith("PASS")
    (inst,) = json.loads(out)["instances"]
    assert len(inst["solutions"]) == 2
    roots = sorted(complex(*s["roots"][0]).real for s in inst["solutions"])
    assert roots == pytest.approx([-1, 1], abs=1e-12)
    for s in inst["solutions"]:
        assert all(r["normalized"] <= 1e-8 for r in s["identities"])
        (rule,) = s["sumrules"]
        assert rule["applicable"] and abs(complex(*rule["defect"])) <= 1e-10
    assert inst["count"]["match"]


def test_empty_sector_config(capsys):
    code, out, _ = _run(["verify", str(CONFIGS / "empty_sector.json")], capsys)
    assert code == 0
    (inst,) = json.loads(out)["instances"]
    (sol,) = inst["solutions"]
    assert sol["roots"] == []
    assert all(r["value"] == [0.0, 0.0] for r in sol["identities"])


def test_bad_tolerances_exit_2(capsys):
    code, out, err = _run(["verify", str(CONFIGS / "bad_tolerances.json")], capsys)
    assert code == 2 and out == ""
    assert "solver.newton_tol" in err


def test_json_syntax_error_reports_position(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text('{"family": "xxx",\n "k": }\n')
    code, _, err = _run(["solve", str(bad)], capsys)
    assert code == 2 and "line 2" in err and "col" in err


def test_schema_errors_name_the_field():
    with pytest.raises(ConfigError) as info:
        validate_config({"family": "xxx", "two_ell": [1], "z": [[0, 0]], "mu": [0, 0],
                         "k": 1, "tasks": ["identities"]})
    assert any("tasks" in where for where, _ in info.value.problems)
    with pytest.raises(ConfigError):
        validate_config({"family": "xxz", "two_ell": [1], "z": [[1, 0]], "mu": [0, 0],
                         "k": 1, "tasks": ["solve"]})   # gamma missing


def test_preset_fm():
    with pytest.raises(InvalidInputError):
        preset_fm(1)
    with pytest.raises(InvalidInputError):
        preset_fm(3)
    doc = preset_fm(2)
    assert [inst["sumrule_ms"] for inst in doc["instances"]] == [[1], [0]]


def test_reproduce_fm_n2(capsys):
    code, out, _ = _run(["reproduce-fm", "--n", "2"], capsys)
    assert code == 0
    k1 = json.loads(out)["instances"][1]
    assert k1["count"]["expected"] == 2


def test_reproduce_fm_n4_report(tmp_path, capsys):
    dest = tmp_path / "fm4.json"
    code, out, err = _run(["reproduce-fm", "--n", "4", "--out", str(dest)], capsys)
    assert out == ""
    report = json.loads(dest.read_text())
    k2 = report["instances"][2]
    assert k2["count"]["expected"] == 6
    # the only failures are lemma items on the all-zero root set
    assert code == 1
    for f in report["summary"]["failures"]:
        assert f["check"] == "lemma" and f["detail"].get("zero_root")


def test_quiet_suppresses_summary(capsys):
    code, out, err = _run(["--quiet", "count", str(CONFIGS / "six_vertex_n2.json")], capsys)
    assert code == 0 and err == "" and out
    report = json.loads(out)
    assert report["header"]["command"] == "count"
    assert "identities" not in report["instances"][0]["solutions"][0]


def test_report_is_deterministic():
    doc = json.loads((CONFIGS / "xxx_generic.json").read_text())
    a = json.dumps(run(doc, command="verify"))
    b = json.dumps(run(doc, command="verify"))
    assert a == b


@pytest.mark.skipif(shutil.which("bethekit") is None, reason="console script not installed")
def test_console_script():
    proc = subprocess.run(["bethekit", "--quiet", "solve", str(CONFIGS / "six_vertex_n2.json")],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["summary"]["passed"]


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "bethekit.cli", "--quiet", "solve",
                           str(CONFIGS / "empty_sector.json")], capture_output=True, text=True)
    assert proc.returncode == 0
