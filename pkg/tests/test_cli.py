import json
import subprocess
import sys

import pytest

from faultsat.cli import NO_CEX, main
from faultsat.encoder import build_instance
from faultsat.executor import TestInput
from faultsat.maxsat import import_wcnf, solve_pmaxsat
from faultsat.oracles import soft_subset_optimum

from conftest import WORKED

FIG1 = str(WORKED / "fig1.mc")
SQRT = str(WORKED / "squareroot.mc")
STRNCAT = str(WORKED / "strncat.mc")


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_localize_text(capsys):
    code, out, _ = run(capsys, "localize", FIG1, "--test", "index=1", "-k", "2")
    assert code == 0
    lines = out.splitlines()
    assert "CoMSS 1 (cost 1): line 4" in lines
    assert "CoMSS 2 (cost 1): line 1" in lines
    assert lines.index("CoMSS 1 (cost 1): line 4") < lines.index("CoMSS 2 (cost 1): line 1")
    assert lines[-1] == "No more suspects"


def test_check_valid_program(capsys, tmp_path):
    f = tmp_path / "valid.mc"
    f.write_text("input int x;\nassert(x == x);\n")
    code, out, _ = run(capsys, "check", str(f), "--bound", "8")
    assert code == 1 and out.startswith(NO_CEX)


def test_check_finds_counterexample(capsys):
    code, out, _ = run(capsys, "check", FIG1, "--json")
    obj = json.loads(out)
    assert code == 0 and obj["found"] and obj["test"] == {"index": 1} and obj["assertion"]["line"] == 5


def test_export_wcnf_optimum(capsys, tmp_path, fig1):
    path = tmp_path / "fig1.wcnf"
    code, _, _ = run(capsys, "export-wcnf", FIG1, "--test", "index=1", "-k", "2", "-o", str(path))
    assert code == 0
    text = path.read_text()
    soft = [l for l in text.splitlines() if l and l[0].isdigit() and l.split()[0] == "1"]
    assert len(soft) == 4
    back = import_wcnf(path)
    oracle, _ = soft_subset_optimum(back)
    ours = solve_pmaxsat(build_instance(fig1, None, TestInput({"index": 1}))).cost
    assert oracle == ours == 1


def test_repair_cli(capsys):
    args = ["repair", STRNCAT, "-k", "16", "--trusted", "strncat", "--trusted", "memset"]
    code, out, _ = run(capsys, *args, "--off-by-one")
    assert code == 0 and "SIZE -> SIZE-1 (primary)" in out
    code, out, _ = run(capsys, *args, "--json")
    obj = json.loads(out)
    assert obj["candidates"][0]["replacement"] == "SIZE-1" and obj["candidates"][0]["primary"]


def test_repair_nothing_found(capsys, tmp_path):
    f = tmp_path / "n.mc"
    f.write_text("input int x;\nint y = x;\nassert(y != 3);\n")
    code, out, _ = run(capsys, "repair", str(f))
    assert code == 1 and out.startswith("no repair found")


def test_rank_and_run(capsys):
    code, out, _ = run(capsys, "rank", FIG1, "-k", "2", "--json")
    obj = json.loads(out)
    assert code == 0 and [r["line"] for r in obj["ranking"]] == [1, 4]
    code, out, _ = run(capsys, "run", FIG1, "--test", "index=1", "--test", "index=0")
    assert code == 0
    assert out.count("fail(assertion") == 1 and out.count(": pass") == 1


def test_tests_file(capsys, tmp_path):
    f = tmp_path / "t.json"
    f.write_text(json.dumps([{"index": 0}, {"index": 1}]))
    code, out, _ = run(capsys, "run", FIG1, "--tests-file", str(f), "--json")
    assert code == 0 and [r["test"] for r in json.loads(out)] == [{"index": 0}, {"index": 1}]


def test_bound_diagnostic(capsys, tmp_path):
    f = tmp_path / "loop.mc"
    f.write_text("input int x;\nint n = 0;\nwhile (n < x)\n    n = n + 1;\nassert(n != 5);\n")
    code, out, _ = run(capsys, "localize", str(f), "-k", "3", "--test", "x=5")
    assert code == 1 and "raise --bound" in out
    code, out, _ = run(capsys, "localize", str(f), "-k", "6", "--test", "x=5")
    assert code == 0


def test_passing_test_exit_1(capsys):
    code, out, _ = run(capsys, "localize", FIG1, "--test", "index=0")
    assert code == 1 and "does not fail" in out


@pytest.mark.parametrize(
    "argv",
    [
        ["localize", "missing.mc"],
        ["localize", FIG1, "--test", "nope=1"],
        ["check", FIG1, "--trusted", "nosuch"],
    ],
)
def test_input_errors_exit_2(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == 2 and err.startswith("faultsat: error:")


def test_usage_errors_exit_2(capsys):
    for argv in (["frobnicate"], ["check", FIG1, "--width", "7"], ["check", FIG1, "--bound", "0"]):
        with pytest.raises(SystemExit) as e:
            main(argv)
        assert e.value.code == 2
    capsys.readouterr()


def test_json_is_byte_stable(capsys):
    outs = []
    for _ in range(2):
        outs.append(run(capsys, "localize", SQRT, "-k", "50", "--json")[1])
    assert outs[0] == outs[1]


def test_console_script(tmp_path):
    out = tmp_path / "r.json"
    proc = subprocess.run(
        [sys.executable, "-m", "faultsat.cli", "localize", FIG1, "--test", "index=1", "-k", "2", "--json", "-o", str(out)],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0, proc.stderr
    obj = json.loads(out.read_text())
    assert obj["iterations"] == [[{"file": FIG1, "line": 4}], [{"file": FIG1, "line": 1}]]
    assert obj["exhausted"] is True
