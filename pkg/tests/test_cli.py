from __future__ import annotations

import io
import json
import subprocess
import sys
from pathlib import Path

import pytest

from cubind import cli
from cubind.stdlib import read_file

STDLIB = Path(cli.__file__).parent / "stdlib"


def run(*argv: str) -> tuple[int, str]:
    out = io.StringIO()
    code = cli.main(list(argv), out)
    return code, out.getvalue()


def write(tmp_path: Path, text: str) -> str:
    path = tmp_path / "input.cit"
    path.write_text(text, encoding="utf-8")
    return str(path)


def test_check_torus_exits_zero():
    code, out = run("check", str(STDLIB / "torus.cit"))
    assert code == 0
    assert out.splitlines()[0].startswith("ok    data torus")


def test_trace_of_a_loop_endpoint_has_two_lines():
    code, out = run("trace", "-e", "lp(0)")
    assert code == 0
    assert out.splitlines() == ["lp(0)", "base"]


def test_canonicity_suite_exits_zero():
    code, out = run("test", "--suite", "canonicity")
    assert code == 0
    assert out.startswith("ok    test canonicity ~> 200 passed, 0 failed")


def test_unknown_suite_is_a_usage_error():
    assert run("test", "--suite", "nope")[0] == 2


def test_eval_with_a_file():
    assert run("eval", str(STDLIB / "nat.cit"), "-e", "mul 3 4") == (0, "12\n")


def test_observe_at_a_type():
    assert run("observe", str(STDLIB / "nat.cit"), "-e", "add 1 2", "--at", "nat") == (0, "3\n")


def test_observe_refuses_a_higher_type():
    code, out = run("observe", str(STDLIB / "trunc.cit"), "-e", "trpt(3)", "--at", "trunc")
    assert code == 1 and out.startswith("error:")


def test_natrec_trace_needs_the_extension():
    path = str(STDLIB / "natrec_ext.cit")
    code, out = run("trace", path, "-e", "scell(0, 1)")
    assert code == 1 and "requires --ext natrec" in out
    code, out = run("trace", path, "--ext", "natrec", "-e", "scell(0, 1)")
    assert code == 0 and out.splitlines()[-1] == "spt(0)"


def test_json_fields_come_in_a_fixed_order():
    code, out = run("check", "--json", str(STDLIB / "circle.cit"))
    assert code == 0
    for line in out.splitlines():
        keys = list(json.loads(line))
        assert keys[:3] == ["directive", "status", "steps"]
        assert keys[3:] in ([], ["value"], ["value", "trace"])
    assert json.loads(out.splitlines()[2]) == {"directive": "eval lp(0)", "status": "ok", "steps": 1, "value": "base"}


@pytest.mark.parametrize("name", ["nat.cit", "hubspokes.cit", "torus_globular.cit"])
def test_json_reports_are_byte_identical_across_runs(name):
    first = run("check", "--json", str(STDLIB / name))
    second = run("check", "--json", str(STDLIB / name))
    assert first == second


def test_failed_expectation_exits_nonzero(tmp_path):
    code, out = run("check", write(tmp_path, "eval 2 = 3\n"))
    assert code == 1
    assert "FAIL  eval 2: expected 3" in out


def test_check_error_is_reported_with_its_position(tmp_path):
    src = "data bad = pt | lp(x) [x=0 -> pt]\n"
    code, out = run("check", write(tmp_path, src))
    assert code == 1
    assert ":1:1: Validity" in out


def test_parse_error_is_reported_with_line_and_column(tmp_path):
    code, out = run("check", write(tmp_path, "def one : nat = 1\ndata x = | |\n"))
    assert code == 1
    assert "parse error: 2:10:" in out


def test_stuck_evaluation_exits_nonzero(tmp_path):
    code, _ = run("eval", "--fuel", "3", str(STDLIB / "nat.cit"), "-e", "mul 5 5")
    assert code == 1


def test_fuel_from_the_environment(monkeypatch):
    monkeypatch.setenv("CUBIND_FUEL", "3")
    code, out = run("eval", str(STDLIB / "nat.cit"), "-e", "mul 5 5")
    assert code == 1 and "FuelExhausted" in out
    monkeypatch.delenv("CUBIND_FUEL")
    assert run("eval", str(STDLIB / "nat.cit"), "-e", "mul 5 5") == (0, "25\n")


def test_applied_definition_with_a_wrong_argument_is_rejected(tmp_path):
    src = read_file("id_paths.cit") + "eval id_to_path 3 3 (path_to_id 3 2 (<x> 3)) @ 0\n"
    code, out = run("check", "--ext", "paths", write(tmp_path, src))
    assert code == 1
    assert "right endpoint: 3 is not equal to 2" in out.splitlines()[-1]


def test_unchecked_eval_skips_type_checking():
    session = cli.Session()
    session.load(read_file("nat.cit"), run_directives=False)
    out = session.eval_expr(cli.S.parse_expr("add 1 1"), check=False)
    assert out.ok and out.value == "2"


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "cubind", "trace", "-e", "lp(1)"], capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout == "lp(1)\nbase\n"
