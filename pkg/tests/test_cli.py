import io
import json
from pathlib import Path

import pytest

from kanca import serialize as ser
from kanca.automaton import Automaton
from kanca.cli import main, parse_window, simulate, UsageError
from kanca.config import PartialConfig
from kanca.group import GroupSpec

from conftest import Z

SAMPLES = Path(__file__).resolve().parent.parent / "samples"


def run(*argv):
    out = io.StringIO()
    code = main(list(argv), out=out)
    return code, out.getvalue()


def sample(name):
    return str(SAMPLES / name)


def test_group_and_element_json():
    assert ser.group_to_json(GroupSpec((2, 0))) == {"moduli": [2, 0]}
    spec = ser.group_from_json({"moduli": [0, 0]})
    assert spec == GroupSpec((0, 0))
    assert ser.element_to_json(ser.element_from_json([1, 0], GroupSpec((2, 0)))) == [1, 0]
    with pytest.raises(ser.ParseError):
        ser.group_from_json({"moduli": [1]})
    with pytest.raises(ser.ParseError):
        ser.element_from_json([1], GroupSpec((2, 0)))


def test_config_json_rejects_duplicates():
    spec = GroupSpec((0, 0))
    c = ser.config_from_json({"entries": [[[0, 3], "1"], [[1, 2], "0"]]}, spec)
    assert len(c) == 2
    with pytest.raises(ser.ParseError, match="duplicate"):
        ser.config_from_json({"entries": [[[0, 3], "1"], [[0, 3], "0"]]}, spec)


def test_parse_error_has_position():
    with pytest.raises(ser.ParseError, match=r"<automaton>:2:\d+"):
        ser.parse_automaton('{"group":\n  {"moduli": [0]')


def test_rule_variants():
    base = '{"group":{"moduli":[0]},"states":["0","1"],"neighborhood":[[-1],[0],[1]],"rule":%s}'
    eca = ser.parse_automaton(base % '{"type":"eca","number":110}')
    assert eca.rule.table[("1", "1", "1")] == "0"
    const = ser.parse_automaton(base % '{"type":"constant","value":"0"}')
    assert const.background_determined() == "0"
    with pytest.raises(ser.ParseError):
        ser.parse_automaton(base % '{"type":"constant","value":"7"}')
    with pytest.raises(ser.ParseError):
        ser.parse_automaton(base % '{"type":"magic"}')
    partial = base.replace("[[-1],[0],[1]]", "[[0]]") % '{"type":"table","entries":[[["0"],"1"]]}'
    with pytest.raises(ser.ParseError, match="not total"):
        ser.parse_automaton(partial)


@pytest.mark.parametrize("path", sorted(SAMPLES.glob("*.json")), ids=lambda p: p.name)
def test_sample_round_trip(path):
    text = path.read_text()
    obj = json.loads(text)
    if "entries" in obj and "group" not in obj:
        spec = GroupSpec((0,) * len(obj["entries"][0][0])) if obj["entries"] else GroupSpec((0,))
        assert ser.dumps(ser.config_to_json(ser.config_from_json(obj, spec))) == text
    else:
        assert ser.dumps(ser.automaton_to_json(ser.parse_automaton(text))) == text


def test_parse_window():
    assert parse_window("-1..1", Z) == [Z.element(x) for x in (-1, 0, 1)]
    spec = GroupSpec((2, 0))
    assert len(parse_window("0..2", spec)) == 6
    assert parse_window(None, Z) is None
    for bad in ("1..0", "a..b", "3", "0..1,0..1"):
        with pytest.raises(UsageError):
            parse_window(bad, Z)


def test_simulate_coarse_one_step():
    code, out = run("simulate", "--automaton", sample("and_z.json"), "--config", sample("config_and.json"), "--mode", "coarse", "--steps", "1")
    assert code == 0
    lines = out.splitlines()
    assert len(lines) == 2
    assert json.loads(lines[1]) == {"entries": [[[0], "1"], [[1], "0"]]}


def test_simulate_constant_fine_window():
    code, out = run("simulate", "--automaton", sample("constant_z.json"), "--config", sample("config_single.json"), "--mode", "fine", "--steps", "1", "--window", "-2..2")
    assert code == 0
    last = json.loads(out.splitlines()[-1])
    assert last == {"entries": [[[x], "1"] for x in range(-2, 3)]}


def test_simulate_zero_steps_echoes_input():
    code, out = run("simulate", "--automaton", sample("and_z.json"), "--config", sample("config_and.json"), "--steps", "0")
    assert code == 0
    assert out == (SAMPLES / "config_and.json").read_text()


def test_simulate_modes_agree_on_full_support():
    A = ser.parse_automaton((SAMPLES / "and_z3.json").read_text())
    c = ser.parse_config((SAMPLES / "config_z3_full.json").read_text(), A.group)
    runs = {m: simulate(A, c, m, 4) for m in ("global", "coarse", "fine")}
    assert runs["global"] == runs["coarse"] == runs["fine"]


def test_simulate_mode_preconditions():
    code, _ = run("simulate", "--automaton", sample("and_z.json"), "--config", sample("config_and.json"), "--mode", "global")
    assert code == 2
    code, _ = run("simulate", "--automaton", sample("and_z.json"), "--config", sample("config_and.json"), "--mode", "fine")
    assert code == 2
    code, _ = run("simulate", "--automaton", sample("and_z3.json"), "--config", sample("config_single.json"), "--mode", "global")
    assert code == 2


def test_simulate_empty_warning(capsys):
    code = main(["simulate", "--automaton", sample("and_z.json"), "--config", sample("config_and.json"), "--steps", "3"], out=io.StringIO())
    assert code == 0
    assert "empty" in capsys.readouterr().err


def test_simulate_plot(tmp_path):
    png = tmp_path / "st.png"
    code, out = run("simulate", "--automaton", sample("eca110.json"), "--config", sample("config_eca.json"), "--mode", "fine", "--steps", "3", "--window", "-6..6", "--plot", str(png))
    assert code == 0 and len(out.splitlines()) == 4
    assert png.stat().st_size > 0
    code, _ = run("simulate", "--automaton", sample("torsion_z2z2.json"), "--config", sample("config_empty.json"), "--plot", str(png))
    assert code == 2


def test_query_interior_and_determined():
    code, out = run("query", "--automaton", sample("eca110.json"), "--config", sample("config_block.json"), "--what", "interior")
    assert code == 0 and json.loads(out) == [[1], [2]]
    code, out = run("query", "--automaton", sample("and_z.json"), "--config", sample("config_single.json"), "--what", "determined", "--window", "3..6")
    assert code == 0 and json.loads(out) == [[[4], "0"], [[5], "0"]]
    code, out = run("query", "--automaton", sample("eca110.json"), "--config", sample("config_empty.json"), "--what", "interior")
    assert code == 0 and json.loads(out) == []
    code, _ = run("query", "--automaton", sample("and_z.json"), "--config", sample("config_single.json"), "--what", "determined")
    assert code == 2


def test_verify_pass_and_report():
    code, out = run("verify", "--automaton", sample("and_z3.json"), "--suites", "laws,order,transitions,kan", "--budget", "20000", "--seed", "3")
    report = json.loads(out)
    assert code == 0 and report["ok"]
    kan = next(s for s in report["suites"] if s["suite"] == "kan")
    assert {p["problem"] for p in kan["problems"]} >= {"P1", "P2", "P3", "P4"}


def test_verify_torsion_reports_strictness():
    code, out = run("verify", "--automaton", sample("torsion_z2z2.json"), "--suites", "transitions")
    tr = json.loads(out)["suites"][0]
    assert code == 0
    assert tr["neighborhood_injective"] is False
    assert tr["strict_witness"] is not None


def test_verify_budget_one_skips():
    code, out = run("verify", "--automaton", sample("and_z3.json"), "--suites", "kan", "--budget", "1")
    kan = json.loads(out)["suites"][0]
    assert code == 0
    assert all(p["exhaustive"] == "skipped" for p in kan["problems"])


def test_verify_kan_on_infinite_group_is_usage_error():
    code, _ = run("verify", "--automaton", sample("and_z.json"), "--suites", "kan")
    assert code == 2


def test_verify_infinite_group_other_suites():
    code, out = run("verify", "--automaton", sample("eca110.json"), "--suites", "laws,order,transitions")
    assert code == 0 and json.loads(out)["ok"]


def test_verify_deterministic_seed():
    a = json.loads(run("verify", "--automaton", sample("and_z.json"), "--suites", "laws,transitions", "--seed", "5")[1])
    b = json.loads(run("verify", "--automaton", sample("and_z.json"), "--suites", "laws,transitions", "--seed", "5")[1])
    for x, y in zip(a["suites"], b["suites"]):
        x.pop("elapsed_ms"), y.pop("elapsed_ms")
    assert a == b


def test_usage_errors():
    assert run("verify")[0] == 2
    assert run("nonsense")[0] == 2
    assert run("verify", "--automaton", sample("and_z.json"), "--suites", "bogus")[0] == 2
    assert run("verify", "--automaton", "/nonexistent.json")[0] == 2
