import json

import pytest

from sgrk.bench import generate
from sgrk.cli import main
from sgrk.spec import print_spec

from test_grk import GADGET
from test_spec import TWO_MODE

DEADLOCK = """\
INPUT_VARS: t
OUTPUT_VARS: a
TRANS_SYS: a & !a'
"""


@pytest.fixture
def files(tmp_path):
    (tmp_path / "two_mode.sgrk").write_text(TWO_MODE)
    (tmp_path / "gadget.sgrk").write_text(GADGET)
    (tmp_path / "dead.sgrk").write_text(DEADLOCK)
    return tmp_path


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def report(out):
    line = [l for l in out.splitlines() if l.startswith("{")][-1]
    doc = json.loads(line)
    assert doc["schema"] == "sgrk-report-1"
    return doc


def test_check_exit_codes(files, capsys):
    code, out, _ = run(capsys, "check", files / "two_mode.sgrk", "--json")
    assert code == 0 and report(out)["realizable"] is True
    assert run(capsys, "check", files / "gadget.sgrk")[0] == 1
    code, out, err = run(capsys, "check", files / "dead.sgrk", "--json")
    assert code == 2 and "no move" in err and report(out)["error"] == "DeadlockError"
    assert run(capsys, "check", files / "missing.sgrk")[0] == 2
    assert run(capsys, "nosuchcommand")[0] == 2


def test_check_benchmark_file(tmp_path, capsys):
    path = tmp_path / "multimode4.sgrk"
    assert run(capsys, "bench", "multimode", "-n", 4, "-o", path)[0] == 0
    code, out, _ = run(capsys, "check", path, "--json", "--reorder")
    assert code == 0 and report(out)["N"] == 1 << 8


def test_json_is_deterministic(files, capsys):
    docs = []
    for _ in range(2):
        code, out, _ = run(capsys, "check", files / "two_mode.sgrk", "--json")
        doc = report(out)
        doc.pop("wall_time")
        docs.append(json.dumps(doc, sort_keys=True))
    assert docs[0] == docs[1]
    for key in ("command", "spec", "realizable", "N", "phi", "ops_used", "iterations", "seed"):
        assert key in json.loads(docs[0])


def test_stdin(files, capsys, monkeypatch):
    import io
    monkeypatch.setattr("sys.stdin", io.StringIO(TWO_MODE))
    assert run(capsys, "check", "-")[0] == 0


def test_synth_and_simulate(files, capsys):
    strat = files / "two_mode.json"
    code, out, _ = run(capsys, "synth", files / "two_mode.sgrk", "-o", strat, "--json")
    assert code == 0
    rows = report(out)["rows"]
    assert 0 < rows <= 9 * 3 * 2
    assert run(capsys, "synth", files / "two_mode.sgrk")[0] == 2
    code, out, _ = run(capsys, "synth", files / "gadget.sgrk", "-o", files / "g.json", "--json")
    assert code == 1 and report(out)["env_winning"] > 0
    for env in ("random", "adversarial"):
        code, out, _ = run(capsys, "simulate", files / "two_mode.sgrk", strat, "--env", env,
                           "--steps", 100, "--json")
        assert code == 0 and report(out)["violation"] is None


def test_scripted_simulation_is_deterministic(files, capsys):
    strat = files / "two_mode.json"
    run(capsys, "synth", files / "two_mode.sgrk", "-o", strat)
    script = files / "inputs.txt"
    script.write_text("00\n01\n01\n01\n")
    traces = []
    for seed in (1, 2):
        code, out, _ = run(capsys, "simulate", files / "two_mode.sgrk", strat, "--env", "script",
                           "--script", script, "--seed", seed, "--json")
        assert code == 0
        traces.append(report(out)["trace"])
    assert traces[0] == traces[1] and len(traces[0]) == 4


def test_corrupted_row_is_a_violation(files, capsys):
    strat = files / "two_mode.json"
    run(capsys, "synth", files / "two_mode.sgrk", "-o", strat)
    doc = json.loads(strat.read_text())
    for row in doc["rows"]:
        row["output"] = "11"
    strat.write_text(json.dumps(doc))
    code, out, _ = run(capsys, "simulate", files / "two_mode.sgrk", strat, "--steps", 20, "--json")
    assert code == 1 and report(out)["violation"]
    strat.write_text("{not json")
    assert run(capsys, "simulate", files / "two_mode.sgrk", strat)[0] == 2


def test_dump_dd(tmp_path, capsys):
    path = tmp_path / "mm8.sgrk"
    path.write_text(print_spec(generate("multimode", 8)))
    outdir = tmp_path / "dump"
    assert run(capsys, "synth", path, "--dump-dd", "-o", outdir)[0] == 0
    names = {p.name for p in outdir.iterdir()}
    assert {"win.dot", "acc.dot", "fb.dot"} <= names
    assert all((outdir / n).read_text().startswith("digraph") for n in names)


def test_oracle_commands(files, capsys, monkeypatch):
    code, out, _ = run(capsys, "oracle", files / "two_mode.sgrk", "--json")
    assert code == 0 and report(out)["agree"] is True
    monkeypatch.setenv("SGRK_SEED", "5")
    code, out, _ = run(capsys, "oracle", "--count", 3, "--json")
    doc = report(out)
    assert code == 0 and doc["seed"] == 5 and doc["disagreements"] == 0


def test_export_ltl(files, capsys):
    code, out, _ = run(capsys, "export-ltl", files / "two_mode.sgrk")
    assert code == 0 and " W " in out and "G F" in out


def test_adapter_command(tmp_path, capsys):
    from sgrk.adapters import read_tx, running_example, write_tx
    target, adaptee = running_example()
    (tmp_path / "t.tx").write_text(write_tx(target))
    (tmp_path / "a.tx").write_text(write_tx(adaptee))
    (tmp_path / "modes.sgrk").write_text(TWO_MODE)
    out_path = tmp_path / "adapter.tx"
    code, out, _ = run(capsys, "adapter", "--target", tmp_path / "t.tx", "--adaptee", tmp_path / "a.tx",
                       "--grk", tmp_path / "modes.sgrk", "-o", out_path, "--json")
    assert code == 0
    adapter = read_tx(out_path.read_text())
    assert len(adapter.states) == report(out)["adapter_states"]
