import csv
import io
import json

import pytest

from unison_lab import scenarios, tracefile
from unison_lab.cli import main

EX1_SEL = "1,4\n0,3\n2,4\n0,3\n1,3\n"


@pytest.fixture
def script(tmp_path):
    p = tmp_path / "exemple1.sel"
    p.write_text(EX1_SEL)
    return p


def test_run_reproduces_fixture(tmp_path, script):
    out = tmp_path / "t.trace"
    code = main(["run", "--topology", "chain:5", "--init", "1,7,6,7,13", "--daemon", "locally-central",
                 "--policy", f"script:{script}", "--max-steps", "5", "--out", str(out)])
    assert code == 0
    got = tracefile.load(out)
    want = scenarios.load("exemple1").expected
    assert got.steps == want.steps


def test_run_freeze_exits_2(capsys):
    code = main(["run", "--topology", "chain:5", "--init", "0,1,2,3,4", "--crash", "0@0", "--crash", "4@0",
                 "--policy", "lru", "--max-steps", "100"])
    assert code == 2
    out = capsys.readouterr().out
    assert "status=terminal" in out.splitlines()[0]
    assert len(out.splitlines()) == 1


def test_run_convergence_exits_0(tmp_path):
    code = main(["run", "--topology", "ring:6", "--init", "random:42:10", "--crash", "2@0", "--policy", "lru",
                 "--max-steps", "10000", "--stop", "gamma1-stable:100", "--out", str(tmp_path / "r.trace")])
    assert code == 0
    assert tracefile.load(tmp_path / "r.trace").status == "gamma1-stable"


def test_run_unmet_stop_exits_1(tmp_path):
    code = main(["run", "--topology", "chain:5", "--init", "0,10,20,30,40", "--max-steps", "2",
                 "--stop", "gamma1-reached", "--out", str(tmp_path / "x")])
    assert code == 1


def test_bad_flags_exit_64(capsys):
    assert main(["run", "--topology", "chain:5"]) == 64
    assert "usage" in capsys.readouterr().err
    assert main(["frobnicate"]) == 64
    assert main(["run", "--topology", "chain:5", "--init", "1,2", "--max-steps", "3"]) == 64
    assert main(["run", "--topology", "blob:5", "--init", "1,2"]) == 64
    assert main(["run", "--topology", "chain:2", "--init", "1,2", "--daemon", "lazy"]) == 64
    assert main(["check", "--topology", "chain:3", "--checks", "vibes"]) == 64
    assert main(["run", "--topology", "chain:2", "--init", "1,2", "--max-steps", "-1"]) == 64


def test_illegal_script_exit_65(tmp_path, capsys):
    bad = tmp_path / "bad.sel"
    bad.write_text("1,4\n1,2\n")
    code = main(["run", "--topology", "chain:5", "--init", "1,7,6,7,13", "--policy", f"script:{bad}",
                 "--max-steps", "5", "--out", str(tmp_path / "t")])
    assert code == 65
    assert "step 1" in capsys.readouterr().err


def test_check_commands(tmp_path):
    assert main(["check", "--topology", "chain:4", "--span", "3",
                 "--checks", "closure,blocking,priority,potential"]) == 0
    out = tmp_path / "w"
    assert main(["check", "--topology", "y:1", "--crash", "0", "--span", "4", "--checks", "starvation:strong",
                 "--expect-witness", "--out", str(out)]) == 0
    report = json.loads((out / "report.json").read_text())
    files = [w["file"] for w in report["witnesses"]]
    assert files and tracefile.load(files[0]).lasso_start is not None
    assert main(["check", "--topology", "ring:5", "--crash", "0", "--span", "4",
                 "--checks", "starvation:strong"]) == 0
    # asked for a witness that does not exist
    assert main(["check", "--topology", "ring:5", "--crash", "0", "--span", "4",
                 "--checks", "starvation:strong", "--expect-witness"]) == 1


def test_check_violation_exit_1():
    assert main(["check", "--topology", "chain:5", "--crash", "0", "--crash", "4", "--span", "4",
                 "--checks", "convergence", "--init", "0,1,2,3,4"]) == 1


def test_scenario_exit_codes(capsys):
    assert main(["scenario", "exemple2"]) == 0
    assert main(["scenario", "impf2_freeze"]) == 0
    assert main(["scenario", "nonesuch"]) == 66
    assert main(["scenario", "--list"]) == 0
    assert "exemple1" in capsys.readouterr().out


def test_plotdata(tmp_path, script, capsys):
    trace = tmp_path / "t.trace"
    main(["run", "--topology", "chain:5", "--init", "1,7,6,7,13", "--policy", f"script:{script}",
          "--max-steps", "5", "--out", str(trace)])
    capsys.readouterr()
    assert main(["plotdata", str(trace)]) == 0
    rows = list(csv.reader(io.StringIO(capsys.readouterr().out)))
    assert rows[0] == ["step", "processor", "clock", "crashed", "rule"]
    assert len(rows) - 1 == 5 * 5
    assert rows[2] == ["0", "1", "3", "0", "C1"]
    assert main(["plotdata", str(tmp_path / "missing")]) == 66
    (tmp_path / "junk").write_text("hello\n")
    assert main(["plotdata", str(tmp_path / "junk")]) == 65


def test_config_file_equals_flags(tmp_path, script):
    cfg = tmp_path / "run.cfg"
    cfg.write_text(
        "# same run as the flags below\n"
        "topology = ring:6\ninit = random:7:10\ncrash = 2@0\npolicy = lru\n"
        f"max-steps = 300\nstop = gamma1-stable:50\nout = {tmp_path / 'a.trace'}\n"
    )
    assert main(["run", "--config", str(cfg)]) == 0
    assert main(["run", "--topology", "ring:6", "--init", "random:7:10", "--crash", "2@0", "--policy", "lru",
                 "--max-steps", "300", "--stop", "gamma1-stable:50", "--out", str(tmp_path / "b.trace")]) == 0
    assert (tmp_path / "a.trace").read_text() == (tmp_path / "b.trace").read_text()
    (tmp_path / "bad.cfg").write_text("topology chain:3\n")
    assert main(["run", "--config", str(tmp_path / "bad.cfg")]) == 64


def test_seed_sweep(tmp_path, capsys, monkeypatch):
    monkeypatch.setenv("UNISON_LAB_THREADS", "1")
    out = tmp_path / "sweep"
    code = main(["run", "--topology", "chain:6", "--init", "random:0:10", "--crash", "1@0", "--policy", "lru",
                 "--max-steps", "2000", "--stop", "gamma1-stable:100", "--seeds", "3..6", "--out", str(out)])
    assert code == 0
    lines = [json.loads(x) for x in capsys.readouterr().out.splitlines()]
    assert [x["seed"] for x in lines] == [3, 4, 5, 6]
    assert sorted(p.name for p in out.iterdir()) == [f"seed-{s}.trace" for s in range(3, 7)]
    assert main(["run", "--topology", "chain:6", "--init", "1,2,3,4,5,6", "--seeds", "1..2"]) == 64
    assert main(["run", "--topology", "chain:6", "--init", "random:0:10", "--seeds", "5..2"]) == 64
