import json

from xchainsim.cli import main


def test_list(capsys):
    assert main(["list"]) == 0
    assert "pause-semantics" in capsys.readouterr().out


def test_run_writes_report_and_log(tmp_path, capsys):
    out, log = tmp_path / "r.json", tmp_path / "e.jsonl"
    assert main(["run", "guardian-hold-12", "--out", str(out), "--log", str(log)]) == 0
    report = json.loads(out.read_text())
    assert report["passed"] and report["seed"] == 12
    assert main(["replay", str(log), "--out", str(tmp_path / "again.json")]) == 0
    assert (tmp_path / "again.json").read_bytes() == out.read_bytes()


def test_failing_run_exits_nonzero(capsys):
    assert main(["run", "guardian-breach-13", "-v"]) == 1
    assert "counterexample conservation" in capsys.readouterr().out


def test_seed_precedence(tmp_path, monkeypatch):
    out = tmp_path / "r.json"
    monkeypatch.setenv("XCHAINSIM_SEED", "77")
    main(["run", "guardian-hold-12", "--out", str(out)])
    assert json.loads(out.read_text())["seed"] == 77
    main(["run", "guardian-hold-12", "--seed", "5", "--out", str(out)])
    assert json.loads(out.read_text())["seed"] == 5


def test_bad_config_exits_2(tmp_path, capsys):
    bad = tmp_path / "bad.yaml"
    bad.write_text("name: x\nchains: 3\n")
    assert main(["run", str(bad)]) == 2
    assert "error:" in capsys.readouterr().err
    assert main(["run", str(tmp_path / "nope.yaml")]) == 2


def test_probe_matrix(tmp_path, capsys):
    out = tmp_path / "m.json"
    assert main(["probe-matrix", "--out", str(out)]) == 0
    assert json.loads(out.read_text())["matrix"]["matches_table"]


def test_small_campaign(tmp_path, capsys):
    out = tmp_path / "c.json"
    assert main(["campaign", "--seeds", "2", "--ops", "200", "--out", str(out)]) == 0
    merged = json.loads(out.read_text())
    assert merged["seeds"] == [0, 1]
