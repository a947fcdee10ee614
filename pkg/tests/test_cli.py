import json

import pytest

from itervote import scenarios as S
from itervote.cli import main


def test_run_writes_trace_and_scores(tmp_path, capsys):
    assert main(["run", "intro-45-40-15", "--out", str(tmp_path), "--seed", "2"]) == 0
    lines = (tmp_path / "intro-45-40-15.trace.jsonl").read_text().splitlines()
    assert json.loads(lines[0])["seed"] == 2
    assert json.loads(lines[-1])["outcome"] == "equilibrium"
    csv_text = (tmp_path / "intro-45-40-15.scores.csv").read_text()
    assert csv_text.splitlines()[0] == "t,a,b,c,winner"
    assert "equilibrium" in capsys.readouterr().out


def test_run_exit_codes(tmp_path):
    assert main(["run", "simultaneous-swap", "--out", str(tmp_path)]) == 3
    assert main(["run", "simultaneous-swap", "--out", str(tmp_path), "--step-limit", "1"]) == 4
    assert main(["run", "simultaneous-swap", "--out", str(tmp_path),
                 "--scheduler", "round_robin"]) == 0
    assert main(["run", "intro-45-40-15", "--out", str(tmp_path), "--expect"]) == 0
    assert main(["run", "no-such-scenario", "--out", str(tmp_path)]) == 2


def test_run_is_byte_identical(tmp_path):
    outs = []
    for k in range(2):
        d = tmp_path / str(k)
        main(["run", "truthful-uniform-r", "--out", str(d), "--seed", "5"])
        outs.append((d / "truthful-uniform-r.trace.jsonl").read_bytes())
    assert outs[0] == outs[1]


def test_overrides(tmp_path):
    assert main(["run", "intro-45-40-15", "--out", str(tmp_path), "--epsilon", "1/30"]) == 2
    assert main(["run", "intro-45-40-15", "--out", str(tmp_path), "--epsilon", "1/300"]) == 0
    assert main(["run", "intro-45-40-15", "--out", str(tmp_path),
                 "--metric-override", "linf"]) == 0


def test_check_and_census(tmp_path, capsys):
    assert main(["check", "intro-45-40-15"]) == 1
    assert main(["check", "intro-45-40-15", "--profile", "b"]) == 0
    assert main(["check", "intro-45-40-15", "--profile", "b,c"]) == 2
    out = tmp_path / "census.json"
    assert main(["census", "simultaneous-swap-singleton", "--out", str(out)]) == 0
    data = json.loads(out.read_text())
    assert data["count"] == len(data["equilibria"])
    assert main(["census", "wcr-noeq-nonatomic", "--expect-count", "0"]) == 0
    assert main(["census", "intro-45-40-15", "--space", "full", "--limit", "1"]) == 2


def test_cross_validate_and_batch(tmp_path, capsys):
    assert main(["cross-validate", "--m", "2", "--max-score", "3", "--radii", "0,1"]) == 0
    assert "0 mismatches" in capsys.readouterr().out
    csv_path = tmp_path / "b.csv"
    assert main(["batch", "--games", "5", "--seed", "1", "--out", str(csv_path)]) == 0
    assert len(csv_path.read_text().splitlines()) == 6
    assert main(["batch", "--games", "0", "--seed", "1"]) == 0
    assert capsys.readouterr().out.startswith("game_id,")


def test_list_show_verify(tmp_path, capsys):
    assert main(["list"]) == 0
    names = capsys.readouterr().out.split()
    assert names == S.builtin_names()
    assert main(["show", "flaw-example"]) == 0
    path = tmp_path / "flaw.json"
    path.write_text(capsys.readouterr().out)
    assert S.load(path) == S.builtin("flaw-example")
    assert main(["verify", "flaw-example", "simultaneous-swap"]) == 0
    assert main(["run", str(path), "--out", str(tmp_path)]) == 0


def test_bad_arguments_exit_two():
    with pytest.raises(SystemExit) as exc:
        main(["run"])
    assert exc.value.code == 2
