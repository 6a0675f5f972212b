"""The gf command: exit codes, output formats, replay verification."""

import re

import pytest

from gfsim.cli import main

ROLL_UP = """\
gf-level v1
area 800 600
time 20
circle 100 560
diamond 500 570
"""

NO_DIAMONDS = """\
gf-level v1
area 800 600
time 20
circle 100 560
"""


def _lvl(tmp_path, text=ROLL_UP, name="roll-up.lvl"):
    path = tmp_path / name
    path.write_text(text)
    return str(path)


def test_score_prints_six_decimals(capsys):
    assert main(["score", "--completed", "--t", "30", "--tmax", "60",
                 "--collect", "2"]) == 0
    assert capsys.readouterr().out == "90.000000\n"
    assert main(["score", "--t", "30", "--tmax", "60", "--collect", "2"]) == 0
    assert capsys.readouterr().out == "40.000000\n"


def test_score_uses_configured_tmax_by_default(capsys):
    assert main(["score", "--completed", "--t", "0", "--collect", "0"]) == 0
    assert capsys.readouterr().out == "100.000000\n"


def test_score_rejects_impossible_time(capsys):
    assert main(["score", "--t", "90", "--tmax", "60", "--collect", "0"]) == 2
    assert "error:" in capsys.readouterr().err


def test_usage_errors_exit_one(capsys):
    with pytest.raises(SystemExit) as exc:
        main([])
    assert exc.value.code == 1
    with pytest.raises(SystemExit) as exc:
        main(["run", "--no-such-flag"])
    assert exc.value.code == 1
    capsys.readouterr()


def test_run_prints_result_line(tmp_path, capsys):
    assert main(["run", "--level", _lvl(tmp_path), "--circle-agent", "solo",
                 "--headless"]) == 0
    out = capsys.readouterr().out
    assert re.fullmatch(
        r"level=\S+ seed=0 completed=true t=\d+\.\d{3} collected=1 "
        r"score=\d+\.\d{6} timeouts=0\n", out)


def test_run_missing_level_exits_validation(capsys):
    assert main(["run", "--level", "/nonexistent.lvl", "--headless"]) == 2
    assert "error:" in capsys.readouterr().err


def test_run_invalid_level_exits_validation(tmp_path, capsys):
    path = _lvl(tmp_path, NO_DIAMONDS, "bare.lvl")
    assert main(["run", "--level", path, "--headless"]) == 2
    assert "diamond" in capsys.readouterr().err


def test_run_unknown_agent_exits_three(tmp_path, capsys):
    assert main(["run", "--level", _lvl(tmp_path), "--circle-agent", "nosuch",
                 "--headless"]) == 3
    assert "agent error:" in capsys.readouterr().err


def test_validate_reports_ok(tmp_path, capsys):
    assert main(["validate", _lvl(tmp_path)]) == 0
    assert capsys.readouterr().out.startswith("ok:")
    assert main(["validate", _lvl(tmp_path, NO_DIAMONDS, "bare.lvl")]) == 2
    capsys.readouterr()


def test_replay_verifies_and_detects_tamper(tmp_path, capsys):
    rp = tmp_path / "run.replay"
    assert main(["run", "--level", _lvl(tmp_path), "--circle-agent", "solo",
                 "--headless", "--replay-out", str(rp)]) == 0
    capsys.readouterr()

    assert main(["verify-replay", str(rp)]) == 0
    out = capsys.readouterr().out
    assert re.fullmatch(r"ok: hash=[0-9a-f]{16} t=\d+\.\d{3} collected=1\n", out)

    # flip one character of the recorded final hash
    text = rp.read_text()
    tampered = text[:-2] + ("0" if text[-2] != "0" else "f") + "\n"
    rp.write_text(tampered)
    assert main(["verify-replay", str(rp)]) == 2
    assert "mismatch:" in capsys.readouterr().err

    rp.write_text("not a replay\n")
    assert main(["verify-replay", str(rp)]) == 2
    assert "cannot load replay" in capsys.readouterr().err


def test_batch_prints_level_means_and_writes_csv(tmp_path, capsys):
    out_csv = tmp_path / "report.csv"
    assert main(["batch", "--pack", "circle-public", "--track", "circle",
                 "--agent", "solo", "--runs", "1", "--jobs", "2",
                 "--out", str(out_csv)]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert len(lines) == 6 and lines[-1].startswith("total")
    for ln in lines:
        assert re.fullmatch(r"\S+\s+\d+\.\d{3}", ln)
    header = out_csv.read_text().splitlines()[0]
    assert header.startswith("schema,row,track,agent,level")


def test_batch_rejects_track_mismatch(capsys):
    assert main(["batch", "--pack", "circle-public", "--track", "rectangle",
                 "--agent", "rectangleSolo"]) == 2
    assert "circle pack" in capsys.readouterr().err


def test_batch_unknown_pack_exits_validation(capsys):
    assert main(["batch", "--pack", "no-such-pack", "--track", "circle",
                 "--agent", "solo"]) == 2
    assert "error:" in capsys.readouterr().err
