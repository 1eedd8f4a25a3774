from kneadlab.commands import SweepCommand
from kneadlab.output import read_sweep_csv

from ..utils import run_cli


def test_sweep_to_file(tmp_path):
    target = tmp_path / "sweep.csv"
    argv = ["sweep", "--r", "2", "--a-range", "0.5:2:50", "--no-laps", "--output", str(target)]
    assert run_cli(argv) == 0
    with open(target) as f:
        rows = read_sweep_csv(f)
    assert len(rows) == 50
    assert rows[0]["a"] == 0.5
    assert rows[-1]["a"] == 2.0
    assert rows[-1]["h_laps"] is None
    assert "# violations: 0" in target.read_text()


def test_sweep_to_stdout(capsys):
    assert run_cli(["sweep", "--r", "2", "--a-range", "1:2:3", "--lap-depth", "10"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0].startswith("a,r,word,")
    assert len([line for line in lines[1:] if not line.startswith("#")]) == 3


def test_sweep_single_point(capsys):
    assert run_cli(["sweep", "--r", "2", "--a-range", "2:2:1", "--no-laps"]) == 0
    assert "# violations: 0" in capsys.readouterr().out


def test_sweep_empty_range():
    assert run_cli(["sweep", "--r", "2", "--a-range", "0.5:2:0"]) == 2


def test_sweep_malformed_range():
    assert run_cli(["sweep", "--r", "2", "--a-range", "0.5-2"]) == 2


def test_sweep_outside_window():
    assert run_cli(["sweep", "--r", "2", "--a-range", "0.5:2.5:10", "--no-laps"]) == 2


def test_sweep_needs_range():
    assert run_cli(["sweep", "--r", "2", "--a", "1"]) == 2


def test_sweep_depths():
    assert run_cli(["sweep", "--r", "2", "--a-range", "1:2:3", "--word-depth", "5"]) == 2


def test_workers_from_environment(monkeypatch):
    monkeypatch.setenv("KNEADLAB_WORKERS", "3")
    command = SweepCommand.instance()
    command.initialize(["--a-range", "1:2:3", "--workers", "1"])
    assert command.workers == 3
    assert command.run_config().workers == 3


def test_workers_default():
    command = SweepCommand.instance()
    command.initialize(["--a-range", "1:2:3"])
    assert command.workers == 1


def test_sweep_output_is_reproducible(tmp_path):
    outputs = []
    for name in ("first.csv", "second.csv"):
        target = tmp_path / name
        argv = ["sweep", "--r", "2.5", "--a-range", "0.5:1.5:40", "--lap-depth", "10", "--seed", "3"]
        assert run_cli(argv + ["--output", str(target)]) == 0
        outputs.append(target.read_bytes())
    assert outputs[0] == outputs[1]
