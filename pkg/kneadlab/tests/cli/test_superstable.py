import pytest

from ..utils import run_cli


def test_period_three(capsys):
    assert run_cli(["superstable", "--r", "2", "--word", "RLC"]) == 0
    out = capsys.readouterr().out
    assert "a* (bisection)  1.75487766" in out
    assert "a* (thurston)   1.75487766" in out
    assert "positivity      OK" in out


def test_spaced_lowercase_word(capsys):
    assert run_cli(["superstable", "--r", "3", "--word", "r c"]) == 0
    assert "a* (bisection)  1.000000000000" in capsys.readouterr().out


def test_inadmissible_word():
    assert run_cli(["superstable", "--r", "2", "--word", "RRC"]) == 4


@pytest.mark.parametrize("word", ["RLX", "RL"])
def test_malformed_word(word):
    assert run_cli(["superstable", "--r", "2", "--word", word]) == 2


def test_missing_word():
    assert run_cli(["superstable", "--r", "2"]) == 2
