from typing import List, Optional

from kneadlab.app import KneadLab
from kneadlab.commands import (
    EntropyCommand,
    SuperstableCommand,
    SweepCommand,
    VerifyCommand,
    WordsCommand,
)
from kneadlab.kneading import parse_word
from kneadlab.schemas import EntropyEstimate, EntropyMethod, SweepRecord

APPLICATIONS = (KneadLab, EntropyCommand, SuperstableCommand, SweepCommand, VerifyCommand, WordsCommand)


def clear_applications():
    """Drop the singleton instances traitlets keeps between launches."""
    for cls in APPLICATIONS:
        cls.clear_instance()


def run_cli(argv: List[str]) -> int:
    """Launch kneadlab with `argv` and return the exit code."""
    clear_applications()
    try:
        KneadLab.launch_instance(argv)
    except SystemExit as e:
        return e.code or 0
    finally:
        clear_applications()
    return 0


def make_record(a: float, word: str, h: Optional[float] = None, error: float = 0.0, r: float = 2.0) -> SweepRecord:
    """A sweep record with a hand-picked word and kneading entropy."""
    estimate = None
    if h is not None:
        estimate = EntropyEstimate(value=h, method=EntropyMethod.KNEADING_ROOT, depth=64, error_bound=error)
    return SweepRecord(a=a, r=r, word=str(parse_word(word)), entropy_kneading=estimate)
