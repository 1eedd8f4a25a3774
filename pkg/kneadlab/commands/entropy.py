import math

from traitlets import Unicode

from ..errors import OrbitEscaped
from ..kneading import parse_word
from ..model import PowerLawMap
from ..output import open_output, write_sweep
from ..powerlaw import core_interval
from ..schemas import RecordFlag, RunConfig, Subcommand, SweepReport
from ..sweep import sample_point
from .base import BaseCommand


def display_entropy(value, log2: bool) -> str:
    if value is None:
        return "-"
    return f"{value / math.log(2.0) if log2 else value:.6f}"


class EntropyCommand(BaseCommand):
    name = Unicode("kneadlab-entropy")

    description = "Topological entropy of f_a(x) = a - |x|^r from the kneading determinant and lap numbers."

    subcommand = Subcommand.ENTROPY

    def run(self, config: RunConfig) -> int:
        fmap = PowerLawMap(a=config.a, r=config.r)
        core_interval(fmap)
        record = sample_point(
            config.a,
            config.r,
            word_depth=config.word_depth,
            series_depth=config.series_depth,
            with_laps=config.with_laps,
            lap_depth=config.lap_depth,
            c_tol=config.c_tol,
            tol=config.tol,
        )
        if RecordFlag.ESCAPED.value in record.flags:
            raise OrbitEscaped(f"critical orbit of a={config.a!r}, r={config.r!r} escaped", a=config.a, r=config.r)

        kneading, laps = record.entropy_kneading, record.entropy_laps
        unit = "bits" if config.log2 else "nats"
        line = (
            f"a={config.a!r} r={config.r!r} word={parse_word(record.word).spaced()}"
            f" h_kneading={display_entropy(kneading.value, config.log2)}"
            f" (+/- {kneading.error_bound:.1e})"
        )
        if laps is not None:
            line += f" h_laps={display_entropy(laps.value, config.log2)} (+/- {laps.error_bound:.1e})"
        if record.flags:
            line += f" flags={','.join(record.flags)}"
        print(f"{line} [{unit}]")

        if config.output:
            with open_output(config.output) as stream:
                write_sweep(SweepReport(records=[record]), stream, config.output_format)
        return 0
