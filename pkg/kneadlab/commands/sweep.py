import numpy as np
from tornado import ioloop
from traitlets import Unicode

from ..errors import MonotonicityViolation
from ..output import open_output, write_sweep
from ..schemas import RunConfig, Subcommand, ViolationKind
from ..sweep import entropy_curve
from .base import BaseCommand


class SweepCommand(BaseCommand):
    name = Unicode("kneadlab-sweep")

    description = "Kneading words and entropy over a parameter grid, audited for monotonicity."

    subcommand = Subcommand.SWEEP

    def run(self, config: RunConfig) -> int:
        lo, hi, count = config.a_range
        grid = np.linspace(lo, hi, count)
        self.log.info("Sweeping %d points of [%r, %r] at r=%r with %d workers", count, lo, hi, config.r, config.workers)

        async def sweep():
            return await entropy_curve(
                config.r,
                grid,
                word_depth=config.word_depth,
                series_depth=config.series_depth,
                with_laps=config.with_laps,
                lap_depth=config.lap_depth,
                c_tol=config.c_tol,
                tol=config.tol,
                entropy_slack=config.entropy_slack,
                workers=config.workers,
            )

        report = ioloop.IOLoop.current().run_sync(sweep)
        with open_output(config.output) as stream:
            write_sweep(report, stream, config.output_format)

        word_violations = report.count(ViolationKind.WORD_ORDER)
        entropy_violations = report.count(ViolationKind.ENTROPY_ORDER)
        self.log.info(
            "%d records, max entropy backstep %.3g, %d entropy-order violations",
            len(report.records),
            report.max_entropy_backstep,
            entropy_violations,
        )
        if word_violations:
            raise MonotonicityViolation(f"{word_violations} word-order violations at r={config.r!r}")
        return 0
