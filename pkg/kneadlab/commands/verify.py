from traitlets import Unicode

from ..errors import VerificationFailed
from ..output import open_output, write_verification
from ..schemas import RunConfig, Subcommand
from ..verify import run_verification
from .base import BaseCommand


class VerifyCommand(BaseCommand):
    name = Unicode("kneadlab-verify")

    description = "Run the fixed-point, Jacobian, identity and positivity suites."

    subcommand = Subcommand.VERIFY

    def run(self, config: RunConfig) -> int:
        report = run_verification(
            config.r_values,
            max_n=config.max_n,
            identity_tol=config.identity_tol,
            fixed_point_tol=config.fixed_point_tol,
            fd_tol=config.fd_tol,
            seed=config.seed,
        )
        with open_output(config.output) as stream:
            write_verification(report, stream, config.output_format)
        for check in report.checks:
            self.log.info(
                "%-24s %5d cases  max residual %.3e  (tolerance %.1e)  %s",
                check.name,
                check.cases,
                check.max_residual,
                check.tolerance,
                "passed" if check.passed else "FAILED",
            )
        if not report.passed:
            names = ", ".join(check.name for check in report.failed())
            raise VerificationFailed(f"failed checks: {names}", checks=names)
        return 0
