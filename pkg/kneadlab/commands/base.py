import logging
import os
from typing import Optional, Tuple

from pydantic import ValidationError
from traitlets import Bool, Float, Int, List, Unicode, default, validate
from traitlets.config.application import Application

from .._version import __version__
from ..errors import InvalidParameter, KneadLabError
from ..schemas import RunConfig, Subcommand

WORKERS_ENV = "KNEADLAB_WORKERS"

CONFIG_ERROR_EXIT = 2


def parse_range(text: str) -> Tuple[float, float, int]:
    """Parse lo:hi:count, endpoints included."""
    parts = text.split(":")
    if len(parts) != 3:
        raise InvalidParameter(f"a range is written lo:hi:count, got {text!r}")
    try:
        return float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError:
        raise InvalidParameter(f"a range is written lo:hi:count, got {text!r}")


class BaseCommand(Application):
    """
    Shared options of the kneadlab subcommands.

    Every option is a configurable trait, so it can be set on the command
    line or in the config file; the values are frozen into a RunConfig
    before the command runs.
    """

    version = __version__

    subcommand: Subcommand

    r = Float(2.0, help="Exponent r > 1 of f_a(x) = a - |x|^r", config=True)

    a = Float(None, allow_none=True, help="Parameter a", config=True)

    a_range = Unicode(None, allow_none=True, help="Parameter grid lo:hi:count, endpoints included", config=True)

    @validate("a_range")
    def _validate_a_range(self, proposal):
        value = proposal["value"]
        if value is not None:
            value = "".join(value.split())
        return value

    word = Unicode(None, allow_none=True, help="Kneading word over R, L, C, e.g. RLC", config=True)

    @validate("word")
    def _validate_word(self, proposal):
        value = proposal["value"]
        if value is not None:
            value = "".join(value.split()).upper()
        return value

    word_depth = Int(30, help="Number of kneading symbols reported", config=True)

    series_depth = Int(64, help="Number of kneading-determinant coefficients", config=True)

    lap_depth = Int(18, help="Iterate whose lap number estimates the entropy", config=True)

    with_laps = Bool(True, help="Also estimate the entropy from lap numbers", config=True)

    c_tol = Float(0.0, help="Orbit points within this distance of 0 read as C", config=True)

    tol = Float(1e-12, help="Bisection tolerance of the root of D(t)", config=True)

    identity_tol = Float(1e-8, help="Relative tolerance of the determinant identity", config=True)

    fixed_point_tol = Float(1e-8, help="Tolerance of the fixed-point and solver checks", config=True)

    fd_tol = Float(1e-6, help="Relative tolerance of the finite-difference Jacobian check", config=True)

    entropy_slack = Float(
        None,
        allow_none=True,
        help="Allowed entropy backstep in sweeps; twice the summed error bounds by default",
        config=True,
    )

    r_values = List(
        trait=Float(),
        default_value=[],
        help="Exponents for verify; --r is used when empty",
        config=True,
    )

    max_n = Int(10, help="Longest superstable word considered", config=True)

    output = Unicode(None, allow_none=True, help="Output file; stdout when omitted", config=True)

    output_format = Unicode("csv", help="Output format: csv or json", config=True)

    seed = Int(0, help="Seed of every random choice", config=True)

    workers = Int(help="Worker processes for sweeps", config=True)

    @default("workers")
    def _default_workers(self):
        return self._workers_from_env() or 1

    @validate("workers")
    def _validate_workers(self, proposal):
        return self._workers_from_env() or proposal["value"]

    def _workers_from_env(self) -> Optional[int]:
        value = os.environ.get(WORKERS_ENV)
        if not value:
            return None
        try:
            return int(value)
        except ValueError:
            self.log.warning("Ignoring %s=%r, not an integer", WORKERS_ENV, value)
            return None

    log2 = Bool(False, help="Display entropies in bits instead of nats", config=True)

    config_file = Unicode(
        "kneadlab_config.py",
        help="""
        Config file to load.

        If a relative path is provided, it is taken relative to current directory
        """,
        config=True,
    )

    @default("log_level")
    def _default_log_level(self):
        return logging.INFO

    aliases = {
        "log-level": "Application.log_level",
        "config": "BaseCommand.config_file",
        "r": "BaseCommand.r",
        "a": "BaseCommand.a",
        "a-range": "BaseCommand.a_range",
        "word": "BaseCommand.word",
        "word-depth": "BaseCommand.word_depth",
        "series-depth": "BaseCommand.series_depth",
        "lap-depth": "BaseCommand.lap_depth",
        "c-tol": "BaseCommand.c_tol",
        "tol": "BaseCommand.tol",
        "identity-tol": "BaseCommand.identity_tol",
        "fixed-point-tol": "BaseCommand.fixed_point_tol",
        "fd-tol": "BaseCommand.fd_tol",
        "entropy-slack": "BaseCommand.entropy_slack",
        "r-values": "BaseCommand.r_values",
        "max-n": "BaseCommand.max_n",
        "output": "BaseCommand.output",
        "format": "BaseCommand.output_format",
        "seed": "BaseCommand.seed",
        "workers": "BaseCommand.workers",
    }

    flags = {
        "log2": ({"BaseCommand": {"log2": True}}, "Display entropies in bits"),
        "no-laps": ({"BaseCommand": {"with_laps": False}}, "Skip the lap-number estimate"),
        "debug": ({"Application": {"log_level": logging.DEBUG}}, "Log at debug level"),
    }

    def run_config(self) -> RunConfig:
        """Freeze the current option values into a validated RunConfig."""
        return RunConfig(
            subcommand=self.subcommand,
            r=self.r,
            a=self.a,
            a_range=parse_range(self.a_range) if self.a_range else None,
            word=self.word or None,
            word_depth=self.word_depth,
            series_depth=self.series_depth,
            lap_depth=self.lap_depth,
            c_tol=self.c_tol,
            tol=self.tol,
            identity_tol=self.identity_tol,
            fixed_point_tol=self.fixed_point_tol,
            fd_tol=self.fd_tol,
            entropy_slack=self.entropy_slack,
            with_laps=self.with_laps,
            r_values=list(self.r_values) or [self.r],
            max_n=self.max_n,
            output=self.output,
            output_format=self.output_format,
            seed=self.seed,
            workers=self.workers,
            log2=self.log2,
        )

    def run(self, config: RunConfig) -> int:
        """Execute the command; returns the exit code."""
        raise NotImplementedError

    def start(self):
        self.load_config_file(self.config_file)
        try:
            config = self.run_config()
        except ValidationError as e:
            self.log.error("Invalid configuration for %s: %s", self.name, e)
            self.exit(CONFIG_ERROR_EXIT)
        except KneadLabError as e:
            self.log.error("%s", e)
            self.exit(e.exit_code)

        try:
            code = self.run(config)
        except KneadLabError as e:
            self.log.error("%s failed: %s", self.name, e)
            self.log.debug("Error details: %s", e.details)
            self.exit(e.exit_code)
        if code:
            self.exit(code)
