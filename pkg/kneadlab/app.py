import logging

from traitlets import Unicode, default
from traitlets.config.application import Application

from ._version import __version__
from .commands.base import CONFIG_ERROR_EXIT


class KneadLab(Application):
    name = Unicode("kneadlab")

    version = __version__

    description = """
    Kneading sequences, kneading determinants and topological entropy of the
    power-law unimodal family f_a(x) = a - |x|^r, with numerical checks of
    the Thurston fixed-point construction and of monotonicity in a.
    """

    examples = """
    kneadlab entropy --r 2 --a 1.8
    kneadlab superstable --r 2 --word RLC
    kneadlab sweep --r 2 --a-range 0.5:2:2000 --output sweep.csv
    kneadlab verify --r 2.5
    kneadlab words --r 2 --max-n 8
    """

    subcommands = {
        "entropy": ("kneadlab.commands.entropy.EntropyCommand", "Entropy at one parameter"),
        "superstable": ("kneadlab.commands.superstable.SuperstableCommand", "Solve for a superstable parameter"),
        "sweep": ("kneadlab.commands.sweep.SweepCommand", "Sweep a parameter grid and audit monotonicity"),
        "verify": ("kneadlab.commands.verify.VerifyCommand", "Run the verification suites"),
        "words": ("kneadlab.commands.words.WordsCommand", "List admissible superstable words"),
    }

    @default("log_level")
    def _default_log_level(self):
        return logging.INFO

    def start(self):
        if self.subapp is None:
            self.print_subcommands()
            self.log.error("No subcommand given")
            self.exit(CONFIG_ERROR_EXIT)
        return self.subapp.start()


main = KneadLab.launch_instance
