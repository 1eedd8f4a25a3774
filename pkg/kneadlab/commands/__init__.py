from .base import BaseCommand
from .entropy import EntropyCommand
from .superstable import SuperstableCommand
from .sweep import SweepCommand
from .verify import VerifyCommand
from .words import WordsCommand
