"""Kneading theory and topological entropy of the family f_a(x) = a - |x|^r."""
from ._version import __version__
from .errors import KneadLabError
from .model import PowerLawMap
