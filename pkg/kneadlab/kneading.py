"""
Kneading words, the signed lexicographic order, kneading determinants and
entropy from the smallest positive zero of the kneading determinant.
"""
import logging
import math
from dataclasses import dataclass
from typing import Iterable, Optional, Tuple

import numpy as np
from scipy.optimize import bisect

from .model import PowerLawMap
from .powerlaw import critical_orbit
from .schemas import EntropyEstimate, EntropyMethod, Order, Symbol

logger = logging.getLogger(__name__)

LOG2 = math.log(2.0)

# theta(e): +1 on the increasing branch, -1 on the decreasing one, 0 at C
BRANCH_SIGN = {Symbol.L: 1, Symbol.R: -1, Symbol.C: 0}

# orientation-reversing symbol of f_a(x) = a - |x|^r (f' < 0 for x > 0)
REVERSING = Symbol.R


@dataclass(frozen=True)
class KneadingWord:
    symbols: Tuple[Symbol, ...]

    def __post_init__(self):
        if not self.symbols:
            raise ValueError("a kneading word has at least one symbol")
        if Symbol.C in self.symbols[:-1]:
            raise ValueError(f"C may only end a kneading word: {self}")

    @property
    def terminated_at_c(self) -> bool:
        return self.symbols[-1] == Symbol.C

    @property
    def prefix(self) -> "Tuple[Symbol, ...]":
        """The C-free part of the word."""
        if self.terminated_at_c:
            return self.symbols[:-1]
        return self.symbols

    def __len__(self):
        return len(self.symbols)

    def __str__(self):
        return "".join(s.value for s in self.symbols)

    def spaced(self) -> str:
        return " ".join(s.value for s in self.symbols)


def parse_word(text: str) -> KneadingWord:
    """
    Parse a word written over {R, L, C}, e.g. "RLC" or "R L C".

    Raises:
        ValueError: on other letters, on an empty word or on an interior C.
    """
    cleaned = "".join(text.split()).upper()
    try:
        symbols = tuple(Symbol(ch) for ch in cleaned)
    except ValueError:
        raise ValueError(f"kneading words use only R, L and C: {text!r}")
    return KneadingWord(symbols)


def symbol_of(w: float, c_tol: float = 0.0) -> Symbol:
    if w > c_tol:
        return Symbol.R
    if w < -c_tol:
        return Symbol.L
    return Symbol.C


def word_from_orbit(values: Iterable[float], c_tol: float = 0.0) -> KneadingWord:
    symbols = []
    for w in values:
        symbol = symbol_of(w, c_tol)
        symbols.append(symbol)
        if symbol == Symbol.C:
            break
    return KneadingWord(tuple(symbols))


def itinerary(fmap: PowerLawMap, n: int, c_tol: float = 0.0) -> KneadingWord:
    """The first n symbols of the kneading sequence, cut at the first C."""
    orbit = critical_orbit(fmap, n)
    return word_from_orbit(orbit.values, c_tol)


def reversal_parity(symbols: Iterable[Symbol]) -> int:
    """Number of orientation-reversing symbols, modulo 2."""
    return sum(1 for s in symbols if s == REVERSING) % 2


def _rank(symbol: Symbol, parity: int) -> int:
    rank = {Symbol.L: 0, Symbol.C: 1, Symbol.R: 2}[symbol]
    return rank if parity == 0 else 2 - rank


def signed_lex_compare(u: KneadingWord, v: KneadingWord) -> Order:
    """
    Compare two words in the signed lexicographic order.

    At the first difference the order is L < C < R after an even number of
    R's and R < C < L after an odd number. Words that agree on their common
    length compare equal.
    """
    parity = 0
    for x, y in zip(u.symbols, v.symbols):
        if x != y:
            rx, ry = _rank(x, parity), _rank(y, parity)
            return Order.LESS if rx < ry else Order.GREATER
        if x == REVERSING:
            parity ^= 1
    return Order.EQUAL


@dataclass(frozen=True)
class KneadingSeries:
    """
    Coefficients eps_1..eps_N of D(t) = 1 + sum eps_n t^n.

    `exact` is set when the word ended in C, so every later coefficient is 0
    and the polynomial is the whole series.
    """

    coefficients: Tuple[int, ...]
    exact: bool = False

    def __post_init__(self):
        seen_zero = False
        for eps in self.coefficients:
            if seen_zero and eps != 0:
                raise ValueError("coefficients after a critical hit must vanish")
            seen_zero = seen_zero or eps == 0

    @property
    def depth(self) -> int:
        return len(self.coefficients)

    def padded(self, depth: int) -> "KneadingSeries":
        """Extend an exact series with zeros up to `depth` coefficients."""
        if depth <= self.depth:
            return self
        if not self.exact:
            raise ValueError("only a series cut at C can be padded")
        return KneadingSeries(self.coefficients + (0,) * (depth - self.depth), exact=True)

    def polynomial(self) -> np.ndarray:
        """Coefficients highest degree first, as numpy.polyval expects."""
        return np.array((1,) + self.coefficients, dtype=float)[::-1]


def kneading_coefficients(word: KneadingWord) -> KneadingSeries:
    """eps_n = prod_{i<=n} theta(e_i), with theta(L)=+1, theta(R)=-1, theta(C)=0."""
    coefficients = []
    eps = 1
    for symbol in word.symbols:
        eps *= BRANCH_SIGN[symbol]
        coefficients.append(eps)
    return KneadingSeries(tuple(coefficients), exact=word.terminated_at_c)


def kneading_determinant(series: KneadingSeries, t):
    """Evaluate the truncated D_N(t); `t` may be an array."""
    return np.polyval(series.polynomial(), t)


@dataclass(frozen=True)
class RootResult:
    """
    Smallest zero t0 of D_N in (0, 1], and an interval [lower, upper] that
    contains the smallest zero of the untruncated series. `tail_bound`
    bounds |D - D_N| at t0.
    """

    t0: float
    lower: float
    upper: float
    no_root: bool
    tail_bound: float = 0.0


def _first_crossing(poly: np.ndarray, cells: int):
    grid = np.arange(cells + 1, dtype=float) / cells
    values = np.polyval(poly, grid)
    # D(1) = 0 exactly is the zero-entropy boundary, not an interior zero
    inside = np.flatnonzero(values[1:cells] <= 0)
    if inside.size:
        k = int(inside[0]) + 1
        if values[k] == 0:
            return grid[k], grid[k]
        return grid[k - 1], grid[k]
    if values[cells] < 0:
        return grid[cells - 1], grid[cells]
    return None


def series_tail(t, depth: int):
    """|sum_{n>N} eps_n t^n| <= t^(N+1) / (1 - t) for coefficients in {-1, 0, 1}."""
    return t ** (depth + 1) / (1.0 - t)


def _first_drop(func, cells: int, tol: float) -> Optional[float]:
    """First t in (0, 1) with func(t) <= 0 on a grid of `cells` cells, refined by bisection."""
    grid = np.arange(1, cells, dtype=float) / cells
    below = np.flatnonzero(func(grid) <= 0)
    if not below.size:
        return None
    k = int(below[0])
    hi = grid[k]
    lo = grid[k - 1] if k > 0 else 0.0
    if func(hi) == 0:
        return float(hi)
    return float(bisect(func, lo, hi, xtol=tol))


def _enclosure(poly: np.ndarray, depth: int, tol: float) -> Tuple[float, float]:
    # D >= D_N - tail > 0 before `lower`; D <= D_N + tail <= 0 at `upper`
    cells = 16 * depth
    lower = _first_drop(lambda t: np.polyval(poly, t) - series_tail(t, depth), cells, tol)
    upper = _first_drop(lambda t: np.polyval(poly, t) + series_tail(t, depth), cells, tol)
    if lower is None:
        lower = (cells - 1) / cells
    return lower, 1.0 if upper is None else upper


def smallest_positive_root(series: KneadingSeries, tol: float = 1e-12) -> RootResult:
    """
    Locate the smallest zero of D_N in (0, 1].

    A sign scan on a grid of step 1/(4N), repeated at half the step when
    nothing is found, brackets the zero; bisection refines it to `tol`.
    Without a sign change t0 = 1 is returned with `no_root` set.

    For a series cut at C the enclosure is t0 itself. Otherwise the
    unknown coefficients past N move D by at most `series_tail`, and the
    zero of D is enclosed between the first zeros of D_N - tail and
    D_N + tail (1 when the latter has none).
    """
    if series.depth < 8:
        raise ValueError(f"root search needs at least 8 coefficients, got {series.depth}")
    poly = series.polynomial()
    cells = 4 * series.depth
    bracket = _first_crossing(poly, cells)
    if bracket is None:
        bracket = _first_crossing(poly, 2 * cells)

    if bracket is None:
        t0, no_root = 1.0, True
    else:
        lo, hi = bracket
        t0 = lo if lo == hi else bisect(lambda t: np.polyval(poly, t), lo, hi, xtol=tol)
        t0, no_root = float(t0), False

    if series.exact:
        return RootResult(t0=t0, lower=t0, upper=t0, no_root=no_root)
    lower, upper = _enclosure(poly, series.depth, tol)
    return RootResult(
        t0=t0,
        lower=min(lower, t0),
        upper=max(upper, t0),
        no_root=no_root,
        tail_bound=float(series_tail(t0, series.depth)) if t0 < 1 else math.inf,
    )


def _clipped_entropy(t: float) -> float:
    # unimodal maps have 0 <= h_top <= log 2
    return min(max(-math.log(t), 0.0), LOG2)


def entropy_from_root(root: RootResult, depth: int, tol: float) -> EntropyEstimate:
    value = _clipped_entropy(root.t0)
    highest = _clipped_entropy(root.lower)
    lowest = _clipped_entropy(root.upper)
    error = max(highest - value, value - lowest) + tol / root.lower
    return EntropyEstimate(
        value=value,
        method=EntropyMethod.KNEADING_ROOT,
        depth=depth,
        error_bound=error,
        no_root=root.no_root,
    )


def entropy_from_word(word: KneadingWord, depth: int, tol: float = 1e-12) -> EntropyEstimate:
    """Entropy of the first `depth` symbols of a kneading sequence."""
    if depth < 16:
        raise ValueError(f"kneading entropy needs series depth >= 16, got {depth}")
    series = kneading_coefficients(word)
    if series.exact:
        series = series.padded(depth)
    elif series.depth < depth:
        raise ValueError(f"word {word} is shorter than the series depth {depth}")
    root = smallest_positive_root(series, tol)
    estimate = entropy_from_root(root, depth, tol)
    logger.debug("kneading entropy of %s: t0=%r h=%r (+/- %r)", word, root.t0, estimate.value, estimate.error_bound)
    return estimate


def entropy_from_kneading(
    fmap: PowerLawMap, depth: int = 64, tol: float = 1e-12, c_tol: float = 0.0
) -> EntropyEstimate:
    """h_top = -log t0 for the depth-N kneading determinant of fmap."""
    if depth < 16:
        raise ValueError(f"kneading entropy needs series depth >= 16, got {depth}")
    return entropy_from_word(itinerary(fmap, depth, c_tol), depth, tol)
