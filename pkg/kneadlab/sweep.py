"""
Parameter sweeps over a, with audits of the monotonicity of kneading words
and entropy, localization of symbol changes and continuity probes.
"""
import asyncio
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .errors import (
    DepthTooLarge,
    InvalidParameter,
    MonotonicityViolation,
    NearCritical,
    NotSelfMap,
    OrbitEscaped,
    PrefixMismatch,
)
from .kneading import (
    KneadingWord,
    entropy_from_kneading,
    entropy_from_word,
    itinerary,
    parse_word,
    reversal_parity,
    signed_lex_compare,
    word_from_orbit,
)
from .laps import entropy_from_laps
from .model import PowerLawMap, full_parameter
from .powerlaw import critical_orbit
from .schemas import Order, RecordFlag, SweepRecord, SweepReport, Symbol, Violation, ViolationKind
from .thurston import bisect_superstable

logger = logging.getLogger(__name__)

# |w_i| below this at word depth flags the grid point instead of producing C
NEAR_CRITICAL_CUTOFF = 1e-12

# r_continuity_probe needs the orbit this far from 0
PROBE_MARGIN = 1e-6

# window endpoints may overshoot a_full by this much through rounding
WINDOW_SLACK = 1e-12

DEFAULT_A_MIN = 0.5


@dataclass(frozen=True)
class SymbolChange:
    a_star: float
    before: Symbol
    after: Symbol
    parity: str
    prefix: Tuple[Symbol, ...]

    def __iter__(self):
        return iter((self.a_star, self.before, self.after, self.parity))


def default_grid(r: float, count: int, a_min: float = DEFAULT_A_MIN) -> np.ndarray:
    """`count` points on [a_min, a_full(r)], both ends included."""
    return np.linspace(a_min, full_parameter(r), count)


def check_window(r: float, a: float) -> float:
    """Return a, pulled onto a_full when it overshoots by rounding only."""
    a_full = full_parameter(r)
    if not a > 0:
        raise InvalidParameter(f"a={a!r} is outside the valid window (0, {a_full!r}] for r={r!r}")
    if a > a_full:
        if a - a_full <= WINDOW_SLACK * a_full:
            return a_full
        raise NotSelfMap(
            f"a={a!r} is outside the valid window (0, {a_full!r}] for r={r!r}",
            a=a,
            r=r,
            a_full=a_full,
        )
    return a


def sample_point(
    a: float,
    r: float,
    word_depth: int = 30,
    series_depth: int = 64,
    with_laps: bool = False,
    lap_depth: int = 18,
    c_tol: float = 0.0,
    tol: float = 1e-12,
) -> SweepRecord:
    """Word and entropy estimates at one grid point. Failures become flags."""
    fmap = PowerLawMap(a=a, r=r)
    try:
        orbit = critical_orbit(fmap, max(word_depth, series_depth))
    except OrbitEscaped:
        logger.warning("critical orbit escaped at a=%r r=%r", a, r)
        return SweepRecord(a=a, r=r, word="", flags=[RecordFlag.ESCAPED])

    flags = []
    if orbit.min_abs(word_depth) < NEAR_CRITICAL_CUTOFF:
        flags.append(RecordFlag.NEAR_CRITICAL)
    word = word_from_orbit(orbit.values[:word_depth], c_tol)
    kneading = entropy_from_word(word_from_orbit(orbit.values[:series_depth], c_tol), series_depth, tol)
    if kneading.no_root:
        flags.append(RecordFlag.NO_ROOT)

    laps = None
    if with_laps:
        try:
            laps = entropy_from_laps(fmap, lap_depth)
        except DepthTooLarge as e:
            logger.warning("lap entropy skipped at a=%r r=%r: %s", a, r, e)
    return SweepRecord(
        a=a,
        r=r,
        word=str(word),
        entropy_kneading=kneading,
        entropy_laps=laps,
        flags=flags,
    )


def _sample_chunk(a_values: List[float], options: Dict) -> List[SweepRecord]:
    return [sample_point(a, **options) for a in a_values]


def _first_difference(u: KneadingWord, v: KneadingWord) -> int:
    for position, (x, y) in enumerate(zip(u.symbols, v.symbols), start=1):
        if x != y:
            return position
    return 0


def monotonicity_audit(report: SweepReport, entropy_slack: Optional[float] = None) -> SweepReport:
    """
    Fill in the violations of a sorted report.

    Words are compared on neighbouring records, the magnitude of a word
    violation being the first position where the words differ. The signed
    order is transitive, so a sorted report whose neighbours are in order
    has every pair i < j in order; one out-of-order pair forces some
    neighbour violation. Each entropy
    is compared with the largest earlier entropy; the allowed backstep is
    `entropy_slack` or, by default, twice the sum of the two error bounds.
    """
    records = report.records
    violations = []

    words = [parse_word(rec.word) if rec.word else None for rec in records]
    for i in range(len(records) - 1):
        u, v = words[i], words[i + 1]
        if u is None or v is None:
            continue
        if signed_lex_compare(u, v) == Order.GREATER:
            violations.append(
                Violation(i=i, j=i + 1, kind=ViolationKind.WORD_ORDER, magnitude=_first_difference(u, v))
            )

    max_backstep = 0.0
    best = None
    for j, rec in enumerate(records):
        if rec.entropy_kneading is None:
            continue
        if best is not None:
            top = records[best].entropy_kneading
            backstep = top.value - rec.entropy_kneading.value
            if backstep > 0:
                max_backstep = max(max_backstep, backstep)
                slack = entropy_slack
                if slack is None:
                    slack = 2.0 * (top.error_bound + rec.entropy_kneading.error_bound)
                if backstep > slack:
                    violations.append(
                        Violation(i=best, j=j, kind=ViolationKind.ENTROPY_ORDER, magnitude=backstep)
                    )
        if best is None or rec.entropy_kneading.value > records[best].entropy_kneading.value:
            best = j

    violations.sort(key=lambda item: (item.j, item.i))
    return SweepReport(records=records, violations=violations, max_entropy_backstep=max_backstep)


async def entropy_curve(
    r: float,
    a_grid: Sequence[float],
    word_depth: int = 30,
    series_depth: int = 64,
    with_laps: bool = False,
    lap_depth: int = 18,
    c_tol: float = 0.0,
    tol: float = 1e-12,
    entropy_slack: Optional[float] = None,
    workers: int = 1,
) -> SweepReport:
    """
    Evaluate every grid point and audit the result.

    With workers > 1 the grid is split into chunks that run in a process
    pool; records are reassembled in grid order.
    """
    if word_depth < 10 or series_depth < 32:
        raise InvalidParameter(
            f"sweeps need word depth >= 10 and series depth >= 32, got {word_depth} and {series_depth}"
        )
    grid = [check_window(r, float(a)) for a in a_grid]
    if not grid:
        raise InvalidParameter("the parameter grid is empty")
    if any(x > y for x, y in zip(grid, grid[1:])):
        raise InvalidParameter("the parameter grid must be sorted ascending")

    options = dict(
        r=r,
        word_depth=word_depth,
        series_depth=series_depth,
        with_laps=with_laps,
        lap_depth=lap_depth,
        c_tol=c_tol,
        tol=tol,
    )
    if workers <= 1 or len(grid) == 1:
        records = _sample_chunk(grid, options)
    else:
        chunks = [list(chunk) for chunk in np.array_split(grid, min(len(grid), 4 * workers))]
        loop = asyncio.get_running_loop()
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = await asyncio.gather(
                *(loop.run_in_executor(pool, _sample_chunk, chunk, options) for chunk in chunks)
            )
        records = [record for part in parts for record in part]

    report = monotonicity_audit(SweepReport(records=records), entropy_slack)
    logger.info(
        "sweep r=%r over %d points: %d word-order and %d entropy-order violations",
        r,
        len(records),
        report.count(ViolationKind.WORD_ORDER),
        report.count(ViolationKind.ENTROPY_ORDER),
    )
    return report


def locate_symbol_change(
    r: float, n: int, bracket: Tuple[float, float], tol: float = 1e-15
) -> SymbolChange:
    """
    Find where e_n changes inside `bracket`.

    The endpoint itineraries must share their first n-1 symbols and differ
    at n. The change must go L -> R after an even number of R's in the
    shared prefix and R -> L after an odd number.

    Raises:
        PrefixMismatch: if the endpoints do not have that shape.
        MonotonicityViolation: if the change goes the other way.
    """
    if n < 2:
        raise ValueError(f"the first symbol never changes, got n={n}")
    lo, hi = sorted(bracket)
    u = itinerary(PowerLawMap(a=lo, r=r), n)
    v = itinerary(PowerLawMap(a=hi, r=r), n)
    if len(u) != n or len(v) != n or u.symbols[: n - 1] != v.symbols[: n - 1] or u.symbols[-1] == v.symbols[-1]:
        raise PrefixMismatch(
            f"itineraries {u} at a={lo!r} and {v} at a={hi!r} do not differ exactly at position {n}",
            bracket=(lo, hi),
            n=n,
        )
    prefix = u.symbols[: n - 1]
    before, after = u.symbols[-1], v.symbols[-1]
    parity = reversal_parity(prefix)
    expected = (Symbol.L, Symbol.R) if parity == 0 else (Symbol.R, Symbol.L)
    if (before, after) != expected:
        raise MonotonicityViolation(
            f"e_{n} goes {before.value} -> {after.value} after prefix {KneadingWord(prefix)}",
            bracket=(lo, hi),
            n=n,
        )
    a_star = bisect_superstable(r, KneadingWord(prefix + (Symbol.C,)), (lo, hi), tol)
    return SymbolChange(
        a_star=a_star,
        before=before,
        after=after,
        parity="even" if parity == 0 else "odd",
        prefix=prefix,
    )


def r_continuity_probe(a: float, r0: float, n: int, delta: float) -> bool:
    """
    True when the depth-n itinerary is the same at r0 - delta, r0 and
    r0 + delta.

    Raises:
        NearCritical: if the orbit at (a, r0) comes within 1e-6 of 0.
    """
    orbit = critical_orbit(PowerLawMap(a=a, r=r0), n)
    closest = orbit.min_abs()
    if closest <= PROBE_MARGIN:
        raise NearCritical(
            f"critical orbit of a={a!r}, r={r0!r} comes within {closest:.3g} of 0",
            a=a,
            r=r0,
            n=n,
        )
    middle = word_from_orbit(orbit.values)
    for r in (r0 - delta, r0 + delta):
        if itinerary(PowerLawMap(a=a, r=r), n) != middle:
            return False
    return True


def _max_jump(values: Sequence[float]) -> float:
    if len(values) < 2:
        return 0.0
    return float(np.max(np.abs(np.diff(values))))


def entropy_continuity_probe(
    r: float,
    a0: float,
    radius: float,
    steps: int = 64,
    series_depth: int = 64,
    one_sided: bool = False,
    tol: float = 1e-12,
) -> float:
    """
    Largest entropy difference between neighbours of a `steps`-step grid on
    [a0 - radius, a0 + radius] ([a0, a0 + radius] when one_sided).
    """
    if radius == 0:
        return 0.0
    lo = a0 if one_sided else a0 - radius
    hi = check_window(r, a0 + radius)
    check_window(r, lo)
    entropies = [
        entropy_from_kneading(PowerLawMap(a=float(a), r=r), series_depth, tol).value
        for a in np.linspace(lo, hi, steps + 1)
    ]
    jump = _max_jump(entropies)
    logger.debug("entropy continuity r=%r around a=%r: max jump %g", r, a0, jump)
    return jump


def entropy_r_continuity_probe(
    a: float, r0: float, radius: float, steps: int = 64, series_depth: int = 64, tol: float = 1e-12
) -> float:
    """Largest entropy difference between neighbours on an r-grid at fixed a."""
    if radius == 0:
        return 0.0
    r_grid = np.linspace(r0 - radius, r0 + radius, steps + 1)
    if not r_grid[0] > 1:
        raise InvalidParameter(f"exponents down to {r_grid[0]!r} leave r > 1")
    entropies = []
    for r in r_grid:
        check_window(float(r), a)
        entropies.append(entropy_from_kneading(PowerLawMap(a=a, r=float(r)), series_depth, tol).value)
    return _max_jump(entropies)
