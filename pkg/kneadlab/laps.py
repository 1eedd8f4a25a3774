"""
Lap numbers of the iterates of f_a, counted from the tree of critical
preimages, the entropy estimate log(l(f^n)) / n and its growth-ratio variant.
"""
import logging
import math
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .errors import DepthTooLarge
from .model import PowerLawMap
from .powerlaw import core_interval
from .schemas import EntropyEstimate, EntropyMethod

logger = logging.getLogger(__name__)

NODE_BUDGET = 2**24

# relative slack when pruning preimages to the closed core interval
PRUNE_SLACK = 1e-12


def critical_preimages(fmap: PowerLawMap, y: float) -> Tuple[float, ...]:
    """All x with f_a(x) = y, in increasing order."""
    if y > fmap.a:
        return ()
    if y == fmap.a:
        return (0.0,)
    root = (fmap.a - y) ** (1.0 / fmap.r)
    return (-root, root)


def _preimage_level(fmap: PowerLawMap, level: np.ndarray) -> np.ndarray:
    """Vectorized critical_preimages over a whole tree level."""
    below = level[level < fmap.a]
    roots = (fmap.a - below) ** (1.0 / fmap.r)
    at_top = np.zeros(np.count_nonzero(level == fmap.a))
    return np.concatenate((-roots, roots, at_top))


def lap_sequence(fmap: PowerLawMap, n: int, node_budget: int = NODE_BUDGET) -> List[int]:
    """
    Lap numbers l(f^k) for k = 1..n.

    The turning points of f^k on the core interval are the distinct points of
    f^{-j}({0}), j < k. They are enumerated breadth first, one tree level per
    iterate; points already seen are not expanded again.

    Raises:
        DepthTooLarge: when the number of tree nodes would exceed node_budget.
    """
    if n < 1:
        raise ValueError(f"lap depth must be positive, got {n}")
    lo, hi = core_interval(fmap)
    slack = PRUNE_SLACK * max(1.0, abs(lo), abs(hi))

    level = np.array([0.0])
    seen = np.array([0.0])
    laps = []
    for k in range(1, n + 1):
        laps.append(1 + seen.size)
        if k == n:
            break
        if seen.size + 2 * level.size > node_budget:
            raise DepthTooLarge(
                f"preimage tree exceeds {node_budget} nodes at depth {k + 1}",
                depth=k + 1,
                node_budget=node_budget,
            )
        level = _preimage_level(fmap, level)
        level = level[(level >= lo - slack) & (level <= hi + slack)]
        level = np.setdiff1d(level, seen)
        seen = np.union1d(seen, level)
        if not level.size:
            laps.extend([1 + seen.size] * (n - k))
            break
    logger.debug("lap numbers a=%r r=%r: %s", fmap.a, fmap.r, laps)
    return laps


def lap_count(fmap: PowerLawMap, n: int, node_budget: int = NODE_BUDGET) -> int:
    """l(f^n), the number of maximal monotone pieces of f^n on the core."""
    return lap_sequence(fmap, n, node_budget)[-1]


def entropy_from_laps(
    fmap: PowerLawMap, depth: int = 18, node_budget: int = NODE_BUDGET
) -> EntropyEstimate:
    """
    h ~ log(l(f^depth)) / depth.

    The error bound log(l) (1/n - 1/(n+1)) + log(2)/n is a documented
    slack, not a sharp estimate.
    """
    if depth < 8:
        raise ValueError(f"lap entropy needs depth >= 8, got {depth}")
    laps = lap_count(fmap, depth, node_budget)
    log_laps = math.log(laps)
    return EntropyEstimate(
        value=log_laps / depth,
        method=EntropyMethod.LAP_GROWTH,
        depth=depth,
        error_bound=log_laps * (1.0 / depth - 1.0 / (depth + 1)) + math.log(2.0) / depth,
    )


def lap_growth_ratios(laps: Sequence[int]) -> np.ndarray:
    """log(l_{k+1} / l_k) for consecutive lap numbers."""
    return np.diff(np.log(np.asarray(laps, dtype=float)))


def entropy_from_lap_ratio(
    fmap: PowerLawMap, depth: int = 18, window: Optional[int] = None, node_budget: int = NODE_BUDGET
) -> EntropyEstimate:
    """
    h ~ log(l_n / l_{n-k}) / k over the last k = `window` steps (n // 2 by
    default).

    The ratio cancels the constant C in l_n ~ C s^n, which biases
    log(l_n) / n upwards by log(C) / n. The error bound is the spread of
    the one-step log ratios inside the window, a diagnostic only.
    """
    if depth < 8:
        raise ValueError(f"lap entropy needs depth >= 8, got {depth}")
    window = depth // 2 if window is None else window
    if not 1 <= window < depth:
        raise ValueError(f"ratio window must lie in [1, {depth - 1}], got {window}")
    ratios = lap_growth_ratios(lap_sequence(fmap, depth, node_budget))[-window:]
    return EntropyEstimate(
        value=min(max(float(np.mean(ratios)), 0.0), math.log(2.0)),
        method=EntropyMethod.LAP_RATIO,
        depth=depth,
        error_bound=float(np.ptp(ratios)),
    )
