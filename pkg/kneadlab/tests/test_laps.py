import math

import numpy as np
import pytest

from kneadlab.errors import DepthTooLarge, NotSelfMap
from kneadlab.kneading import entropy_from_kneading
from kneadlab.laps import (
    critical_preimages,
    entropy_from_lap_ratio,
    entropy_from_laps,
    lap_count,
    lap_growth_ratios,
    lap_sequence,
)
from kneadlab.model import PowerLawMap, full_parameter
from kneadlab.schemas import EntropyMethod


@pytest.mark.parametrize(
    "a, r, y, expected",
    [
        (2.0, 2.0, 0.0, (-math.sqrt(2.0), math.sqrt(2.0))),
        (2.0, 2.0, 2.0, (0.0,)),
        (2.0, 2.0, 3.0, ()),
        (1.0, 3.0, -7.0, (-2.0, 2.0)),
    ],
)
def test_critical_preimages(a, r, y, expected):
    assert critical_preimages(PowerLawMap(a=a, r=r), y) == pytest.approx(expected)


@pytest.mark.parametrize("n, expected", [(1, 2), (2, 4), (5, 32), (10, 1024)])
def test_full_map_laps(n, expected):
    assert lap_count(PowerLawMap(a=2.0, r=2.0), n) == expected


def test_superstable_period_two_laps():
    assert lap_sequence(PowerLawMap(a=1.0, r=2.0), 6) == [2, 3, 3, 3, 3, 3]


@pytest.mark.parametrize("a", [1.6, 1.8, 1.9, 2.0])
def test_laps_are_submultiplicative(a):
    laps = lap_sequence(PowerLawMap(a=a, r=2.0), 16)
    for m in range(1, 16):
        for n in range(1, 17 - m):
            assert laps[m + n - 1] <= laps[m - 1] * laps[n - 1]


def test_lap_entropy_full_map():
    estimate = entropy_from_laps(PowerLawMap(a=2.0, r=2.0), 10)
    assert estimate.value == pytest.approx(math.log(2.0), abs=1e-12)
    assert estimate.method == EntropyMethod.LAP_GROWTH.value


def test_lap_entropy_period_two():
    assert entropy_from_laps(PowerLawMap(a=1.0, r=2.0), 10).value < 0.12


def test_lap_entropy_period_three(golden_log):
    estimate = entropy_from_laps(PowerLawMap(a=1.754877666, r=2.0), 18)
    assert estimate.value == pytest.approx(golden_log, abs=0.05)


def test_lap_entropy_depth():
    with pytest.raises(ValueError):
        entropy_from_laps(PowerLawMap(a=2.0, r=2.0), 4)


def test_lap_count_needs_self_map():
    with pytest.raises(NotSelfMap):
        lap_count(PowerLawMap(a=2.5, r=2.0), 4)


def test_node_budget():
    with pytest.raises(DepthTooLarge):
        lap_count(PowerLawMap(a=2.0, r=2.0), 12, node_budget=1000)


@pytest.mark.slow
@pytest.mark.parametrize("r, lo", [(2.0, 1.8), (2.5, 1.5)])
def test_two_estimates_agree(r, lo):
    for a in np.linspace(lo, full_parameter(r), 50):
        fmap = PowerLawMap(a=float(a), r=r)
        kneading = entropy_from_kneading(fmap, 64)
        laps = entropy_from_laps(fmap, 18)
        # log(l_n) / n decreases to the entropy
        assert laps.value >= kneading.value - kneading.error_bound - 1e-12
        assert laps.value - kneading.value <= kneading.error_bound + laps.error_bound


def test_lap_growth_ratios():
    ratios = lap_growth_ratios([2, 4, 8, 8])
    assert ratios == pytest.approx([math.log(2.0), math.log(2.0), 0.0])


def test_lap_ratio_full_map():
    estimate = entropy_from_lap_ratio(PowerLawMap(a=2.0, r=2.0), 12)
    assert estimate.value == pytest.approx(math.log(2.0), abs=1e-12)
    assert estimate.error_bound == pytest.approx(0.0, abs=1e-12)
    assert estimate.method == EntropyMethod.LAP_RATIO.value


def test_lap_ratio_period_two():
    estimate = entropy_from_lap_ratio(PowerLawMap(a=1.0, r=2.0), 10)
    assert estimate.value == 0.0
    assert estimate.error_bound == 0.0


def test_lap_ratio_period_three(golden_log):
    estimate = entropy_from_lap_ratio(PowerLawMap(a=1.754877666, r=2.0), 18)
    assert estimate.value == pytest.approx(golden_log, abs=0.05)


def test_lap_ratio_removes_constant_factor():
    fmap = PowerLawMap(a=1.0, r=2.0)
    # l = 3 from the second iterate on: log(3) / n is still positive, the ratio is not
    assert entropy_from_laps(fmap, 18).value > 0.05
    assert entropy_from_lap_ratio(fmap, 18).value == 0.0


@pytest.mark.parametrize("window", [0, 18])
def test_lap_ratio_window(window):
    with pytest.raises(ValueError):
        entropy_from_lap_ratio(PowerLawMap(a=2.0, r=2.0), 18, window=window)
