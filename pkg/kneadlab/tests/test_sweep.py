import math

import numpy as np
import pytest

import kneadlab.sweep as sweep_module
from kneadlab.errors import InvalidParameter, MonotonicityViolation, NearCritical, NotSelfMap, PrefixMismatch
from kneadlab.kneading import itinerary
from kneadlab.model import PowerLawMap, full_parameter
from kneadlab.powerlaw import critical_orbit, phase_derivative
from kneadlab.schemas import RecordFlag, SweepReport, Symbol, ViolationKind
from kneadlab.sweep import (
    check_window,
    default_grid,
    entropy_continuity_probe,
    entropy_curve,
    entropy_r_continuity_probe,
    locate_symbol_change,
    monotonicity_audit,
    r_continuity_probe,
    sample_point,
)
from kneadlab.thurston import admissible_words, sign_pattern, thurston_fixed_point

from .utils import make_record


def test_default_grid():
    grid = default_grid(2.0, 4)
    assert grid[0] == 0.5
    assert grid[-1] == 2.0
    assert len(grid) == 4


def test_check_window():
    assert check_window(2.0, 1.5) == 1.5
    assert check_window(2.0, 2.0 + 1e-13) == 2.0
    with pytest.raises(NotSelfMap):
        check_window(2.0, 2.1)
    with pytest.raises(InvalidParameter):
        check_window(2.0, 0.0)


def test_sample_point_superstable():
    record = sample_point(1.0, 2.0, with_laps=True)
    assert record.word == "RC"
    assert record.entropy == 0.0
    assert RecordFlag.NEAR_CRITICAL.value in record.flags
    assert record.entropy_laps.value == pytest.approx(math.log(3.0) / 18)


def test_sample_point_full_map():
    record = sample_point(2.0, 2.0)
    assert record.word == "R" + "L" * 29
    assert record.entropy == pytest.approx(math.log(2.0), abs=1e-3)
    assert record.entropy_laps is None
    assert record.flags == []


def test_sample_point_escape():
    record = sample_point(3.0, 2.0)
    assert record.flags == [RecordFlag.ESCAPED.value]
    assert record.entropy is None


async def test_entropy_curve_three_points():
    report = await entropy_curve(2.0, [1.0, 1.5, 2.0], with_laps=True)
    entropies = [record.entropy for record in report.records]
    assert entropies[0] == 0.0
    assert entropies[1] == pytest.approx(0.241, abs=0.03)
    assert entropies[2] == pytest.approx(math.log(2.0), abs=1e-3)
    assert report.violations == []


async def test_entropy_curve_single_point():
    report = await entropy_curve(2.0, [full_parameter(2.0)])
    assert len(report.records) == 1
    assert report.records[0].entropy == pytest.approx(math.log(2.0), abs=1e-3)


async def test_entropy_curve_zero_entropy():
    report = await entropy_curve(3.0, [1.0])
    assert report.records[0].entropy == 0.0


async def test_entropy_curve_outside_window():
    with pytest.raises(NotSelfMap):
        await entropy_curve(2.0, [1.0, 2.5])


async def test_entropy_curve_unsorted_grid():
    with pytest.raises(InvalidParameter):
        await entropy_curve(2.0, [1.5, 1.0])


async def test_entropy_curve_empty_grid():
    with pytest.raises(InvalidParameter):
        await entropy_curve(2.0, [])


async def test_entropy_curve_depths():
    with pytest.raises(InvalidParameter):
        await entropy_curve(2.0, [1.0], word_depth=5)
    with pytest.raises(InvalidParameter):
        await entropy_curve(2.0, [1.0], series_depth=16)


@pytest.mark.slow
async def test_entropy_curve_in_worker_processes():
    grid = np.linspace(1.2, 2.0, 24)
    serial = await entropy_curve(2.0, grid)
    parallel = await entropy_curve(2.0, grid, workers=2)
    assert [r.model_dump() for r in parallel.records] == [r.model_dump() for r in serial.records]


@pytest.mark.slow
@pytest.mark.parametrize("r", [1.5, 2.0, 2.5, 3.7])
async def test_sweep_over_the_window_is_monotone(r):
    grid = np.linspace(0.5, full_parameter(r), 2001)[1:]
    report = await entropy_curve(r, grid, word_depth=30)
    assert report.count(ViolationKind.WORD_ORDER) == 0
    assert report.count(ViolationKind.ENTROPY_ORDER) == 0


def test_audit_of_monotone_records():
    records = [
        make_record(0.8, "RRRR", 0.0),
        make_record(1.2, "RLRL", 0.0),
        make_record(1.8, "RLLR", 0.5),
    ]
    assert monotonicity_audit(SweepReport(records=records)).violations == []


def test_audit_finds_swapped_words():
    records = [
        make_record(0.8, "RRRR"),
        make_record(1.2, "RLLR"),
        make_record(1.8, "RLRL"),
    ]
    report = monotonicity_audit(SweepReport(records=records))
    assert report.count(ViolationKind.WORD_ORDER) == 1
    violation = report.violations[0]
    assert (violation.i, violation.j) == (1, 2)
    assert violation.magnitude == 3


def test_audit_finds_entropy_backstep():
    records = [make_record(1.0, "RL", 0.3, 0.01), make_record(1.1, "RL", 0.2, 0.01)]
    report = monotonicity_audit(SweepReport(records=records))
    assert report.count(ViolationKind.ENTROPY_ORDER) == 1
    assert report.violations[0].magnitude == pytest.approx(0.1)
    assert report.max_entropy_backstep == pytest.approx(0.1)


def test_audit_entropy_slack():
    records = [make_record(1.0, "RL", 0.3, 0.01), make_record(1.1, "RL", 0.2, 0.01)]
    report = monotonicity_audit(SweepReport(records=records), entropy_slack=0.2)
    assert report.violations == []
    assert report.max_entropy_backstep == pytest.approx(0.1)


def test_audit_default_slack_uses_error_bounds():
    records = [make_record(1.0, "RL", 0.3, 0.03), make_record(1.1, "RL", 0.2, 0.03)]
    assert monotonicity_audit(SweepReport(records=records)).violations == []


def test_report_must_be_sorted():
    with pytest.raises(ValueError):
        SweepReport(records=[make_record(1.2, "RL"), make_record(1.0, "RR")])


@pytest.mark.parametrize(
    "bracket, n, before, after, a_star",
    [
        ((0.8, 1.2), 2, Symbol.R, Symbol.L, 1.0),
        ((1.7, 1.8), 3, Symbol.R, Symbol.L, 1.754877666),
    ],
)
def test_locate_symbol_change(bracket, n, before, after, a_star):
    change = locate_symbol_change(2.0, n, bracket)
    a, found_before, found_after, parity = change
    assert a == pytest.approx(a_star, abs=1e-9)
    assert (found_before, found_after) == (before, after)
    assert parity == "odd"


def test_locate_symbol_change_without_change():
    with pytest.raises(PrefixMismatch):
        locate_symbol_change(2.0, 3, (0.6, 0.9))


def test_locate_symbol_change_in_wrong_direction(monkeypatch):
    real = sweep_module.reversal_parity
    monkeypatch.setattr(sweep_module, "reversal_parity", lambda symbols: 1 - real(symbols))
    with pytest.raises(MonotonicityViolation):
        locate_symbol_change(2.0, 2, (0.8, 1.2))


@pytest.mark.parametrize("r", [2.0, 2.5])
def test_symbol_changes_follow_parity(r):
    for word, a_star in admissible_words(r, 7):
        n = len(word)
        change = locate_symbol_change(r, n, (a_star - 1e-7, a_star + 1e-7))
        even = change.parity == "even"
        assert (change.before, change.after) == ((Symbol.L, Symbol.R) if even else (Symbol.R, Symbol.L))
        assert change.a_star == pytest.approx(a_star, abs=1e-10)


def test_symbol_change_matches_thurston_parameter(period3_parameter):
    change = locate_symbol_change(2.0, 3, (1.7, 1.8))
    fixed = thurston_fixed_point(sign_pattern("RLC"), 2.0)
    assert change.a_star == pytest.approx(fixed.parameter, abs=1e-8)


def test_r_continuity_probe():
    assert r_continuity_probe(1.6, 2.0, 10, 1e-6)


def test_r_continuity_probe_near_critical():
    with pytest.raises(NearCritical):
        r_continuity_probe(1.0, 2.0, 2, 1e-6)


def _r_sensitivity(a, r, n):
    """|d w_i / d r| along the critical orbit, i = 1..n."""
    fmap = PowerLawMap(a=a, r=r)
    slopes = [0.0]
    for w in critical_orbit(fmap, n).values[:-1]:
        slopes.append(phase_derivative(fmap, w) * slopes[-1] - abs(w) ** r * math.log(abs(w)))
    return np.abs(slopes)


@pytest.mark.slow
def test_r_continuity_probe_at_random_parameters():
    rng = np.random.default_rng(11)
    checked = 0
    while checked < 50:
        r = float(rng.uniform(1.5, 3.0))
        a = float(rng.uniform(1.0, 0.98 * full_parameter(r)))
        orbit = np.abs(critical_orbit(PowerLawMap(a=a, r=r), 10).values)
        # the orbit must not come within reach of 0 when r moves by delta
        if orbit.min() < 5e-2 or np.any(orbit <= 10 * 1e-6 * _r_sensitivity(a, r, 10)):
            continue
        assert r_continuity_probe(a, r, 10, 1e-6)
        checked += 1


@pytest.mark.slow
@pytest.mark.parametrize("r, lo", [(2.0, 1.8), (2.5, 1.5)])
def test_entropy_continuity_at_random_parameters(r, lo):
    rng = np.random.default_rng(5)
    radius = 1e-3
    for a0 in rng.uniform(lo + radius, full_parameter(r) - radius, 10):
        assert entropy_continuity_probe(r, float(a0), radius, steps=64) <= 0.02


def test_entropy_continuity_at_period_three():
    assert entropy_continuity_probe(2.0, 1.7549, 1e-3, steps=64) <= 0.02


def test_entropy_continuity_below_full_map():
    assert entropy_continuity_probe(2.0, 2.0 - 1e-3, 1e-3, steps=32, one_sided=True) <= 0.02


def test_entropy_continuity_zero_radius():
    assert entropy_continuity_probe(2.0, 1.5, 0.0) == 0.0


def test_entropy_continuity_in_r():
    assert entropy_r_continuity_probe(1.8, 2.0, 1e-3, steps=16) <= 0.02


def test_itinerary_changes_only_through_c():
    a_star = 1.0
    left = itinerary(PowerLawMap(a=a_star - 1e-6, r=2.0), 2)
    right = itinerary(PowerLawMap(a=a_star + 1e-6, r=2.0), 2)
    assert str(left) == "RR"
    assert str(right) == "RL"
