"""
Verification suites: fixed points of the Thurston map, agreement of the two
superstable solvers, the analytic Jacobian, the determinant identity and
its telescoping form, and positivity at superstable parameters.
"""
import logging
from dataclasses import dataclass
from typing import Iterable, List, Tuple

import numpy as np

from .errors import KneadLabError
from .identity import (
    determinant_identity_residual,
    positivity_check,
    relative_gap,
    telescoping_sum,
)
from .kneading import KneadingWord, parse_word
from .model import PowerLawMap, full_parameter
from .powerlaw import critical_orbit, derivative_product
from .schemas import CheckResult, VerificationReport
from .thurston import (
    CriticalOrbitVector,
    SignPattern,
    admissible_words,
    bisect_superstable,
    jacobian_fd_residual,
    orbit_vector,
    thurston_apply,
    thurston_fixed_point,
)

logger = logging.getLogger(__name__)

UNIVERSALITY_TOL = 1e-10

# spectral radius must stay this far below 1
CONTRACTION_MARGIN = 1e-3

# generic identity samples keep the orbit away from 0 and the
# telescoping sum away from heavy cancellation
GENERIC_MIN_ORBIT = 1e-3
GENERIC_MAX_CONDITION = 1e6


@dataclass(frozen=True)
class SuperstableCase:
    r: float
    word: KneadingWord
    a_star: float

    @property
    def n(self) -> int:
        return len(self.word)


def superstable_cases(r_values: Iterable[float], max_n: int) -> List[SuperstableCase]:
    cases = []
    for r in r_values:
        cases.extend(SuperstableCase(r=r, word=word, a_star=a) for word, a in admissible_words(r, max_n))
    return cases


def _result(name: str, residuals: List[float], tolerance: float, failures: List[str]) -> CheckResult:
    worst = max(residuals) if residuals else 0.0
    passed = not failures and worst <= tolerance
    detail = "; ".join(failures[:5])
    if not passed:
        logger.warning("check %s failed: max residual %g > %g %s", name, worst, tolerance, detail)
    return CheckResult(
        name=name,
        cases=len(residuals) + len(failures),
        max_residual=worst,
        tolerance=tolerance,
        passed=passed,
        detail=detail,
    )


def check_universality(r_values: Iterable[float]) -> CheckResult:
    """RC is superstable at a = 1 for every r; both solvers must find it."""
    word = parse_word("RC")
    residuals, failures = [], []
    for r in r_values:
        try:
            by_bisection = bisect_superstable(r, word, (0.5, full_parameter(r)))
            by_iteration = thurston_fixed_point(SignPattern.from_word(word), r).parameter
        except KneadLabError as e:
            failures.append(f"r={r}: {e}")
            continue
        residuals.append(max(abs(by_bisection - 1.0), abs(by_iteration - 1.0)))
    return _result("superstable_universality", residuals, UNIVERSALITY_TOL, failures)


def check_fixed_points(cases: List[SuperstableCase], tolerance: float) -> CheckResult:
    """||T(omega) - omega|| at the orbit vector of each bisection-found a*."""
    residuals, failures = [], []
    for case in cases:
        omega = orbit_vector(PowerLawMap(a=case.a_star, r=case.r), case.n)
        try:
            image = thurston_apply(omega, SignPattern.from_word(case.word), case.r)
        except KneadLabError as e:
            failures.append(f"{case.word} r={case.r}: {e}")
            continue
        residuals.append(float(np.max(np.abs(image.array - omega.array))))
    return _result("fixed_point", residuals, tolerance, failures)


def check_solver_agreement(cases: List[SuperstableCase], tolerance: float, seed: int) -> CheckResult:
    """
    Picard iteration started near the orbit vector must return to it: its
    z_1 is compared with the bisection a*.
    """
    rng = np.random.default_rng(seed)
    residuals, failures = [], []
    for case in cases:
        omega = orbit_vector(PowerLawMap(a=case.a_star, r=case.r), case.n).array
        margin = float(np.min(omega[0] - np.append(omega[1:], 0.0)))
        start = omega + 1e-3 * margin * rng.choice((-1.0, 1.0), size=omega.size)
        try:
            result = thurston_fixed_point(
                SignPattern.from_word(case.word),
                case.r,
                init=CriticalOrbitVector.from_array(start),
            )
        except KneadLabError as e:
            failures.append(f"{case.word} r={case.r}: {e}")
            continue
        residuals.append(abs(result.parameter - case.a_star))
    return _result("solver_agreement", residuals, tolerance, failures)


def random_thurston_state(
    rng: np.random.Generator, size: int
) -> Tuple[CriticalOrbitVector, SignPattern]:
    """A point whose root arguments all lie in [0.1, 1.5]."""
    z1 = rng.uniform(0.5, 2.0)
    diffs = rng.uniform(0.1, 1.5, size=size - 1)
    z = CriticalOrbitVector.from_array(np.concatenate(([z1], z1 - diffs)))
    sigma = SignPattern(tuple(int(s) for s in rng.choice((-1, 1), size=size)))
    return z, sigma


def check_jacobian(
    r_values: List[float], max_n: int, samples: int, tolerance: float, seed: int
) -> CheckResult:
    rng = np.random.default_rng(seed)
    residuals = []
    for _ in range(samples):
        r = float(rng.choice(r_values))
        z, sigma = random_thurston_state(rng, int(rng.integers(1, max_n)))
        residuals.append(jacobian_fd_residual(z, sigma, r))
    return _result("jacobian_fd", residuals, tolerance, [])


def _telescoping_condition(r: float, a: float, n: int) -> float:
    """sum |terms| / |sum| of the telescoping expansion."""
    fmap = PowerLawMap(a=a, r=r)
    values = critical_orbit(fmap, n - 1).values
    terms = [1.0] + [derivative_product(fmap, values[:k]).divide(1.0) for k in range(1, n)]
    total = abs(sum(terms))
    return sum(abs(t) for t in terms) / total if total else float("inf")


def generic_samples(r_values: List[float], max_n: int, count: int, seed: int) -> List[Tuple[float, float, int]]:
    """(r, a, n) with min |w_i| > 1e-3 before step n and a well-conditioned identity."""
    rng = np.random.default_rng(seed)
    samples = []
    while len(samples) < count:
        r = float(rng.choice(r_values))
        n = int(rng.integers(2, max_n + 1))
        a = float(rng.uniform(0.5, full_parameter(r)))
        orbit = critical_orbit(PowerLawMap(a=a, r=r), n)
        if orbit.min_abs(n - 1) <= GENERIC_MIN_ORBIT:
            continue
        if _telescoping_condition(r, a, n) > GENERIC_MAX_CONDITION:
            continue
        samples.append((r, a, n))
    return samples


def check_identity(
    cases: List[SuperstableCase], samples: List[Tuple[float, float, int]], tolerance: float
) -> Tuple[CheckResult, CheckResult]:
    """The determinant identity and its telescoping form on the same points."""
    points = [(case.r, case.a_star, case.n) for case in cases] + list(samples)
    identity, telescoping, failures = [], [], []
    for r, a, n in points:
        try:
            lhs, rhs, residual = determinant_identity_residual(r, a, n)
            telescoping.append(relative_gap(telescoping_sum(r, a, n), rhs))
        except KneadLabError as e:
            failures.append(f"a={a} r={r} n={n}: {e}")
            continue
        identity.append(residual)
    return (
        _result("identity", identity, tolerance, failures),
        _result("telescoping", telescoping, tolerance, failures),
    )


def check_positivity(cases: List[SuperstableCase], seed: int) -> CheckResult:
    """det(I - J) > 0 and spectral radius < 1 - 1e-3; the residual is the spectral radius."""
    radii, failures = [], []
    for case in cases:
        try:
            det, spec_rad, ok = positivity_check(case.r, case.a_star, case.n, seed=seed)
        except KneadLabError as e:
            failures.append(f"{case.word} r={case.r}: {e}")
            continue
        if not det > 0:
            failures.append(f"{case.word} r={case.r}: det(I - J) = {det:.3g}")
        radii.append(spec_rad)
    return _result("positivity", radii, 1.0 - CONTRACTION_MARGIN, failures)


def run_verification(
    r_values: List[float],
    max_n: int = 10,
    identity_tol: float = 1e-8,
    fixed_point_tol: float = 1e-8,
    fd_tol: float = 1e-6,
    seed: int = 0,
    samples: int = 200,
    fd_samples: int = 100,
) -> VerificationReport:
    """Run every suite for the given exponents and all admissible words up to max_n."""
    r_values = list(r_values)
    cases = superstable_cases(r_values, max_n)
    logger.info("verifying %d superstable words for r in %s", len(cases), r_values)
    identity, telescoping = check_identity(cases, generic_samples(r_values, max_n, samples, seed), identity_tol)
    checks = [
        check_universality(r_values),
        check_fixed_points(cases, fixed_point_tol),
        check_solver_agreement(cases, fixed_point_tol, seed),
        check_jacobian(r_values, max_n, fd_samples, fd_tol, seed),
        identity,
        telescoping,
        check_positivity(cases, seed),
    ]
    return VerificationReport(r_values=r_values, max_n=max_n, checks=checks)
