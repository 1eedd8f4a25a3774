"""
Numerical checks of the determinant identity

    d/da f_a^n(0) / Df_a^{n-1}(f_a(0)) = det(I - D_omega T)

together with its telescoping expansion, the spectral radius of D_omega T
and the positivity test at superstable parameters.
"""
import logging
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from .errors import NearCriticalOrbit, NotSuperstable
from .model import OrbitBuffer, PowerLawMap, SignedLogProduct
from .powerlaw import critical_orbit, derivative_product, phase_derivative
from .schemas import Symbol
from .thurston import CriticalOrbitVector, SignPattern, ThurstonJacobian, thurston_jacobian

logger = logging.getLogger(__name__)

# below this |w_i| the orbit is treated as passing through the critical point
NEAR_CRITICAL = 1e-8

SUPERSTABLE_TOL = 1e-8

# characteristic-polynomial cross-check of the spectral radius up to this size
COMPANION_MAX_SIZE = 6


@dataclass(frozen=True)
class IdentityResidual:
    lhs: float
    rhs: float
    relative_residual: float

    def __iter__(self):
        return iter((self.lhs, self.rhs, self.relative_residual))


@dataclass(frozen=True)
class PositivityResult:
    det: float
    spec_rad: float
    ok: bool

    def __iter__(self):
        return iter((self.det, self.spec_rad, self.ok))


@dataclass(frozen=True)
class Transversality:
    """How w_n = f_a^n(0) crosses 0 as a increases through a superstable a0."""

    param_derivative: float
    before: Symbol
    after: Symbol


def relative_gap(x: float, y: float) -> float:
    return abs(x - y) / max(abs(x), abs(y), 1e-30)


def _orbit_off_critical(r: float, a0: float, n: int, with_derivs: bool = False) -> OrbitBuffer:
    if n < 2:
        raise ValueError(f"the identity needs n >= 2, got {n}")
    orbit = critical_orbit(PowerLawMap(a=a0, r=r), n, with_derivs=with_derivs)
    closest = orbit.min_abs(n - 1)
    if closest <= NEAR_CRITICAL:
        raise NearCriticalOrbit(
            f"critical orbit of a={a0!r}, r={r!r} comes within {closest:.3g} of 0 before step {n}",
            a=a0,
            r=r,
            n=n,
        )
    return orbit


def _jacobian_at(r: float, orbit: OrbitBuffer, n: int, anchor: float) -> ThurstonJacobian:
    omega = orbit.values[: n - 1]
    return thurston_jacobian(CriticalOrbitVector(omega), SignPattern.from_orbit(omega), r, anchor)


def determinant_identity_residual(r: float, a0: float, n: int) -> IdentityResidual:
    """
    Compare D_n / prod_{j<n} f'(w_j), from the parameter-derivative
    recursion, with det(I - J) from a dense determinant.

    J is taken at omega = (w_1..w_{n-1}) with the last root anchored at
    w_n, which makes the identity hold at any parameter whose orbit avoids 0
    before step n. At a superstable parameter w_n = 0 and J is the plain
    Thurston Jacobian.

    Raises:
        NearCriticalOrbit: if min |w_i|, i < n, is at most 1e-8.
    """
    orbit = _orbit_off_critical(r, a0, n, with_derivs=True)
    fmap = PowerLawMap(a=a0, r=r)
    product = derivative_product(fmap, orbit.values[: n - 1])
    lhs = product.divide(orbit.param_derivs[n - 1])
    rhs = _jacobian_at(r, orbit, n, anchor=orbit.values[n - 1]).identity_minus_det()
    residual = relative_gap(lhs, rhs)
    logger.debug("identity a=%r r=%r n=%d: lhs=%r rhs=%r residual=%g", a0, r, n, lhs, rhs, residual)
    return IdentityResidual(lhs=lhs, rhs=rhs, relative_residual=residual)


def telescoping_sum(r: float, a0: float, n: int) -> float:
    """sum_{k=0}^{n-1} 1 / prod_{j=1}^{k} f'(w_j)."""
    fmap = PowerLawMap(a=a0, r=r)
    if n == 1:
        return 1.0
    orbit = _orbit_off_critical(r, a0, n)
    total = 1.0
    product = SignedLogProduct.one()
    for w in orbit.values[: n - 1]:
        product = product.times(phase_derivative(fmap, w))
        total += product.divide(1.0)
    return total


def _log_growth(matrix: np.ndarray, starts: np.ndarray, steps: int) -> np.ndarray:
    """Average log growth of |J^k x| over the second half of `steps` iterations, one value per start column."""
    x = starts / np.linalg.norm(starts, axis=0)
    total = np.zeros(x.shape[1])
    for k in range(steps):
        y = matrix @ x
        norms = np.linalg.norm(y, axis=0)
        if not np.all(norms > 0):
            # a random start only dies out under a nilpotent J
            return np.full(x.shape[1], -np.inf)
        if k >= steps // 2:
            total += np.log(norms)
        x = y / norms
    return total / (steps - steps // 2)


def _power_iteration(matrix: np.ndarray, tol: float, seed: int, restarts: int, max_steps: int) -> float:
    rng = np.random.default_rng(seed)
    starts = rng.normal(size=(matrix.shape[0], restarts))
    steps = 256
    previous = None
    while True:
        estimate = float(np.exp(np.max(_log_growth(matrix, starts, steps))))
        if previous is not None and abs(estimate - previous) <= tol * max(1.0, estimate):
            return estimate
        if steps >= max_steps:
            return estimate
        previous = estimate
        steps *= 2


def _companion_radius(matrix: np.ndarray) -> float:
    roots = np.roots(np.poly(matrix))
    if roots.size == 0:
        return 0.0
    return float(np.max(np.abs(roots)))


def spectral_radius(
    jacobian: Union[ThurstonJacobian, np.ndarray],
    tol: float = 1e-10,
    seed: int = 0,
    restarts: int = 3,
    max_steps: Optional[int] = None,
) -> float:
    """
    max |lambda| over the eigenvalues of J.

    Power iteration from `restarts` random starts measures the growth rate
    of |J^k x|; for matrices of size <= 6 the roots of the characteristic
    polynomial are computed as well and their largest modulus is returned,
    so a shorter power run suffices there.
    """
    matrix = jacobian.matrix if isinstance(jacobian, ThurstonJacobian) else np.asarray(jacobian, dtype=float)
    if not np.any(matrix):
        return 0.0
    with_companion = matrix.shape[0] <= COMPANION_MAX_SIZE
    if max_steps is None:
        max_steps = 2**10 if with_companion else 2**14
    estimate = _power_iteration(matrix, tol, seed, restarts, max_steps)
    if not with_companion:
        return estimate
    companion = _companion_radius(matrix)
    if abs(companion - estimate) > 1e-2 * max(1.0, companion):
        logger.warning(
            "power iteration (%r) and characteristic polynomial (%r) disagree on the spectral radius",
            estimate,
            companion,
        )
    return companion


def superstable_jacobian(r: float, a0: float, n: int, tol: float = SUPERSTABLE_TOL) -> ThurstonJacobian:
    """
    D_omega T at a superstable parameter.

    Raises:
        NotSuperstable: if |f^n(0)| > tol * max(1, |D_n|) or the orbit
            passes through 0 before step n.
    """
    try:
        orbit = _orbit_off_critical(r, a0, n, with_derivs=True)
    except NearCriticalOrbit as e:
        raise NotSuperstable(f"a={a0!r} has a shorter critical period than {n}: {e}", a=a0, r=r, n=n)
    w_n = orbit.values[n - 1]
    if abs(w_n) > tol * max(1.0, abs(orbit.param_derivs[n - 1])):
        raise NotSuperstable(f"f^{n}(0) = {w_n:.3g} at a={a0!r}, r={r!r}", a=a0, r=r, n=n, residual=w_n)
    return _jacobian_at(r, orbit, n, anchor=0.0)


def positivity_check(r: float, a0: float, n: int, tol: float = SUPERSTABLE_TOL, seed: int = 0) -> PositivityResult:
    """det(I - J) > 0 and spectral radius of J < 1 at a superstable parameter."""
    jacobian = superstable_jacobian(r, a0, n, tol)
    det = jacobian.identity_minus_det()
    spec_rad = spectral_radius(jacobian, seed=seed)
    ok = det > 0 and spec_rad < 1
    if not ok:
        logger.info("positivity fails at a=%r r=%r n=%d: det=%r spectral radius=%r", a0, r, n, det, spec_rad)
    return PositivityResult(det=det, spec_rad=spec_rad, ok=ok)


def transversality(r: float, a0: float, n: int) -> Transversality:
    """
    Predict the symbol change of e_n at a superstable a0 from the sign of
    D_n = d/da f_a^n(0): w_n increases through 0 when D_n > 0.
    """
    orbit = critical_orbit(PowerLawMap(a=a0, r=r), n, with_derivs=True)
    d_n = orbit.param_derivs[n - 1]
    if d_n == 0:
        raise NotSuperstable(f"d/da f^{n}(0) vanishes at a={a0!r}", a=a0, r=r, n=n)
    if d_n > 0:
        return Transversality(param_derivative=d_n, before=Symbol.L, after=Symbol.R)
    return Transversality(param_derivative=d_n, before=Symbol.R, after=Symbol.L)
