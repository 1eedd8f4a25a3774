"""
The Thurston map on critical-orbit vectors, its Jacobian, and the two
solvers for superstable parameters: Picard iteration of the map and
bisection on f_a^n(0).
"""
import functools
import itertools
import logging
from dataclasses import dataclass
from typing import Iterator, List, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import bisect, root

from .errors import (
    BranchDomain,
    BranchDomainDuringIteration,
    InadmissibleWord,
    InvalidParameter,
    NoBracket,
    NoConvergence,
    PrefixMismatch,
)
from .kneading import KneadingWord, itinerary, parse_word, signed_lex_compare
from .model import PowerLawMap, full_parameter
from .powerlaw import critical_orbit
from .schemas import Order, Symbol

logger = logging.getLogger(__name__)

# smallest parameter tried by the signed-order bisection
WINDOW_FLOOR = 1e-6

# width at which the signed-order bisection hands over to bisect_superstable
ORDER_BISECTION_WIDTH = 1e-10

# relative bisection tolerance at float resolution
BISECTION_RTOL = 4 * np.finfo(float).eps

# most ulps walked when polishing a bisection result
POLISH_STEPS = 64


@dataclass(frozen=True)
class SignPattern:
    """Signs sigma_1..sigma_{n-1} of a C-free kneading prefix (+1 for R)."""

    signs: Tuple[int, ...]

    def __post_init__(self):
        if not self.signs:
            raise ValueError("a sign pattern has at least one entry")
        if any(s not in (-1, 1) for s in self.signs):
            raise ValueError(f"signs must be -1 or +1, got {self.signs}")

    @classmethod
    def from_word(cls, word: KneadingWord) -> "SignPattern":
        symbols = word.prefix
        if not symbols:
            raise InadmissibleWord(f"{word} has no symbol before C")
        return cls(tuple(1 if s == Symbol.R else -1 for s in symbols))

    @classmethod
    def from_orbit(cls, values: Sequence[float]) -> "SignPattern":
        if any(w == 0 for w in values):
            raise ValueError("the orbit hits the critical point")
        return cls(tuple(1 if w > 0 else -1 for w in values))

    def __len__(self):
        return len(self.signs)

    @property
    def array(self) -> np.ndarray:
        return np.array(self.signs, dtype=float)

    def word(self) -> KneadingWord:
        """The C-terminated word whose prefix carries these signs."""
        return KneadingWord(
            tuple(Symbol.R if s > 0 else Symbol.L for s in self.signs) + (Symbol.C,)
        )


@dataclass(frozen=True)
class CriticalOrbitVector:
    """A point z_1..z_{n-1}; z_1 plays the role of the parameter a."""

    entries: Tuple[float, ...]

    def __post_init__(self):
        if not self.entries:
            raise ValueError("a critical-orbit vector has at least one entry")

    @classmethod
    def from_array(cls, values) -> "CriticalOrbitVector":
        return cls(tuple(float(x) for x in values))

    def __len__(self):
        return len(self.entries)

    @property
    def array(self) -> np.ndarray:
        return np.array(self.entries, dtype=float)

    @property
    def parameter(self) -> float:
        return self.entries[0]


@dataclass(frozen=True, eq=False)
class ThurstonJacobian:
    """
    D_z T as a dense matrix. Nonzero entries sit in the first column and on
    the superdiagonal; row j < n-2 holds g_j and -g_j, the last row only g.
    """

    matrix: np.ndarray

    def __post_init__(self):
        shape = self.matrix.shape
        if len(shape) != 2 or shape[0] != shape[1]:
            raise ValueError(f"a Jacobian is square, got shape {shape}")

    @property
    def size(self) -> int:
        return self.matrix.shape[0]

    def identity_minus_det(self) -> float:
        """det(I - J), by LU factorization."""
        return float(np.linalg.det(np.eye(self.size) - self.matrix))

    def has_thurston_structure(self) -> bool:
        m = self.size
        expected = np.zeros_like(self.matrix, dtype=bool)
        expected[:, 0] = True
        for j in range(m - 1):
            expected[j, j + 1] = True
        if np.any(self.matrix[~expected] != 0):
            return False
        return all(self.matrix[j, j + 1] == -self.matrix[j, 0] for j in range(m - 1))


def sign_pattern(word) -> SignPattern:
    if isinstance(word, str):
        word = parse_word(word)
    return SignPattern.from_word(word)


def orbit_vector(fmap: PowerLawMap, n: int) -> CriticalOrbitVector:
    """The point omega = (w_1, ..., w_{n-1}) built from the critical orbit."""
    if n < 2:
        raise ValueError(f"an orbit vector needs n >= 2, got {n}")
    return CriticalOrbitVector(critical_orbit(fmap, n - 1).values)


def _root_arguments(z: np.ndarray, anchor: float) -> np.ndarray:
    """z_1 - z_{j+1} for j < n-1, and z_1 - anchor for the last component."""
    return z[0] - np.append(z[1:], anchor)


def _checked_arguments(z: CriticalOrbitVector, sigma: SignPattern, anchor: float) -> np.ndarray:
    if len(z) != len(sigma):
        raise ValueError(f"vector of length {len(z)} does not match {len(sigma)} signs")
    diffs = _root_arguments(z.array, anchor)
    bad = np.flatnonzero(~(diffs > 0))
    if bad.size:
        j = int(bad[0])
        raise BranchDomain(
            f"root argument {j + 1} is {diffs[j]!r}, not positive",
            index=j + 1,
            value=float(diffs[j]),
        )
    return diffs


def thurston_apply(
    z: CriticalOrbitVector, sigma: SignPattern, r: float, anchor: float = 0.0
) -> CriticalOrbitVector:
    """
    c_j = sigma_j (z_1 - z_{j+1})^{1/r} for j <= n-2 and
    c_{n-1} = sigma_{n-1} (z_1 - anchor)^{1/r}.

    Raises:
        BranchDomain: if a root argument is not positive.
    """
    diffs = _checked_arguments(z, sigma, anchor)
    return CriticalOrbitVector.from_array(sigma.array * diffs ** (1.0 / r))


def thurston_jacobian(
    z: CriticalOrbitVector, sigma: SignPattern, r: float, anchor: float = 0.0
) -> ThurstonJacobian:
    diffs = _checked_arguments(z, sigma, anchor)
    rho = 1.0 / r
    g = sigma.array * rho * diffs ** (rho - 1.0)
    m = len(sigma)
    matrix = np.zeros((m, m))
    matrix[:, 0] = g
    for j in range(m - 1):
        matrix[j, j + 1] = -g[j]
    return ThurstonJacobian(matrix)


def jacobian_fd_residual(
    z: CriticalOrbitVector, sigma: SignPattern, r: float, h: float = 1e-6, anchor: float = 0.0
) -> float:
    """
    Largest entrywise deviation of thurston_jacobian from central
    differences of thurston_apply, relative to max(|J_ij|, 1).
    """
    analytic = thurston_jacobian(z, sigma, r, anchor).matrix
    base = z.array
    numeric = np.zeros_like(analytic)
    for k in range(base.size):
        step = np.zeros_like(base)
        step[k] = h
        forward = thurston_apply(CriticalOrbitVector.from_array(base + step), sigma, r, anchor)
        backward = thurston_apply(CriticalOrbitVector.from_array(base - step), sigma, r, anchor)
        numeric[:, k] = (forward.array - backward.array) / (2.0 * h)
    return float(np.max(np.abs(analytic - numeric) / np.maximum(np.abs(analytic), 1.0)))


def default_initial_vector(sigma: SignPattern, a_guess: float = 1.5) -> CriticalOrbitVector:
    """z_j = sigma_j (1 - j/n) a_guess; |z_j| decreases, so every root argument is positive."""
    n = len(sigma) + 1
    return CriticalOrbitVector(
        tuple(s * (1.0 - j / n) * a_guess for j, s in enumerate(sigma.signs, start=1))
    )


@dataclass(frozen=True)
class FixedPointResult:
    omega: CriticalOrbitVector
    iterations: int
    residual: float
    method: str = "picard"

    def __iter__(self) -> Iterator:
        return iter((self.omega, self.iterations))

    @property
    def parameter(self) -> float:
        return self.omega.parameter


def _newton_fallback(
    sigma: SignPattern, r: float, start: CriticalOrbitVector, tol: float, anchor: float
) -> FixedPointResult:
    identity = np.eye(len(sigma))

    def residual(values):
        z = CriticalOrbitVector.from_array(values)
        return thurston_apply(z, sigma, r, anchor).array - values

    def jacobian(values):
        z = CriticalOrbitVector.from_array(values)
        return thurston_jacobian(z, sigma, r, anchor).matrix - identity

    try:
        solution = root(residual, start.array, jac=jacobian, method="hybr", tol=tol)
    except BranchDomain as e:
        raise NoConvergence(f"Newton fallback left the branch domain: {e}", sign_pattern=sigma.signs)
    omega = CriticalOrbitVector.from_array(solution.x)
    try:
        error = float(np.max(np.abs(thurston_apply(omega, sigma, r, anchor).array - omega.array)))
    except BranchDomain as e:
        raise NoConvergence(f"Newton fallback left the branch domain: {e}", sign_pattern=sigma.signs)
    if not solution.success or error > tol:
        raise NoConvergence(
            f"no fixed point for {sigma.word()}: {solution.message}",
            sign_pattern=sigma.signs,
            residual=error,
        )
    return FixedPointResult(omega=omega, iterations=int(solution.nfev), residual=error, method="newton")


def thurston_fixed_point(
    sigma: SignPattern,
    r: float,
    init: Optional[CriticalOrbitVector] = None,
    tol: float = 1e-12,
    max_iter: int = 10000,
    anchor: float = 0.0,
    fallback: bool = True,
) -> FixedPointResult:
    """
    Solve T(omega) = omega by Picard iteration z <- T(z).

    The iteration stops at the first z with ||T(z) - z||_inf <= tol. When it
    runs out of iterations and `fallback` is set, a Newton-type solve
    (MINPACK hybrid method) is tried from the last iterate and the result is
    tagged with method "newton".

    Raises:
        BranchDomainDuringIteration: when an iterate leaves the domain of
            the inverse branches; the sign pattern is then inadmissible.
        NoConvergence: after max_iter steps (and a failed fallback).
    """
    if not r > 1:
        raise InvalidParameter(f"exponent r must be > 1, got {r}")
    z = init if init is not None else default_initial_vector(sigma)
    step = np.inf
    for iteration in range(1, max_iter + 1):
        try:
            image = thurston_apply(z, sigma, r, anchor)
        except BranchDomain as e:
            raise BranchDomainDuringIteration(
                f"iterate {iteration} of the Thurston map for {sigma.word()} left the branch domain: {e}",
                iterate=z.entries,
                iteration=iteration,
            )
        step = float(np.max(np.abs(image.array - z.array)))
        if step <= tol:
            logger.debug("Picard iteration for %s converged after %d steps", sigma.word(), iteration)
            return FixedPointResult(omega=z, iterations=iteration, residual=step)
        z = image

    if not fallback:
        raise NoConvergence(
            f"Picard iteration for {sigma.word()} did not converge in {max_iter} steps",
            sign_pattern=sigma.signs,
            residual=step,
        )
    logger.warning(
        "Picard iteration for %s did not converge in %d steps (last step %g), trying Newton",
        sigma.word(),
        max_iter,
        step,
    )
    return _newton_fallback(sigma, r, z, tol, anchor)


def _prefix_at(r: float, a: float, length: int) -> Tuple[Symbol, ...]:
    if length == 0:
        return ()
    return itinerary(PowerLawMap(a=a, r=r), length).symbols


def _critical_value(r: float, a: float, n: int) -> float:
    return critical_orbit(PowerLawMap(a=a, r=r), n).values[-1]


def _polish(func, a: float, lo: float, hi: float) -> float:
    """Walk ulp by ulp from a while |func| decreases, staying in [lo, hi]."""
    best, smallest = a, abs(func(a))
    for direction in (-np.inf, np.inf):
        x = best
        for _ in range(POLISH_STEPS):
            if smallest == 0:
                return best
            x = float(np.nextafter(x, direction))
            if not lo <= x <= hi:
                break
            value = abs(func(x))
            if value >= smallest:
                break
            best, smallest = x, value
    return best


def bisect_superstable(
    r: float, word: KneadingWord, bracket: Tuple[float, float], tol: float = 1e-15
) -> float:
    """
    Find a* in `bracket` with f_{a*}^n(0) = 0, n = len(word), and the
    itinerary of a* carrying the C-free prefix of `word`.

    Bisection runs down to `tol` plus a few ulps of a, then the result is
    moved to the neighbouring float with the smallest |f^n(0)|.

    Raises:
        NoBracket: if f^n(0) has the same sign at both endpoints.
        PrefixMismatch: if an endpoint or the result has the wrong prefix.
    """
    if isinstance(word, str):
        word = parse_word(word)
    if not word.terminated_at_c or len(word) < 2:
        raise InadmissibleWord(f"a superstable word ends in C after at least one symbol, got {word}")
    n = len(word)
    prefix = word.prefix
    lo, hi = sorted(bracket)

    g_lo = _critical_value(r, lo, n)
    g_hi = _critical_value(r, hi, n)
    if g_lo * g_hi > 0:
        raise NoBracket(
            f"f^{n}(0) has the same sign at a={lo!r} and a={hi!r}",
            word=str(word),
            bracket=(lo, hi),
        )
    for a in (lo, hi):
        found = _prefix_at(r, a, n - 1)
        if found != prefix:
            raise PrefixMismatch(
                f"itinerary at a={a!r} starts {KneadingWord(found) if found else '()'}, expected {word}",
                word=str(word),
                a=a,
            )
    if g_lo == 0:
        a_star = lo
    elif g_hi == 0:
        a_star = hi
    else:
        g = functools.partial(_critical_value, r, n=n)
        a_star = _polish(g, bisect(g, lo, hi, xtol=tol, rtol=BISECTION_RTOL), lo, hi)
    if _prefix_at(r, a_star, n - 1) != prefix:
        raise PrefixMismatch(f"the zero at a={a_star!r} does not carry {word}", word=str(word), a=a_star)
    logger.debug("superstable parameter for %s at r=%r: %r", word, r, a_star)
    return float(a_star)


def locate_word_parameter(r: float, word, tol: float = 1e-15) -> float:
    """
    Find the superstable parameter of a C-terminated word without a bracket.

    The itinerary is monotone in a for the signed order, so halving
    (0, a_full] according to signed_lex_compare(itinerary, word) closes in
    on the parameter; bisect_superstable then polishes the final bracket.

    Raises:
        InadmissibleWord: if no parameter carries the word.
    """
    if isinstance(word, str):
        word = parse_word(word)
    if not word.terminated_at_c or len(word) < 2:
        raise InadmissibleWord(f"a superstable word ends in C after at least one symbol, got {word}")
    n = len(word)
    lo, hi = WINDOW_FLOOR, full_parameter(r)
    while hi - lo > ORDER_BISECTION_WIDTH:
        mid = 0.5 * (lo + hi)
        order = signed_lex_compare(itinerary(PowerLawMap(a=mid, r=r), n), word)
        if order == Order.EQUAL:
            lo = hi = mid
            break
        if order == Order.LESS:
            lo = mid
        else:
            hi = mid
    try:
        return bisect_superstable(r, word, (lo, hi), tol)
    except (NoBracket, PrefixMismatch) as e:
        raise InadmissibleWord(
            f"no parameter in (0, {full_parameter(r)!r}] realizes {word} for r={r!r}",
            word=str(word),
            r=r,
            reason=str(e),
        )


def candidate_words(n: int) -> Iterator[KneadingWord]:
    """Every R-prefixed, C-terminated word of length n."""
    for middle in itertools.product((Symbol.R, Symbol.L), repeat=n - 2):
        yield KneadingWord((Symbol.R,) + middle + (Symbol.C,))


def admissible_words(r: float, n_max: int, tol: float = 1e-15) -> List[Tuple[KneadingWord, float]]:
    """All C-terminated words of length <= n_max realized in the family, sorted by a*."""
    found = []
    for n in range(2, n_max + 1):
        for word in candidate_words(n):
            try:
                found.append((word, locate_word_parameter(r, word, tol)))
            except InadmissibleWord:
                continue
    found.sort(key=lambda item: item[1])
    logger.info("%d admissible words up to length %d at r=%r", len(found), n_max, r)
    return found
