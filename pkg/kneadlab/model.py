import math
from dataclasses import dataclass
from typing import Optional, Tuple

from .errors import InvalidParameter


def full_parameter(r: float) -> float:
    """Largest a for which f_a maps its core interval into itself."""
    return 2.0 ** (1.0 / (r - 1.0))


@dataclass(frozen=True)
class PowerLawMap:
    """The map f_a(x) = a - |x|^r. The critical point is always 0."""

    a: float
    r: float

    def __post_init__(self):
        if not self.r > 1:
            raise InvalidParameter(f"exponent r must be > 1, got {self.r}")
        if not self.a > 0:
            raise InvalidParameter(f"parameter a must be > 0, got {self.a}")

    @property
    def a_full(self) -> float:
        return full_parameter(self.r)

    @property
    def is_self_map(self) -> bool:
        return self.a <= self.a_full


@dataclass(frozen=True)
class OrbitBuffer:
    """
    Critical orbit w_1..w_n of a map, optionally with the parameter
    derivatives D_i = d/da f_a^i(0).
    """

    values: Tuple[float, ...]
    param_derivs: Optional[Tuple[float, ...]] = None

    @property
    def depth(self) -> int:
        return len(self.values)

    def min_abs(self, upto: Optional[int] = None) -> float:
        """Smallest |w_i| over the first `upto` entries (all by default)."""
        head = self.values[: self.depth if upto is None else upto]
        if not head:
            return math.inf
        return min(abs(w) for w in head)


@dataclass(frozen=True)
class SignedLogProduct:
    """A real number stored as sign * exp(log_magnitude)."""

    sign: int
    log_magnitude: float

    def __post_init__(self):
        if (self.sign == 0) != (self.log_magnitude == -math.inf):
            raise ValueError("sign is 0 exactly when log_magnitude is -inf")

    @classmethod
    def one(cls) -> "SignedLogProduct":
        return cls(sign=1, log_magnitude=0.0)

    @classmethod
    def zero(cls) -> "SignedLogProduct":
        return cls(sign=0, log_magnitude=-math.inf)

    def times(self, x: float) -> "SignedLogProduct":
        if self.sign == 0 or x == 0:
            return SignedLogProduct.zero()
        sign = self.sign if x > 0 else -self.sign
        return SignedLogProduct(sign=sign, log_magnitude=self.log_magnitude + math.log(abs(x)))

    def __float__(self):
        if self.sign == 0:
            return 0.0
        return self.sign * math.exp(self.log_magnitude)

    def divide(self, x: float) -> float:
        """Return x / self without forming self as a float."""
        if self.sign == 0:
            raise ZeroDivisionError("division by a zero product")
        if x == 0:
            return 0.0
        sign = self.sign if x > 0 else -self.sign
        return sign * math.exp(math.log(abs(x)) - self.log_magnitude)
