from enum import Enum
from typing import List, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, model_validator


class Symbol(str, Enum):
    L = "L"
    C = "C"
    R = "R"


class Order(int, Enum):
    LESS = -1
    EQUAL = 0
    GREATER = 1


class EntropyMethod(str, Enum):
    KNEADING_ROOT = "kneading_root"
    LAP_GROWTH = "lap_growth"
    LAP_RATIO = "lap_ratio"


class RecordFlag(str, Enum):
    ESCAPED = "escaped"
    NEAR_CRITICAL = "near_critical"
    NO_ROOT = "no_root"


class ViolationKind(str, Enum):
    WORD_ORDER = "word_order"
    ENTROPY_ORDER = "entropy_order"


class Subcommand(str, Enum):
    ENTROPY = "entropy"
    SUPERSTABLE = "superstable"
    SWEEP = "sweep"
    VERIFY = "verify"
    WORDS = "words"


class OutputFormat(str, Enum):
    CSV = "csv"
    JSON = "json"


class EntropyEstimate(BaseModel):
    value: float = Field(ge=0)
    method: EntropyMethod
    depth: int
    error_bound: float = Field(ge=0)
    no_root: bool = False

    model_config = ConfigDict(use_enum_values=True, frozen=True)


class SweepRecord(BaseModel):
    a: float
    r: float
    word: str
    entropy_kneading: Optional[EntropyEstimate] = None
    entropy_laps: Optional[EntropyEstimate] = None
    flags: List[RecordFlag] = []

    model_config = ConfigDict(use_enum_values=True)

    @property
    def entropy(self) -> Optional[float]:
        if self.entropy_kneading is None:
            return None
        return self.entropy_kneading.value


class Violation(BaseModel):
    i: int
    j: int
    kind: ViolationKind
    magnitude: float

    model_config = ConfigDict(use_enum_values=True)


class SweepReport(BaseModel):
    records: List[SweepRecord]
    violations: List[Violation] = []
    max_entropy_backstep: float = 0.0

    model_config = ConfigDict(use_enum_values=True)

    @model_validator(mode="after")
    def _check_order(self):
        a_values = [record.a for record in self.records]
        if any(x > y for x, y in zip(a_values, a_values[1:])):
            raise ValueError("sweep records must be sorted by a")
        size = len(self.records)
        for violation in self.violations:
            if not (0 <= violation.i < size and 0 <= violation.j < size):
                raise ValueError(f"violation references a missing record: {violation}")
        return self

    def count(self, kind: ViolationKind) -> int:
        return sum(1 for v in self.violations if v.kind == ViolationKind(kind).value)


class CheckResult(BaseModel):
    name: str
    cases: int
    max_residual: float
    tolerance: float
    passed: bool
    detail: str = ""


class VerificationReport(BaseModel):
    r_values: List[float]
    max_n: int
    checks: List[CheckResult] = []

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks)

    def failed(self) -> List[CheckResult]:
        return [check for check in self.checks if not check.passed]


class RunConfig(BaseModel):
    """Validated snapshot of the command-line configuration."""

    subcommand: Subcommand
    r: float = Field(gt=1)
    a: Optional[float] = None
    a_range: Optional[Tuple[float, float, int]] = None
    word: Optional[str] = None
    word_depth: int = Field(30, ge=1, le=4096)
    series_depth: int = Field(64, ge=16, le=4096)
    lap_depth: int = Field(18, ge=8, le=24)
    c_tol: float = Field(0.0, ge=0)
    tol: float = Field(1e-12, gt=0)
    identity_tol: float = Field(1e-8, gt=0)
    fixed_point_tol: float = Field(1e-8, gt=0)
    fd_tol: float = Field(1e-6, gt=0)
    entropy_slack: Optional[float] = None
    with_laps: bool = True
    r_values: List[float] = [2.0]
    max_n: int = Field(10, ge=2, le=16)
    output: Optional[str] = None
    output_format: OutputFormat = OutputFormat.CSV
    seed: int = 0
    workers: int = Field(1, ge=1)
    log2: bool = False

    model_config = ConfigDict(use_enum_values=True, frozen=True)

    @model_validator(mode="after")
    def _check_parameters(self):
        needs_a = self.subcommand == Subcommand.ENTROPY.value
        needs_range = self.subcommand == Subcommand.SWEEP.value
        if needs_a and (self.a is None or self.a_range is not None):
            raise ValueError("entropy needs exactly one of --a / --a-range, and it must be --a")
        if needs_range and (self.a_range is None or self.a is not None):
            raise ValueError("sweep needs exactly one of --a / --a-range, and it must be --a-range")
        if self.a_range is not None:
            lo, hi, count = self.a_range
            if count < 1:
                raise ValueError(f"a-range count must be positive, got {count}")
            if not lo <= hi:
                raise ValueError(f"a-range must satisfy lo <= hi, got {lo}:{hi}")
            if count > 1 and lo == hi:
                raise ValueError("a-range with several points needs lo < hi")
        if self.subcommand == Subcommand.SUPERSTABLE.value and not self.word:
            raise ValueError("superstable needs --word")
        if needs_range and (self.word_depth < 10 or self.series_depth < 32):
            raise ValueError("sweep needs word depth >= 10 and series depth >= 32")
        if any(r <= 1 for r in self.r_values):
            raise ValueError("every exponent in --r-values must be > 1")
        return self
