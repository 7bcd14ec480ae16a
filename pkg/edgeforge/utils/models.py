import math
from enum import Enum
from pathlib import Path
from typing import Literal

from pydantic import BaseModel, Field, computed_field, field_validator, model_validator

from edgeforge.utils.constants import (
    DEFAULT_MATRIX_SIZE,
    DEFAULT_QUAD_POINTS,
    DEFAULT_SAMPLES,
    DEFAULT_SEED,
    DEFAULT_TOL,
    DEFAULT_WORKERS,
    MAX_QUAD_POINTS,
)


def _unit_interval(name: str, value: float) -> float:
    if not 0.0 <= value <= 1.0:
        raise ValueError(f"{name} is expected to be in [0, 1], but got {value}")
    return value


class EdgeLawPoint(BaseModel):
    t: float
    gamma: float
    gamma_bar: float
    logdet_minus: float
    logdet_plus: float
    mu: float
    cdf: float
    pdf: float | None = None

    @field_validator("gamma")
    def validate_gamma(cls, value):
        return _unit_interval("gamma", value)

    @field_validator("pdf")
    def validate_pdf(cls, value):
        if value is not None and value < 0.0:
            raise ValueError(f"pdf is expected to be nonnegative, but got {value}")
        return value

    @model_validator(mode="after")
    def validate_point(self):
        if abs(self.gamma_bar - self.gamma * (2.0 - self.gamma)) > 1e-15:
            raise ValueError("gamma_bar must equal gamma * (2 - gamma)")
        if abs(self.mu - (self.logdet_plus - self.logdet_minus)) > 1e-12 * max(
            1.0, abs(self.mu)
        ):
            raise ValueError("mu must equal logdet_plus - logdet_minus")
        if not 0.0 <= self.cdf <= 1.0:
            raise ValueError(f"cdf is expected to be in [0, 1], but got {self.cdf}")
        return self


class MomentSummary(BaseModel):
    gamma: float
    mean: float
    variance: float
    skewness: float
    kurtosis: float
    mass: float = 1.0

    @field_validator("variance")
    def validate_variance(cls, value):
        if not value > 0.0:
            raise ValueError(f"variance is expected to be positive, but got {value}")
        return value

    @computed_field  # type: ignore[prop-decorator]
    @property
    def excess_kurtosis(self) -> float:
        return self.kurtosis - 3.0


class TailCoefficients(BaseModel):
    gamma: float
    c1: float
    c0_integral: float | None
    c0_series: float
    n_terms: int

    @field_validator("c1")
    def validate_c1(cls, value):
        if value < 0.0:
            raise ValueError(f"c1 is expected to be nonnegative, but got {value}")
        return value


class IdentityReport(BaseModel):
    name: str
    lhs: float
    rhs: float
    params: dict[str, float] = Field(default_factory=dict)
    tolerance: float = DEFAULT_TOL
    metric: Literal["relative", "absolute"] = "relative"

    @computed_field  # type: ignore[prop-decorator]
    @property
    def abs_err(self) -> float:
        return abs(self.lhs - self.rhs)

    @computed_field  # type: ignore[prop-decorator]
    @property
    def rel_err(self) -> float:
        scale = max(abs(self.lhs), abs(self.rhs))
        if scale == 0.0:
            return 0.0
        return self.abs_err / scale

    @computed_field  # type: ignore[prop-decorator]
    @property
    def passed(self) -> bool:
        error = self.rel_err if self.metric == "relative" else self.abs_err
        return math.isfinite(error) and error <= self.tolerance


class McRun(BaseModel):
    n: int
    gamma: float
    num_samples: int
    seed: int
    maxima: list[float]
    empty_samples: int
    retained_counts: list[int]

    @field_validator("gamma")
    def validate_gamma(cls, value):
        return _unit_interval("gamma", value)

    @field_validator("num_samples")
    def validate_num_samples(cls, value):
        if value < 1:
            raise ValueError(f"num_samples is expected to be positive, but got {value}")
        return value

    @field_validator("seed")
    def validate_seed(cls, value):
        if not 0 <= value < 2**64:
            raise ValueError(f"seed is expected to be a 64-bit unsigned integer, but got {value}")
        return value

    @model_validator(mode="after")
    def validate_counts(self):
        if len(self.maxima) + self.empty_samples != self.num_samples:
            raise ValueError("maxima and empty samples must add up to num_samples")
        if len(self.retained_counts) != self.num_samples:
            raise ValueError("retained_counts must hold one entry per sample")
        return self


class Command(str, Enum):
    CDF = "cdf"
    PDF = "pdf"
    MOMENTS = "moments"
    TAILS = "tails"
    MTH = "mth"
    GEN = "gen"
    MC = "mc"
    CHECK = "check"
    TABLE1 = "table1"


class OutputFormat(str, Enum):
    CSV = "csv"
    JSON = "json"


class CliConfig(BaseModel):
    command: Command
    gamma: list[float] = Field(default_factory=lambda: [1.0])
    t_min: float = -8.0
    t_max: float = 4.0
    t_step: float = 0.5
    quad_points: int = DEFAULT_QUAD_POINTS
    tol: float = DEFAULT_TOL
    refine_tol: float | None = None
    seed: int = DEFAULT_SEED
    matrix_size: int = DEFAULT_MATRIX_SIZE
    samples: int = DEFAULT_SAMPLES
    format: OutputFormat = OutputFormat.CSV
    output: Path | None = None
    workers: int = DEFAULT_WORKERS
    order: int = 2
    t: float = 0.0
    lambda_step: float = 0.05
    grid: Literal["default", "quick"] = "default"
    dump: Path | None = None

    @field_validator("gamma")
    def validate_gamma(cls, value):
        if not value:
            raise ValueError("at least one gamma value is required")
        return [_unit_interval("gamma", g) for g in value]

    @field_validator("t_step")
    def validate_t_step(cls, value):
        if not value > 0.0:
            raise ValueError(f"t_step is expected to be positive, but got {value}")
        return value

    @field_validator("quad_points")
    def validate_quad_points(cls, value):
        if not 2 <= value <= MAX_QUAD_POINTS:
            raise ValueError(
                f"quad_points is expected to be in [2, {MAX_QUAD_POINTS}], but got {value}"
            )
        return value

    @field_validator("tol", "refine_tol")
    def validate_tol(cls, value, info):
        if value is None:
            return value
        if not value > 0.0:
            raise ValueError(f"{info.field_name} is expected to be positive, but got {value}")
        return value

    @field_validator("seed")
    def validate_seed(cls, value):
        if not 0 <= value < 2**64:
            raise ValueError(f"seed is expected to be a 64-bit unsigned integer, but got {value}")
        return value

    @field_validator("matrix_size")
    def validate_matrix_size(cls, value):
        if not 2 <= value <= 1000:
            raise ValueError(f"matrix_size is expected to be in [2, 1000], but got {value}")
        return value

    @field_validator("samples", "workers")
    def validate_positive(cls, value, info):
        if value < 1:
            raise ValueError(f"{info.field_name} is expected to be at least 1, but got {value}")
        return value

    @field_validator("order")
    def validate_order(cls, value):
        if not 1 <= value <= 4:
            raise ValueError(f"order is expected to be in [1, 4], but got {value}")
        return value

    @field_validator("lambda_step")
    def validate_lambda_step(cls, value):
        if not 0.0 < value <= 1.0:
            raise ValueError(f"lambda_step is expected to be in (0, 1], but got {value}")
        return value

    @model_validator(mode="after")
    def validate_range(self):
        if not self.t_min < self.t_max:
            raise ValueError(
                f"t_min is expected to be less than t_max, but got {self.t_min} >= {self.t_max}"
            )
        return self


class McReport(BaseModel):
    n: int
    gamma: float
    num_samples: int
    seed: int
    empty_samples: int
    mean: float | None
    ks_distance: float

    @field_validator("ks_distance")
    def validate_ks_distance(cls, value):
        return _unit_interval("ks_distance", value)


class Table1Row(BaseModel):
    gamma: float
    quantity: Literal["mean", "variance", "skewness", "kurtosis"]
    computed: float
    reference: float
    tolerance: float
    convention: Literal["raw", "excess"] | None = None
    known_discrepancy: bool = False

    @computed_field  # type: ignore[prop-decorator]
    @property
    def deviation(self) -> float:
        return self.computed - self.reference

    @computed_field  # type: ignore[prop-decorator]
    @property
    def passed(self) -> bool:
        return abs(self.deviation) <= self.tolerance
