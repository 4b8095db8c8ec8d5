"""
Pydantic models for experiment configs and run records
Localized Sums Lab
"""

import math
from pathlib import Path
from typing import Any, Dict, List, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from app.arithmetic import GRule, StatisticRule
from app.brownian import GridRule
from app.generators import GeneratorSpec
from app.windows import WindowFamily


class StrictModel(BaseModel):
    """Unknown keys are configuration errors"""
    model_config = ConfigDict(extra="forbid")


# ----------------------------
# Shared blocks
# ----------------------------

class GeneratorConfig(StrictModel):
    """Increment family of the simulated partial sums"""
    kind: Literal["rademacher", "gaussian", "prime_bernoulli", "lacunary"] = "gaussian"
    sigma: float = Field(1.0, gt=0)
    sigma_power: float = 0.0
    zero_prefix: int = Field(0, ge=0)
    ratio: float = Field(2.0, gt=1)

    def to_spec(self, seed: int = 0) -> GeneratorSpec:
        return GeneratorSpec(
            kind=self.kind,
            sigma=self.sigma,
            sigma_power=self.sigma_power,
            zero_prefix=self.zero_prefix,
            ratio=self.ratio,
            seed=seed,
        )


class WindowConfig(StrictModel):
    """Width family f_N"""
    kind: Literal["power_log", "growing_log", "constant"] = "power_log"
    M: float = Field(1.0, gt=0)
    xi: Literal["loglog", "logloglog", "sqrt_loglog"] = "loglog"
    xi_scale: float = Field(1.0, gt=0)
    xi_floor: float = 1.0
    cap_at_n: bool = False
    c: float = Field(2.0, gt=0)

    def to_family(self) -> WindowFamily:
        return WindowFamily(
            kind=self.kind,
            M=self.M,
            xi=self.xi,
            xi_scale=self.xi_scale,
            xi_floor=self.xi_floor,
            cap_at_n=self.cap_at_n,
            c=self.c,
        )


class ExperimentConfig(StrictModel):
    """Flags every subcommand shares; out/format/threads never enter the config hash"""
    seed: int = Field(0, ge=0, lt=2**64)
    out: Optional[str] = None
    format: Literal["csv", "json"] = "json"
    threads: Optional[int] = Field(None, ge=1)

    def hashed_fields(self) -> Dict[str, Any]:
        return self.model_dump(mode="json", exclude={"out", "format", "threads"})


# ----------------------------
# kolmogorov
# ----------------------------

class ConditionCCheck(StrictModel):
    n: int = Field(..., ge=1)
    m: int = Field(..., ge=2)
    lam: float = Field(..., gt=0)
    trials: int = Field(10000, ge=1)

    @model_validator(mode="after")
    def _ordered(self):
        if not self.n < self.m:
            raise ValueError("condition (c) checks need n < m")
        return self


class KolmogorovConfig(ExperimentConfig):
    generators: List[GeneratorConfig] = Field(
        default_factory=lambda: [GeneratorConfig(kind="rademacher")], min_length=1
    )
    lambdas: List[float] = Field(default_factory=lambda: [1.5, 2.0, 4.0], min_length=1)
    ks: List[int] = Field(default_factory=lambda: [100, 10000], min_length=1)
    trials: int = Field(100000, ge=1)
    condition_c: List[ConditionCCheck] = Field(default_factory=list)

    @field_validator("lambdas")
    @classmethod
    def _positive_lambdas(cls, values: List[float]) -> List[float]:
        if any(not v > 0 for v in values):
            raise ValueError("every lambda must be > 0")
        return values

    @field_validator("ks")
    @classmethod
    def _positive_ks(cls, values: List[int]) -> List[int]:
        if any(v < 1 for v in values):
            raise ValueError("every k must be >= 1")
        return values


# ----------------------------
# localized
# ----------------------------

class EventsConfig(StrictModel):
    """A_j/B_j/C_j frequencies on one block of a schedule"""
    j: int = Field(..., ge=2)
    M: float = Field(1.0, gt=0)
    j_max: Optional[int] = Field(None, ge=3)
    mode: Literal["paper_exact", "scaled_surrogate"] = "scaled_surrogate"
    base: float = Field(2.0, ge=1)
    growth: float = Field(2.0, gt=1)
    trials: int = Field(1000, ge=1)
    D: Optional[float] = Field(None, ge=1)


class StarConfig(StrictModel):
    """Star schedule plus the Y_j <= lambda/2 tail frequencies"""
    D: Optional[float] = Field(None, ge=1)
    j_max: int = Field(4, ge=2)
    start: Optional[float] = Field(None, ge=1)
    lam: float = Field(4.0, gt=0)
    trials: int = Field(1000, ge=1)


class LocalizedConfig(ExperimentConfig):
    generator: GeneratorConfig = Field(default_factory=GeneratorConfig)
    window: WindowConfig = Field(default_factory=WindowConfig)
    n_max: int = Field(10**6, ge=2)
    trials: int = Field(1000, ge=1)
    G: float = Field(16.0, ge=2)
    exponent: float = Field(5.0 / 3.0, ge=1)
    dense: bool = False
    events: Optional[EventsConfig] = None
    star: Optional[StarConfig] = None


# ----------------------------
# brownian
# ----------------------------

class GridConfig(StrictModel):
    kind: Literal["geometric", "uniform"] = "geometric"
    t0: float = Field(1.0, ge=1)
    points_per_octave: Optional[int] = Field(None, ge=1)
    step: Optional[float] = Field(None, gt=0)

    def to_rule(self) -> GridRule:
        return GridRule(kind=self.kind, t0=self.t0, points_per_octave=self.points_per_octave, step=self.step)


class ScalingConfig(StrictModel):
    N: float = Field(..., gt=1)
    c: float = Field(..., gt=1)
    paths: int = Field(500, ge=2)


class BrownianConfig(ExperimentConfig):
    T: float = Field(10**6, gt=1)
    grid: GridConfig = Field(default_factory=GridConfig)
    window: WindowConfig = Field(default_factory=WindowConfig)
    paths: int = Field(200, ge=1)
    G: float = Field(16.0, ge=2)
    exponent: float = Field(5.0 / 3.0, ge=1)
    refinements: int = Field(0, ge=0, le=8)
    scaling: Optional[ScalingConfig] = None


# ----------------------------
# omega-scan
# ----------------------------

class RhoGapConfig(StrictModel):
    samples: int = Field(1000, ge=1)
    m_max: int = Field(10**8, ge=3)
    t_min: int = Field(1000, ge=3)
    t_max: int = Field(10**6, ge=3)


class OmegaScanConfig(ExperimentConfig):
    x: int = Field(10**6, ge=2)
    ms: List[int] = Field(default_factory=lambda: [510510])
    thresholds: Optional[List[int]] = None
    t_max: Optional[int] = Field(None, ge=2)
    mertens: bool = True
    mertens_lo: int = Field(100, ge=2)
    late_growth: bool = False
    erdos_kac: bool = False
    rho_gap: Optional[RhoGapConfig] = None

    @field_validator("ms")
    @classmethod
    def _valid_ms(cls, values: List[int]) -> List[int]:
        if any(m < 2 for m in values):
            raise ValueError("every m must be >= 2")
        return values


# ----------------------------
# density
# ----------------------------

class GRuleConfig(StrictModel):
    kind: Literal["constant", "loglog_power"] = "constant"
    c: float = Field(1.2, gt=0)
    a: float = Field(0.0, ge=0)

    def to_rule(self) -> GRule:
        return GRule(kind=self.kind, c=self.c, a=self.a)


class DensityConfig(ExperimentConfig):
    x: int = Field(10**5, ge=16)
    mode: Literal["part_i", "part_ii"] = "part_i"
    g: GRuleConfig = Field(default_factory=GRuleConfig)
    window: WindowConfig = Field(default_factory=WindowConfig)
    # None means the prime-model K = 30 D^2 sqrt(M+1)
    K: Optional[List[float]] = None
    level: Optional[List[float]] = None
    m_min: Optional[int] = Field(None, ge=3)
    c: float = Field(0.5, gt=0, lt=1)

    @field_validator("K", "level")
    @classmethod
    def _non_negative(cls, values: Optional[List[float]]) -> Optional[List[float]]:
        if values is not None:
            if not values:
                raise ValueError("list must not be empty")
            if any(math.isnan(v) or v < 0 for v in values):
                raise ValueError("values must be >= 0")
        return values

    @model_validator(mode="after")
    def _mode_inputs(self):
        if self.mode == "part_ii" and not self.level:
            raise ValueError("part_ii scans need growth levels in 'level'")
        return self


# ----------------------------
# kubilius
# ----------------------------

class StatisticRuleConfig(StrictModel):
    kind: Literal["omega", "omega_above"] = "omega"
    k: int = Field(1, ge=1)

    def to_rule(self) -> StatisticRule:
        return StatisticRule(kind=self.kind, k=self.k)


class KubiliusConfig(ExperimentConfig):
    x: int = Field(10**6, ge=4)
    r: int = Field(31, ge=2)
    rule: StatisticRuleConfig = Field(default_factory=StatisticRuleConfig)
    trials: int = Field(0, ge=0)
    c: float = Field(0.5, gt=0, lt=1)


# ----------------------------
# schedule
# ----------------------------

class BracketConfig(StrictModel):
    generator: GeneratorConfig = Field(default_factory=GeneratorConfig)
    n_max: int = Field(10**6, ge=2)
    D: Optional[float] = Field(None, ge=1)


class StarScheduleConfig(StrictModel):
    window: WindowConfig = Field(default_factory=WindowConfig)
    D: float = Field(1.0, ge=1)
    j_max: int = Field(6, ge=1)
    start: Optional[float] = Field(None, ge=1)


class ScheduleConfig(ExperimentConfig):
    M: float = Field(1.0, gt=0)
    j_max: int = Field(6, ge=2)
    mode: Literal["paper_exact", "scaled_surrogate"] = "paper_exact"
    base: float = Field(2.0, ge=1)
    growth: float = Field(2.0, gt=1)
    star: Optional[StarScheduleConfig] = None
    bracket: Optional[BracketConfig] = None


CONFIG_MODELS = {
    "kolmogorov": KolmogorovConfig,
    "localized": LocalizedConfig,
    "brownian": BrownianConfig,
    "omega-scan": OmegaScanConfig,
    "density": DensityConfig,
    "kubilius": KubiliusConfig,
    "schedule": ScheduleConfig,
}


# ----------------------------
# Run record
# ----------------------------

class RunPayload(StrictModel):
    rows: List[Dict[str, Any]]
    summary: Dict[str, Any]


class RunEnvelope(StrictModel):
    version: str
    config_hash: str
    seed: int
    payload_sha256: str
    wall_time_s: float
    payload: RunPayload


class RunRecord(BaseModel):
    """One finished subcommand run"""
    version: str
    subcommand: str
    config_hash: str
    seed: int
    wall_time_s: float
    payload_sha256: str
    payload: Dict[str, Any]

    def header(self) -> Dict[str, Any]:
        return {"version": self.version, "config_hash": self.config_hash, "seed": self.seed}

    def envelope(self) -> Dict[str, Any]:
        """The JSON output document; its shape is RunEnvelope"""
        return RunEnvelope(
            version=self.version,
            config_hash=self.config_hash,
            seed=self.seed,
            payload_sha256=self.payload_sha256,
            wall_time_s=self.wall_time_s,
            payload=self.payload,
        ).model_dump()


SCHEMA_PATH = Path(__file__).resolve().parent.parent / "schemas" / "run_envelope.schema.json"


def envelope_schema() -> Dict[str, Any]:
    """JSON schema of the run envelope; committed at schemas/run_envelope.schema.json"""
    return RunEnvelope.model_json_schema()
