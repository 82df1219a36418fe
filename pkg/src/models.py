from pathlib import Path
from typing import Annotated, Literal

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from .config import get_settings


class ModelTermRecord(BaseModel):
    m: int = Field(ge=0)
    row: int = Field(ge=0)
    cols: list[int]
    value: float

    @model_validator(mode="after")
    def _cols_match_degree(self) -> "ModelTermRecord":
        if len(self.cols) != self.m:
            raise ValueError(f"cols must have exactly m={self.m} entries, got {len(self.cols)}")
        return self


class ModelFile(BaseModel):
    n: int = Field(ge=1)
    degree: int = Field(ge=0)
    terms: list[ModelTermRecord] = Field(default_factory=list)


class NeverSwitch(BaseModel):
    model_config = ConfigDict(frozen=True)

    kind: Literal["never"] = "never"


class SwitchAtTimes(BaseModel):
    model_config = ConfigDict(frozen=True)

    kind: Literal["at"] = "at"
    times: tuple[float, ...]

    @field_validator("times")
    @classmethod
    def _strictly_increasing(cls, times: tuple[float, ...]) -> tuple[float, ...]:
        if not times:
            raise ValueError("at least one switch time is required")
        if any(b <= a for a, b in zip(times, times[1:])):
            raise ValueError(f"switch times must be strictly increasing, got {times}")
        return times


class SwitchEvery(BaseModel):
    model_config = ConfigDict(frozen=True)

    kind: Literal["every"] = "every"
    interval: float = Field(gt=0)


class SwitchOnDrift(BaseModel):
    model_config = ConfigDict(frozen=True)

    kind: Literal["drift"] = "drift"
    tolerance: float = Field(gt=0)


SwitchPolicy = Annotated[
    NeverSwitch | SwitchAtTimes | SwitchEvery | SwitchOnDrift,
    Field(discriminator="kind"),
]


class ScheduledSwitch(BaseModel):
    model_config = ConfigDict(frozen=True)

    time: float = Field(ge=0)
    target: tuple[float, ...]


class SimConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    dt: float = Field(default_factory=lambda: get_settings().simulation.dt, gt=0)
    t_end: float = Field(default_factory=lambda: get_settings().simulation.t_end, ge=0)
    divergence_threshold: float = Field(
        default_factory=lambda: get_settings().simulation.divergence_threshold, gt=0
    )
    readout_noise: float = Field(default=0.0, ge=0)
    rng_seed: int = Field(default_factory=lambda: get_settings().simulation.seed)
    output_stride: int = Field(default=1, ge=1)
    # "blocks" carries evolved higher blocks across a pivot switch
    reembed: Literal["state", "blocks"] = "state"
    integrator: Literal["euler", "rk4"] = "euler"

    @property
    def n_steps(self) -> int:
        return int(round(self.t_end / self.dt))


class PivotRecord(BaseModel):
    time: float
    s: list[float]


class Trajectory(BaseModel):
    label: str = ""
    times: list[float] = Field(default_factory=list)
    states: list[list[float]] = Field(default_factory=list)
    sample_pivots: list[list[float] | None] = Field(default_factory=list)
    sample_switched: list[bool] = Field(default_factory=list)
    pivots: list[PivotRecord] = Field(default_factory=list)
    switch_events: list[float] = Field(default_factory=list)
    divergence: float | None = None

    @model_validator(mode="after")
    def _consistent_samples(self) -> "Trajectory":
        count = len(self.times)
        if not (len(self.states) == len(self.sample_pivots) == len(self.sample_switched) == count):
            raise ValueError("times, states, sample_pivots and sample_switched must align")
        if any(b <= a for a, b in zip(self.times, self.times[1:])):
            raise ValueError("trajectory times must be strictly increasing")
        return self

    @property
    def n(self) -> int:
        return len(self.states[0]) if self.states else 0

    @property
    def diverged(self) -> bool:
        return self.divergence is not None


class ErrorReport(BaseModel):
    max_abs: float
    rms: float
    t_at_max: float
    samples: int

    def format_line(self) -> str:
        return f"max_abs={self.max_abs:.17e} rms={self.rms:.17e} t_at_max={self.t_at_max:.17e}"


class SweepRow(BaseModel):
    parameter: str
    diverged: bool | None = None
    t_div: float | None = None
    max_abs_vs_reference: float | None = None
    error: str | None = None


class RunSpec(BaseModel):
    """A fully resolved run: model, linearization, switching and integration settings."""

    model: Literal["logistic", "kpp", "phase-field"] | None = "logistic"
    model_file: Path | None = None
    n: int | None = None
    beta: float | None = None
    method: Literal["carleman", "ps", "psc"] = "carleman"
    order: int = 3
    x0: tuple[float, ...] | None = None
    pivot: tuple[float, ...] | None = None
    pivot_schedule: tuple[ScheduledSwitch, ...] = ()
    policy: SwitchPolicy = Field(default_factory=NeverSwitch)
    sim: SimConfig = Field(default_factory=SimConfig)
    basis: Literal["monomial", "centered"] = "centered"
    output: Path | None = None
    preset: str | None = None

    @model_validator(mode="after")
    def _consistent(self) -> "RunSpec":
        if self.model_file is None and self.model is None:
            raise ValueError("either a model name or a model file is required")
        if self.method == "ps":
            self.order = 1
        if self.order < 1:
            raise ValueError(f"order must be at least 1, got {self.order}")

        if self.method == "carleman":
            if self.pivot_schedule:
                raise ValueError("carleman runs do not take a pivot schedule")
            if self.policy.kind != "never":
                raise ValueError("carleman runs do not switch pivots")

        if self.pivot_schedule:
            times = tuple(entry.time for entry in self.pivot_schedule)
            if any(b <= a for a, b in zip(times, times[1:])):
                raise ValueError(f"pivot schedule times must be strictly increasing, got {times}")
            if self.policy.kind == "never":
                self.policy = SwitchAtTimes(times=times)
            elif self.policy.kind != "at" or self.policy.times != times:
                raise ValueError("a pivot schedule only combines with matching at:<times> switching")
        return self


class RunResult(BaseModel):
    trajectory: Trajectory
    output: Path | None = None
    samples: int = 0
    elapsed_seconds: float = 0.0

    @property
    def diverged(self) -> bool:
        return self.trajectory.diverged


class CompareResult(BaseModel):
    report: ErrorReport
    diverged: bool = False
    tolerance: float | None = None

    @property
    def within_tolerance(self) -> bool:
        if self.diverged:
            return False
        return self.tolerance is None or self.report.max_abs <= self.tolerance


class SweepResult(BaseModel):
    parameter: str
    rows: list[SweepRow]
    summary_path: Path
    elapsed_seconds: float = 0.0

    @property
    def failed(self) -> int:
        return sum(1 for row in self.rows if row.error is not None)
