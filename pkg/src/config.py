from dataclasses import dataclass
from functools import lru_cache

from decouple import config


@dataclass(frozen=True)
class NumericsConfig:
    dense_cap: int = 65_536
    block0_tolerance: float = 1e-9


@dataclass(frozen=True)
class SimulationDefaults:
    dt: float = 0.01
    t_end: float = 10.0
    divergence_threshold: float = 5.0
    seed: int = 0


@dataclass(frozen=True)
class SweepConfig:
    max_workers: int = 4


@dataclass(frozen=True)
class Settings:
    numerics: NumericsConfig
    simulation: SimulationDefaults
    sweep: SweepConfig


@lru_cache(maxsize=1)
def get_settings() -> Settings:
    return Settings(
        numerics=NumericsConfig(
            dense_cap=config("PIVOT_DENSE_CAP", default=65_536, cast=int),
            block0_tolerance=config("PIVOT_BLOCK0_TOLERANCE", default=1e-9, cast=float),
        ),
        simulation=SimulationDefaults(
            dt=config("PIVOT_DT", default=0.01, cast=float),
            divergence_threshold=config("PIVOT_DIVERGENCE_THRESHOLD", default=5.0, cast=float),
        ),
        sweep=SweepConfig(
            max_workers=config("PIVOT_SWEEP_WORKERS", default=4, cast=int),
        ),
    )
