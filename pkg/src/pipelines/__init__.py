"""Orchestration for the command-line sub-commands."""

from .compare_runs import run_compare
from .dump_matrix import run_dump_matrix
from .export_model import run_export_model
from .run_trajectory import run_simulation
from .sweep import run_sweep

__all__ = ["run_compare", "run_dump_matrix", "run_export_model", "run_simulation", "run_sweep"]
