"""Compare two trajectories, or one run against a reference solution."""
from pathlib import Path

from ..exceptions import InputError
from ..io import load_trajectory
from ..logging import get_logger
from ..models import CompareResult, RunSpec
from ..simulate import compare
from .run_trajectory import reference_for, simulate_spec

logger = get_logger("compare_runs")


def run_compare(
    paths: list[Path],
    spec: RunSpec | None = None,
    reference: str | None = None,
    tolerance: float | None = None,
) -> CompareResult:
    if len(paths) == 2 and reference is None:
        first, second = (load_trajectory(path) for path in paths)
    elif len(paths) <= 1 and reference is not None and spec is not None:
        first = load_trajectory(paths[0]) if paths else simulate_spec(spec)
        second = reference_for(spec, reference)
    else:
        raise InputError("compare needs two trajectory files, or a run and --reference")

    logger.info(f"Comparing '{first.label}' against '{second.label}'")
    report = compare(first, second)
    result = CompareResult(
        report=report,
        diverged=first.diverged or second.diverged,
        tolerance=tolerance,
    )

    if first.diverged:
        logger.warning(f"'{first.label}' diverged at t={first.divergence:g}")
    if second.diverged:
        logger.warning(f"'{second.label}' diverged at t={second.divergence:g}")
    logger.info(
        f"max_abs={report.max_abs:.3e} over {report.samples:,} samples "
        f"(tolerance: {tolerance if tolerance is not None else 'none'})"
    )
    return result
