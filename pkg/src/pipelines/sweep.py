import csv
import time
from concurrent.futures import ThreadPoolExecutor, as_completed
from pathlib import Path

from pydantic import ValidationError

from ..config import get_settings
from ..exceptions import InputError
from ..io import save_trajectory
from ..logging import get_logger
from ..models import RunSpec, SweepResult, SweepRow
from ..simulate import compare
from .run_trajectory import reference_for, simulate_spec

logger = get_logger("sweep")

SIM_PARAMETERS = {
    "dt": ("dt", float),
    "t-end": ("t_end", float),
    "eta": ("readout_noise", float),
    "seed": ("rng_seed", int),
    "stride": ("output_stride", int),
}
SWEEPABLE = ("order", "beta", "every", *SIM_PARAMETERS)


def make_variant(spec: RunSpec, parameter: str, value: str, out_dir: Path) -> RunSpec:
    data = spec.model_dump()
    try:
        if parameter == "order":
            data["order"] = int(value)
        elif parameter == "beta":
            data["beta"] = float(value)
        elif parameter == "every":
            data["policy"] = {"kind": "every", "interval": float(value)}
        elif parameter in SIM_PARAMETERS:
            field, cast = SIM_PARAMETERS[parameter]
            data["sim"][field] = cast(value)
    except ValueError as e:
        raise InputError(f"Invalid value '{value}' for {parameter}: {e}") from e

    data["output"] = out_dir / f"{parameter}-{value}.csv"
    try:
        return RunSpec.model_validate(data)
    except ValidationError as e:
        raise InputError("; ".join(error["msg"] for error in e.errors())) from e


def run_single(spec: RunSpec, parameter: str, value: str, out_dir: Path, reference: str | None) -> SweepRow:
    variant = make_variant(spec, parameter, value, out_dir)
    traj = simulate_spec(variant)
    save_trajectory(traj, variant.output)

    max_abs = None
    if reference is not None:
        max_abs = compare(traj, reference_for(variant, reference)).max_abs

    return SweepRow(
        parameter=value,
        diverged=traj.diverged,
        t_div=traj.divergence,
        max_abs_vs_reference=max_abs,
    )


def write_summary(rows: list[SweepRow], path: Path) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(["parameter", "diverged", "t_div", "max_abs_vs_reference", "error"])
        for row in rows:
            writer.writerow([
                row.parameter,
                "" if row.diverged is None else int(row.diverged),
                "" if row.t_div is None else f"{row.t_div:.17e}",
                "" if row.max_abs_vs_reference is None else f"{row.max_abs_vs_reference:.17e}",
                row.error or "",
            ])


def run_sweep(
    spec: RunSpec,
    parameter: str,
    values: list[str],
    out_dir: Path,
    reference: str | None = "euler",
    workers: int | None = None,
) -> SweepResult:
    start_time = time.time()
    if not values:
        raise InputError("Sweep needs at least one parameter value")
    if parameter not in SWEEPABLE:
        raise InputError(f"Cannot sweep '{parameter}'; choose one of {', '.join(SWEEPABLE)}")
    if workers is None:
        workers = get_settings().sweep.max_workers

    logger.info("=" * 60)
    logger.info(f"Starting sweep over {parameter}: {', '.join(values)}")
    logger.info(f"Output directory: {out_dir}")
    logger.info(f"Parallel workers: {workers}")
    logger.info("=" * 60)

    rows: list[SweepRow | None] = [None] * len(values)
    with ThreadPoolExecutor(max_workers=workers) as executor:
        futures = {
            executor.submit(run_single, spec, parameter, value, out_dir, reference): index
            for index, value in enumerate(values)
        }

        for done, future in enumerate(as_completed(futures), 1):
            index = futures[future]
            try:
                rows[index] = future.result()
            except Exception as e:
                logger.error(f"Run {parameter}={values[index]} failed: {e}")
                rows[index] = SweepRow(parameter=values[index], error=str(e))
            logger.info(f"Progress: {done}/{len(values)} runs finished")

    summary_path = out_dir / "summary.csv"
    write_summary(rows, summary_path)

    elapsed = time.time() - start_time
    result = SweepResult(
        parameter=parameter,
        rows=rows,
        summary_path=summary_path,
        elapsed_seconds=elapsed,
    )

    logger.info("=" * 60)
    logger.info("Sweep Complete!")
    logger.info(
        f"  Runs: {len(rows):,}, diverged: {sum(1 for r in rows if r.diverged):,}, "
        f"failed: {result.failed:,}"
    )
    logger.info(f"  Summary: {summary_path}")
    logger.info(f"  Time elapsed: {elapsed:.2f}s")
    logger.info("=" * 60)

    return result
