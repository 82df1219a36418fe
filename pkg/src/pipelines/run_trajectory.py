import sys
import time

import numpy as np
from numpy.typing import NDArray

from ..benchmarks import build_named
from ..exceptions import InputError
from ..io import save_trajectory, write_trajectory
from ..logging import get_logger
from ..models import RunResult, RunSpec, Trajectory
from ..poly_ode import PolyODE, parse_model
from ..simulate import analytic_reference, reference_solve, run_lifted

logger = get_logger("run_trajectory")


def load_model(spec: RunSpec) -> tuple[PolyODE, NDArray[np.float64], str]:
    if spec.model_file is not None:
        ode = parse_model(spec.model_file.read_text(encoding="utf-8"))
        if spec.x0 is None:
            raise InputError(f"Model file {spec.model_file} needs an explicit --x0")
        x0 = np.asarray(spec.x0, dtype=float)
        if x0.size != ode.n:
            raise InputError(f"--x0 has {x0.size} components, the model has n={ode.n}")
        return ode, x0, spec.model_file.stem

    named = build_named(spec.model, n=spec.n, beta=spec.beta, x0=spec.x0)
    return named.ode, np.array(named.default_x0), named.label


def simulate_spec(spec: RunSpec) -> Trajectory:
    ode, x0, label = load_model(spec)
    traj = run_lifted(
        ode,
        spec.method,
        spec.order,
        x0,
        spec.pivot,
        spec.policy,
        spec.sim,
        schedule=spec.pivot_schedule,
    )
    traj.label = spec.preset or f"{label}-{spec.method}-{spec.order}"
    return traj


def reference_for(spec: RunSpec, kind: str) -> Trajectory:
    ode, x0, label = load_model(spec)
    if kind == "analytic":
        if label != "logistic":
            raise InputError("The analytic reference exists only for the logistic model")
        return analytic_reference(float(x0[0]), spec.sim)
    if kind not in ("euler", "rk4"):
        raise InputError(f"Unknown reference '{kind}' (euler | rk4 | analytic)")
    return reference_solve(ode, x0, spec.sim.model_copy(update={"integrator": kind}))


def run_simulation(spec: RunSpec) -> RunResult:
    start_time = time.time()

    logger.info("=" * 60)
    logger.info(f"Starting {spec.method} run" + (f" (preset {spec.preset})" if spec.preset else ""))
    logger.info(f"Model: {spec.model_file or spec.model}, order: {spec.order}")
    logger.info(f"Switching: {spec.policy.kind}, dt: {spec.sim.dt}, t_end: {spec.sim.t_end}")
    if spec.sim.readout_noise:
        logger.info(f"Readout noise: {spec.sim.readout_noise} (seed {spec.sim.rng_seed})")
    logger.info("=" * 60)

    traj = simulate_spec(spec)

    if spec.output is not None:
        save_trajectory(traj, spec.output)
        logger.info(f"Trajectory written to {spec.output}")
    else:
        write_trajectory(traj, sys.stdout)

    elapsed = time.time() - start_time
    result = RunResult(
        trajectory=traj,
        output=spec.output,
        samples=len(traj.times),
        elapsed_seconds=elapsed,
    )

    logger.info("=" * 60)
    logger.info("Run Complete!")
    logger.info(f"  Samples: {result.samples:,}, pivot switches: {len(traj.switch_events):,}")
    if result.diverged:
        logger.warning(f"  Diverged at t={traj.divergence:g}")
    logger.info(f"  Time elapsed: {elapsed:.2f}s")
    logger.info("=" * 60)

    return result
