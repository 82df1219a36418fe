import numpy as np
from numpy.typing import ArrayLike, NDArray

from .benchmarks import logistic_analytic
from .exceptions import InputError
from .linearize import LiftedSystem, Method, build_lifted, lift_state, read_x
from .logging import get_logger
from .models import (
    ErrorReport,
    PivotRecord,
    ScheduledSwitch,
    SimConfig,
    SwitchPolicy,
    Trajectory,
)
from .poly_ode import PivotState, PolyODE, eval_rhs
from .tensor import binomial_lift_transform

logger = get_logger("simulate")


def euler_step(sys: LiftedSystem, y: NDArray[np.float64], dt: float) -> NDArray[np.float64]:
    return y + dt * sys.op.apply(y)


def readout_pivot(
    x_est: ArrayLike,
    eta: float,
    rng: np.random.Generator,
) -> PivotState:
    """Place a pivot from a loose estimate: x_est perturbed by at most eta per component."""
    if eta < 0:
        raise InputError(f"Readout noise must be non-negative, got {eta}")
    x_est = np.asarray(x_est, dtype=float).reshape(-1)
    if eta == 0:
        return PivotState(x_est.copy())
    return PivotState(x_est + eta * rng.uniform(-1.0, 1.0, size=x_est.size))


class SwitchController:
    def __init__(
        self,
        policy: SwitchPolicy,
        schedule: tuple[ScheduledSwitch, ...],
        dt: float,
    ):
        self.policy = policy
        self.schedule = schedule
        self.eps = 1e-6 * dt
        self.last_switch = 0.0
        self.next_index = 0

    def due(self, t: float, x: NDArray[np.float64], s: NDArray[np.float64]) -> tuple[bool, tuple[float, ...] | None]:
        """Return whether a switch fires at ``t`` and its scripted target, if any."""
        kind = self.policy.kind
        if kind == "never":
            return False, None
        if kind == "every":
            return t - self.last_switch >= self.policy.interval - self.eps, None
        if kind == "drift":
            return bool(np.max(np.abs(x - s)) > self.policy.tolerance), None

        if self.next_index >= len(self.policy.times) or t < self.policy.times[self.next_index] - self.eps:
            return False, None
        target = self.schedule[self.next_index].target if self.schedule else None
        return True, target

    def record(self, t: float) -> None:
        self.last_switch = t
        if self.policy.kind == "at":
            self.next_index += 1


def _diverged(x: NDArray[np.float64], threshold: float) -> bool:
    return not np.all(np.isfinite(x)) or float(np.max(np.abs(x))) > threshold


def run_lifted(
    ode: PolyODE,
    method: Method,
    order: int,
    x0: ArrayLike,
    s0: PivotState | ArrayLike | None,
    policy: SwitchPolicy,
    cfg: SimConfig,
    schedule: tuple[ScheduledSwitch, ...] = (),
) -> Trajectory:
    x0 = np.asarray(x0, dtype=float).reshape(-1)
    if x0.size != ode.n:
        raise InputError(f"Initial state has dimension {x0.size}, the ODE has n={ode.n}")
    if method == "carleman" and policy.kind != "never":
        raise InputError("Conventional Carleman runs cannot switch pivots")
    if policy.kind == "drift" and policy.tolerance <= 0:
        raise InputError(f"Drift tolerance must be positive, got {policy.tolerance}")
    if schedule:
        if policy.kind != "at" or len(policy.times) != len(schedule):
            raise InputError("A pivot schedule needs an at:<times> policy with one time per target")
        for entry in schedule:
            if len(entry.target) != ode.n:
                raise InputError(f"Scheduled pivot {entry.target} does not have dimension {ode.n}")

    if method == "carleman":
        pivot = PivotState.zeros(ode.n)
    else:
        pivot = s0 if isinstance(s0, PivotState) else PivotState(x0 if s0 is None else s0)
        if pivot.n != ode.n:
            raise InputError(f"Pivot has dimension {pivot.n}, the ODE has n={ode.n}")

    sys = build_lifted(ode, method, order, pivot)
    y = lift_state(x0, sys)
    rng = np.random.default_rng(cfg.rng_seed)
    controller = SwitchController(policy, schedule, cfg.dt)

    logger.debug(f"{method} run: lifted dimension {sys.size}, {sys.op.term_count} Kronecker terms")

    x = read_x(y, sys)
    traj = Trajectory(
        times=[0.0],
        states=[x.tolist()],
        sample_pivots=[pivot.s.tolist()],
        sample_switched=[False],
        pivots=[PivotRecord(time=0.0, s=pivot.s.tolist())],
    )

    switched_since_sample = False
    for step in range(1, cfg.n_steps + 1):
        t = step * cfg.dt
        y = euler_step(sys, y, cfg.dt)
        if not np.all(np.isfinite(y)):
            traj.divergence = t
            break
        x = read_x(y, sys)
        if _diverged(x, cfg.divergence_threshold):
            traj.divergence = t
            break

        due, target = controller.due(t, x, sys.pivot.s)
        if due:
            new_pivot = PivotState(target) if target is not None else readout_pivot(x, cfg.readout_noise, rng)
            new_sys = build_lifted(ode, method, order, new_pivot)
            if cfg.reembed == "blocks" and sys.basis == "centered":
                shift = binomial_lift_transform(new_pivot.s - sys.pivot.s, order)
                y = shift.apply(y)
            else:
                y = lift_state(x, new_sys)
            sys = new_sys
            x = read_x(y, sys)
            controller.record(t)
            traj.switch_events.append(t)
            traj.pivots.append(PivotRecord(time=t, s=new_pivot.s.tolist()))
            switched_since_sample = True

        if step % cfg.output_stride == 0:
            traj.times.append(t)
            traj.states.append(x.tolist())
            traj.sample_pivots.append(sys.pivot.s.tolist())
            traj.sample_switched.append(switched_since_sample)
            switched_since_sample = False

    if traj.diverged:
        logger.info(f"{method} run diverged at t={traj.divergence:g}")
    return traj


def _rk4_step(ode: PolyODE, x: NDArray[np.float64], dt: float) -> NDArray[np.float64]:
    k1 = eval_rhs(ode, x)
    k2 = eval_rhs(ode, x + 0.5 * dt * k1)
    k3 = eval_rhs(ode, x + 0.5 * dt * k2)
    k4 = eval_rhs(ode, x + dt * k3)
    return x + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def reference_solve(ode: PolyODE, x0: ArrayLike, cfg: SimConfig) -> Trajectory:
    x = np.asarray(x0, dtype=float).reshape(-1).copy()
    if x.size != ode.n:
        raise InputError(f"Initial state has dimension {x.size}, the ODE has n={ode.n}")

    traj = Trajectory(
        label=f"reference-{cfg.integrator}",
        times=[0.0],
        states=[x.tolist()],
        sample_pivots=[None],
        sample_switched=[False],
    )
    for step in range(1, cfg.n_steps + 1):
        t = step * cfg.dt
        if cfg.integrator == "rk4":
            x = _rk4_step(ode, x, cfg.dt)
        else:
            x = x + cfg.dt * eval_rhs(ode, x)
        if _diverged(x, cfg.divergence_threshold):
            traj.divergence = t
            break
        if step % cfg.output_stride == 0:
            traj.times.append(t)
            traj.states.append(x.tolist())
            traj.sample_pivots.append(None)
            traj.sample_switched.append(False)
    return traj


def analytic_reference(x0: float, cfg: SimConfig) -> Trajectory:
    """Closed-form logistic solution sampled on the run grid."""
    steps = range(0, cfg.n_steps + 1, cfg.output_stride)
    times = [step * cfg.dt for step in steps]
    return Trajectory(
        label="reference-analytic",
        times=times,
        states=[[logistic_analytic(x0, t)] for t in times],
        sample_pivots=[None] * len(times),
        sample_switched=[False] * len(times),
    )


def compare(a: Trajectory, b: Trajectory) -> ErrorReport:
    """Error of ``a`` against ``b`` over their common time range, nearest-time resampled."""
    if not a.times or not b.times:
        raise InputError("Cannot compare an empty trajectory")
    if a.n != b.n:
        raise InputError(f"Trajectories have different dimensions ({a.n} vs {b.n})")

    ta, xa = np.asarray(a.times), np.asarray(a.states)
    tb, xb = np.asarray(b.times), np.asarray(b.states)
    spacing = max((float(np.max(np.diff(t))) for t in (ta, tb) if t.size > 1), default=0.0)
    slack = 0.5 * spacing + 1e-9

    lo, hi = max(ta[0], tb[0]), min(ta[-1], tb[-1])
    if hi < lo - slack:
        raise InputError(f"Trajectories cover disjoint time ranges [{ta[0]}, {ta[-1]}] and [{tb[0]}, {tb[-1]}]")

    mask = (ta >= lo - slack) & (ta <= hi + slack)
    ta, xa = ta[mask], xa[mask]
    if ta.size == 0:
        raise InputError("Trajectories share no sample times")

    right = np.clip(np.searchsorted(tb, ta), 0, tb.size - 1)
    left = np.clip(right - 1, 0, tb.size - 1)
    nearest = np.where(np.abs(tb[left] - ta) <= np.abs(tb[right] - ta), left, right)
    if np.any(np.abs(tb[nearest] - ta) > slack):
        raise InputError("Time grids cannot be matched by nearest-time resampling")

    diff = np.abs(xa - xb[nearest])
    per_sample = diff.max(axis=1)
    worst = int(np.argmax(per_sample))
    return ErrorReport(
        max_abs=float(per_sample[worst]),
        rms=float(np.sqrt(np.mean(diff**2))),
        t_at_max=float(ta[worst]),
        samples=int(ta.size),
    )
