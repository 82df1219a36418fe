from typing import Any

from pydantic import BaseModel

from .exceptions import InputError
from .models import (
    NeverSwitch,
    RunSpec,
    ScheduledSwitch,
    SwitchAtTimes,
    SwitchEvery,
    SwitchOnDrift,
)

KPP_SITES = 8
PHASE_FIELD_SITES = 8


class Preset(BaseModel):
    name: str
    description: str
    fields: dict[str, Any]


def _preset(name: str, description: str, **fields: Any) -> Preset:
    return Preset(name=name, description=description, fields={"t_end": 10.0, **fields})


def _build_presets() -> dict[str, Preset]:
    presets = [
        *(
            _preset(
                f"fig1a-K{K}",
                f"logistic, conventional Carleman K={K}",
                model="logistic", method="carleman", order=K,
            )
            for K in (2, 3, 4, 5)
        ),
        _preset(
            "fig2a", "logistic, PS with the pivot synchronised every step",
            model="logistic", method="ps", policy="every:0.01",
        ),
        _preset(
            "fig2b", "logistic, PS switching every 1 time unit",
            model="logistic", method="ps", policy="every:1",
        ),
        _preset(
            "fig2c", "logistic, PS switching every 2 time units",
            model="logistic", method="ps", policy="every:2",
        ),
        _preset(
            "fig2d", "logistic, PSC P=3 with the pivot fixed at 1",
            model="logistic", method="psc", order=3, pivot="1",
        ),
        _preset(
            "fig2e", "logistic, PSC P=5 with the pivot fixed at 1",
            model="logistic", method="psc", order=5, pivot="1",
        ),
        _preset(
            "fig2d-switch", "logistic, PSC P=3 with the pivot switched 0 -> 1 at t=1",
            model="logistic", method="psc", order=3, pivot="0", pivot_schedule="1=1",
        ),
        _preset(
            "fig2e-switch", "logistic, PSC P=5 with the pivot switched 0 -> 1 at t=1",
            model="logistic", method="psc", order=5, pivot="0", pivot_schedule="1=1",
        ),
        _preset(
            "fig3b", "KPP-Fisher, conventional Carleman K=3",
            model="kpp", method="carleman", order=3,
        ),
        _preset(
            "fig3c", "KPP-Fisher, PSC P=3 with the pivot fixed at 1",
            model="kpp", method="psc", order=3, pivot="1",
        ),
        _preset(
            "fig3d", "KPP-Fisher, PSC P=5 with the pivot fixed at 1",
            model="kpp", method="psc", order=5, pivot="1",
        ),
        _preset(
            "fig3e", "KPP-Fisher, PSC P=3, pivot u(0) switched to 1 at t=1",
            model="kpp", method="psc", order=3, pivot_schedule="1=1",
        ),
        _preset(
            "fig3f", "KPP-Fisher, PSC P=5, pivot u(0) switched to 1 at t=1",
            model="kpp", method="psc", order=5, pivot_schedule="1=1",
        ),
        _preset(
            "fig4b", "phase field, conventional Carleman K=3",
            model="phase-field", method="carleman", order=3,
        ),
        _preset(
            "fig4c", "phase field, PSC P=3 with the pivot fixed at -1",
            model="phase-field", method="psc", order=3, pivot="-1",
        ),
        _preset(
            "fig4d", "phase field, PSC P=5 with the pivot fixed at -1",
            model="phase-field", method="psc", order=5, pivot="-1",
        ),
        _preset(
            "fig4e", "phase field, PSC P=3, pivot phi(0) switched to -1 at t=2.9",
            model="phase-field", method="psc", order=3, pivot_schedule="2.9=-1",
        ),
        _preset(
            "fig4f", "phase field, PSC P=5, pivot phi(0) switched to -1 at t=2.9",
            model="phase-field", method="psc", order=5, pivot_schedule="2.9=-1",
        ),
    ]
    return {preset.name: preset for preset in presets}


PRESETS = _build_presets()


def parse_vector(text: str, n: int | None = None) -> tuple[float, ...]:
    """Parse a comma list; a single value is broadcast to ``n`` components."""
    try:
        values = tuple(float(part) for part in text.split(",") if part.strip())
    except ValueError as e:
        raise InputError(f"Cannot parse vector '{text}': {e}") from e
    if not values:
        raise InputError("Empty vector")
    if n is not None and len(values) == 1:
        return values * n
    if n is not None and len(values) != n:
        raise InputError(f"Vector '{text}' has {len(values)} components, expected {n}")
    return values


def parse_switch_policy(text: str):
    kind, _, argument = text.strip().partition(":")
    try:
        if kind == "never" and not argument:
            return NeverSwitch()
        if kind == "at":
            return SwitchAtTimes(times=tuple(float(t) for t in argument.split(",")))
        if kind == "every":
            return SwitchEvery(interval=float(argument))
        if kind == "drift":
            return SwitchOnDrift(tolerance=float(argument))
    except ValueError as e:
        raise InputError(f"Invalid switch policy '{text}': {e}") from e
    raise InputError(f"Unknown switch policy '{text}' (never | at:t1,t2 | every:T | drift:E)")


def parse_pivot_schedule(text: str, n: int) -> tuple[ScheduledSwitch, ...]:
    entries = []
    for chunk in text.split(";"):
        if not chunk.strip():
            continue
        time, sep, target = chunk.partition("=")
        if not sep:
            raise InputError(f"Pivot schedule entry '{chunk}' is not of the form t=target")
        try:
            entries.append(ScheduledSwitch(time=float(time), target=parse_vector(target, n)))
        except ValueError as e:
            raise InputError(f"Invalid pivot schedule entry '{chunk}': {e}") from e
    if not entries:
        raise InputError("Empty pivot schedule")
    return tuple(entries)


def model_dimension(model: str | None, n: int | None, model_file_n: int | None = None) -> int:
    if model_file_n is not None:
        return model_file_n
    if model == "logistic":
        return 1
    if model == "kpp":
        return n or KPP_SITES
    return n or PHASE_FIELD_SITES


def resolve_run_spec(
    preset: str | None,
    options: dict[str, Any],
    model_file_n: int | None = None,
) -> RunSpec:
    """Merge a preset with explicit options (options win) and build a validated RunSpec.

    Vector-valued options (x0, pivot, pivot_schedule) and the switch policy are
    given in their textual CLI form.
    """
    merged: dict[str, Any] = {}
    if preset is not None:
        if preset not in PRESETS:
            raise InputError(f"Unknown preset '{preset}'; see --list-presets")
        merged.update(PRESETS[preset].fields)
        merged["preset"] = preset
    merged.update({key: value for key, value in options.items() if value is not None})
    if merged.get("model_file") is not None:
        merged["model"] = None

    n = model_dimension(merged.get("model"), merged.get("n"), model_file_n)

    sim_fields = {
        key: merged.pop(key)
        for key in (
            "dt", "t_end", "divergence_threshold", "readout_noise",
            "rng_seed", "output_stride", "reembed", "integrator",
        )
        if key in merged
    }
    for key in ("x0", "pivot"):
        if isinstance(merged.get(key), str):
            merged[key] = parse_vector(merged[key], n)
    if isinstance(merged.get("pivot_schedule"), str):
        merged["pivot_schedule"] = parse_pivot_schedule(merged["pivot_schedule"], n)
    if isinstance(merged.get("policy"), str):
        merged["policy"] = parse_switch_policy(merged["policy"])

    return RunSpec.model_validate({**merged, "sim": sim_fields})
