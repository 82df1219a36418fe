import pytest
from pydantic import ValidationError

from src.exceptions import InputError
from src.models import RunSpec, SimConfig, SwitchAtTimes, SwitchEvery
from src.presets import (
    PRESETS,
    parse_pivot_schedule,
    parse_switch_policy,
    parse_vector,
    resolve_run_spec,
)


class TestParsing:
    def test_vector(self):
        assert parse_vector("0.1, 0.2") == (0.1, 0.2)
        assert parse_vector("1", n=3) == (1.0, 1.0, 1.0)

    def test_vector_length_mismatch(self):
        with pytest.raises(InputError):
            parse_vector("1,2", n=3)

    def test_vector_garbage(self):
        with pytest.raises(InputError):
            parse_vector("a,b")

    @pytest.mark.parametrize(
        "text, kind",
        [("never", "never"), ("at:1,2.5", "at"), ("every:0.5", "every"), ("drift:0.1", "drift")],
    )
    def test_switch_policy(self, text, kind):
        assert parse_switch_policy(text).kind == kind

    @pytest.mark.parametrize("text", ["sometimes", "every:0", "every:-1", "at:2,1", "drift:x"])
    def test_invalid_switch_policy(self, text):
        with pytest.raises(InputError):
            parse_switch_policy(text)

    def test_pivot_schedule(self):
        schedule = parse_pivot_schedule("1=1;2.9=-1", n=2)
        assert [entry.time for entry in schedule] == [1.0, 2.9]
        assert schedule[1].target == (-1.0, -1.0)

    def test_pivot_schedule_without_target(self):
        with pytest.raises(InputError):
            parse_pivot_schedule("1.5", n=1)


class TestPresets:
    def test_figure_presets_exist(self):
        for name in ("fig1a-K2", "fig1a-K5", "fig2a", "fig2e", "fig3b", "fig3f", "fig4b", "fig4f"):
            assert name in PRESETS

    def test_carleman_preset(self):
        spec = resolve_run_spec("fig1a-K3", {})
        assert (spec.model, spec.method, spec.order) == ("logistic", "carleman", 3)
        assert spec.sim.t_end == 10.0

    def test_ps_preset_forces_order_one(self):
        spec = resolve_run_spec("fig2b", {})
        assert spec.order == 1
        assert spec.policy == SwitchEvery(interval=1.0)

    def test_scheduled_preset(self):
        spec = resolve_run_spec("fig4f", {})
        assert spec.method == "psc" and spec.order == 5
        assert spec.policy == SwitchAtTimes(times=(2.9,))
        assert spec.pivot_schedule[0].target == (-1.0,) * 8
        assert spec.pivot is None

    def test_options_override_preset(self):
        spec = resolve_run_spec("fig1a-K3", {"order": 4, "t_end": 2.0, "readout_noise": 0.1})
        assert spec.order == 4
        assert spec.sim.t_end == 2.0
        assert spec.sim.readout_noise == 0.1

    def test_unknown_preset(self):
        with pytest.raises(InputError):
            resolve_run_spec("fig9", {})

    def test_every_preset_resolves(self):
        for name in PRESETS:
            assert resolve_run_spec(name, {}).preset == name


class TestRunSpec:
    def test_defaults(self):
        spec = RunSpec()
        assert spec.sim.dt == 0.01
        assert spec.sim.divergence_threshold == 5.0
        assert spec.basis == "centered"

    def test_carleman_rejects_switching(self):
        with pytest.raises(ValidationError):
            RunSpec(method="carleman", policy=SwitchEvery(interval=1.0))

    def test_order_must_be_positive(self):
        with pytest.raises(ValidationError):
            RunSpec(method="psc", order=0)

    def test_schedule_must_match_at_policy(self):
        with pytest.raises(ValidationError):
            resolve_run_spec(None, {"model": "logistic", "method": "psc", "pivot_schedule": "1=1", "policy": "every:1"})

    def test_non_positive_step(self):
        with pytest.raises(ValidationError):
            SimConfig(dt=0.0)

    def test_step_count(self):
        assert SimConfig(t_end=10.0).n_steps == 1000
