"""Scenario replay, gain computation, and trace generators."""

import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from splitwise.decision import ChannelState, FULL_OFFLOAD, NO_OFFLOAD, optimal_split, split_at
from splitwise.profile import load_profile, profile_to_obj
from splitwise.scenario import (
    MBPS,
    RandomWalkTraceSpec,
    SawtoothTraceSpec,
    Scenario,
    StepTraceSpec,
    baseline_strategy,
    evaluate_scenario,
    gain_map,
    generate_trace,
    load_scenario,
    report_to_csv,
    report_to_obj,
    scenario_to_obj,
)
from splitwise.synth import SyntheticSpec, generate_synthetic_profile


def states(*pairs):
    return tuple(ChannelState(b, float(r)) for b, r in pairs)


TOY3_TWO_STEP = states((1, 5000), (1, 10000))


class TestEvaluateScenario:
    def test_toy3_golden_gain(self, toy3_profile):
        report = evaluate_scenario(toy3_profile, Scenario(TOY3_TWO_STEP), split_at(2))
        assert [r.dynamic_ms for r in report.per_step] == [29.0, 25.0]
        assert [r.baseline_ms for r in report.per_step] == [29.0, 27.0]
        # G = 1/2 * (0/29 + 2/27)
        assert report.gain == pytest.approx(1 / 27, rel=1e-12)

    def test_gain_zero_when_baseline_matches(self, toy3_profile):
        scenario = Scenario(states((1, 5000), (1, 5000)))
        report = evaluate_scenario(toy3_profile, scenario, split_at(2))
        assert report.gain == 0.0
        assert report.switch_count == 0

    def test_switch_count(self, toy3_profile):
        scenario = Scenario(states((1, 2000), (1, 5000), (1, 10000)))
        report = evaluate_scenario(toy3_profile, scenario, split_at(2))
        assert [r.dynamic for r in report.per_step] == [NO_OFFLOAD, split_at(2), FULL_OFFLOAD]
        assert report.switch_count == 2

    def test_switch_count_bounded(self, toy3_profile):
        scenario = Scenario(states(*[(1, 2000 + 8000 * (i % 2)) for i in range(9)]))
        report = evaluate_scenario(toy3_profile, scenario, split_at(2))
        assert report.switch_count <= len(scenario.steps) - 1

    def test_invalid_baseline_layer(self, toy3_profile):
        with pytest.raises(ValueError, match="not a candidate split"):
            evaluate_scenario(toy3_profile, Scenario(TOY3_TWO_STEP), split_at(1))

    def test_penalty_only_hits_switches(self, toy3_profile):
        scenario = Scenario(states((1, 2000), (1, 10000), (1, 10000)))
        free = evaluate_scenario(toy3_profile, scenario, split_at(2), switch_penalty_ms=0.0)
        taxed = evaluate_scenario(toy3_profile, scenario, split_at(2), switch_penalty_ms=3.5)
        deltas = [
            t.dynamic_ms - f.dynamic_ms for f, t in zip(free.per_step, taxed.per_step)
        ]
        assert deltas == [0.0, 3.5, 0.0]  # switch only at step 2; step 1 has no predecessor

    @given(penalty=st.floats(0.0, 50.0), seed=st.integers(0, 10**4))
    @settings(max_examples=50, deadline=None)
    def test_gain_never_negative(self, penalty, seed):
        profile = generate_synthetic_profile(
            SyntheticSpec(layer_count=8, batches=(1, 2), seed=seed, ratio_pattern="decay")
        )
        scenario = generate_trace(RandomWalkTraceSpec(n=20, batch=1), seed=seed)
        for baseline in (FULL_OFFLOAD, NO_OFFLOAD):
            report = evaluate_scenario(profile, scenario, baseline, switch_penalty_ms=penalty)
            assert report.gain >= 0.0

    @given(seed=st.integers(0, 10**4), fexp=st.integers(-3, 6))
    @settings(max_examples=40, deadline=None)
    def test_time_rescale_invariance(self, seed, fexp):
        # scaling all durations by 2**k and the rate by 2**-k is exact in floats
        factor = 2.0**fexp
        profile = generate_synthetic_profile(
            SyntheticSpec(layer_count=6, batches=(1,), seed=seed, ratio_pattern="decay")
        )
        obj = profile_to_obj(profile)
        for layer in obj["layers"]:
            layer["device_ms"] = {k: v * factor for k, v in layer["device_ms"].items()}
            layer["server_ms"] = {k: v * factor for k, v in layer["server_ms"].items()}
        scaled = load_profile(json.dumps(obj))
        scenario = Scenario(states((1, 4 * MBPS), (1, 32 * MBPS)))
        scaled_scenario = Scenario(
            tuple(ChannelState(s.batch, s.rate_bps / factor) for s in scenario.steps)
        )
        base = evaluate_scenario(profile, scenario, NO_OFFLOAD)
        rescaled = evaluate_scenario(scaled, scaled_scenario, NO_OFFLOAD)
        for a, b in zip(base.per_step, rescaled.per_step):
            assert a.step_gain == b.step_gain
        assert base.gain == rescaled.gain


class TestGainMap:
    def test_toy3_cells(self, toy3_profile):
        gm = gain_map(toy3_profile, split_at(2), [1], [5000.0, 10000.0])
        assert gm.values == ((0.0, pytest.approx(2 / 27, rel=1e-12)),)

    def test_zero_exactly_where_baseline_optimal(self, toy3_profile):
        rates = [2000.0, 5000.0, 10000.0]
        gm = gain_map(toy3_profile, NO_OFFLOAD, [1], rates)
        for r, value in zip(rates, gm.values[0]):
            strategy, _ = optimal_split(toy3_profile, ChannelState(1, r))
            if strategy == NO_OFFLOAD:
                assert value == 0.0
            else:
                assert value > 0.0

    def test_all_nonnegative(self, toy3_profile):
        gm = gain_map(toy3_profile, FULL_OFFLOAD, [1], [1000.0, 4000.0, 64000.0])
        assert all(v >= 0.0 for row in gm.values for v in row)

    def test_single_step_scenario_matches_cell(self, toy3_profile):
        state = ChannelState(1, 10000.0)
        gm = gain_map(toy3_profile, split_at(2), [state.batch], [state.rate_bps])
        report = evaluate_scenario(toy3_profile, Scenario((state,)), split_at(2))
        assert report.gain == gm.values[0][0]


class TestTraces:
    def test_step_trace_two_states(self):
        scenario = generate_trace(
            StepTraceSpec(n=100, rate_before_bps=1 * MBPS, rate_after_bps=128 * MBPS, switch_at=50)
        )
        assert len(scenario.steps) == 100
        assert len(set(scenario.steps)) == 2
        assert scenario.steps[49].rate_bps == 1 * MBPS
        assert scenario.steps[50].rate_bps == 128 * MBPS

    def test_random_walk_bounds_and_determinism(self):
        spec = RandomWalkTraceSpec(n=100, start_rate_bps=64 * MBPS)
        a = generate_trace(spec, seed=1)
        b = generate_trace(spec, seed=1)
        assert a == b
        assert len(a.steps) == 100
        assert all(1 * MBPS <= s.rate_bps <= 128 * MBPS for s in a.steps)
        assert generate_trace(spec, seed=2) != a

    def test_random_walk_batch_choices(self):
        spec = RandomWalkTraceSpec(n=200, batch_choices=(1, 2, 4, 8))
        scenario = generate_trace(spec, seed=5)
        assert {s.batch for s in scenario.steps} <= {1, 2, 4, 8}

    def test_sawtooth_batches_cycle(self):
        scenario = generate_trace(SawtoothTraceSpec(n=20, rate_bps=8 * MBPS))
        assert [s.batch for s in scenario.steps[:8]] == [1, 2, 4, 8, 16, 32, 64, 1]
        assert all(s.rate_bps == 8 * MBPS for s in scenario.steps)

    def test_invalid_bounds(self):
        with pytest.raises(ValueError):
            generate_trace(RandomWalkTraceSpec(n=10, start_rate_bps=256 * MBPS))
        with pytest.raises(ValueError):
            generate_trace(StepTraceSpec(n=10, rate_before_bps=1e6, rate_after_bps=1e6, switch_at=99))
        with pytest.raises(ValueError):
            generate_trace(SawtoothTraceSpec(n=5, batch_cycle=()))


class TestFileFormats:
    def test_scenario_round_trip(self, tmp_path):
        scenario = generate_trace(RandomWalkTraceSpec(n=10), seed=3)
        text = json.dumps(scenario_to_obj(scenario))
        assert load_scenario(text) == scenario

    def test_scenario_with_timestamps(self):
        raw = json.dumps(
            [{"batch": 1, "rate_bps": 1e6, "t_ms": 0.0}, {"batch": 2, "rate_bps": 2e6, "t_ms": 50.0}]
        )
        scenario = load_scenario(raw)
        assert scenario.timestamps_ms == (0.0, 50.0)

    def test_scenario_rejects_garbage(self):
        with pytest.raises(ValueError):
            load_scenario(b"[]")
        with pytest.raises(ValueError):
            load_scenario(b'[{"batch": 0, "rate_bps": 100}]')

    def test_report_formats(self, toy3_profile):
        report = evaluate_scenario(toy3_profile, Scenario(TOY3_TWO_STEP), split_at(2))
        obj = report_to_obj(report)
        assert obj["switch_count"] == report.switch_count
        assert obj["per_step"][1]["dyn_strategy"] == "full_offload"
        lines = report_to_csv(report).strip().split("\n")
        assert lines[0] == "step,batch,rate_bps,dyn_strategy,dyn_ms,base_ms,step_gain"
        assert len(lines) == 3

    def test_baseline_parsing(self):
        assert baseline_strategy("full") == FULL_OFFLOAD
        assert baseline_strategy("none") == NO_OFFLOAD
        assert baseline_strategy("static:7") == split_at(7)
        with pytest.raises(ValueError):
            baseline_strategy("static:x")
        with pytest.raises(ValueError):
            baseline_strategy("sometimes")
