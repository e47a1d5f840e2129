"""Bandwidth-adaptive split computing toolkit.

Given a per-layer profile of a network (intermediate sizes, device/server
timings per batch) and a channel state (batch size, data rate), the toolkit
finds compressive bottlenecks, picks the end-to-end-latency-optimal split,
sweeps decision surfaces over (batch, rate) grids, replays time-varying
scenarios against static baselines, and validates the analytical model with
a real socket harness.
"""

from .decision import (
    ChannelState,
    DecisionSurface,
    FULL_OFFLOAD,
    LatencyBreakdown,
    NO_OFFLOAD,
    Strategy,
    SurfaceCell,
    UnmeasuredBatchError,
    candidate_strategies,
    decision_surface,
    optimal_split,
    split_at,
    split_time,
)
from .profile import (
    BottleneckReport,
    LayerRecord,
    ModelProfile,
    ProfileError,
    analyze_bottlenecks,
    canonical_bytes,
    compression_ratios,
    compressive_set,
    load_profile,
    load_profile_path,
    natural_bottlenecks,
    profile_to_obj,
    toy3,
)
from .scenario import (
    GainMap,
    RandomWalkTraceSpec,
    SawtoothTraceSpec,
    Scenario,
    ScenarioReport,
    StepResult,
    StepTraceSpec,
    baseline_strategy,
    evaluate_scenario,
    gain_map,
    generate_trace,
    load_scenario,
)
from .synth import SyntheticSpec, generate_synthetic_profile, save_profile

__version__ = "0.1.0"

__all__ = [
    "ChannelState",
    "DecisionSurface",
    "FULL_OFFLOAD",
    "LatencyBreakdown",
    "NO_OFFLOAD",
    "Strategy",
    "SurfaceCell",
    "UnmeasuredBatchError",
    "candidate_strategies",
    "decision_surface",
    "optimal_split",
    "split_at",
    "split_time",
    "BottleneckReport",
    "LayerRecord",
    "ModelProfile",
    "ProfileError",
    "analyze_bottlenecks",
    "canonical_bytes",
    "compression_ratios",
    "compressive_set",
    "load_profile",
    "load_profile_path",
    "natural_bottlenecks",
    "profile_to_obj",
    "toy3",
    "GainMap",
    "RandomWalkTraceSpec",
    "SawtoothTraceSpec",
    "Scenario",
    "ScenarioReport",
    "StepResult",
    "StepTraceSpec",
    "baseline_strategy",
    "evaluate_scenario",
    "gain_map",
    "generate_trace",
    "load_scenario",
    "SyntheticSpec",
    "generate_synthetic_profile",
    "save_profile",
]
