"""Scenario replay: dynamic split selection vs static baselines over time.

A scenario is an ordered sequence of channel states. The dynamic policy picks
the optimal strategy fresh at every step; a baseline sticks to one strategy
throughout. The headline number is the relative average gain

  G = (1/N) * sum_i |T_dyn(B_i, r_i) - T_base(B_i, r_i)| / T_base(B_i, r_i)

which is zero exactly when the baseline matches the dynamic optimum's latency
at every step.
"""

from __future__ import annotations

import csv
import io
import json
import random
from dataclasses import dataclass
from typing import IO, Union

from .decision import (
    ChannelState,
    FULL_OFFLOAD,
    NO_OFFLOAD,
    Strategy,
    candidate_strategies,
    optimal_split,
    split_at,
    split_time,
)
from .profile import ModelProfile

MBPS = 1_000_000.0  # 10^6 bytes per second
POW2_BATCHES = (1, 2, 4, 8, 16, 32, 64)


@dataclass(frozen=True)
class Scenario:
    steps: tuple[ChannelState, ...]
    timestamps_ms: tuple[float, ...] | None = None  # informational only

    def __post_init__(self) -> None:
        if len(self.steps) < 1:
            raise ValueError("scenario needs at least one step")
        if self.timestamps_ms is not None and len(self.timestamps_ms) != len(self.steps):
            raise ValueError("timestamps must align with steps")


@dataclass(frozen=True)
class StepResult:
    state: ChannelState
    dynamic: Strategy
    dynamic_ms: float
    baseline_ms: float

    @property
    def step_gain(self) -> float:
        return abs(self.dynamic_ms - self.baseline_ms) / self.baseline_ms


@dataclass(frozen=True)
class ScenarioReport:
    per_step: tuple[StepResult, ...]
    gain: float
    switch_count: int


@dataclass(frozen=True)
class GainMap:
    batches: tuple[int, ...]
    rates_bps: tuple[float, ...]
    values: tuple[tuple[float, ...], ...]  # values[batch_index][rate_index]


def baseline_strategy(spec: str) -> Strategy:
    """Parse a baseline spec: static:<layer>, full, or none (no offloading)."""
    if spec == "full":
        return FULL_OFFLOAD
    if spec == "none":
        return NO_OFFLOAD
    if spec.startswith("static:"):
        try:
            return split_at(int(spec.split(":", 1)[1], 10))
        except ValueError:
            pass
    raise ValueError(f"unknown baseline {spec!r}; expected static:<layer>, full, or none")


def validate_baseline(profile: ModelProfile, baseline: Strategy) -> None:
    """A static-split baseline must sit at a candidate split layer."""
    if baseline.kind == "split":
        candidates = candidate_strategies(profile, allow_full_offload=True)
        if baseline not in candidates:
            splits = [s.layer for s in candidates if s.kind == "split"]
            raise ValueError(
                f"layer {baseline.layer} is not a candidate split for "
                f"{profile.name!r} (candidates: {splits})"
            )


def evaluate_scenario(
    profile: ModelProfile,
    scenario: Scenario,
    baseline: Strategy,
    allow_full_offload: bool = True,
    switch_penalty_ms: float = 0.0,
    interpolate: bool = False,
) -> ScenarioReport:
    """Replay a scenario, comparing per-step dynamic selection to the baseline.

    switch_penalty_ms (default 0: switching is free) is added to the dynamic
    side whenever the chosen strategy differs from the previous step's;
    selection itself stays myopic.
    """
    validate_baseline(profile, baseline)
    if switch_penalty_ms < 0:
        raise ValueError("switch_penalty_ms must be >= 0")

    results = []
    prev: Strategy | None = None
    switches = 0
    for state in scenario.steps:
        strategy, breakdown = optimal_split(
            profile, state, allow_full_offload, interpolate=interpolate
        )
        dynamic_ms = breakdown.total_ms
        if prev is not None and strategy != prev:
            switches += 1
            dynamic_ms += switch_penalty_ms
        prev = strategy
        base_ms = split_time(profile, baseline, state, interpolate).total_ms
        results.append(StepResult(state, strategy, dynamic_ms, base_ms))

    gain = sum(r.step_gain for r in results) / len(results)
    return ScenarioReport(tuple(results), gain, switches)


def gain_map(
    profile: ModelProfile,
    baseline: Strategy,
    batches: list[int] | tuple[int, ...],
    rates_bps: list[float] | tuple[float, ...],
    allow_full_offload: bool = True,
    interpolate: bool = False,
) -> GainMap:
    """Per-state relative gain of dynamic selection over the baseline.

    Zero exactly where the baseline is the dynamic optimum (same latency);
    always >= 0.
    """
    validate_baseline(profile, baseline)
    bs = tuple(sorted(set(batches)))
    rs = tuple(sorted(set(float(r) for r in rates_bps)))
    rows = []
    for b in bs:
        row = []
        for r in rs:
            state = ChannelState(b, r)
            _, best = optimal_split(profile, state, allow_full_offload, interpolate=interpolate)
            base_ms = split_time(profile, baseline, state, interpolate).total_ms
            row.append(abs(best.total_ms - base_ms) / base_ms)
        rows.append(tuple(row))
    return GainMap(bs, rs, tuple(rows))


# --- traces -----------------------------------------------------------------


@dataclass(frozen=True)
class StepTraceSpec:
    """Rate jumps once: rate_before until switch_at (0-based), rate_after on."""

    n: int
    rate_before_bps: float
    rate_after_bps: float
    switch_at: int
    batch: int = 1


@dataclass(frozen=True)
class RandomWalkTraceSpec:
    """Multiplicative rate walk (x factor or / factor, p=0.5), clamped to bounds.

    When batch_choices is given, the batch does a lazy +-1 index walk over it.
    """

    n: int
    start_rate_bps: float = 64 * MBPS
    factor: float = 2.0
    min_rate_bps: float = 1 * MBPS
    max_rate_bps: float = 128 * MBPS
    batch: int = 1
    batch_choices: tuple[int, ...] | None = None


@dataclass(frozen=True)
class SawtoothTraceSpec:
    """Batch cycles through batch_cycle while the rate stays fixed."""

    n: int
    batch_cycle: tuple[int, ...] = POW2_BATCHES
    rate_bps: float = 64 * MBPS


TraceSpec = Union[StepTraceSpec, RandomWalkTraceSpec, SawtoothTraceSpec]


def generate_trace(spec: TraceSpec, seed: int = 0) -> Scenario:
    """Deterministic scenario for a seed; all states stay within the spec bounds."""
    if spec.n < 1:
        raise ValueError("trace needs n >= 1")
    if isinstance(spec, StepTraceSpec):
        if not 0 <= spec.switch_at <= spec.n:
            raise ValueError("switch_at must be within 0..n")
        steps = tuple(
            ChannelState(
                spec.batch,
                spec.rate_before_bps if i < spec.switch_at else spec.rate_after_bps,
            )
            for i in range(spec.n)
        )
        return Scenario(steps)
    if isinstance(spec, RandomWalkTraceSpec):
        if not 0 < spec.min_rate_bps <= spec.start_rate_bps <= spec.max_rate_bps:
            raise ValueError("random walk needs min <= start <= max rates")
        if spec.factor <= 1.0:
            raise ValueError("random walk factor must be > 1")
        rng = random.Random(seed)
        rate = spec.start_rate_bps
        choices = spec.batch_choices
        batch_idx = 0
        if choices:
            if any(b < 1 for b in choices):
                raise ValueError("batch choices must be positive")
            batch_idx = min(range(len(choices)), key=lambda i: abs(choices[i] - spec.batch))
        steps = []
        for _ in range(spec.n):
            batch = choices[batch_idx] if choices else spec.batch
            steps.append(ChannelState(batch, rate))
            rate *= spec.factor if rng.random() < 0.5 else 1.0 / spec.factor
            rate = min(spec.max_rate_bps, max(spec.min_rate_bps, rate))
            if choices:
                batch_idx = min(len(choices) - 1, max(0, batch_idx + rng.choice((-1, 0, 1))))
        return Scenario(tuple(steps))
    if isinstance(spec, SawtoothTraceSpec):
        if not spec.batch_cycle or any(b < 1 for b in spec.batch_cycle):
            raise ValueError("sawtooth needs a nonempty positive batch cycle")
        steps = tuple(
            ChannelState(spec.batch_cycle[i % len(spec.batch_cycle)], spec.rate_bps)
            for i in range(spec.n)
        )
        return Scenario(steps)
    raise TypeError(f"unknown trace spec {type(spec).__name__}")


# --- file formats ------------------------------------------------------------


def load_scenario(source: bytes | str | IO[bytes]) -> Scenario:
    """Scenario file: JSON array of {"batch", "rate_bps"} with optional "t_ms"."""
    if hasattr(source, "read"):
        source = source.read()  # type: ignore[union-attr]
    if isinstance(source, bytes):
        source = source.decode("utf-8")
    raw = json.loads(source)
    if not isinstance(raw, list) or not raw:
        raise ValueError("scenario file must be a nonempty JSON array")
    steps = []
    stamps = []
    for i, entry in enumerate(raw):
        if not isinstance(entry, dict):
            raise ValueError(f"scenario step {i}: must be an object")
        try:
            steps.append(ChannelState(entry["batch"], float(entry["rate_bps"])))
        except (KeyError, TypeError, ValueError) as exc:
            raise ValueError(f"scenario step {i}: {exc}") from None
        stamps.append(entry.get("t_ms"))
    timestamps = tuple(float(t) for t in stamps) if all(t is not None for t in stamps) else None
    return Scenario(tuple(steps), timestamps)


def scenario_to_obj(scenario: Scenario) -> list[dict]:
    out = []
    for i, state in enumerate(scenario.steps):
        entry: dict = {"batch": state.batch, "rate_bps": state.rate_bps}
        if scenario.timestamps_ms is not None:
            entry["t_ms"] = scenario.timestamps_ms[i]
        out.append(entry)
    return out


def report_to_obj(report: ScenarioReport) -> dict:
    return {
        "per_step": [
            {
                "batch": r.state.batch,
                "rate_bps": r.state.rate_bps,
                "dyn_strategy": str(r.dynamic),
                "dyn_ms": r.dynamic_ms,
                "base_ms": r.baseline_ms,
                "step_gain": r.step_gain,
            }
            for r in report.per_step
        ],
        "gain": report.gain,
        "switch_count": report.switch_count,
    }


def report_to_csv(report: ScenarioReport) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["step", "batch", "rate_bps", "dyn_strategy", "dyn_ms", "base_ms", "step_gain"])
    for i, r in enumerate(report.per_step):
        writer.writerow(
            [
                i,
                r.state.batch,
                repr(r.state.rate_bps),
                str(r.dynamic),
                repr(r.dynamic_ms),
                repr(r.baseline_ms),
                repr(r.step_gain),
            ]
        )
    return buf.getvalue()
