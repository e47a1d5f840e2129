"""Seeded synthetic profiles for desk-scale experiments and oracle tests."""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field

from .profile import (
    ModelProfile,
    ProfileError,
    compression_ratios,
    compressive_set,
    load_profile,
    profile_to_obj,
)

POW2_BATCHES = (1, 2, 4, 8, 16, 32, 64)


@dataclass(frozen=True)
class SyntheticSpec:
    """Recipe for a synthetic profile.

    ratio_pattern:
      decay   - ratios start near first_ratio and shrink by decay per layer
                (jittered), yielding several compressive bottlenecks
      random  - log-uniform ratios in ratio_range, for fuzzing
      planted - exactly planted_positions become the compressive set, with
                planted_ratios; layers before the first plant sit at >= 1 and
                later non-planted layers sit above the running minimum
    timing_pattern:
      uniform - per-layer device base drawn from device_base_range_ms
      fixed   - constant device_base_ms per layer
    Per-layer server time is device time divided by a speedup drawn from
    server_speedup_range; per-batch time is base * batch**batch_exponent with
    multiplicative jitter (timing per batch is measured, not extrapolated).
    """

    layer_count: int
    batches: tuple[int, ...] = (1,)
    seed: int = 0
    input_bytes_per_sample: int = 1_000_000
    ratio_pattern: str = "decay"
    first_ratio: float = 1.5
    decay: float = 0.85
    ratio_noise: float = 0.15
    ratio_range: tuple[float, float] = (0.05, 3.0)
    planted_positions: tuple[int, ...] = ()
    planted_ratios: tuple[float, ...] = ()
    timing_pattern: str = "uniform"
    device_base_ms: float = 8.0
    device_base_range_ms: tuple[float, float] = (2.0, 12.0)
    server_speedup_range: tuple[float, float] = (4.0, 10.0)
    batch_exponent: float = 0.9
    timing_jitter: float = 0.0
    name: str = field(default="synthetic")


def _validate_spec(spec: SyntheticSpec) -> None:
    if spec.layer_count < 1:
        raise ProfileError("synthetic spec: layer_count must be >= 1")
    if not spec.batches or any(b < 1 for b in spec.batches):
        raise ProfileError("synthetic spec: batches must be nonempty positive integers")
    if spec.input_bytes_per_sample < 1:
        raise ProfileError("synthetic spec: input_bytes_per_sample must be >= 1")
    if spec.ratio_pattern not in ("decay", "random", "planted"):
        raise ProfileError(f"synthetic spec: unknown ratio_pattern {spec.ratio_pattern!r}")
    if spec.timing_pattern not in ("uniform", "fixed"):
        raise ProfileError(f"synthetic spec: unknown timing_pattern {spec.timing_pattern!r}")
    if spec.ratio_pattern == "planted":
        pos, ratios = spec.planted_positions, spec.planted_ratios
        if len(pos) != len(ratios) or not pos:
            raise ProfileError("synthetic spec: planted positions/ratios must align and be nonempty")
        if list(pos) != sorted(set(pos)) or pos[0] < 1 or pos[-1] > spec.layer_count:
            raise ProfileError("synthetic spec: planted positions must be increasing and within 1..L")
        if any(not 0 < r < 1 for r in ratios) or any(
            b >= a for a, b in zip(ratios, ratios[1:])
        ):
            raise ProfileError("synthetic spec: planted ratios must be in (0,1) and strictly decreasing")


def _ratios(spec: SyntheticSpec, rng: random.Random) -> list[float]:
    if spec.ratio_pattern == "decay":
        out = []
        for i in range(spec.layer_count):
            jitter = 1.0 + rng.uniform(-spec.ratio_noise, spec.ratio_noise)
            out.append(max(1e-4, spec.first_ratio * (spec.decay ** i) * jitter))
        return out
    if spec.ratio_pattern == "random":
        lo, hi = spec.ratio_range
        return [lo * (hi / lo) ** rng.random() for _ in range(spec.layer_count)]
    # planted
    planted = dict(zip(spec.planted_positions, spec.planted_ratios))
    out = []
    running_min = float("inf")
    for i in range(1, spec.layer_count + 1):
        if i in planted:
            c = planted[i]
        elif running_min == float("inf"):
            c = 1.0 + rng.uniform(0.0, 1.0)  # before the first plant: never a bottleneck
        else:
            c = running_min * (1.0 + rng.uniform(0.05, 0.6))  # above the running min
        out.append(c)
        running_min = min(running_min, c)
    return out


def generate_synthetic_profile(spec: SyntheticSpec) -> ModelProfile:
    """Deterministic for a given spec (seed included); output passes load_profile."""
    _validate_spec(spec)
    rng = random.Random(spec.seed)
    ratios = _ratios(spec, rng)

    layers = []
    for i, c in enumerate(ratios, start=1):
        size = max(1, round(c * spec.input_bytes_per_sample))
        if spec.timing_pattern == "fixed":
            device_base = spec.device_base_ms
        else:
            device_base = rng.uniform(*spec.device_base_range_ms)
        server_base = device_base / rng.uniform(*spec.server_speedup_range)
        device_ms: dict[str, float] = {}
        server_ms: dict[str, float] = {}
        for b in spec.batches:
            scale = b ** spec.batch_exponent
            jd = 1.0 + rng.uniform(-spec.timing_jitter, spec.timing_jitter)
            js = 1.0 + rng.uniform(-spec.timing_jitter, spec.timing_jitter)
            device_ms[str(b)] = device_base * scale * jd
            server_ms[str(b)] = server_base * scale * js
        layers.append(
            {
                "name": f"layer{i:02d}",
                "output_bytes_per_sample": size,
                "device_ms": device_ms,
                "server_ms": server_ms,
            }
        )

    obj = {
        "name": spec.name,
        "input_bytes_per_sample": spec.input_bytes_per_sample,
        "layers": layers,
    }
    profile = load_profile(json.dumps(obj))
    if spec.ratio_pattern == "planted":
        got = tuple(compressive_set(compression_ratios(profile)))
        if got != tuple(spec.planted_positions):
            raise ProfileError(
                f"synthetic spec: planted compressive set {spec.planted_positions} "
                f"came out as {got}; widen ratio spacing or input size"
            )
    return profile


def save_profile(profile: ModelProfile, path: str) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        json.dump(profile_to_obj(profile), handle, indent=2)
        handle.write("\n")
