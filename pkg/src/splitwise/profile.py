"""Model profiles: per-layer payload sizes and timing tables, plus bottleneck analysis.

A profile is the ground truth the rest of the toolkit runs on: for each layer
of a network it records how many bytes one sample's intermediate output
occupies and how long the layer takes on the device and on the server, per
measured batch size. Layers are indexed 1-based; index 0 is reserved for the
full-offload strategy.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from importlib import resources
from typing import IO, Iterable


class ProfileError(ValueError):
    """A profile file or value violates the schema."""


@dataclass(frozen=True)
class LayerRecord:
    """One layer: intermediate size per sample and per-batch timings."""

    name: str
    output_bytes_per_sample: int
    device_ms: dict[int, float]
    server_ms: dict[int, float]


@dataclass(frozen=True)
class ModelProfile:
    """Validated, immutable per-layer profile of one model.

    measured_batches is the common batch-size key set of every layer's
    timing maps; a missing batch anywhere is a load error.
    """

    name: str
    input_bytes_per_sample: int
    layers: tuple[LayerRecord, ...]
    measured_batches: tuple[int, ...]

    @property
    def num_layers(self) -> int:
        return len(self.layers)


@dataclass(frozen=True)
class BottleneckReport:
    """Compression ratios plus the natural and compressive bottleneck sets."""

    ratios: tuple[float, ...]
    natural: frozenset[int]
    compressive: tuple[int, ...]


def _require(cond: bool, msg: str) -> None:
    if not cond:
        raise ProfileError(msg)


def _parse_timing_map(raw: object, layer_name: str, field: str) -> dict[int, float]:
    _require(isinstance(raw, dict), f"layer {layer_name!r}: {field} must be an object")
    out: dict[int, float] = {}
    for key, value in raw.items():
        try:
            batch = int(key, 10)
        except (TypeError, ValueError):
            raise ProfileError(
                f"layer {layer_name!r}: {field} key {key!r} is not a base-10 integer"
            ) from None
        _require(batch >= 1, f"layer {layer_name!r}: {field} batch {batch} must be >= 1")
        _require(
            isinstance(value, (int, float)) and not isinstance(value, bool),
            f"layer {layer_name!r}: {field}[{key}] must be a number",
        )
        ms = float(value)
        _require(
            math.isfinite(ms) and ms >= 0.0,
            f"layer {layer_name!r}: {field}[{key}] must be finite and >= 0, got {value!r}",
        )
        out[batch] = ms
    return out


def _parse_layer(raw: object, index: int) -> LayerRecord:
    _require(isinstance(raw, dict), f"layer #{index}: must be an object")
    name = raw.get("name")
    _require(isinstance(name, str) and name != "", f"layer #{index}: missing name")
    size = raw.get("output_bytes_per_sample")
    _require(
        isinstance(size, int) and not isinstance(size, bool) and size >= 1,
        f"layer {name!r}: output_bytes_per_sample must be an integer >= 1, got {size!r}",
    )
    device_ms = _parse_timing_map(raw.get("device_ms"), name, "device_ms")
    server_ms = _parse_timing_map(raw.get("server_ms"), name, "server_ms")
    if set(device_ms) != set(server_ms):
        raise ProfileError(
            f"layer {name!r}: inconsistent batch keys between device_ms and server_ms "
            f"({sorted(device_ms)} vs {sorted(server_ms)})"
        )
    return LayerRecord(name, size, device_ms, server_ms)


def load_profile(source: bytes | str | IO[bytes]) -> ModelProfile:
    """Parse and validate a profile file (UTF-8 JSON).

    Accepts raw bytes, a JSON string, or a binary stream. Unknown top-level
    keys (e.g. a profiler's "meta" object) are ignored. Raises ProfileError
    naming the offending layer and field on any violation.
    """
    if hasattr(source, "read"):
        source = source.read()  # type: ignore[union-attr]
    if isinstance(source, bytes):
        source = source.decode("utf-8")
    try:
        raw = json.loads(source)
    except json.JSONDecodeError as exc:
        raise ProfileError(f"profile is not valid JSON: {exc}") from None

    _require(isinstance(raw, dict), "profile must be a JSON object")
    name = raw.get("name")
    _require(isinstance(name, str) and name != "", "profile: missing name")
    input_bytes = raw.get("input_bytes_per_sample")
    _require(
        isinstance(input_bytes, int) and not isinstance(input_bytes, bool) and input_bytes >= 1,
        f"profile: input_bytes_per_sample must be an integer >= 1, got {input_bytes!r}",
    )
    raw_layers = raw.get("layers")
    _require(isinstance(raw_layers, list) and len(raw_layers) >= 1, "profile: layers nonempty")

    layers = tuple(_parse_layer(entry, i + 1) for i, entry in enumerate(raw_layers))
    batch_sets = {frozenset(layer.device_ms) for layer in layers}
    if len(batch_sets) != 1:
        raise ProfileError(
            "profile: inconsistent batch keys across layers; every layer must "
            "cover the same batch sizes"
        )
    measured = tuple(sorted(batch_sets.pop()))
    return ModelProfile(name, input_bytes, layers, measured)


def load_profile_path(path: str) -> ModelProfile:
    with open(path, "rb") as handle:
        return load_profile(handle)


def profile_to_obj(profile: ModelProfile) -> dict:
    """Plain-JSON form of a profile (the on-disk schema)."""
    return {
        "name": profile.name,
        "input_bytes_per_sample": profile.input_bytes_per_sample,
        "layers": [
            {
                "name": layer.name,
                "output_bytes_per_sample": layer.output_bytes_per_sample,
                "device_ms": {str(b): float(v) for b, v in layer.device_ms.items()},
                "server_ms": {str(b): float(v) for b, v in layer.server_ms.items()},
            }
            for layer in profile.layers
        ],
    }


def canonical_bytes(profile: ModelProfile) -> bytes:
    """Canonical serialization used for hashing: keys sorted lexicographically,
    no whitespace, floats as shortest round-trip decimals. Computed from the
    validated object, so sidecar keys like "meta" never affect the hash."""
    return json.dumps(
        profile_to_obj(profile), sort_keys=True, separators=(",", ":"), ensure_ascii=False
    ).encode("utf-8")


def toy3() -> ModelProfile:
    """The bundled 3-layer fixture (input 100 B, outputs 120/20/10 B)."""
    data = resources.files("splitwise.data").joinpath("toy3.json").read_bytes()
    return load_profile(data)


def compression_ratios(profile: ModelProfile) -> list[float]:
    """Per-layer ratio of intermediate size to input size (batch-invariant)."""
    return [
        layer.output_bytes_per_sample / profile.input_bytes_per_sample
        for layer in profile.layers
    ]


def natural_bottlenecks(ratios: Iterable[float]) -> set[int]:
    """1-based indices of layers whose intermediate is strictly smaller than the input."""
    return {i for i, c in enumerate(ratios, start=1) if c < 1.0}


def compressive_set(ratios: Iterable[float]) -> list[int]:
    """Natural bottlenecks whose ratio beats every earlier layer's ratio.

    Equivalent to a strictly-decreasing running-minimum filter; these are the
    only split points worth considering when the server outpaces the device.
    """
    out: list[int] = []
    running_min = math.inf
    for i, c in enumerate(ratios, start=1):
        if c < 1.0 and c < running_min:
            out.append(i)
        running_min = min(running_min, c)
    return out


def analyze_bottlenecks(profile: ModelProfile) -> BottleneckReport:
    ratios = compression_ratios(profile)
    return BottleneckReport(
        ratios=tuple(ratios),
        natural=frozenset(natural_bottlenecks(ratios)),
        compressive=tuple(compressive_set(ratios)),
    )
