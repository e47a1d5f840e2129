"""End-to-end latency model and optimal split selection.

Latency of a strategy at channel state (batch B, rate r bytes/s):

  split at l:    sum(device[1..l]) + payload/r*1000 + sum(server[l+1..L])
  full offload:  payload = B*input_bytes, no device compute, full server pass
  no offload:    full device pass, nothing transmitted

Every strategy is affine in 1/r: total = (head+tail) + K/r with
K = payload_bytes * 1000. Return traffic is ignored for all strategies
alike, so comparisons stay fair.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass

from .profile import ModelProfile, compression_ratios, compressive_set

# Totals within this relative distance count as a tie.
TIE_REL_THRESHOLD = 1e-9


class UnmeasuredBatchError(ValueError):
    """Batch size absent from the profile's timing tables (no silent guessing)."""

    def __init__(self, batch: int, measured: tuple[int, ...]):
        below = max((b for b in measured if b < batch), default=None)
        above = min((b for b in measured if b > batch), default=None)
        nearest = ", ".join(str(b) for b in (below, above) if b is not None)
        super().__init__(
            f"batch {batch} not measured (nearest measured: {nearest}); "
            f"re-profile or pass interpolate=True"
        )
        self.batch = batch
        self.measured = measured


@dataclass(frozen=True)
class ChannelState:
    """One (batch size, data rate) pair; rate is bytes per second."""

    batch: int
    rate_bps: float

    def __post_init__(self) -> None:
        if not (isinstance(self.batch, int) and self.batch >= 1):
            raise ValueError(f"batch must be a positive integer, got {self.batch!r}")
        if not (math.isfinite(self.rate_bps) and self.rate_bps > 0):
            raise ValueError(f"rate_bps must be positive and finite, got {self.rate_bps!r}")


@dataclass(frozen=True)
class Strategy:
    """One offloading choice: full_offload, split (at a layer), or no_offload."""

    kind: str
    layer: int | None = None

    def __post_init__(self) -> None:
        if self.kind not in ("full_offload", "split", "no_offload"):
            raise ValueError(f"unknown strategy kind {self.kind!r}")
        if self.kind == "split":
            if not (isinstance(self.layer, int) and self.layer >= 1):
                raise ValueError(f"split strategy needs a layer >= 1, got {self.layer!r}")
        elif self.layer is not None:
            raise ValueError(f"{self.kind} strategy carries no layer")

    def __str__(self) -> str:
        return f"split@{self.layer}" if self.kind == "split" else self.kind


FULL_OFFLOAD = Strategy("full_offload")
NO_OFFLOAD = Strategy("no_offload")


def split_at(layer: int) -> Strategy:
    return Strategy("split", layer)


@dataclass(frozen=True)
class LatencyBreakdown:
    head_ms: float
    transmit_ms: float
    tail_ms: float
    total_ms: float
    payload_bytes: int


@dataclass(frozen=True)
class SurfaceCell:
    batch: int
    rate_bps: float
    strategy: Strategy
    breakdown: LatencyBreakdown


@dataclass(frozen=True)
class DecisionSurface:
    batches: tuple[int, ...]
    rates_bps: tuple[float, ...]
    cells: tuple[SurfaceCell, ...]  # batch-major, rates ascending within a batch

    def cell(self, batch: int, rate_bps: float) -> SurfaceCell:
        i = self.batches.index(batch)
        j = self.rates_bps.index(rate_bps)
        return self.cells[i * len(self.rates_bps) + j]


def candidate_strategies(
    profile: ModelProfile, allow_full_offload: bool = True, all_layers: bool = False
) -> list[Strategy]:
    """Strategies worth evaluating: full offload (unless privacy-restricted),
    splits at compressive bottlenecks before the last layer, and no offload.

    all_layers widens the splits to every layer (debug/oracle mode). A
    compressive bottleneck at layer L itself transmits nothing under this
    model, so it is represented only by no_offload.
    """
    L = profile.num_layers
    if all_layers:
        splits = range(1, L)
    else:
        splits = (j for j in compressive_set(compression_ratios(profile)) if j < L)
    out: list[Strategy] = [FULL_OFFLOAD] if allow_full_offload else []
    out.extend(split_at(j) for j in splits)
    out.append(NO_OFFLOAD)
    return out


def _interp_times(values: dict[int, float], measured: tuple[int, ...], batch: int) -> float:
    below = max(b for b in measured if b < batch)
    above = min(b for b in measured if b > batch)
    frac = (batch - below) / (above - below)
    return values[below] + frac * (values[above] - values[below])


class _BatchTimes:
    """Prefix device / suffix server sums for one (profile, batch) pair.

    Makes every strategy evaluation O(1), which keeps grid sweeps and the
    exhaustive oracles cheap.
    """

    def __init__(self, profile: ModelProfile, batch: int, interpolate: bool = False):
        measured = profile.measured_batches
        if batch in measured:
            device = [layer.device_ms[batch] for layer in profile.layers]
            server = [layer.server_ms[batch] for layer in profile.layers]
        elif interpolate and measured[0] < batch < measured[-1]:
            device = [_interp_times(layer.device_ms, measured, batch) for layer in profile.layers]
            server = [_interp_times(layer.server_ms, measured, batch) for layer in profile.layers]
        else:
            raise UnmeasuredBatchError(batch, measured)
        L = len(device)
        self.dev_prefix = [0.0] * (L + 1)
        self.srv_suffix = [0.0] * (L + 1)
        for i in range(L):
            self.dev_prefix[i + 1] = self.dev_prefix[i] + device[i]
        for i in range(L - 1, -1, -1):
            self.srv_suffix[i] = self.srv_suffix[i + 1] + server[i]


def _breakdown(
    profile: ModelProfile, times: _BatchTimes, strategy: Strategy, state: ChannelState
) -> LatencyBreakdown:
    L = profile.num_layers
    if strategy.kind == "split":
        if not 1 <= strategy.layer <= L - 1:  # type: ignore[operator]
            raise ValueError(f"split layer {strategy.layer} outside 1..{L - 1}")
        head = times.dev_prefix[strategy.layer]
        tail = times.srv_suffix[strategy.layer]
        payload = state.batch * profile.layers[strategy.layer - 1].output_bytes_per_sample
    elif strategy.kind == "full_offload":
        head = 0.0
        tail = times.srv_suffix[0]
        payload = state.batch * profile.input_bytes_per_sample
    else:  # no_offload
        head = times.dev_prefix[L]
        tail = 0.0
        payload = 0
    transmit = payload / state.rate_bps * 1000.0
    return LatencyBreakdown(head, transmit, tail, head + transmit + tail, payload)


def split_time(
    profile: ModelProfile, strategy: Strategy, state: ChannelState, interpolate: bool = False
) -> LatencyBreakdown:
    """Latency breakdown of one strategy at one channel state."""
    return _breakdown(profile, _BatchTimes(profile, state.batch, interpolate), strategy, state)


def _tie_rank(profile: ModelProfile, strategy: Strategy) -> int:
    # splits by layer index, then no_offload, full_offload last
    if strategy.kind == "split":
        return strategy.layer  # type: ignore[return-value]
    if strategy.kind == "no_offload":
        return profile.num_layers
    return profile.num_layers + 1


def optimal_split(
    profile: ModelProfile,
    state: ChannelState,
    allow_full_offload: bool = True,
    all_layers: bool = False,
    interpolate: bool = False,
) -> tuple[Strategy, LatencyBreakdown]:
    """Argmin of total latency over the candidate strategies.

    Ties (relative distance <= 1e-9) go to the smaller payload, then the
    smaller tie rank: earlier split, then no_offload, then full_offload.
    """
    times = _BatchTimes(profile, state.batch, interpolate)
    candidates = candidate_strategies(profile, allow_full_offload, all_layers)
    evaluated = [(s, _breakdown(profile, times, s, state)) for s in candidates]
    best_total = min(b.total_ms for _, b in evaluated)
    threshold = best_total + best_total * TIE_REL_THRESHOLD
    tied = [(s, b) for s, b in evaluated if b.total_ms <= threshold]
    return min(tied, key=lambda sb: (sb[1].payload_bytes, _tie_rank(profile, sb[0])))


def decision_surface(
    profile: ModelProfile,
    batches: list[int] | tuple[int, ...],
    rates_bps: list[float] | tuple[float, ...],
    allow_full_offload: bool = True,
    all_layers: bool = False,
    interpolate: bool = False,
) -> DecisionSurface:
    """Optimal strategy and its breakdown for every (batch, rate) grid point."""
    if not batches or not rates_bps:
        raise ValueError("decision surface needs at least one batch and one rate")
    bs = tuple(sorted(set(batches)))
    rs = tuple(sorted(set(float(r) for r in rates_bps)))
    cells = []
    for b in bs:
        times = _BatchTimes(profile, b, interpolate)
        candidates = candidate_strategies(profile, allow_full_offload, all_layers)
        for r in rs:
            state = ChannelState(b, r)
            evaluated = [(s, _breakdown(profile, times, s, state)) for s in candidates]
            best_total = min(bd.total_ms for _, bd in evaluated)
            threshold = best_total + best_total * TIE_REL_THRESHOLD
            tied = [(s, bd) for s, bd in evaluated if bd.total_ms <= threshold]
            strategy, breakdown = min(
                tied, key=lambda sb: (sb[1].payload_bytes, _tie_rank(profile, sb[0]))
            )
            cells.append(SurfaceCell(b, r, strategy, breakdown))
    return DecisionSurface(bs, rs, tuple(cells))


SURFACE_CSV_HEADER = [
    "batch",
    "rate_bps",
    "strategy",
    "split_layer",
    "head_ms",
    "transmit_ms",
    "tail_ms",
    "total_ms",
    "payload_bytes",
]


def surface_to_csv(surface: DecisionSurface) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(SURFACE_CSV_HEADER)
    for cell in surface.cells:
        writer.writerow(
            [
                cell.batch,
                repr(cell.rate_bps),
                cell.strategy.kind,
                cell.strategy.layer if cell.strategy.kind == "split" else "",
                repr(cell.breakdown.head_ms),
                repr(cell.breakdown.transmit_ms),
                repr(cell.breakdown.tail_ms),
                repr(cell.breakdown.total_ms),
                cell.breakdown.payload_bytes,
            ]
        )
    return buf.getvalue()


def surface_to_obj(surface: DecisionSurface) -> dict:
    return {
        "batches": list(surface.batches),
        "rates_bps": list(surface.rates_bps),
        "cells": [
            {
                "batch": cell.batch,
                "rate_bps": cell.rate_bps,
                "strategy": cell.strategy.kind,
                "split_layer": cell.strategy.layer if cell.strategy.kind == "split" else None,
                "head_ms": cell.breakdown.head_ms,
                "transmit_ms": cell.breakdown.transmit_ms,
                "tail_ms": cell.breakdown.tail_ms,
                "total_ms": cell.breakdown.total_ms,
                "payload_bytes": cell.breakdown.payload_bytes,
            }
            for cell in surface.cells
        ],
    }
