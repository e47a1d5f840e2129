#!/usr/bin/env python3
"""Quantify dynamic-over-static gains on generated channel traces.

Replays a random-walk rate trace, a step change, and a batch sawtooth against
every static baseline of a profile and prints the average gain G for each
combination, i.e. how much a dynamic splitter would have saved.
"""

import argparse

from splitwise.decision import FULL_OFFLOAD, NO_OFFLOAD, split_at
from splitwise.profile import compression_ratios, compressive_set, load_profile_path
from splitwise.scenario import (
    MBPS,
    RandomWalkTraceSpec,
    SawtoothTraceSpec,
    StepTraceSpec,
    evaluate_scenario,
    generate_trace,
)
from splitwise.synth import SyntheticSpec, generate_synthetic_profile


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--profile", help="profile JSON (default: generated 30-layer decay profile)")
    ap.add_argument("--steps", type=int, default=200)
    ap.add_argument("--seed", type=int, default=1)
    ap.add_argument("--penalty-ms", type=float, default=0.0)
    args = ap.parse_args()

    if args.profile:
        profile = load_profile_path(args.profile)
    else:
        profile = generate_synthetic_profile(
            SyntheticSpec(
                layer_count=12,
                batches=(1, 2, 4, 8, 16, 32, 64),
                seed=20,
                input_bytes_per_sample=150_528,
                ratio_pattern="planted",
                planted_positions=(2, 5, 8, 11),
                planted_ratios=(0.5, 0.25, 0.12, 0.05),
                timing_pattern="fixed",
                device_base_ms=8.0,
                server_speedup_range=(4 / 3, 4 / 3),
                batch_exponent=0.92,
                name="demo-4-bottlenecks",
            )
        )
    comp = [j for j in compressive_set(compression_ratios(profile)) if j < profile.num_layers]
    baselines = [NO_OFFLOAD, FULL_OFFLOAD] + [split_at(j) for j in comp]

    traces = {
        "random-walk": generate_trace(
            RandomWalkTraceSpec(n=args.steps, batch_choices=(1, 2, 4, 8, 16, 32, 64)),
            seed=args.seed,
        ),
        "rate-step": generate_trace(
            StepTraceSpec(
                n=args.steps, rate_before_bps=1 * MBPS, rate_after_bps=128 * MBPS,
                switch_at=args.steps // 2,
            )
        ),
        "batch-sawtooth": generate_trace(SawtoothTraceSpec(n=args.steps, rate_bps=16 * MBPS)),
    }

    print(f"profile: {profile.name} (L={profile.num_layers}, compressive splits {comp})")
    header = f"{'trace':16s}" + "".join(f"{str(b):>14s}" for b in baselines)
    print(header)
    for name, scenario in traces.items():
        row = [f"{name:16s}"]
        for baseline in baselines:
            report = evaluate_scenario(
                profile, scenario, baseline, switch_penalty_ms=args.penalty_ms
            )
            row.append(f"{report.gain:>14.4f}")
        print("".join(row))
    print("(each entry is G, the mean relative latency saved by dynamic selection)")


if __name__ == "__main__":
    main()
