#!/usr/bin/env python3
"""Sweep the 1-128 MBps x batch 1-64 grid for a profile and emit the decision
surface plus the gain map against a chosen static split.

Without --profile, a synthetic 12-layer profile with four planted compressive
bottlenecks is generated, which reproduces the qualitative surface structure
(each bottleneck wins a region; no-offloading wins the low-rate corner).
"""

import argparse
import csv
import json
from pathlib import Path

from splitwise.decision import decision_surface, split_at, surface_to_csv
from splitwise.profile import compression_ratios, compressive_set, load_profile_path, profile_to_obj
from splitwise.scenario import MBPS, gain_map
from splitwise.synth import SyntheticSpec, generate_synthetic_profile

GRID_RATES = [float(2**k) * MBPS for k in range(8)]
GRID_BATCHES = [2**k for k in range(7)]


def demo_profile():
    return generate_synthetic_profile(
        SyntheticSpec(
            layer_count=12,
            batches=tuple(GRID_BATCHES),
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


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--profile", help="profile JSON (default: generated demo profile)")
    ap.add_argument("--static-split", type=int, default=None,
                    help="baseline layer for the gain map (default: first compressive bottleneck)")
    ap.add_argument("--out-dir", default="sweep_out")
    args = ap.parse_args()

    profile = load_profile_path(args.profile) if args.profile else demo_profile()
    comp = compressive_set(compression_ratios(profile))
    if not comp:
        ap.error(f"profile {profile.name} has no compressive bottleneck to sweep against")
    split_layer = args.static_split if args.static_split is not None else comp[0]

    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    if not args.profile:
        (out / "profile.json").write_text(json.dumps(profile_to_obj(profile), indent=2))

    surface = decision_surface(profile, GRID_BATCHES, GRID_RATES)
    (out / "surface.csv").write_text(surface_to_csv(surface))

    gm = gain_map(profile, split_at(split_layer), GRID_BATCHES, GRID_RATES)
    with (out / f"gain_vs_static_{split_layer}.csv").open("w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(["batch", "rate_bps", "gain"])
        for i, batch in enumerate(gm.batches):
            for j, rate in enumerate(gm.rates_bps):
                writer.writerow([batch, repr(rate), repr(gm.values[i][j])])

    winners = {}
    for cell in surface.cells:
        winners[str(cell.strategy)] = winners.get(str(cell.strategy), 0) + 1
    print(f"profile: {profile.name} (compressive bottlenecks at {comp})")
    print(f"surface cells by winner: {winners}")
    print(f"wrote {out}/surface.csv and {out}/gain_vs_static_{split_layer}.csv")


if __name__ == "__main__":
    main()
