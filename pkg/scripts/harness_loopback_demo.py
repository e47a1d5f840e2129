#!/usr/bin/env python3
"""Validate the analytical latency model against the socket harness on loopback.

Starts the server agent in-process, replays each strategy a few times with
emulated compute and a token-bucket channel at 1 MB/s, and prints predicted
vs measured end-to-end latency per strategy.
"""

import argparse
import json
import statistics

from splitwise.decision import ChannelState, FULL_OFFLOAD, NO_OFFLOAD, split_at, split_time
from splitwise.netharness import ProfileServer, run_device
from splitwise.profile import load_profile

SCALED_TOY3 = {
    "name": "toy3-scaled",
    "input_bytes_per_sample": 1_000_000,
    "layers": [
        {"name": "l1", "output_bytes_per_sample": 1_200_000,
         "device_ms": {"1": 20.0}, "server_ms": {"1": 10.0}},
        {"name": "l2", "output_bytes_per_sample": 200_000,
         "device_ms": {"1": 20.0}, "server_ms": {"1": 10.0}},
        {"name": "l3", "output_bytes_per_sample": 100_000,
         "device_ms": {"1": 20.0}, "server_ms": {"1": 10.0}},
    ],
}


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--requests", type=int, default=5, help="requests per strategy")
    ap.add_argument("--rate", type=float, default=1_000_000.0, help="channel rate, bytes/s")
    args = ap.parse_args()

    profile = load_profile(json.dumps(SCALED_TOY3))
    state = ChannelState(1, args.rate)

    print(f"profile {profile.name}, rate {args.rate:.0f} B/s, {args.requests} requests/strategy")
    print(f"{'strategy':>14s} {'predicted':>10s} {'median':>10s} {'worst':>10s} {'overhead':>9s}")
    with ProfileServer(profile) as server:
        for strategy in (NO_OFFLOAD, split_at(2), FULL_OFFLOAD):
            predicted = split_time(profile, strategy, state).total_ms
            report = run_device(
                server.address, profile, [state] * args.requests, forced_strategy=strategy
            )
            if not report.all_ok:
                print(f"{str(strategy):>14s}  FAILED: {[r.error for r in report.records]}")
                continue
            measured = [r.measured_ms for r in report.records]
            median = statistics.median(measured)
            worst = max(measured)
            print(
                f"{str(strategy):>14s} {predicted:>9.1f}ms {median:>9.1f}ms "
                f"{worst:>9.1f}ms {100 * (median / predicted - 1):>8.2f}%"
            )
    print("(overhead is median measured over model prediction; sleeps and the "
          "token bucket are lower bounds, so it is always >= 0)")


if __name__ == "__main__":
    main()
