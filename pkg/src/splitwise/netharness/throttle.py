"""Sender-side token bucket emulating a fixed-rate channel.

The bucket starts empty so n bytes can never finish before n/rate seconds
after the transmission begins; capacity bounds how much credit can pile up
(one MTU or 10 ms worth of rate, whichever is larger). The device enforces
the rate, not the network: that is the fidelity boundary of the harness.
"""

from __future__ import annotations

import socket
import time

MTU_BYTES = 1500
BURST_WINDOW_S = 0.010


def bucket_capacity(rate_bps: float) -> float:
    return max(float(MTU_BYTES), rate_bps * BURST_WINDOW_S)


class TokenBucket:
    def __init__(self, rate_bps: float, capacity: float | None = None):
        if rate_bps <= 0:
            raise ValueError(f"rate_bps must be positive, got {rate_bps!r}")
        self.rate_bps = rate_bps
        self.capacity = bucket_capacity(rate_bps) if capacity is None else capacity
        self.tokens = 0.0
        self._last = time.monotonic()

    def _refill(self) -> None:
        now = time.monotonic()
        self.tokens = min(self.capacity, self.tokens + (now - self._last) * self.rate_bps)
        self._last = now

    def consume(self, n: int) -> None:
        """Block until n tokens are available, then take them. n <= capacity."""
        if n <= 0:
            return
        if n > self.capacity:
            raise ValueError(f"cannot consume {n} > capacity {self.capacity}")
        while True:
            self._refill()
            if self.tokens >= n:
                self.tokens -= n
                return
            time.sleep((n - self.tokens) / self.rate_bps)


def throttled_send(sock: socket.socket, payload: bytes, rate_bps: float) -> float:
    """Send payload at no more than rate_bps; returns elapsed seconds.

    A fresh (empty) bucket per call makes each transmission independently obey
    the n/rate lower bound. Zero-length payloads complete immediately.
    """
    start = time.monotonic()
    if payload:
        bucket = TokenBucket(rate_bps)
        view = memoryview(payload)
        # half-capacity chunks leave headroom in the bucket, so sleep overshoot
        # is refunded on the next wait instead of clipped by the cap
        chunk = max(1, int(bucket.capacity) // 2)
        for offset in range(0, len(view), chunk):
            piece = view[offset : offset + chunk]
            bucket.consume(len(piece))
            sock.sendall(piece)
    return time.monotonic() - start
