"""Device and server agents validating the latency model over a real socket.

Layer compute is emulated by sleeping the profiled durations; the channel
rate is enforced by the sender's token bucket. Payload content is zeros
because only its size matters to the model. One request is in flight per
connection (stop-and-wait), matching the strictly sequential
head -> transmit -> tail model being validated.
"""

from __future__ import annotations

import csv
import io
import logging
import socket
import threading
import time
from dataclasses import dataclass

from ..decision import ChannelState, Strategy, UnmeasuredBatchError, optimal_split, split_time
from ..profile import ModelProfile
from ..scenario import Scenario
from .throttle import throttled_send
from .wire import (
    ERR_HASH_MISMATCH,
    ERR_MALFORMED,
    ERR_UNMEASURED_BATCH,
    ErrorFrame,
    Hello,
    InferRequest,
    InferResponse,
    MAGIC,
    STRATEGY_FULL_OFFLOAD,
    STRATEGY_NO_OFFLOAD,
    STRATEGY_SPLIT,
    WireError,
    decode_frame,
    encode_frame,
    encode_request_header,
    profile_hash,
)

log = logging.getLogger(__name__)

_KIND_TO_CODE = {
    "full_offload": STRATEGY_FULL_OFFLOAD,
    "split": STRATEGY_SPLIT,
    "no_offload": STRATEGY_NO_OFFLOAD,
}


@dataclass(frozen=True)
class RequestRecord:
    request_id: int
    batch: int
    rate_bps: float
    strategy: Strategy | None
    predicted_ms: float | None
    measured_ms: float | None
    device_ms: float | None = None
    channel_ms: float | None = None
    server_ms: float | None = None
    error: str | None = None

    @property
    def ok(self) -> bool:
        return self.error is None


@dataclass(frozen=True)
class RunReport:
    records: tuple[RequestRecord, ...]
    connection_error: str | None = None  # set when the connection itself failed

    @property
    def all_ok(self) -> bool:
        return self.connection_error is None and all(r.ok for r in self.records)


def report_to_obj(report: RunReport) -> dict:
    return {
        "connection_error": report.connection_error,
        "records": [
            {
                "req_id": r.request_id,
                "strategy": str(r.strategy) if r.strategy else None,
                "split_layer": r.strategy.layer if r.strategy and r.strategy.kind == "split" else None,
                "batch": r.batch,
                "rate_bps": r.rate_bps,
                "predicted_ms": r.predicted_ms,
                "measured_ms": r.measured_ms,
                "device_ms": r.device_ms,
                "channel_ms": r.channel_ms,
                "server_ms": r.server_ms,
                "status": "ok" if r.ok else "error",
                "error": r.error,
            }
            for r in report.records
        ]
    }


def report_to_csv(report: RunReport) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["req_id", "strategy", "split_layer", "batch", "rate_bps", "predicted_ms", "measured_ms"])
    for r in report.records:
        writer.writerow(
            [
                r.request_id,
                r.strategy.kind if r.strategy else "error",
                r.strategy.layer if r.strategy and r.strategy.kind == "split" else "",
                r.batch,
                repr(r.rate_bps),
                repr(r.predicted_ms) if r.predicted_ms is not None else "",
                repr(r.measured_ms) if r.measured_ms is not None else "",
            ]
        )
    return buf.getvalue()


class ProfileServer:
    """Accepts connections concurrently; each connection is strictly serial.

    Shared state across connections is just the immutable profile.
    """

    def __init__(self, profile: ModelProfile, host: str = "127.0.0.1", port: int = 0):
        self.profile = profile
        self._hash = profile_hash(profile)
        self._host = host
        self._port = port
        self._listener: socket.socket | None = None
        self._stop = threading.Event()
        self._accept_thread: threading.Thread | None = None

    def start(self) -> tuple[str, int]:
        listener = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
        listener.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
        listener.bind((self._host, self._port))
        listener.listen()
        listener.settimeout(0.2)  # lets the accept loop notice stop()
        self._listener = listener
        self._accept_thread = threading.Thread(target=self._accept_loop, daemon=True)
        self._accept_thread.start()
        host, port = listener.getsockname()[:2]
        log.info("serving %s on %s:%d", self.profile.name, host, port)
        return host, port

    def stop(self) -> None:
        self._stop.set()
        if self._listener is not None:
            try:
                self._listener.close()
            except OSError:
                pass
        if self._accept_thread is not None:
            self._accept_thread.join(timeout=5.0)

    def __enter__(self) -> "ProfileServer":
        self.start()
        return self

    def __exit__(self, *exc) -> None:
        self.stop()

    @property
    def address(self) -> tuple[str, int]:
        assert self._listener is not None, "server not started"
        return self._listener.getsockname()[:2]

    def _accept_loop(self) -> None:
        assert self._listener is not None
        while not self._stop.is_set():
            try:
                conn, peer = self._listener.accept()
            except socket.timeout:
                continue
            except OSError:
                break  # listener closed
            conn.settimeout(None)
            log.debug("connection from %s", peer)
            threading.Thread(target=self._handle, args=(conn,), daemon=True).start()

    def _tail_ms(self, request: InferRequest) -> float:
        layers = self.profile.layers
        batch = request.batch
        if request.strategy_code == STRATEGY_FULL_OFFLOAD:
            return sum(layer.server_ms[batch] for layer in layers)
        if request.strategy_code == STRATEGY_SPLIT:
            return sum(layer.server_ms[batch] for layer in layers[request.split_layer :])
        return 0.0  # no_offload report marker

    def _handle(self, conn: socket.socket) -> None:
        def send_error(code: int, message: str) -> None:
            try:
                conn.sendall(encode_frame(ErrorFrame(code, message)))
            except OSError:
                pass

        def reject(code: int, message: str) -> None:
            # Fatal: half-close and drain so the client reads the error frame
            # even mid-send; an abrupt close would RST away the buffered frame.
            send_error(code, message)
            try:
                conn.shutdown(socket.SHUT_WR)
                conn.settimeout(5.0)
                while conn.recv(65536):
                    pass
            except OSError:
                pass

        try:
            with conn:
                preamble = _recv_exact(conn, len(MAGIC))
                if preamble != MAGIC:
                    reject(ERR_MALFORMED, "bad preamble")
                    return
                hello_seen = False
                while True:
                    try:
                        frame = decode_frame(conn.recv)
                    except EOFError:
                        return
                    except WireError as exc:
                        reject(ERR_MALFORMED, str(exc))
                        return
                    if isinstance(frame, Hello):
                        if frame.profile_hash != self._hash:
                            reject(
                                ERR_HASH_MISMATCH,
                                f"profile hash mismatch: got {frame.profile_hash:#018x}, "
                                f"serving {self._hash:#018x}",
                            )
                            return
                        hello_seen = True
                        continue
                    if not isinstance(frame, InferRequest):
                        reject(ERR_MALFORMED, f"unexpected frame {type(frame).__name__}")
                        return
                    if not hello_seen:
                        reject(ERR_MALFORMED, "request before handshake")
                        return
                    if frame.strategy_code not in (
                        STRATEGY_FULL_OFFLOAD,
                        STRATEGY_SPLIT,
                        STRATEGY_NO_OFFLOAD,
                    ):
                        reject(ERR_MALFORMED, f"unknown strategy code {frame.strategy_code}")
                        return
                    if frame.strategy_code == STRATEGY_SPLIT and not (
                        1 <= frame.split_layer < self.profile.num_layers
                    ):
                        reject(ERR_MALFORMED, f"split layer {frame.split_layer} out of range")
                        return
                    if frame.batch not in self.profile.measured_batches:
                        send_error(ERR_UNMEASURED_BATCH, f"batch {frame.batch} not measured")
                        continue  # step-level error; connection stays up
                    tail_ms = self._tail_ms(frame)
                    t0 = time.perf_counter_ns()
                    if tail_ms > 0:
                        time.sleep(tail_ms / 1000.0)
                    slept_ns = time.perf_counter_ns() - t0
                    conn.sendall(encode_frame(InferResponse(frame.request_id, slept_ns)))
        except OSError as exc:
            log.debug("connection dropped: %s", exc)


def _recv_exact(conn: socket.socket, n: int) -> bytes:
    chunks = []
    remaining = n
    while remaining > 0:
        chunk = conn.recv(remaining)
        if not chunk:
            raise OSError("connection closed mid-read")
        chunks.append(chunk)
        remaining -= len(chunk)
    return b"".join(chunks)


def serve(listen_address: tuple[str, int], profile: ModelProfile) -> None:
    """Blocking server loop (CLI entry); stops on KeyboardInterrupt."""
    server = ProfileServer(profile, listen_address[0], listen_address[1])
    server.start()
    try:
        while True:
            time.sleep(0.5)
    except KeyboardInterrupt:
        pass
    finally:
        server.stop()


def run_device(
    server_address: tuple[str, int],
    profile: ModelProfile,
    scenario: Scenario | list[ChannelState] | tuple[ChannelState, ...],
    allow_full_offload: bool = True,
    no_offload_silent: bool = False,
    forced_strategy: Strategy | None = None,
    interpolate: bool = False,
    timeout_s: float = 60.0,
) -> RunReport:
    """Replay a scenario against a live server and measure wall-clock latency.

    Per step: pick the strategy (optimal, or forced_strategy when given),
    sleep the head compute, push the payload through the token bucket at the
    step's rate, and await the response. No retries: a failed step is
    recorded and, if the connection died, the remaining steps fail fast.
    A connect failure raises OSError.
    """
    steps = scenario.steps if isinstance(scenario, Scenario) else tuple(scenario)

    sock = socket.create_connection(server_address, timeout=timeout_s)
    records: list[RequestRecord] = []
    dead: str | None = None
    try:
        sock.sendall(MAGIC + encode_frame(Hello(profile_hash(profile))))
        for i, state in enumerate(steps):
            request_id = i + 1
            if dead is not None:
                records.append(
                    RequestRecord(
                        request_id, state.batch, state.rate_bps, None, None, None,
                        error=f"connection closed ({dead})",
                    )
                )
                continue
            try:
                if forced_strategy is not None:
                    strategy = forced_strategy
                    predicted = split_time(profile, strategy, state, interpolate)
                else:
                    strategy, predicted = optimal_split(
                        profile, state, allow_full_offload, interpolate=interpolate
                    )
            except UnmeasuredBatchError as exc:
                records.append(
                    RequestRecord(request_id, state.batch, state.rate_bps, None, None, None, error=str(exc))
                )
                continue

            t_start = time.perf_counter()
            if predicted.head_ms > 0:
                time.sleep(predicted.head_ms / 1000.0)
            device_s = time.perf_counter() - t_start

            if strategy.kind == "no_offload" and no_offload_silent:
                measured_ms = (time.perf_counter() - t_start) * 1000.0
                records.append(
                    RequestRecord(
                        request_id, state.batch, state.rate_bps, strategy,
                        predicted.total_ms, measured_ms,
                        device_ms=device_s * 1000.0, channel_ms=0.0, server_ms=0.0,
                    )
                )
                continue

            payload = b"\x00" * predicted.payload_bytes
            header = encode_request_header(
                request_id,
                _KIND_TO_CODE[strategy.kind],
                strategy.layer if strategy.kind == "split" else 0,
                state.batch,
                len(payload),
            )
            try:
                sock.sendall(header)
                channel_s = throttled_send(sock, payload, state.rate_bps)
                reply = decode_frame(sock.recv)
            except (OSError, EOFError, WireError) as exc:
                dead = str(exc) or type(exc).__name__
                records.append(
                    RequestRecord(
                        request_id, state.batch, state.rate_bps, strategy,
                        predicted.total_ms, None, error=f"connection error: {dead}",
                    )
                )
                continue
            measured_ms = (time.perf_counter() - t_start) * 1000.0

            if isinstance(reply, ErrorFrame):
                if reply.code == ERR_HASH_MISMATCH:
                    dead = "handshake rejected"
                records.append(
                    RequestRecord(
                        request_id, state.batch, state.rate_bps, strategy,
                        predicted.total_ms, None,
                        error=f"server error code {reply.code}: {reply.message}",
                    )
                )
                continue
            if not isinstance(reply, InferResponse) or reply.request_id != request_id:
                dead = "protocol violation"
                records.append(
                    RequestRecord(
                        request_id, state.batch, state.rate_bps, strategy,
                        predicted.total_ms, None, error="mismatched response",
                    )
                )
                continue
            records.append(
                RequestRecord(
                    request_id, state.batch, state.rate_bps, strategy,
                    predicted.total_ms, measured_ms,
                    device_ms=device_s * 1000.0,
                    channel_ms=channel_s * 1000.0,
                    server_ms=reply.server_compute_ns / 1e6,
                )
            )
    finally:
        try:
            sock.close()
        except OSError:
            pass
    return RunReport(tuple(records), connection_error=dead)
