"""Framed binary protocol between device and server agents.

All integers little-endian. A connection opens with the 4-byte preamble
"DSC1", then carries frames: one u8 type tag followed by fixed-width fields.

  1 Hello          u64 profile_hash
  2 InferRequest   u64 request_id, u8 strategy_code, u16 split_layer,
                   u32 batch, u64 payload_len, payload bytes
  3 InferResponse  u64 request_id, u64 server_compute_ns
  4 Error          u16 code, u32 message_len, UTF-8 message

strategy_code: 0 full_offload, 1 split, 2 no_offload report marker.
The profile hash is FNV-1a 64 over the canonical profile JSON bytes, so any
language can reproduce it bit-exactly.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from typing import Callable, Union

from ..profile import ModelProfile, canonical_bytes

MAGIC = b"DSC1"

FRAME_HELLO = 1
FRAME_INFER_REQUEST = 2
FRAME_INFER_RESPONSE = 3
FRAME_ERROR = 4

STRATEGY_FULL_OFFLOAD = 0
STRATEGY_SPLIT = 1
STRATEGY_NO_OFFLOAD = 2

ERR_HASH_MISMATCH = 1
ERR_MALFORMED = 2
ERR_UNMEASURED_BATCH = 3

_U8_MAX = 2**8 - 1
_U16_MAX = 2**16 - 1
_U32_MAX = 2**32 - 1
_U64_MAX = 2**64 - 1

_REQUEST_HEADER = struct.Struct("<QBHIQ")
_RESPONSE_BODY = struct.Struct("<QQ")
_ERROR_HEADER = struct.Struct("<HI")
_HELLO_BODY = struct.Struct("<Q")


class WireError(Exception):
    """Malformed or truncated frame."""


@dataclass(frozen=True)
class Hello:
    profile_hash: int


@dataclass(frozen=True)
class InferRequest:
    request_id: int
    strategy_code: int
    split_layer: int  # 0 when unused
    batch: int
    payload: bytes

    @property
    def payload_len(self) -> int:
        return len(self.payload)


@dataclass(frozen=True)
class InferResponse:
    request_id: int
    server_compute_ns: int


@dataclass(frozen=True)
class ErrorFrame:
    code: int
    message: str


Frame = Union[Hello, InferRequest, InferResponse, ErrorFrame]


def fnv1a64(data: bytes) -> int:
    h = 0xCBF29CE484222325
    for byte in data:
        h ^= byte
        h = (h * 0x100000001B3) & 0xFFFFFFFFFFFFFFFF
    return h


def profile_hash(profile: ModelProfile) -> int:
    return fnv1a64(canonical_bytes(profile))


def _check_range(value: int, limit: int, what: str) -> None:
    if not (isinstance(value, int) and 0 <= value <= limit):
        raise WireError(f"{what} out of range: {value!r}")


def encode_frame(frame: Frame) -> bytes:
    if isinstance(frame, Hello):
        _check_range(frame.profile_hash, _U64_MAX, "profile_hash")
        return bytes((FRAME_HELLO,)) + _HELLO_BODY.pack(frame.profile_hash)
    if isinstance(frame, InferRequest):
        _check_range(frame.request_id, _U64_MAX, "request_id")
        _check_range(frame.strategy_code, _U8_MAX, "strategy_code")
        _check_range(frame.split_layer, _U16_MAX, "split_layer")
        _check_range(frame.batch, _U32_MAX, "batch")
        header = _REQUEST_HEADER.pack(
            frame.request_id,
            frame.strategy_code,
            frame.split_layer,
            frame.batch,
            len(frame.payload),
        )
        return bytes((FRAME_INFER_REQUEST,)) + header + frame.payload
    if isinstance(frame, InferResponse):
        _check_range(frame.request_id, _U64_MAX, "request_id")
        _check_range(frame.server_compute_ns, _U64_MAX, "server_compute_ns")
        return bytes((FRAME_INFER_RESPONSE,)) + _RESPONSE_BODY.pack(
            frame.request_id, frame.server_compute_ns
        )
    if isinstance(frame, ErrorFrame):
        _check_range(frame.code, _U16_MAX, "error code")
        encoded = frame.message.encode("utf-8")
        if len(encoded) > _U32_MAX:
            raise WireError("error message too long")
        return bytes((FRAME_ERROR,)) + _ERROR_HEADER.pack(frame.code, len(encoded)) + encoded
    raise WireError(f"cannot encode {type(frame).__name__}")


ReadFn = Callable[[int], bytes]


def _read_exact(read: ReadFn, n: int) -> bytes:
    """Read exactly n bytes; raises EOFError on a clean end-of-stream at a
    frame boundary (n requested but 0 returned first), WireError mid-frame."""
    if n == 0:
        return b""
    chunks = []
    remaining = n
    while remaining > 0:
        chunk = read(remaining)
        if not chunk:
            if remaining == n:
                raise EOFError("connection closed")
            raise WireError("truncated frame")
        chunks.append(chunk)
        remaining -= len(chunk)
    return b"".join(chunks)


def decode_frame(read: ReadFn, max_payload: int = 1 << 31) -> Frame:
    """Decode one frame from a read(n)->bytes source.

    Raises EOFError on clean close before a frame starts, WireError on
    anything malformed (unknown tag, truncation, oversized/invalid lengths).
    """
    tag = _read_exact(read, 1)[0]
    if tag == FRAME_HELLO:
        (h,) = _HELLO_BODY.unpack(_read_body(read, _HELLO_BODY.size))
        return Hello(h)
    if tag == FRAME_INFER_REQUEST:
        request_id, code, layer, batch, payload_len = _REQUEST_HEADER.unpack(
            _read_body(read, _REQUEST_HEADER.size)
        )
        if payload_len > max_payload:
            raise WireError(f"payload length {payload_len} exceeds limit {max_payload}")
        payload = _read_body(read, payload_len)
        return InferRequest(request_id, code, layer, batch, payload)
    if tag == FRAME_INFER_RESPONSE:
        request_id, ns = _RESPONSE_BODY.unpack(_read_body(read, _RESPONSE_BODY.size))
        return InferResponse(request_id, ns)
    if tag == FRAME_ERROR:
        code, msg_len = _ERROR_HEADER.unpack(_read_body(read, _ERROR_HEADER.size))
        if msg_len > max_payload:
            raise WireError(f"error message length {msg_len} exceeds limit")
        try:
            message = _read_body(read, msg_len).decode("utf-8")
        except UnicodeDecodeError as exc:
            raise WireError(f"error message is not UTF-8: {exc}") from None
        return ErrorFrame(code, message)
    raise WireError(f"unknown frame type {tag}")


def _read_body(read: ReadFn, n: int) -> bytes:
    """Like _read_exact but EOF inside a frame body is always a WireError."""
    if n == 0:
        return b""
    chunks = []
    remaining = n
    while remaining > 0:
        chunk = read(remaining)
        if not chunk:
            raise WireError("truncated frame")
        chunks.append(chunk)
        remaining -= len(chunk)
    return b"".join(chunks)


def encode_request_header(
    request_id: int, strategy_code: int, split_layer: int, batch: int, payload_len: int
) -> bytes:
    """Request frame minus the payload, for senders that stream the payload
    separately (e.g. through a throttler)."""
    _check_range(request_id, _U64_MAX, "request_id")
    _check_range(strategy_code, _U8_MAX, "strategy_code")
    _check_range(split_layer, _U16_MAX, "split_layer")
    _check_range(batch, _U32_MAX, "batch")
    _check_range(payload_len, _U64_MAX, "payload_len")
    return bytes((FRAME_INFER_REQUEST,)) + _REQUEST_HEADER.pack(
        request_id, strategy_code, split_layer, batch, payload_len
    )


def decode_frame_bytes(data: bytes) -> Frame:
    """Decode one frame from a standalone byte string (must consume it all)."""
    view = memoryview(data)
    pos = 0

    def read(n: int) -> bytes:
        nonlocal pos
        chunk = bytes(view[pos : pos + n])
        pos += len(chunk)
        return chunk

    frame = decode_frame(read)
    if pos != len(data):
        raise WireError(f"{len(data) - pos} trailing bytes after frame")
    return frame
