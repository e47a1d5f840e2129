"""Frame encoding round-trips and the canonical profile hash."""

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from splitwise.netharness.wire import (
    ErrorFrame,
    Hello,
    InferRequest,
    InferResponse,
    WireError,
    decode_frame_bytes,
    encode_frame,
    encode_request_header,
    fnv1a64,
    profile_hash,
)

U8 = st.integers(0, 2**8 - 1)
U16 = st.integers(0, 2**16 - 1)
U32 = st.integers(0, 2**32 - 1)
U64 = st.integers(0, 2**64 - 1)

frames = st.one_of(
    st.builds(Hello, U64),
    st.builds(
        InferRequest,
        request_id=U64,
        strategy_code=U8,
        split_layer=U16,
        batch=U32,
        payload=st.binary(max_size=4096),
    ),
    st.builds(InferResponse, request_id=U64, server_compute_ns=U64),
    st.builds(ErrorFrame, code=U16, message=st.text(max_size=200)),
)


@given(frames)
@settings(max_examples=1000, deadline=None)
def test_round_trip(frame):
    assert decode_frame_bytes(encode_frame(frame)) == frame


def test_known_layouts():
    # fixed-width little-endian fields, one tag byte up front
    assert encode_frame(Hello(1)) == b"\x01" + b"\x01" + b"\x00" * 7
    req = InferRequest(2, 1, 3, 4, b"ab")
    encoded = encode_frame(req)
    assert encoded[0] == 2
    assert len(encoded) == 1 + 23 + 2
    assert encoded.endswith(b"ab")
    assert encode_frame(InferResponse(1, 2))[0] == 3
    err = encode_frame(ErrorFrame(7, "hi"))
    assert err[0] == 4 and err.endswith(b"hi")


def test_request_header_matches_full_frame():
    req = InferRequest(9, 1, 2, 8, b"\x00" * 10)
    header = encode_request_header(9, 1, 2, 8, 10)
    assert encode_frame(req) == header + req.payload


def test_truncated_frame():
    encoded = encode_frame(Hello(12345))
    with pytest.raises(WireError):
        decode_frame_bytes(encoded[:-1])


def test_unknown_tag():
    with pytest.raises(WireError, match="unknown frame type"):
        decode_frame_bytes(b"\x09")


def test_trailing_garbage():
    with pytest.raises(WireError, match="trailing"):
        decode_frame_bytes(encode_frame(Hello(1)) + b"x")


def test_out_of_range_encode():
    with pytest.raises(WireError):
        encode_frame(Hello(2**64))
    with pytest.raises(WireError):
        encode_frame(ErrorFrame(-1, "nope"))


def test_non_utf8_error_message():
    raw = encode_frame(ErrorFrame(1, "aa"))
    broken = raw[:-2] + b"\xff\xfe"
    with pytest.raises(WireError, match="UTF-8"):
        decode_frame_bytes(broken)


def test_fnv1a64_reference_vectors():
    assert fnv1a64(b"") == 0xCBF29CE484222325
    assert fnv1a64(b"a") == 0xAF63DC4C8601EC8C
    assert fnv1a64(b"foobar") == 0x85944171F73967E8


def test_profile_hash_stable_and_meta_blind(toy3_profile):
    import json

    from splitwise.profile import load_profile, profile_to_obj

    h = profile_hash(toy3_profile)
    assert h == profile_hash(toy3_profile)
    obj = profile_to_obj(toy3_profile)
    obj["meta"] = {"host": "elsewhere"}
    assert profile_hash(load_profile(json.dumps(obj))) == h
    obj["layers"][0]["output_bytes_per_sample"] = 121
    assert profile_hash(load_profile(json.dumps(obj))) != h
