"""Device/server offloading harness over a stream socket."""

from .agents import (
    ProfileServer,
    RequestRecord,
    RunReport,
    report_to_csv,
    report_to_obj,
    run_device,
    serve,
)
from .throttle import TokenBucket, bucket_capacity, throttled_send
from .wire import (
    ERR_HASH_MISMATCH,
    ERR_MALFORMED,
    ERR_UNMEASURED_BATCH,
    ErrorFrame,
    Frame,
    Hello,
    InferRequest,
    InferResponse,
    MAGIC,
    WireError,
    decode_frame,
    decode_frame_bytes,
    encode_frame,
    encode_request_header,
    fnv1a64,
    profile_hash,
)

__all__ = [
    "ProfileServer",
    "RequestRecord",
    "RunReport",
    "report_to_csv",
    "report_to_obj",
    "run_device",
    "serve",
    "TokenBucket",
    "bucket_capacity",
    "throttled_send",
    "ERR_HASH_MISMATCH",
    "ERR_MALFORMED",
    "ERR_UNMEASURED_BATCH",
    "ErrorFrame",
    "Frame",
    "Hello",
    "InferRequest",
    "InferResponse",
    "MAGIC",
    "WireError",
    "decode_frame",
    "decode_frame_bytes",
    "encode_frame",
    "encode_request_header",
    "fnv1a64",
    "profile_hash",
]
