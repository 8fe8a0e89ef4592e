"""Binary tensor files and JSON run records.

Tensor file layout (all little-endian):

    bytes 0-3    magic ``DTEN``
    bytes 4-7    format version, uint32 (currently 1)
    bytes 8-11   order N, uint32
    next 8*N     dims, uint64 each
    rest         payload, IEEE-754 binary64, first-index-fastest

The payload is written bit-for-bit (NaN payloads included), so
write-then-read round-trips exactly.
"""

import json
import platform
import struct
import sys
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

__all__ = [
    "TENSOR_MAGIC",
    "TENSOR_FORMAT_VERSION",
    "RECORD_SCHEMA_VERSION",
    "TensorFileError",
    "write_tensor",
    "read_tensor",
    "environment_stamp",
    "run_record",
    "write_run_record",
]

TENSOR_MAGIC = b"DTEN"
TENSOR_FORMAT_VERSION = 1
RECORD_SCHEMA_VERSION = 1

_HEADER = struct.Struct("<4sII")


class TensorFileError(ValueError):
    """Raised on malformed or truncated tensor files."""


def write_tensor(path, x):
    """Serialize a dense float64 tensor; returns the path."""
    x = np.asarray(x, dtype="<f8")
    if x.ndim < 1:
        x = x.reshape(1)
    path = Path(path)
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(TENSOR_MAGIC, TENSOR_FORMAT_VERSION, x.ndim))
        fh.write(struct.pack(f"<{x.ndim}Q", *x.shape))
        fh.write(np.ravel(x, order="F").tobytes())
    return path


def read_tensor(path):
    """Parse a tensor file back into an ndarray."""
    blob = Path(path).read_bytes()
    if len(blob) < _HEADER.size:
        raise TensorFileError(f"{path}: truncated header")
    magic, version, order = _HEADER.unpack_from(blob)
    if magic != TENSOR_MAGIC:
        raise TensorFileError(f"{path}: bad magic {magic!r}")
    if version != TENSOR_FORMAT_VERSION:
        raise TensorFileError(f"{path}: unsupported format version {version}")
    dims_end = _HEADER.size + 8 * order
    if order < 1 or len(blob) < dims_end:
        raise TensorFileError(f"{path}: truncated dimension list")
    dims = struct.unpack_from(f"<{order}Q", blob, _HEADER.size)
    count = 1
    for d in dims:
        if d < 1:
            raise TensorFileError(f"{path}: nonpositive dimension {d}")
        count *= d
    payload = blob[dims_end:]
    if len(payload) != 8 * count:
        raise TensorFileError(
            f"{path}: payload is {len(payload)} bytes, expected {8 * count}"
        )
    flat = np.frombuffer(payload, dtype="<f8")
    return flat.reshape(dims, order="F").copy()


def environment_stamp():
    """Provenance for run records: interpreter, key libraries, host, time."""
    return {
        "python": sys.version.split()[0],
        "numpy": np.__version__,
        "platform": platform.platform(),
        "machine": platform.machine(),
        "timestamp_utc": datetime.now(timezone.utc).isoformat(),
    }


def run_record(config_echo, report, total_seconds, final_error=None):
    """Assemble the JSON-ready record for one solver run.

    ``config_echo`` is the caller's description of what was run (input,
    ranks, seed, variant, flags).  Numbers stay native floats; ``json``
    prints them shortest-round-trip so records are portable and diffable.
    """
    return {
        "schema_version": RECORD_SCHEMA_VERSION,
        "config": dict(config_echo),
        "variant": report.variant,
        "iterations": report.n_iters,
        "errors": list(report.errors),
        "iter_seconds": list(report.iter_seconds),
        "iter_buckets": [dict(b) for b in report.iter_buckets],
        "upfront_seconds": dict(report.upfront_seconds),
        "termination": report.termination,
        "fallback_count": report.fallback_count,
        "final_error": report.final_error if final_error is None else final_error,
        "total_seconds": total_seconds,
        "environment": environment_stamp(),
    }


def write_run_record(path, record):
    """Write a run record as indented JSON; returns the path."""
    path = Path(path)
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(record, fh, indent=2)
        fh.write("\n")
    return path
