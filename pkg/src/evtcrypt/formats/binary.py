# pyre-strict
"""Little-endian binary event format.

Header: magic ``EVT1``, u16 width, u16 height, u64 count (16 bytes), followed by
``count`` records of (u64 t, u16 x, u16 y, i8 p, 1 pad byte).
"""

import struct

import numpy as np
import polars as pl

from evtcrypt.core.errors import FormatError
from evtcrypt.core.events import EventStream
from evtcrypt.formats.base import EventFormat, frame_to_stream

MAGIC = b"EVT1"
HEADER = struct.Struct("<4sHHQ")
RECORD = np.dtype([("t", "<u8"), ("x", "<u2"), ("y", "<u2"), ("p", "i1"), ("pad", "u1")])


class BinaryFormat(EventFormat):
    """Fixed-size 14-byte records behind a 16-byte header."""

    name: str = "binary"
    suffixes: tuple[str, ...] = (".evb", ".bin")

    def encode(self, stream: EventStream) -> bytes:
        res = stream.resolution
        header = HEADER.pack(MAGIC, res.width, res.height, len(stream))
        records = np.zeros(len(stream), dtype=RECORD)
        for name in ("t", "x", "y", "p"):
            records[name] = stream.data[name].to_numpy()
        return header + records.tobytes()

    def decode(self, payload: bytes) -> EventStream:
        if len(payload) < HEADER.size:
            raise FormatError(f"Truncated header: {len(payload)} of {HEADER.size} bytes")
        magic, width, height, count = HEADER.unpack_from(payload)
        if magic != MAGIC:
            raise FormatError(f"Bad magic {magic!r}, expected {MAGIC!r}")
        body = len(payload) - HEADER.size
        expected = count * RECORD.itemsize
        if body < expected:
            raise FormatError(f"Truncated file: header declares {count} events, found {body // RECORD.itemsize}")
        if body > expected:
            raise FormatError(f"Count mismatch: header declares {count} events, file holds {body / RECORD.itemsize:g}")
        records = np.frombuffer(payload, dtype=RECORD, count=count, offset=HEADER.size)
        if count and int(records["t"].max()) >= 2**63:
            raise FormatError("Timestamp exceeds the signed 64-bit range")
        df = pl.DataFrame(
            {
                "t": records["t"].astype(np.int64),
                "x": records["x"].astype(np.int32),
                "y": records["y"].astype(np.int32),
                "p": records["p"].astype(np.int8),
            }
        )
        return frame_to_stream(df, width, height)


BINARY = BinaryFormat()


def read_binary(path: str) -> EventStream:
    """Read a binary event file."""
    return BINARY.read(path)


def write_binary(stream: EventStream, path: str) -> None:
    """Write a stream in the binary layout, canonical order."""
    BINARY.write(stream, path)
