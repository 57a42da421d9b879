# pyre-strict
"""Plain-text event format.

Layout::

    # evt v1 <width> <height>
    <t> <x> <y> <p>
    ...
"""

import io
import re

import polars as pl

from evtcrypt.core.errors import FormatError
from evtcrypt.core.events import SCHEMA, EventStream
from evtcrypt.formats.base import EventFormat, frame_to_stream

_HEADER = re.compile(r"^# evt v1 (\d+) (\d+)\s*$")


class TextFormat(EventFormat):
    """One event per line, space separated."""

    name: str = "text"
    suffixes: tuple[str, ...] = (".txt", ".evt")

    def encode(self, stream: EventStream) -> bytes:
        res = stream.resolution
        header = f"# evt v1 {res.width} {res.height}\n".encode()
        if stream.data.is_empty():
            return header
        body = stream.data.write_csv(separator=" ", include_header=False, line_terminator="\n")
        return header + body.encode()

    def decode(self, payload: bytes) -> EventStream:
        try:
            text = payload.decode("ascii")
        except UnicodeDecodeError as e:
            raise FormatError("Text event file is not ASCII") from e
        lines = text.splitlines()
        if not lines:
            raise FormatError("Missing header line '# evt v1 <width> <height>'")
        match = _HEADER.match(lines[0])
        if match is None:
            raise FormatError(f"Malformed header line: {lines[0]!r}")
        width, height = int(match.group(1)), int(match.group(2))

        rows: list[str] = []
        for lineno, line in enumerate(lines[1:], start=2):
            row = line.strip()
            if not row:
                continue
            if len(row.split()) != 4:
                raise FormatError(f"Line {lineno}: expected '<t> <x> <y> <p>', got {row!r}")
            rows.append(row)
        if not rows:
            return frame_to_stream(pl.DataFrame(schema=SCHEMA), width, height)

        body = "\n".join(" ".join(row.split()) for row in rows)
        try:
            df = pl.read_csv(
                io.StringIO(body),
                has_header=False,
                separator=" ",
                schema={"t": pl.Int64, "x": pl.Int64, "y": pl.Int64, "p": pl.Int64},
            )
        except pl.exceptions.PolarsError as e:
            raise FormatError(f"Malformed event line: {e}") from e
        return frame_to_stream(df, width, height)


TEXT = TextFormat()


def read_text(path: str) -> EventStream:
    """Read a text event file; non-monotonic files are re-sorted with a warning."""
    return TEXT.read(path)


def write_text(stream: EventStream, path: str) -> None:
    """Write a stream as text in canonical order."""
    TEXT.write(stream, path)
