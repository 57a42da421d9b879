# pyre-strict
"""Base event file format."""

import logging
import os
import tempfile
import warnings
from abc import ABC, abstractmethod
from pathlib import Path

import polars as pl
from pydantic import BaseModel, ConfigDict, Field

from evtcrypt.core.errors import FormatError, UnsortedInputWarning
from evtcrypt.core.events import EventStream, Resolution, canonical_sort

logger = logging.getLogger(__name__)


class EventFormat(BaseModel, ABC):
    """Base class for event stream serializations.

    Subclasses implement ``encode`` and ``decode`` over bytes; file access,
    atomic replacement and canonical ordering live here.
    """

    model_config = ConfigDict(frozen=True)

    name: str = Field(description="Format name used on the command line")
    suffixes: tuple[str, ...] = Field(default=(), description="File suffixes mapped to this format")

    @abstractmethod
    def encode(self, stream: EventStream) -> bytes:
        """Serialize a canonically sorted stream.

        Args:
            stream: Stream already in canonical order

        Returns:
            File contents
        """
        pass

    @abstractmethod
    def decode(self, payload: bytes) -> EventStream:
        """Parse file contents into a stream in file order.

        Args:
            payload: File contents

        Returns:
            Stream with events in the order they appear in the file

        Raises:
            FormatError: If the payload does not follow the layout
        """
        pass

    def dumps(self, stream: EventStream) -> bytes:
        return self.encode(canonical_sort(stream))

    def loads(self, payload: bytes, source: str = "<bytes>") -> EventStream:
        stream = self.decode(payload)
        return ensure_canonical(stream, source)

    def read(self, path: str | Path) -> EventStream:
        path = Path(path)
        try:
            payload = path.read_bytes()
        except OSError as e:
            raise FormatError(f"Cannot read {path}: {e.strerror}") from e
        stream = self.loads(payload, str(path))
        logger.info("Read %d events from %s", len(stream), path)
        return stream

    def write(self, stream: EventStream, path: str | Path) -> None:
        atomic_write_bytes(path, self.dumps(stream))
        logger.info("Wrote %d events to %s", len(stream), path)


def ensure_canonical(stream: EventStream, source: str) -> EventStream:
    """Return the stream in canonical order, warning if timestamps went backwards."""
    ts = stream.data["t"]
    if len(ts) > 1 and not ts.is_sorted():
        warnings.warn(
            f"{source}: timestamps are not monotonic, events were re-sorted",
            UnsortedInputWarning,
            stacklevel=3,
        )
        logger.warning("%s: timestamps are not monotonic, events were re-sorted", source)
    return canonical_sort(stream)


def atomic_write_bytes(path: str | Path, payload: bytes) -> None:
    """Write ``payload`` to a temporary sibling and rename it over ``path``."""
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as f:
            f.write(payload)
        os.replace(tmp, path)
    except BaseException:
        Path(tmp).unlink(missing_ok=True)
        raise


def frame_to_stream(df: pl.DataFrame, width: int, height: int) -> EventStream:
    """Build a stream from decoded columns, mapping schema problems to ``FormatError``."""
    try:
        resolution = Resolution(width=width, height=height)
    except ValueError as e:
        raise FormatError(f"Invalid resolution {width}x{height}") from e
    return EventStream(resolution=resolution, data=df)
