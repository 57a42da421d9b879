# pyre-strict
"""Ground-truth labels travelling with an event stream."""

import logging
from pathlib import Path
from typing import Any

import numpy as np
import numpy.typing as npt
import polars as pl
from pydantic import BaseModel, ConfigDict, field_validator, model_validator

from evtcrypt.core.errors import FormatError, LabelMismatchError
from evtcrypt.core.events import EventStream, sort_frame
from evtcrypt.formats.base import atomic_write_bytes

logger = logging.getLogger(__name__)


class LabeledStream(BaseModel):
    """Stream with one bit per event: 1 for true signal, 0 for noise."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    stream: EventStream
    labels: pl.Series

    @field_validator("labels", mode="before")  # pyre-fixme[56]
    @classmethod
    def coerce_labels(cls, v: Any) -> pl.Series:
        series = v if isinstance(v, pl.Series) else pl.Series(np.asarray(v))
        try:
            series = series.cast(pl.UInt8, strict=True).rename("label")
        except pl.exceptions.PolarsError as e:
            raise FormatError(f"Labels must be 0 or 1: {e}") from e
        if series.null_count() or (series > 1).any():
            raise FormatError("Labels must be 0 or 1")
        return series

    @model_validator(mode="after")  # pyre-fixme[56]
    def validate_length(self) -> "LabeledStream":
        if len(self.labels) != len(self.stream):
            raise LabelMismatchError(
                f"{len(self.labels)} labels for {len(self.stream)} events"
            )
        return self

    @classmethod
    def from_frame(cls, stream: EventStream, df: pl.DataFrame) -> "LabeledStream":
        """Split a frame with a ``label`` column into stream and labels."""
        return cls(stream=stream.with_data(df.drop("label")), labels=df["label"])

    @classmethod
    def all_signal(cls, stream: EventStream) -> "LabeledStream":
        return cls(stream=stream, labels=np.ones(len(stream), dtype=np.uint8))

    def frame(self) -> pl.DataFrame:
        """Events with their label as an extra column."""
        return self.stream.data.with_columns(self.labels)

    def canonical(self) -> "LabeledStream":
        """Canonically sort events, keeping each label with its event."""
        return LabeledStream.from_frame(self.stream, sort_frame(self.frame()))

    def select(self, keep: npt.NDArray[np.bool_]) -> "LabeledStream":
        return LabeledStream.from_frame(self.stream, self.frame().filter(pl.Series(keep)))

    @property
    def signal_count(self) -> int:
        return int(self.labels.sum())

    @property
    def noise_count(self) -> int:
        return len(self.labels) - self.signal_count


def encode_labels(labels: pl.Series) -> bytes:
    return "".join(f"{int(v)}\n" for v in labels.to_list()).encode()


def read_labels(path: str | Path) -> pl.Series:
    """Read a sidecar of ``0``/``1`` lines."""
    path = Path(path)
    try:
        lines = path.read_text().split()
    except OSError as e:
        raise FormatError(f"Cannot read {path}: {e.strerror}") from e
    bad = next((v for v in lines if v not in ("0", "1")), None)
    if bad is not None:
        raise FormatError(f"{path}: label {bad!r} is not 0 or 1")
    return pl.Series("label", [int(v) for v in lines], dtype=pl.UInt8)


def write_labels(labels: pl.Series, path: str | Path) -> None:
    atomic_write_bytes(path, encode_labels(labels))
    logger.info("Wrote %d labels to %s", len(labels), path)
