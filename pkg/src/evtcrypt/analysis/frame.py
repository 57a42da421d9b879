# pyre-strict
"""Event frames: polarity accumulation (or counts) rendered to 8-bit gray."""

import logging
from pathlib import Path
from typing import Any, Literal

import numpy as np
import numpy.typing as npt
import plotly.graph_objects as go
import polars as pl
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from evtcrypt.core.errors import DataError
from evtcrypt.core.events import EventStream
from evtcrypt.formats.base import atomic_write_bytes

logger = logging.getLogger(__name__)

FrameMode = Literal["accumulate", "count"]


class EventFrame(BaseModel):
    """Per-pixel accumulation ``values`` and its gray rendering, both (height, width)."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    width: int = Field(gt=0)
    height: int = Field(gt=0)
    values: np.ndarray  # type: ignore[type-arg]
    rendered: np.ndarray  # type: ignore[type-arg]
    mode: FrameMode = "accumulate"

    @field_validator("values", "rendered", mode="before")  # pyre-fixme[56]
    @classmethod
    def freeze_array(cls, v: Any) -> npt.NDArray[Any]:
        arr = np.array(v)
        arr.flags.writeable = False
        return arr

    @model_validator(mode="after")  # pyre-fixme[56]
    def validate_shape(self) -> "EventFrame":
        expected = (self.height, self.width)
        if self.values.shape != expected or self.rendered.shape != expected:
            raise ValueError(f"Frame arrays must have shape {expected}")
        return self

    def to_pgm(self) -> bytes:
        """Binary PGM (P5), rows top to bottom."""
        header = f"P5\n{self.width} {self.height}\n255\n".encode()
        return header + self.rendered.astype(np.uint8).tobytes()

    def write_pgm(self, path: str | Path) -> None:
        atomic_write_bytes(path, self.to_pgm())
        logger.info("Wrote %dx%d frame to %s", self.width, self.height, path)

    def to_figure(self, title: str | None = None) -> go.Figure:
        """Plotly heatmap of the rendered frame, row 0 at the top."""
        fig = go.Figure(
            data=go.Heatmap(z=self.rendered, colorscale="gray", zmin=0, zmax=255, showscale=False)
        )
        fig.update_layout(
            title=title,
            yaxis={"autorange": "reversed", "scaleanchor": "x"},
            margin={"l": 20, "r": 20, "t": 40 if title else 20, "b": 20},
        )
        return fig


def _round_half_up(v: npt.NDArray[np.float64]) -> npt.NDArray[np.int64]:
    return np.floor(v + 0.5).astype(np.int64)


def render_frame(
    stream: EventStream,
    window: tuple[int, int] | None = None,
    mode: FrameMode = "accumulate",
) -> EventFrame:
    """Accumulate events with ``t0 <= t <= t1`` into a frame.

    Args:
        stream: Events to draw
        window: Inclusive time window; the whole stream when omitted
        mode: ``accumulate`` sums polarities, ``count`` counts events

    Returns:
        Frame with raw values and the normalized 8-bit rendering

    Raises:
        DataError: If ``t0 > t1``
    """
    res = stream.resolution
    df = stream.data
    if window is not None:
        t0, t1 = window
        if t0 > t1:
            raise DataError(f"Frame window start {t0} is after its end {t1}")
        df = df.filter(pl.col("t").is_between(t0, t1, closed="both"))

    flat = df["y"].to_numpy().astype(np.int64) * res.width + df["x"].to_numpy().astype(np.int64)
    weights = (
        df["p"].to_numpy().astype(np.int64)
        if mode == "accumulate"
        else np.ones(len(flat), dtype=np.int64)
    )
    values = np.bincount(flat, weights=weights, minlength=res.pixel_count)
    values = values.astype(np.int64).reshape(res.height, res.width)

    if mode == "accumulate":
        scale = max(1, int(np.abs(values).max(initial=0)))
        rendered = 128 + _round_half_up(127.0 * values / scale)
    else:
        scale = max(1, int(values.max(initial=0)))
        rendered = _round_half_up(255.0 * values / scale)
    return EventFrame(
        width=res.width,
        height=res.height,
        values=values,
        rendered=rendered.astype(np.uint8),
        mode=mode,
    )
