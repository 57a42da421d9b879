# pyre-strict
"""Event model: pixels, events, streams, spatial planes and the Szudzik pairing."""

import math
from bisect import bisect_left
from collections.abc import Iterable, Sequence
from typing import Any, Literal

import numpy as np
import numpy.typing as npt
import polars as pl
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from evtcrypt.core.errors import FormatError, OutOfBoundsError, PairingRangeError

MAX_COORD = 65535
MAX_CODE = (MAX_COORD + 1) ** 2 - 1

SCHEMA: dict[str, pl.DataType] = {
    "t": pl.Int64(),
    "x": pl.Int32(),
    "y": pl.Int32(),
    "p": pl.Int8(),
}


class Pixel(BaseModel):
    """Sensor pixel, column ``x`` and row ``y``."""

    model_config = ConfigDict(frozen=True)

    x: int = Field(ge=0, le=MAX_COORD)
    y: int = Field(ge=0, le=MAX_COORD)

    def as_tuple(self) -> tuple[int, int]:
        return (self.x, self.y)


class Resolution(BaseModel):
    """Sensor size S as (width, height)."""

    model_config = ConfigDict(frozen=True)

    width: int = Field(gt=0, le=MAX_COORD)
    height: int = Field(gt=0, le=MAX_COORD)

    @property
    def pixel_count(self) -> int:
        return self.width * self.height

    def contains(self, x: int, y: int) -> bool:
        return 0 <= x < self.width and 0 <= y < self.height


class Event(BaseModel):
    """A single brightness change: pixel, polarity and timestamp in microseconds."""

    model_config = ConfigDict(frozen=True)

    pixel: Pixel
    polarity: Literal[-1, 1]
    timestamp: int = Field(ge=0, lt=2**63)


def szudzik_pair(p: Pixel) -> int:
    """Encode a pixel as a single non-negative integer.

    Args:
        p: Pixel to encode

    Returns:
        ``x*x + x + y`` if ``x >= y`` else ``y*y + x``
    """
    x, y = p.x, p.y
    return x * x + x + y if x >= y else y * y + x


def szudzik_unpair(code: int) -> Pixel:
    """Invert :func:`szudzik_pair`.

    Args:
        code: Code produced by ``szudzik_pair``

    Returns:
        The encoded pixel

    Raises:
        PairingRangeError: If the code cannot come from a 16-bit pixel
    """
    if code < 0 or code > MAX_CODE:
        raise PairingRangeError(f"Szudzik code out of range for 16-bit pixels: {code}")
    b = math.isqrt(code)
    a = code - b * b
    if a < b:
        return Pixel(x=a, y=b)
    return Pixel(x=b, y=a - b)


def szudzik_pair_expr(x: str = "x", y: str = "y") -> pl.Expr:
    """Polars expression computing Szudzik codes from two coordinate columns."""
    xs = pl.col(x).cast(pl.Int64)
    ys = pl.col(y).cast(pl.Int64)
    return pl.when(xs >= ys).then(xs * xs + xs + ys).otherwise(ys * ys + xs)


def szudzik_pair_array(
    x: npt.NDArray[np.integer[Any]], y: npt.NDArray[np.integer[Any]]
) -> npt.NDArray[np.int64]:
    """Vectorized :func:`szudzik_pair` over coordinate arrays."""
    xs = np.asarray(x, dtype=np.int64)
    ys = np.asarray(y, dtype=np.int64)
    return np.where(xs >= ys, xs * xs + xs + ys, ys * ys + xs)


def szudzik_unpair_array(
    codes: npt.NDArray[np.integer[Any]],
) -> tuple[npt.NDArray[np.int64], npt.NDArray[np.int64]]:
    """Vectorized :func:`szudzik_unpair`; codes must already be range checked."""
    c = np.asarray(codes, dtype=np.int64)
    b = np.floor(np.sqrt(c.astype(np.float64))).astype(np.int64)
    # float sqrt may be off by one near perfect squares
    b = np.where(b * b > c, b - 1, b)
    b = np.where((b + 1) * (b + 1) <= c, b + 1, b)
    a = c - b * b
    low = a < b
    return np.where(low, a, b), np.where(low, b, a - b)


def l1_space(a: Pixel, b: Pixel) -> int:
    return abs(a.x - b.x) + abs(a.y - b.y)


def l1_time(a: int, b: int) -> int:
    return abs(a - b)


def empty_frame() -> pl.DataFrame:
    return pl.DataFrame(schema=SCHEMA)


class EventStream(BaseModel):
    """A batch of events E recorded on a sensor of size S.

    ``data`` holds one row per event with columns ``t``, ``x``, ``y``, ``p``.
    Rows may be in any order; :func:`canonical_sort` gives the serialized order.
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    resolution: Resolution
    data: pl.DataFrame = Field(default_factory=empty_frame)

    @field_validator("data", mode="before")  # pyre-fixme[56]
    @classmethod
    def coerce_schema(cls, v: Any) -> pl.DataFrame:
        """Select the event columns and cast them to the fixed schema.

        Raises:
            FormatError: If columns are missing or values do not fit the schema
        """
        if not isinstance(v, pl.DataFrame):
            raise FormatError(f"Event data must be a polars DataFrame, got {type(v).__name__}")
        missing = set(SCHEMA) - set(v.columns)
        if missing:
            raise FormatError(f"Missing event columns: {sorted(missing)}")
        try:
            return v.select([pl.col(name).cast(dtype, strict=True) for name, dtype in SCHEMA.items()])
        except pl.exceptions.PolarsError as e:
            raise FormatError(f"Event columns do not fit the event schema: {e}") from e

    @model_validator(mode="after")  # pyre-fixme[56]
    def validate_events(self) -> "EventStream":
        """Check polarity values, timestamps and pixel bounds."""
        if self.data.is_empty():
            return self
        df = self.data
        if df.null_count().sum_horizontal().item() > 0:
            raise FormatError("Event data contains null values")
        bad_p = df.filter(~pl.col("p").is_in([-1, 1]))
        if bad_p.height:
            raise FormatError(f"Invalid polarity {bad_p['p'][0]}, expected -1 or 1")
        if df["t"].min() < 0:  # type: ignore[operator]
            raise FormatError(f"Negative timestamp {df['t'].min()}")
        w, h = self.resolution.width, self.resolution.height
        outside = df.filter(
            (pl.col("x") < 0) | (pl.col("x") >= w) | (pl.col("y") < 0) | (pl.col("y") >= h)
        )
        if outside.height:
            row = outside.row(0, named=True)
            raise OutOfBoundsError(
                f"Pixel ({row['x']}, {row['y']}) outside resolution {w}x{h}"
            )
        return self

    @classmethod
    def from_events(cls, events: Iterable[Event], resolution: Resolution) -> "EventStream":
        rows = [(e.timestamp, e.pixel.x, e.pixel.y, e.polarity) for e in events]
        data = pl.DataFrame(rows, schema=SCHEMA, orient="row")
        return cls(resolution=resolution, data=data)

    @classmethod
    def from_arrays(
        cls,
        resolution: Resolution,
        t: Sequence[int] | npt.NDArray[Any],
        x: Sequence[int] | npt.NDArray[Any],
        y: Sequence[int] | npt.NDArray[Any],
        p: Sequence[int] | npt.NDArray[Any],
    ) -> "EventStream":
        data = pl.DataFrame(
            {
                "t": np.asarray(t, dtype=np.int64),
                "x": np.asarray(x, dtype=np.int32),
                "y": np.asarray(y, dtype=np.int32),
                "p": np.asarray(p, dtype=np.int8),
            }
        )
        return cls(resolution=resolution, data=data)

    def with_data(self, data: pl.DataFrame) -> "EventStream":
        """New stream on the same sensor with different events."""
        return EventStream(resolution=self.resolution, data=data)

    def __len__(self) -> int:
        return self.data.height

    @property
    def events(self) -> list[Event]:
        return [
            Event(pixel=Pixel(x=x, y=y), polarity=p, timestamp=t)
            for t, x, y, p in self.data.iter_rows()
        ]

    def codes(self) -> npt.NDArray[np.int64]:
        """Szudzik code of every event's pixel, in row order."""
        return szudzik_pair_array(self.data["x"].to_numpy(), self.data["y"].to_numpy())

    def time_range(self) -> tuple[int, int]:
        if self.data.is_empty():
            return (0, 0)
        return (int(self.data["t"].min()), int(self.data["t"].max()))  # type: ignore[arg-type]

    def is_canonical(self) -> bool:
        return self.data.equals(canonical_sort(self).data)


def canonical_sort(stream: EventStream) -> EventStream:
    """Order events by (timestamp, Szudzik code, polarity).

    Args:
        stream: Stream in any order

    Returns:
        Stream with the same events in canonical order
    """
    return stream.with_data(sort_frame(stream.data))


def sort_frame(df: pl.DataFrame) -> pl.DataFrame:
    """Canonically sort an event frame; extra columns travel with their rows."""
    return (
        df.with_columns(szudzik_pair_expr().alias("_code"))
        .sort(["t", "_code", "p"], maintain_order=True)
        .drop("_code")
    )


class SpatialPlane(BaseModel):
    """Set of pixels E_x, stored as ascending unique Szudzik codes."""

    model_config = ConfigDict(frozen=True)

    codes: tuple[int, ...] = ()

    @field_validator("codes", mode="before")  # pyre-fixme[56]
    @classmethod
    def normalize_codes(cls, v: Iterable[int]) -> tuple[int, ...]:
        """Sort, deduplicate and range check codes."""
        codes = sorted({int(c) for c in v})
        if codes and (codes[0] < 0 or codes[-1] > MAX_CODE):
            raise PairingRangeError(f"Plane holds codes outside the 16-bit pixel range: {codes[-1]}")
        return tuple(codes)

    @classmethod
    def from_pixels(cls, pixels: Iterable[Pixel | tuple[int, int]]) -> "SpatialPlane":
        codes = []
        for p in pixels:
            px = p if isinstance(p, Pixel) else Pixel(x=p[0], y=p[1])
            codes.append(szudzik_pair(px))
        return cls(codes=codes)

    def __len__(self) -> int:
        return len(self.codes)

    def __contains__(self, item: object) -> bool:
        if isinstance(item, tuple):
            item = Pixel(x=item[0], y=item[1])
        if not isinstance(item, Pixel):
            return False
        code = szudzik_pair(item)
        i = bisect_left(self.codes, code)
        return i < len(self.codes) and self.codes[i] == code

    def codes_array(self) -> npt.NDArray[np.int64]:
        return np.asarray(self.codes, dtype=np.int64)

    def pixels(self) -> list[Pixel]:
        """Pixels in ascending code order."""
        return [szudzik_unpair(c) for c in self.codes]

    def pixel_arrays(self) -> tuple[npt.NDArray[np.int64], npt.NDArray[np.int64]]:
        return szudzik_unpair_array(self.codes_array())

    def fits(self, resolution: Resolution) -> bool:
        """Whether every pixel lies inside ``resolution``."""
        if not self.codes:
            return True
        xs, ys = self.pixel_arrays()
        return bool((xs < resolution.width).all() and (ys < resolution.height).all())


def project_plane(stream: EventStream) -> SpatialPlane:
    """Distinct pixels hosting at least one event."""
    codes = np.unique(stream.codes())
    return SpatialPlane(codes=codes.tolist())
