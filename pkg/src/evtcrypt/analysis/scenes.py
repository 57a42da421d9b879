# pyre-strict
"""Synthetic event scenes standing in for recorded datasets."""

import logging
from typing import Literal

import numpy as np
import numpy.typing as npt

from evtcrypt.core.errors import DataError
from evtcrypt.core.events import EventStream, Resolution, canonical_sort
from evtcrypt.formats.labels import LabeledStream

logger = logging.getLogger(__name__)

SceneKind = Literal["edge-sweep", "two-blobs"]

_Arrays = tuple[npt.NDArray[np.int64], npt.NDArray[np.int64], npt.NDArray[np.int64]]


def _edge_sweep(
    rng: np.random.Generator, res: Resolution, t: npt.NDArray[np.int64], duration: int, bar_width: int
) -> _Arrays:
    """A bar crossing the sensor left to right over the middle half of the rows."""
    n = len(t)
    lead = (res.width * t) // duration
    trailing = (rng.random(n) < 0.5) & (lead >= bar_width)
    x = np.where(trailing, lead - bar_width, lead)
    p = np.where(trailing, -1, 1)
    y0 = res.height // 4
    y1 = max(y0 + 1, (3 * res.height) // 4)
    y = rng.integers(y0, y1, size=n)
    return x.astype(np.int64), y.astype(np.int64), p.astype(np.int64)


def _two_blobs(
    rng: np.random.Generator, res: Resolution, t: npt.NDArray[np.int64], duration: int
) -> _Arrays:
    """Two discs moving horizontally in opposite directions."""
    n = len(t)
    w, h = res.width, res.height
    r = max(1, min(w, h) // 8)
    travel = max(0, w - 1 - 2 * r)
    frac = t / duration
    blob = rng.integers(0, 2, size=n)
    cx = np.where(blob == 0, r + travel * frac, (w - 1 - r) - travel * frac)
    cy = np.where(blob == 0, h / 3, 2 * h / 3)
    angle = rng.uniform(0.0, 2 * np.pi, size=n)
    radius = r * np.sqrt(rng.random(n))
    dx = radius * np.cos(angle)
    dy = radius * np.sin(angle)
    x = np.clip(np.rint(cx + dx), 0, w - 1)
    y = np.clip(np.rint(cy + dy), 0, h - 1)
    heading = np.where(blob == 0, 1.0, -1.0)
    p = np.where(dx * heading >= 0, 1, -1)
    return x.astype(np.int64), y.astype(np.int64), p.astype(np.int64)


def generate_scene(
    kind: SceneKind,
    resolution: Resolution,
    duration: int,
    rate: float,
    seed: int,
    bar_width: int = 2,
) -> LabeledStream:
    """Generate a labeled synthetic scene.

    Args:
        kind: ``edge-sweep`` or ``two-blobs``
        resolution: Sensor size
        duration: Scene length in µs
        rate: Events per second of scene time
        seed: Seed for all draws
        bar_width: Distance between leading and trailing edge (edge-sweep)

    Returns:
        Canonically sorted stream, every event labeled as signal

    Raises:
        DataError: On non-positive duration or negative rate
    """
    if duration <= 0:
        raise DataError(f"duration must be positive, got {duration}")
    if rate < 0:
        raise DataError(f"rate must be non-negative, got {rate}")
    count = round(rate * duration / 1_000_000)
    rng = np.random.default_rng(seed)
    t = np.sort(rng.integers(0, duration, size=count, dtype=np.int64))
    if kind == "edge-sweep":
        x, y, p = _edge_sweep(rng, resolution, t, duration, bar_width)
    elif kind == "two-blobs":
        x, y, p = _two_blobs(rng, resolution, t, duration)
    else:
        raise DataError(f"kind must be 'edge-sweep' or 'two-blobs', got '{kind}'")
    stream = canonical_sort(EventStream.from_arrays(resolution, t, x, y, p))
    logger.info("Generated %s scene with %d events", kind, len(stream))
    return LabeledStream.all_signal(stream)
