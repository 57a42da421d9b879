# pyre-strict
"""Voxel density filter."""

import numpy as np
import numpy.typing as npt
import polars as pl
from pydantic import Field

from evtcrypt.attacks.base import EventFilter
from evtcrypt.core.config import DensityConfig
from evtcrypt.core.events import EventStream


class DensityFilter(EventFilter):
    """Keep events whose (dx, dy, dt) voxel holds at least ``min_count`` events."""

    config: DensityConfig = Field(default_factory=DensityConfig)

    def keep_mask(self, stream: EventStream) -> npt.NDArray[np.bool_]:
        cfg = self.config
        voxel = [pl.col("x") // cfg.dx, pl.col("y") // cfg.dy, pl.col("t") // cfg.dt]
        occupancy = stream.data.select(pl.len().over(voxel).alias("n"))["n"]
        return (occupancy >= cfg.min_count).to_numpy()


def density_filter(
    stream: EventStream, voxel: tuple[int, int, int], min_count: int
) -> EventStream:
    """Keep events in voxels of size ``voxel`` = (dx px, dy px, dt µs) holding >= ``min_count`` events."""
    dx, dy, dt = voxel
    cfg = DensityConfig(dx=dx, dy=dy, dt=dt, min_count=min_count)
    return DensityFilter(config=cfg).apply(stream)
