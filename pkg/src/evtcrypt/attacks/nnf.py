# pyre-strict
"""Nearest-neighbor filter.

An event survives when at least ``min_neighbors`` other events share its
polarity and lie strictly within ``t_space`` (L1, pixels) and ``t_time`` (µs).
"""

import logging
from typing import Literal

import numpy as np
import numpy.typing as npt
from pydantic import Field

from evtcrypt.attacks.base import EventFilter
from evtcrypt.core.config import NnfConfig
from evtcrypt.core.events import EventStream

logger = logging.getLogger(__name__)

_KEY_LIMIT = 2**62


class NnfFilter(EventFilter):
    """Same-polarity spatiotemporal neighbor count filter."""

    config: NnfConfig = Field(default_factory=NnfConfig)
    method: Literal["indexed", "naive"] = "indexed"

    def keep_mask(self, stream: EventStream) -> npt.NDArray[np.bool_]:
        if len(stream) == 0:
            return np.zeros(0, dtype=bool)
        if self.method == "naive":
            counts = self._count_naive(stream)
        else:
            counts = self._count_indexed(stream)
        return counts >= self.config.min_neighbors

    def _columns(
        self, stream: EventStream
    ) -> tuple[npt.NDArray[np.int64], npt.NDArray[np.int64], npt.NDArray[np.int64], npt.NDArray[np.int64]]:
        df = stream.data
        return (
            df["t"].to_numpy().astype(np.int64),
            df["x"].to_numpy().astype(np.int64),
            df["y"].to_numpy().astype(np.int64),
            df["p"].to_numpy().astype(np.int64),
        )

    def _count_naive(self, stream: EventStream) -> npt.NDArray[np.int64]:
        """Reference O(n^2) neighbor count."""
        t, x, y, p = self._columns(stream)
        cfg = self.config
        counts = np.zeros(len(t), dtype=np.int64)
        for i in range(len(t)):
            near = (
                (np.abs(x - x[i]) + np.abs(y - y[i]) < cfg.t_space)
                & (np.abs(t - t[i]) < cfg.t_time)
                & (p == p[i])
            )
            counts[i] = int(near.sum()) - 1
        return counts

    def _count_indexed(self, stream: EventStream) -> npt.NDArray[np.int64]:
        """Neighbor count through one sorted (pixel, polarity, time) key per event."""
        t, x, y, p = self._columns(stream)
        cfg = self.config
        width, height = stream.resolution.width, stream.resolution.height
        rel = t - t.min()
        span = int(rel.max()) + cfg.t_time + 1
        if width * height * 2 * span >= _KEY_LIMIT:
            logger.warning("Time span too long for the indexed search, using the naive filter")
            return self._count_naive(stream)

        pbit = (p > 0).astype(np.int64)
        keys = np.sort(((y * width + x) * 2 + pbit) * span + rel)
        lo_rel = np.maximum(rel - cfg.t_time + 1, 0)
        hi_rel = np.minimum(rel + cfg.t_time - 1, span - 1)

        r = cfg.t_space - 1
        counts = np.zeros(len(t), dtype=np.int64)
        for dx in range(-r, r + 1):
            for dy in range(-r, r + 1):
                if abs(dx) + abs(dy) > r:
                    continue
                nx, ny = x + dx, y + dy
                valid = (nx >= 0) & (nx < width) & (ny >= 0) & (ny < height)
                base = ((ny * width + nx) * 2 + pbit) * span
                found = np.searchsorted(keys, base + hi_rel, side="right") - np.searchsorted(
                    keys, base + lo_rel, side="left"
                )
                counts += np.where(valid, found, 0)
        # each event finds itself at offset (0, 0)
        return counts - 1


def nnf_filter(
    stream: EventStream,
    cfg: NnfConfig | None = None,
    method: Literal["indexed", "naive"] = "indexed",
) -> EventStream:
    """Remove events with fewer than ``min_neighbors`` same-polarity neighbors."""
    return NnfFilter(config=cfg or NnfConfig(), method=method).apply(stream)
