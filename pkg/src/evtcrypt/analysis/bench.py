# pyre-strict
"""Encryption throughput benchmark."""

import logging
import time

import numpy as np
from pydantic import BaseModel, ConfigDict

from evtcrypt.analysis.scenes import generate_scene
from evtcrypt.core.config import EncryptConfig
from evtcrypt.core.encryptor import encrypt
from evtcrypt.core.errors import DataError, EmptyReportError
from evtcrypt.core.events import Resolution

logger = logging.getLogger(__name__)

BENCH_DURATION = 1_000_000


class BenchReport(BaseModel):
    """Throughput summary over all trials."""

    model_config = ConfigDict(frozen=True)

    trials: int
    event_count: int
    total_events: int
    output_events: int
    events_per_sec: float
    p50_ms: float
    p95_ms: float


def bench_encrypt(
    resolution: Resolution,
    event_count: int,
    trials: int,
    seed: int = 0,
    cfg: EncryptConfig | None = None,
) -> BenchReport:
    """Time ``encrypt`` on edge-sweep scenes of ``event_count`` events.

    Trials run sequentially; scene generation is not timed.

    Raises:
        EmptyReportError: If ``trials`` is zero or negative
        DataError: If ``event_count`` is not positive
    """
    if trials <= 0:
        raise EmptyReportError(f"Benchmark needs at least one trial, got {trials}")
    if event_count <= 0:
        raise DataError(f"event_count must be positive, got {event_count}")

    walls: list[float] = []
    total_in = total_out = 0
    for trial in range(trials):
        scene = generate_scene(
            "edge-sweep", resolution, BENCH_DURATION, float(event_count), seed + trial
        )
        start = time.perf_counter()
        bundle = encrypt(scene.stream, cfg)
        walls.append(time.perf_counter() - start)
        total_in += bundle.stats.input_events
        total_out += bundle.stats.output_events
        logger.info("Trial %d: %d events in %.1f ms", trial, len(scene.stream), walls[-1] * 1e3)

    elapsed = sum(walls)
    return BenchReport(
        trials=trials,
        event_count=event_count,
        total_events=total_in,
        output_events=total_out,
        events_per_sec=total_in / elapsed if elapsed > 0 else float("inf"),
        p50_ms=float(np.percentile(walls, 50)) * 1e3,
        p95_ms=float(np.percentile(walls, 95)) * 1e3,
    )
