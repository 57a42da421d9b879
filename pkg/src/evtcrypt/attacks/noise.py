# pyre-strict
"""Baselines for the denoising attack: random noise injection and ground-truth labels."""

import logging
import math

import numpy as np
import polars as pl

from evtcrypt.core.encryptor import polarity_map
from evtcrypt.core.errors import DataError, EmptyStreamError
from evtcrypt.core.events import SCHEMA, EventStream, sort_frame
from evtcrypt.formats.labels import LabeledStream

logger = logging.getLogger(__name__)

_KEYS = list(SCHEMA)


def inject_random_noise(stream: EventStream, target_snr: float, seed: int) -> LabeledStream:
    """Add uncorrelated noise so that signal/noise equals ``target_snr``.

    Args:
        stream: Non-empty signal events
        target_snr: Desired signal-to-noise ratio, > 0
        seed: Seed for pixel, timestamp and polarity draws

    Returns:
        Canonically sorted stream with originals labeled 1 and noise labeled 0

    Raises:
        EmptyStreamError: If the stream has no events
    """
    if len(stream) == 0:
        raise EmptyStreamError("Cannot inject noise into an empty event stream")
    if not target_snr > 0:
        raise DataError(f"target_snr must be positive, got {target_snr}")
    count = math.floor(len(stream) / target_snr)
    res = stream.resolution
    t_min, t_max = stream.time_range()

    rng = np.random.default_rng(seed)
    noise = pl.DataFrame(
        {
            "t": rng.integers(t_min, t_max + 1, size=count, dtype=np.int64),
            "x": rng.integers(0, res.width, size=count, dtype=np.int32),
            "y": rng.integers(0, res.height, size=count, dtype=np.int32),
            "p": (rng.integers(0, 2, size=count, dtype=np.int8) * 2 - 1).astype(np.int8),
            "label": np.zeros(count, dtype=np.uint8),
        }
    )
    signal = stream.data.with_columns(pl.lit(1, dtype=pl.UInt8).alias("label"))
    combined = sort_frame(pl.concat([signal, noise.cast(signal.schema)]))
    logger.info("Injected %d noise events into %d signal events", count, len(stream))
    return LabeledStream.from_frame(stream, combined)


def label_encrypted(original: EventStream, encrypted: EventStream) -> LabeledStream:
    """Label the events of an encrypted stream against the stream it came from.

    An encrypted event is signal iff, after undoing the polarity map, its
    (t, x, y, p) matches an event of ``original``. Noise never lands on a
    true-event pixel, so pixel membership is implied by the match.

    Args:
        original: Stream before encryption
        encrypted: Output of ``encrypt(original).stream``

    Returns:
        The encrypted stream, canonically sorted, with its labels
    """
    truth = original.data.select(_KEYS).unique().with_columns(
        pl.lit(1, dtype=pl.UInt8).alias("label")
    )
    ordered = encrypted.with_data(sort_frame(encrypted.data))
    restored = polarity_map(ordered).data.with_row_index("_row")
    labels = (
        restored.join(truth, on=_KEYS, how="left")
        .sort("_row")["label"]
        .fill_null(0)
    )
    return LabeledStream(stream=ordered, labels=labels)
