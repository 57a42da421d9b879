# pyre-strict
"""Scores for denoising and visualization attacks."""

import math
from typing import Literal

import numpy as np
from pydantic import BaseModel, ConfigDict

from evtcrypt.analysis.frame import EventFrame
from evtcrypt.core.errors import FrameMismatchError
from evtcrypt.formats.labels import LabeledStream


class SnrReport(BaseModel):
    """Signal and noise counts with their linear ratio."""

    model_config = ConfigDict(frozen=True)

    signal: int
    noise: int
    ratio: float
    infinite: bool = False
    scale: Literal["linear"] = "linear"


def snr(labeled: LabeledStream) -> SnrReport:
    """Signal-to-noise ratio as a count ratio; infinite (flagged) without noise."""
    signal, noise = labeled.signal_count, labeled.noise_count
    if noise == 0:
        return SnrReport(signal=signal, noise=0, ratio=math.inf, infinite=True)
    return SnrReport(signal=signal, noise=noise, ratio=signal / noise)


def frame_similarity(a: EventFrame, b: EventFrame) -> float:
    """Pearson correlation of two rendered frames, 0 when either is constant.

    Raises:
        FrameMismatchError: If the frames differ in size
    """
    if (a.width, a.height) != (b.width, b.height):
        raise FrameMismatchError(
            f"Cannot compare a {a.width}x{a.height} frame with a {b.width}x{b.height} frame"
        )
    u = a.rendered.astype(np.float64).ravel()
    v = b.rendered.astype(np.float64).ravel()
    u -= u.mean()
    v -= v.mean()
    denom = math.sqrt(float(u @ u) * float(v @ v))
    if denom == 0:
        return 0.0
    return float(np.clip(float(u @ v) / denom, -1.0, 1.0))
