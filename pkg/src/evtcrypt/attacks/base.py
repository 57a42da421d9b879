# pyre-strict
"""Base denoising filter."""

import logging
from abc import ABC, abstractmethod

import numpy as np
import numpy.typing as npt
from pydantic import BaseModel, ConfigDict

from evtcrypt.core.events import EventStream, canonical_sort
from evtcrypt.formats.labels import LabeledStream

logger = logging.getLogger(__name__)


class EventFilter(BaseModel, ABC):
    """Base class for event denoisers.

    Subclasses decide per event whether it survives; the base class handles
    ordering and carries ground-truth labels through the filter.
    """

    model_config = ConfigDict(frozen=True)

    @abstractmethod
    def keep_mask(self, stream: EventStream) -> npt.NDArray[np.bool_]:
        """Decide which events to keep.

        Args:
            stream: Canonically sorted stream

        Returns:
            Boolean array aligned with the stream's rows
        """
        pass

    def apply(self, stream: EventStream) -> EventStream:
        """Filter a stream; output is canonical and a subset of the input."""
        ordered = canonical_sort(stream)
        keep = self.keep_mask(ordered)
        kept = ordered.data.filter(keep)
        logger.info(
            "%s kept %d of %d events", type(self).__name__, kept.height, len(ordered)
        )
        return ordered.with_data(kept)

    def apply_labeled(self, labeled: LabeledStream) -> LabeledStream:
        ordered = labeled.canonical()
        return ordered.select(self.keep_mask(ordered.stream))

    def __call__(self, stream: EventStream) -> EventStream:
        return self.apply(stream)
