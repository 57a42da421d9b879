# pyre-strict
"""Exception hierarchy for evtcrypt.

The root class is not a ``ValueError`` so pydantic validators let these errors
propagate unchanged instead of folding them into a ``ValidationError``.
"""


class EvtCryptError(Exception):
    """Base class for all evtcrypt errors."""


class DataError(EvtCryptError):
    """Input data is malformed or inconsistent."""


class FormatError(DataError):
    """A file does not follow its declared layout."""


class OutOfBoundsError(DataError):
    """An event or pixel lies outside the sensor resolution."""


class EmptyStreamError(DataError):
    """An operation needs at least one event."""


class PlaneMismatchError(DataError):
    """A decoded key plane does not fit the stream it is applied to."""


class LabelMismatchError(DataError):
    """Labels and events disagree in length."""


class FrameMismatchError(DataError):
    """Two event frames have different dimensions."""


class PairingRangeError(DataError):
    """A Szudzik code is outside the range reachable from 16-bit pixels."""


class EmptyReportError(DataError):
    """A benchmark was asked to run zero trials."""


class KeyFileError(EvtCryptError):
    """A key file cannot be turned back into a plane."""


class CorruptKeyError(KeyFileError):
    """The key file checksum or layout is invalid."""


class WrongSecretError(KeyFileError):
    """The key decoded to codes that cannot come from a valid plane."""


class AuditError(EvtCryptError):
    """A synthesized noise event broke the correlation constraints."""


class UnsortedInputWarning(UserWarning):
    """Input events were not in canonical order and have been re-sorted."""
