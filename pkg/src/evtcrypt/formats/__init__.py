# pyre-strict
"""Serialization of event streams, labels and key files."""

from pathlib import Path

from evtcrypt.formats.base import EventFormat
from evtcrypt.formats.binary import BINARY
from evtcrypt.formats.text import TEXT

FORMATS: dict[str, EventFormat] = {TEXT.name: TEXT, BINARY.name: BINARY}


def format_for(path: str | Path, name: str | None = None) -> EventFormat:
    """Pick a format by explicit name, else by file suffix (text when unknown)."""
    if name is not None:
        if name not in FORMATS:
            raise ValueError(f"format must be one of {sorted(FORMATS)}, got '{name}'")
        return FORMATS[name]
    suffix = Path(path).suffix.lower()
    for fmt in FORMATS.values():
        if suffix in fmt.suffixes:
            return fmt
    return TEXT
