# pyre-strict
"""evtcrypt: privacy-preserving encryption for event camera streams."""

__version__ = "0.1.0"

from evtcrypt.analysis.bench import BenchReport, bench_encrypt
from evtcrypt.analysis.frame import EventFrame, render_frame
from evtcrypt.analysis.metrics import SnrReport, frame_similarity, snr
from evtcrypt.analysis.scenes import generate_scene
from evtcrypt.attacks.density import DensityFilter, density_filter
from evtcrypt.attacks.nnf import NnfFilter, nnf_filter
from evtcrypt.attacks.noise import inject_random_noise, label_encrypted
from evtcrypt.core.config import DensityConfig, EncryptConfig, NnfConfig
from evtcrypt.core.encryptor import (
    EncryptedBundle,
    NoiseMask,
    build_mask,
    decrypt,
    encrypt,
    fill_noise,
    polarity_map,
)
from evtcrypt.core.events import (
    Event,
    EventStream,
    Pixel,
    Resolution,
    SpatialPlane,
    canonical_sort,
    project_plane,
    szudzik_pair,
    szudzik_unpair,
)
from evtcrypt.formats.binary import read_binary, write_binary
from evtcrypt.formats.keyfile import read_key, write_key
from evtcrypt.formats.labels import LabeledStream, read_labels, write_labels
from evtcrypt.formats.text import read_text, write_text

__all__ = [
    "Pixel",
    "Resolution",
    "Event",
    "EventStream",
    "SpatialPlane",
    "szudzik_pair",
    "szudzik_unpair",
    "canonical_sort",
    "project_plane",
    "EncryptConfig",
    "NnfConfig",
    "DensityConfig",
    "NoiseMask",
    "EncryptedBundle",
    "build_mask",
    "fill_noise",
    "polarity_map",
    "encrypt",
    "decrypt",
    "read_text",
    "write_text",
    "read_binary",
    "write_binary",
    "read_key",
    "write_key",
    "LabeledStream",
    "read_labels",
    "write_labels",
    "NnfFilter",
    "nnf_filter",
    "DensityFilter",
    "density_filter",
    "inject_random_noise",
    "label_encrypted",
    "SnrReport",
    "snr",
    "frame_similarity",
    "EventFrame",
    "render_frame",
    "generate_scene",
    "BenchReport",
    "bench_encrypt",
]
