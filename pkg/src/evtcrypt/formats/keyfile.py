# pyre-strict
"""Key files: the true-event plane as encrypted Szudzik codes.

Layout (little endian)::

    magic "EVK1" | u8 cipher id | u64 nonce | u64 code count | ciphertext | u32 crc32

The CRC covers everything before it. The plaintext is the ascending list of
u64 codes, so a wrong secret shows up as codes that are out of range or unsorted.
"""

import hashlib
import logging
import struct
import zlib
from abc import ABC, abstractmethod
from pathlib import Path

import numpy as np
import numpy.typing as npt
from pydantic import BaseModel, ConfigDict, Field

from evtcrypt.core.errors import CorruptKeyError, EmptyStreamError, WrongSecretError
from evtcrypt.core.events import MAX_CODE, SpatialPlane
from evtcrypt.core.prng import MASK64, splitmix64_block
from evtcrypt.formats.base import atomic_write_bytes

logger = logging.getLogger(__name__)

MAGIC = b"EVK1"
HEADER = struct.Struct("<4sBQQ")
CHECKSUM = struct.Struct("<I")


class KeyCipher(BaseModel, ABC):
    """A reversible transform of the code list, selected by ``cipher_id``."""

    model_config = ConfigDict(frozen=True)

    cipher_id: int = Field(ge=0, le=255)

    @abstractmethod
    def encrypt(self, plaintext: bytes, secret: int, nonce: int) -> bytes:
        pass

    @abstractmethod
    def decrypt(self, ciphertext: bytes, secret: int, nonce: int) -> bytes:
        pass


class SplitMixXorCipher(KeyCipher):
    """XOR with SplitMix64 outputs seeded by ``secret ^ nonce``."""

    cipher_id: int = 1

    def _keystream(self, length: int, secret: int, nonce: int) -> npt.NDArray[np.uint64]:
        return splitmix64_block((secret ^ nonce) & MASK64, 0, length // 8)

    def encrypt(self, plaintext: bytes, secret: int, nonce: int) -> bytes:
        words = np.frombuffer(plaintext, dtype="<u8")
        return (words ^ self._keystream(len(plaintext), secret, nonce)).astype("<u8").tobytes()

    def decrypt(self, ciphertext: bytes, secret: int, nonce: int) -> bytes:
        return self.encrypt(ciphertext, secret, nonce)


CIPHERS: dict[int, KeyCipher] = {1: SplitMixXorCipher()}


class KeyFile(BaseModel):
    """Parsed key file contents."""

    model_config = ConfigDict(frozen=True)

    magic: bytes = MAGIC
    cipher_id: int = Field(default=1, ge=0, le=255)
    nonce: int = Field(ge=0, le=MASK64)
    code_count: int = Field(ge=0, le=MASK64)
    ciphertext: bytes
    checksum: int = Field(ge=0, le=0xFFFFFFFF)

    def header_bytes(self) -> bytes:
        return HEADER.pack(self.magic, self.cipher_id, self.nonce, self.code_count)

    def to_bytes(self) -> bytes:
        return self.header_bytes() + self.ciphertext + CHECKSUM.pack(self.checksum)

    @classmethod
    def from_bytes(cls, payload: bytes) -> "KeyFile":
        """Parse and integrity check a key file.

        Raises:
            CorruptKeyError: On bad magic, wrong length or checksum mismatch
        """
        if len(payload) < HEADER.size + CHECKSUM.size:
            raise CorruptKeyError(f"Key file too short: {len(payload)} bytes")
        magic, cipher_id, nonce, count = HEADER.unpack_from(payload)
        if magic != MAGIC:
            raise CorruptKeyError(f"Bad key magic {magic!r}, expected {MAGIC!r}")
        body_end = len(payload) - CHECKSUM.size
        if body_end - HEADER.size != count * 8:
            raise CorruptKeyError(
                f"Key declares {count} codes but carries {body_end - HEADER.size} ciphertext bytes"
            )
        (checksum,) = CHECKSUM.unpack_from(payload, body_end)
        if zlib.crc32(payload[:body_end]) != checksum:
            raise CorruptKeyError("Key checksum mismatch")
        return cls(
            magic=magic,
            cipher_id=cipher_id,
            nonce=nonce,
            code_count=count,
            ciphertext=payload[HEADER.size : body_end],
            checksum=checksum,
        )


def key_plaintext(plane: SpatialPlane) -> bytes:
    """Ascending u64 Szudzik codes of the plane."""
    return plane.codes_array().astype("<u8").tobytes()


def derive_nonce(plaintext: bytes, secret: int) -> int:
    """Deterministic nonce: keyed BLAKE2b of the plaintext."""
    digest = hashlib.blake2b(
        plaintext, digest_size=8, key=(secret & MASK64).to_bytes(8, "little")
    ).digest()
    return int.from_bytes(digest, "little")


def encode_key(
    plane: SpatialPlane, secret: int, nonce: int | None = None, cipher_id: int = 1
) -> KeyFile:
    """Encrypt a plane into key file contents.

    Args:
        plane: Non-empty true-event plane
        secret: 64-bit secret
        nonce: Explicit nonce; derived from plaintext and secret when omitted
        cipher_id: Registered cipher to use

    Returns:
        KeyFile ready to serialize

    Raises:
        EmptyStreamError: If the plane is empty
    """
    if len(plane) == 0:
        raise EmptyStreamError("Cannot write a key for an empty plane")
    if cipher_id not in CIPHERS:
        raise CorruptKeyError(f"Unknown cipher id {cipher_id}")
    plaintext = key_plaintext(plane)
    nonce = derive_nonce(plaintext, secret) if nonce is None else nonce & MASK64
    ciphertext = CIPHERS[cipher_id].encrypt(plaintext, secret & MASK64, nonce)
    header = HEADER.pack(MAGIC, cipher_id, nonce, len(plane))
    return KeyFile(
        cipher_id=cipher_id,
        nonce=nonce,
        code_count=len(plane),
        ciphertext=ciphertext,
        checksum=zlib.crc32(header + ciphertext),
    )


def decode_key(key: KeyFile, secret: int) -> SpatialPlane:
    """Decrypt key contents back into a plane.

    Raises:
        CorruptKeyError: If the cipher id is unknown
        WrongSecretError: If the decrypted codes are out of range or not strictly increasing
    """
    cipher = CIPHERS.get(key.cipher_id)
    if cipher is None:
        raise CorruptKeyError(f"Unknown cipher id {key.cipher_id}")
    plaintext = cipher.decrypt(key.ciphertext, secret & MASK64, key.nonce)
    codes = np.frombuffer(plaintext, dtype="<u8")
    if len(codes) and int(codes.max()) > MAX_CODE:
        raise WrongSecretError("Key decoded to out-of-range codes; wrong secret?")
    if len(codes) > 1 and not bool((np.diff(codes.astype(np.int64)) > 0).all()):
        raise WrongSecretError("Key decoded to unsorted codes; wrong secret?")
    return SpatialPlane(codes=codes.astype(np.int64).tolist())


def write_key(
    plane: SpatialPlane, secret: int, path: str | Path, nonce: int | None = None
) -> KeyFile:
    """Encrypt ``plane`` with ``secret`` and write it to ``path``."""
    key = encode_key(plane, secret, nonce=nonce)
    atomic_write_bytes(path, key.to_bytes())
    logger.info("Wrote key with %d codes to %s", key.code_count, path)
    return key


def read_key(path: str | Path, secret: int) -> SpatialPlane:
    """Read and decrypt a key file.

    Raises:
        CorruptKeyError: If the file is unreadable or fails its checksum
        WrongSecretError: If ``secret`` does not match
    """
    path = Path(path)
    try:
        payload = path.read_bytes()
    except OSError as e:
        raise CorruptKeyError(f"Cannot read key {path}: {e.strerror}") from e
    return decode_key(KeyFile.from_bytes(payload), secret)
