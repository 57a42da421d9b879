# pyre-strict
"""SplitMix64 generator, scalar and vectorized.

SplitMix64 is counter based: output ``k`` (0-based) is ``mix(seed + (k + 1) * GAMMA)``,
so any block of outputs can be computed directly with numpy.
"""

import numpy as np
import numpy.typing as npt

MASK64 = (1 << 64) - 1
GAMMA = 0x9E3779B97F4A7C15
_MUL1 = 0xBF58476D1CE4E5B9
_MUL2 = 0x94D049BB133111EB


def _mix(z: int) -> int:
    z = ((z ^ (z >> 30)) * _MUL1) & MASK64
    z = ((z ^ (z >> 27)) * _MUL2) & MASK64
    return z ^ (z >> 31)


class SplitMix64:
    """Scalar SplitMix64 stream.

    Example:
        >>> rng = SplitMix64(0)
        >>> hex(rng.next())
        '0xe220a8397b1dcdaf'
    """

    def __init__(self, seed: int) -> None:
        self._state = seed & MASK64

    def next(self) -> int:
        self._state = (self._state + GAMMA) & MASK64
        return _mix(self._state)

    def next_sign(self) -> int:
        """Draw a polarity in {-1, +1} from the top output bit."""
        return 1 if self.next() >> 63 else -1


def splitmix64_block(seed: int, start: int, count: int) -> npt.NDArray[np.uint64]:
    """Outputs ``start .. start + count - 1`` of the stream seeded with ``seed``.

    Args:
        seed: 64-bit seed (taken modulo 2**64)
        start: Index of the first output
        count: Number of outputs

    Returns:
        uint64 array, identical to ``count`` successive ``SplitMix64.next()`` calls
        after skipping ``start`` outputs
    """
    if count <= 0:
        return np.zeros(0, dtype=np.uint64)
    with np.errstate(over="ignore"):
        k = np.arange(start + 1, start + count + 1, dtype=np.uint64)
        z = np.uint64(seed & MASK64) + k * np.uint64(GAMMA)
        z = (z ^ (z >> np.uint64(30))) * np.uint64(_MUL1)
        z = (z ^ (z >> np.uint64(27))) * np.uint64(_MUL2)
        return z ^ (z >> np.uint64(31))


def sign_block(seed: int, start: int, count: int) -> npt.NDArray[np.int8]:
    """Polarity draws matching ``SplitMix64.next_sign`` for a block of outputs."""
    bits = splitmix64_block(seed, start, count) >> np.uint64(63)
    return (bits.astype(np.int8) * 2 - 1).astype(np.int8)
