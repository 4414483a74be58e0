"""Counter-based random streams for reproducible, splittable quadrature.

Every stochastic routine in the package draws from a Philox4x64 generator
keyed by ``(seed, stream_id)``.  Philox is counter-based: a stream is a pure
function of its 128-bit key and 256-bit counter, so shards indexed by
``stream_id`` are statistically independent, reproducible bit-for-bit across
runs and platforms, and independent of how work is scheduled.

Stream ids are derived from string tags with FNV-1a so that callers can name
streams ("ball", "sphere", "multistart", ...) without coordinating integer
ranges.
"""

import numpy as np

_FNV_OFFSET = 0xCBF29CE484222325
_FNV_PRIME = 0x100000001B3
_MASK64 = 0xFFFFFFFFFFFFFFFF


def stream_id(*tags) -> int:
    """FNV-1a hash of the tag tuple, folded to 64 bits."""
    acc = _FNV_OFFSET
    for tag in tags:
        data = str(tag).encode("utf-8") + b"\x1f"
        for byte in data:
            acc = ((acc ^ byte) * _FNV_PRIME) & _MASK64
    return acc


def stream(seed: int, *tags) -> np.random.Generator:
    """Generator for the Philox stream keyed by (seed, FNV(tags))."""
    key = np.array([np.uint64(seed & _MASK64), np.uint64(stream_id(*tags))], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))
