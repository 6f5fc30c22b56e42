"""Counter-based uniforms keyed by (seed, sample, edge).

Each variate is a pure function of its key, so any subset of edges can be
drawn in any order or on any worker and still agree bit for bit.  The mixer
is the splitmix64 finalizer applied to a key/counter combination.
"""

from __future__ import annotations

import numpy as np

MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15
_M1 = 0xBF58476D1CE4E5B9
_M2 = 0x94D049BB133111EB
_EDGE_SALT = 0xD1B54A32D192ED03


def _mix_int(z: int) -> int:
    z = (z + _GOLDEN) & MASK64
    z = ((z ^ (z >> 30)) * _M1) & MASK64
    z = ((z ^ (z >> 27)) * _M2) & MASK64
    return z ^ (z >> 31)


def _mix(z: np.ndarray) -> np.ndarray:
    z = z + np.uint64(_GOLDEN)
    z = (z ^ (z >> np.uint64(30))) * np.uint64(_M1)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(_M2)
    return z ^ (z >> np.uint64(31))


def stream_key(seed: int, sample: int) -> int:
    """64-bit key of one sample's stream."""
    return _mix_int((_mix_int(seed & MASK64) + (sample & MASK64)) & MASK64)


def uniform_scalar(seed: int, sample: int, counter: int) -> float:
    """Pure-Python reference for :func:`uniforms`."""
    key = stream_key(seed, sample)
    z = _mix_int(key ^ _mix_int((counter * _EDGE_SALT) & MASK64))
    return (z >> 11) * 2.0**-53


def uniforms(seed: int, sample: int, counters) -> np.ndarray:
    """Uniform [0, 1) variates for the given counters (e.g. edge ids) of one sample."""
    c = np.asarray(counters, dtype=np.uint64)
    key = np.uint64(stream_key(seed, sample))
    with np.errstate(over="ignore"):
        z = _mix(key ^ _mix(c * np.uint64(_EDGE_SALT)))
    return (z >> np.uint64(11)).astype(np.float64) * 2.0**-53
