"""Counter-based random streams for slot selection.

Every random word is a pure function of ``(seed, window, station, attempt)``,
so a trial's outcome does not depend on the order in which stations are
visited or on how trials are spread across workers.  The mixing function is
the splitmix64 finalizer applied to a keyed counter.
"""

from __future__ import annotations

import numpy as np

MASK64 = (1 << 64) - 1

_GOLDEN = 0x9E3779B97F4A7C15
_STATION_MUL = 0xD1B54A32D192ED03
_ATTEMPT_MUL = 0x8CB92BA72F3D8DD7

_U32 = np.uint64(0xFFFFFFFF)
_SHIFT32 = np.uint64(32)


def mix64(x: int) -> int:
    """splitmix64 finalizer on a Python int."""
    x &= MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & MASK64
    return x ^ (x >> 31)


def _mix64_array(x: np.ndarray) -> np.ndarray:
    x = x ^ (x >> np.uint64(30))
    x = x * np.uint64(0xBF58476D1CE4E5B9)
    x = x ^ (x >> np.uint64(27))
    x = x * np.uint64(0x94D049BB133111EB)
    return x ^ (x >> np.uint64(31))


def derive_seed(*parts: int) -> int:
    """Fold integers into one 64-bit seed.

    Used for per-trial seed layout; ``derive_seed(master, a, n, t)`` never
    depends on how many other trials exist.
    """
    h = 0
    for p in parts:
        h = mix64(h + _GOLDEN + (int(p) & MASK64))
    return h


def window_key(seed: int, window: int) -> int:
    return mix64((seed & MASK64) ^ mix64((window + 1) * _GOLDEN))


def station_words(seed: int, window: int, stations: np.ndarray, attempt: int = 0) -> np.ndarray:
    """64-bit random words for each station id in ``stations``."""
    key = np.uint64(window_key(seed, window))
    salt = np.uint64((attempt * _ATTEMPT_MUL) & MASK64)
    s = stations.astype(np.uint64, copy=False)
    return _mix64_array(key ^ (s * np.uint64(_STATION_MUL) + salt))


def uniform_slots(seed: int, window: int, stations: np.ndarray, size: int) -> np.ndarray:
    """Unbiased slot choice in ``[0, size)`` for each station.

    Lemire's multiply-shift with rejection on 32-bit halves of each word.
    A rejected upper half falls back to the lower half, then to fresh words
    with a bumped attempt counter.
    """
    if not 1 <= size <= 0xFFFFFFFF:
        raise ValueError(f"window size out of range: {size}")
    stations = np.asarray(stations, dtype=np.int64)
    out = np.empty(stations.shape[0], dtype=np.int64)
    if size == 1:
        out.fill(0)
        return out
    w = np.uint64(size)
    threshold = np.uint64(((1 << 32) - size) % size)
    pending = np.arange(stations.shape[0])
    attempt = 0
    while pending.size:
        words = station_words(seed, window, stations[pending], attempt)
        for upper in (True, False):
            half = words >> _SHIFT32 if upper else words & _U32
            m = half * w
            ok = (m & _U32) >= threshold
            out[pending[ok]] = (m[ok] >> _SHIFT32).astype(np.int64)
            pending = pending[~ok]
            words = words[~ok]
            if not pending.size:
                break
        attempt += 1
    return out
