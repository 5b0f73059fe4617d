"""Row sets as Python ints: bit ``i`` is set iff row ``i`` is in the set."""

from __future__ import annotations

import numpy as np


def from_bool(mask) -> int:
    arr = np.asarray(mask, dtype=bool).ravel()
    if arr.size == 0:
        return 0
    return int.from_bytes(np.packbits(arr, bitorder="little").tobytes(), "little")


def to_bool(bits: int, n: int) -> np.ndarray:
    if n == 0:
        return np.zeros(0, dtype=bool)
    raw = bits.to_bytes((n + 7) // 8, "little")
    return np.unpackbits(np.frombuffer(raw, dtype=np.uint8), bitorder="little")[:n].astype(bool)


def full(n: int) -> int:
    return (1 << n) - 1


def take(bits: int, rows: np.ndarray, n: int) -> int:
    """Bitset of the sub-sample ``rows`` (new row ``k`` is old row ``rows[k]``)."""
    return from_bool(to_bool(bits, n)[rows])


def popcount(bits: int) -> int:
    return bits.bit_count()
