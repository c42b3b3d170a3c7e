"""Low-level bit kernels shared by the symbolic and scanning code.

Conventions used everywhere in this package:

* a binary word ``w_0 w_1 ... w_{n-1}`` is encoded as the integer
  ``sum(w_i << i)`` (symbol 0 in the least significant bit),
* orbits are packed little-index-first into 64-bit limbs, so the window
  of length <= 64 starting at position ``i`` is read with a shift/mask,
* the common-prefix length of two windows is the number of equal low
  bits of their codes, i.e. the count of trailing zeros of the XOR.
"""

from __future__ import annotations

import numpy as np

U64 = np.uint64
MASK64 = np.uint64(0xFFFFFFFFFFFFFFFF)


def mask(n: int) -> int:
    """Bit mask for an n-bit word (n <= 64)."""
    return (1 << n) - 1


def pack_bits(bits: np.ndarray) -> np.ndarray:
    """Pack a 0/1 uint8 array into little-index-first uint64 limbs.

    One zero limb is appended so that unaligned 64-bit window reads never
    run off the end.
    """
    bits = np.ascontiguousarray(bits, dtype=np.uint8)
    packed = np.packbits(bits, bitorder="little")
    n_limbs = (len(bits) + 63) // 64 + 1
    buf = np.zeros(n_limbs * 8, dtype=np.uint8)
    buf[: len(packed)] = packed
    return buf.view(np.uint64)


def unpack_bits(limbs: np.ndarray, length: int) -> np.ndarray:
    """Inverse of :func:`pack_bits`; returns a uint8 array of 0/1."""
    return np.unpackbits(limbs.view(np.uint8), count=length, bitorder="little")


def extract_codes(limbs: np.ndarray, positions: np.ndarray) -> np.ndarray:
    """64-bit window codes starting at the given bit positions.

    Reads may touch the limb after the last data limb, which is why
    :func:`pack_bits` pads with one extra zero limb.
    """
    pos = positions.astype(np.int64, copy=False)
    idx = pos >> 6
    sh = (pos & 63).astype(np.uint64)
    lo = limbs[idx] >> sh
    hi = limbs[idx + 1] << ((np.uint64(64) - sh) & np.uint64(63))
    return np.where(sh == 0, lo, lo | hi)


def trailing_zeros64(x: np.ndarray) -> np.ndarray:
    """Vectorized count of trailing zero bits; 64 for x == 0."""
    isolated = x & (~x + np.uint64(1))
    cnt = np.bitwise_count(isolated - np.uint64(1))
    return np.where(x == 0, np.uint64(64), cnt.astype(np.uint64))


def bit_reverse(code: int, n: int) -> int:
    """Reverse the low n bits of an integer (symbol order <-> rank order)."""
    r = 0
    for i in range(n):
        r = (r << 1) | ((code >> i) & 1)
    return r
