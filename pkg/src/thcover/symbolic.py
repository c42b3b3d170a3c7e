"""Binary words, cylinders, packed orbits and the projection to the circle."""

from __future__ import annotations

import struct
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Sequence

import numpy as np

from .bits import bit_reverse, extract_codes, mask, pack_bits, unpack_bits

ORBIT_MAGIC = b"THCV"
ORBIT_VERSION = 1


@dataclass(frozen=True)
class Word:
    """A finite binary word; identifies the cylinder of sequences starting with it."""

    bits: tuple[int, ...]

    def __post_init__(self):
        bits = tuple(int(b) for b in self.bits)  # numpy scalars would overflow shifts
        if any(b not in (0, 1) for b in bits):
            raise ValueError("word symbols must be 0 or 1")
        object.__setattr__(self, "bits", bits)

    @classmethod
    def from_string(cls, s: str) -> "Word":
        return cls(tuple(int(c) for c in s.strip()))

    @classmethod
    def from_code(cls, code: int, n: int) -> "Word":
        """Word from its packed code (symbol i in bit i)."""
        return cls(tuple((code >> i) & 1 for i in range(n)))

    @classmethod
    def from_lex_rank(cls, rank: int, n: int) -> "Word":
        """Word from its rank in lexicographic order on n-words."""
        return cls(tuple((rank >> (n - 1 - i)) & 1 for i in range(n)))

    @property
    def n(self) -> int:
        return len(self.bits)

    @property
    def code(self) -> int:
        """Packed integer form: symbol i in bit i."""
        c = 0
        for i, b in enumerate(self.bits):
            c |= b << i
        return c

    @property
    def lex_rank(self) -> int:
        """Position of this word in lexicographic order on words of its length."""
        return bit_reverse(self.code, self.n)

    def __str__(self) -> str:
        return "".join(str(b) for b in self.bits)

    def __len__(self) -> int:
        return len(self.bits)

    def __add__(self, other: "Word") -> "Word":
        return Word(self.bits + other.bits)

    def prefix(self, k: int) -> "Word":
        return Word(self.bits[:k])

    def to_array(self) -> np.ndarray:
        return np.array(self.bits, dtype=np.uint8)


@dataclass(frozen=True)
class CirclePoint:
    """A point of the unit circle R/Z, kept as an exact rational when possible."""

    value: Fraction

    def __post_init__(self):
        object.__setattr__(self, "value", Fraction(self.value) % 1)

    def __float__(self) -> float:
        return float(self.value)

    def distance(self, other: "CirclePoint") -> float:
        d = abs(self.value - other.value)
        return float(min(d, 1 - d))

    def doubled(self) -> "CirclePoint":
        return CirclePoint(2 * self.value)


def project_to_circle(word: Word | Sequence[int], cycle: Sequence[int] | None = None) -> CirclePoint:
    """Dyadic-expansion projection of a word (padded with zeros) to the circle.

    With ``cycle`` given, the input is the eventually periodic sequence
    ``word . cycle cycle ...``; the value is computed exactly in rational
    arithmetic, so e.g. the expansion 010101... comes out as exactly 1/3.
    """
    bits = word.bits if isinstance(word, Word) else tuple(word)
    head = sum(Fraction(b, 2 ** (i + 1)) for i, b in enumerate(bits))
    if cycle:
        p = len(cycle)
        block = sum(Fraction(b, 2 ** (i + 1)) for i, b in enumerate(cycle))
        tail = block / (1 - Fraction(1, 2**p))
        head += tail / 2 ** len(bits)
    return CirclePoint(head)


def neighbor_cylinders(w: Word, wrap: bool = True) -> tuple[Word | None, Word | None]:
    """Predecessor and successor of w in lexicographic order on n-words.

    By default the order wraps cyclically mod 2**n, matching the circle
    topology where the cylinder after 1...1 is 0...0.  With ``wrap=False``
    the missing neighbor at either end is returned as None.
    """
    if w.n < 1:
        raise ValueError("neighbors need a nonempty word")
    size = 1 << w.n
    r = w.lex_rank
    if wrap:
        pred = Word.from_lex_rank((r - 1) % size, w.n)
        succ = Word.from_lex_rank((r + 1) % size, w.n)
        return pred, succ
    pred = Word.from_lex_rank(r - 1, w.n) if r > 0 else None
    succ = Word.from_lex_rank(r + 1, w.n) if r + 1 < size else None
    return pred, succ


class Orbit:
    """An immutable bit-packed sample path of the binary shift."""

    def __init__(self, limbs: np.ndarray, length: int, meta: dict | None = None):
        if length < 0:
            raise ValueError("negative orbit length")
        self.limbs = limbs
        self.length = int(length)
        self.meta = dict(meta or {})
        self.limbs.setflags(write=False)

    @classmethod
    def from_bits(cls, bits: Iterable[int], meta: dict | None = None) -> "Orbit":
        arr = np.fromiter((int(b) for b in bits), dtype=np.uint8)
        return cls(pack_bits(arr), len(arr), meta)

    @classmethod
    def from_string(cls, s: str, meta: dict | None = None) -> "Orbit":
        return cls.from_bits((int(c) for c in s.strip()), meta)

    def __len__(self) -> int:
        return self.length

    def symbol(self, i: int) -> int:
        if not 0 <= i < self.length:
            raise IndexError("orbit index out of range")
        return int((self.limbs[i >> 6] >> np.uint64(i & 63)) & np.uint64(1))

    def to_bits(self) -> np.ndarray:
        return unpack_bits(self.limbs, self.length)

    def window_code(self, i: int, n: int) -> int:
        """Packed code of the length-n window at position i (n <= 64)."""
        if n > 64:
            raise ValueError("packed windows support n <= 64")
        if i < 0 or i + n > self.length:
            raise IndexError("window out of range")
        code = extract_codes(self.limbs, np.array([i], dtype=np.int64))[0]
        return int(code) & mask(n)

    def window(self, i: int, n: int) -> Word:
        if n <= 64:
            return Word.from_code(self.window_code(i, n), n)
        return Word(tuple(int(b) for b in self.to_bits()[i : i + n]))

    def windows(self, n: int) -> Iterator[tuple[int, Word]]:
        """Yield (i, window word) for i = 0 .. length - n."""
        if n > self.length:
            return
        for i in range(self.length - n + 1):
            yield i, self.window(i, n)

    def window_codes(self, n: int, start: int, stop: int) -> np.ndarray:
        """Vectorized n-bit window codes for positions start..stop-1 (n <= 64)."""
        if n > 64:
            raise ValueError("packed windows support n <= 64")
        stop = min(stop, self.length - n + 1)
        if stop <= start:
            return np.empty(0, dtype=np.uint64)
        pos = np.arange(start, stop, dtype=np.int64)
        codes = extract_codes(self.limbs, pos)
        return codes & np.uint64(mask(n)) if n < 64 else codes

    def project(self, i: int = 0) -> CirclePoint:
        """Circle point with dyadic expansion given by the orbit from position i."""
        tail = [self.symbol(j) for j in range(i, min(i + 200, self.length))]
        return project_to_circle(Word(tuple(tail)))

    # --- file formats -----------------------------------------------------

    def write_binary(self, path) -> None:
        header = ORBIT_MAGIC + struct.pack("<IQ", ORBIT_VERSION, self.length)
        n_data_limbs = (self.length + 63) // 64
        with open(path, "wb") as f:
            f.write(header)
            f.write(self.limbs[:n_data_limbs].tobytes())

    @classmethod
    def read_binary(cls, path) -> "Orbit":
        with open(path, "rb") as f:
            header = f.read(16)
            if len(header) != 16 or header[:4] != ORBIT_MAGIC:
                raise ValueError(f"not an orbit file: {path}")
            version, length = struct.unpack("<IQ", header[4:])
            if version != ORBIT_VERSION:
                raise ValueError(f"unsupported orbit file version {version}")
            n_data_limbs = (length + 63) // 64
            raw = np.frombuffer(f.read(n_data_limbs * 8), dtype=np.uint64)
            if len(raw) != n_data_limbs:
                raise ValueError("truncated orbit file")
        limbs = np.zeros(n_data_limbs + 1, dtype=np.uint64)
        limbs[:n_data_limbs] = raw
        return cls(limbs, length)

    def write_text(self, path) -> None:
        with open(path, "w") as f:
            f.write("".join(str(b) for b in self.to_bits()))
            f.write("\n")

    @classmethod
    def read_text(cls, path) -> "Orbit":
        with open(path) as f:
            return cls.from_string(f.read())
