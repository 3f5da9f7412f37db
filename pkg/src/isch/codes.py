"""Packed binary codes: n codes of m bits stored as little-endian 64-bit words.

Bit j of a code lives at bit (j mod 64) of word j // 64 (bit 0 = least
significant). Pad bits past m are always zero.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


def words_per_code(m: int) -> int:
    return (m + 63) // 64


@dataclass
class BinaryCodeSet:
    m: int
    words: np.ndarray  # (n, words_per_code(m)) uint64

    def __post_init__(self):
        self.words = np.ascontiguousarray(self.words, dtype=np.uint64)
        if self.words.ndim != 2 or self.words.shape[1] != words_per_code(self.m):
            raise ValueError("word array shape inconsistent with code length")

    @property
    def n(self) -> int:
        return self.words.shape[0]

    @classmethod
    def from_bits(cls, bits: np.ndarray) -> "BinaryCodeSet":
        """Pack an (n, m) array of {0,1} values."""
        bits = np.asarray(bits)
        if bits.ndim != 2:
            raise ValueError("expected an (n, m) bit array")
        n, m = bits.shape
        packed = np.packbits(bits.astype(np.uint8), axis=1, bitorder="little")
        buf = np.zeros((n, words_per_code(m) * 8), dtype=np.uint8)
        buf[:, : packed.shape[1]] = packed
        return cls(m=m, words=buf.view("<u8"))

    def to_bits(self) -> np.ndarray:
        """Unpack to an (n, m) uint8 array of {0,1}."""
        raw = self.words.astype("<u8", copy=False).view(np.uint8)
        return np.unpackbits(raw, axis=1, bitorder="little")[:, : self.m]
