"""Fixed-length bit vectors with packed storage and Hamming arithmetic.

Vectors are immutable; position 0 is the least significant bit of the
backing integer, so XOR and population count run at machine-word speed
regardless of length.
"""

from __future__ import annotations

from typing import Tuple

import numpy as np

from .coins import CoinSource


class BitVector:
    """An immutable bit string of fixed length."""

    __slots__ = ("length", "value")

    def __init__(self, length: int, value: int):
        if length < 0:
            raise ValueError(f"length must be nonnegative, got {length}")
        if value < 0 or value >> length:
            raise ValueError(f"value does not fit in {length} bits")
        object.__setattr__(self, "length", length)
        object.__setattr__(self, "value", value)

    def __setattr__(self, name, val):  # pragma: no cover
        raise AttributeError("BitVector is immutable")

    @classmethod
    def zeros(cls, length: int) -> "BitVector":
        return cls(length, 0)

    @classmethod
    def from_bits(cls, bits: str) -> "BitVector":
        """Parse a left-to-right bit string, position 0 first."""
        if bits.strip("01"):
            raise ValueError("bit string must contain only 0/1")
        value = 0
        for i, ch in enumerate(bits):
            if ch == "1":
                value |= 1 << i
        return cls(len(bits), value)

    @classmethod
    def from_array(cls, arr: np.ndarray) -> "BitVector":
        packed = np.packbits(arr.astype(np.uint8), bitorder="little")
        return cls(len(arr), int.from_bytes(packed.tobytes(), "little"))

    @classmethod
    def random(cls, length: int, coins: CoinSource) -> "BitVector":
        nbytes = (length + 7) // 8
        raw = coins.generator().integers(0, 256, size=nbytes, dtype=np.uint8)
        value = int.from_bytes(raw.tobytes(), "little")
        return cls(length, value & ((1 << length) - 1) if length else 0)

    def bit(self, i: int) -> int:
        if not 0 <= i < self.length:
            raise IndexError(f"position {i} out of range for length {self.length}")
        return (self.value >> i) & 1

    def weight(self) -> int:
        return self.value.bit_count()

    def to_array(self) -> np.ndarray:
        """Expand to a uint8 array of 0/1 values, index = position."""
        nbytes = (self.length + 7) // 8
        raw = np.frombuffer(self.value.to_bytes(nbytes, "little"), dtype=np.uint8)
        return np.unpackbits(raw, count=self.length, bitorder="little")

    def ones(self) -> np.ndarray:
        """Positions holding a 1, ascending."""
        return np.nonzero(self.to_array())[0]

    def __xor__(self, other: "BitVector") -> "BitVector":
        if self.length != other.length:
            raise ValueError(f"length mismatch: {self.length} != {other.length}")
        return BitVector(self.length, self.value ^ other.value)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, BitVector)
            and self.length == other.length
            and self.value == other.value
        )

    def __hash__(self) -> int:
        return hash((self.length, self.value))

    def __len__(self) -> int:
        return self.length

    def __repr__(self) -> str:
        if self.length <= 64:
            body = "".join(str(self.bit(i)) for i in range(self.length))
        else:
            body = f"<{self.length} bits, weight {self.weight()}>"
        return f"BitVector({body})"


def hamming_distance(x: BitVector, y: BitVector) -> int:
    """Number of positions where x and y differ."""
    if x.length != y.length:
        raise ValueError(f"length mismatch: {x.length} != {y.length}")
    return (x.value ^ y.value).bit_count()


def parity(x: BitVector) -> int:
    """Hamming weight of x, mod 2."""
    return x.value.bit_count() & 1


def complement(x: BitVector) -> BitVector:
    """Flip every bit."""
    mask = (1 << x.length) - 1
    return BitVector(x.length, x.value ^ mask)


def sample_weight_vector(n: int, w: int, coins: CoinSource) -> BitVector:
    """Uniform vector of length n with exactly w ones."""
    if not 0 <= w <= n:
        raise ValueError(f"weight {w} out of range [0, {n}]")
    if w == 0:
        return BitVector.zeros(n)
    positions = coins.generator().permutation(n)[:w]
    value = 0
    for p in positions:
        value |= 1 << int(p)
    return BitVector(n, value)


def sample_pair_with_distance(
    n: int, w: int, coins: CoinSource
) -> Tuple[BitVector, BitVector]:
    """A uniform x and a y at exact Hamming distance w from it.

    x is uniform over all length-n vectors and y = x XOR z for z uniform
    over the weight-w vectors, so the pair hits the requested distance on
    every sample.
    """
    if not 0 <= w <= n:
        raise ValueError(f"distance {w} out of range [0, {n}]")
    x = BitVector.random(n, coins.derive("x"))
    z = sample_weight_vector(n, w, coins.derive("z"))
    return x, x ^ z


__all__ = [
    "BitVector",
    "hamming_distance",
    "parity",
    "complement",
    "sample_weight_vector",
    "sample_pair_with_distance",
]
