"""Shared public-coin source with hierarchical derivation.

Every party in a protocol run holds the same master seed, so any party can
regenerate any stream from its derivation path alone; nothing about the
coins ever needs to be communicated.  Child sources are derived by keyed
BLAKE2b over the label, giving independent-behaving streams per label, and
each source's bit stream comes from a counter-based Philox generator keyed
by the 128-bit derived key (reproducible and safe to fan out across
workers).

Derivation label layout used by the protocols (both parties must follow it
byte for byte so their streams agree):

    trial/<t>/input                        harness input sampling
    trial/<t>/p/hd0, trial/<t>/p/hd1       threshold checks of the full protocol
    trial/<t>/p/pk/<side>/partition        side in {main, tilde}
    trial/<t>/p/pk/<side>/hd/<j>           one child per distance threshold j
    trial/<t>/pk/main/...                  standalone promise-protocol runs

Per-block and per-repetition values are drawn as arrays from the
per-threshold child (blocks are slices of one position-indexed array), so
the streams stay bit-identical between parties without a derivation per
block.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from math import ceil, log2
from typing import Tuple

import numpy as np

_PERSON = b"xorsmp.coins.v1"


class CoinSource:
    """A value-semantics handle on one deterministic random stream.

    Equal (seed, path) means an identical stream: ``generator()`` always
    starts at position zero, so derive a fresh child for every distinct
    purpose instead of drawing twice from one source.
    """

    __slots__ = ("key", "path")

    def __init__(self, key: bytes, path: Tuple[str, ...] = ()):
        if len(key) != 32:
            raise ValueError("key must be 32 bytes")
        object.__setattr__(self, "key", key)
        object.__setattr__(self, "path", path)

    def __setattr__(self, name, val):  # pragma: no cover
        raise AttributeError("CoinSource is immutable")

    @classmethod
    def from_seed(cls, seed: int) -> "CoinSource":
        if not 0 <= seed < 1 << 64:
            raise ValueError("seed must be an unsigned 64-bit integer")
        key = hashlib.blake2b(
            seed.to_bytes(8, "little"), digest_size=32, person=_PERSON
        ).digest()
        return cls(key, ())

    def derive(self, label: str) -> "CoinSource":
        """Deterministic child stream; distinct labels give distinct streams."""
        key = hashlib.blake2b(
            label.encode("utf-8"), digest_size=32, key=self.key
        ).digest()
        return CoinSource(key, self.path + (label,))

    def generator(self) -> np.random.Generator:
        """A Philox generator keyed by this source, positioned at stream start."""
        return np.random.Generator(
            np.random.Philox(key=int.from_bytes(self.key[:16], "little"))
        )

    def bit_array(self, shape) -> np.ndarray:
        """Fresh uniform 0/1 array of the given shape (one-shot helper)."""
        n = int(np.prod(shape)) if shape else 1
        raw = self.generator().integers(0, 256, size=(n + 7) // 8, dtype=np.uint8)
        return np.unpackbits(raw, count=n, bitorder="little").reshape(shape)

    def __eq__(self, other) -> bool:
        return isinstance(other, CoinSource) and self.key == other.key

    def __hash__(self) -> int:
        return hash(self.key)

    def __repr__(self) -> str:
        return f"CoinSource({'/'.join(self.path) or '<root>'})"


@dataclass(frozen=True, eq=False)
class Partition:
    """A random assignment of [n] positions to k blocks (blocks may be empty)."""

    n: int
    k: int
    block_of: np.ndarray  # shape (n,), entries in [0, k)

    def positions_of(self, block: int) -> np.ndarray:
        return np.nonzero(self.block_of == block)[0]

    def block_sizes(self) -> np.ndarray:
        return np.bincount(self.block_of, minlength=self.k)


def sample_partition(n: int, k: int, coins: CoinSource) -> Partition:
    """Each position lands in one of k blocks, independently and uniformly."""
    if k < 1:
        raise ValueError(f"block count must be positive, got {k}")
    block_of = coins.generator().integers(0, k, size=n, dtype=np.int64)
    return Partition(n=n, k=k, block_of=block_of)


def c_of_k(k: int) -> int:
    """Per-block cap on differing positions for a k-block partition.

    Evaluates ceil(4*log2(k)/log2(log2(k))), clamped to k.  Below k = 4 the
    inner logarithm is nonpositive or undefined, and a block can never hold
    more than k differing positions anyway, so the cap is k itself there.
    """
    if k < 1:
        raise ValueError(f"k must be positive, got {k}")
    if k < 4:
        return k
    return min(k, ceil(4.0 * log2(k) / log2(log2(k))))


__all__ = ["CoinSource", "Partition", "sample_partition", "c_of_k"]
