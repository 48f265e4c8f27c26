"""One-shot SMP sketches deciding "is the Hamming distance at most d?".

Three interchangeable strategies share one message interface:

* ``raw``      sends the input verbatim; the referee compares exactly.
                Zero error, linear cost; the oracle baseline.
* ``bucket``   hashes positions into B = max(16, 4d^2) buckets and sends
                the B bucket parities, repeated R times.  Simple, quadratic
                in d.
* ``syndrome`` sends, per repetition, the BCH syndrome of the bucket-parity
                vector plus a random linear fingerprint of it.  The referee
                XORs the two parties' syndromes, decodes the difference to a
                sparse vector, and uses the fingerprint XOR to reject bogus
                decodes.  Near-linear in d.

For bucket and syndrome every message segment is a GF(2)-linear function
of the sender's input, so the XOR of the two messages equals the same
function of x XOR y; all decisions are made on that difference.  Both
strategies only ever under-count distances (hash collisions cancel
parities in pairs), which makes the verdict one-sided: a true distance at
most d is never reported as GT unless a fingerprint or decode anomaly
fires, and those events are inside the error budget.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .bits import BitVector
from .coins import CoinSource
from .gf2 import BchCode, bch_code

STRATEGIES = ("raw", "bucket", "syndrome")


@dataclass(frozen=True)
class HDParams:
    """Configuration of one distance-threshold instance.

    Derived sizes are fixed functions of (d, epsilon, strategy, length):
    B = max(16, 4d^2) buckets; bucket repetitions R = ceil(4 ln(1/eps));
    syndrome repetitions R = ceil(log2(1/eps)) + 1 with
    f = ceil(log2(R/eps)) + 4 fingerprint rows.  d = 0 degenerates to a
    pure equality fingerprint of f = ceil(log2(1/eps)) + 4 rows over the
    raw input.
    """

    d: int
    epsilon: float
    strategy: str
    length: int

    def __post_init__(self):
        if self.strategy not in STRATEGIES:
            raise ValueError(f"unknown strategy {self.strategy!r}")
        if self.d < 0:
            raise ValueError("threshold must be nonnegative")
        if self.strategy != "raw" and not 0.0 < self.epsilon < 1.0:
            raise ValueError("error budget must lie in (0, 1)")

    @property
    def bucket_count(self) -> int:
        # Floor of 16: with 4d^2 = 4 buckets at d = 1, a weight-3 difference
        # collapses to weight <= 1 in 5 of 8 repetitions (odd weights cannot
        # spread over so few buckets), blowing the error budget for inputs
        # two above the threshold.
        if self.d == 0:
            return 1
        return max(16, 4 * self.d * self.d)

    @property
    def repetitions(self) -> int:
        if self.strategy == "raw" or self.d == 0:
            return 1
        if self.strategy == "bucket":
            return math.ceil(4.0 * math.log(1.0 / self.epsilon))
        return math.ceil(math.log2(1.0 / self.epsilon)) + 1

    @property
    def fingerprint_rows(self) -> int:
        if self.strategy == "raw":
            return 0
        if self.d == 0:
            return math.ceil(math.log2(1.0 / self.epsilon)) + 4
        if self.strategy == "bucket":
            return 0
        return math.ceil(math.log2(self.repetitions / self.epsilon)) + 4

    @property
    def code(self) -> Optional[BchCode]:
        if self.strategy == "syndrome" and self.d >= 1:
            return bch_code(self.bucket_count, self.d)
        return None

    @property
    def payload_bits(self) -> int:
        """Message length in bits; identical for both parties."""
        return self.payload_bits_for(self.length)

    def payload_bits_for(self, block_len: int) -> int:
        if self.strategy == "raw":
            return block_len
        if self.d == 0:
            return self.fingerprint_rows
        if self.strategy == "bucket":
            return self.repetitions * self.bucket_count
        code = self.code
        assert code is not None
        return self.repetitions * (code.redundancy + self.fingerprint_rows)


@dataclass(frozen=True, eq=False)
class HDShared:
    """Public-coin material for one instance: both parties hold the same copy.

    ``buckets`` maps (repetition, position) -> bucket; ``fmat`` holds the
    fingerprint matrix, (R, f, B) for syndrome or (f, length) for the d = 0
    equality test.  Drawn in a fixed order from one derived stream so that
    independent derivations by each party agree bit for bit.
    """

    params: HDParams
    buckets: Optional[np.ndarray]
    fmat: Optional[np.ndarray]
    fmat_f32: Optional[np.ndarray] = None


def hd_shared(params: HDParams, coins: CoinSource) -> HDShared:
    """Materialize the shared randomness of one instance from its coin child."""
    if params.strategy == "raw":
        return HDShared(params, None, None)
    gen = coins.generator()
    if params.d == 0:
        fmat = _draw_bits(gen, (params.fingerprint_rows, params.length))
        return HDShared(params, None, fmat)
    buckets = gen.integers(
        0, params.bucket_count, size=(params.repetitions, params.length),
        dtype=np.int64,
    )
    fmat = None
    fmat_f32 = None
    if params.strategy == "syndrome":
        fmat = _draw_bits(
            gen,
            (params.repetitions, params.fingerprint_rows, params.bucket_count),
        )
        fmat_f32 = fmat.astype(np.float32)
    return HDShared(params, buckets, fmat, fmat_f32)


def _draw_bits(gen: np.random.Generator, shape) -> np.ndarray:
    n = int(np.prod(shape))
    raw = gen.integers(0, 256, size=(n + 7) // 8, dtype=np.uint8)
    return np.unpackbits(raw, count=n, bitorder="little").reshape(shape)


@dataclass(frozen=True, eq=False)
class HDMessage:
    """One party's payload, plus a handle on the shared coins that shaped it.

    Wire layout (bit-exact, rep-major): syndrome repetitions are
    [syndrome bits][fingerprint bits]; bucket repetitions are the B bucket
    parities; raw is the input verbatim; d = 0 is the f fingerprint bits.
    """

    shared: HDShared
    raw_bits: Optional[np.ndarray] = None     # (length,)
    parities: Optional[np.ndarray] = None     # (R, B)
    syndromes: Optional[np.ndarray] = None    # (R, redundancy)
    fingerprints: Optional[np.ndarray] = None # (R, f) or (f,) for d = 0

    def payload(self) -> np.ndarray:
        params = self.shared.params
        if params.strategy == "raw":
            return self.raw_bits
        if params.d == 0:
            return self.fingerprints
        if params.strategy == "bucket":
            return self.parities.reshape(-1)
        return np.concatenate([self.syndromes, self.fingerprints], axis=1).reshape(-1)

    @property
    def bit_length(self) -> int:
        return int(self.payload().size)


@dataclass(frozen=True)
class HDVerdict:
    le: bool               # the protocol's claim: distance <= d
    estimate: int          # best distance estimate backing the claim


def _bucket_parities(shared: HDShared, x: BitVector) -> np.ndarray:
    params = shared.params
    ones = x.ones()
    r_count, b_count = params.repetitions, params.bucket_count
    if ones.size == 0:
        return np.zeros((r_count, b_count), dtype=np.uint8)
    flat = (
        np.arange(r_count, dtype=np.int64)[:, None] * b_count
        + shared.buckets[:, ones]
    )
    counts = np.bincount(flat.ravel(), minlength=r_count * b_count)
    return (counts & 1).astype(np.uint8).reshape(r_count, b_count)


def hd_encode(params: HDParams, x: BitVector, coins: CoinSource) -> HDMessage:
    """Build this party's message; identical coins on both sides required."""
    return hd_encode_shared(hd_shared(params, coins), x)


def hd_encode_shared(shared: HDShared, x: BitVector) -> HDMessage:
    params = shared.params
    if x.length != params.length:
        raise ValueError(f"input length {x.length}, instance expects {params.length}")
    if params.strategy == "raw":
        return HDMessage(shared, raw_bits=x.to_array())
    if params.d == 0:
        fp = _mod2(shared.fmat.astype(np.float32) @ x.to_array().astype(np.float32))
        return HDMessage(shared, fingerprints=fp)
    par = _bucket_parities(shared, x)
    if params.strategy == "bucket":
        return HDMessage(shared, parities=par)
    code = params.code
    par_f = par.astype(np.float32)
    synd = _mod2(par_f @ code.H_f32.T)
    fp = _mod2(np.matmul(shared.fmat_f32, par_f[:, :, None])[:, :, 0])
    return HDMessage(shared, parities=par, syndromes=synd, fingerprints=fp)


def _mod2(arr: np.ndarray) -> np.ndarray:
    return (arr.astype(np.int64) & 1).astype(np.uint8)


def _fingerprint_of(fmat_rep: np.ndarray, positions: Tuple[int, ...]) -> np.ndarray:
    if not positions:
        return np.zeros(fmat_rep.shape[0], dtype=np.uint8)
    return np.bitwise_xor.reduce(fmat_rep[:, list(positions)], axis=1)


def _fingerprint_matches(
    fmat_rep: np.ndarray, positions: Tuple[int, ...], fpd: np.ndarray
) -> bool:
    w = len(positions)
    if w == 0:
        return not fpd.any()
    if w == 1:
        return bool((fmat_rep[:, positions[0]] == fpd).all())
    if w == 2:
        col = fmat_rep[:, positions[0]] ^ fmat_rep[:, positions[1]]
        return bool((col == fpd).all())
    return bool((_fingerprint_of(fmat_rep, positions) == fpd).all())


def hd_decide(params: HDParams, m_a: HDMessage, m_b: HDMessage) -> HDVerdict:
    """Referee's verdict from the two messages of one instance.

    Symmetric in its two message arguments.  Decode and fingerprint
    failures map to GT: above the threshold that is the right answer, and
    under the promise they are already inside the error budget.
    """
    if m_a.shared is not m_b.shared and m_a.shared.params != m_b.shared.params:
        raise ValueError("messages come from different instances")
    shared = m_a.shared
    if params.strategy == "raw":
        if m_a.raw_bits.size != m_b.raw_bits.size:
            raise ValueError("message length mismatch")
        dist = int((m_a.raw_bits ^ m_b.raw_bits).sum())
        return HDVerdict(le=dist <= params.d, estimate=dist)
    if params.d == 0:
        same = bool((m_a.fingerprints == m_b.fingerprints).all())
        return HDVerdict(le=same, estimate=0 if same else 1)
    if params.strategy == "bucket":
        diff = m_a.parities ^ m_b.parities
        estimate = int(diff.sum(axis=1).max())
        return HDVerdict(le=estimate <= params.d, estimate=estimate)
    code = params.code
    diffs = m_a.syndromes ^ m_b.syndromes
    fpd = m_a.fingerprints ^ m_b.fingerprints
    packed_rows = np.packbits(diffs, axis=1, bitorder="little")
    estimate = 0
    for rep in range(params.repetitions):
        packed = int.from_bytes(packed_rows[rep].tobytes(), "little")
        hit = code.decode_elements(code.elements_from_packed(packed)) if packed else ()
        if hit is None or not _fingerprint_matches(shared.fmat[rep], hit, fpd[rep]):
            return HDVerdict(le=False, estimate=params.d + 1)
        estimate = max(estimate, len(hit))
    return HDVerdict(le=True, estimate=estimate)


def find_threshold(h: Sequence[int]) -> int:
    """Binary search over verdict bits h[0..c], h[j] = 1 meaning LE at j.

    Assumes h is monotone nondecreasing and returns the smallest j with
    h[j] = 1; on non-monotone input (possible under sub-protocol errors)
    the landing index is returned as-is, always within [0, c].
    """
    lo, hi = 0, len(h) - 1
    while lo < hi:
        mid = (lo + hi) // 2
        if h[mid] == 1:
            hi = mid
        else:
            lo = mid + 1
    return lo


def threshold_search(c: int, verdict) -> Tuple[int, List[int]]:
    """find_threshold over lazily evaluated verdicts; returns (result, visited)."""
    visited: List[int] = []
    lo, hi = 0, c
    while lo < hi:
        mid = (lo + hi) // 2
        visited.append(mid)
        if verdict(mid):
            hi = mid
        else:
            lo = mid + 1
    return lo, visited


def exact_block_distance(
    msgs_a: Sequence[HDMessage], msgs_b: Sequence[HDMessage]
) -> int:
    """Distance of one block from its c + 1 threshold messages.

    Message j of each list must come from the threshold-j instance (shared
    coins on both sides).  Only the thresholds on the binary-search path
    are decided, at most ceil(log2(c + 1)) of them.
    """
    if len(msgs_a) != len(msgs_b) or not msgs_a:
        raise ValueError("need matching non-empty message lists")
    result, _ = threshold_search(
        len(msgs_a) - 1,
        lambda j: hd_decide(msgs_a[j].shared.params, msgs_a[j], msgs_b[j]).le,
    )
    return result


# Block-stacked variants: one threshold instance across all k blocks of a
# partition.  The bucket hash is drawn per global position (restricting a
# uniform hash on [n] to a block gives an independent uniform hash on the
# block) and the fingerprint matrices are shared across blocks, which
# leaves every per-block failure bound intact since the union bound over
# blocks never needed independence.


@dataclass(frozen=True, eq=False)
class BlockMessages:
    """One party's messages for one threshold across all blocks."""

    shared: HDShared
    k: int
    parities: Optional[np.ndarray] = None      # (R, k, B)
    syndromes: Optional[np.ndarray] = None     # (R, k, redundancy)
    fingerprints: Optional[np.ndarray] = None  # (R, k, f) or (k, f) for d = 0
    raw_sorted: Optional[np.ndarray] = None    # input bits grouped by block
    raw_bounds: Optional[np.ndarray] = None    # block i occupies [b[i], b[i+1])

    def block_payload(self, i: int) -> np.ndarray:
        params = self.shared.params
        if params.strategy == "raw":
            return self.raw_sorted[self.raw_bounds[i] : self.raw_bounds[i + 1]]
        if params.d == 0:
            return self.fingerprints[i]
        if params.strategy == "bucket":
            return self.parities[:, i, :].reshape(-1)
        return np.concatenate(
            [self.syndromes[:, i, :], self.fingerprints[:, i, :]], axis=1
        ).reshape(-1)

    @property
    def total_bits(self) -> int:
        params = self.shared.params
        if params.strategy == "raw":
            return int(self.raw_sorted.size)
        return self.k * params.payload_bits_for(0)


def encode_blocks(
    shared: HDShared,
    x_arr: np.ndarray,
    ones: np.ndarray,
    block_of: np.ndarray,
    k: int,
    sort_order: Optional[np.ndarray] = None,
    bounds: Optional[np.ndarray] = None,
) -> BlockMessages:
    """Encode one party's input restricted to every block of the partition."""
    params = shared.params
    if params.strategy == "raw":
        return BlockMessages(
            shared, k, raw_sorted=x_arr[sort_order], raw_bounds=bounds
        )
    if params.d == 0:
        fp = np.zeros((k, params.fingerprint_rows), dtype=np.int64)
        if ones.size:
            np.add.at(fp, block_of[ones], shared.fmat[:, ones].T.astype(np.int64))
        return BlockMessages(shared, k, fingerprints=(fp & 1).astype(np.uint8))
    r_count, b_count = params.repetitions, params.bucket_count
    if ones.size:
        rep_base = (
            np.arange(r_count, dtype=np.int64)[:, None] * k + block_of[ones][None, :]
        )
        flat = rep_base * b_count + shared.buckets[:, ones]
        counts = np.bincount(flat.ravel(), minlength=r_count * k * b_count)
        par = (counts & 1).astype(np.uint8).reshape(r_count, k, b_count)
    else:
        par = np.zeros((r_count, k, b_count), dtype=np.uint8)
    if params.strategy == "bucket":
        return BlockMessages(shared, k, parities=par)
    code = params.code
    par_f = par.reshape(r_count * k, b_count).astype(np.float32)
    synd = _mod2(par_f @ code.H_f32.T).reshape(r_count, k, code.redundancy)
    stacked = np.matmul(  # (R, f, B) @ (R, B, k) -> (R, f, k), batched BLAS
        shared.fmat_f32, par_f.reshape(r_count, k, b_count).transpose(0, 2, 1)
    )
    fp = np.ascontiguousarray(_mod2(stacked).transpose(0, 2, 1))
    return BlockMessages(shared, k, parities=par, syndromes=synd, fingerprints=fp)


def decide_block(
    msgs_a: BlockMessages, msgs_b: BlockMessages, i: int
) -> HDVerdict:
    """Referee's verdict for block i of one stacked threshold instance."""
    shared = msgs_a.shared
    params = shared.params
    if params.strategy == "raw":
        a = msgs_a.block_payload(i)
        b = msgs_b.block_payload(i)
        dist = int((a ^ b).sum())
        return HDVerdict(le=dist <= params.d, estimate=dist)
    if params.d == 0:
        same = bool((msgs_a.fingerprints[i] == msgs_b.fingerprints[i]).all())
        return HDVerdict(le=same, estimate=0 if same else 1)
    if params.strategy == "bucket":
        diff = msgs_a.parities[:, i, :] ^ msgs_b.parities[:, i, :]
        estimate = int(diff.sum(axis=1).max())
        return HDVerdict(le=estimate <= params.d, estimate=estimate)
    code = params.code
    diffs = msgs_a.syndromes[:, i, :] ^ msgs_b.syndromes[:, i, :]
    if not diffs.any():
        return HDVerdict(le=True, estimate=0)
    fpd = msgs_a.fingerprints[:, i, :] ^ msgs_b.fingerprints[:, i, :]
    packed_rows = np.packbits(diffs, axis=1, bitorder="little")
    estimate = 0
    for rep in range(params.repetitions):
        packed = int.from_bytes(packed_rows[rep].tobytes(), "little")
        hit = code.decode_elements(code.elements_from_packed(packed)) if packed else ()
        if hit is None or not _fingerprint_matches(shared.fmat[rep], hit, fpd[rep]):
            return HDVerdict(le=False, estimate=params.d + 1)
        estimate = max(estimate, len(hit))
    return HDVerdict(le=True, estimate=estimate)


__all__ = [
    "STRATEGIES",
    "HDParams",
    "HDShared",
    "HDMessage",
    "HDVerdict",
    "hd_shared",
    "hd_encode",
    "hd_encode_shared",
    "hd_decide",
    "find_threshold",
    "threshold_search",
    "exact_block_distance",
    "BlockMessages",
    "encode_blocks",
    "decide_block",
]
